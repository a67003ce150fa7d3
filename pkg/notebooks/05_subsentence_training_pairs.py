# coding: utf-8

# # Sub-sentence training pairs from word alignments
#
# A split point (i, j) is usable when source prefix x_1..x_i and target
# prefix y_1..y_j translate each other: (i, j) is aligned and no alignment
# link crosses the cut.

# In[1]:

from iutrans.alignment import AlignmentSet, extract_pairs, make_context_corpus, make_partial_corpus, parse_pharaoh

X = "我们 今天 ， 讨论 问题".split()
Y = "today we , discuss problems".split()
A = AlignmentSet.of(parse_pharaoh("0-1 1-0 2-2 3-3 4-4", len(X), len(Y)), len(X), len(Y))
for pair in extract_pairs(X, Y, A):
    print(pair.split_point, pair.split_kind, " ".join(pair.source_prefix), "|", " ".join(pair.target_prefix))

# (1, 1) is missing: 我们 aligns to "we", which sits after "today".
#
# Partial-decoding records are the prefixes themselves. Context-aware
# records keep the whole pair and mask the loss on the given prefix.

# In[2]:

print(make_partial_corpus(X, Y, A, (3, 3)).to_line())
print(make_context_corpus(X, Y, A, (3, 3)).to_line())
