# coding: utf-8

# # Required and forbidden phrases
#
# Beam search with dynamic beam allocation forces phrases into the output;
# forbidden phrases are pruned outright. The scorer below is a tiny
# hand-made bigram table.

# In[1]:

import math

from iutrans.beam import ConstraintSet, InfeasibleConstraints, beam_search, plain_beam_search

BIGRAMS = {
    "<s>": {"we": 0.6, "AI": 0.1, "discuss": 0.3},
    "we": {"discuss": 0.9, "AI": 0.1},
    "discuss": {"artificial": 0.7, "AI": 0.2, "</s>": 0.1},
    "artificial": {"intelligence": 1.0},
    "intelligence": {"</s>": 1.0},
    "AI": {"</s>": 0.8, "today": 0.2},
    "today": {"</s>": 1.0},
}


class Bigram:
    vocab = ("we", "discuss", "artificial", "intelligence", "AI", "today", "</s>")
    eos = "</s>"

    def next_scores(self, prefix):
        row = BIGRAMS.get(prefix[-1] if prefix else "<s>", {})
        return [math.log(row.get(w, 1e-6)) for w in self.vocab]


print(plain_beam_search(Bigram(), beam_size=3, max_len=6))

# Forbid the long form and require the acronym.

# In[2]:

cons = ConstraintSet(positive=[("AI",)], negative=[("artificial", "intelligence")])
print(beam_search(Bigram(), cons, beam_size=3, max_len=6))

# Requests that cannot be met within the length budget fail loudly.

# In[3]:

try:
    beam_search(Bigram(), ConstraintSet([("we", "discuss", "AI", "today")]), 3, max_len=3)
except InfeasibleConstraints as exc:
    print("infeasible:", exc)
