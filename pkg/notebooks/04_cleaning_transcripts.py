# coding: utf-8

# # Cleaning transcripts before translation
#
# Three drop-only passes: fillers, unconscious repetitions and tokens a
# language model finds implausible.

# In[1]:

from iutrans.normalize import NGramLM, NormalizerConfig, filter_abnormal, remove_fillers, remove_repetitions

cfg = NormalizerConfig()
print(remove_fillers("那个 叫 什么 呃 妖姬".split(), cfg))

# Repetitions are collapsed block-wise, whatever the block length.

# In[2]:

for text in ["什么 什么", "我 我 我 想 说", "a b a b c"]:
    print(text, "->", " ".join(remove_repetitions(text.split(), cfg)))

# Some repetitions are meant. A whitelist keeps them.

# In[3]:

sentence = "他 必须 分成 很多 个 小格 ， 一个 小格 一个 小格 完成".split()
print(" ".join(remove_repetitions(sentence, cfg)))
keep = NormalizerConfig(whitelist=frozenset({("一个", "小格", "一个", "小格")}))
print(" ".join(remove_repetitions(sentence, keep)))

# ## Dropping implausible tokens
#
# An ASR system may hear 石油 (oil) where the speaker said 食油 (cooking
# oil). A language model that never saw 石油 gives it a tiny conditional
# probability, and the filter drops it.

# In[4]:

lm = NGramLM.train([["食油", "很", "贵"]], order=3, alpha=0.1)
print(lm.cond_prob([], "石油"), lm.cond_prob([], "食油"))
for xi in (0.01, 0.05, 0.5):
    print(xi, filter_abnormal(["石油", "很", "贵"], lm, xi))
