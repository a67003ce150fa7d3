# coding: utf-8

# # Equilibrium Efficiency versus average lagging
#
# A translation timeline is a list of segments: read LX source tokens, then
# write LY target tokens. Equilibrium Efficiency (EE) tracks the backlog a
# listener accumulates while the system writes faster than it reads, and
# 1/EE reads as "words of lag".

# In[1]:

from iutrans.latency import average_lagging, backlog_trace, equilibrium_efficiency, inverse_ee, lag_terms

# A single burst of eight words after the whole sentence lags by eight words.

# In[2]:

print(equilibrium_efficiency([(5, 8)], r=0.3))

# Backlog carries over between segments and is clamped at zero.

# In[3]:

segments = [(2, 10), (4, 10), (4, 4)]
print("backlog", backlog_trace(segments, r=0.3))
print("1/EE   ", inverse_ee(segments, r=0.3))

# ## Why not average lagging?
#
# Average lagging compares each target token with an ideal wait-k writer.
# Emitting more target words than source words read makes later tokens
# look *ahead* of the source: reading 4 tokens and writing 6 gives a lag of
# -1 for the sixth token.

# In[4]:

print(lag_terms([4] * 6, ratio=1.0))

# For a genuine wait-k schedule AL recovers k.

# In[5]:

n = 10
for k in (1, 3, 5):
    g = [min(t + k - 1, n) for t in range(1, n + 1)]
    print(k, average_lagging(g, n))
