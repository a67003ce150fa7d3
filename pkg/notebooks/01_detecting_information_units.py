# coding: utf-8

# # Detecting information units in a token stream
#
# An ASR system hands us tokens one at a time, without reliable sentence
# punctuation. The detector decides where a translatable chunk (an
# information unit, IU) ends. It looks at an *anchor* token plus a growing
# window of tokens after it, and asks a boundary scorer for the probability
# that the anchor closes a unit.

# In[1]:

from iutrans.detector import (
    DetectorConfig, DetectorState, PunctuationScorer, detect, flush, make_training_samples,
    reference_scorer_train, split_on_punctuation, step,
)
from iutrans.stream import tokens_from_surfaces

# The simplest scorer says "boundary" after punctuation and "no" everywhere else.

# In[2]:

tokens = tokens_from_surfaces("她说 我 错了 ， 那个 叫 什么 妖姬 。 好".split(), step_ms=120)
config = DetectorConfig(PunctuationScorer(), delta1=0.7, delta2=0.3)
for unit in detect(tokens, config):
    print(unit.sentence_id, unit.iu_index_in_sentence, unit.is_sentence_final, " ".join(unit.surfaces))

# Streaming works token by token. Nothing is emitted until the detector is
# sure, and the residue comes out with `flush` at the end of the stream.

# In[3]:

state = DetectorState()
for tok in tokens:
    units, state = step(state, config, tok)
    for u in units:
        print(f"after {tok.surface!r:8} -> emit {' '.join(u.surfaces)}")
print("flush ->", " ".join(flush(state).surfaces))

# ## Waiting for more context
#
# When the score falls between the two thresholds the detector waits for
# another context token. Here a stub scorer is unsure about the anchor 姬
# with one token of context (0.4) but confident with two (0.8).

# In[4]:

class Stub:
    table = {(): 0.5, ("这",): 0.4, ("这", "个"): 0.8}

    def score(self, prefix, anchor_position, context):
        return self.table[tuple(context)] if prefix[-1] == "姬" else 0.0


state, cfg = DetectorState(), DetectorConfig(Stub())
for tok in tokens_from_surfaces("叫 什么 妖 姬 这 个 人".split()):
    units, state = step(state, cfg, tok)
    print(f"{tok.surface:4} anchor={state.anchor_index} context={state.context_size} emitted={[u.surfaces for u in units]}")

# ## Training a boundary scorer
#
# Punctuated sentences become labelled samples: a unit followed by a prefix
# of the next unit is positive, a cut inside a unit is negative.

# In[5]:

corpus = ["我 错了 ， 那个 人 。", "她 说 ， 好 。", "我们 今天 ， 讨论 问题 。"]
samples = []
for line in corpus:
    bare, bounds = split_on_punctuation(line.split())
    samples += make_training_samples(bare, bounds)
for tokens_, label in samples[:6]:
    print(label, " ".join(tokens_))

# The reference scorer counts how often an anchor (and anchor plus first
# context token) closed a unit. It is enough to segment unpunctuated input
# drawn from the same toy domain.

# In[6]:

scorer = reference_scorer_train(samples)
for unit in detect(tokens_from_surfaces("她 说 那个 人".split()), DetectorConfig(scorer)):
    print(" ".join(unit.surfaces))
