# coding: utf-8

# # Comparing read/write policies on a small talk
#
# The fixture talk under `tests/data/talk` has six short utterances with
# fillers, a stutter and a whitelisted repetition. A toy lexicon stands in
# for the translation model.

# In[1]:

from pathlib import Path

from iutrans.pipeline import RunConfig, run_pipeline, summary_table

TALK = Path(__file__).resolve().parent.parent / "tests" / "data" / "talk"

# Four policies: whole sentences, independent IUs, wait-3 and the
# context-aware policy that re-decodes with a forced prefix after dropping
# the last committed token.

# In[2]:

for kind in ("full", "subsentence", "wait_k", "context_aware"):
    cfg = RunConfig.from_file(str(TALK / "run.ini"), {"policy.kind": kind})
    s = run_pipeline(cfg)["summary"]
    print(f"{kind:14} mean 1/EE={s['mean_inverse_ee']:6.2f}  mean AL={s['mean_al']:5.2f}  "
          f"retractions={s['total_retractions']}  BLEU={s['bleu']:.2f}")

# The full report carries per-utterance detail; the summary table is what
# `iutrans run` prints to stderr.

# In[3]:

print(summary_table(run_pipeline(RunConfig.from_file(str(TALK / "run.ini")))))

# ## Retractions in the display
#
# Context-aware decoding may rewrite the last `k_discard` words of the
# current sentence. A display that holds those words back never shows a
# retraction, which matters for speech output.

# In[4]:

from iutrans.detector import DetectorConfig, PunctuationScorer
from iutrans.policies import PolicyConfig, ToyLexiconOracle, committed_prefix_trace, translate_stream
from iutrans.stream import tokens_from_surfaces

full = ToyLexiconOracle({"a": "A", "b": "B", "，": ",", "c": "C", "。": "."})
partial = ToyLexiconOracle({**full.lexicon, "，": "and"})
res = translate_stream(tokens_from_surfaces("a b ， c 。".split()), DetectorConfig(PunctuationScorer()),
                       full, PolicyConfig("context_aware", k_discard=1), partial_oracle=partial)
print("revising :", committed_prefix_trace(res.timeline))
print("held back:", committed_prefix_trace(res.timeline, hold_back=True))
