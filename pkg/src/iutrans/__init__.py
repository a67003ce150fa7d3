"""Simultaneous translation over detected information units.

Streams of ASR-like tokens are cleaned, cut into information units by a
dynamic-context boundary detector, translated under a read/write policy and
scored for latency with Equilibrium Efficiency and average lagging.
"""
from .alignment import AlignmentSet, SubSentencePair, extract_pairs, is_pair_boundary
from .beam import ConstraintSet, InfeasibleConstraints, PhraseMatcher, beam_search, plain_beam_search
from .bleu import corpus_bleu
from .detector import DetectorConfig, DetectorState, FrequencyBoundaryScorer, PunctuationScorer, detect, flush, step
from .latency import EEParams, average_lagging, equilibrium_efficiency, inverse_ee
from .normalize import NGramLM, NormalizerConfig, filter_abnormal, remove_fillers, remove_repetitions
from .policies import PolicyConfig, ToyLexiconOracle, committed_prefix_trace, context_aware_continue, translate_stream
from .stream import InformationUnit, Token, TranslationTimeline, parse_stream, serialize_stream

__version__ = "0.1.0"
