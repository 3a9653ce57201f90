"""Learned substring-cost transliteration: alignment, training, generation,
lexicon matching, evaluation and cross-language friend detection."""

from .align import Alignment, align, is_flawed
from .evaluation import Report, evaluate, levenshtein1
from .generation import Candidate, construct_topk, pivot_topk
from .ingestion import Lexicon, LoadError, PairCorpus, clean_corpus, load_lexicon, load_pairs, split_corpus
from .matching import LexiconIndex, detect_best, rank_of
from .model import ContractError, TransliterationModel, deserialize, serialize
from .training import TrainConfig, train

__all__ = [
    "Alignment",
    "Candidate",
    "ContractError",
    "Lexicon",
    "LexiconIndex",
    "LoadError",
    "PairCorpus",
    "Report",
    "TrainConfig",
    "TransliterationModel",
    "align",
    "clean_corpus",
    "construct_topk",
    "deserialize",
    "detect_best",
    "evaluate",
    "is_flawed",
    "levenshtein1",
    "load_lexicon",
    "load_pairs",
    "pivot_topk",
    "rank_of",
    "serialize",
    "split_corpus",
    "train",
]

__version__ = "0.1.0"
