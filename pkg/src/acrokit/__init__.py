"""Acronym identification and disambiguation toolkit."""

from .ad_corpus import Document, build_dictionary, find_local_definitions, generate_silver_ad
from .disambiguation import (
    ContextProfile,
    predict_context,
    predict_frequency,
    train_context,
    train_frequency,
)
from .evaluation import EvalReport, evaluate_ad, evaluate_ai, oracle_evaluate
from .formats import load_ad_dataset, load_ai_dataset, load_dictionary, load_frequency
from .identification import (
    IdentifierConfig,
    filter_sentences,
    find_candidate_long_forms,
    identify,
    is_candidate_acronym,
    match_long_form,
)
from .model import (
    AcronymDictionary,
    AdInstance,
    BioLabel,
    DataError,
    FrequencyTable,
    SpanAnnotation,
    SpanKind,
    TokenSentence,
    extract_spans,
    spans_to_labels,
)

__version__ = "0.1.0"

__all__ = [
    "AcronymDictionary",
    "AdInstance",
    "BioLabel",
    "ContextProfile",
    "DataError",
    "Document",
    "EvalReport",
    "FrequencyTable",
    "IdentifierConfig",
    "SpanAnnotation",
    "SpanKind",
    "TokenSentence",
    "build_dictionary",
    "evaluate_ad",
    "evaluate_ai",
    "extract_spans",
    "filter_sentences",
    "find_candidate_long_forms",
    "find_local_definitions",
    "generate_silver_ad",
    "identify",
    "is_candidate_acronym",
    "load_ad_dataset",
    "load_ai_dataset",
    "load_dictionary",
    "load_frequency",
    "match_long_form",
    "oracle_evaluate",
    "predict_context",
    "predict_frequency",
    "spans_to_labels",
    "train_context",
    "train_frequency",
]
