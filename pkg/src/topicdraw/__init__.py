"""topicdraw: central-word topic exploration over POS-tagged diachronic corpora.

Pipeline: expand a central word into a similar-word set (PPMI vectors
under information-budgeted context windows), condense the corpus to the
lines touching that set, train LDA on the condensed corpus, and derive
per-year frequency/similarity series. A CLI (``topicdraw``) and an HTTP
service expose every stage.
"""

from .condenser import CondensedCorpus, condense, export, reduction_report
from .corpus import (
    CorpusHandle,
    Document,
    StopwordList,
    Token,
    Vocabulary,
    default_stopwords,
    ingest,
    load_stopwords,
)
from .diachron import frequency_series, similarity_series
from .errors import (
    ConfigError,
    DomainError,
    EmptyResultError,
    TopicdrawError,
    UnknownWordError,
)
from .similarity import PmiVector, SimilarWordSet, cosine, pmi, pmi_vector, top_k_similar
from .topics import LdaConfig, TopicModelResult, prevalence, top_words, train_lda
from .window_stats import (
    CountStore,
    ThresholdTable,
    WindowTrace,
    build_counts,
    grow_window,
    information,
)

__version__ = "0.1.0"

__all__ = [
    "CondensedCorpus",
    "ConfigError",
    "CorpusHandle",
    "CountStore",
    "Document",
    "DomainError",
    "EmptyResultError",
    "LdaConfig",
    "PmiVector",
    "SimilarWordSet",
    "StopwordList",
    "ThresholdTable",
    "Token",
    "TopicModelResult",
    "TopicdrawError",
    "UnknownWordError",
    "Vocabulary",
    "WindowTrace",
    "build_counts",
    "condense",
    "cosine",
    "default_stopwords",
    "export",
    "frequency_series",
    "grow_window",
    "information",
    "ingest",
    "load_stopwords",
    "pmi",
    "pmi_vector",
    "prevalence",
    "reduction_report",
    "similarity_series",
    "top_k_similar",
    "top_words",
    "train_lda",
]
