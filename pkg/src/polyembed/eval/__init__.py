from .analysis import CorrelationTable, intersect_vocabularies, metric_correlation
from .classify import eval_doc_classification, majority_baseline
from .datasets import (
    Document,
    LinguisticMatrix,
    SimilarityDataset,
    TranslationDataset,
    build_linguistic_matrix,
    read_documents,
    read_similarity_dataset,
    read_translation_dataset,
)
from .intrinsic import ScoreReport, cosine, eval_word_similarity, eval_word_translation
from .qvec import correlation_table, multiqvec, multiqvec_cca, qvec, qvec_cca

__all__ = [
    "CorrelationTable",
    "Document",
    "LinguisticMatrix",
    "ScoreReport",
    "SimilarityDataset",
    "TranslationDataset",
    "build_linguistic_matrix",
    "correlation_table",
    "cosine",
    "eval_doc_classification",
    "eval_word_similarity",
    "eval_word_translation",
    "intersect_vocabularies",
    "majority_baseline",
    "metric_correlation",
    "multiqvec",
    "multiqvec_cca",
    "qvec",
    "qvec_cca",
    "read_documents",
    "read_similarity_dataset",
    "read_translation_dataset",
]
