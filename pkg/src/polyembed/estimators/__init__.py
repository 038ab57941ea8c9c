from .graph import ClusterAssignment, TranslationGraph, build_translation_graph, cluster_components
from .invariance import build_alignment_matrix, build_pmi_matrix, invariance_targets, invariance_train
from .multicca import multicca_train, train_monolingual
from .multicluster import MAX_CLUSTER_SIZE_12, MAX_CLUSTER_SIZE_59, cluster_corpora, multicluster_train
from .multiskip import bilingual_layout, ensure_alignments, multiskip_train

__all__ = [
    "MAX_CLUSTER_SIZE_12",
    "MAX_CLUSTER_SIZE_59",
    "ClusterAssignment",
    "TranslationGraph",
    "bilingual_layout",
    "build_alignment_matrix",
    "build_pmi_matrix",
    "build_translation_graph",
    "cluster_components",
    "cluster_corpora",
    "ensure_alignments",
    "invariance_targets",
    "invariance_train",
    "multicca_train",
    "multicluster_train",
    "multiskip_train",
    "train_monolingual",
]
