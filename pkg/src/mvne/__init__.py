"""mvne: sparse-graph node embeddings from shared-community factorization.

Single-view embeddings come from factorizing one adjacency; multi-view
embeddings share one factorization across a weighted combination of views.
Includes a node-label-prediction evaluation harness and a synthetic
multi-view generator for verification at desk scale.
"""

__version__ = "0.1.0"

from .evaluate import (EvalProtocol, EvalReport, OvrModel, macro_f1, micro_f1,
                       predict_multilabel, run_protocol, split_labeled,
                       train_ovr)
from .factorize import (Factorization, FactorizeConfig, embedding, factorize,
                        init_factorization, kl_objective, read_embedding,
                        reconstruct_dense, reconstruct_entry, update_step,
                        write_embedding)
from .graph import (LabelStore, MultiViewGraph, NodeRegistry, ParseError,
                    SparseAdjacency, build_multiview, load_edge_list,
                    load_labels, read_manifest, view_stats, write_edge_list)
from .multiview import (MvneConfig, ViewWeights, combine_views, default_betas,
                        mvne_embed, svne_embed)
from .testkit import (SbmSpec, dense_factorize_oracle, dense_kl_objective,
                      dense_update_step, dump_dataset, generate_multiview_sbm,
                      random_weighted_graph)

__all__ = [
    "EvalProtocol", "EvalReport", "OvrModel", "macro_f1", "micro_f1",
    "predict_multilabel", "run_protocol", "split_labeled", "train_ovr",
    "Factorization", "FactorizeConfig", "embedding", "factorize",
    "init_factorization", "kl_objective", "read_embedding",
    "reconstruct_dense", "reconstruct_entry", "update_step", "write_embedding",
    "LabelStore", "MultiViewGraph", "NodeRegistry", "ParseError",
    "SparseAdjacency", "build_multiview", "load_edge_list", "load_labels",
    "read_manifest", "view_stats", "write_edge_list",
    "MvneConfig", "ViewWeights", "combine_views", "default_betas",
    "mvne_embed", "svne_embed",
    "SbmSpec", "dense_factorize_oracle", "dense_kl_objective",
    "dense_update_step", "dump_dataset", "generate_multiview_sbm",
    "random_weighted_graph",
]
