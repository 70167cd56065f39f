"""Multi-view embedding: view weighting, combination, shared factorization.

The views are merged into a single adjacency W~ = sum_i beta_i W^(i) over
the shared node registry, and one factorization (H, lam) is fitted to the
combination, so every view is explained by the same latent communities.
View weights beta default to the per-view active-node counts, normalized to
sum 1; per-view total weights can differ by orders of magnitude, so each
view is rescaled to unit total weight before combining unless disabled.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .factorize import Factorization, FactorizeConfig, factorize
from .graph import MultiViewGraph, SparseAdjacency


@dataclass
class ViewWeights:
    """Convex weights over views; normalized to sum 1 on construction."""

    beta: np.ndarray

    def __init__(self, beta):
        beta = np.asarray(beta, dtype=np.float64)
        if beta.ndim != 1 or beta.size == 0:
            raise ValueError("beta must be a non-empty vector")
        if (beta < 0).any():
            raise ValueError("beta entries must be nonnegative")
        total = beta.sum()
        if total <= 0:
            raise ValueError("beta must have positive total")
        if abs(total - 1.0) > 1e-12:
            warnings.warn(f"view weights sum to {total:.6g}; renormalizing to 1",
                          stacklevel=2)
            beta = beta / total
        self.beta = beta

    @property
    def k(self) -> int:
        return self.beta.size


@dataclass
class MvneConfig:
    """FactorizeConfig plus the view-combination policy."""

    factorize: FactorizeConfig
    betas: ViewWeights | None = None  # None -> default by active-node counts
    normalize_views: bool = True


def default_betas(graph: MultiViewGraph) -> ViewWeights:
    """beta_i proportional to the number of active nodes in view i."""
    counts = graph.active_counts().astype(np.float64)
    if counts.sum() <= 0:
        raise ValueError("every view is empty; cannot derive view weights")
    return ViewWeights(counts / counts.sum())


def combine_views(graph: MultiViewGraph, weights: ViewWeights,
                  normalize_views: bool = True) -> SparseAdjacency:
    """Entrywise weighted sum of the views over the global index space.

    Views with beta = 0 (or nothing stored) contribute nothing, also to the
    support. With normalize_views each view is first scaled to total weight
    one.
    """
    if weights.k != graph.k:
        raise ValueError(f"got {weights.k} weights for {graph.k} views")
    n = graph.n
    acc = None
    for beta, adj in zip(weights.beta, graph.views):
        if beta == 0.0 or adj.nnz == 0:
            continue
        if adj.n != n:
            raise ValueError("view adjacency not indexed by the shared registry")
        scale = beta / adj.total_weight if normalize_views else beta
        term = adj.mat * scale
        acc = term if acc is None else acc + term
    if acc is None:
        acc = sp.csr_array((n, n), dtype=np.float64)
    acc = sp.csr_array(acc)
    acc.eliminate_zeros()
    return SparseAdjacency(acc)


def mvne_embed(graph: MultiViewGraph, config: MvneConfig) -> Factorization:
    """Shared factorization of the combined view.

    The returned embedding covers every registry node; nodes absent from all
    positive-weight views keep their initial membership rows and are listed
    in the run metadata.
    """
    if graph.k == 0:
        raise ValueError("graph has no views")
    weights = config.betas if config.betas is not None else default_betas(graph)
    combined = combine_views(graph, weights, config.normalize_views)
    fac = factorize(combined, config.factorize)
    return fac


def svne_embed(adj: SparseAdjacency, config: MvneConfig) -> Factorization:
    """Single-view embedding: the k = 1 case of mvne_embed."""
    if config.normalize_views:
        if adj.total_weight <= 0:
            raise ValueError("graph has no edges; total weight is zero")
        scaled = SparseAdjacency(adj.mat * (1.0 / adj.total_weight))
        return factorize(scaled, config.factorize)
    return factorize(adj, config.factorize)
