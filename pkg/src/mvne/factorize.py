"""Single-view graph factorization under the generalized KL divergence.

The model approximates a symmetric nonnegative adjacency W by a low-rank
bipartite construction: each node i carries a nonnegative mass vector over d
latent communities, collected in a matrix B (n x d), and the reconstruction is

    yhat_ij = sum_p b_ip * b_jp / lam_p,      lam_p = sum_i b_ip

i.e. the weight induced by two-hop paths through the latent communities. The
fit minimizes the generalized KL divergence

    L(W, Yhat) = sum_ij ( w_ij log(w_ij / yhat_ij) - w_ij + yhat_ij )

with the multiplicative ratio-kernel update

    B <- B * (R @ B) / lam,     R_ij = w_ij / yhat_ij at stored entries

which is a majorize-minimize step: the objective is non-increasing at every
iteration, mass stays nonnegative, and sum(lam) = sum(W) holds after each
update. The exposed factorization keeps the row-normalized memberships
H = B / rowsum(B) (each row a distribution over communities) together with
the community masses lam; H is the per-node embedding.

Zero-degree nodes receive no update signal: their membership rows stay at
their initial values and they are flagged in the run metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import SparseAdjacency

UPDATE_FORMS = ("ratio", "literal-log")


@dataclass
class FactorizeConfig:
    """Knobs for one factorization run.

    rel_tol stops the loop once the relative objective improvement per
    iteration falls below it; epsilon floors logs and divisions.
    """

    d: int
    max_iters: int = 500
    rel_tol: float = 1e-6
    seed: int = 42
    epsilon: float = 1e-12
    update_form: str = "ratio"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be >= 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.update_form not in UPDATE_FORMS:
            raise ValueError(f"update_form must be one of {UPDATE_FORMS}")


@dataclass
class RunMetadata:
    """Bookkeeping recorded by factorize()."""

    iterations: int = 0
    objective: float = float("nan")
    objective_trace: list = field(default_factory=list)
    degenerate_nodes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "objective": self.objective,
            "objective_trace": self.objective_trace,
            "degenerate_nodes": self.degenerate_nodes,
        }


class Factorization:
    """Row-stochastic memberships H (n x d) plus community masses lam.

    ``mass`` is the underlying nonnegative node-community mass matrix B that
    the reconstruction and the updates operate on. Building a factorization
    directly from (H, lam) takes B = H * lam, the mass split implied by the
    memberships.
    """

    def __init__(self, H: np.ndarray, lam: np.ndarray, mass: np.ndarray | None = None,
                 run: RunMetadata | None = None):
        H = np.asarray(H, dtype=np.float64)
        lam = np.asarray(lam, dtype=np.float64)
        if H.ndim != 2:
            raise ValueError("H must be 2-D")
        if lam.shape != (H.shape[1],):
            raise ValueError("lam length must equal the number of columns of H")
        if (H < 0).any() or (lam < 0).any():
            raise ValueError("factor entries must be nonnegative")
        self.H = H
        self.lam = lam
        self.mass = H * lam[None, :] if mass is None else np.asarray(mass, dtype=np.float64)
        self.run = run

    @property
    def n(self) -> int:
        return self.H.shape[0]

    @property
    def d(self) -> int:
        return self.H.shape[1]

    def check_invariants(self, total_weight: float | None = None,
                         row_tol: float = 1e-9, lam_tol: float = 1e-6):
        rows = self.H.sum(axis=1)
        if np.abs(rows - 1.0).max() > row_tol:
            raise ValueError("membership rows do not sum to 1")
        if total_weight is not None:
            if abs(self.lam.sum() - total_weight) > lam_tol * max(abs(total_weight), 1e-300):
                raise ValueError("sum(lam) does not match the graph weight")


def init_factorization(n: int, config: FactorizeConfig, total_weight: float) -> Factorization:
    """Uniform-positive random memberships, uniform masses.

    H rows are drawn uniform-positive then row-normalized; lam is split
    evenly so that sum(lam) equals the supplied total weight. Deterministic
    given config.seed.
    """
    if n < 1:
        raise ValueError("need at least one node")
    rng = np.random.default_rng(config.seed)
    H = rng.uniform(0.1, 1.0, size=(n, config.d))
    H /= H.sum(axis=1, keepdims=True)
    lam = np.full(config.d, total_weight / config.d, dtype=np.float64)
    return Factorization(H, lam)


def reconstruct_entry(fac: Factorization, i: int, j: int) -> float:
    """Reconstructed weight between nodes i and j.

    Equals sum_p h_ip * lam_p * h_jp for a factorization built from (H, lam);
    along an optimization trajectory it is the model's two-hop path weight
    sum_p b_ip * b_jp / lam_p.
    """
    lam_safe = np.where(fac.lam > 0, fac.lam, np.inf)
    return float(np.sum(fac.mass[i] * fac.mass[j] / lam_safe))


def reconstruct_dense(fac: Factorization) -> np.ndarray:
    """Full n x n reconstruction (small graphs / tests)."""
    lam_safe = np.where(fac.lam > 0, fac.lam, np.inf)
    return (fac.mass / lam_safe[None, :]) @ fac.mass.T


def _yhat_at_edges(adj: SparseAdjacency, fac: Factorization) -> np.ndarray:
    lam_safe = np.where(fac.lam > 0, fac.lam, np.inf)
    Bl = fac.mass / lam_safe[None, :]
    return np.einsum("ep,ep->e", Bl[adj.coo_rows], fac.mass[adj.indices])


def kl_objective(adj: SparseAdjacency, fac: Factorization,
                 epsilon: float = 1e-12) -> float:
    """Generalized KL divergence between W and the reconstruction.

    The sum runs over all n^2 pairs; zero-weight pairs contribute their
    reconstructed weight. Evaluated sparsely: the data terms only touch
    stored entries, and the total reconstructed mass folds to
    sum_p colsum(B)_p^2 / lam_p, so the cost is O(|E| d + n d).
    """
    w = adj.values
    yhat = np.maximum(_yhat_at_edges(adj, fac), epsilon)
    data_term = float(np.sum(w * np.log(np.maximum(w, epsilon) / yhat) - w)) if adj.nnz else 0.0
    col = fac.mass.sum(axis=0)
    lam_safe = np.maximum(fac.lam, epsilon)
    mass_term = float(np.sum(np.where(col > 0, col * col / lam_safe, 0.0)))
    return data_term + mass_term


def _active_mask(adj: SparseAdjacency) -> np.ndarray:
    return np.diff(adj.indptr) > 0


def _ratio_matrix(adj: SparseAdjacency, fac: Factorization, epsilon: float) -> sp.csr_array:
    """CSR matrix of w_ij / yhat_ij on the support of W."""
    yhat = np.maximum(_yhat_at_edges(adj, fac), epsilon)
    r = adj.values / yhat
    return sp.csr_array((r, adj.indices, adj.indptr), shape=(adj.n, adj.n))


def _update_ratio(adj: SparseAdjacency, fac: Factorization, epsilon: float) -> Factorization:
    R = _ratio_matrix(adj, fac, epsilon)
    lam_safe = np.where(fac.lam > 0, fac.lam, np.inf)
    mass_new = fac.mass * (R @ fac.mass) / lam_safe[None, :]
    total = mass_new.sum()
    if total <= 0:
        raise ValueError("update collapsed all mass; is the graph edgeless?")
    mass_new *= adj.total_weight / total
    lam_new = mass_new.sum(axis=0)
    H_new = fac.H.copy()
    active = _active_mask(adj)
    rowsum = mass_new[active].sum(axis=1, keepdims=True)
    ok = rowsum.ravel() > 0  # a fully underflowed row keeps its last memberships
    idx = np.flatnonzero(active)[ok]
    H_new[idx] = mass_new[idx] / rowsum[ok]
    return Factorization(H_new, lam_new, mass=mass_new)


def _update_literal_log(adj: SparseAdjacency, fac: Factorization, epsilon: float) -> Factorization:
    # Literal transcription of the log-kernel update, for fidelity
    # experiments only: the log factor can be negative, so the numerators
    # are clamped at zero before normalization. No monotonicity guarantee.
    yhat = np.maximum(_yhat_at_edges(adj, fac), epsilon)
    logr = np.log(np.maximum(adj.values, epsilon) / yhat)
    L = sp.csr_array((logr, adj.indices, adj.indptr), shape=(adj.n, adj.n))
    LH = L @ fac.H
    H_num = np.maximum(fac.H * LH * fac.lam[None, :], 0.0)
    lam_num = np.maximum(fac.lam * np.einsum("ip,ip->p", fac.H, LH), 0.0)
    H_new = fac.H.copy()
    active = _active_mask(adj)
    rowsum = H_num[active].sum(axis=1, keepdims=True)
    ok = rowsum.ravel() > 0
    idx = np.flatnonzero(active)[ok]
    H_new[idx] = H_num[idx] / rowsum[ok]
    lam_total = lam_num.sum()
    lam_new = lam_num * (adj.total_weight / lam_total) if lam_total > 0 else fac.lam.copy()
    return Factorization(H_new, lam_new)


def update_step(adj: SparseAdjacency, fac: Factorization,
                config: FactorizeConfig | None = None) -> Factorization:
    """One multiplicative update of the factorization.

    The default ratio form does not increase kl_objective and preserves the
    row-sum and mass constraints exactly (up to float rounding).
    """
    epsilon = config.epsilon if config else 1e-12
    form = config.update_form if config else "ratio"
    if form == "ratio":
        return _update_ratio(adj, fac, epsilon)
    return _update_literal_log(adj, fac, epsilon)


def factorize(adj: SparseAdjacency, config: FactorizeConfig) -> Factorization:
    """Fit the factorization by iterating update_step from a random init.

    Stops when the relative objective improvement drops below
    config.rel_tol or after config.max_iters iterations, and returns the
    best-objective iterate with run metadata attached.
    """
    if adj.total_weight <= 0:
        raise ValueError("graph has no edges; total weight is zero")
    fac = init_factorization(adj.n, config, adj.total_weight)
    obj = kl_objective(adj, fac, config.epsilon)
    trace = [obj]
    best_obj, best_fac = obj, fac
    for it in range(1, config.max_iters + 1):
        fac = update_step(adj, fac, config)
        prev, obj = obj, kl_objective(adj, fac, config.epsilon)
        trace.append(obj)
        if obj < best_obj:
            best_obj, best_fac = obj, fac
        if prev - obj < config.rel_tol * max(abs(prev), 1e-300):
            break
    degenerate = np.flatnonzero(~_active_mask(adj))
    best_fac.run = RunMetadata(
        iterations=it,
        objective=best_obj,
        objective_trace=trace,
        degenerate_nodes=[int(x) for x in degenerate],
    )
    return best_fac


def embedding(fac: Factorization) -> np.ndarray:
    """The per-node embedding: the row-stochastic membership matrix H."""
    return fac.H


def write_embedding(path, X: np.ndarray, names) -> None:
    """Write `n d` then one `name v1 ... vd` line per node (17 sig. digits)."""
    X = np.asarray(X)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{X.shape[0]} {X.shape[1]}\n")
        for name, row in zip(names, X):
            fh.write(name + " " + " ".join(f"{v:.17g}" for v in row) + "\n")


def read_embedding(path):
    """Read the write_embedding() format; returns (names, X)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("embedding file: bad header line")
        n, d = int(header[0]), int(header[1])
        names, rows = [], []
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if len(parts) != d + 1:
                raise ValueError(f"embedding file: expected {d + 1} fields per row")
            names.append(parts[0])
            rows.append([float(v) for v in parts[1:]])
    if len(names) != n:
        raise ValueError(f"embedding file: header promised {n} rows, found {len(names)}")
    return names, np.asarray(rows, dtype=np.float64)


def write_run_metadata(path, meta: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
