"""Node-label prediction harness.

One-vs-rest L2-regularized logistic regression on embedding rows, multi-label
top-k prediction (k = the node's true label count), Micro/Macro-F1, and the
fraction-sweep / repeated-split protocols. The classifier is fitted by
deterministic full-batch gradient descent with backtracking line search, so
identical inputs always produce identical reports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .graph import LabelStore

NEG_CONST = -1e30  # score of the constant-negative classifier


@dataclass
class EvalProtocol:
    """Train-fraction sweep with repeated random splits."""

    fractions: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    repeats: int = 10
    seed: int = 42
    reg: float = 0.01

    def __post_init__(self):
        self.fractions = tuple(float(f) for f in self.fractions)
        if not self.fractions:
            raise ValueError("need at least one train fraction")
        if any(not (0.0 < f < 1.0) for f in self.fractions):
            raise ValueError("train fractions must lie strictly in (0, 1)")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.reg < 0:
            raise ValueError("reg must be >= 0")


class OvrModel:
    """One binary classifier per label: weights (L x d) and biases (L,)."""

    def __init__(self, weights: np.ndarray, biases: np.ndarray, reg: float):
        self.weights = weights
        self.biases = biases
        self.reg = reg

    @property
    def num_labels(self) -> int:
        return self.weights.shape[0]

    def scores(self, x: np.ndarray) -> np.ndarray:
        """Per-label decision values for one feature vector."""
        return self.weights @ x + self.biases


def split_labeled(nodes, fraction: float, seed: int):
    """Uniform random train/test partition of the labeled nodes.

    |train| = round(fraction * m), clamped so both sides keep at least one
    node. Deterministic per seed.
    """
    nodes = list(nodes)
    m = len(nodes)
    if m < 2:
        raise ValueError("need at least two labeled nodes to split")
    if not (0.0 < fraction < 1.0):
        raise ValueError("fraction must lie strictly in (0, 1)")
    n_train = int(round(fraction * m))
    n_train = min(max(n_train, 1), m - 1)
    order = np.random.default_rng(seed).permutation(m)
    train = [nodes[i] for i in order[:n_train]]
    test = [nodes[i] for i in order[n_train:]]
    return train, test


def _fit_binary(X: np.ndarray, y: np.ndarray, reg: float,
                grad_tol: float = 1e-6, max_iters: int = 1000):
    """Minimize mean log-loss + reg * ||w||^2 / 2 by full-batch descent.

    Backtracking (Armijo) line search; stops once the gradient norm falls
    below grad_tol. The bias is not regularized.
    """
    m, d = X.shape
    w = np.zeros(d)
    b = 0.0
    sign = np.where(y, 1.0, -1.0)

    def value_grad(w, b):
        z = X @ w + b
        margins = sign * z
        val = float(np.mean(np.logaddexp(0.0, -margins))) + 0.5 * reg * float(w @ w)
        coef = -sign * np.exp(-np.logaddexp(0.0, margins))  # sigmoid(-margin), overflow-safe
        gw = (X.T @ coef) / m + reg * w
        gb = float(np.mean(coef))
        return val, gw, gb

    val, gw, gb = value_grad(w, b)
    for _ in range(max_iters):
        gnorm2 = float(gw @ gw) + gb * gb
        if np.sqrt(gnorm2) < grad_tol:
            break
        step = 1.0
        for _ in range(60):
            w_new = w - step * gw
            b_new = b - step * gb
            val_new, gw_new, gb_new = value_grad(w_new, b_new)
            if val_new <= val - 1e-4 * step * gnorm2:
                break
            step *= 0.5
        if val_new > val:  # line search exhausted; keep the better point
            break
        w, b, val, gw, gb = w_new, b_new, val_new, gw_new, gb_new
    return w, b


def train_ovr(X: np.ndarray, labels: LabelStore, train_nodes, reg: float = 0.01) -> OvrModel:
    """Fit one binary classifier per vocabulary label on the train nodes.

    Labels with no positive train node get a constant-negative classifier.
    """
    train_nodes = list(train_nodes)
    if not train_nodes:
        raise ValueError("empty train set")
    Xtr = X[train_nodes]
    L = labels.num_labels
    d = X.shape[1]
    weights = np.zeros((L, d))
    biases = np.full(L, NEG_CONST)
    any_label = False
    for lid in range(L):
        y = np.array([lid in labels.labels_of(v) for v in train_nodes], dtype=bool)
        if not y.any():
            continue
        any_label = True
        w, b = _fit_binary(Xtr, y, reg)
        weights[lid] = w
        biases[lid] = b
    if not any_label:
        raise ValueError("no label is present in the train set")
    return OvrModel(weights, biases, reg)


def predict_multilabel(model: OvrModel, x: np.ndarray, k: int):
    """The k labels with highest scores; ties broken by ascending label id."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > model.num_labels:
        raise ValueError(f"k={k} exceeds the vocabulary size {model.num_labels}")
    if k == 0:
        return frozenset()
    s = model.scores(x)
    order = np.lexsort((np.arange(len(s)), -s))  # score desc, label id asc
    return frozenset(int(l) for l in order[:k])


def _counts(truth: dict, predicted: dict):
    if set(truth) != set(predicted):
        raise ValueError("truth and prediction cover different node sets")
    tp, fp, fn = {}, {}, {}
    for node, t in truth.items():
        p = predicted[node]
        for l in p & t:
            tp[l] = tp.get(l, 0) + 1
        for l in p - t:
            fp[l] = fp.get(l, 0) + 1
        for l in t - p:
            fn[l] = fn.get(l, 0) + 1
    return tp, fp, fn


def micro_f1(truth: dict, predicted: dict) -> float:
    """F1 over globally pooled true/false positive/negative counts."""
    tp, fp, fn = _counts(truth, predicted)
    TP, FP, FN = sum(tp.values()), sum(fp.values()), sum(fn.values())
    denom = 2 * TP + FP + FN
    return 2 * TP / denom if denom else 0.0


def macro_f1(truth: dict, predicted: dict) -> float:
    """Unweighted mean of per-label F1 over labels with any support.

    A label enters the mean if it has a true or predicted instance; a label
    with support but no true positives scores 0.
    """
    tp, fp, fn = _counts(truth, predicted)
    labels = set(tp) | set(fp) | set(fn)
    if not labels:
        return 0.0
    total = 0.0
    for l in labels:
        denom = 2 * tp.get(l, 0) + fp.get(l, 0) + fn.get(l, 0)
        total += 2 * tp.get(l, 0) / denom if denom else 0.0
    return total / len(labels)


@dataclass
class EvalReport:
    """Per-(fraction, repeat) scores plus per-fraction aggregates."""

    fractions: tuple
    repeats: int
    seed: int
    reg: float
    micro: dict = field(default_factory=dict)  # fraction -> [score per repeat]
    macro: dict = field(default_factory=dict)

    def mean_micro(self, fraction: float) -> float:
        return float(np.mean(self.micro[fraction]))

    def mean_macro(self, fraction: float) -> float:
        return float(np.mean(self.macro[fraction]))

    def sd_micro(self, fraction: float) -> float:
        return float(np.std(self.micro[fraction]))

    def sd_macro(self, fraction: float) -> float:
        return float(np.std(self.macro[fraction]))

    def to_dict(self) -> dict:
        return {
            "protocol": {
                "fractions": list(self.fractions),
                "repeats": self.repeats,
                "seed": self.seed,
                "reg": self.reg,
            },
            "micro_f1": {f"{f:g}": list(self.micro[f]) for f in self.fractions},
            "macro_f1": {f"{f:g}": list(self.macro[f]) for f in self.fractions},
            "mean_micro": {f"{f:g}": self.mean_micro(f) for f in self.fractions},
            "mean_macro": {f"{f:g}": self.mean_macro(f) for f in self.fractions},
            "sd_micro": {f"{f:g}": self.sd_micro(f) for f in self.fractions},
            "sd_macro": {f"{f:g}": self.sd_macro(f) for f in self.fractions},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_tsv(self) -> str:
        lines = ["fraction\tmean_micro\tsd_micro\tmean_macro\tsd_macro"]
        for f in self.fractions:
            lines.append(
                f"{f:g}\t{self.mean_micro(f):.17g}\t{self.sd_micro(f):.17g}"
                f"\t{self.mean_macro(f):.17g}\t{self.sd_macro(f):.17g}"
            )
        return "\n".join(lines) + "\n"


def run_protocol(X: np.ndarray, labels: LabelStore,
                 protocol: EvalProtocol) -> EvalReport:
    """Sweep train fractions with repeated splits and score each repeat.

    Per repeat: split the labeled nodes, fit the one-vs-rest model on the
    train side, predict top-k labels (k = true label count) on the test
    side, and record Micro/Macro-F1. Per-repeat split seeds are
    protocol.seed + repeat index.
    """
    nodes = labels.labeled_nodes()
    report = EvalReport(fractions=protocol.fractions, repeats=protocol.repeats,
                        seed=protocol.seed, reg=protocol.reg)
    for fraction in protocol.fractions:
        report.micro[fraction] = []
        report.macro[fraction] = []
        for rep in range(protocol.repeats):
            train, test = split_labeled(nodes, fraction, protocol.seed + rep)
            model = train_ovr(X, labels, train, protocol.reg)
            truth = {v: set(labels.labels_of(v)) for v in test}
            predicted = {
                v: set(predict_multilabel(model, X[v], len(truth[v])))
                for v in test
            }
            report.micro[fraction].append(micro_f1(truth, predicted))
            report.macro[fraction].append(macro_f1(truth, predicted))
    return report
