"""Comparison models on the binary roster encoding: logistic regression,
2-way factorization machine, and the win-ratio similarity matrix.

All trainers share the loss and AdaGrad optimizer used for the embedding
model so benchmark differences reflect the models, not the optimizers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, MatchRecord, TEAM_SIZE
from .errors import ContractError
from .model import sigmoid_vec


@dataclass(frozen=True)
class SparseFeature:
    """Active indices in the 2N-wide binary match encoding: avatar i on red
    activates index i, on blue index i + N."""

    active: tuple[int, ...]
    n_avatars: int

    def __post_init__(self):
        if len(set(self.active)) != len(self.active):
            raise ContractError("duplicate active feature index")
        if any(not 0 <= i < 2 * self.n_avatars for i in self.active):
            raise ContractError("active index out of range [0, 2N)")


def encode_match(record: MatchRecord, n_avatars: int) -> SparseFeature:
    """Binary roster encoding of one match; exactly 10 active indices."""
    record.red.validate_against(n_avatars)
    record.blue.validate_against(n_avatars)
    active = tuple(record.red.members) + tuple(i + n_avatars for i in record.blue.members)
    return SparseFeature(active=active, n_avatars=n_avatars)


def _active_matrix(dataset: Dataset) -> np.ndarray:
    n = len(dataset.registry)
    return np.hstack([dataset.red_idx, dataset.blue_idx + n]).astype(np.intp)


@dataclass(frozen=True)
class LRParams:
    """First-order weights over the 2N encoding plus a global intercept."""

    weights: np.ndarray
    intercept: float

    def logits(self, active: np.ndarray) -> np.ndarray:
        return self.weights[active].sum(axis=1) + self.intercept


@dataclass(frozen=True)
class FMParams:
    """Factorization machine parameters: first-order weights c (2N),
    second-order factors v (2N x K_fm), and a global intercept."""

    first_order: np.ndarray
    factors: np.ndarray
    intercept: float

    def __post_init__(self):
        if self.first_order.ndim != 1 or self.factors.ndim != 2 \
                or self.factors.shape[0] != self.first_order.shape[0]:
            raise ContractError("inconsistent FM parameter shapes")
        if not (np.all(np.isfinite(self.first_order)) and np.all(np.isfinite(self.factors))
                and math.isfinite(self.intercept)):
            raise ContractError("non-finite FM parameters")

    def logits(self, active: np.ndarray) -> np.ndarray:
        """Batch logits via the sum-of-squares shortcut, O(K * actives)."""
        v = self.factors[active]  # (Z, A, K)
        total = v.sum(axis=1)
        pair_sum = 0.5 * ((total ** 2).sum(axis=1) - (v ** 2).sum(axis=(1, 2)))
        return self.first_order[active].sum(axis=1) + pair_sum + self.intercept


def fm_logit(fm: FMParams, feature: SparseFeature) -> float:
    """FM score of one feature: intercept + first order + unordered-pair dots.

    Deliberately the naive double loop; FMParams.logits is the independent
    fast route and the two are cross-checked in tests.
    """
    active = list(feature.active)
    total = fm.intercept + float(fm.first_order[active].sum())
    for a in range(len(active)):
        for b in range(a + 1, len(active)):
            total += float(fm.factors[active[a]] @ fm.factors[active[b]])
    return total


def _adagrad_update(theta, acc, grad, lr, eps=1e-8):
    acc += grad * grad
    theta -= lr * grad / (np.sqrt(acc) + eps)


def train_logistic_regression(dataset: Dataset, l2: float = 0.0,
                              learning_rate: float = 0.1, epochs: int = 15,
                              batch_size: int = 256, seed: int = 0) -> LRParams:
    """Regularized maximum likelihood on the binary encoding, mini-batch
    AdaGrad, deterministic under seed. The intercept is not penalized."""
    if l2 < 0:
        raise ContractError("l2 must be >= 0")
    active = _active_matrix(dataset)
    outcomes = dataset.outcomes
    z = len(dataset)
    n2 = 2 * len(dataset.registry)
    w = np.zeros(n2)
    b = 0.0
    acc_w = np.zeros(n2)
    acc_b = 0.0
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        perm = rng.permutation(z)
        for start in range(0, z, batch_size):
            idx = perm[start:start + batch_size]
            act = active[idx]
            logits = w[act].sum(axis=1) + b
            coef = (sigmoid_vec(logits) - outcomes[idx]) / len(idx)
            gw = np.zeros(n2)
            np.add.at(gw, act, coef[:, None])
            if l2 > 0:
                gw += l2 * w
            gb = float(coef.sum())
            _adagrad_update(w, acc_w, gw, learning_rate)
            acc_b += gb * gb
            b -= learning_rate * gb / (math.sqrt(acc_b) + 1e-8)
    return LRParams(weights=w, intercept=b)


def train_fm(dataset: Dataset, k_fm: int = 8, l2: float = 0.0,
             learning_rate: float = 0.1, epochs: int = 15,
             batch_size: int = 256, seed: int = 0,
             init_scale: float | None = None) -> FMParams:
    """Factorization machine fit with the same log loss and AdaGrad schedule
    as the embedding model; deterministic under seed."""
    if k_fm < 1:
        raise ContractError("k_fm must be >= 1")
    if l2 < 0:
        raise ContractError("l2 must be >= 0")
    active = _active_matrix(dataset)
    outcomes = dataset.outcomes
    z = len(dataset)
    n2 = 2 * len(dataset.registry)
    scale = init_scale if init_scale is not None else 0.1 / math.sqrt(k_fm)
    rng = np.random.default_rng(seed)
    v = rng.uniform(-scale, scale, size=(n2, k_fm))
    c = np.zeros(n2)
    intercept = 0.0
    acc_v = np.zeros_like(v)
    acc_c = np.zeros(n2)
    acc_i = 0.0
    for _ in range(epochs):
        perm = rng.permutation(z)
        for start in range(0, z, batch_size):
            idx = perm[start:start + batch_size]
            act = active[idx]
            va = v[act]                      # (B, 10, K)
            total = va.sum(axis=1)           # (B, K)
            logits = (c[act].sum(axis=1) + intercept
                      + 0.5 * ((total ** 2).sum(axis=1) - (va ** 2).sum(axis=(1, 2))))
            coef = (sigmoid_vec(logits) - outcomes[idx]) / len(idx)
            gc = np.zeros(n2)
            np.add.at(gc, act, coef[:, None])
            gv = np.zeros_like(v)
            np.add.at(gv, act, coef[:, None, None] * (total[:, None, :] - va))
            if l2 > 0:
                gc += l2 * c
                gv += l2 * v
            gi = float(coef.sum())
            _adagrad_update(c, acc_c, gc, learning_rate)
            _adagrad_update(v, acc_v, gv, learning_rate)
            acc_i += gi * gi
            intercept -= learning_rate * gi / (math.sqrt(acc_i) + 1e-8)
    return FMParams(first_order=c, factors=v, intercept=intercept)


def fm_pair_synergy(fm: FMParams, i: int, j: int) -> float:
    """FM's synergy level for a same-team pair: <v_i, v_j> (red-side factors)."""
    if i == j:
        raise ContractError("self-synergy is undefined")
    return float(fm.factors[i] @ fm.factors[j])


def fm_pair_opposition(fm: FMParams, i: int, j: int, n_avatars: int) -> float:
    """FM's opposition level: |<v_i, v_{j+N}> - <v_j, v_{i+N}>|."""
    if i == j:
        raise ContractError("self-opposition is undefined")
    return abs(float(fm.factors[i] @ fm.factors[j + n_avatars]
                     - fm.factors[j] @ fm.factors[i + n_avatars]))


@dataclass(frozen=True)
class WinRatioMatrix:
    """Empirical same-team win rates (columns 0..N-1) and versus win rates
    (columns N..2N-1), with the co-occurrence counts exposed so consumers can
    mask sparse cells. Zero-denominator cells hold the uninformative 0.5."""

    ratios: np.ndarray   # (N, 2N) in [0, 1]
    counts: np.ndarray   # (N, 2N) non-negative ints

    def __post_init__(self):
        if self.ratios.shape != self.counts.shape:
            raise ContractError("ratio/count shape mismatch")
        if np.any((self.ratios < 0) | (self.ratios > 1)):
            raise ContractError("win ratios must lie in [0, 1]")
        if np.any(self.counts < 0):
            raise ContractError("counts must be non-negative")


def build_win_ratio_matrix(dataset: Dataset) -> WinRatioMatrix:
    n = len(dataset.registry)
    wins = np.zeros((n, 2 * n))
    counts = np.zeros((n, 2 * n), dtype=np.int64)
    red, blue, out = dataset.red_idx, dataset.blue_idx, dataset.outcomes
    ones = np.ones(len(dataset))
    for a in range(TEAM_SIZE):
        for b in range(TEAM_SIZE):
            if a != b:
                # same-team cells, outcome viewed from that team's side
                np.add.at(counts, (red[:, a], red[:, b]), 1)
                np.add.at(wins, (red[:, a], red[:, b]), out)
                np.add.at(counts, (blue[:, a], blue[:, b]), 1)
                np.add.at(wins, (blue[:, a], blue[:, b]), ones - out)
            # versus cells, both directions
            np.add.at(counts, (red[:, a], blue[:, b] + n), 1)
            np.add.at(wins, (red[:, a], blue[:, b] + n), out)
            np.add.at(counts, (blue[:, b], red[:, a] + n), 1)
            np.add.at(wins, (blue[:, b], red[:, a] + n), ones - out)
    ratios = np.full((n, 2 * n), 0.5)
    seen = counts > 0
    ratios[seen] = wins[seen] / counts[seen]
    return WinRatioMatrix(ratios=ratios, counts=counts)


def win_ratio_similarity(matrix: WinRatioMatrix, i: int, j: int) -> float:
    """Cosine similarity between two avatars' win-ratio rows."""
    from .model import cosine_similarity

    return cosine_similarity(matrix.ratios[i], matrix.ratios[j])
