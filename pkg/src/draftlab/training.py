"""Likelihood, analytic gradients, AdaGrad, and the training loop.

The objective is the mean negative log-likelihood of observed outcomes under
the win-probability model, optionally plus an L2 penalty. Gradients are exact
and validated against central finite differences (see finite_difference_check).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import ContractError, NumericalError
from .model import (AvatarRegistry, ModelParams, match_logits_batch,
                    sigmoid_vec, win_probabilities_batch)


@dataclass(frozen=True)
class TrainConfig:
    latent_dim: int = 16
    learning_rate: float = 0.1
    adagrad_epsilon: float = 1e-8
    batch_size: int = 256
    epochs: int = 20
    l2_lambda: float = 0.0
    init_scale: float | None = None  # None -> 0.1 / sqrt(latent_dim)
    seed: int = 0

    def __post_init__(self):
        if self.latent_dim < 1:
            raise ContractError("latent_dim must be >= 1")
        if self.learning_rate <= 0:
            raise ContractError("learning_rate must be > 0")
        if self.adagrad_epsilon <= 0:
            raise ContractError("adagrad_epsilon must be > 0")
        if self.batch_size < 1:
            raise ContractError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ContractError("epochs must be >= 1")
        if self.l2_lambda < 0:
            raise ContractError("l2_lambda must be >= 0")
        if self.init_scale is not None and self.init_scale < 0:
            raise ContractError("init_scale must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ContractError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class GradientSet:
    """d/dA, d/dP, d/dQ, d/db with the same shapes as the ModelParams."""

    d_embeddings: np.ndarray
    d_synergy: np.ndarray
    d_opposition: np.ndarray
    d_bias: np.ndarray

    def blocks(self):
        return (("embeddings", self.d_embeddings), ("synergy", self.d_synergy),
                ("opposition", self.d_opposition), ("bias", self.d_bias))


@dataclass(frozen=True)
class AdaGradState:
    """Per-coordinate accumulated squared gradients; entries never decrease."""

    embeddings: np.ndarray
    synergy: np.ndarray
    opposition: np.ndarray
    bias: np.ndarray

    @staticmethod
    def zeros_like(params: ModelParams) -> "AdaGradState":
        return AdaGradState(np.zeros_like(params.embeddings),
                            np.zeros_like(params.synergy),
                            np.zeros_like(params.opposition),
                            np.zeros_like(params.bias))


def negative_log_likelihood(params: ModelParams, dataset: Dataset) -> float:
    """Mean negative log-likelihood (no penalty); always >= 0.

    Computed in the stable log1p form, so saturated logits do not overflow.
    """
    logits = match_logits_batch(params, dataset.red_idx, dataset.blue_idx)
    with np.errstate(invalid="ignore"):  # inf logits yield nan, caught by train()
        losses = np.logaddexp(0.0, logits) - dataset.outcomes * logits
    return float(losses.mean())


def l2_penalty(params: ModelParams, l2_lambda: float) -> float:
    """l2_lambda / 2 times the squared norm of all parameter blocks."""
    if l2_lambda == 0.0:
        return 0.0
    sq = (float(np.sum(params.embeddings ** 2)) + float(np.sum(params.synergy ** 2))
          + float(np.sum(params.opposition ** 2)) + float(np.sum(params.bias ** 2)))
    return 0.5 * l2_lambda * sq


def penalized_loss(params: ModelParams, dataset: Dataset, l2_lambda: float) -> float:
    return negative_log_likelihood(params, dataset) + l2_penalty(params, l2_lambda)


def _batch_arrays(batch):
    red_idx = np.array([m.red.members for m in batch], dtype=np.intp)
    blue_idx = np.array([m.blue.members for m in batch], dtype=np.intp)
    outcomes = np.array([m.outcome for m in batch], dtype=np.float64)
    return red_idx, blue_idx, outcomes


def gradients(params: ModelParams, batch, l2_lambda: float = 0.0) -> GradientSet:
    """Exact gradient of the batch-mean negative log-likelihood plus L2 term.

    Per match the loss gradient w.r.t. the logit is (p - o); the chain rule
    sends it to the biases with sign +-1 per membership, to P/Q as signed sums
    of embedding outer products, and to each member embedding through P, P^T,
    Q, Q^T.
    """
    batch = list(batch)
    if not batch:
        raise ContractError("gradient batch must be non-empty")
    n = params.n_avatars
    for m in batch:
        m.red.validate_against(n)
        m.blue.validate_against(n)
    red_idx, blue_idx, outcomes = _batch_arrays(batch)
    return _gradients_from_arrays(params, red_idx, blue_idx, outcomes, l2_lambda)


def _gradients_from_arrays(params: ModelParams, red_idx, blue_idx, outcomes,
                           l2_lambda: float) -> GradientSet:
    a = params.embeddings
    p_mat, q_mat = params.synergy, params.opposition
    z = red_idx.shape[0]

    logits = match_logits_batch(params, red_idx, blue_idx)
    coef = (sigmoid_vec(logits) - outcomes) / z  # (Z,)

    er = a[red_idx]  # (Z, T, K)
    eb = a[blue_idx]
    sr = er.sum(axis=1)  # (Z, K)
    sb = eb.sum(axis=1)

    d_bias = np.zeros_like(params.bias)
    np.add.at(d_bias, red_idx, coef[:, None])
    np.add.at(d_bias, blue_idx, -coef[:, None])

    # d logit / dP = (s_r s_r^T - sum_i a_i a_i^T) - same for blue
    d_syn = (np.einsum("z,zk,zl->kl", coef, sr, sr)
             - np.einsum("z,zik,zil->kl", coef, er, er)
             - np.einsum("z,zk,zl->kl", coef, sb, sb)
             + np.einsum("z,zik,zil->kl", coef, eb, eb))

    # d logit / dQ = s_r s_b^T - s_b s_r^T
    d_opp = (np.einsum("z,zk,zl->kl", coef, sr, sb)
             - np.einsum("z,zk,zl->kl", coef, sb, sr))

    p_sym = p_mat + p_mat.T
    q_skew = q_mat - q_mat.T
    # red member k: (P + P^T)(s_r - a_k) + (Q - Q^T) s_b
    red_contrib = (sr[:, None, :] - er) @ p_sym.T + (sb @ q_skew.T)[:, None, :]
    # blue member k: -(P + P^T)(s_b - a_k) + (Q^T - Q) s_r
    blue_contrib = -(sb[:, None, :] - eb) @ p_sym.T - (sr @ q_skew.T)[:, None, :]
    d_emb = np.zeros_like(a)
    np.add.at(d_emb, red_idx, coef[:, None, None] * red_contrib)
    np.add.at(d_emb, blue_idx, coef[:, None, None] * blue_contrib)

    if l2_lambda > 0.0:
        d_emb = d_emb + l2_lambda * a
        d_syn = d_syn + l2_lambda * p_mat
        d_opp = d_opp + l2_lambda * q_mat
        d_bias = d_bias + l2_lambda * params.bias
    return GradientSet(d_embeddings=d_emb, d_synergy=d_syn,
                       d_opposition=d_opp, d_bias=d_bias)


def adagrad_step(params: ModelParams, state: AdaGradState, grads: GradientSet,
                 config: TrainConfig):
    """One AdaGrad update: accumulate squared gradients, then step each
    coordinate by lr * g / (sqrt(G) + eps). Returns (params, state)."""
    lr, eps = config.learning_rate, config.adagrad_epsilon

    def upd(theta, acc, g):
        if acc.shape != g.shape or theta.shape != g.shape:
            raise ContractError("accumulator/gradient shape mismatch")
        with np.errstate(invalid="ignore", over="ignore"):
            acc_new = acc + g * g
            theta_new = theta - lr * g / (np.sqrt(acc_new) + eps)
        if not np.all(np.isfinite(theta_new)):
            raise NumericalError(
                "non-finite parameter update (diverging run); reduce the learning rate")
        return theta_new, acc_new

    emb, acc_emb = upd(params.embeddings, state.embeddings, grads.d_embeddings)
    syn, acc_syn = upd(params.synergy, state.synergy, grads.d_synergy)
    opp, acc_opp = upd(params.opposition, state.opposition, grads.d_opposition)
    bias, acc_b = upd(params.bias, state.bias, grads.d_bias)
    new_params = ModelParams(embeddings=emb, synergy=syn, opposition=opp,
                             bias=bias, registry=params.registry)
    return new_params, AdaGradState(acc_emb, acc_syn, acc_opp, acc_b)


def default_init_scale(latent_dim: int) -> float:
    # keeps initial 5v5 logits within a few units so the sigmoid is not saturated
    return 0.1 / math.sqrt(latent_dim)


def init_params(registry: AvatarRegistry, config: TrainConfig) -> ModelParams:
    """Seeded uniform init of A, P, Q in [-init_scale, init_scale]; zero biases."""
    n = len(registry)
    if n < 2:
        raise ContractError("need at least 2 avatars to build a model")
    k = config.latent_dim
    scale = config.init_scale if config.init_scale is not None else default_init_scale(k)
    rng = np.random.default_rng(config.seed)
    emb = rng.uniform(-scale, scale, size=(n, k))
    syn = rng.uniform(-scale, scale, size=(k, k))
    opp = rng.uniform(-scale, scale, size=(k, k))
    return ModelParams(embeddings=emb, synergy=syn, opposition=opp,
                       bias=np.zeros(n), registry=registry)


@dataclass(frozen=True)
class TrainResult:
    params: ModelParams
    loss_history: tuple[float, ...]            # unpenalized, after each epoch
    penalized_history: tuple[float, ...] | None  # only when l2_lambda > 0
    val_auc_history: tuple[float, ...] | None
    best_epoch: int


def train(config: TrainConfig, dataset: Dataset,
          validation: Dataset | None = None,
          progress=None) -> TrainResult:
    """Mini-batch AdaGrad over seeded per-epoch shuffles.

    Records the unpenalized training loss after every epoch (and the
    penalized loss separately when l2_lambda > 0); when a validation set is
    given, also records its AUC per epoch and returns the parameters from the
    best-validation-AUC epoch. Without validation the final epoch wins.
    Identical (config, dataset) inputs reproduce bit-identical results.
    """
    from .evaluation import auc  # deferred: evaluation imports this module

    params = init_params(dataset.registry, config)
    state = AdaGradState.zeros_like(params)
    rng = np.random.default_rng(config.seed)
    z = len(dataset)

    loss_history: list[float] = []
    penalized_history: list[float] = []
    val_history: list[float] = []
    best_auc = -np.inf
    best_params = params
    best_epoch = config.epochs - 1

    for epoch in range(config.epochs):
        perm = rng.permutation(z)
        for start in range(0, z, config.batch_size):
            idx = perm[start:start + config.batch_size]
            grads = _gradients_from_arrays(params, dataset.red_idx[idx],
                                           dataset.blue_idx[idx],
                                           dataset.outcomes[idx],
                                           config.l2_lambda)
            params, state = adagrad_step(params, state, grads, config)

        loss = negative_log_likelihood(params, dataset)
        if not math.isfinite(loss):
            raise NumericalError(
                f"non-finite training loss at epoch {epoch}: {loss}; "
                "reduce the learning rate or check the data")
        loss_history.append(loss)
        if config.l2_lambda > 0.0:
            penalized_history.append(loss + l2_penalty(params, config.l2_lambda))

        if validation is not None:
            scores = win_probabilities_batch(params, validation.red_idx,
                                             validation.blue_idx)
            val_auc = auc(scores, validation.outcomes)
            val_history.append(val_auc)
            if val_auc > best_auc:
                best_auc = val_auc
                best_params = params
                best_epoch = epoch
        if progress is not None:
            progress(epoch, loss, val_history[-1] if val_history else None)

    if validation is None:
        best_params = params
        best_epoch = config.epochs - 1
    return TrainResult(params=best_params,
                       loss_history=tuple(loss_history),
                       penalized_history=tuple(penalized_history) if config.l2_lambda > 0 else None,
                       val_auc_history=tuple(val_history) if validation is not None else None,
                       best_epoch=best_epoch)


@dataclass(frozen=True)
class FDCheckReport:
    """Finite-difference comparison, per parameter block and overall."""

    step: float
    max_relative_error: float
    block_relative_error: dict[str, float]
    block_absolute_error: dict[str, float]

    def passes(self, tolerance: float) -> bool:
        return self.max_relative_error < tolerance


def finite_difference_check(params: ModelParams, batch, step: float = 1e-5,
                            l2_lambda: float = 0.0,
                            analytic: GradientSet | None = None) -> FDCheckReport:
    """Compare gradients() against central finite differences of the loss.

    Each block's relative error is the norm of (analytic - numeric) over the
    larger of the two norms, with the denominator floored at 1e-8 so an
    all-zero block cannot blow up the ratio. (A per-coordinate ratio would be
    meaningless here: coordinates whose terms nearly cancel across the batch
    sit below the finite-difference noise floor.) Passing an explicit
    `analytic` gradient lets tests fault-inject a corrupted gradient to prove
    the checker catches it.
    """
    if step <= 0:
        raise ContractError("finite-difference step must be > 0")
    batch = list(batch)
    red_idx, blue_idx, outcomes = _batch_arrays(batch)
    if analytic is None:
        analytic = _gradients_from_arrays(params, red_idx, blue_idx, outcomes, l2_lambda)

    def loss_at(emb, syn, opp, bias) -> float:
        trial = ModelParams(embeddings=emb, synergy=syn, opposition=opp,
                            bias=bias, registry=params.registry)
        logits = match_logits_batch(trial, red_idx, blue_idx)
        value = float((np.logaddexp(0.0, logits) - outcomes * logits).mean())
        return value + l2_penalty(trial, l2_lambda)

    arrays = {"embeddings": params.embeddings, "synergy": params.synergy,
              "opposition": params.opposition, "bias": params.bias}
    grads = {"embeddings": analytic.d_embeddings, "synergy": analytic.d_synergy,
             "opposition": analytic.d_opposition, "bias": analytic.d_bias}

    rel_err: dict[str, float] = {}
    abs_err: dict[str, float] = {}
    for block, base in arrays.items():
        numeric = np.zeros_like(base)
        flat = base.reshape(-1)
        num_flat = numeric.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            work = {k: (v.copy() if k == block else v) for k, v in arrays.items()}
            wflat = work[block].reshape(-1)
            wflat[i] = orig + step
            up = loss_at(work["embeddings"], work["synergy"],
                         work["opposition"], work["bias"])
            wflat[i] = orig - step
            down = loss_at(work["embeddings"], work["synergy"],
                           work["opposition"], work["bias"])
            num_flat[i] = (up - down) / (2.0 * step)
        diff_norm = float(np.linalg.norm(numeric - grads[block]))
        denom = max(float(np.linalg.norm(numeric)),
                    float(np.linalg.norm(grads[block])), 1e-8)
        rel_err[block] = diff_norm / denom
        abs_err[block] = float(np.abs(numeric - grads[block]).max())

    return FDCheckReport(step=step,
                         max_relative_error=max(rel_err.values()),
                         block_relative_error=rel_err,
                         block_absolute_error=abs_err)
