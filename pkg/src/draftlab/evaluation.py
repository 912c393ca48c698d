"""AUC, cross-validated benchmarking, paired significance tests, and
rating-correlation utilities."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from . import baselines, training
from .data import Dataset, kfold_split
from .errors import ContractError, DataError
from .model import (ModelParams, cosine_similarity, pair_opposition_level,
                    pair_synergy_level, win_probabilities_batch)

MODEL_KINDS = ("gae", "lr", "fm")


def auc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative, with
    ties credited 0.5 (Mann-Whitney form). O(n log n) via average ranks."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ContractError("scores and labels must be equal-length vectors")
    pos = labels == 1
    neg = labels == 0
    if not np.all(pos | neg):
        raise ContractError("labels must be binary 0/1")
    n_pos = int(pos.sum())
    n_neg = int(neg.sum())
    if n_pos == 0 or n_neg == 0:
        raise ContractError("AUC needs both classes present")
    _, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    avg_rank = (ends - counts + 1 + ends) / 2.0  # average rank of each tie group
    ranks = avg_rank[inverse]
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def paired_t_test(a, b):
    """Paired two-sided t-test on per-fold metric differences.

    Returns (t, p) with df = n-1. All-equal inputs are degenerate and raise;
    a zero-variance nonzero shift is reported as t = +-inf with p = 0.0.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ContractError("need two equal-length samples of length >= 2")
    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            raise ContractError("samples are identical; paired t is undefined")
        return (math.inf if mean > 0 else -math.inf), 0.0
    t = mean / (sd / math.sqrt(len(d)))
    p = 2.0 * float(stats.t.sf(abs(t), df=len(d) - 1))
    return t, p


def pearson_r(x, y) -> float:
    """Sample Pearson correlation; constant input is an error."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ContractError("need two equal-length vectors of length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    nx = float(np.sqrt((dx ** 2).sum()))
    ny = float(np.sqrt((dy ** 2).sum()))
    if nx == 0.0 or ny == 0.0:
        raise ContractError("Pearson's r is undefined for constant input")
    return float((dx @ dy) / (nx * ny))


RELATIONSHIPS = ("similarity", "synergy", "opposition")


def parse_rating_file(path) -> list[tuple[str, str, str, float]]:
    """Rating csv with header avatar_a,avatar_b,relationship,rating."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty rating file") from None
    if [h.strip() for h in header] != ["avatar_a", "avatar_b", "relationship", "rating"]:
        raise DataError("rating file header must be avatar_a,avatar_b,relationship,rating")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise DataError(f"line {lineno}: expected 4 columns")
        rel = row[2].strip().lower()
        if rel not in RELATIONSHIPS:
            raise DataError(f"line {lineno}: unknown relationship {row[2]!r}")
        try:
            rating = float(row[3])
        except ValueError:
            raise DataError(f"line {lineno}: rating must be numeric") from None
        rows.append((row[0].strip(), row[1].strip(), rel, rating))
    if not rows:
        raise DataError("rating file has no rows")
    return rows


def correlate_ratings(params: ModelParams, ratings) -> dict[str, float]:
    """Pearson's r between external pair ratings and the model's relationship
    scores, one value per relationship group present in the input.

    `ratings` is a path to a rating csv or an iterable of
    (avatar_a, avatar_b, relationship, rating) tuples.
    """
    if isinstance(ratings, (str, Path)):
        ratings = parse_rating_file(ratings)
    rows = list(ratings)
    registry = params.registry
    unknown = sorted({name for a, b, _, _ in rows for name in (a, b)
                      if name not in registry.names})
    if unknown:
        raise ContractError("unknown avatar names in ratings: " + ", ".join(unknown))

    scorers = {
        "similarity": lambda i, j: cosine_similarity(params.embeddings[i],
                                                     params.embeddings[j]),
        "synergy": lambda i, j: pair_synergy_level(params, i, j),
        "opposition": lambda i, j: pair_opposition_level(params, i, j),
    }
    result: dict[str, float] = {}
    for rel in RELATIONSHIPS:
        group = [(a, b, r) for a, b, g, r in rows if g == rel]
        if not group:
            continue
        model_scores = [scorers[rel](registry.index_of(a), registry.index_of(b))
                        for a, b, _ in group]
        human = [r for _, _, r in group]
        result[rel] = pearson_r(model_scores, human)
    return result


@dataclass(frozen=True)
class FoldResult:
    model_kind: str
    fold_index: int
    test_auc: float
    hyperparams: dict

    def __post_init__(self):
        if not 0.0 <= self.test_auc <= 1.0:
            raise ContractError("AUC must lie in [0, 1]")


_GAE_DEFAULTS = dict(latent_dim=8, learning_rate=0.1, epochs=15,
                     batch_size=256, l2_lambda=0.0)
_LR_DEFAULTS = dict(learning_rate=0.1, epochs=15, batch_size=256, l2=0.0)
_FM_DEFAULTS = dict(k_fm=8, learning_rate=0.1, epochs=15, batch_size=256, l2=0.0)


def _fit_scorer(model_kind: str, train_ds: Dataset, hp: dict, seed: int):
    """Train one model and return a Dataset -> scores callable."""
    if model_kind == "gae":
        cfg = training.TrainConfig(seed=seed, **{**_GAE_DEFAULTS, **hp})
        params = training.train(cfg, train_ds).params
        return lambda ds: win_probabilities_batch(params, ds.red_idx, ds.blue_idx)
    n = len(train_ds.registry)
    if model_kind == "lr":
        lr_params = baselines.train_logistic_regression(train_ds, seed=seed,
                                                        **{**_LR_DEFAULTS, **hp})
        return lambda ds: lr_params.logits(np.hstack([ds.red_idx, ds.blue_idx + n]))
    if model_kind == "fm":
        fm = baselines.train_fm(train_ds, seed=seed, **{**_FM_DEFAULTS, **hp})
        return lambda ds: fm.logits(np.hstack([ds.red_idx, ds.blue_idx + n]))
    raise ContractError(f"unknown model kind {model_kind!r}; expected one of {MODEL_KINDS}")


def cross_validate(dataset: Dataset, model_kind: str, grid,
                   folds: int = 10, seed: int = 0) -> list[FoldResult]:
    """K-fold benchmark: per fold, fit every grid point on the train chunk,
    select by validation AUC (ties -> first grid point), report the selected
    model's test AUC. Deterministic for fixed inputs."""
    grid = [dict(g) for g in grid]
    if not grid:
        raise ContractError("hyperparameter grid must be non-empty")
    results = []
    for fold, (train_idx, val_idx, test_idx) in enumerate(kfold_split(dataset, folds, seed)):
        train_ds = dataset.subset(train_idx)
        val_ds = dataset.subset(val_idx)
        test_ds = dataset.subset(test_idx)
        best_auc, best_hp, best_scorer = -1.0, None, None
        for hp in grid:
            scorer = _fit_scorer(model_kind, train_ds, hp, seed)
            val_auc = auc(scorer(val_ds), val_ds.outcomes)
            if val_auc > best_auc:
                best_auc, best_hp, best_scorer = val_auc, hp, scorer
        results.append(FoldResult(model_kind=model_kind, fold_index=fold,
                                  test_auc=auc(best_scorer(test_ds), test_ds.outcomes),
                                  hyperparams=best_hp))
    return results


def benchmark_csv(results: list[FoldResult]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["model", "fold", "auc", "hyperparameters"])
    for r in results:
        writer.writerow([r.model_kind, r.fold_index, repr(r.test_auc),
                         json.dumps(r.hyperparams, sort_keys=True)])
    return out.getvalue()


def benchmark_table(results: list[FoldResult]) -> str:
    """Plain-text summary: per-kind mean/std AUC plus pairwise paired t-tests."""
    by_kind: dict[str, list[FoldResult]] = {}
    for r in results:
        by_kind.setdefault(r.model_kind, []).append(r)
    lines = ["model   folds  mean AUC   std AUC"]
    for kind, rs in by_kind.items():
        aucs = np.array([r.test_auc for r in sorted(rs, key=lambda r: r.fold_index)])
        lines.append(f"{kind:<7} {len(aucs):>5}  {aucs.mean():.4f}     {aucs.std(ddof=1) if len(aucs) > 1 else 0.0:.4f}")
    kinds = list(by_kind)
    if len(kinds) > 1:
        lines.append("")
        lines.append("paired t-tests (two-sided, per-fold AUC differences)")
        for i in range(len(kinds)):
            for j in range(i + 1, len(kinds)):
                a = [r.test_auc for r in sorted(by_kind[kinds[i]], key=lambda r: r.fold_index)]
                b = [r.test_auc for r in sorted(by_kind[kinds[j]], key=lambda r: r.fold_index)]
                if len(a) != len(b):
                    continue
                try:
                    t, p = paired_t_test(a, b)
                    lines.append(f"{kinds[i]} vs {kinds[j]}: t = {t:.4f}, p = {p:.6g}")
                except ContractError:
                    lines.append(f"{kinds[i]} vs {kinds[j]}: identical AUCs, t undefined")
    return "\n".join(lines) + "\n"
