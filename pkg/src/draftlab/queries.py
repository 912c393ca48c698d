"""Similarity search, pair explanation, and draft-pick recommendation over a
trained model. Read-only: safe for unlimited concurrent queries."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractError
from .model import (MAX_TEAM_SIZE, ModelParams, cosine_similarity, draft_logit,
                    pair_opposition_level, pair_synergy_level, sigmoid)


@dataclass(frozen=True)
class DraftState:
    """A draft in progress: partial ally/enemy sides, the candidate pool
    (None means every avatar not yet picked), and an optional familiar set."""

    ally: tuple[int, ...] = ()
    enemy: tuple[int, ...] = ()
    pool: frozenset[int] | None = None
    familiar: frozenset[int] | None = None

    def __init__(self, ally=(), enemy=(), pool=None, familiar=None):
        ally = tuple(int(m) for m in ally)
        enemy = tuple(int(m) for m in enemy)
        if len(ally) >= MAX_TEAM_SIZE:
            raise ContractError("ally side is already full; nothing to recommend")
        if len(enemy) > MAX_TEAM_SIZE:
            raise ContractError(f"enemy side exceeds {MAX_TEAM_SIZE} members")
        if len(set(ally)) != len(ally) or len(set(enemy)) != len(enemy):
            raise ContractError("duplicate avatar within a side")
        if set(ally) & set(enemy):
            raise ContractError("an avatar cannot be on both sides")
        object.__setattr__(self, "ally", ally)
        object.__setattr__(self, "enemy", enemy)
        object.__setattr__(self, "pool", frozenset(int(c) for c in pool) if pool is not None else None)
        object.__setattr__(self, "familiar",
                           frozenset(int(f) for f in familiar) if familiar is not None else None)


@dataclass(frozen=True)
class Recommendation:
    """One candidate pick with its predicted win probability and the exact
    breakdown of the logit change it causes: bias + synergy vs allies +
    net opposition vs enemies."""

    avatar: int
    win_probability: float
    bias_delta: float
    synergy_delta: float
    opposition_delta: float
    similar_familiar: tuple[tuple[int, float], ...] = ()

    def logit_delta(self) -> float:
        return self.bias_delta + self.synergy_delta + self.opposition_delta


def similar_avatars(params: ModelParams, avatar: int, top_k: int):
    """All other avatars ranked by embedding cosine similarity, descending;
    ties break toward the lower avatar index."""
    if top_k < 1:
        raise ContractError("top_k must be >= 1")
    params._check_index(avatar)
    emb = params.embeddings
    scored = [(other, cosine_similarity(emb[avatar], emb[other]))
              for other in range(params.n_avatars) if other != avatar]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:top_k]


def _resolve_pool(params: ModelParams, draft: DraftState) -> list[int]:
    taken = set(draft.ally) | set(draft.enemy)
    if draft.pool is None:
        pool = [c for c in range(params.n_avatars) if c not in taken]
    else:
        pool = sorted(draft.pool)
        for c in pool:
            params._check_index(c)
        overlap = set(pool) & taken
        if overlap:
            raise ContractError(f"pool candidates already picked: {sorted(overlap)}")
    if not pool:
        raise ContractError("candidate pool is empty")
    return pool


def recommend_pick(params: ModelParams, draft: DraftState, top_k: int = 5):
    """Rank pool candidates by the win probability of ally + candidate vs
    enemy, ties toward the lower index. Each row carries the exact logit-delta
    decomposition of adding that candidate."""
    if top_k < 1:
        raise ContractError("top_k must be >= 1")
    for m in draft.ally + draft.enemy:
        params._check_index(m)
    pool = _resolve_pool(params, draft)

    a = params.embeddings
    p_mat, q_mat = params.synergy, params.opposition
    s_ally = a[list(draft.ally)].sum(axis=0) if draft.ally else np.zeros(params.latent_dim)
    s_enemy = a[list(draft.enemy)].sum(axis=0) if draft.enemy else np.zeros(params.latent_dim)
    cand = np.asarray(pool, dtype=np.intp)
    # delta bookkeeping: synergy S(c,x) + S(x,c) over allies, net opposition
    # C(c,e) - C(e,c) over enemies
    syn = a[cand] @ ((p_mat + p_mat.T) @ s_ally)
    opp = a[cand] @ ((q_mat - q_mat.T) @ s_enemy)
    bias = params.bias[cand]

    recs = []
    for i, c in enumerate(pool):
        # the full logit, through the same path a completed match would take,
        # so a 4-ally draft reproduces the 5v5 probability bit for bit
        p = sigmoid(draft_logit(params, draft.ally + (c,), draft.enemy))
        recs.append(Recommendation(avatar=c, win_probability=p,
                                   bias_delta=float(bias[i]),
                                   synergy_delta=float(syn[i]),
                                   opposition_delta=float(opp[i])))
    recs.sort(key=lambda r: (-r.win_probability, r.avatar))
    return recs[:top_k]


@dataclass(frozen=True)
class FamiliarityRecommendations:
    picks: tuple[Recommendation, ...]
    familiar_best: Recommendation | None  # None when no familiar avatar is pickable


def _familiar_expansion(params: ModelParams, candidate: int, familiar, sim_k: int):
    emb = params.embeddings
    scored = [(f, cosine_similarity(emb[candidate], emb[f]))
              for f in sorted(familiar) if f != candidate]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return tuple(scored[:sim_k])


def recommend_with_familiarity(params: ModelParams, draft: DraftState,
                               top_k: int = 5, sim_k: int = 3) -> FamiliarityRecommendations:
    """recommend_pick plus, per candidate, the sim_k most familiar look-alikes
    (cosine against the familiar set), and the best pick drawn from the
    familiar set itself for players who prioritize comfort."""
    if sim_k < 1:
        raise ContractError("sim_k must be >= 1")
    if not draft.familiar:
        raise ContractError("familiar set is empty; use recommend_pick instead")
    familiar = set(draft.familiar)
    for f in familiar:
        params._check_index(f)

    picks = tuple(replace(r, similar_familiar=_familiar_expansion(params, r.avatar,
                                                                  familiar, sim_k))
                  for r in recommend_pick(params, draft, top_k))

    pool = set(_resolve_pool(params, draft))
    pickable = familiar & pool
    familiar_best = None
    if pickable:
        ranked = recommend_pick(params, replace(draft, pool=frozenset(pickable)), top_k=1)
        best = ranked[0]
        familiar_best = replace(best, similar_familiar=_familiar_expansion(
            params, best.avatar, familiar, sim_k))
    return FamiliarityRecommendations(picks=picks, familiar_best=familiar_best)


@dataclass(frozen=True)
class PairExplanation:
    synergy: float
    opposition: float
    cosine: float


def explain_pair(params: ModelParams, i: int, j: int) -> PairExplanation:
    """The three relationship scores for a pair; symmetric in (i, j)."""
    if i == j:
        raise ContractError("pick two distinct avatars")
    return PairExplanation(synergy=pair_synergy_level(params, i, j),
                           opposition=pair_opposition_level(params, i, j),
                           cosine=cosine_similarity(params.embeddings[i],
                                                    params.embeddings[j]))
