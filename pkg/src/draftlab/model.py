"""Core scoring model: avatar embeddings, pairwise synergy/opposition, match logit.

Everything here is a pure function of immutable inputs. A ModelParams value is
never mutated after construction and can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError

MAX_TEAM_SIZE = 5


class AvatarRegistry:
    """Ordered avatar names with a dense name <-> index mapping (0..N-1)."""

    def __init__(self, names):
        names = [str(n) for n in names]
        if not names:
            raise ContractError("registry needs at least one avatar name")
        seen = set()
        for n in names:
            if not n:
                raise ContractError("avatar names must be non-empty")
            if n in seen:
                raise ContractError(f"duplicate avatar name: {n!r}")
            seen.add(n)
        self._names = tuple(names)
        self._index = {n: i for i, n in enumerate(names)}

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def __len__(self) -> int:
        return len(self._names)

    def __eq__(self, other) -> bool:
        return isinstance(other, AvatarRegistry) and self._names == other._names

    def __hash__(self) -> int:
        return hash(self._names)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ContractError(f"unknown avatar name: {name!r}") from None

    def name_of(self, index: int) -> str:
        if not 0 <= index < len(self._names):
            raise ContractError(f"avatar index {index} out of range [0, {len(self._names)})")
        return self._names[index]

    def indices_of(self, names) -> tuple[int, ...]:
        """Map names to indices, reporting every unknown name at once."""
        unknown = [n for n in names if n not in self._index]
        if unknown:
            raise ContractError("unknown avatar names: " + ", ".join(repr(n) for n in unknown))
        return tuple(self._index[n] for n in names)


@dataclass(frozen=True)
class Roster:
    """A set of 1..5 distinct avatar indices, stored sorted for determinism."""

    members: tuple[int, ...]

    def __init__(self, members):
        members = tuple(int(m) for m in members)
        if len(set(members)) != len(members):
            raise ContractError(f"duplicate avatar in roster: {members}")
        if not 1 <= len(members) <= MAX_TEAM_SIZE:
            raise ContractError(f"roster size must be 1..{MAX_TEAM_SIZE}, got {len(members)}")
        if any(m < 0 for m in members):
            raise ContractError(f"negative avatar index in roster: {members}")
        object.__setattr__(self, "members", tuple(sorted(members)))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, index: int) -> bool:
        return index in self.members

    def is_full(self) -> bool:
        return len(self.members) == MAX_TEAM_SIZE

    def validate_against(self, n_avatars: int) -> None:
        for m in self.members:
            if m >= n_avatars:
                raise ContractError(f"avatar index {m} out of range [0, {n_avatars})")


@dataclass(frozen=True)
class ModelParams:
    """Learned parameters: embeddings A (N x K), synergy P (K x K),
    opposition Q (K x K), per-avatar bias b (N), plus the registry.

    P and Q are not required to be symmetric.
    """

    embeddings: np.ndarray
    synergy: np.ndarray
    opposition: np.ndarray
    bias: np.ndarray
    registry: AvatarRegistry = field(compare=False)

    def __post_init__(self):
        emb = np.asarray(self.embeddings, dtype=np.float64)
        syn = np.asarray(self.synergy, dtype=np.float64)
        opp = np.asarray(self.opposition, dtype=np.float64)
        bias = np.asarray(self.bias, dtype=np.float64)
        n = len(self.registry)
        if emb.ndim != 2:
            raise ContractError(f"embeddings must be 2-D, got shape {emb.shape}")
        k = emb.shape[1]
        if emb.shape[0] != n:
            raise ContractError(f"embeddings have {emb.shape[0]} rows, registry has {n} avatars")
        if syn.shape != (k, k):
            raise ContractError(f"synergy matrix must be {k}x{k}, got {syn.shape}")
        if opp.shape != (k, k):
            raise ContractError(f"opposition matrix must be {k}x{k}, got {opp.shape}")
        if bias.shape != (n,):
            raise ContractError(f"bias must have length {n}, got shape {bias.shape}")
        for name, arr in (("embeddings", emb), ("synergy", syn),
                          ("opposition", opp), ("bias", bias)):
            if not np.all(np.isfinite(arr)):
                raise ContractError(f"non-finite entries in {name}")
        object.__setattr__(self, "embeddings", emb)
        object.__setattr__(self, "synergy", syn)
        object.__setattr__(self, "opposition", opp)
        object.__setattr__(self, "bias", bias)

    @property
    def n_avatars(self) -> int:
        return self.embeddings.shape[0]

    @property
    def latent_dim(self) -> int:
        return self.embeddings.shape[1]

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n_avatars:
            raise ContractError(f"avatar index {i} out of range [0, {self.n_avatars})")


def sigmoid(x: float) -> float:
    """Numerically stable logistic function (branch form, no overflow)."""
    x = float(x)
    if x >= 0.0:
        return float(1.0 / (1.0 + np.exp(-x)))
    z = np.exp(x)
    return float(z / (1.0 + z))


def sigmoid_vec(x: np.ndarray) -> np.ndarray:
    """Vectorized stable sigmoid; evaluates exp only on the safe branch."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    z = np.exp(x[~pos])
    out[~pos] = z / (1.0 + z)
    return out


def _as_vector(v, k: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ContractError(f"expected a vector, got shape {v.shape}")
    if k is not None and v.shape[0] != k:
        raise ContractError(f"vector length {v.shape[0]} does not match matrix size {k}")
    if not np.all(np.isfinite(v)):
        raise ContractError("non-finite entries in vector")
    return v


def synergy_score(a_i, interaction, a_j) -> float:
    """Bilinear intra-team score: sum_{m,n} a_i[m] * interaction[m,n] * a_j[n].

    Not symmetric in (i, j) unless the matrix is symmetric.
    """
    mat = np.asarray(interaction, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ContractError(f"interaction matrix must be square, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ContractError("non-finite entries in interaction matrix")
    k = mat.shape[0]
    u = _as_vector(a_i, k)
    v = _as_vector(a_j, k)
    return float(u @ mat @ v)


def opposition_score(a_i, interaction, a_j) -> float:
    """Bilinear inter-team counter score; same contract as synergy_score."""
    return synergy_score(a_i, interaction, a_j)


def _validate_rosters(params: ModelParams, red: Roster, blue: Roster) -> None:
    red.validate_against(params.n_avatars)
    blue.validate_against(params.n_avatars)
    overlap = set(red.members) & set(blue.members)
    if overlap:
        raise ContractError(f"avatar(s) on both teams: {sorted(overlap)}")


def _logit_core(params: ModelParams, r: np.ndarray, u: np.ndarray) -> float:
    a = params.embeddings
    p_mat, q_mat, b = params.synergy, params.opposition, params.bias
    er, eb = a[r], a[u]
    sr, sb = er.sum(axis=0), eb.sum(axis=0)

    # sum over ordered pairs i != j equals the full bilinear sum minus the diagonal
    intra_red = float(sr @ p_mat @ sr) - float(np.einsum("ik,kl,il->", er, p_mat, er))
    intra_blue = float(sb @ p_mat @ sb) - float(np.einsum("ik,kl,il->", eb, p_mat, eb))
    inter = float(sr @ q_mat @ sb) - float(sb @ q_mat @ sr)
    bias_term = float(b[r].sum() - b[u].sum())
    return bias_term + intra_red - intra_blue + inter


def match_logit(params: ModelParams, red: Roster, blue: Roster) -> float:
    """Argument of the sigmoid in the win-probability model.

    Bias difference, plus the ordered-pair synergy sums within each team
    (red minus blue), plus the net opposition red exerts over blue. Partial
    rosters are allowed; their sums simply have fewer terms.
    """
    _validate_rosters(params, red, blue)
    return _logit_core(params,
                       np.fromiter(red.members, dtype=np.intp),
                       np.fromiter(blue.members, dtype=np.intp))


def _validate_side(params: ModelParams, members: tuple[int, ...], label: str) -> None:
    if len(members) > MAX_TEAM_SIZE:
        raise ContractError(f"{label} side has {len(members)} members, max {MAX_TEAM_SIZE}")
    if len(set(members)) != len(members):
        raise ContractError(f"duplicate avatar on the {label} side")
    for m in members:
        params._check_index(m)


def draft_logit(params: ModelParams, allies, enemies) -> float:
    """match_logit generalized to the draft context, where either side may be
    empty (0..5 members each, disjoint). An empty side contributes nothing."""
    allies = tuple(sorted(int(m) for m in allies))
    enemies = tuple(sorted(int(m) for m in enemies))
    _validate_side(params, allies, "ally")
    _validate_side(params, enemies, "enemy")
    overlap = set(allies) & set(enemies)
    if overlap:
        raise ContractError(f"avatar(s) on both sides: {sorted(overlap)}")
    # sorted evaluation order makes the result bit-identical to match_logit
    # on the same sets, and exactly permutation invariant
    return _logit_core(params,
                       np.fromiter(allies, dtype=np.intp, count=len(allies)),
                       np.fromiter(enemies, dtype=np.intp, count=len(enemies)))


def match_logits_batch(params: ModelParams, red_idx: np.ndarray,
                       blue_idx: np.ndarray) -> np.ndarray:
    """match_logit over many rosters at once.

    red_idx and blue_idx are integer arrays of shape (Z, team_size); rows are
    assumed already validated (training and evaluation hot path).
    """
    a = params.embeddings
    p_mat, q_mat, b = params.synergy, params.opposition, params.bias
    er = a[red_idx]  # (Z, T, K)
    eb = a[blue_idx]
    sr = er.sum(axis=1)  # (Z, K)
    sb = eb.sum(axis=1)
    intra_red = np.einsum("zk,kl,zl->z", sr, p_mat, sr) - np.einsum("zik,kl,zil->z", er, p_mat, er)
    intra_blue = np.einsum("zk,kl,zl->z", sb, p_mat, sb) - np.einsum("zik,kl,zil->z", eb, p_mat, eb)
    inter = np.einsum("zk,kl,zl->z", sr, q_mat, sb) - np.einsum("zk,kl,zl->z", sb, q_mat, sr)
    bias_term = b[red_idx].sum(axis=1) - b[blue_idx].sum(axis=1)
    return bias_term + intra_red - intra_blue + inter


def win_probability(params: ModelParams, red: Roster, blue: Roster) -> float:
    """P(red wins) = sigmoid(match_logit); blue's probability is the complement."""
    return sigmoid(match_logit(params, red, blue))


def win_probabilities_batch(params: ModelParams, red_idx: np.ndarray,
                            blue_idx: np.ndarray) -> np.ndarray:
    return sigmoid_vec(match_logits_batch(params, red_idx, blue_idx))


def pair_synergy_level(params: ModelParams, i: int, j: int) -> float:
    """Symmetric synergy level of an avatar pair: S(i,j) + S(j,i)."""
    if i == j:
        raise ContractError("self-synergy is undefined; pick two distinct avatars")
    params._check_index(i)
    params._check_index(j)
    a, p_mat = params.embeddings, params.synergy
    return float(a[i] @ p_mat @ a[j] + a[j] @ p_mat @ a[i])


def pair_opposition_level(params: ModelParams, i: int, j: int) -> float:
    """Symmetric opposition level of a pair: |C(i,j) - C(j,i)|.

    Zero whenever the opposition matrix is symmetric.
    """
    if i == j:
        raise ContractError("self-opposition is undefined; pick two distinct avatars")
    params._check_index(i)
    params._check_index(j)
    a, q_mat = params.embeddings, params.opposition
    return abs(float(a[i] @ q_mat @ a[j] - a[j] @ q_mat @ a[i]))


def cosine_similarity(u, v) -> float:
    """Cosine of the angle between two vectors, in [-1, 1].

    Zero-norm input is an error rather than 0: a zero embedding signals a
    degenerate model and a silent 0 would corrupt similarity rankings.
    """
    u = _as_vector(u)
    v = _as_vector(v)
    if u.shape != v.shape:
        raise ContractError(f"vector shapes differ: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ContractError("cosine similarity is undefined for zero-norm vectors")
    return float(u @ v) / (nu * nv)
