"""Independent brute-force references used across the test suite.

Everything here is deliberately written with plain Python loops and floats,
with no calls into draftlab's vectorized paths, so a bug in the package
cannot hide in its own oracle.
"""


def bilinear(a_i, mat, a_j) -> float:
    total = 0.0
    for m in range(len(a_i)):
        for n in range(len(a_j)):
            total += float(a_i[m]) * float(mat[m][n]) * float(a_j[n])
    return total


def brute_force_logit(embeddings, synergy, opposition, bias, red, blue) -> float:
    """Term-by-term evaluation of the match logit over explicit pair loops."""
    total = 0.0
    for i in red:
        total += float(bias[i])
    for j in blue:
        total -= float(bias[j])
    for i in red:
        for j in red:
            if i != j:
                total += bilinear(embeddings[i], synergy, embeddings[j])
    for i in blue:
        for j in blue:
            if i != j:
                total -= bilinear(embeddings[i], synergy, embeddings[j])
    for i in red:
        for j in blue:
            total += bilinear(embeddings[i], opposition, embeddings[j])
            total -= bilinear(embeddings[j], opposition, embeddings[i])
    return total


def brute_force_auc(scores, labels) -> float:
    """O(n^2) positive-vs-negative pair counting with 0.5 credit for ties."""
    pos = [float(s) for s, y in zip(scores, labels) if y == 1]
    neg = [float(s) for s, y in zip(scores, labels) if y == 0]
    if not pos or not neg:
        raise ValueError("need both classes")
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def brute_force_cosine(u, v) -> float:
    dot = sum(float(a) * float(b) for a, b in zip(u, v))
    nu = sum(float(a) ** 2 for a in u) ** 0.5
    nv = sum(float(b) ** 2 for b in v) ** 0.5
    return dot / (nu * nv)


def brute_force_fm_logit(intercept, weights, factors, active) -> float:
    """Eq-style FM evaluation: intercept + first order + unordered-pair dots."""
    total = float(intercept)
    for i in active:
        total += float(weights[i])
    active = list(active)
    for a in range(len(active)):
        for b in range(a + 1, len(active)):
            i, j = active[a], active[b]
            total += sum(float(x) * float(y) for x, y in zip(factors[i], factors[j]))
    return total
