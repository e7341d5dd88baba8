"""Codebook formation: uniform column sampling, K-means, and greedy K-centers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coding import Dictionary
from .data import DataMatrix


def sample_indices(N: int, c: int, seed: int) -> np.ndarray:
    """Draw c distinct column indices uniformly without replacement, sorted ascending."""
    if not (1 <= c <= N):
        raise ValueError(f"need 1 <= c <= N, got c={c}, N={N}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(N, size=c, replace=False))


@dataclass(frozen=True, eq=False)
class KMeansResult:
    """Lloyd's algorithm output.

    ``centroids`` are the raw cluster means (d x c); ``dictionary`` holds the
    atoms actually used for encoding, which equal the centroids unless atom
    normalization was requested. ``history`` records the objective (sum of
    squared point-to-nearest-centroid distances) after each completed
    iteration.
    """

    dictionary: Dictionary
    centroids: np.ndarray
    objective: float
    iterations: int
    history: list[float]


def kmeans(
    X: DataMatrix,
    c: int,
    max_iters: int,
    seed: int,
    normalize_atoms: bool = False,
) -> KMeansResult:
    """Cluster the columns of X into c centroids (k-means++ init, Lloyd updates).

    Stops when assignments are unchanged or after ``max_iters`` iterations.
    A cluster that loses all members is re-seeded at the point currently
    farthest from its nearest centroid, so the result always has c atoms.
    With ``normalize_atoms`` the returned dictionary's atoms are scaled to
    unit norm (zero-norm centroids are left unscaled); ``centroids`` stay raw.
    """
    if not (1 <= c <= X.N):
        raise ValueError(f"need 1 <= c <= N, got c={c}, N={X.N}")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    rng = np.random.default_rng(seed)
    pts = X.values.T  # (N, d)
    centroids = _kmeanspp_init(pts, c, rng)

    prev_assign = None
    history: list[float] = []
    iterations = 0
    for _ in range(max_iters):
        d2 = _sq_dists(pts, centroids)
        assign = np.argmin(d2, axis=1)  # ties resolve to the lowest centroid index
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        prev_assign = assign
        for j in range(c):
            members = assign == j
            if members.any():
                centroids[j] = pts[members].mean(axis=0)
        centroids = _relocate_empty(pts, centroids, assign)
        iterations += 1
        history.append(float(_sq_dists(pts, centroids).min(axis=1).sum()))

    objective = history[-1]
    atoms = centroids.T.copy()
    if normalize_atoms:
        norms = np.linalg.norm(atoms, axis=0)
        atoms = atoms / np.where(norms == 0.0, 1.0, norms)
    return KMeansResult(
        dictionary=Dictionary(atoms, source="kmeans"),
        centroids=centroids.T.copy(),
        objective=objective,
        iterations=iterations,
        history=history,
    )


def _kmeanspp_init(pts: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    n = pts.shape[0]
    centers = np.empty((c, pts.shape[1]))
    chosen = np.zeros(n, dtype=bool)
    first = int(rng.integers(n))
    centers[0] = pts[first]
    chosen[first] = True
    d2 = ((pts - centers[0]) ** 2).sum(axis=1)
    for j in range(1, c):
        total = d2.sum()
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # remaining points coincide with chosen centers: take the first unchosen
            idx = int(np.flatnonzero(~chosen)[0])
        centers[j] = pts[idx]
        chosen[idx] = True
        d2 = np.minimum(d2, ((pts - centers[j]) ** 2).sum(axis=1))
    return centers


def _relocate_empty(pts: np.ndarray, centroids: np.ndarray, assign: np.ndarray) -> np.ndarray:
    empty = np.setdiff1d(np.arange(centroids.shape[0]), assign)
    if empty.size == 0:
        return centroids
    d2 = _sq_dists(pts, centroids).min(axis=1)
    for j in empty:
        far = int(np.argmax(d2))
        centroids[j] = pts[far]
        d2[far] = 0.0  # taken; the next empty cluster picks a different point
    return centroids


def _sq_dists(pts: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        (pts**2).sum(axis=1)[:, None]
        - 2.0 * pts @ centers.T
        + (centers**2).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def kcenters(F: np.ndarray, c: int, seed: int, first: int | None = None) -> list[int]:
    """Greedy farthest-first traversal over the rows of F.

    The first center is drawn uniformly from the rows (or forced via
    ``first``); each subsequent center is the row farthest from its nearest
    already-chosen center, ties broken by lowest row index. Returns the chosen
    row indices in selection order.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim != 2:
        raise ValueError("F must be a 2-D matrix with one row per item")
    n = F.shape[0]
    if not (1 <= c <= n):
        raise ValueError(f"need 1 <= c <= number of rows, got c={c}, rows={n}")
    if first is None:
        first = int(np.random.default_rng(seed).integers(n))
    elif not (0 <= first < n):
        raise ValueError(f"first pick {first} out of range 0..{n - 1}")
    selected = [first]
    d2 = ((F - F[first]) ** 2).sum(axis=1)
    for _ in range(1, c):
        nxt = int(np.argmax(d2))
        selected.append(nxt)
        d2 = np.minimum(d2, ((F - F[nxt]) ** 2).sum(axis=1))
    return selected


def covering_radius(F: np.ndarray, selected: list[int]) -> float:
    """Max over rows of the distance to the nearest selected row."""
    F = np.asarray(F, dtype=float)
    d2 = np.full(F.shape[0], np.inf)
    for s in selected:
        d2 = np.minimum(d2, ((F - F[s]) ** 2).sum(axis=1))
    return float(np.sqrt(d2.max()))
