"""Expected width of a stochastic convex hull.

Width here is directional extent minimized over directions.  Every
full-dimensional realization is charged to its witness simplex: start from
the lex-largest point and repeatedly take the point farthest from the flat
spanned so far (ties lex-largest), d+1 vertices in total.  The simplex's own
width lower-bounds the realization's width and is within a factor of
2 * 5^(d-1) of it, so summing prob * simplex width over all witness
simplices brackets the expectation.  For an (eps)-accurate estimate the
sampling estimator replaces each simplex's width by a Monte Carlo average of
realization widths conditioned on that simplex being the witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterator

import numpy as np

from .dataset import StochasticDataset, rng_stream
from .errors import CapabilityError, DatasetError, GeometryError
from .geometry import (
    EPS_GEO,
    HULL_DIMS,
    as_points,
    dists_to_flat,
    flat_through,
    lex_ranks,
    pointset_width,
)


def width_simplex_factor(d: int) -> float:
    """Lower bound on simplex width / hull width for a witness simplex."""
    if d < 1:
        raise CapabilityError("dimension must be positive")
    return 0.5 * 5.0 ** (-(d - 1))


@dataclass(frozen=True)
class WitnessSimplex:
    """Ordered vertex indices of a witness simplex (construction order)."""

    vertex_list: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertex_list)


def _greedy_vertex_list(pts, cand, ranks) -> list[int] | None:
    """Construction order over the candidate indices, or None if degenerate.

    First the lex-largest candidate, then d times the candidate farthest
    from the flat of the points chosen so far, distance ties (within
    EPS_GEO) resolved lex-largest.
    """
    d = pts.shape[1]
    if len(cand) < d + 1:
        return None
    first = cand[int(np.argmax(ranks[cand]))]
    chosen = [int(first)]
    for _ in range(d):
        flat = flat_through(pts[chosen])
        dist = dists_to_flat(pts[cand], flat)
        far = dist.max()
        if far <= EPS_GEO:
            return None
        ties = cand[np.flatnonzero(dist >= far - EPS_GEO)]
        chosen.append(int(ties[np.argmax(ranks[ties])]))
    return chosen


def witness_simplex(points) -> WitnessSimplex:
    """Witness simplex of a full-dimensional point set, as indices into it."""
    pts = as_points(points)
    cand = np.arange(len(pts))
    ranks = lex_ranks(pts)
    chosen = _greedy_vertex_list(pts, cand, ranks)
    if chosen is None:
        raise GeometryError("witness_simplex: point set is not full-dimensional")
    return WitnessSimplex(tuple(chosen))


def recover_vertex_list(points, vertices) -> tuple[int, ...] | None:
    """Reconstruct the construction order of a vertex set, if it has one.

    Runs the greedy construction restricted to the given d+1 indices.  A
    vertex set is a possible witness simplex only when the greedy picks
    exactly these vertices; degenerate sets return None.
    """
    pts = as_points(points)
    vs = np.asarray(sorted(int(v) for v in vertices), dtype=np.intp)
    d = pts.shape[1]
    if len(vs) != d + 1 or len(set(vs.tolist())) != d + 1:
        raise DatasetError(f"vertex set must contain {d + 1} distinct indices")
    ranks = lex_ranks(pts)
    chosen = _greedy_vertex_list(pts, vs, ranks)
    return None if chosen is None else tuple(chosen)


def simplex_width(points) -> float:
    """Width of a nondegenerate d-simplex, d in {2, 3}.

    The minimizing slab is either parallel to a facet (width = the opposite
    vertex's height) or, for d = 3, parallel to two opposite edges.
    """
    pts = as_points(points)
    m, d = pts.shape
    if d not in HULL_DIMS:
        raise CapabilityError(f"simplex_width supports dimensions {HULL_DIMS}")
    if m != d + 1:
        raise GeometryError(f"a {d}-simplex needs {d + 1} vertices, got {m}")
    best = math.inf
    for i in range(m):
        rest = [j for j in range(m) if j != i]
        h = dists_to_flat(pts[i].reshape(1, -1), flat_through(pts[rest]))[0]
        if h <= EPS_GEO:
            raise GeometryError("simplex_width: degenerate simplex")
        best = min(best, float(h))
    if d == 3:
        for a, b in ((0, 1), (0, 2), (0, 3)):
            c, e = [j for j in range(4) if j not in (a, b)]
            nrm = np.cross(pts[b] - pts[a], pts[e] - pts[c])
            ln = np.linalg.norm(nrm)
            if ln <= EPS_GEO:
                raise GeometryError("simplex_width: degenerate simplex")
            best = min(best, float(abs(nrm @ (pts[c] - pts[a])) / ln))
    return best


def _simplex_prob_parts(ds: StochasticDataset, order: tuple[int, ...]):
    """(probability, exclusion mask) for a recovered construction order.

    A realization's witness simplex is exactly this one iff all d+1
    vertices are present and no present point beats any construction step:
    nothing lex-larger than the first vertex, and nothing farther (ties
    lex-larger) from each prefix flat than the vertex chosen there.
    """
    pts, pi = ds.points, ds.probs
    n = len(ds)
    ranks = lex_ranks(pts)
    d = pts.shape[1]
    excl = ranks > ranks[order[0]]
    for i in range(d):
        flat = flat_through(pts[list(order[: i + 1])])
        dist = dists_to_flat(pts, flat)
        ref = dist[order[i + 1]]
        tie = np.abs(dist - ref) <= EPS_GEO
        excl |= ((dist > ref) & ~tie) | (tie & (ranks > ranks[order[i + 1]]))
    if excl[list(order)].any():
        return 0.0, excl
    prob = float(np.prod(pi[list(order)]) * np.prod((1.0 - pi)[excl]))
    return prob, excl


def witness_simplex_prob(ds: StochasticDataset, simplex) -> float:
    """Probability that a realization's witness simplex is exactly this one."""
    verts = simplex.vertex_list if isinstance(simplex, WitnessSimplex) else tuple(simplex)
    d = ds.dim
    if len(verts) != d + 1:
        raise DatasetError(f"witness simplex needs {d + 1} vertices")
    n = len(ds)
    if any(v < 0 or v >= n for v in verts):
        raise DatasetError("witness simplex index out of range")
    rec = recover_vertex_list(ds.points, verts)
    if rec is None or rec != tuple(int(v) for v in verts):
        return 0.0
    prob, _ = _simplex_prob_parts(ds, rec)
    return prob


def witness_simplex_decomposition(
    ds: StochasticDataset,
) -> Iterator[tuple[tuple[int, ...], float, tuple[int, ...], tuple[int, ...]]]:
    """All witness simplices with positive probability.

    Yields ``(vertex_list, prob, excluded, free)``: the construction order,
    the probability that it is the realized witness simplex, the indices
    forced absent, and the unconstrained indices.  Probabilities sum to the
    probability that a realization is full-dimensional.
    """
    n = len(ds)
    d = ds.dim
    for subset in combinations(range(n), d + 1):
        rec = recover_vertex_list(ds.points, subset)
        if rec is None:
            continue
        prob, excl = _simplex_prob_parts(ds, rec)
        if prob <= 0.0:
            continue
        in_sub = set(subset)
        free = tuple(a for a in range(n) if a not in in_sub and not excl[a])
        excluded = tuple(int(a) for a in np.flatnonzero(excl))
        yield rec, prob, excluded, free


def _expected_width_witness_naive(ds: StochasticDataset) -> float:
    """Sum prob * simplex width over ordered vertex tuples.  Test oracle."""
    n = len(ds)
    d = ds.dim
    total = 0.0
    for order in permutations(range(n), d + 1):
        p = witness_simplex_prob(ds, order)
        if p > 0.0:
            total += p * simplex_width(ds.points[list(order)])
    return total


def expected_width_witness(ds: StochasticDataset) -> float:
    """Expected witness-simplex width, grouped by the first d vertices.

    Fixing the construction order's first d vertices fixes the exclusion
    conditions of every step but the last.  Candidates for the last vertex
    are points whose vertex set recovers to the same order; sorting all
    points by distance from the prefix flat turns each candidate's final
    exclusion product into one suffix product.

    The result is within [expected width / (2 * 5^(d-1)), expected width],
    restricted to full-dimensional realizations.
    """
    n = len(ds)
    d = ds.dim
    if d not in HULL_DIMS:
        raise CapabilityError(f"width estimators support dimensions {HULL_DIMS}")
    if n < d + 1:
        return 0.0
    pts, pi = ds.points, ds.probs
    omp = 1.0 - pi
    ranks = lex_ranks(pts)
    total = 0.0
    for prefix in permutations(range(n), d):
        v0 = prefix[0]
        if any(ranks[v] > ranks[v0] for v in prefix[1:]):
            continue  # the first vertex is the lex-largest of the simplex
        try:
            flats = [flat_through(pts[list(prefix[: i + 1])]) for i in range(d)]
        except GeometryError:
            continue
        excl = ranks > ranks[v0]
        for i in range(d - 1):
            dist = dists_to_flat(pts, flats[i])
            ref = dist[prefix[i + 1]]
            tie = np.abs(dist - ref) <= EPS_GEO
            excl |= ((dist > ref) & ~tie) | (tie & (ranks > ranks[prefix[i + 1]]))
        plist = list(prefix)
        if excl[plist].any():
            continue
        dlast = dists_to_flat(pts, flats[d - 1])
        pset = set(prefix)
        cands = []
        for v in range(n):
            if v in pset or excl[v] or dlast[v] <= EPS_GEO:
                continue
            if recover_vertex_list(pts, prefix + (v,)) == prefix + (v,):
                cands.append(v)
        if not cands:
            continue
        order = np.lexsort((ranks, dlast))
        pos = np.empty(n, dtype=np.intp)
        pos[order] = np.arange(n)
        w = np.where(excl[order], 1.0, omp[order])
        run = np.cumprod(w[::-1])[::-1]
        suffix = np.concatenate([run[1:], [1.0]])
        left = float(np.prod(pi[plist]) * np.prod(omp[excl]))
        for v in cands:
            wid = simplex_width(pts[plist + [v]])
            total += left * pi[v] * suffix[pos[v]] * wid
    return float(total)


_THEORETICAL_HULL_RATIO = {d: 2.0 * 5.0 ** (d - 1) for d in HULL_DIMS}


def fpras_gamma(d: int) -> float:
    """Sample-count coefficient from the worst-case width ratio of a cell."""
    ratio = _THEORETICAL_HULL_RATIO.get(d)
    if ratio is None:
        raise CapabilityError(f"sampling estimator supports dimensions {HULL_DIMS}")
    return d * ratio * ratio


def fpras_sample_count(n: int, epsilon: float, gamma: float) -> int:
    return max(1, math.ceil(gamma * math.log(n) / (epsilon * epsilon)))


@dataclass(frozen=True)
class FprasConfig:
    """Accuracy/seed knobs for the sampling width estimator.

    ``gamma_override`` replaces the (large) theoretical sample coefficient;
    the estimator stays unbiased for any positive value, only the variance
    guarantee changes.
    """

    epsilon: float
    seed: int = 0
    gamma_override: float | None = None

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise DatasetError("epsilon must be in (0, 1)")
        if self.gamma_override is not None and self.gamma_override <= 0.0:
            raise DatasetError("gamma_override must be positive")


def expected_width_fpras(ds: StochasticDataset, config: FprasConfig) -> float:
    """Estimate the expected hull width by stratified sampling.

    The witness-simplex decomposition partitions the full-dimensional
    realizations; within each cell the width is sampled by drawing the
    unconstrained points independently, so every cell estimate lands in
    [simplex width, simplex width * 2 * 5^(d-1)] and concentrates.  With the
    theoretical sample count the relative error is at most epsilon with
    probability 1 - 1/n; deterministic given the seed.
    """
    n = len(ds)
    d = ds.dim
    gamma = config.gamma_override
    if gamma is None:
        gamma = fpras_gamma(d)
    else:
        fpras_gamma(d)  # dimension check
    if n < d + 1:
        return 0.0
    m = fpras_sample_count(n, config.epsilon, gamma)
    pts, pi = ds.points, ds.probs
    cache: dict[tuple[int, ...], float] = {}

    def width_of(idx: tuple[int, ...]) -> float:
        wid = cache.get(idx)
        if wid is None:
            wid = pointset_width(pts[list(idx)])
            cache[idx] = wid
        return wid

    total = 0.0
    for verts, prob, _excluded, free in witness_simplex_decomposition(ds):
        base = tuple(sorted(verts))
        if not free:
            total += prob * width_of(base)
            continue
        rng = rng_stream(config.seed, *base)
        present = rng.random((m, len(free))) < pi[list(free)]
        rows, counts = np.unique(present, axis=0, return_counts=True)
        free_arr = np.asarray(free, dtype=np.intp)
        acc = 0.0
        for row, cnt in zip(rows, counts):
            subset = tuple(sorted(base + tuple(free_arr[row].tolist())))
            acc += cnt * width_of(subset)
        total += prob * (acc / m)
    return float(total)
