"""Hausdorff and Banach-Mazur metrics on convex bodies.

Hausdorff distances between polygons are exact (vertex attainment).  The
Banach-Mazur solver returns a certified upper bound: a sandwiching witness
(sigma, x, r) with K1 <= sigma(K2) <= r*K1 + x that is replayed before the
result is accepted."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize

from .bodies import (AffineMap2, BodyError, ConvexBody, apply_affine,
                     edge_halfplanes, in_kstar, john_normalize)

BM_DEFAULT_BUDGET = 4000
BM_REFINE_TOL = 1e-6
_REPLAY_RTOL = 1e-7


@dataclass
class DistanceResult:
    """Metric value with an attainment or containment witness.

    status is "exact" only for Hausdorff distances; Banach-Mazur values are
    always witnessed upper bounds."""

    value: float
    witness: dict = field(default_factory=dict)
    status: str = "exact"


# ---------------------------------------------------------------------------
# Hausdorff


def _points_to_body_distances(points: np.ndarray, body: ConvexBody) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean distance from each point to the (filled) polygon, with the
    nearest boundary point for any exterior point."""
    pts = np.atleast_2d(points)
    verts = body.vertices
    a = verts
    b = np.roll(verts, -1, axis=0)
    ab = b - a
    denom = np.sum(ab * ab, axis=1)
    ap = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("pex,ex->pe", ap, ab) / denom, 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    d = np.linalg.norm(pts[:, None, :] - proj, axis=2)
    idx = np.argmin(d, axis=1)
    dist = d[np.arange(len(pts)), idx]
    nearest = proj[np.arange(len(pts)), idx]
    na, nb = edge_halfplanes(body)
    inside = np.all(pts @ na.T <= nb[None, :] + 1e-12, axis=1)
    dist = np.where(inside, 0.0, dist)
    nearest = np.where(inside[:, None], pts, nearest)
    return dist, nearest


def point_to_body_distance(p, body: ConvexBody) -> tuple[float, np.ndarray]:
    d, near = _points_to_body_distances(np.asarray(p, dtype=float).reshape(1, 2), body)
    return float(d[0]), near[0]


def hausdorff(k1: ConvexBody, k2: ConvexBody) -> DistanceResult:
    """Exact Hausdorff distance between two polygons at fixed placement."""
    d12, n12 = _points_to_body_distances(k1.vertices, k2)
    d21, n21 = _points_to_body_distances(k2.vertices, k1)
    i, j = int(np.argmax(d12)), int(np.argmax(d21))
    if d12[i] >= d21[j]:
        value, witness = float(d12[i]), {
            "side": 1, "vertex": k1.vertices[i].tolist(), "nearest": n12[i].tolist()}
    else:
        value, witness = float(d21[j]), {
            "side": 2, "vertex": k2.vertices[j].tolist(), "nearest": n21[j].tolist()}
    return DistanceResult(value=value, witness=witness, status="exact")


def optimal_concentric_hausdorff(k1: ConvexBody, k2: ConvexBody,
                                 n_grid: int = 180) -> tuple[float, float]:
    """Best (rotation-optimized) concentric Hausdorff placement.

    Both bodies are centered at their centroids, the second is rotated; returns
    (distance, angle).  Serves as the placement oracle for alignment-sensitive
    examples."""
    from .bodies import centroid, translate

    a = translate(k1, -centroid(k1))
    b = translate(k2, -centroid(k2))

    def at(angle: float) -> float:
        return hausdorff(a, apply_affine(b, AffineMap2.rotation(angle))).value

    angles = np.linspace(0.0, 2.0 * math.pi, n_grid, endpoint=False)
    vals = [at(t) for t in angles]
    t0 = float(angles[int(np.argmin(vals))])
    res = minimize(lambda z: at(z[0]), np.array([t0]), method="Nelder-Mead",
                   options={"xatol": 1e-7, "fatol": 1e-12, "maxfev": 400})
    return float(res.fun), float(res.x[0])


# ---------------------------------------------------------------------------
# smallest scaled enclosing copy (the inner problem of the BM solver)


def smallest_enclosing_scale(p_verts: np.ndarray, q_normals: np.ndarray,
                             q_offsets: np.ndarray, translate: bool) -> tuple[float, np.ndarray]:
    """min s with conv(p_verts) <= s*Q + x, Q = {y : q_normals y <= q_offsets}.

    Without translation (x = 0) the minimum is the support-ratio maximum,
    which requires the origin interior to Q.  With translation it is a
    3-variable linear program over (s, x)."""
    h_p = np.max(p_verts @ q_normals.T, axis=0)
    if not translate:
        if np.min(q_offsets) <= 0:
            raise BodyError("support-ratio scale needs the origin interior to Q")
        return float(np.max(h_p / q_offsets)), np.zeros(2)
    a_ub = np.column_stack([-q_offsets, -q_normals])
    res = linprog(c=[1.0, 0.0, 0.0], A_ub=a_ub, b_ub=-h_p,
                  bounds=[(None, None)] * 3, method="highs")
    if not res.success:
        raise BodyError(f"containment LP failed: {res.message}")
    return float(res.x[0]), np.asarray(res.x[1:3])


def _edge_data(verts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e = np.roll(verts, -1, axis=0) - verts
    n = np.stack([e[:, 1], -e[:, 0]], axis=1)
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    return n, np.sum(n * verts, axis=1)


def _rot(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def _linear_from_params(params: np.ndarray) -> np.ndarray:
    alpha, logt, gamma = params
    t = math.exp(logt)
    return _rot(alpha) @ np.diag([t, 1.0 / t]) @ _rot(gamma)


def _sandwich_ratio(lin: np.ndarray, v1: np.ndarray, n1: np.ndarray, b1: np.ndarray,
                    v2: np.ndarray, translate: bool):
    """r and translations for K1 <= s1*(lin K2) + x1, lin K2 <= s2*K1 + x2."""
    q = v2 @ lin.T
    nq, bq = _edge_data(q)
    s1, x1 = smallest_enclosing_scale(v1, nq, bq, translate)
    s2, x2 = smallest_enclosing_scale(q, n1, b1, translate)
    return s1 * s2, s1, x1, s2, x2


def contains_with_tol(outer_normals, outer_offsets, inner_verts, tol) -> bool:
    return bool(np.all(inner_verts @ outer_normals.T <= outer_offsets[None, :] + tol))


def replay_bm_witness(k1: ConvexBody, k2: ConvexBody, witness: dict,
                      rtol: float = _REPLAY_RTOL) -> bool:
    """Re-establish K1 <= sigma(K2) <= r*K1 + x from a stored witness."""
    sigma: AffineMap2 = witness["sigma"]
    x = np.asarray(witness["x"], dtype=float)
    r = float(witness["r"])
    image = sigma(k2.vertices)
    if np.linalg.det(sigma.linear) < 0:
        image = image[::-1]
    scale = max(1.0, float(np.max(np.abs(image))), float(np.max(np.abs(k1.vertices))))
    tol = rtol * scale
    n_img, b_img = _edge_data(image)
    if not contains_with_tol(n_img, b_img, k1.vertices, tol):
        return False
    outer = r * k1.vertices + x
    n_out, b_out = _edge_data(outer)
    return contains_with_tol(n_out, b_out, image, tol * max(1.0, r))


# ---------------------------------------------------------------------------
# Banach-Mazur distance (multi-start simplex upper bound)


def _bm_candidate_logr(params, v1, n1, b1, v2, translate):
    lin = _linear_from_params(np.asarray(params, dtype=float))
    r, *_ = _sandwich_ratio(lin, v1, n1, b1, v2, translate)
    return math.log(max(r, 1e-300))


def bm_distance(k1: ConvexBody, k2: ConvexBody, budget: int = BM_DEFAULT_BUDGET,
                seed: int = 0, starts: int = 16) -> DistanceResult:
    """Witnessed upper bound on the Banach-Mazur distance log r.

    Both bodies are John-normalized; the linear part is searched as
    rotation * diagonal stretch * rotation (scale is resolved exactly by the
    sandwich-ratio subproblem, translations by a small LP for non-symmetric
    inputs).  Multi-start Nelder-Mead, deterministic under the seed."""
    if budget < 1000:
        raise BodyError("bm_distance needs an evaluation budget >= 1000")
    norm1, map1 = john_normalize(k1)
    norm2, map2 = john_normalize(k2)
    translate = not (k1.symmetric_hint and k2.symmetric_hint)
    v1, v2 = norm1.vertices, norm2.vertices
    n1, b1 = _edge_data(v1)

    evaluations = 0

    def objective(p):
        nonlocal evaluations
        evaluations += 1
        try:
            return _bm_candidate_logr(p, v1, n1, b1, v2, translate)
        except (BodyError, np.linalg.LinAlgError):
            return 1e3

    rng = np.random.default_rng(seed)
    seeds = [np.zeros(3)]  # identity: doubles as the two-scale sandwich seed
    seeds += [np.array([k * math.pi / 8.0, 0.0, 0.0]) for k in range(1, 9)]
    seeds = seeds[:max(1, starts)]
    while len(seeds) < starts:
        seeds.append(np.array([rng.uniform(0, math.pi),
                               rng.normal(0.0, 0.35),
                               rng.uniform(0, math.pi)]))
    per_start = max(60, budget // max(1, len(seeds)))

    best = None
    for s0 in seeds:
        res = minimize(objective, s0, method="Nelder-Mead",
                       options={"maxfev": per_start, "xatol": 1e-7,
                                "fatol": BM_REFINE_TOL, "adaptive": False})
        cand = (float(res.fun), np.asarray(res.x))
        if best is None or cand[0] < best[0] - 1e-12:
            best = cand
        elif abs(cand[0] - best[0]) <= 1e-12:
            # deterministic tie-break: linear part closest to the identity
            if (np.linalg.norm(_linear_from_params(cand[1]) - np.eye(2))
                    < np.linalg.norm(_linear_from_params(best[1]) - np.eye(2))):
                best = cand
        if evaluations >= budget:
            break

    logr, params = best
    result = _assemble_bm_witness(k1, k2, map1, map2, params, translate)
    result.witness["evaluations"] = evaluations
    result.witness["budget_exhausted"] = evaluations >= budget
    result.witness["seed"] = seed
    return result


def _assemble_bm_witness(k1, k2, map1, map2, params, translate) -> DistanceResult:
    norm1 = apply_affine(k1, map1)
    norm2 = apply_affine(k2, map2)
    v1, v2 = norm1.vertices, norm2.vertices
    n1, b1 = _edge_data(v1)
    lin = _linear_from_params(np.asarray(params, dtype=float))
    r, s1, x1, s2, x2 = _sandwich_ratio(lin, v1, n1, b1, v2, translate)
    # witness on normalized bodies: sigma'(y) = s1 * lin y + x1,
    # outer translation x' = s1 x2 + x1; pull both back through map1.
    sigma_norm = AffineMap2(s1 * lin, x1)
    x_norm = s1 * x2 + x1
    inv1 = map1.inverse()
    sigma = inv1.compose(sigma_norm).compose(map2)
    x = inv1.linear @ ((r - 1.0) * map1.translation + x_norm)
    witness = {"sigma": sigma, "x": x, "r": r, "log_r": math.log(r)}
    if not replay_bm_witness(k1, k2, witness):
        raise BodyError("Banach-Mazur witness failed its containment replay")
    return DistanceResult(value=math.log(r), witness=witness, status="upper_bound")


def bm_identity_value(k1: ConvexBody, k2: ConvexBody) -> DistanceResult:
    """Witnessed BM value of the identity-seeded candidate (no search).

    On normalized bodies this is the constructive two-scale sandwich whose
    value never exceeds 2*log(1 + hausdorff)."""
    norm1, map1 = john_normalize(k1)
    norm2, map2 = john_normalize(k2)
    translate = not (k1.symmetric_hint and k2.symmetric_hint)
    return _assemble_bm_witness(k1, k2, map1, map2, np.zeros(3), translate)


def bm_bound_from_hausdorff(k1: ConvexBody, k2: ConvexBody) -> float:
    """2*log(1 + hausdorff) for bodies sandwiched between the unit and 2-disk.

    Also usable as a solver seed value; the identity candidate always attains
    a value at least this good."""
    for k in (k1, k2):
        if not in_kstar(k):
            raise BodyError("bm_bound_from_hausdorff requires bodies between "
                            "the unit disk and the 2-disk")
    return 2.0 * math.log1p(hausdorff(k1, k2).value)
