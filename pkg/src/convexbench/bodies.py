"""Planar convex-polygon kernel: constructors, named bodies, affine maps,
Minkowski calculus, support functions, and John-ellipse normalization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull

# Relative tolerances of the body invariants.  Cross products are compared
# against CONVEXITY_RTOL * diameter^2, vertex gaps against
# VERTEX_MERGE_RTOL * diameter.  Constructors thin their output with a 10x
# margin so that validation never sits on the fence.
CONVEXITY_RTOL = 1e-9
VERTEX_MERGE_RTOL = 1e-9
SYMMETRY_RTOL = 1e-7
_THIN_MARGIN = 10.0

NAMED_BODIES = (
    "unit_square",
    "unit_edge_hexagon",
    "unit_right_triangle",
    "equilateral_triangle",
    "stromquist_D",
    "smoothed_octagon",
    "regular_octagon",
)


class BodyError(ValueError):
    """Invalid parameter or violated body invariant."""


class OptimizationError(RuntimeError):
    """An iterative solver failed to converge inside its budget."""


def _as_points(vertices) -> np.ndarray:
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise BodyError(f"vertices must be an (n, 2) array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise BodyError("vertices contain non-finite values")
    return pts


def _size_scale(pts: np.ndarray) -> float:
    # 2*max distance to the vertex mean: within a factor 2 of the true
    # diameter, cheap at any vertex count.  Used only to scale tolerances.
    c = pts.mean(axis=0)
    return 2.0 * float(np.max(np.linalg.norm(pts - c, axis=1)))


def _cross_chain(pts: np.ndarray) -> np.ndarray:
    e = np.roll(pts, -1, axis=0) - pts
    en = np.roll(e, -1, axis=0)
    return e[:, 0] * en[:, 1] - e[:, 1] * en[:, 0]


def _thin_chain(pts: np.ndarray) -> np.ndarray:
    """Drop duplicate or collinear-within-margin vertices from a convex chain."""
    scale = _size_scale(pts)
    gap_tol = _THIN_MARGIN * VERTEX_MERGE_RTOL * scale
    cross_tol = _THIN_MARGIN * CONVEXITY_RTOL * scale * scale
    out = list(pts)
    changed = True
    while changed and len(out) > 3:
        changed = False
        arr = np.array(out)
        edges = np.roll(arr, -1, axis=0) - arr
        lens = np.linalg.norm(edges, axis=1)
        crosses = _cross_chain(arr)
        # smallest offender first keeps the chain convex while thinning
        drop = None
        for i in np.argsort(crosses):
            if crosses[i] <= cross_tol or lens[(i + 1) % len(out)] <= gap_tol:
                drop = (i + 1) % len(out)
                break
        if drop is not None:
            del out[drop]
            changed = True
    return np.array(out)


@dataclass(frozen=True)
class ConvexBody:
    """Strictly convex polygon, vertices counterclockwise.

    `symmetric_hint` promises central symmetry about the centroid and is
    validated on construction.  `provenance` records the generator call for
    named or derived bodies.
    """

    vertices: np.ndarray
    symmetric_hint: bool = False
    provenance: str | None = None

    def __post_init__(self):
        pts = _as_points(self.vertices)
        if len(pts) < 3:
            raise BodyError("a convex body needs at least 3 vertices")
        scale = _size_scale(pts)
        if scale <= 0.0:
            raise BodyError("degenerate body: all vertices coincide")
        area2 = float(np.sum(pts[:, 0] * np.roll(pts[:, 1], -1)
                             - np.roll(pts[:, 0], -1) * pts[:, 1]))
        if area2 < 0:
            raise BodyError("vertices must be in counterclockwise order")
        crosses = _cross_chain(pts)
        if np.min(crosses) <= CONVEXITY_RTOL * scale * scale:
            raise BodyError(
                "consecutive-edge cross products must be strictly positive "
                f"(min {np.min(crosses):.3e} at tolerance {CONVEXITY_RTOL * scale * scale:.3e})")
        gaps = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        if np.min(gaps) <= VERTEX_MERGE_RTOL * scale:
            raise BodyError("duplicate vertices closer than 1e-9 x diameter")
        if self.symmetric_hint:
            c = _polygon_centroid(pts)
            refl = 2.0 * c - pts
            if _vertex_set_distance(pts, refl) > SYMMETRY_RTOL * scale:
                raise BodyError("symmetric_hint set but body is not centrally symmetric")
        pts.setflags(write=False)
        object.__setattr__(self, "vertices", pts)

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        return self is other or (
            isinstance(other, ConvexBody)
            and self.vertices.shape == other.vertices.shape
            and bool(np.all(self.vertices == other.vertices)))

    def __hash__(self) -> int:
        return hash(self.vertices.tobytes())


@dataclass(frozen=True)
class AffineMap2:
    """Invertible affine map x -> linear @ x + translation."""

    linear: np.ndarray
    translation: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=float).reshape(2, 2)
        tr = np.asarray(self.translation, dtype=float).reshape(2)
        if abs(np.linalg.det(lin)) <= 1e-12:
            raise BodyError("affine map is singular")
        lin.setflags(write=False)
        tr.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.linear.T + self.translation

    def compose(self, inner: "AffineMap2") -> "AffineMap2":
        """self after inner: x -> self(inner(x))."""
        return AffineMap2(self.linear @ inner.linear,
                          self.linear @ inner.translation + self.translation)

    def inverse(self) -> "AffineMap2":
        inv = np.linalg.inv(self.linear)
        return AffineMap2(inv, -inv @ self.translation)

    @staticmethod
    def identity() -> "AffineMap2":
        return AffineMap2(np.eye(2), np.zeros(2))

    @staticmethod
    def rotation(angle: float) -> "AffineMap2":
        c, s = math.cos(angle), math.sin(angle)
        return AffineMap2(np.array([[c, -s], [s, c]]), np.zeros(2))

    @staticmethod
    def scaling(t: float) -> "AffineMap2":
        return AffineMap2(t * np.eye(2), np.zeros(2))


@dataclass(frozen=True)
class Ellipse2:
    """Ellipse {x : (x - center)^T shape (x - center) <= 1}, shape SPD."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(2)
        m = np.asarray(self.shape, dtype=float).reshape(2, 2)
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise BodyError("ellipse shape matrix must be symmetric")
        eig = np.linalg.eigvalsh(m)
        if np.min(eig) <= 0.0:
            raise BodyError("ellipse shape matrix must be positive definite")
        c.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape", m)

    def area(self) -> float:
        return math.pi / math.sqrt(float(np.linalg.det(self.shape)))


# ---------------------------------------------------------------------------
# basic polygon quantities


def _polygon_centroid(pts: np.ndarray) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    w = x * yn - xn * y
    a = float(np.sum(w)) / 2.0
    cx = float(np.sum((x + xn) * w)) / (6.0 * a)
    cy = float(np.sum((y + yn) * w)) / (6.0 * a)
    return np.array([cx, cy])


def _vertex_set_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return max(float(np.max(np.min(d, axis=1))), float(np.max(np.min(d, axis=0))))


def area(body: ConvexBody) -> float:
    """Shoelace area."""
    pts = body.vertices
    return float(np.sum(pts[:, 0] * np.roll(pts[:, 1], -1)
                        - np.roll(pts[:, 0], -1) * pts[:, 1])) / 2.0


def centroid(body: ConvexBody) -> np.ndarray:
    return _polygon_centroid(body.vertices)


def diameter(body: ConvexBody) -> float:
    pts = body.vertices
    if len(pts) <= 1024:
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        return float(np.max(d))
    best = 0.0
    for i in range(0, len(pts), 512):
        chunk = pts[i:i + 512]
        d = np.linalg.norm(chunk[:, None, :] - pts[None, :, :], axis=2)
        best = max(best, float(np.max(d)))
    return best


def support(body: ConvexBody, u) -> float:
    """Support function h(u) = max <x, u> over the body; u must be a unit vector."""
    u = np.asarray(u, dtype=float).reshape(2)
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise BodyError("support direction must be a unit vector (within 1e-12)")
    return float(np.max(body.vertices @ u))


def support_batch(body: ConvexBody, directions: np.ndarray) -> np.ndarray:
    """Support values at many (not necessarily unit) directions, no validation."""
    return np.max(body.vertices @ np.asarray(directions, dtype=float).T, axis=0)


def edge_halfplanes(body: ConvexBody) -> tuple[np.ndarray, np.ndarray]:
    """Outward unit normals A and offsets b with body = {x : A x <= b}."""
    pts = body.vertices
    e = np.roll(pts, -1, axis=0) - pts
    n = np.stack([e[:, 1], -e[:, 0]], axis=1)
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    b = np.sum(n * pts, axis=1)
    return n, b


def contains_points(body: ConvexBody, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    a, b = edge_halfplanes(body)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.all(pts @ a.T <= b + tol, axis=1)


def contains_body(outer: ConvexBody, inner: ConvexBody, tol: float = 1e-9) -> bool:
    return bool(np.all(contains_points(outer, inner.vertices, tol)))


def inradius_origin(body: ConvexBody) -> float:
    """Largest r with r*disk (centered at the origin) inside the body."""
    a, b = edge_halfplanes(body)
    return float(np.min(b))


def in_kstar(body: ConvexBody, tol: float = 1e-7) -> bool:
    """Membership in the normalized class: unit disk <= body <= 2*disk."""
    if inradius_origin(body) < 1.0 - tol:
        return False
    return float(np.max(np.linalg.norm(body.vertices, axis=1))) <= 2.0 + tol


# ---------------------------------------------------------------------------
# constructors


def convex_hull_body(points, symmetric_hint: bool = False,
                     provenance: str | None = None) -> ConvexBody:
    """Convex hull of a point cloud, thinned to meet the body invariants."""
    pts = _as_points(points)
    if len(pts) < 3:
        raise BodyError("need at least 3 points")
    hull = ConvexHull(pts)
    chain = _thin_chain(pts[hull.vertices])
    return ConvexBody(chain, symmetric_hint=symmetric_hint, provenance=provenance)


def make_regular_polygon(k: int, circumradius: float) -> ConvexBody:
    if not isinstance(k, (int, np.integer)) or k < 3:
        raise BodyError("regular polygon needs k >= 3")
    if circumradius <= 0:
        raise BodyError("circumradius must be positive")
    ang = 2.0 * math.pi * np.arange(k) / k
    pts = circumradius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return ConvexBody(pts, symmetric_hint=(k % 2 == 0),
                      provenance=f"regular_polygon(k={k}, circumradius={circumradius!r})")


def translate(body: ConvexBody, v) -> ConvexBody:
    v = np.asarray(v, dtype=float).reshape(2)
    return ConvexBody(body.vertices + v, symmetric_hint=body.symmetric_hint,
                      provenance=body.provenance)


def scale(body: ConvexBody, t: float) -> ConvexBody:
    if t == 0:
        raise BodyError("scale factor must be nonzero")
    return apply_affine(body, AffineMap2.scaling(t))


def negate(body: ConvexBody) -> ConvexBody:
    return apply_affine(body, AffineMap2(-np.eye(2)))


def apply_affine(body: ConvexBody, sigma: AffineMap2) -> ConvexBody:
    pts = sigma(body.vertices)
    if np.linalg.det(sigma.linear) < 0:
        pts = pts[::-1]
    return ConvexBody(pts, symmetric_hint=body.symmetric_hint,
                      provenance=body.provenance)


def minkowski_sum(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """Minkowski sum by merging the two edge sequences in slope order."""
    pa, pb = a.vertices, b.vertices
    ia = int(np.lexsort((pa[:, 0], pa[:, 1]))[0])
    ib = int(np.lexsort((pb[:, 0], pb[:, 1]))[0])
    ea = np.roll(pa, -ia, axis=0)
    eb = np.roll(pb, -ib, axis=0)
    va = np.roll(ea, -1, axis=0) - ea
    vb = np.roll(eb, -1, axis=0) - eb
    out = [ea[0] + eb[0]]
    i = j = 0
    while i < len(va) or j < len(vb):
        if i == len(va):
            step = vb[j]; j += 1
        elif j == len(vb):
            step = va[i]; i += 1
        else:
            cr = va[i, 0] * vb[j, 1] - va[i, 1] * vb[j, 0]
            if cr > 0:
                step = va[i]; i += 1
            elif cr < 0:
                step = vb[j]; j += 1
            else:
                step = va[i] + vb[j]; i += 1; j += 1
        out.append(out[-1] + step)
    # the accumulated edges close the polygon; drop the duplicate endpoint
    chain = _thin_chain(np.array(out[:-1]))
    return ConvexBody(chain, symmetric_hint=a.symmetric_hint and b.symmetric_hint)


def central_symmetral(body: ConvexBody) -> ConvexBody:
    """Half difference body (K + (-K))/2, centered at the origin."""
    s = minkowski_sum(body, negate(body))
    pts = _thin_chain(s.vertices / 2.0)
    return ConvexBody(pts, symmetric_hint=True,
                      provenance="central_symmetral")


def halfplane_intersection(normals: np.ndarray, offsets: np.ndarray,
                           bound: float | None = None) -> np.ndarray:
    """Vertices of {x : normals @ x <= offsets}, clipped to a bounding box.

    Returns the CCW chain (possibly with fewer than 3 points if empty)."""
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    if bound is None:
        bound = 4.0 * float(np.max(np.abs(offsets))) / max(1e-12, float(np.min(np.linalg.norm(normals, axis=1)))) + 1.0
    poly = [np.array([-bound, -bound]), np.array([bound, -bound]),
            np.array([bound, bound]), np.array([-bound, bound])]
    for n, off in zip(normals, offsets):
        if not poly:
            break
        new = []
        k = len(poly)
        for idx in range(k):
            p, q = poly[idx], poly[(idx + 1) % k]
            dp = float(n @ p) - off
            dq = float(n @ q) - off
            if dp <= 0:
                new.append(p)
            if (dp < 0 < dq) or (dq < 0 < dp):
                t = dp / (dp - dq)
                new.append(p + t * (q - p))
        poly = new
    return np.array(poly) if poly else np.zeros((0, 2))


def intersect_bodies(a: ConvexBody, b: ConvexBody,
                     provenance: str | None = None,
                     symmetric_hint: bool = False) -> ConvexBody:
    na, ba = edge_halfplanes(a)
    nb, bb = edge_halfplanes(b)
    chain = halfplane_intersection(np.vstack([na, nb]), np.concatenate([ba, bb]))
    if len(chain) < 3:
        raise BodyError("intersection is empty or degenerate")
    return ConvexBody(_thin_chain(chain), symmetric_hint=symmetric_hint,
                      provenance=provenance)


# ---------------------------------------------------------------------------
# named bodies


def _symmetrize_quarter(quarter: np.ndarray) -> np.ndarray:
    """Close a CCW boundary from a first-quadrant arc sampled from the positive
    x-axis to the positive y-axis, enforcing exact 4-fold symmetry."""
    top = quarter
    left = np.stack([-quarter[:, 0], quarter[:, 1]], axis=1)[::-1]
    upper = np.vstack([top, left])
    lower = -upper
    return np.vstack([upper, lower])


def _stromquist_vertices(resolution: int) -> np.ndarray:
    # region bounded by |y| <= 1, x^2 + y^2 <= 2 and x^2/2 + y^2 <= 4/3;
    # first-quadrant boundary: circle arc, then ellipse arc, then the line y=1
    t_circle = math.atan2(math.sqrt(2.0 / 3.0), math.sqrt(4.0 / 3.0))
    th = np.linspace(0.0, t_circle, resolution, endpoint=False)
    circle = math.sqrt(2.0) * np.stack([np.cos(th), np.sin(th)], axis=1)
    a_el, b_el = math.sqrt(8.0 / 3.0), math.sqrt(4.0 / 3.0)
    # ellipse parameter runs from the circle junction (45 deg) to y=1 (60 deg)
    ph = np.linspace(math.pi / 4.0, math.pi / 3.0, resolution, endpoint=False)
    ellipse = np.stack([a_el * np.cos(ph), b_el * np.sin(ph)], axis=1)
    corner = np.array([[math.sqrt(2.0 / 3.0), 1.0]])
    quarter = np.vstack([circle, ellipse, corner])
    return _symmetrize_quarter(quarter)


def _smoothed_octagon_vertices(resolution: int) -> np.ndarray:
    # regular octagon (circumradius 1, vertex on +x) with each corner replaced
    # by the arc of the corner-tangent hyperbola whose asymptotes extend the
    # two next-adjacent sides
    cos225 = math.cos(math.pi / 8.0)
    sin225 = math.sin(math.pi / 8.0)
    center = 1.0 + math.sqrt(2.0)
    c_hyp = (2.0 + math.sqrt(2.0)) / (4.0 * math.sqrt(2.0))
    xi_hi = cos225
    xi_lo = c_hyp / xi_hi
    u_plus = np.array([-cos225, sin225])
    u_minus = np.array([-cos225, -sin225])
    xi = np.linspace(xi_lo, xi_hi, resolution)
    arc = (np.array([center, 0.0])[None, :]
           + xi[:, None] * u_plus[None, :]
           + (c_hyp / xi)[:, None] * u_minus[None, :])
    # arc runs from the lower tangency to the upper one; straight edge chords
    # between consecutive rotated arcs are the surviving octagon sides
    pts = []
    for k in range(8):
        ang = k * math.pi / 4.0
        c, s = math.cos(ang), math.sin(ang)
        rot = np.array([[c, -s], [s, c]])
        pts.append(arc @ rot.T)
    return np.vstack(pts)


def make_named_body(name: str, resolution: int = 256) -> ConvexBody:
    """Construct one of the named test bodies, centroid at the origin.

    Curved boundaries are inscribed-chord polygonal approximations with
    `resolution` samples per smooth arc (thinned if needed to keep the
    convexity invariant)."""
    if name not in NAMED_BODIES:
        raise BodyError(f"unknown named body {name!r}; choose from {NAMED_BODIES}")
    curved = name in ("stromquist_D", "smoothed_octagon")
    if curved and resolution < 32:
        raise BodyError("curved bodies need resolution >= 32")
    prov = f"named_body({name!r}, resolution={resolution})"
    if name == "unit_square":
        pts = np.array([[0.5, -0.5], [0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5]])
        return ConvexBody(pts, symmetric_hint=True, provenance=prov)
    if name == "unit_edge_hexagon":
        return ConvexBody(make_regular_polygon(6, 1.0).vertices,
                          symmetric_hint=True, provenance=prov)
    if name == "unit_right_triangle":
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        return ConvexBody(pts - _polygon_centroid(pts), provenance=prov)
    if name == "equilateral_triangle":
        r = 1.0 / math.sqrt(3.0)
        ang = math.pi / 2.0 + 2.0 * math.pi * np.arange(3) / 3.0
        pts = r * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return ConvexBody(pts, provenance=prov)
    if name == "regular_octagon":
        return ConvexBody(make_regular_polygon(8, 1.0).vertices,
                          symmetric_hint=True, provenance=prov)
    if name == "stromquist_D":
        pts = _thin_chain(_stromquist_vertices(resolution))
        return ConvexBody(pts, symmetric_hint=True, provenance=prov)
    pts = _thin_chain(_smoothed_octagon_vertices(resolution))
    return ConvexBody(pts, symmetric_hint=True, provenance=prov)


# ---------------------------------------------------------------------------
# maximum-area inscribed ellipse and John normalization


def max_inscribed_ellipse(body: ConvexBody, budget: int = 600) -> Ellipse2:
    """Maximum-area inscribed ellipse {B y + d : |y| <= 1} of a polygon.

    Solves the concave program max log det B subject to
    |B a_i| + a_i . d <= b_i over symmetric positive-definite B."""
    a, b = edge_halfplanes(body)
    cen = _polygon_centroid(body.vertices)
    sym = body.symmetric_hint
    r0 = 0.8 * float(np.min(b - a @ cen))
    if r0 <= 0:
        raise BodyError("centroid is not interior; invalid polygon")

    if sym:
        unpack = lambda z: (np.array([[z[0], z[1]], [z[1], z[2]]]), cen)
        x0 = np.array([r0, 0.0, r0])
    else:
        unpack = lambda z: (np.array([[z[0], z[1]], [z[1], z[2]]]), z[3:5])
        x0 = np.array([r0, 0.0, r0, cen[0], cen[1]])

    def neg_logdet(z):
        det = z[0] * z[2] - z[1] * z[1]
        if det <= 1e-300 or z[0] <= 0:
            return 1e6 - 1e3 * min(det, z[0])
        return -math.log(det)

    def neg_logdet_grad(z):
        det = z[0] * z[2] - z[1] * z[1]
        g = np.zeros_like(z)
        if det <= 1e-300 or z[0] <= 0:
            return g
        g[0] = -z[2] / det
        g[1] = 2.0 * z[1] / det
        g[2] = -z[0] / det
        return g

    def cons_f(z):
        bm, d = unpack(z)
        w = a @ bm
        return b - a @ d - np.linalg.norm(w, axis=1)

    def cons_j(z):
        bm, d = unpack(z)
        w = a @ bm
        nw = np.linalg.norm(w, axis=1)
        nw[nw == 0] = 1.0
        wh = w / nw[:, None]
        ax, ay = a[:, 0], a[:, 1]
        jac = np.zeros((len(a), len(z)))
        jac[:, 0] = -wh[:, 0] * ax
        jac[:, 1] = -(wh[:, 0] * ay + wh[:, 1] * ax)
        jac[:, 2] = -wh[:, 1] * ay
        if not sym:
            jac[:, 3] = -ax
            jac[:, 4] = -ay
        return jac

    res = minimize(neg_logdet, x0, jac=neg_logdet_grad, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": cons_f, "jac": cons_j}],
                   options={"maxiter": budget, "ftol": 1e-14})
    z = res.x
    bm, d = unpack(z)
    eig = np.linalg.eigvalsh(bm)
    if not res.success and res.status != 8:  # 8: iteration limit with usable point
        if np.min(cons_f(z)) < -1e-9 * r0 or np.min(eig) <= 0:
            raise OptimizationError(
                f"inscribed-ellipse solver failed: {res.message} (status {res.status})")
    if np.min(eig) <= 0:
        raise OptimizationError("inscribed-ellipse solver returned an indefinite shape")
    shape = np.linalg.inv(bm @ bm)
    shape = (shape + shape.T) / 2.0
    return Ellipse2(center=d, shape=shape)


def john_normalize(body: ConvexBody, tol: float = 3e-6) -> tuple[ConvexBody, AffineMap2]:
    """Map the maximum-area inscribed ellipse to the unit disk.

    The image K' satisfies disk <= K' <= 2*disk (sqrt(2)*disk for bodies
    flagged centrally symmetric); a failed sandwich raises OptimizationError."""
    ell = max_inscribed_ellipse(body)
    eva, evec = np.linalg.eigh(ell.shape)
    # shape = B^-2, so B^-1 = evec diag(sqrt(eva)) evec^T
    binv = evec @ np.diag(np.sqrt(eva)) @ evec.T
    sigma = AffineMap2(binv, -binv @ ell.center)
    image = apply_affine(body, sigma)
    outer = math.sqrt(2.0) if body.symmetric_hint else 2.0
    if inradius_origin(image) < 1.0 - tol:
        raise OptimizationError("John normalization lost the inner unit disk")
    if float(np.max(np.linalg.norm(image.vertices, axis=1))) > outer + tol:
        raise OptimizationError(
            f"John normalization exceeded the outer {outer:.4f}-disk")
    return image, sigma


# ---------------------------------------------------------------------------
# random generators (shared by optimizers, scans and tests)


def random_body(rng: np.random.Generator, n_points: int = 12) -> ConvexBody:
    pts = rng.normal(size=(n_points, 2))
    pts /= np.maximum(np.linalg.norm(pts, axis=1, keepdims=True), 1e-9)
    pts *= rng.uniform(0.35, 1.0, size=(n_points, 1))
    return convex_hull_body(pts, provenance="random_body")


def random_symmetric_body(rng: np.random.Generator, n_points: int = 10) -> ConvexBody:
    pts = rng.normal(size=(n_points, 2))
    pts /= np.maximum(np.linalg.norm(pts, axis=1, keepdims=True), 1e-9)
    pts *= rng.uniform(0.4, 1.0, size=(n_points, 1))
    cloud = np.vstack([pts, -pts])
    return convex_hull_body(cloud, symmetric_hint=True,
                            provenance="random_symmetric_body")


def random_kstar_body(rng: np.random.Generator, n_points: int = 12,
                      symmetric: bool = False) -> ConvexBody:
    body = (random_symmetric_body(rng, n_points) if symmetric
            else random_body(rng, n_points))
    image, _ = john_normalize(body)
    return image


# ---------------------------------------------------------------------------
# JSON body format


def body_to_dict(body: ConvexBody) -> dict:
    out = {"vertices": [[float(x), float(y)] for x, y in body.vertices]}
    if body.symmetric_hint:
        out["symmetric"] = True
    if body.provenance:
        out["provenance"] = body.provenance
    return out


def body_from_dict(data: dict) -> ConvexBody:
    if not isinstance(data, dict) or "vertices" not in data:
        raise BodyError("body JSON must be an object with a 'vertices' field")
    pts = _as_points(data["vertices"])
    if len(pts) < 3:
        raise BodyError("at least 3 vertices are required")
    area2 = float(np.sum(pts[:, 0] * np.roll(pts[:, 1], -1)
                         - np.roll(pts[:, 0], -1) * pts[:, 1]))
    reoriented = area2 < 0
    if reoriented:
        pts = pts[::-1]
    body = ConvexBody(pts, symmetric_hint=bool(data.get("symmetric", False)),
                      provenance=data.get("provenance"))
    return body
