"""Planar primitives and the evader's Voronoi cell.

With three pursuers surrounding the evader, the set of points closer to the
evader than to any pursuer is a triangle bounded by the three perpendicular
bisectors of the evader/pursuer segments.  Vertices are labelled so that
``V1`` joins the longest and medium edges, ``V2`` closes the longest edge and
``V3`` is the remaining vertex; pursuer ``i`` is the one farthest from ``V_i``.

Points are plain ``numpy`` arrays of shape ``(2,)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateCell,
    EvaderOutsideCell,
    NotATriangle,
    NumericalDegeneracy,
)

ADMISSIBLE_TOL = 1e-12
LENGTH_TIE_TOL = 1e-9


def as_point(p) -> np.ndarray:
    arr = np.array(p, dtype=float).reshape(2)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite coordinates: {p!r}")
    return arr


def unit(v: np.ndarray) -> np.ndarray:
    n = float(np.hypot(v[0], v[1]))
    if n == 0.0:
        raise ValueError("cannot normalise a zero vector")
    return np.asarray(v, dtype=float) / n


def cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def rotate(v: np.ndarray, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def reflect_point(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Mirror ``p`` across the line through ``a`` and ``b``."""
    d = unit(b - a)
    r = p - a
    return a + 2.0 * float(r @ d) * d - r


def reflect_direction(v: np.ndarray, line_dir: np.ndarray) -> np.ndarray:
    """Mirror a direction across a line with direction ``line_dir``."""
    d = unit(line_dir)
    return 2.0 * float(v @ d) * d - v


def line_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Unsigned distance from ``p`` to the line through ``a`` and ``b``."""
    d = b - a
    return abs(cross(d, p - a)) / float(np.hypot(d[0], d[1]))


def _freeze(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PlayerSet:
    """Evader position and three (unordered) pursuer positions."""

    evader: np.ndarray
    pursuers: np.ndarray

    def __post_init__(self):
        e = _freeze(as_point(self.evader))
        p = np.array(self.pursuers, dtype=float)
        if p.shape != (3, 2):
            raise ValueError(f"expected 3 pursuers of shape (3, 2), got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("non-finite pursuer coordinates")
        object.__setattr__(self, "evader", e)
        object.__setattr__(self, "pursuers", _freeze(p))

    def scaled(self, k: float) -> "PlayerSet":
        return PlayerSet(self.evader * k, self.pursuers * k)

    def transformed(self, rotation: float = 0.0, shift=(0.0, 0.0)) -> "PlayerSet":
        c, s = np.cos(rotation), np.sin(rotation)
        R = np.array([[c, -s], [s, c]])
        t = as_point(shift)
        return PlayerSet(R @ self.evader + t, self.pursuers @ R.T + t)


def hull_margin(players: PlayerSet) -> float:
    """Signed distance from the evader to the nearest pursuer-hull edge,
    divided by the hull diameter.  Positive iff strictly inside."""
    (ax, ay), (bx, by), (cx, cy) = players.pursuers.tolist()
    ex, ey = players.evader.tolist()
    diam = max(math.hypot(bx - ax, by - ay), math.hypot(cx - ax, cy - ay),
               math.hypot(cx - bx, cy - by))
    if diam == 0.0:
        return 0.0
    orient = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if abs(orient) <= 1e-300:
        return 0.0
    sign = 1.0 if orient > 0 else -1.0
    best = math.inf
    for (px, py), (qx, qy) in (((ax, ay), (bx, by)), ((bx, by), (cx, cy)), ((cx, cy), (ax, ay))):
        dx, dy = qx - px, qy - py
        best = min(best, sign * (dx * (ey - py) - dy * (ex - px)) / math.hypot(dx, dy))
    return best / diam


def is_admissible(players: PlayerSet, tol: float = ADMISSIBLE_TOL) -> bool:
    """True iff all four points are distinct and the evader lies strictly
    inside the pursuers' convex hull by at least ``tol`` hull diameters.

    A positive margin already implies distinct points: coincident pursuers
    have no interior and an evader on a pursuer sits on the hull.
    """
    m = hull_margin(players)
    return m > 0.0 and m >= tol


@dataclass(frozen=True)
class VoronoiCell:
    """Labelled triangular Voronoi cell of the evader.

    ``vertices[i]`` is ``V_{i+1}``; ``pursuers[i]`` is the pursuer assigned to
    that vertex (the one whose bisector does not pass through it), and
    ``assignment[i]`` is that pursuer's index in the originating
    :class:`PlayerSet`.
    """

    vertices: np.ndarray
    evader: np.ndarray
    pursuers: np.ndarray
    assignment: tuple

    @property
    def V1(self):
        return self.vertices[0]

    @property
    def V2(self):
        return self.vertices[1]

    @property
    def V3(self):
        return self.vertices[2]

    @property
    def l(self) -> float:
        return float(np.linalg.norm(self.V1 - self.V2))

    @property
    def m(self) -> float:
        return float(np.linalg.norm(self.V1 - self.V3))

    @property
    def s(self) -> float:
        return float(np.linalg.norm(self.V2 - self.V3))

    @property
    def diameter(self) -> float:
        return self.l

    @property
    def angles(self) -> np.ndarray:
        """Interior angles at V1, V2, V3 (radians)."""
        V = self.vertices
        out = np.empty(3)
        for i in range(3):
            a = V[(i + 1) % 3] - V[i]
            b = V[(i + 2) % 3] - V[i]
            out[i] = np.arctan2(abs(cross(a, b)), float(a @ b))
        return out

    @property
    def phi1(self) -> float:
        return float(self.angles[0])

    @property
    def phi2(self) -> float:
        return float(self.angles[1])

    @property
    def phi3(self) -> float:
        return float(self.angles[2])

    def unit_edge(self, i: int, j: int) -> np.ndarray:
        """``(V_i - V_j) / |V_i - V_j|`` with 1-based indices."""
        return unit(self.vertices[i - 1] - self.vertices[j - 1])

    @property
    def orientation(self) -> float:
        """+1 if V3 lies to the left of the direction V2 -> V1, else -1."""
        return 1.0 if cross(self.V1 - self.V2, self.V3 - self.V1) > 0 else -1.0

    def contains(self, p, margin: float = 0.0) -> bool:
        """Strict containment with a distance margin from every edge."""
        return edge_clearance(self.vertices, as_point(p)) > margin


def edge_clearance(tri: np.ndarray, p: np.ndarray) -> float:
    """Signed distance from ``p`` to the nearest edge of ``tri`` (positive inside)."""
    orient = cross(tri[1] - tri[0], tri[2] - tri[0])
    if orient == 0.0:
        return -np.inf
    sign = 1.0 if orient > 0 else -1.0
    best = np.inf
    for i, j in ((0, 1), (1, 2), (2, 0)):
        d = tri[j] - tri[i]
        best = min(best, sign * cross(d, p - tri[i]) / float(np.hypot(d[0], d[1])))
    return best


def _label_order(vertices: np.ndarray, opposite: np.ndarray) -> list:
    """Order vertex indices as V1, V2, V3: ascending by the length of the
    opposite edge, ties within tolerance broken lexicographically."""
    scale = float(opposite.max())

    def cmp(a, b):
        da, db = opposite[a], opposite[b]
        if abs(da - db) > LENGTH_TIE_TOL * max(scale, 1.0):
            return -1 if da < db else 1
        for ca, cb in zip(vertices[a], vertices[b]):
            if abs(ca - cb) > LENGTH_TIE_TOL * max(scale, 1.0):
                return -1 if ca < cb else 1
        return 0

    return sorted(range(3), key=functools.cmp_to_key(cmp))


def voronoi_cell(players: PlayerSet) -> VoronoiCell:
    """Construct and label the evader's Voronoi cell.

    Raises
    ------
    NotATriangle
        If the evader is not strictly inside the pursuers' hull (the cell is
        then unbounded or degenerate).
    NumericalDegeneracy
        If two bisectors are parallel within tolerance or the computed
        pursuer assignment contradicts the farthest-pursuer rule.
    """
    if not is_admissible(players):
        raise NotATriangle("evader is not strictly inside the pursuers' convex hull")
    E = players.evader
    P = players.pursuers
    ex, ey = E.tolist()
    pts = P.tolist()
    lines = []
    for px, py in pts:
        nx, ny = px - ex, py - ey
        lines.append((nx, ny, 0.5 * (nx * (px + ex) + ny * (py + ey))))

    # W[i] is the intersection of the two bisectors other than i's
    W = np.empty((3, 2))
    for i in range(3):
        nxj, nyj, cj = lines[(i + 1) % 3]
        nxk, nyk, ck = lines[(i + 2) % 3]
        det = nxj * nyk - nyj * nxk
        if abs(det) <= 1e-12 * math.hypot(nxj, nyj) * math.hypot(nxk, nyk):
            raise NumericalDegeneracy(f"bisectors {(i + 1) % 3} and {(i + 2) % 3} are parallel")
        wx = (cj * nyk - ck * nyj) / det
        wy = (nxj * ck - nxk * cj) / det
        W[i] = (wx, wy)
        dists = [math.hypot(px - wx, py - wy) for px, py in pts]
        if math.hypot(wx - ex, wy - ey) >= dists[i]:
            raise NotATriangle("cell is unbounded")
        if max(range(3), key=dists.__getitem__) != i:
            raise NumericalDegeneracy("pursuer assignment disagrees with farthest-pursuer rule")

    w = W.tolist()
    opposite = np.array([math.dist(w[(i + 1) % 3], w[(i + 2) % 3]) for i in range(3)])
    if opposite.min() <= 0.0:
        raise NotATriangle("cell has a zero-length edge")
    order = _label_order(W, opposite)
    return VoronoiCell(
        vertices=_freeze(W[order]),
        evader=_freeze(E),
        pursuers=_freeze(P[order]),
        assignment=tuple(order),
    )


def pursuers_from_cell(triangle, evader) -> PlayerSet:
    """Place pursuers so that ``triangle`` is the evader's Voronoi cell.

    Pursuer ``i`` is the reflection of the evader across the line carrying
    the edge opposite ``triangle[i]``.
    """
    T = np.array(triangle, dtype=float).reshape(3, 2)
    E = as_point(evader)
    diam = max(np.linalg.norm(T[i] - T[j]) for i, j in ((0, 1), (0, 2), (1, 2)))
    if not edge_clearance(T, E) > ADMISSIBLE_TOL * diam:
        raise EvaderOutsideCell("evader must lie strictly inside the triangle")
    P = np.array([reflect_point(E, T[(i + 1) % 3], T[(i + 2) % 3]) for i in range(3)])
    return PlayerSet(E, P)


@dataclass(frozen=True)
class AnchorPoints:
    """Where the line through the evader parallel to the longest edge meets
    the cell.

    ``short_edge_point`` lies on the shortest edge V2V3 and
    ``medium_edge_point`` on the medium edge V1V3 (often written S and Q).
    The three unit vectors are the headings evader -> medium-edge point,
    evader -> short-edge point and medium-edge point -> V1.
    """

    short_edge_point: np.ndarray
    medium_edge_point: np.ndarray
    to_medium_edge: np.ndarray
    to_short_edge: np.ndarray
    along_medium_edge: np.ndarray


def _line_segment_param(E, v, A, B):
    """Return (alpha, beta) with E + alpha v = A + beta (B - A)."""
    d = B - A
    det = cross(v, d)
    if det == 0.0:
        raise NumericalDegeneracy("line is parallel to the edge")
    r = A - E
    alpha = cross(r, d) / det
    beta = cross(r, v) / det
    return alpha, beta


def anchor_points(cell: VoronoiCell, evader=None) -> AnchorPoints:
    E = cell.evader if evader is None else as_point(evader)
    if not cell.contains(E):
        raise DegenerateCell("evader is not strictly inside the cell")
    V1, V2, V3 = cell.vertices
    v = V1 - V2
    a_s, b_s = _line_segment_param(E, v, V2, V3)
    a_q, b_q = _line_segment_param(E, v, V1, V3)
    if not (0.0 < b_s < 1.0 and 0.0 < b_q < 1.0):
        raise DegenerateCell("parallel line exits the cell through a vertex")
    S = E + a_s * v
    Q = E + a_q * v
    return AnchorPoints(
        short_edge_point=_freeze(S),
        medium_edge_point=_freeze(Q),
        to_medium_edge=_freeze(unit(Q - E)),
        to_short_edge=_freeze(unit(S - E)),
        along_medium_edge=_freeze(unit(V1 - Q)),
    )
