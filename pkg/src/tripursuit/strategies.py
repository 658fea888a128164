"""Pursuer and evader policies.

Evader policies are objects with ``reset(state, params)`` and
``__call__(state) -> heading``.  Decentralized pursuer policies are called as
``policy(own, evader, heading)`` and never see the other pursuers;
cooperative ones (``cooperative = True``) are called as
``policy(state, heading)`` and return all three headings.

Evaders that steer to points on the cell boundary stop at a small clearance
``margin`` inside it; a mirrored pursuer sits at twice the evader's distance
to the shared edge, so the clearance must exceed half the capture radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import survival_lower_bound
from .errors import AssumptionViolated, DegenerateDirections, GameOver, OutOfFamily
from .geometry import (
    PlayerSet,
    VoronoiCell,
    anchor_points,
    cross,
    pursuers_from_cell,
    reflect_direction,
    rotate,
    unit,
    voronoi_cell,
)

# Clearance kept from the cell boundary, in cell diameters.
BOUNDARY_CLEARANCE = 1e-6


# --------------------------------------------------------------------------
# decentralized pursuit


def d_strategy_move(own, evader, heading) -> np.ndarray:
    """Decentralized pursuer heading.

    If the evader is not approaching this pursuer's bisector the pursuer
    copies the evader's heading; otherwise it heads for the point where the
    evader's line of motion crosses the bisector, which keeps the bisector
    fixed.  That direction is the evader's heading reflected across the
    bisector, which is how it is computed: the crossing point itself runs
    off to infinity as the evader's line turns parallel to the bisector.
    """
    P = np.asarray(own, dtype=float)
    E = np.asarray(evader, dtype=float)
    e = np.asarray(heading, dtype=float)
    z = P - E
    nz = math.hypot(z[0], z[1])
    if nz == 0.0:
        raise DegenerateDirections("pursuer coincides with the evader; no bisector")
    n = z / nz
    ne = float(n @ e)
    if ne <= 0.0:
        return e.copy()
    return e - 2.0 * ne * n


class DStrategy:
    """Decentralized pursuer: a stateless wrapper around :func:`d_strategy_move`."""

    cooperative = False

    def reset(self, state, params):
        pass

    def __call__(self, own, evader, heading):
        return d_strategy_move(own, evader, heading)


# --------------------------------------------------------------------------
# optimal evasion against decentralized pursuit


@dataclass(frozen=True)
class EvaderPlan:
    """Three straight legs: to Q, along the medium edge to V1, then along
    the longest edge until capture."""

    waypoints: tuple
    leg_directions: tuple
    leg_durations: tuple
    cell: VoronoiCell = field(repr=False)

    @property
    def duration(self) -> float:
        return float(sum(self.leg_durations))


def e_strategy_plan(players: PlayerSet) -> EvaderPlan:
    cell = voronoi_cell(players)
    a = anchor_points(cell)
    E = cell.evader
    S, Q, V1 = a.short_edge_point, a.medium_edge_point, cell.V1
    t1 = float(np.linalg.norm(E - Q))
    t2 = float(np.linalg.norm(Q - V1))
    t3 = float(np.linalg.norm(S - E))
    return EvaderPlan(
        waypoints=(Q, V1, V1 + t3 * a.to_short_edge),
        leg_directions=(a.to_medium_edge, a.along_medium_edge, a.to_short_edge),
        leg_durations=(t1, t2, t3),
        cell=cell,
    )


def e_strategy_direction(plan: EvaderPlan, t: float) -> np.ndarray:
    """Heading prescribed by ``plan`` at time ``t`` after it was made."""
    t1, t2, t3 = plan.leg_durations
    if t < 0:
        raise ValueError("negative time")
    if t < t1:
        return plan.leg_directions[0]
    if t < t1 + t2:
        return plan.leg_directions[1]
    if t < t1 + t2 + t3:
        return plan.leg_directions[2]
    raise GameOver(f"t={t} exceeds plan duration {t1 + t2 + t3}")


def default_margin(cell: VoronoiCell, params) -> float:
    margin = BOUNDARY_CLEARANCE * cell.diameter
    r = getattr(params, "capture_radius", None)
    if r:
        margin = max(margin, 0.51 * r)
    return margin


def _corner_point(cell: VoronoiCell, k: int, margin: float) -> np.ndarray:
    """Point at distance ``margin`` from both edges meeting at vertex ``k``."""
    V = cell.vertices
    a = unit(V[(k + 1) % 3] - V[k])
    b = unit(V[(k + 2) % 3] - V[k])
    half = cell.angles[k] / 2.0
    return V[k] + margin / math.sin(half) * unit(a + b)


def _bisector_normals(state) -> np.ndarray:
    z = np.asarray(state.pursuers) - np.asarray(state.evader)
    return z / np.linalg.norm(z, axis=1)[:, None]


class EStrategyEvader:
    """Optimal reply to decentralized pursuit.

    Waypoint legs end one step short of their target, so the evader never
    crosses onto a pursuer's side.  With ``replan=True`` a fresh plan is made
    whenever a bisector direction changes, which is never the case while
    all pursuers play the decentralized rule.
    """

    def __init__(self, margin: float | None = None, replan: bool = True,
                 replan_tol: float = 1e-6):
        self.margin = margin
        self.replan = replan
        self.replan_tol = replan_tol
        self.replans = 0

    def reset(self, state, params):
        self.step = params.dt
        self._params = params
        self.replans = 0
        self._make_plan(state)

    def _make_plan(self, state):
        players = PlayerSet(state.evader, state.pursuers)
        plan = e_strategy_plan(players)
        cell = plan.cell
        margin = self.margin if self.margin is not None else default_margin(cell, self._params)
        E = cell.evader
        Q = plan.waypoints[0]
        back = margin / math.sin(cell.phi1)
        if plan.leg_durations[0] > back:
            q_target = Q - back * plan.leg_directions[0]
        else:
            q_target = E.copy()
        self.plan = plan
        self.targets = (q_target, _corner_point(cell, 0, margin))
        self.leg = 0
        self._normals = _bisector_normals(state)

    def _stale(self, state) -> bool:
        n = _bisector_normals(state)
        c = np.abs(n[:, 0] * self._normals[:, 1] - n[:, 1] * self._normals[:, 0])
        return bool(np.any(c > self.replan_tol) or np.any(np.sum(n * self._normals, axis=1) < 0))

    def __call__(self, state):
        if self.replan and self._stale(state):
            self._make_plan(state)
            self.replans += 1
        E = np.asarray(state.evader)
        while self.leg < 2 and np.linalg.norm(self.targets[self.leg] - E) <= self.step:
            self.leg += 1
        if self.leg == 2:
            return self.plan.leg_directions[2]
        return unit(self.targets[self.leg] - E)


class PerturbedEStrategyEvader:
    """Plays the optimal plan but rotates one leg's heading by ``angle``.

    The rotated heading is held for that leg's nominal duration; afterwards
    the evader replans optimally from wherever it is.  ``angle`` is positive
    towards increasing heading angle (see :class:`FixedHeadingEvader`).
    """

    def __init__(self, leg: int, angle: float = math.radians(10.0), margin=None):
        if leg not in (0, 1, 2):
            raise ValueError("leg must be 0, 1 or 2")
        self.leg = leg
        self.angle = angle
        self.margin = margin

    def reset(self, state, params):
        self.inner = EStrategyEvader(margin=self.margin, replan=False)
        self.inner.reset(state, params)
        self.orientation = self.inner.plan.cell.orientation
        self.heading = rotate(self.inner.plan.leg_directions[self.leg],
                              self.orientation * self.angle)
        self.duration = self.inner.plan.leg_durations[self.leg]
        self.start = None
        self.done = False
        self._params = params

    def __call__(self, state):
        if self.done:
            return self.inner(state)
        if self.start is None:
            nominal = self.inner(state)
            if self.inner.leg < self.leg:
                return nominal
            self.start = state.t
        if state.t - self.start < self.duration:
            return self.heading
        self.done = True
        self.inner = EStrategyEvader(margin=self.margin, replan=True)
        self.inner.reset(state, self._params)
        return self.inner(state)


def whole_step_path(start, target, step: float, score=None):
    """Split ``start -> target`` into legs of whole steps ending exactly on
    ``target``.

    Returns ``[(heading, n_steps), ...]``.  When the distance is not a whole
    number of steps the path bends once, using two steps when ``target`` is
    nearer than one.  ``score(h1, h2)`` rates a bent
    path by its two headings (larger is better); the best of a few bend
    positions and both bend sides is used, and a single straight leg that
    stops short of ``target`` is returned if no bend scores above zero.
    """
    start = np.asarray(start, dtype=float)
    target = np.asarray(target, dtype=float)
    D = float(np.linalg.norm(target - start))
    if D == 0.0:
        return []
    n = int(math.ceil(D / step - 1e-9))
    u = (target - start) / D
    if abs(n * step - D) <= 1e-12 * max(D, step):
        return [(u, n)]
    # a single step cannot land short of its length; bend it into two
    n = max(n, 2)
    perp = np.array([-u[1], u[0]])
    best, best_score = None, -np.inf
    for k in sorted({1, n // 4, n // 2, (3 * n) // 4, n - 1} - {0, n}):
        a, b = k * step, (n - k) * step
        x = (D * D + a * a - b * b) / (2.0 * D)
        h = math.sqrt(max(a * a - x * x, 0.0))
        for sgn in (1.0, -1.0):
            Y = start + x * u + sgn * h * perp
            legs = [(unit(Y - start), k), (unit(target - Y), n - k)]
            sc = score(legs[0][0], legs[1][0]) if score is not None else 1.0
            if sc > best_score:
                best, best_score = legs, sc
    if best_score > 0.0:
        return best
    return [(u, n - 1)]


class GreedyVertexEvader:
    """Runs to the vertex maximising the survival bound, then at the edge it
    shares with that vertex's pursuer.

    The second target is the point of that edge nearest the evader.  When the
    foot of the perpendicular lies on the edge this is the midpoint between
    the evader and the pursuer; when an obtuse angle pushes the foot past an
    endpoint, heading for the midpoint would cross a neighbouring edge first,
    so the endpoint is used instead.
    """

    def __init__(self, margin: float | None = None):
        self.margin = margin

    def reset(self, state, params):
        players = PlayerSet(state.evader, state.pursuers)
        cell = voronoi_cell(players)
        self.value, self.i_star = survival_lower_bound(players)
        k = self.i_star - 1
        self.pursuer_index = cell.assignment[k]
        margin = self.margin if self.margin is not None else default_margin(cell, params)
        self.vertex = cell.vertices[k]
        self.target = _corner_point(cell, k, margin)
        self.margin_used = margin
        self.step = params.dt
        self.phase = 0
        # both legs must keep closing on the two edges through the vertex
        # (their pursuers mirror, so those edges stay put) and keep leaving
        # the far edge (its pursuer copies, so the gap to it is kept)
        z = np.asarray(state.pursuers) - np.asarray(state.evader)
        z = z / np.linalg.norm(z, axis=1)[:, None]
        sign = np.where(np.arange(3) == self.pursuer_index, -1.0, 1.0)

        def score(h1, h2):
            return float(min(np.min(sign * (z @ h1)), np.min(sign * (z @ h2))))

        self._legs = whole_step_path(state.evader, self.target, params.dt, score)
        self._leg_steps = 0

    def _edge_targets(self, state) -> list:
        cell = voronoi_cell(PlayerSet(state.evader, state.pursuers))
        v = list(cell.assignment).index(self.pursuer_index)
        a, b = (v + 1) % 3, (v + 2) % 3
        A, B = cell.vertices[a], cell.vertices[b]
        d = B - A
        t = float((np.asarray(state.evader) - A) @ d / (d @ d))
        if 0.0 <= t <= 1.0:
            return [A + t * d]
        # run parallel to the neighbouring edge, then into the corner
        k = a if t < 0.0 else b
        return [_corner_point(cell, k, self.margin_used), cell.vertices[k]]

    def __call__(self, state):
        E = np.asarray(state.evader)
        if self.phase == 0:
            while self._legs and self._leg_steps >= self._legs[0][1]:
                self._legs.pop(0)
                self._leg_steps = 0
            if self._legs:
                self._leg_steps += 1
                return self._legs[0][0]
            self.phase = 1
            self.finals = self._edge_targets(state)
        while len(self.finals) > 1 and np.linalg.norm(self.finals[0] - E) <= self.step:
            self.finals.pop(0)
        if np.linalg.norm(self.finals[0] - E) > 1e-12 * self.step:
            self.heading = unit(self.finals[0] - E)
        return self.heading


class FixedHeadingEvader:
    """Holds one heading, ``theta`` radians from ``unit(V1 - V2)`` of the
    initial cell, turning towards V3's side."""

    def __init__(self, theta: float):
        self.theta = float(theta)

    def reset(self, state, params):
        cell = voronoi_cell(PlayerSet(state.evader, state.pursuers))
        self.heading = heading_at(cell, self.theta)

    def __call__(self, state):
        return self.heading


def heading_at(cell: VoronoiCell, theta: float) -> np.ndarray:
    return rotate(cell.unit_edge(1, 2), cell.orientation * theta)


# --------------------------------------------------------------------------
# cooperative pursuit on the flat isosceles family


@dataclass(frozen=True)
class FlatIsoscelesFamily:
    """Isosceles cell with base ``base`` on V1V2 and apex V3 at height
    ``height`` above the base midpoint H; the evader sits on segment H V3 at
    ``evader_fraction`` of the way from H to V3."""

    base: float
    height: float
    evader_fraction: float = 0.01

    def __post_init__(self):
        if not self.height > 0 or not self.base > 0:
            raise ValueError("base and height must be positive")
        if not 0.0 < self.evader_fraction < 1.0:
            raise ValueError("evader_fraction must lie in (0, 1)")

    @property
    def vertices(self) -> np.ndarray:
        return np.array([[0.0, 0.0], [self.base, 0.0], [self.base / 2, self.height]])

    @property
    def foot(self) -> np.ndarray:
        return np.array([self.base / 2, 0.0])

    @property
    def evader(self) -> np.ndarray:
        return np.array([self.base / 2, self.evader_fraction * self.height])

    @property
    def players(self) -> PlayerSet:
        return pursuers_from_cell(self.vertices, self.evader)

    @property
    def reflected_evader(self) -> np.ndarray:
        E = self.evader
        return E + 2.0 * (self.vertices[2] - E)

    def projections(self) -> np.ndarray:
        """Projections of P1 and P2 on the base line (T1, T2)."""
        P = self.players.pursuers
        return np.array([[P[0, 0], 0.0], [P[1, 0], 0.0]])


class CHatStrategy:
    """Two-phase cooperative pursuit for :class:`FlatIsoscelesFamily` games.

    Phase 1: the flanking pursuer (P1 if the evader heads towards V1, P2
    otherwise) runs to its projection on the base while the other two mirror
    the evader across their (fixed) edges.  Phase 2 starts once the flanker
    is level with the evader along the base direction; from then on all
    three play :func:`d_strategy_move`.
    """

    cooperative = True

    def __init__(self, family: FlatIsoscelesFamily, switch_tol: float = 1e-6,
                 half_plane_tol: float = 1e-9):
        self.family = family
        self.switch_tol = switch_tol
        self.half_plane_tol = half_plane_tol

    def reset(self, state, params):
        ref = self.family.players
        scale = self.family.base
        if (np.linalg.norm(np.asarray(state.evader) - ref.evader) > 1e-9 * scale
                or np.max(np.abs(np.asarray(state.pursuers) - ref.pursuers)) > 1e-9 * scale):
            raise OutOfFamily("initial state does not match the family configuration")
        V = self.family.vertices
        self.V = V
        self.base_dir = unit(V[0] - V[1])
        self.targets = self.family.projections()
        self.phase = 1
        self.branch = 0
        self.switch_time = None
        self._prev = None

    def _switch(self, state):
        self.phase = 2
        self.switch_time = state.t

    def __call__(self, state, heading):
        E = np.asarray(state.evader)
        P = np.asarray(state.pursuers)
        e = np.asarray(heading)
        if self.phase == 1:
            side = float(e @ self.base_dir)
            if self.branch == 0:
                self.branch = 1 if side >= -self.half_plane_tol else -1
            elif self.branch * side < -self.half_plane_tol:
                raise AssumptionViolated("evader left the assumed half-plane during phase 1")
            k = 0 if self.branch == 1 else 1
            c = cross(unit(P[k] - E), self.base_dir)
            if abs(c) <= math.sin(self.switch_tol) or (self._prev is not None and c * self._prev < 0):
                self._switch(state)
            self._prev = c
        if self.phase == 2:
            return np.array([d_strategy_move(P[i], E, e) for i in range(3)])
        V = self.V
        W = np.empty((3, 2))
        W[k] = unit(self.targets[k] - P[k])
        W[2] = reflect_direction(e, V[1] - V[0])
        if k == 0:
            W[1] = reflect_direction(e, V[2] - V[0])
        else:
            W[0] = reflect_direction(e, V[2] - V[1])
        return W
