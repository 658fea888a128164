"""Closed-form game-length quantities.

* :func:`decentralized_game_length` -- capture time when every pursuer plays
  the decentralized mirror/copy rule and the evader replies optimally.
* :func:`survival_lower_bound` -- time the evader can always survive, whatever
  the pursuers do (cooperating or not).
* :func:`pshenichnyi_bound` -- the classical min-max projection upper bound.
* :func:`game_length_rate` -- piecewise rate of change of the decentralized
  game length when the evader holds a heading ``theta``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateDirections
from .geometry import PlayerSet, anchor_points, voronoi_cell

TWO_PI = 2.0 * math.pi


def decentralized_game_length(players: PlayerSet, cell=None) -> float:
    """Length of the game under decentralized pursuit and optimal evasion.

    Equal to ``|S - Q| + |Q - V1|`` where S and Q are the anchor points of
    the evader's cell.  Pass ``cell`` to reuse an already built cell.
    """
    cell = cell if cell is not None else voronoi_cell(players)
    a = anchor_points(cell)
    S, Q = a.short_edge_point, a.medium_edge_point
    V1 = cell.V1
    return math.hypot(*(S - Q)) + math.hypot(*(Q - V1))


def survival_lower_bound(players: PlayerSet, cell=None) -> tuple[float, int]:
    """Return ``(bound, i_star)``.

    ``bound = max_i (|V_i - P_i| + |V_i - E|) / 2`` with each vertex paired to
    its assigned (farthest) pursuer; ``i_star`` is the 1-based maximising
    vertex, ties resolved towards the smaller index.
    """
    cell = cell if cell is not None else voronoi_cell(players)
    V, P, E = cell.vertices.tolist(), cell.pursuers.tolist(), cell.evader.tolist()
    vals = [
        0.5 * (math.dist(V[i], P[i]) + math.dist(V[i], E))
        for i in range(3)
    ]
    best = max(vals)
    i_star = next(i for i, v in enumerate(vals) if v >= best - 1e-12 * abs(best))
    return float(best), i_star + 1


def min_max_projection(directions) -> float:
    """``min_{|p|=1} max_i p . u_i`` for a small set of unit vectors ``u_i``.

    The objective is an upper envelope of sinusoids in the angle of ``p``, so
    its minimum sits either where two constraints tie (``p`` parallel to
    ``+-(u_i + u_j)``) or at a single constraint's own minimiser ``-u_i``.
    Every such candidate is evaluated.
    """
    U = np.asarray(directions, dtype=float)
    cands = [-u for u in U]
    for i, j in combinations(range(len(U)), 2):
        s = U[i] + U[j]
        n = math.hypot(s[0], s[1])
        if n > 1e-15:
            cands.append(s / n)
            cands.append(-s / n)
    return float(np.min(np.max(np.array(cands) @ U.T, axis=1)))


def pshenichnyi_bound(players: PlayerSet, tol: float = 1e-14) -> tuple[float, float]:
    """Return ``(bound, delta0)`` with ``bound = max_i |z_i| / delta0``.

    ``z_i`` are the pursuer positions relative to the evader and ``delta0`` is
    their :func:`min_max_projection`.  The bound does not depend on how the
    pursuers are labelled.
    """
    z = players.pursuers - players.evader
    norms = np.linalg.norm(z, axis=1)
    if np.any(norms == 0.0):
        raise DegenerateDirections("a pursuer coincides with the evader")
    delta0 = min_max_projection(z / norms[:, None])
    if delta0 <= tol:
        raise DegenerateDirections(f"delta0={delta0:.3e}: evader not inside the pursuer hull")
    return float(norms.max() / delta0), delta0


def game_length_rate(theta: float, phi1: float, phi2: float) -> float:
    """Rate of change of the decentralized game length for a heading ``theta``.

    ``theta`` is measured from ``unit(V1 - V2)``, turning towards V3's side,
    and ``phi1``/``phi2`` are the cell's angles at V1 and V2.  The six cases
    are delimited by the directions of the cell edges; intervals are
    half-open ``[a, b)``.
    """
    if not (0.0 < phi1 and 0.0 < phi2 and phi1 + phi2 < math.pi):
        raise ValueError("angles must be positive with phi1 + phi2 < pi")
    t = float(theta) % TWO_PI
    s1, s2 = math.sin(phi1), math.sin(phi2)
    case = rate_case(t, phi1, phi2)
    if case == 1:
        return -math.sin(t + phi1) / s1
    if case == 2:
        return -math.sin(t + phi1) / s1 - math.sin(t - phi2) / s2
    if case == 3:
        return -math.sin(t - phi2) / s2
    if case == 4:
        return -math.sin(t - phi2) / s2 + math.sin(t) / s1
    if case == 5:
        return math.sin(t) / s1
    return math.sin(t) / s1 - math.sin(t + phi1) / s1


def rate_case(theta: float, phi1: float, phi2: float) -> int:
    t = float(theta) % TWO_PI
    bounds = (phi2, math.pi - phi1, math.pi, math.pi + phi2, TWO_PI - phi1)
    for k, b in enumerate(bounds, start=1):
        if t < b:
            return k
    return 6


def delta_ratio(players: PlayerSet) -> float:
    """Lower bound on the cooperative/decentralized capture-time ratio."""
    b, _ = survival_lower_bound(players)
    return b / decentralized_game_length(players)


@dataclass(frozen=True)
class BoundsReport:
    game_length: float
    lower_bound: float
    pshenichnyi: float
    delta0: float
    delta_lower: float
    l: float
    m: float
    s: float
    i_star: int

    def check(self, rtol: float = 1e-9) -> list[str]:
        """Names of violated invariants (empty when all hold)."""
        bad = []
        md, b, l = self.game_length, self.lower_bound, self.l
        slack = rtol * max(l, 1e-300)
        if md > l + slack:
            bad.append("game_length <= l")
        if md < self.m - slack:
            bad.append("game_length >= m")
        if b < l / 2 - slack:
            bad.append("lower_bound >= l/2")
        if b > md + slack:
            bad.append("lower_bound <= game_length")
        if md > 2 * b + slack:
            bad.append("game_length <= 2*lower_bound")
        if self.pshenichnyi < b - slack:
            bad.append("pshenichnyi >= lower_bound")
        if not (0.5 - rtol <= self.delta_lower <= 1.0 + rtol):
            bad.append("delta_lower in [0.5, 1]")
        return bad

    def as_dict(self) -> dict:
        return asdict(self)


def bounds_report(players: PlayerSet) -> BoundsReport:
    cell = voronoi_cell(players)
    md = decentralized_game_length(players, cell)
    b, i_star = survival_lower_bound(players, cell)
    bp, d0 = pshenichnyi_bound(players)
    return BoundsReport(
        game_length=md,
        lower_bound=b,
        pshenichnyi=bp,
        delta0=d0,
        delta_lower=b / md,
        l=cell.l,
        m=cell.m,
        s=cell.s,
        i_star=i_star,
    )
