"""Random games, tightness families and the studies built on them.

Random games come from :class:`GameSampler`.  With ``law="pursuers"`` (the
default) the pursuers are uniform in a box and the evader is uniform in their
triangle via Dirichlet(1, 1, 1) barycentric weights.  With ``law="cell"`` the
Voronoi cell's vertices are uniform in the box, the evader is uniform in the
cell and the pursuers are its reflections.  Draws are rejected while any
barycentric weight is below ``interior_margin``, while the configuration is
inadmissible, or while some pursuer starts closer to the evader than
``min_gap`` cell diameters.  Every game gets its own generator spawned from
one ``SeedSequence``, so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    bounds_report,
    decentralized_game_length,
    game_length_rate,
    survival_lower_bound,
)
from .engine import SimParams, run_game
from .errors import TripursuitError
from .geometry import PlayerSet, is_admissible, pursuers_from_cell, voronoi_cell
from .strategies import (
    CHatStrategy,
    DStrategy,
    EStrategyEvader,
    FlatIsoscelesFamily,
    d_strategy_move,
    heading_at,
)


SAMPLER_LAWS = ("pursuers", "cell")


@dataclass(frozen=True)
class GameSampler:
    box: tuple = (0.0, 1.0)
    interior_margin: float = 1e-6
    min_gap: float = 0.0
    law: str = "pursuers"
    max_tries: int = 10_000

    def __post_init__(self):
        if self.law not in SAMPLER_LAWS:
            raise ValueError(f"unknown sampler law {self.law!r}; expected one of {SAMPLER_LAWS}")
        if not self.box[1] > self.box[0]:
            raise ValueError("box must be (low, high) with low < high")

    def sample(self, rng: np.random.Generator) -> PlayerSet:
        lo, hi = self.box
        for _ in range(self.max_tries):
            T = rng.uniform(lo, hi, size=(3, 2))
            w = rng.dirichlet(np.ones(3))
            if w.min() < self.interior_margin:
                continue
            try:
                if self.law == "cell":
                    players = pursuers_from_cell(T, w @ T)
                else:
                    players = PlayerSet(w @ T, T)
                if not is_admissible(players):
                    continue
                cell = voronoi_cell(players)
            except TripursuitError:
                continue
            gap = np.linalg.norm(players.pursuers - players.evader, axis=1).min()
            if gap < self.min_gap * cell.diameter:
                continue
            return players
        raise RuntimeError(f"sampler exhausted after {self.max_tries} tries")


# Simulated games resolve time in steps of 1e-3 cell diameters; starting a
# pursuer within a few steps of the evader would leave nothing to simulate.
SIMULATION_SAMPLER = GameSampler(min_gap=0.02)


def game_streams(seed: int, n: int) -> list:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def random_games(n: int, seed: int = 0, sampler: GameSampler | None = None) -> list:
    sampler = sampler or GameSampler()
    return [sampler.sample(rng) for rng in game_streams(seed, n)]


def right_triangle_game(m: float, s: float, evader=None) -> PlayerSet:
    """Right angle at V3 with legs ``m`` (V1V3) and ``s`` (V2V3); evader at
    the centroid unless given."""
    T = np.array([[m, 0.0], [0.0, s], [0.0, 0.0]])
    E = T.mean(axis=0) if evader is None else np.asarray(evader, dtype=float)
    return pursuers_from_cell(T, E)


def equilateral_game(side: float = 1.0, evader=None) -> PlayerSet:
    T = np.array([[0.0, 0.0], [side, 0.0], [side / 2, side * math.sqrt(3) / 2]])
    E = T.mean(axis=0) if evader is None else np.asarray(evader, dtype=float)
    return pursuers_from_cell(T, E)


# --------------------------------------------------------------------------
# finite-difference check of the game-length rate


def advance_evader(players: PlayerSet, heading, dtau: float) -> PlayerSet:
    """Move the evader by ``dtau`` along ``heading`` with decentralized
    pursuer replies, in one exact straight-line step."""
    e = np.asarray(heading, dtype=float)
    E = players.evader
    W = np.array([d_strategy_move(p, E, e) for p in players.pursuers])
    return PlayerSet(E + dtau * e, players.pursuers + dtau * W)


def finite_difference_rate(players: PlayerSet, theta: float, dtau: float = 1e-4) -> float:
    cell = voronoi_cell(players)
    before = decentralized_game_length(players)
    after = decentralized_game_length(advance_evader(players, heading_at(cell, theta), dtau))
    return (after - before) / dtau


@dataclass
class RateCheck:
    """Outcome of :func:`rate_check`.

    ``top`` lists ``(game, theta, value)`` for every grid heading whose rate
    is within ``top_tol`` of -1; ``misplaced`` is the subset farther than one
    grid step from the three optimal headings.  ``secondary`` counts interior
    local maxima below -1, which the sinusoidal pieces can produce.
    """

    max_residual: float
    worst: tuple
    max_value: float
    min_value: float
    top: list = field(default_factory=list)
    misplaced: list = field(default_factory=list)
    secondary: int = 0

    def ok(self, residual_tol: float = 1e-3, top_tol: float = 1e-6) -> bool:
        return (self.max_residual <= residual_tol
                and abs(self.max_value + 1.0) <= top_tol
                and abs(self.min_value + 1.0) <= top_tol
                and not self.misplaced)


def optimal_headings(phi1: float) -> np.ndarray:
    return np.array([0.0, math.pi, 2 * math.pi - phi1])


def rate_check(games, n_theta: int = 360, dtau: float = 1e-4, top_tol: float = 1e-6) -> RateCheck:
    """Compare the closed-form rate with finite differences on a heading grid.

    ``max_value``/``min_value`` are the largest and smallest per-game grid
    maxima.
    """
    thetas = np.arange(n_theta) * (2 * math.pi / n_theta)
    step = 2 * math.pi / n_theta
    worst, max_res = None, 0.0
    game_max = []
    top, misplaced, secondary = [], [], 0
    for g, players in enumerate(games):
        cell = voronoi_cell(players)
        phi1, phi2 = cell.phi1, cell.phi2
        vals = np.array([game_length_rate(t, phi1, phi2) for t in thetas])
        fd = np.array([finite_difference_rate(players, t, dtau) for t in thetas])
        res = np.abs(vals - fd)
        k = int(np.argmax(res))
        if res[k] > max_res:
            max_res, worst = float(res[k]), (g, float(thetas[k]))
        game_max.append(float(vals.max()))
        optimal = optimal_headings(phi1)
        for i in range(n_theta):
            if vals[i] >= -1.0 - top_tol:
                gap = np.abs((thetas[i] - optimal + math.pi) % (2 * math.pi) - math.pi)
                top.append((g, float(thetas[i]), float(vals[i])))
                if gap.min() > step * (1 + 1e-9):
                    misplaced.append((g, float(thetas[i]), float(vals[i])))
            elif vals[i] >= vals[i - 1] and vals[i] >= vals[(i + 1) % n_theta]:
                secondary += 1
    return RateCheck(max_res, worst, max(game_max), min(game_max), top, misplaced, secondary)


# --------------------------------------------------------------------------
# Monte Carlo over random games


MONTECARLO_COLUMNS = (
    "game", "Ex", "Ey", "P1x", "P1y", "P2x", "P2y", "P3x", "P3y",
    "l", "m", "s", "game_length", "lower_bound", "pshenichnyi", "delta0",
    "delta_lower", "i_star", "pshenichnyi_over_game_length",
    "game_length_over_lower_bound",
)


def _report_row(idx: int, players: PlayerSet) -> dict:
    rep = bounds_report(players)
    row = {"game": idx, "Ex": players.evader[0], "Ey": players.evader[1]}
    for i, p in enumerate(players.pursuers, start=1):
        row[f"P{i}x"], row[f"P{i}y"] = float(p[0]), float(p[1])
    row.update(rep.as_dict())
    row["pshenichnyi_over_game_length"] = rep.pshenichnyi / rep.game_length
    row["game_length_over_lower_bound"] = rep.game_length / rep.lower_bound
    row["_violations"] = rep.check()
    return row


def _rows_for(args):
    seed, indices, sampler = args
    streams = np.random.SeedSequence(seed).spawn(max(indices) + 1)
    return [_report_row(i, sampler.sample(np.random.default_rng(streams[i]))) for i in indices]


def montecarlo(n_games: int, seed: int = 0, sampler: GameSampler | None = None,
               workers: int = 1) -> list:
    """Per-game bounds for ``n_games`` random games, sorted by game index."""
    sampler = sampler or GameSampler()
    if workers <= 1:
        return [_report_row(i, sampler.sample(rng))
                for i, rng in enumerate(game_streams(seed, n_games))]
    chunks = [list(range(i, n_games, workers)) for i in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        parts = pool.map(_rows_for, [(seed, c, sampler) for c in chunks if c])
    rows = [r for part in parts for r in part]
    return sorted(rows, key=lambda r: r["game"])


def summarize(rows: list, key: str) -> dict:
    v = np.array([r[key] for r in rows])
    return {"min": float(v.min()), "median": float(np.median(v)), "max": float(v.max())}


# --------------------------------------------------------------------------
# tightness sweeps


def right_triangle_sweep(m: float = 1.0, grid=(0.1, 0.01, 0.001)) -> list:
    out = []
    for s in grid:
        players = right_triangle_game(m, s)
        md = decentralized_game_length(players)
        b, _ = survival_lower_bound(players)
        out.append({"s": s, "game_length": md, "lower_bound": b, "ratio": md / b})
    return out


def flat_isosceles_run(family: FlatIsoscelesFamily, params: SimParams | None = None) -> dict:
    """Simulate cooperative and decentralized pursuit on one family member.

    The evader replans its optimal decentralized reply whenever the cell
    stops being similar, so once the cooperative pursuers switch to the
    decentralized rule it plays optimally from then on.
    """
    players = family.players
    if params is None:
        diam = family.base
        params = SimParams(dt=1e-3 * diam, capture_radius=1e-3 * family.evader_fraction * family.height)
    coop = CHatStrategy(family)
    t_coop = run_game(players, EStrategyEvader(), coop, params)
    t_dec = run_game(players, EStrategyEvader(), DStrategy(), params)
    return {
        "height": family.height,
        "coop_time": t_coop.capture_time,
        "decentralized_time": t_dec.capture_time,
        "switch_time": coop.switch_time,
        "game_length": decentralized_game_length(players),
        "ratio": (t_coop.capture_time / t_dec.capture_time
                  if t_coop.captured and t_dec.captured else float("nan")),
    }


def flat_isosceles_sweep(base: float = 2.0, grid=(0.1, 0.01, 0.001),
                         evader_fraction: float = 0.01, params: SimParams | None = None) -> list:
    return [flat_isosceles_run(FlatIsoscelesFamily(base, eps, evader_fraction), params)
            for eps in grid]


# --------------------------------------------------------------------------
# off-policy evasion


def perturbation_study(games, angle: float = math.radians(10.0), dt_scale: float = 1e-3,
                       radius_scale: float = 1e-6) -> list:
    """Capture times when the optimal plan has one leg turned by ``angle``.

    Returns one dict per (game, leg) with the loss ``game_length -
    capture_time`` in absolute units and in steps.
    """
    from .strategies import PerturbedEStrategyEvader

    out = []
    for g, players in enumerate(games):
        cell = voronoi_cell(players)
        params = SimParams(dt=dt_scale * cell.diameter,
                           capture_radius=radius_scale * cell.diameter)
        md = decentralized_game_length(players, cell)
        for leg in range(3):
            tr = run_game(players, PerturbedEStrategyEvader(leg, angle), DStrategy(), params)
            t = tr.capture_time if tr.captured else math.inf
            out.append({"game": g, "leg": leg, "game_length": md, "capture_time": t,
                        "loss": md - t, "loss_in_steps": (md - t) / params.dt})
    return out


# --------------------------------------------------------------------------
# random cells


def triangle_angles(T) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    out = np.empty(3)
    for i in range(3):
        u, v = T[(i + 1) % 3] - T[i], T[(i + 2) % 3] - T[i]
        c = float(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))
        out[i] = math.acos(min(1.0, max(-1.0, c)))
    return out


def random_cells(n: int, seed: int = 0, min_angle: float = math.radians(1.0),
                 interior_margin: float = 1e-3, box=(0.0, 1.0)):
    """Yield ``n`` pairs ``(triangle, evader)``.

    Vertices are uniform in the box and the evader uniform in the triangle.
    Slivers with an angle below ``min_angle`` are redrawn: rebuilding such a
    cell from rounded pursuer positions moves its vertices by roughly the
    rounding error over the square of that angle.
    """
    lo, hi = box
    for rng in game_streams(seed, n):
        while True:
            T = rng.uniform(lo, hi, size=(3, 2))
            w = rng.dirichlet(np.ones(3))
            if w.min() >= interior_margin and triangle_angles(T).min() >= min_angle:
                yield T, w @ T
                break
