"""Game runner.

Continuous mode samples the unit-speed kinematics with explicit Euler steps
of length ``dt``.  Headings are piecewise constant over a step, so the
relative motion of the evader and each pursuer inside a step is linear; the
capture instant is located exactly within the step rather than only at
sample times.  Discrete mode moves every player one unit per turn, the
evader first, and checks capture on the sampled states only.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np

from .geometry import PlayerSet, voronoi_cell

log = logging.getLogger(__name__)

TRACE_COLUMNS = ("t", "Ex", "Ey", "P1x", "P1y", "P2x", "P2y", "P3x", "P3y")


@dataclass(frozen=True)
class SimParams:
    """Simulation settings; ``None`` fields are resolved per game.

    ``dt`` defaults to 1e-3 of the initial cell diameter, ``capture_radius``
    to ``2 * dt`` and ``max_time`` to four cell diameters.
    """

    dt: float | None = None
    capture_radius: float | None = None
    max_time: float | None = None
    mode: str = "continuous"
    interpolate_capture: bool = True

    def __post_init__(self):
        if self.mode not in ("continuous", "discrete"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for name in ("dt", "capture_radius", "max_time"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")

    def resolve(self, players: PlayerSet) -> "SimParams":
        diam = voronoi_cell(players).diameter
        if self.mode == "discrete":
            dt = 1.0
        else:
            dt = self.dt if self.dt is not None else 1e-3 * diam
        r = self.capture_radius if self.capture_radius is not None else 2.0 * dt
        T = self.max_time if self.max_time is not None else 4.0 * diam
        return replace(self, dt=dt, capture_radius=r, max_time=T)


@dataclass(frozen=True)
class GameState:
    t: float
    evader: np.ndarray
    pursuers: np.ndarray

    @property
    def players(self) -> PlayerSet:
        return PlayerSet(self.evader, self.pursuers)


@dataclass
class GameTrace:
    """Sampled game.  ``samples`` rows follow :data:`TRACE_COLUMNS`.

    When the game ends in capture, the last row is the state at the capture
    instant, which may fall inside a step.
    """

    samples: np.ndarray
    captured: bool
    capture_time: float | None
    capturing_pursuer: int | None
    params: SimParams

    def __len__(self):
        return len(self.samples)

    def state(self, k: int) -> GameState:
        row = self.samples[k]
        return GameState(float(row[0]), row[1:3].copy(), row[3:9].reshape(3, 2).copy())

    @property
    def times(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def evader_path(self) -> np.ndarray:
        return self.samples[:, 1:3]

    @property
    def pursuer_paths(self) -> np.ndarray:
        return self.samples[:, 3:9].reshape(-1, 3, 2)


def capture_check(state: GameState, capture_radius: float) -> bool:
    d = np.linalg.norm(np.asarray(state.pursuers) - np.asarray(state.evader), axis=1)
    return bool(d.min() <= capture_radius)


def _first_contact(rel0: np.ndarray, drel: np.ndarray, r: float):
    """Smallest s in [0, 1] with |rel0 + s * drel| <= r, or None."""
    a = float(drel @ drel)
    b = float(rel0 @ drel)
    c = float(rel0 @ rel0) - r * r
    if c <= 0.0:
        return 0.0
    if a == 0.0 or b >= 0.0:
        return None
    disc = b * b - a * c
    if disc < 0.0:
        return None
    s = (-b - math.sqrt(disc)) / a
    return s if s <= 1.0 else None


def _pursuer_moves(pursuers, state, heading):
    if not isinstance(pursuers, Sequence):
        if getattr(pursuers, "cooperative", False):
            return np.asarray(pursuers(state, heading), dtype=float)
        pursuers = (pursuers,) * 3
    E = state.evader
    return np.array([pursuers[i](state.pursuers[i], E, heading) for i in range(3)], dtype=float)


def _reset(policy, state, params):
    reset = getattr(policy, "reset", None)
    if reset is not None:
        reset(state, params)


def run_game(players: PlayerSet, evader, pursuers, params: SimParams | None = None) -> GameTrace:
    """Play a game to capture or to ``params.max_time``.

    ``pursuers`` is either a cooperative policy, a single decentralized
    policy used by all three pursuers, or a sequence of three decentralized
    policies.  Each step the evader commits its heading first and the
    pursuers respond to it.  A timeout returns a trace with
    ``captured=False``.
    """
    params = (params or SimParams()).resolve(players)
    dt, r = params.dt, params.capture_radius
    E = np.array(players.evader, dtype=float)
    P = np.array(players.pursuers, dtype=float)
    state = GameState(0.0, E, P)
    _reset(evader, state, params)
    if isinstance(pursuers, Sequence):
        for p in pursuers:
            _reset(p, state, params)
    else:
        _reset(pursuers, state, params)

    rows = [np.concatenate(([0.0], E, P.ravel()))]
    n_max = int(math.ceil(params.max_time / dt - 1e-9))
    captured, t_cap, who = False, None, None

    d0 = np.linalg.norm(P - E, axis=1)
    if d0.min() <= r:
        captured, t_cap, who = True, 0.0, int(np.argmin(d0))

    k = 0
    while not captured and k < n_max:
        t = k * dt
        state = GameState(t, E, P)
        e = np.asarray(evader(state), dtype=float)
        W = _pursuer_moves(pursuers, state, e)
        E1 = E + dt * e
        P1 = P + dt * W
        if params.mode == "continuous" and params.interpolate_capture:
            hits = []
            for i in range(3):
                s = _first_contact(P[i] - E, dt * (W[i] - e), r)
                if s is not None:
                    hits.append((s, i))
            if hits:
                s, i = min(hits)
                E = E + s * dt * e
                P = P + s * dt * W
                captured, t_cap, who = True, t + s * dt, i
                rows.append(np.concatenate(([t_cap], E, P.ravel())))
                break
        E, P = E1, P1
        k += 1
        rows.append(np.concatenate(([k * dt], E, P.ravel())))
        d = np.linalg.norm(P - E, axis=1)
        if d.min() <= r:
            captured, t_cap, who = True, k * dt, int(np.argmin(d))

    if not captured:
        log.debug("no capture before t=%g", params.max_time)
    return GameTrace(np.array(rows), captured, t_cap, who, params)


# --------------------------------------------------------------------------
# trace export

TRACE_SCHEMA_VERSION = 1


def trace_to_dict(trace: GameTrace) -> dict:
    """JSON-ready form of a trace.

    Keys: ``schema_version``, ``columns`` (:data:`TRACE_COLUMNS`), ``params``
    (the resolved :class:`SimParams`), ``capture`` (``captured``,
    ``capture_time``, ``capturing_pursuer``; the pursuer index is 0-based
    into the input order) and ``samples`` (one list per row).
    """
    return {
        "schema_version": TRACE_SCHEMA_VERSION,
        "columns": list(TRACE_COLUMNS),
        "params": asdict(trace.params),
        "capture": {
            "captured": trace.captured,
            "capture_time": trace.capture_time,
            "capturing_pursuer": trace.capturing_pursuer,
        },
        "samples": trace.samples.tolist(),
    }


def trace_from_dict(data: dict) -> GameTrace:
    if data.get("schema_version") != TRACE_SCHEMA_VERSION:
        raise ValueError(f"unsupported trace schema {data.get('schema_version')!r}")
    if tuple(data["columns"]) != TRACE_COLUMNS:
        raise ValueError("unexpected trace columns")
    cap = data["capture"]
    samples = np.array(data["samples"], dtype=float).reshape(-1, len(TRACE_COLUMNS))
    return GameTrace(samples, bool(cap["captured"]), cap["capture_time"],
                     cap["capturing_pursuer"], SimParams(**data["params"]))


def write_trace_json(trace: GameTrace, path) -> None:
    with open(path, "w") as fh:
        json.dump(trace_to_dict(trace), fh, indent=1)
        fh.write("\n")


def read_trace_json(path) -> GameTrace:
    with open(path) as fh:
        return trace_from_dict(json.load(fh))


def write_trace_csv(trace: GameTrace, path) -> None:
    """One row per sample under a fixed :data:`TRACE_COLUMNS` header.

    Values are written with ``repr`` so they read back bit for bit.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for row in trace.samples.tolist():
            w.writerow([repr(v) for v in row])


def read_trace_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = tuple(next(r))
        if header != TRACE_COLUMNS:
            raise ValueError(f"unexpected header {header}")
        return np.array([[float(v) for v in row] for row in r], dtype=float)
