"""Command-line driver.

Settings are layered: built-in defaults, then a JSON ``--config`` file, then
``TRIPURSUIT_*`` environment variables, then command-line flags.  Every
subcommand re-checks the invariants it can and exits 0 only if all hold;
otherwise it prints ``FAILED: <invariant>`` lines and exits 1.  Invalid input
exits 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import bounds_report
from .engine import SimParams, run_game, write_trace_csv, write_trace_json
from .errors import TripursuitError
from .experiments import (
    MONTECARLO_COLUMNS,
    GameSampler,
    equilateral_game,
    flat_isosceles_sweep,
    montecarlo,
    perturbation_study,
    random_games,
    rate_check,
    right_triangle_sweep,
    summarize,
)
from .geometry import PlayerSet, is_admissible, pursuers_from_cell, voronoi_cell
from .strategies import (
    DStrategy,
    EStrategyEvader,
    FixedHeadingEvader,
    GreedyVertexEvader,
    PerturbedEStrategyEvader,
)

ENV_PREFIX = "TRIPURSUIT_"
FAMILIES = ("right_triangle", "flat_isosceles")
FIXTURES = {
    "equilateral": lambda: equilateral_game(),
    "3-4-5": lambda: pursuers_from_cell([[0, 0], [4, 0], [4, 3]], [3, 0.5]),
}
EVADERS = ("e-strategy", "greedy", "perturbed", "heading")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    seed: int = 0
    n_games: int = 1000
    sampler: GameSampler = field(default_factory=GameSampler)
    sim: SimParams = field(default_factory=SimParams)
    out_dir: str = "tripursuit-out"
    workers: int = 1
    # simulate / bounds
    fixture: str | None = "equilateral"
    game: dict | None = None
    evader: str = "e-strategy"
    perturb_leg: int = 0
    perturb_deg: float = 10.0
    heading: float = 0.0
    # sweep
    family: str = "right_triangle"
    grid: tuple = (0.1, 0.01, 0.001)
    base: float = 2.0
    medium: float = 1.0
    evader_fraction: float = 0.01
    # rate check
    n_theta: int = 360
    dtau: float = 1e-4

    def __post_init__(self):
        if self.n_games < 1:
            raise ConfigError("n_games must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}")
        if any(not g > 0 for g in self.grid):
            raise ConfigError("grid values must be positive")
        if self.evader not in EVADERS:
            raise ConfigError(f"evader must be one of {EVADERS}")
        if self.fixture is not None and self.fixture not in FIXTURES:
            raise ConfigError(f"fixture must be one of {sorted(FIXTURES)}")

    def players(self) -> PlayerSet:
        """The single game for ``simulate``/``bounds``; ``game`` wins over
        ``fixture``.  ``game`` holds either ``evader`` and ``pursuers`` or
        ``cell`` (a triangle) and ``evader``."""
        if self.game is None:
            return FIXTURES[self.fixture]()
        g = self.game
        try:
            if "cell" in g:
                return pursuers_from_cell(g["cell"], g["evader"])
            return PlayerSet(g["evader"], g["pursuers"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad game description: {exc}") from exc


_SCALARS = {f.name for f in fields(ExperimentConfig)} - {"sampler", "sim", "game", "grid"}
_ENV_KEYS = {
    "SEED": ("seed", int),
    "N_GAMES": ("n_games", int),
    "OUT_DIR": ("out_dir", str),
    "WORKERS": ("workers", int),
    "DT": ("dt", float),
    "CAPTURE_RADIUS": ("capture_radius", float),
    "FAMILY": ("family", str),
    "GRID": ("grid", str),
}


def _apply(cfg: ExperimentConfig, key: str, value) -> ExperimentConfig:
    if value is None:
        return cfg
    if key in ("dt", "capture_radius", "max_time", "mode"):
        return replace(cfg, sim=replace(cfg.sim, **{key: value}))
    if key == "grid":
        if isinstance(value, str):
            value = [float(v) for v in value.split(",") if v.strip()]
        return replace(cfg, grid=tuple(float(v) for v in value))
    return replace(cfg, **{key: value})


def load_config(args: argparse.Namespace, environ=os.environ) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        for key, value in data.items():
            if key == "sampler":
                cfg = replace(cfg, sampler=GameSampler(**{
                    k: tuple(v) if k == "box" else v for k, v in value.items()}))
            elif key == "sim":
                cfg = replace(cfg, sim=SimParams(**value))
            elif key == "game":
                cfg = replace(cfg, game=value)
            elif key == "grid" or key in _SCALARS:
                cfg = _apply(cfg, key, value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
    for suffix, (key, conv) in _ENV_KEYS.items():
        raw = environ.get(ENV_PREFIX + suffix)
        if raw is not None:
            try:
                cfg = _apply(cfg, key, conv(raw))
            except ValueError as exc:
                raise ConfigError(f"{ENV_PREFIX + suffix}: {exc}") from exc
    for key in ("seed", "n_games", "out_dir", "workers", "dt", "capture_radius",
                "family", "grid", "fixture", "evader", "perturb_leg", "perturb_deg",
                "heading", "base", "medium", "evader_fraction", "n_theta"):
        cfg = _apply(cfg, key, getattr(args, key, None))
    if getattr(args, "pursuers_file", None):
        data = json.loads(Path(args.pursuers_file).read_text())
        cfg = replace(cfg, game=data)
    if getattr(args, "sampler_law", None):
        cfg = replace(cfg, sampler=replace(cfg.sampler, law=args.sampler_law))
    return cfg


# --------------------------------------------------------------------------
# output helpers


def _g(x) -> str:
    return f"{x + 0.0:.6g}" if isinstance(x, (float, np.floating)) else str(x)


def _table(rows: list, keys: list) -> str:
    cells = [[_g(r[k]) for k in keys] for r in rows]
    width = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.rjust(w) for k, w in zip(keys, width))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, width)) for row in cells]
    return "\n".join(lines)


def _out_dir(cfg: ExperimentConfig) -> Path:
    p = Path(cfg.out_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _finish(failures: list) -> int:
    for name in failures:
        print(f"FAILED: {name}")
    return 1 if failures else 0


def _evader_policy(cfg: ExperimentConfig):
    if cfg.evader == "greedy":
        return GreedyVertexEvader()
    if cfg.evader == "perturbed":
        return PerturbedEStrategyEvader(cfg.perturb_leg, math.radians(cfg.perturb_deg))
    if cfg.evader == "heading":
        return FixedHeadingEvader(cfg.heading)
    return EStrategyEvader()


# --------------------------------------------------------------------------
# subcommands


def cmd_simulate(cfg: ExperimentConfig) -> int:
    players = cfg.players()
    rep = bounds_report(players)
    trace = run_game(players, _evader_policy(cfg), DStrategy(), cfg.sim)
    out = _out_dir(cfg)
    write_trace_json(trace, out / "trace.json")
    write_trace_csv(trace, out / "trace.csv")
    p = trace.params
    print(f"dt={_g(p.dt)} capture_radius={_g(p.capture_radius)} samples={len(trace)}")
    if trace.captured:
        print(f"capture_time={_g(trace.capture_time)} by pursuer {trace.capturing_pursuer}")
    else:
        print(f"no capture before t={_g(p.max_time)}")
    print(f"M_D={_g(rep.game_length)} B_lower={_g(rep.lower_bound)} delta_lower={_g(rep.delta_lower)}")
    print(f"trace written to {out / 'trace.json'} and {out / 'trace.csv'}")

    failures = rep.check()
    steps = np.linalg.norm(np.diff(trace.samples[:, 1:], axis=0).reshape(-1, 4, 2), axis=2)
    dts = np.diff(trace.times)
    if np.any(steps > dts[:, None] * (1 + 1e-9) + 1e-12):
        failures.append("unit speed")
    if trace.captured and trace.capture_time > rep.game_length + 2 * p.dt:
        failures.append("capture_time <= game_length under decentralized pursuit")
    return _finish(failures)


def cmd_bounds(cfg: ExperimentConfig) -> int:
    players = cfg.players()
    cell = voronoi_cell(players)
    rep = bounds_report(players)
    print("cell vertices V1, V2, V3:")
    for v in cell.vertices:
        print(f"  ({_g(v[0])}, {_g(v[1])})")
    print("angles (deg): " + ", ".join(_g(math.degrees(a)) for a in cell.angles))
    for k, v in rep.as_dict().items():
        print(f"{k} = {_g(v)}")
    return _finish(rep.check())


def _write_rows(path: Path, rows: list, columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([repr(float(r[c])) if isinstance(r[c], float) else r[c] for c in columns])


def cmd_montecarlo(cfg: ExperimentConfig) -> int:
    rows = montecarlo(cfg.n_games, cfg.seed, cfg.sampler, cfg.workers)
    failures = []
    for r in rows:
        bad = list(r["_violations"])
        if r["pshenichnyi"] < r["lower_bound"] * (1 - 1e-9):
            bad.append("pshenichnyi >= lower_bound")
        failures += [f"game {r['game']}: {b}" for b in bad]
    out = _out_dir(cfg)
    _write_rows(out / "montecarlo.csv", rows, MONTECARLO_COLUMNS)
    print(f"{cfg.n_games} games, seed {cfg.seed}, sampler law {cfg.sampler.law!r}")
    table = []
    for key in ("pshenichnyi_over_game_length", "game_length_over_lower_bound", "delta_lower"):
        table.append({"quantity": key, **summarize(rows, key)})
    print(_table(table, ["quantity", "min", "median", "max"]))
    print(f"invariant violations: {len(failures)}")
    print(f"per-game table written to {out / 'montecarlo.csv'}")
    return _finish(failures)


def cmd_sweep(cfg: ExperimentConfig) -> int:
    grid = sorted(cfg.grid, reverse=True)
    out = _out_dir(cfg)
    failures = []
    if cfg.family == "right_triangle":
        rows = right_triangle_sweep(cfg.medium, grid)
        ratios = [r["ratio"] for r in rows]
        keys = ["s", "game_length", "lower_bound", "ratio"]
        if any(b > a * (1 + 1e-12) for a, b in zip(ratios, ratios[1:])):
            failures.append("game_length/lower_bound decreases as s shrinks")
        if min(ratios) < 1 - 1e-9:
            failures.append("game_length/lower_bound >= 1")
    else:
        rows = flat_isosceles_sweep(cfg.base, grid, cfg.evader_fraction)
        ratios = [r["ratio"] for r in rows]
        keys = ["height", "switch_time", "coop_time", "decentralized_time", "game_length", "ratio"]
        if any(not math.isfinite(r) for r in ratios):
            failures.append("both pursuit modes capture")
        elif any(b > a * (1 + 1e-12) for a, b in zip(ratios, ratios[1:])):
            failures.append("cooperative/decentralized ratio decreases as height shrinks")
        elif min(ratios) < 0.5 - 1e-3:
            failures.append("cooperative/decentralized ratio >= 1/2")
    print(f"family {cfg.family}")
    print(_table(rows, keys))
    _write_rows(out / f"sweep_{cfg.family}.csv", rows, keys)
    return _finish(failures)


def cmd_rate_check(cfg: ExperimentConfig) -> int:
    games = random_games(cfg.n_games, cfg.seed, cfg.sampler)
    rc = rate_check(games, cfg.n_theta, cfg.dtau)
    print(f"{cfg.n_games} games x {cfg.n_theta} headings, finite-difference step {cfg.dtau}")
    print(f"max |closed form - finite difference| = {_g(rc.max_residual)} (game, theta) = {rc.worst}")
    print(f"per-game grid maximum ranges over [{rc.min_value:.9f}, {rc.max_value:.9f}]")
    print(f"grid headings attaining -1: {len(rc.top)}, away from the optimal headings: {len(rc.misplaced)}")
    print(f"interior local maxima below -1: {rc.secondary}")
    study = perturbation_study(games[: min(5, len(games))])
    worst = min(r["loss_in_steps"] for r in study)
    print(f"turning one optimal leg by 10 deg loses at least {_g(worst)} steps "
          f"over {len(study)} runs")
    out = _out_dir(cfg)
    with open(out / "table2_maxima.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("game", "theta", "rate"))
        w.writerows(rc.top)
    failures = []
    if rc.max_residual > 1e-3:
        failures.append("closed-form rate matches finite differences within 1e-3")
    if abs(rc.max_value + 1) > 1e-6 or abs(rc.min_value + 1) > 1e-6:
        failures.append("largest rate equals -1")
    if rc.misplaced:
        failures.append("rate -1 only at the three optimal headings")
    if worst <= 0:
        failures.append("perturbed evasion is captured before the game length")
    return _finish(failures)


COMMANDS = {
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "montecarlo": cmd_montecarlo,
    "sweep": cmd_sweep,
    "table2": cmd_rate_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--out-dir", dest="out_dir")
    common.add_argument("--dt", type=float, help="time step (default 1e-3 cell diameters)")
    common.add_argument("--capture-radius", dest="capture_radius", type=float,
                        help="capture radius (default 2 dt)")
    common.add_argument("--n-games", dest="n_games", type=int)
    common.add_argument("--family", choices=FAMILIES)
    common.add_argument("--grid", help="comma-separated positive values, e.g. 0.1,0.01,0.001")
    common.add_argument("--workers", type=int, help="processes for montecarlo")
    common.add_argument("--sampler-law", dest="sampler_law", choices=("pursuers", "cell"))
    common.add_argument("-v", "--verbose", action="store_true")

    game = argparse.ArgumentParser(add_help=False)
    game.add_argument("--fixture", choices=sorted(FIXTURES))
    game.add_argument("--game", dest="pursuers_file",
                      help="JSON file with evader and pursuers, or cell and evader")

    parser = argparse.ArgumentParser(
        prog="tripursuit",
        description="Three-pursuer, one-evader Voronoi pursuit: simulation and bounds.",
        epilog=f"Environment overrides: {', '.join(ENV_PREFIX + k for k in _ENV_KEYS)}.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common, game], help="play one game and export its trace")
    p.add_argument("--evader", choices=EVADERS)
    p.add_argument("--perturb-leg", dest="perturb_leg", type=int, choices=(0, 1, 2))
    p.add_argument("--perturb-deg", dest="perturb_deg", type=float)
    p.add_argument("--heading", type=float, help="radians, for --evader heading")
    sub.add_parser("bounds", parents=[common, game], help="closed-form bounds for one game")
    sub.add_parser("montecarlo", parents=[common], help="bounds over random games")
    p = sub.add_parser("sweep", parents=[common], help="tightness families")
    p.add_argument("--base", type=float, help="flat isosceles base length")
    p.add_argument("--medium", type=float, help="right triangle medium edge")
    p.add_argument("--evader-fraction", dest="evader_fraction", type=float)
    p = sub.add_parser("table2", parents=[common], help="check the game-length rate by finite differences")
    p.add_argument("--n-theta", dest="n_theta", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        if args.command in ("simulate", "bounds"):
            players = cfg.players()
            if not is_admissible(players):
                raise ConfigError("invalid game: the evader must lie strictly inside "
                                  "the pursuers' convex hull")
        return COMMANDS[args.command](cfg)
    except (ConfigError, TripursuitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
