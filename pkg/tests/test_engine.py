import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import games
from tripursuit.bounds import decentralized_game_length
from tripursuit.engine import (
    TRACE_COLUMNS,
    GameState,
    SimParams,
    capture_check,
    read_trace_csv,
    read_trace_json,
    run_game,
    trace_from_dict,
    trace_to_dict,
    write_trace_csv,
    write_trace_json,
)
from tripursuit.geometry import voronoi_cell
from tripursuit.strategies import DStrategy, EStrategyEvader, GreedyVertexEvader


def _state(E, P):
    return GameState(0.0, np.asarray(E, float), np.asarray(P, float))


def test_capture_check_examples():
    far = [[1, 0], [0, 1], [-1, 0]]
    assert capture_check(_state([0, 0], [[0, 0.0005], [5, 5], [-5, 5]]), 1e-3)
    assert not capture_check(_state([0, 0], far), 1e-3)
    assert capture_check(_state([0, 0], [[0.25, 0], [5, 5], [-5, 5]]), 0.25)


def test_params_resolve_defaults(equilateral):
    p = SimParams().resolve(equilateral)
    assert p.dt == pytest.approx(1e-3)
    assert p.capture_radius == pytest.approx(2e-3)
    assert p.max_time == pytest.approx(4.0)
    assert SimParams(mode="discrete").resolve(equilateral).dt == 1.0


def test_params_reject_bad_values():
    with pytest.raises(ValueError):
        SimParams(dt=0.0)
    with pytest.raises(ValueError):
        SimParams(mode="hybrid")


def test_timeout(equilateral):
    tr = run_game(equilateral, EStrategyEvader(), DStrategy(),
                  SimParams(dt=1e-3, capture_radius=2e-3, max_time=0.1))
    assert not tr.captured and tr.capture_time is None
    assert tr.times[-1] == pytest.approx(0.1)


def test_equilateral_capture_time(equilateral):
    tr = run_game(equilateral, EStrategyEvader(), DStrategy(),
                  SimParams(dt=1e-3, capture_radius=2e-3))
    assert tr.captured
    assert tr.capture_time == pytest.approx(1.0, abs=5e-3)


def test_345_capture_time(game345):
    tr = run_game(game345, EStrategyEvader(), DStrategy(),
                  SimParams(dt=1e-3, capture_radius=1e-6))
    assert tr.capture_time == pytest.approx(53 / 12, abs=5e-3)


def test_unit_speed_and_determinism(game345):
    params = SimParams(dt=5e-3, capture_radius=1e-6)
    a = run_game(game345, EStrategyEvader(), DStrategy(), params)
    b = run_game(game345, EStrategyEvader(), DStrategy(), params)
    assert a.samples.tobytes() == b.samples.tobytes()
    steps = np.diff(a.samples, axis=0)
    speeds = np.linalg.norm(steps[:, 1:].reshape(-1, 4, 2), axis=2) / steps[:, :1]
    np.testing.assert_allclose(speeds, 1.0, atol=1e-9)


def test_cell_stays_similar_under_decentralized_pursuit(game345):
    tr = run_game(game345, EStrategyEvader(), DStrategy(), SimParams(dt=5e-3, capture_radius=1e-6))
    ref = voronoi_cell(tr.state(0).players).angles
    for k in range(0, len(tr) - 5, 50):
        np.testing.assert_allclose(voronoi_cell(tr.state(k).players).angles, ref, atol=1e-6)


@settings(max_examples=15, deadline=None)
@given(games(min_angle_deg=10.0, min_weight=0.1))
def test_capture_time_tracks_game_length(players):
    d = voronoi_cell(players).diameter
    tr = run_game(players, EStrategyEvader(), DStrategy(),
                  SimParams(dt=2e-3 * d, capture_radius=1e-6 * d))
    md = decentralized_game_length(players)
    assert tr.captured
    assert tr.capture_time == pytest.approx(md, rel=0.02)


def test_greedy_run_is_captured(game345):
    tr = run_game(game345, GreedyVertexEvader(), DStrategy(), SimParams(dt=5e-3, capture_radius=1e-6))
    assert tr.captured and tr.capture_time >= 4.0331596 - 2e-6


def test_discrete_mode_moves_one_unit(game345):
    big = game345.scaled(100.0)
    tr = run_game(big, EStrategyEvader(), DStrategy(), SimParams(mode="discrete", capture_radius=1.0))
    assert tr.captured
    assert np.allclose(np.diff(tr.times), 1.0)
    assert tr.capture_time == pytest.approx(decentralized_game_length(big), abs=3.0)


def test_trace_roundtrips(tmp_path, equilateral):
    tr = run_game(equilateral, EStrategyEvader(), DStrategy(), SimParams(dt=1e-2))
    write_trace_json(tr, tmp_path / "t.json")
    back = read_trace_json(tmp_path / "t.json")
    assert back.samples.tobytes() == tr.samples.tobytes()
    assert (back.captured, back.capture_time, back.capturing_pursuer) == (
        tr.captured, tr.capture_time, tr.capturing_pursuer)
    assert back.params == tr.params
    write_trace_csv(tr, tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == ",".join(TRACE_COLUMNS)
    assert read_trace_csv(tmp_path / "t.csv").tobytes() == tr.samples.tobytes()


def test_trace_schema_is_checked(equilateral):
    tr = run_game(equilateral, EStrategyEvader(), DStrategy(), SimParams(dt=1e-2, max_time=0.05))
    d = trace_to_dict(tr)
    assert list(d) == ["schema_version", "columns", "params", "capture", "samples"]
    d["schema_version"] = 99
    with pytest.raises(ValueError):
        trace_from_dict(d)


def test_capture_inside_step_is_interpolated():
    # head-on approach: gap 1, closing speed 2, radius 0.1 -> contact at 0.45
    from tripursuit.geometry import PlayerSet

    class East:
        def reset(self, state, params):
            pass

        def __call__(self, state):
            return np.array([1.0, 0.0])

    players = PlayerSet([0.0, 0.0], [[1.0, 0.0], [-5.0, 5.0], [-5.0, -5.0]])
    tr = run_game(players, East(), DStrategy(), SimParams(dt=0.2, capture_radius=0.1, max_time=5))
    assert tr.capturing_pursuer == 0
    assert tr.capture_time == pytest.approx(0.45, abs=1e-12)
    assert math.isclose(tr.times[-1], 0.45)
