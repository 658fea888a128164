import math

import numpy as np
import pytest
from hypothesis import assume
from hypothesis import strategies as st

from tripursuit.experiments import equilateral_game
from tripursuit.geometry import PlayerSet, pursuers_from_cell

# filled in by test_acceptance, printed after the run
ACCEPTANCE_LINES: dict = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[criterion] = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion:2d}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


TRI_345 = np.array([[0.0, 0.0], [4.0, 0.0], [4.0, 3.0]])
E_345 = np.array([3.0, 0.5])


@pytest.fixture
def equilateral() -> PlayerSet:
    return equilateral_game(1.0)


@pytest.fixture
def game345() -> PlayerSet:
    return pursuers_from_cell(TRI_345, E_345)


def _angles(T):
    out = []
    for i in range(3):
        u, v = T[(i + 1) % 3] - T[i], T[(i + 2) % 3] - T[i]
        c = float(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))
        out.append(math.acos(max(-1.0, min(1.0, c))))
    return out


coord = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)


@st.composite
def cells(draw, min_angle_deg: float = 5.0, min_weight: float = 0.02):
    """Well-shaped (triangle, evader) pairs."""
    T = np.array([[draw(coord), draw(coord)] for _ in range(3)])
    side = min(np.linalg.norm(T[i] - T[j]) for i, j in ((0, 1), (0, 2), (1, 2)))
    assume(side > 0.1)
    assume(min(_angles(T)) > math.radians(min_angle_deg))
    w = np.array([draw(st.floats(min_weight, 1.0)) for _ in range(3)])
    w = w / w.sum()
    assume(w.min() >= min_weight / 3)
    return T, w @ T


@st.composite
def games(draw, **kw):
    T, E = draw(cells(**kw))
    return pursuers_from_cell(T, E)
