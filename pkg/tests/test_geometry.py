import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import E_345, TRI_345, cells
from tripursuit.errors import DegenerateCell, EvaderOutsideCell, NotATriangle
from tripursuit.geometry import (
    PlayerSet,
    anchor_points,
    hull_margin,
    is_admissible,
    pursuers_from_cell,
    reflect_point,
    voronoi_cell,
)


def _same_points(a, b, tol):
    d = np.linalg.norm(np.asarray(a)[:, None, :] - np.asarray(b)[None, :, :], axis=2)
    return d.min(axis=1).max() <= tol and d.min(axis=0).max() <= tol


# ---------------------------------------------------------------- fixtures


def test_equilateral_cell():
    players = PlayerSet([0.5, 0.28868], [[0.5, -0.28868], [1.0, 0.57735], [0.0, 0.57735]])
    cell = voronoi_cell(players)
    assert _same_points(cell.vertices, [[0, 0], [1, 0], [0.5, 0.86603]], 1e-4)
    assert cell.l == pytest.approx(1, abs=1e-4)
    assert cell.m == pytest.approx(1, abs=1e-4)
    assert cell.s == pytest.approx(1, abs=1e-4)


def test_345_cell_labels():
    players = PlayerSet(E_345, [[3, -0.5], [5, 0.5], [1.32, 2.74]])
    cell = voronoi_cell(players)
    np.testing.assert_allclose(cell.V1, [0, 0], atol=1e-12)
    np.testing.assert_allclose(cell.V2, [4, 3], atol=1e-12)
    np.testing.assert_allclose(cell.V3, [4, 0], atol=1e-12)
    assert (cell.l, cell.m, cell.s) == pytest.approx((5, 4, 3), abs=1e-12)


def test_345_pursuers_from_cell():
    players = pursuers_from_cell(TRI_345, E_345)
    assert _same_points(players.pursuers, [[3, -0.5], [5, 0.5], [1.32, 2.74]], 1e-12)


def test_345_assignment_is_farthest_pursuer():
    cell = voronoi_cell(pursuers_from_cell(TRI_345, E_345))
    # V1 = (0, 0) is opposite the edge x = 4, whose mirror image of E is (5, 0.5)
    np.testing.assert_allclose(cell.pursuers[0], [5, 0.5], atol=1e-12)
    np.testing.assert_allclose(cell.pursuers[1], [3, -0.5], atol=1e-12)
    np.testing.assert_allclose(cell.pursuers[2], [1.32, 2.74], atol=1e-12)


def test_345_anchor_points(game345):
    a = anchor_points(voronoi_cell(game345))
    np.testing.assert_allclose(a.short_edge_point, [4, 1.25], atol=1e-12)
    np.testing.assert_allclose(a.medium_edge_point, [7 / 3, 0], atol=1e-12)


def test_equilateral_anchor_lengths_sum_to_side():
    T = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    for E in ([0.5, 0.2], [0.3, 0.1], [0.6, 0.5]):
        cell = voronoi_cell(pursuers_from_cell(T, E))
        a = anchor_points(cell)
        total = np.linalg.norm(a.short_edge_point - a.medium_edge_point) + np.linalg.norm(
            a.medium_edge_point - cell.V1)
        assert total == pytest.approx(1.0, abs=1e-12)


def test_anchor_points_approach_edge_endpoints():
    cell0 = voronoi_cell(pursuers_from_cell(TRI_345, E_345))
    V1, V2 = cell0.V1, cell0.V2
    inward = np.array([0.6, -0.8])  # unit normal into the cell from V1V2
    mid = 0.5 * (V1 + V2)
    for h in (1e-3, 1e-6):
        cell = voronoi_cell(pursuers_from_cell(TRI_345, mid + h * inward))
        a = anchor_points(cell)
        assert np.linalg.norm(a.short_edge_point - V2) < 10 * h
        assert np.linalg.norm(a.medium_edge_point - V1) < 10 * h


# ---------------------------------------------------------------- rejection


def test_evader_on_hull_boundary_is_not_a_triangle():
    players = PlayerSet([0.5, 0.0], [[0, 0], [1, 0], [0.5, 1]])
    with pytest.raises(NotATriangle):
        voronoi_cell(players)


def test_evader_at_vertex_is_outside_cell():
    with pytest.raises(EvaderOutsideCell):
        pursuers_from_cell(TRI_345, TRI_345[1])


def test_anchor_points_reject_outside_evader(game345):
    with pytest.raises(DegenerateCell):
        anchor_points(voronoi_cell(game345), [10.0, 10.0])


def test_admissibility_examples(equilateral):
    assert is_admissible(equilateral)
    assert not is_admissible(PlayerSet([3, 0], [[0, 0], [1, 0], [0, 1]]))
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    diam = math.sqrt(2)
    near_edge = PlayerSet([0.5, 1e-15 * diam], tri)
    assert 0 < hull_margin(near_edge) < 1e-12
    assert not is_admissible(near_edge)


def test_coincident_points_are_inadmissible():
    assert not is_admissible(PlayerSet([0, 0], [[0, 0], [1, 0], [0, 1]]))
    assert not is_admissible(PlayerSet([0.2, 0.2], [[0, 0], [0, 0], [0, 1]]))


# ---------------------------------------------------------------- properties


@settings(max_examples=200, deadline=None)
@given(cells())
def test_roundtrip(pair):
    T, E = pair
    cell = voronoi_cell(pursuers_from_cell(T, E))
    scale = max(1.0, np.abs(T).max())
    assert _same_points(cell.vertices, T, 1e-9 * scale)


@settings(max_examples=200, deadline=None)
@given(cells())
def test_labelling_and_farthest_pursuer(pair):
    T, E = pair
    cell = voronoi_cell(pursuers_from_cell(T, E))
    assert cell.l >= cell.m - 1e-9 and cell.m >= cell.s - 1e-9
    assert cell.phi1 + cell.phi2 + cell.phi3 == pytest.approx(math.pi)
    for i in range(3):
        V = cell.vertices[i]
        d = np.linalg.norm(cell.pursuers - V, axis=1)
        assert d[i] > np.linalg.norm(V - cell.evader)
        assert d[i] == pytest.approx(d.max())


@settings(max_examples=200, deadline=None)
@given(cells())
def test_vertices_equidistant_from_evader_and_two_pursuers(pair):
    T, E = pair
    cell = voronoi_cell(pursuers_from_cell(T, E))
    for i in range(3):
        V = cell.vertices[i]
        de = np.linalg.norm(V - cell.evader)
        for j in range(3):
            if j != i:
                assert np.linalg.norm(V - cell.pursuers[j]) == pytest.approx(de, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(cells(), st.floats(0.1, 10.0), st.floats(-math.pi, math.pi),
       st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
def test_similarity_equivariance(pair, k, angle, shift):
    T, E = pair
    players = pursuers_from_cell(T, E)
    base = voronoi_cell(players)
    moved = voronoi_cell(players.scaled(k).transformed(angle, shift))
    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s], [s, c]])
    expect = (k * base.vertices) @ R.T + np.asarray(shift)
    tol = 1e-8 * max(1.0, k * np.abs(T).max())
    assert _same_points(moved.vertices, expect, tol)
    assert (moved.l, moved.m, moved.s) == pytest.approx((k * base.l, k * base.m, k * base.s),
                                                        rel=1e-9)


def test_reflection_is_an_involution():
    a, b = np.array([0.0, 1.0]), np.array([2.0, 3.0])
    p = np.array([0.3, -0.7])
    np.testing.assert_allclose(reflect_point(reflect_point(p, a, b), a, b), p, atol=1e-15)
