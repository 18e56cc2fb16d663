"""Adaptive row quadrature: accuracy, determinism, refinement and the
node bookkeeping used by the Gram stage."""

import math

import numpy as np
import pytest

from qbrownian.errors import IntegrationError
from qbrownian.quadrature import (
    COARSE_ORDER,
    FINE_ORDER,
    adaptive_rows,
    composite_gl,
    panel_nodes,
    split_edges,
)


def _rows_poly(x):
    # rows with known integrals over [0, 1]: x^2 -> 1/3, e^x -> e - 1
    return np.vstack([x**2, np.exp(x)])


def test_known_integrals():
    res = adaptive_rows(_rows_poly, [0.0, 1.0], lambda v: np.full(2, 1e-12))
    assert res.values[0] == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert res.values[1] == pytest.approx(math.e - 1.0, rel=1e-14)
    assert np.all(res.errors <= 1e-12)


def test_refines_a_spike():
    # narrow Gaussian spike at 0.7: the initial single panel misses it badly
    def rows(x):
        return np.exp(-((x - 0.7) ** 2) / 2e-6)[None, :]

    exact = math.sqrt(2.0 * math.pi * 1e-6)  # erf tails negligible at 1e-12
    res = adaptive_rows(rows, [0.0, 1.0], lambda v: np.array([1e-13]))
    assert res.values[0] == pytest.approx(exact, rel=1e-10)
    assert res.n_panels > 8


def test_budget_tracks_accumulating_values():
    # relative budget: budget_fn sees the current row values
    def rows(x):
        return np.vstack([np.exp(-x)])

    res = adaptive_rows(
        rows, np.linspace(0.0, 30.0, 4),
        lambda v: 1e-10 * np.abs(v))
    assert res.values[0] == pytest.approx(1.0, rel=1e-10)


def test_deterministic_output():
    def rows(x):
        return np.vstack([np.sin(17.0 * x) ** 2, 1.0 / (1.0 + x**2)])

    a = adaptive_rows(rows, [0.0, 3.0], lambda v: np.full(2, 1e-11))
    b = adaptive_rows(rows, [0.0, 3.0], lambda v: np.full(2, 1e-11))
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.nodes, b.nodes)
    assert np.array_equal(a.edges, b.edges)
    assert a.n_evals == b.n_evals


def test_edges_are_sorted_and_nodes_match():
    def rows(x):
        return np.vstack([np.cos(40.0 * x)])

    res = adaptive_rows(rows, [0.0, 2.0, 5.0], lambda v: np.array([1e-12]))
    assert np.all(np.diff(res.edges) > 0)
    assert res.edges[0] == 0.0 and res.edges[-1] == 5.0
    assert res.nodes.size == res.n_panels * FINE_ORDER
    assert res.nodes_coarse.size == res.n_panels * COARSE_ORDER
    # node/weight arrays must reproduce the value by a plain dot product
    got = res.weights @ np.cos(40.0 * res.nodes)
    assert got == pytest.approx(res.values[0], rel=1e-12, abs=1e-15)
    # exact integral: sin(200)/40
    assert res.values[0] == pytest.approx(math.sin(200.0) / 40.0, abs=1e-12)


def test_max_panels_raises_with_diagnostics():
    def rows(x):
        return np.vstack([np.abs(x - math.pi / 6.0) ** (-0.5)])

    with pytest.raises(IntegrationError) as exc:
        adaptive_rows(rows, [0.0, 1.0], lambda v: np.array([1e-14]),
                      max_panels=32)
    assert exc.value.achieved is not None
    assert np.all(exc.value.achieved > np.asarray(exc.value.requested))


def test_max_panels_best_effort_mode():
    def rows(x):
        return np.vstack([np.abs(x - math.pi / 6.0) ** (-0.5)])

    res = adaptive_rows(rows, [0.0, 1.0], lambda v: np.array([1e-14]),
                        max_panels=32, raise_on_fail=False)
    assert res.n_panels <= 32
    assert res.errors[0] > 1e-14  # honest: the budget was not met


def test_split_edges():
    e = np.array([0.0, 1.0, 4.0])
    out = split_edges(e)
    assert np.array_equal(out, [0.0, 0.5, 1.0, 2.5, 4.0])


def test_panel_nodes_reproduce_composite_gl():
    edges = np.array([0.0, 0.3, 1.1, 2.0])
    n, w = panel_nodes(edges, 12)
    assert n.size == 3 * 12
    direct = w @ np.exp(n)
    ref = composite_gl(lambda x: np.exp(x)[None, :], edges, order=12)[0]
    assert direct == pytest.approx(ref, rel=1e-15)
    assert ref == pytest.approx(math.expm1(2.0), rel=1e-13)


def test_rejects_bad_edges():
    with pytest.raises(ValueError):
        adaptive_rows(_rows_poly, [0.0], lambda v: np.full(2, 1e-6))
    with pytest.raises(ValueError):
        adaptive_rows(_rows_poly, [0.0, 1.0, 0.5], lambda v: np.full(2, 1e-6))
