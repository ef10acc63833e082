import math

import numpy as np
import pytest
import scipy.special

from levyheat.errors import DomainError
from levyheat.kernels import (
    Borderline,
    Bounded,
    CompactSupport,
    ExponentialTail,
    FractionalPower,
    LevyKernel,
    Oscillating,
    PowerTail,
    ProfileFn,
)
from levyheat.symbol import (
    PurePower,
    SymbolTable,
    build_symbol_table,
    check_global_bounds,
    check_lower_psi,
    check_small_xi_power,
    check_upper_psi,
    lattice_symbol_table,
    log_grid,
    symbol_quadrature,
)

PURE1 = LevyKernel(1, FractionalPower(1.0), PowerTail(1.0))
PURE2 = LevyKernel(2, FractionalPower(1.0), PowerTail(1.0))
BORDER_PT2 = LevyKernel(1, Borderline(), PowerTail(2.0))

# frozen multiplier references (exact special-function evaluations,
# 40-digit arithmetic): m = 2(ln xi + gamma - Ci(xi) + 1/2 - Re E3(-i xi))
BORDER_PT2_REF = [
    (0.7, 0.87691001525534067),
    (13.0, 7.2623892705723661),
]
# 2 pi int_0^5 (1 - J0(t))/t dt
BORDER_COMPACT_2D_AT_5 = 9.6782870205787045


@pytest.mark.parametrize("xi", [1e-3, 0.04, 1.0, 17.0, 1e4])
def test_pure_power_symbol_is_pi_xi(xi):
    m = symbol_quadrature(PURE1, xi)
    assert abs(m - math.pi * xi) < 1e-9 * math.pi * xi, f"m({xi}) = {m}"


def test_pure_power_symbol_2d():
    for xi in (1e-2, 1.0, 3e3):
        m = symbol_quadrature(PURE2, xi)
        assert abs(m - 2.0 * math.pi * xi) < 1e-9 * xi


def test_symbol_even_and_zero():
    assert symbol_quadrature(PURE1, 0.0) == 0.0
    assert symbol_quadrature(PURE1, -2.0) == symbol_quadrature(PURE1, 2.0)


@pytest.mark.parametrize("xi,ref", BORDER_PT2_REF)
def test_borderline_power_tail_reference(xi, ref):
    m = symbol_quadrature(BORDER_PT2, xi)
    assert abs(m - ref) < 1e-8 * ref, f"m({xi}) = {m!r} want {ref!r}"


def test_bounded_compact_closed_form_1d():
    c0 = 0.7
    k = LevyKernel(1, Bounded(c0), CompactSupport())
    for xi in (0.003, 0.9, 4.49, 250.0):
        ref = 2.0 * c0 * (1.0 - math.sin(xi) / xi)
        m = symbol_quadrature(k, xi)
        assert abs(m - ref) < 1e-8 * ref + 1e-12


def test_bounded_compact_closed_form_2d():
    c0 = 1.3
    k = LevyKernel(2, Bounded(c0), CompactSupport())
    for xi in (0.02, 2.0, 77.0):
        ref = 2.0 * math.pi * c0 * (0.5 - scipy.special.j1(xi) / xi)
        m = symbol_quadrature(k, xi)
        assert abs(m - ref) < 1e-8 * ref + 1e-12


def test_borderline_compact_2d_reference():
    k = LevyKernel(2, Borderline(), CompactSupport())
    m = symbol_quadrature(k, 5.0)
    assert abs(m - BORDER_COMPACT_2D_AT_5) < 1e-8 * BORDER_COMPACT_2D_AT_5


def test_integrable_kernel_bounded_by_twice_l1():
    # for J in L^1 the multiplier never exceeds 2 ||J||_1
    c0 = 0.7
    k = LevyKernel(1, Bounded(c0), CompactSupport())
    l1 = 2.0 * c0
    peak = symbol_quadrature(k, 4.4934)  # near the max of 1 - sin(x)/x
    assert peak <= 2.0 * l1 + 1e-10
    assert peak > l1  # and it genuinely exceeds ||J||_1 itself


def test_oscillating_symbol_log_bounded():
    # bands contribute additively: m grows like log(xi), not a power
    k = LevyKernel(1, Oscillating(1.0), ExponentialTail(0.5))
    m4 = symbol_quadrature(k, 1e4)
    m6 = symbol_quadrature(k, 1e6)
    assert m6 < 1.8 * m4, f"m(1e6)/m(1e4) = {m6 / m4}"
    assert m6 > m4  # still increasing


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def test_build_table_pure_power_closed_form():
    tab = build_symbol_table(PURE1)
    assert isinstance(tab.closed_form, PurePower)
    assert tab.closed_form.alpha == 1.0
    assert abs(tab.closed_form.coefficient - math.pi) < 1e-8
    xi = np.array([0.0, 0.5, 3.0, 1e5])
    out = tab.evaluate(xi)
    assert out[0] == 0.0
    assert np.allclose(out[1:], tab.closed_form.coefficient * xi[1:], rtol=1e-14)


def test_table_interpolation_accuracy():
    tab = build_symbol_table(BORDER_PT2, log_grid(1e-2, 1e2, 64))
    mid = np.sqrt(tab.radial_grid[:-1] * tab.radial_grid[1:])[::11]
    exact = np.array([symbol_quadrature(BORDER_PT2, x) for x in mid])
    got = tab.evaluate(mid)
    rel = np.max(np.abs(got - exact) / exact)
    assert rel < 5e-4, f"midpoint interpolation rel err {rel:.2e}"


def test_table_nodes_exact_and_scalar():
    tab = build_symbol_table(BORDER_PT2, log_grid(0.1, 10.0, 16))
    assert np.allclose(tab.evaluate(tab.radial_grid), tab.values, rtol=1e-12)
    assert isinstance(tab.evaluate(1.0), float) or np.ndim(tab.evaluate(1.0)) == 0
    assert tab.evaluate(0.0) == 0.0


def test_table_power_law_extrapolation():
    tab = build_symbol_table(BORDER_PT2, log_grid(0.1, 10.0, 32))
    # beyond the grid the table continues with the local log-log slope
    inside_hi = tab.evaluate(10.0)
    beyond = tab.evaluate(20.0)
    assert beyond > inside_hi
    lo = tab.evaluate(0.05)
    assert 0.0 < lo < tab.evaluate(0.1)


def test_table_rejects_bad_data():
    g = np.array([1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        SymbolTable("k", 1, g, np.array([1.0, -1.0, 2.0]))
    with pytest.raises(DomainError):
        SymbolTable("k", 1, g[::-1].copy(), np.ones(3))
    with pytest.raises(DomainError):
        SymbolTable("k", 1, g, np.ones(4))


def test_table_quad_tol_recorded():
    tab = build_symbol_table(BORDER_PT2, log_grid(0.5, 2.0, 8), rtol=1e-8)
    assert 0.0 < tab.quad_tol < 2e-7


def test_lattice_table_filters_and_sorts():
    tab = lattice_symbol_table(BORDER_PT2, [3.0, 1.0, 0.0, 1.0, 2.0])
    assert np.allclose(tab.radial_grid, [1.0, 2.0, 3.0])
    assert (tab.values > 0).all()


def test_parallel_table_matches_serial(monkeypatch):
    grid = log_grid(0.5, 5.0, 10)
    serial = build_symbol_table(BORDER_PT2, grid)
    monkeypatch.setenv("LEVYHEAT_WORKERS", "2")
    parallel = build_symbol_table(BORDER_PT2, grid)
    assert np.array_equal(serial.values, parallel.values)


# ---------------------------------------------------------------------------
# bound checkers
# ---------------------------------------------------------------------------


def test_global_bounds_pure_power():
    tab = build_symbol_table(PURE1)
    rep = check_global_bounds(tab)
    assert rep.passed
    # for m = pi|xi| both envelope constants collapse to pi
    assert abs(rep.c1 - math.pi) < 1e-6
    assert abs(rep.c2 - math.pi) < 1e-6


def test_small_xi_power_pure_power():
    tab = build_symbol_table(PURE1)
    rep = check_small_xi_power(tab, alpha=1.0)
    assert rep.passed and rep.gamma == 1.0
    assert abs(rep.c_emp - math.pi) < 1e-6


def test_small_xi_gamma_capped():
    tab = build_symbol_table(PURE1)
    assert check_small_xi_power(tab, alpha=3.7).gamma == 2.0


def test_upper_psi_borderline():
    tab = build_symbol_table(BORDER_PT2, log_grid(1e-2, 1e3, 16))
    rep = check_upper_psi(BORDER_PT2, tab)
    assert rep.passed
    # m ~ 2 log(rho) while psi1 + psi2 ~ log(rho) + 1/2: ratio settles near 2
    assert rep.max_ratio < 4.0
    assert 1.0 < rep.median_ratio < 3.0


def test_lower_psi_borderline():
    tab = build_symbol_table(BORDER_PT2, log_grid(1e-2, 1e3, 16))
    rep = check_lower_psi(tab, ProfileFn.constant(1.0))
    assert rep.passed and rep.hypothesis_certified
    assert rep.min_ratio > 0.5
    uncert = check_lower_psi(tab, ProfileFn.constant(1.0), certified=False)
    assert not uncert.hypothesis_certified


def test_checkers_need_matching_range():
    tab = build_symbol_table(BORDER_PT2, log_grid(2.0, 50.0, 8))
    with pytest.raises(DomainError):
        check_small_xi_power(tab, 1.0)
    tab_lo = build_symbol_table(BORDER_PT2, log_grid(0.01, 0.5, 8))
    with pytest.raises(DomainError):
        check_upper_psi(BORDER_PT2, tab_lo)
