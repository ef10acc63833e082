import math

import numpy as np
import pytest

from levyheat.quadrature import (
    accelerated_panel_tail,
    adaptive_quad,
    cos_weighted_quad,
    cos_weighted_tail,
    gauss_panel_sums,
    j0_zero,
    wynn_epsilon_limit,
)

# frozen references (40-digit arithmetic)
COS_EXP_TAIL = -0.11657079453925115  # int_1^inf cos(2.5 r) e^{-r} dr
COS_POWER_TAIL = 0.04175881678201276  # int_2^inf cos(3 r) r^{-2} dr
COS_EXP_TAIL2 = 0.039246743402603289  # int_2^inf e^{-0.7 r} cos(3 r) dr


def test_endpoint_singularity():
    val, err = adaptive_quad(lambda r: r**-0.5, 0.0, 1.0)
    assert abs(val - 2.0) < 1e-12
    assert err < 1e-10


def test_breakpoint_discontinuity():
    def step(r):
        return 3.0 if r < 0.3 else 1.0

    val, err = adaptive_quad(step, 0.0, 1.0, breakpoints=[0.3])
    assert abs(val - (0.9 + 0.7)) < 1e-12, f"step integral {val}"


def test_breakpoints_outside_interval_ignored():
    val, _ = adaptive_quad(lambda r: r, 0.0, 1.0, breakpoints=[-1.0, 0.5, 7.0])
    assert abs(val - 0.5) < 1e-13


def test_degenerate_interval():
    assert adaptive_quad(lambda r: r, 1.0, 1.0) == (0.0, 0.0)
    assert adaptive_quad(lambda r: r, 2.0, 1.0) == (0.0, 0.0)


def test_cos_weighted_finite():
    # int_0^pi r cos(5 r) dr = (cos(5 pi) - 1)/25 = -2/25
    val, err = cos_weighted_quad(lambda r: r, 0.0, math.pi, 5.0)
    assert abs(val - (-0.08)) < 1e-12, f"QAWO value {val}"


def test_cos_weighted_tail_exponential():
    val, err = cos_weighted_tail(lambda r: math.exp(-r), 1.0, 2.5)
    assert abs(val - COS_EXP_TAIL) < 1e-12
    val2, _ = cos_weighted_tail(lambda r: math.exp(-0.7 * r), 2.0, 3.0)
    assert abs(val2 - COS_EXP_TAIL2) < 1e-12


def test_cos_weighted_tail_power():
    val, err = cos_weighted_tail(lambda r: r**-2.0, 2.0, 3.0)
    assert abs(val - COS_POWER_TAIL) < 1e-10, f"QAWF {val} vs {COS_POWER_TAIL}"


def test_gauss_panels_sum_to_integral():
    edges = np.linspace(0.0, math.pi, 11)
    terms = gauss_panel_sums(np.sin, edges)
    assert terms.shape == (10,)
    assert abs(terms.sum() - 2.0) < 1e-13


def test_gauss_panels_polynomial_exactness():
    # 16-point Gauss is exact through degree 31
    edges = np.array([0.0, 0.7, 1.0])
    terms = gauss_panel_sums(lambda x: 7 * x**6, edges)
    assert abs(terms.sum() - 1.0) < 1e-14


def test_wynn_geometric():
    # partial sums of sum 3 * (1/4)^k -> 4
    k = np.arange(20)
    partial = np.cumsum(3.0 * 0.25**k)
    val, err = wynn_epsilon_limit(partial[:8])
    assert abs(val - 4.0) < 1e-12
    assert err < 1e-10


def test_wynn_alternating_log2():
    partial = np.cumsum([(-1.0) ** k / (k + 1) for k in range(18)])
    val, err = wynn_epsilon_limit(partial)
    assert abs(val - math.log(2.0)) < 1e-12


def test_accelerated_panel_tail_matches_qawf():
    # same oscillatory tail integral two ways
    edges = np.pi * (np.arange(40) + 0.5) / 3.0
    edges = np.concatenate([[2.0], edges[edges > 2.0]])
    val, err = accelerated_panel_tail(lambda r: np.cos(3.0 * r) * r**-2.0, edges)
    assert abs(val - COS_POWER_TAIL) < 1e-11, f"panel tail {val}"


J0_ZEROS = [
    (1, 2.404825557695773),
    (2, 5.520078110286311),
    (3, 8.653727912911013),
    (10, 30.634606468431975),
    (100, 313.37426607752786),
]


@pytest.mark.parametrize("k,true", J0_ZEROS)
def test_j0_zero_mcmahon(k, true):
    approx = j0_zero(k)
    # panel edges only need to straddle the true zeros
    assert abs(approx - true) < 2e-3 / k, f"zero {k}: {approx} vs {true}"


def test_j0_zero_vectorized():
    ks = np.arange(1, 50)
    zs = j0_zero(ks)
    assert (np.diff(zs) > 3.1).all() and (np.diff(zs) < 3.2).all()
