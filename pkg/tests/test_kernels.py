import math

import numpy as np
import pytest

from levyheat.errors import AdmissibilityError, DomainError
from levyheat.kernels import (
    Borderline,
    Bounded,
    CompactSupport,
    ExponentialTail,
    FractionalPower,
    LevyKernel,
    LogPerturbed,
    Oscillating,
    PowerTail,
    ProfileFn,
    ell,
    eval_kernel,
    levy_moment,
    psi1,
    psi2,
    tail_exponent,
)


def kernel(near, tail, dim=1):
    return LevyKernel(dimension=dim, near=near, tail=tail)


# ---------------------------------------------------------------------------
# pointwise kernel values
# ---------------------------------------------------------------------------


def test_fractional_power_pointwise():
    k = kernel(FractionalPower(0.5), CompactSupport())
    assert abs(eval_kernel(k, 0.5) - 2.0 * math.sqrt(2.0)) < 1e-14


def test_borderline_pointwise_2d():
    k = kernel(Borderline(), CompactSupport(), dim=2)
    assert abs(eval_kernel(k, 0.5) - 4.0) < 1e-14


def test_eval_kernel_vectorized_and_signed():
    k = kernel(FractionalPower(1.0), PowerTail(1.0))
    z = np.array([-0.5, 0.5, 2.0, -2.0])
    vals = eval_kernel(k, z)
    assert np.allclose(vals[0], vals[1]) and np.allclose(vals[2], vals[3])
    # pure power continues across the matching radius
    assert np.allclose(vals, np.abs(z) ** -2.0)


def test_eval_kernel_rejects_origin():
    k = kernel(Borderline(), CompactSupport())
    with pytest.raises(DomainError):
        eval_kernel(k, 0.0)


def test_compact_support_vanishes_beyond_one():
    k = kernel(Bounded(1.0), CompactSupport())
    assert eval_kernel(k, 1.5) == 0.0
    assert eval_kernel(k, 1.0) == 1.0


def test_exponential_tail_continuity():
    for dim in (1, 2):
        k = kernel(FractionalPower(1.2), ExponentialTail(1.5), dim=dim)
        left = eval_kernel(k, 1.0 - 1e-12)
        right = eval_kernel(k, 1.0 + 1e-12)
        assert abs(left - right) < 1e-9 * left, f"dim {dim}: {left} vs {right}"


def test_exponential_matching_constant():
    k = kernel(FractionalPower(1.0), ExponentialTail(1.5))
    # ell(1) = 1 for the pure power profile, so the match is e^1.5
    assert abs(k.matching_constant - math.exp(1.5)) < 1e-13


# ---------------------------------------------------------------------------
# radial profile ell
# ---------------------------------------------------------------------------


def test_ell_constant_for_borderline():
    k = kernel(Borderline(), PowerTail(1.0), dim=2)
    r = np.geomspace(1e-6, 1.0, 50)
    assert np.allclose(ell(k, r), 1.0)


def test_ell_oscillating_band_value():
    k = kernel(Oscillating(1.0), CompactSupport())
    # inside the k=2 band (3/16, 1/4] the profile sits at 2^2 = 4
    assert abs(ell(k, 0.21875) - 4.0) < 1e-14
    assert abs(ell(k, 0.25) - 4.0) < 1e-14  # right band edge included
    assert abs(ell(k, 0.26) - 1.0) < 1e-14  # just outside


def test_ell_oscillating_band_invariants():
    osc = Oscillating(1.0)
    for lo, hi, val in osc.bands():
        assert 0.0 < lo < hi <= 0.5
        assert val > 2.0, f"band ({lo}, {hi}] has non-admissible height {val}"


def test_ell_rejects_bad_radius():
    k = kernel(Borderline(), CompactSupport())
    with pytest.raises(DomainError):
        ell(k, 0.0)
    with pytest.raises(DomainError):
        ell(k, 1.5)


# ---------------------------------------------------------------------------
# psi functionals
# ---------------------------------------------------------------------------


def test_psi1_borderline_log():
    k = kernel(Borderline(), CompactSupport())
    assert abs(psi1(k, 0.1) - math.log(10.0)) < 1e-13


def test_psi1_fractional_power():
    k = kernel(FractionalPower(0.5), CompactSupport())
    # (r^{-1/2} - 1)/(1/2) at r = 1/4
    assert abs(psi1(k, 0.25) - 2.0) < 1e-13


@pytest.mark.parametrize(
    "p,ref",
    [(0.5, 1.6346031931940222), (1.0, 1.1947055233182953)],
)
def test_psi1_log_perturbed(p, ref):
    k = kernel(LogPerturbed(p), CompactSupport())
    assert abs(psi1(k, 0.1) - ref) < 1e-10, f"psi1 logpert({p}) = {psi1(k, 0.1)}"


def test_psi1_oscillating_linear_growth():
    # along the odd band edges psi1 grows at most linearly in the band index
    k = kernel(Oscillating(1.0), CompactSupport())
    for idx in range(2, 16):
        b = 2.0**idx
        edge = 2.0**-idx * (1.0 - 1.0 / b)
        val = psi1(k, edge)
        assert val <= 3.0 * idx, f"psi1 at band {idx} edge = {val}"
        assert val >= math.log(1.0 / edge) - 1e-12


def test_psi2_borderline():
    k = kernel(Borderline(), CompactSupport())
    assert abs(psi2(k, 0.3) - 0.5) < 1e-13
    assert abs(psi2(k, 1.0) - 0.5) < 1e-13


def test_psi2_fractional_power_value():
    k = kernel(FractionalPower(1.25), CompactSupport())
    assert abs(psi2(k, 0.7) - 0.7**-1.25 / 0.75) < 1e-12


def test_psi2_rejects_supercritical_origin():
    k = kernel(FractionalPower(2.0), CompactSupport())
    with pytest.raises(AdmissibilityError) as info:
        psi2(k, 0.5)
    assert info.value.end == "origin"


def test_psi1_at_one_is_zero():
    for near in (Borderline(), FractionalPower(0.7), Bounded(2.0)):
        k = kernel(near, CompactSupport())
        assert psi1(k, 1.0) == 0.0


# ---------------------------------------------------------------------------
# levy moment and admissibility
# ---------------------------------------------------------------------------


def test_moment_pure_power_alpha_one():
    k = kernel(FractionalPower(1.0), PowerTail(1.0))
    assert abs(levy_moment(k) - 4.0) < 1e-8


def test_moment_bounded_compact_2d():
    k = kernel(Bounded(1.0 / math.pi), CompactSupport(), dim=2)
    assert abs(levy_moment(k) - 0.5) < 1e-10


def test_moment_oscillating_exponential():
    # band-sum + exponential tail in closed form: 5.11726190476...
    k = kernel(Oscillating(1.0), ExponentialTail(0.5))
    assert abs(levy_moment(k) - 5.1172619047619048) < 1e-7


def test_moment_log_perturbed_2d():
    # 2 pi e^2 Gamma(1/2, 2)/sqrt(2)
    k = kernel(LogPerturbed(0.5), CompactSupport(), dim=2)
    assert abs(levy_moment(k) - 2.6475409503602902) < 1e-7


@pytest.mark.parametrize("beta", [2.0, 2.7, 3.5])
def test_moment_diverges_at_origin(beta):
    k = kernel(FractionalPower(beta), CompactSupport())
    with pytest.raises(AdmissibilityError) as info:
        levy_moment(k)
    assert info.value.end == "origin"


def test_moment_near_critical_beta():
    # beta = 1.95 still converges; the series accelerator has to work
    k = kernel(FractionalPower(1.95), CompactSupport())
    ref = 2.0 * (1.0 / (2.0 - 1.95))  # 2 int_0^1 r^{1-beta} dr
    assert abs(levy_moment(k) - ref) / ref < 1e-6


def test_tail_exponent_capped_at_two():
    assert tail_exponent(kernel(Borderline(), PowerTail(3.0))) == 2.0
    assert tail_exponent(kernel(Borderline(), PowerTail(0.5))) == 0.5
    assert tail_exponent(kernel(Borderline(), CompactSupport())) == 2.0
    assert tail_exponent(kernel(Borderline(), ExponentialTail(1.0))) == 2.0


# ---------------------------------------------------------------------------
# constructor validation
# ---------------------------------------------------------------------------


def test_bad_parameters_rejected():
    with pytest.raises(DomainError):
        FractionalPower(0.0)
    with pytest.raises(DomainError):
        FractionalPower(-1.0)
    with pytest.raises(DomainError):
        PowerTail(0.0)
    with pytest.raises(DomainError):
        Bounded(-2.0)
    with pytest.raises(DomainError):
        ExponentialTail(0.0)
    with pytest.raises(DomainError):
        LogPerturbed(1.5)


def test_bad_dimension_rejected():
    with pytest.raises(DomainError):
        LevyKernel(dimension=3, near=Borderline(), tail=CompactSupport())


def test_profile_fn_helpers():
    const = ProfileFn.constant(2.0)
    assert const(0.5) == 2.0
    assert abs(const.psi1(0.1) - 2.0 * math.log(10.0)) < 1e-10
    pw = ProfileFn.power(1.0)
    assert abs(pw.psi1(0.5) - 1.0) < 1e-10  # int_r^1 s^{-2} ds = 1/r - 1
