"""The Fourier multiplier of a jump kernel, by radial quadrature.

For a radial Levy kernel the multiplier

    m(xi) = int (1 - cos(z . xi)) J(z) dz

reduces to a half-line integral: in one dimension

    m(xi) = 2 int_0^inf (1 - cos(r xi)) J(r) dr,

in two dimensions

    m(xi) = 2 pi int_0^inf (1 - B0(r xi)) J(r) r dr

with B0 the order-zero Bessel function.  The engine splits the radial
line at the origin singularity, at the profile breakpoints and at the
near/tail matching radius, evaluates the non-oscillatory parts by
closed form or adaptive Gauss-Kronrod quadrature, and handles the
oscillatory remainders with cosine-weighted rules (QAWO/QAWF) in one
dimension and zero-to-zero Bessel panels with series acceleration in
two.

Tables of multiplier values on a logarithmic grid feed the spectral
propagators through monotone log-log interpolation; pure power kernels
carry a closed-form tag instead and bypass interpolation entirely.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .bessel import j0, one_minus_j0
from .errors import DomainError, QuadratureError
from .kernels import CompactSupport, FractionalPower, LevyKernel, PowerTail, ProfileFn
from .kernels import psi1 as kernel_psi1
from .kernels import psi2 as kernel_psi2
from .quadrature import (
    accelerated_panel_tail,
    adaptive_quad,
    cos_weighted_quad,
    cos_weighted_tail,
    gauss_panel_sums,
    j0_zero,
)

_FIRST_J0_ZERO = 2.404825557695773


def log_grid(lo=1e-3, hi=1e4, per_decade=64):
    """Logarithmically spaced radial frequency grid."""
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < lo < hi, got ({lo}, {hi})")
    count = int(round(per_decade * math.log10(hi / lo))) + 1
    return np.geomspace(lo, hi, count)


# ---------------------------------------------------------------------------
# quadrature engine
# ---------------------------------------------------------------------------


def _near_j_scalar(kernel):
    near, dim = kernel.near, kernel.dimension
    return lambda r: near.j_scalar(r, dim)

def _tail_j_scalar(kernel):
    tail, dim, match = kernel.tail, kernel.dimension, kernel.matching_constant
    return lambda r: tail.j_scalar(r, dim, match)


def _symbol_1d(kernel, xi, rtol):
    near = kernel.near
    tail = kernel.tail
    match = kernel.matching_constant
    bp = near.breakpoints()
    jn = _near_j_scalar(kernel)
    jt = _tail_j_scalar(kernel)
    total = 0.0
    err = 0.0

    # near part on (0, 1]: direct up to half an oscillation, then split
    # the plain and cosine-weighted contributions
    a = min(1.0, math.pi / xi)
    v, e = adaptive_quad(
        lambda r: 2.0 * math.sin(0.5 * xi * r) ** 2 * jn(r), 0.0, a, breakpoints=bp, rtol=rtol
    )
    total += v
    err += e
    if a < 1.0:
        edges = [a, *(p for p in bp if a < p < 1.0), 1.0]
        for u, w in zip(edges[:-1], edges[1:]):
            total += near.int_symbol_measure(u, w, 1)
            v, e = cos_weighted_quad(jn, u, w, xi, rtol=rtol)
            total -= v
            err += e

    # tail part on (1, inf)
    if not isinstance(tail, CompactSupport):
        big = max(1.0, math.pi / xi)
        if big > 1.0:
            v, e = adaptive_quad(
                lambda r: 2.0 * math.sin(0.5 * xi * r) ** 2 * jt(r), 1.0, big, rtol=rtol
            )
            total += v
            err += e
        total += tail.int_measure(big, 1, match)
        closed = tail.cos_transform_tail(big, xi, 1, match)
        if closed is None:
            v, e = cos_weighted_tail(jt, big, xi)
            if e > 100.0 * rtol * max(abs(v), 1e-6):
                # QAWF's estimate can be pessimistic for particular
                # omega / lower-limit combinations; redo with explicit
                # zero-to-zero panels and series acceleration.
                k0 = int(math.ceil(xi * big / math.pi - 0.5))
                edges = (np.arange(k0, k0 + 61) + 0.5) * math.pi / xi
                edges = np.concatenate([[big], edges[edges > big]])
                v, e = accelerated_panel_tail(
                    lambda r: np.cos(xi * r) * jt(r), edges
                )
            total -= v
            err += e
        else:
            total -= closed

    return 2.0 * total, 2.0 * err


def _j0_panel_edges(lo, hi, xi, breakpoints=()):
    """Panel edges straddling the zeros of r -> B0(r xi) inside [lo, hi]."""
    k_lo = max(1, int(math.ceil(xi * lo / math.pi - 0.25)))
    k_hi = max(k_lo, int(math.ceil(xi * hi / math.pi + 1.0)))
    zeros = j0_zero(np.arange(k_lo, k_hi + 1)) / xi
    zeros = zeros[(zeros > lo) & (zeros < hi)]
    inner = np.asarray([p for p in breakpoints if lo < p < hi])
    edges = np.union1d(np.union1d(zeros, inner), [lo, hi])
    return edges


def _symbol_2d(kernel, xi, rtol):
    near = kernel.near
    tail = kernel.tail
    match = kernel.matching_constant
    dim = 2
    bp = near.breakpoints()
    total = 0.0
    err = 0.0

    jn = _near_j_scalar(kernel)

    def near_direct(r):
        return one_minus_j0(xi * r) * jn(r) * r

    a = min(1.0, _FIRST_J0_ZERO / xi)
    v, e = adaptive_quad(near_direct, 0.0, a, breakpoints=bp, rtol=rtol)
    total += v
    err += e
    if a < 1.0:
        edges = [a, *(p for p in bp if a < p < 1.0), 1.0]
        for u, w in zip(edges[:-1], edges[1:]):
            total += near.int_symbol_measure(u, w, dim)
        panel_edges = _j0_panel_edges(a, 1.0, xi, bp)
        osc = lambda r: j0(xi * r) * near.j(r, dim) * r
        terms = gauss_panel_sums(osc, panel_edges)
        total -= float(terms.sum())
        err += 1e-15 * float(np.abs(terms).sum())

    if not isinstance(tail, CompactSupport):
        big = max(1.0, _FIRST_J0_ZERO / xi)
        jt = _tail_j_scalar(kernel)
        if big > 1.0:
            v, e = adaptive_quad(
                lambda r: one_minus_j0(xi * r) * jt(r) * r,
                1.0,
                big,
                rtol=rtol,
            )
            total += v
            err += e
        total += tail.int_measure(big, dim, match)
        # oscillatory Bessel tail: zero-to-zero panels, epsilon-accelerated
        k0 = max(1, int(math.ceil(xi * big / math.pi - 0.25)))
        edges = j0_zero(np.arange(k0, k0 + 61)) / xi
        edges = np.concatenate([[big], edges[edges > big]])
        osc_tail = lambda r: j0(xi * r) * tail.j(r, dim, match) * r
        v, e = accelerated_panel_tail(osc_tail, edges)
        total -= v
        err += e

    return 2.0 * math.pi * total, 2.0 * math.pi * err


def _symbol_value_err(kernel, xi, rtol):
    """(value, error estimate) at scalar xi > 0, no tolerance policing.

    Components are driven at rtol / 10 because the summed QUADPACK
    error estimates are conservative; the returned estimate stays
    honest.
    """
    if kernel.dimension == 1:
        return _symbol_1d(kernel, xi, rtol / 10.0)
    return _symbol_2d(kernel, xi, rtol / 10.0)


def symbol_quadrature(kernel: LevyKernel, xi, *, rtol=1e-8):
    """Multiplier value m(xi) by radial quadrature (scalar xi).

    Raises QuadratureError carrying the achieved relative tolerance if
    the error estimate is materially worse than ``rtol`` (with a small
    absolute floor for vanishing values near xi = 0).
    """
    xi = abs(float(xi))
    if xi == 0.0:
        return 0.0
    val, err = _symbol_value_err(kernel, xi, rtol)
    if err > max(20.0 * rtol * abs(val), 1e-12):
        raise QuadratureError(
            f"multiplier quadrature at xi={xi:g} achieved only "
            f"{err / max(abs(val), 1e-300):.2e} relative",
            achieved_tol=err / max(abs(val), 1e-300),
        )
    return val


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PurePower:
    """Closed-form tag: m(xi) = coefficient * xi^alpha."""

    alpha: float
    coefficient: float


@dataclass(frozen=True)
class SymbolTable:
    """Multiplier values on a radial frequency grid.

    ``closed_form`` short-circuits interpolation for pure power
    kernels; ``quad_tol`` is the worst achieved relative quadrature
    tolerance across the grid.
    """

    kernel_id: str
    dimension: int
    radial_grid: np.ndarray
    values: np.ndarray
    closed_form: PurePower | None = None
    quad_tol: float = 0.0

    def __post_init__(self):
        grid = np.asarray(self.radial_grid, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if grid.shape != vals.shape:
            raise DomainError("grid and values must have matching shapes")
        if grid.size and ((grid <= 0).any() or (np.diff(grid) <= 0).any()):
            raise DomainError("radial grid must be positive and strictly increasing")
        if not np.isfinite(vals).all() or (vals < 0).any():
            raise DomainError("multiplier values must be finite and nonnegative")
        object.__setattr__(self, "radial_grid", grid)
        object.__setattr__(self, "values", vals)

    @cached_property
    def _loglog(self):
        return PchipInterpolator(
            np.log(self.radial_grid), np.log(np.maximum(self.values, 1e-300)), extrapolate=False
        )

    def evaluate(self, rho):
        """Interpolated (or closed-form) multiplier at radial frequency rho.

        rho = 0 maps to 0 exactly; outside the tabulated range the
        log-log edge slopes continue the table as local power laws.
        """
        rho = np.asarray(rho, dtype=float)
        scalar = rho.ndim == 0
        rho = np.atleast_1d(np.abs(rho))
        out = np.zeros_like(rho)
        pos = rho > 0
        if self.closed_form is not None:
            cf = self.closed_form
            out[pos] = cf.coefficient * rho[pos] ** cf.alpha
            return out[0] if scalar else out
        if self.radial_grid.size < 2:
            raise DomainError("table too small to interpolate and no closed form")
        g, v = self.radial_grid, self.values
        lo, hi = g[0], g[-1]
        inside = pos & (rho >= lo) & (rho <= hi)
        out[inside] = np.exp(self._loglog(np.log(rho[inside])))
        below = pos & (rho < lo)
        if below.any():
            slope = math.log(v[1] / v[0]) / math.log(g[1] / g[0])
            out[below] = v[0] * (rho[below] / lo) ** slope
        above = pos & (rho > hi)
        if above.any():
            slope = math.log(v[-1] / v[-2]) / math.log(g[-1] / g[-2])
            out[above] = v[-1] * (rho[above] / hi) ** slope
        return out[0] if scalar else out


def _worker_count():
    raw = os.environ.get("LEVYHEAT_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_symbol_table(kernel: LevyKernel, grid=None, *, rtol=1e-8):
    """Tabulate the multiplier on a radial grid (default: 64 points per
    decade over [1e-3, 1e4]).

    Kernels that are a single power law globally (FractionalPower(beta)
    with PowerTail(alpha), beta == alpha) get a closed-form tag with the
    coefficient measured once at xi = 1.
    """
    if grid is None:
        grid = log_grid()
    grid = np.asarray(grid, dtype=float)
    kid = f"{kernel.near!r}+{kernel.tail!r}@N={kernel.dimension}"

    pure = (
        isinstance(kernel.near, FractionalPower)
        and isinstance(kernel.tail, PowerTail)
        and kernel.near.beta == kernel.tail.alpha
    )
    if pure:
        alpha = kernel.tail.alpha
        coeff = symbol_quadrature(kernel, 1.0, rtol=rtol)
        tag = PurePower(alpha=alpha, coefficient=coeff)
        return SymbolTable(
            kernel_id=kid,
            dimension=kernel.dimension,
            radial_grid=grid,
            values=tag.coefficient * grid**alpha,
            closed_form=tag,
            quad_tol=rtol,
        )

    if grid.size == 0:
        return SymbolTable(kid, kernel.dimension, grid, np.empty(0), None, 0.0)

    workers = _worker_count()
    jobs = [(kernel, x, rtol) for x in grid]
    if workers > 1 and grid.size > 8:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(_symbol_point, jobs, chunksize=8))
    else:
        pairs = [_symbol_point(job) for job in jobs]
    values = np.array([p[0] for p in pairs])
    achieved = max(e / max(abs(v), 1e-300) for v, e in pairs)
    return SymbolTable(
        kernel_id=kid,
        dimension=kernel.dimension,
        radial_grid=grid,
        values=values,
        closed_form=None,
        quad_tol=float(achieved),
    )


def _symbol_point(args):
    kernel, xi, rtol = args
    val, err = _symbol_value_err(kernel, abs(float(xi)), rtol)
    if err > max(20.0 * rtol * abs(val), 1e-12):
        raise QuadratureError(
            f"multiplier quadrature at xi={xi:g} achieved only "
            f"{err / max(abs(val), 1e-300):.2e} relative",
            achieved_tol=err / max(abs(val), 1e-300),
        )
    return val, err


def lattice_symbol_table(kernel: LevyKernel, radii, *, rtol=1e-8):
    """Exact-frequency table: quadrature at each requested radius, no
    interpolation error.  Meant for small grids (cross-validation)."""
    radii = np.unique(np.asarray(radii, dtype=float))
    radii = radii[radii > 0]
    return build_symbol_table(kernel, radii, rtol=rtol)


# ---------------------------------------------------------------------------
# empirical bound checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalBoundsReport:
    c1: float
    c2: float
    passed: bool


def check_global_bounds(tab: SymbolTable) -> GlobalBoundsReport:
    """Empirical constants in  c1 min(1, rho^2) <= m <= c2 max(1, rho^2)."""
    rho, m = tab.radial_grid, tab.values
    if rho.size == 0:
        raise DomainError("empty table")
    c1 = float(np.min(m / np.minimum(1.0, rho**2)))
    c2 = float(np.max(m / np.maximum(1.0, rho**2)))
    return GlobalBoundsReport(c1=c1, c2=c2, passed=bool(0 < c1 <= c2 < np.inf))


@dataclass(frozen=True)
class UpperPsiReport:
    ratios: np.ndarray
    max_ratio: float
    median_ratio: float
    passed: bool


def check_upper_psi(kernel: LevyKernel, tab: SymbolTable) -> UpperPsiReport:
    """Ratios m(rho) / (psi1(1/rho) + psi2(1/rho)) over the grid's rho > 1.

    Bounded ratios are the empirical content of the high-frequency
    multiplier bound; the report carries the whole landscape so tests
    can assert stability, not just finiteness.
    """
    mask = tab.radial_grid > 1.0
    if not mask.any():
        raise DomainError("table has no entries with rho > 1")
    rho = tab.radial_grid[mask]
    m = tab.values[mask]
    denom = np.array(
        [kernel_psi1(kernel, 1.0 / p) + kernel_psi2(kernel, 1.0 / p) for p in rho]
    )
    ratios = m / denom
    finite = bool(np.isfinite(ratios).all())
    return UpperPsiReport(
        ratios=ratios,
        max_ratio=float(ratios.max()),
        median_ratio=float(np.median(ratios)),
        passed=finite,
    )


@dataclass(frozen=True)
class LowerPsiReport:
    min_ratio: float
    passed: bool
    hypothesis_certified: bool


def check_lower_psi(
    tab: SymbolTable, beta_profile: ProfileFn, *, certified=True
) -> LowerPsiReport:
    """Minimum of m(rho) / psi1_beta(1/rho) over rho > 1.

    The caller certifies that ``beta_profile`` lies below the kernel's
    own profile; with an uncertified hypothesis the numbers are still
    computed but the report is flagged unverified.
    """
    mask = tab.radial_grid > 1.0
    if not mask.any():
        raise DomainError("table has no entries with rho > 1")
    rho = tab.radial_grid[mask]
    m = tab.values[mask]
    denom = np.array([beta_profile.psi1(1.0 / p) for p in rho])
    ratios = m / np.maximum(denom, 1e-300)
    min_ratio = float(ratios.min())
    return LowerPsiReport(
        min_ratio=min_ratio,
        passed=bool(min_ratio > 1e-6),
        hypothesis_certified=bool(certified),
    )


@dataclass(frozen=True)
class SmallXiReport:
    c_emp: float
    gamma: float
    passed: bool


def check_small_xi_power(tab: SymbolTable, alpha: float) -> SmallXiReport:
    """Empirical constant in m(rho) >= c rho^gamma, gamma = min(alpha, 2),
    over the grid's rho <= 1."""
    gamma = min(alpha, 2.0)
    mask = tab.radial_grid <= 1.0
    if not mask.any():
        raise DomainError("table has no entries with rho <= 1")
    rho = tab.radial_grid[mask]
    m = tab.values[mask]
    c_emp = float(np.min(m / rho**gamma))
    return SmallXiReport(c_emp=c_emp, gamma=gamma, passed=bool(c_emp > 1e-8))
