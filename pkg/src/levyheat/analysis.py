"""Dirichlet forms, inequality verifiers, exponent algebra, decay fits,
and the regularizing-effect diagnostic.

Everything here is a measurement instrument: the quadratic form E(f,f)
evaluated two independent ways (spectrally through the multiplier and
by brute-force double sum through the kernel), ratio landscapes for the
Nash- and Stroock-Varopoulos-type inequalities whose constants the
theory leaves existential, least-squares power-law fits for decay
exponents, and a trend classifier for whether e^{-m t} is integrable
(equivalently, whether the flow regularizes at time t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractError, DomainError, GridMismatchError, ResourceLimitError
from .evolve import LinearPropagator
from .kernels import LevyKernel
from .spectral import GridField, PeriodicGrid, forward, mollified_box_field
from .symbol import SymbolTable

#: relative slack granted to inequality margins (covers roundoff in the
#: two transforms entering each side)
MARGIN_TOL = 1e-10


def _symbol_on_grid(source, grid: PeriodicGrid) -> np.ndarray:
    """Multiplier values on a grid's frequency lattice from either a
    bound propagator or a symbol table."""
    if isinstance(source, LinearPropagator):
        if source.grid != grid:
            raise GridMismatchError("propagator bound to a different grid")
        return source.symbol_values
    if isinstance(source, SymbolTable):
        vals = source.evaluate(grid.freq_radii())
        vals[(0,) * grid.dimension] = 0.0
        return vals
    raise ContractError(f"expected LinearPropagator or SymbolTable, got {type(source)!r}")


# ---------------------------------------------------------------------------
# Dirichlet forms
# ---------------------------------------------------------------------------


def dirichlet_form_spectral(source, f: GridField) -> float:
    """E(f, f) = (2L)^-N sum m(xi) |f_hat(xi)|^2."""
    m = _symbol_on_grid(source, f.grid)
    vol = (2.0 * f.grid.half_width) ** f.grid.dimension
    return float(np.sum(m * np.abs(forward(f).coeffs) ** 2) / vol)


def dirichlet_bilinear(source, f: GridField, g: GridField) -> float:
    """Polarized form E(f, g) = (2L)^-N sum m Re(f_hat conj(g_hat))."""
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")
    m = _symbol_on_grid(source, f.grid)
    vol = (2.0 * f.grid.half_width) ** f.grid.dimension
    prod = forward(f).coeffs * np.conj(forward(g).coeffs)
    return float(np.sum(m * prod.real) / vol)


#: pair-sum cost guards for the brute-force form
DIRECT_LIMIT_1D = 512
DIRECT_LIMIT_2D = 64


def _j_point(kernel: LevyKernel, dist: float) -> float:
    if dist <= 1.0:
        return kernel.near.j_scalar(dist, kernel.dimension)
    return kernel.tail.j_scalar(dist, kernel.dimension, kernel.matching_constant)


def dirichlet_form_direct(kernel: LevyKernel, f: GridField) -> float:
    """Brute-force double sum (1/2) dx^2N sum_{x != y} (f(x)-f(y))^2 J(x-y).

    The oracle for the spectral form; pairs interact at the periodic
    minimum-image distance and the diagonal cell is excluded (the
    difference vanishes there anyway).
    """
    g = f.grid
    n = g.points_per_axis
    if g.dimension == 1 and n > DIRECT_LIMIT_1D:
        raise ResourceLimitError(f"direct form limited to n <= {DIRECT_LIMIT_1D} in 1D, got {n}")
    if g.dimension == 2 and n > DIRECT_LIMIT_2D:
        raise ResourceLimitError(
            f"direct form limited to n <= {DIRECT_LIMIT_2D} per axis in 2D, got {n}"
        )
    dx = g.spacing
    vals = f.values
    total = 0.0
    if g.dimension == 1:
        for k in range(1, n):
            w = _j_point(kernel, min(k, n - k) * dx)
            if w == 0.0:
                continue
            diff = vals - np.roll(vals, k)
            total += w * np.sum(diff * diff)
    else:
        for kx in range(n):
            ax = min(kx, n - kx) * dx
            for ky in range(n):
                if kx == 0 and ky == 0:
                    continue
                w = _j_point(kernel, math.hypot(ax, min(ky, n - ky) * dx))
                if w == 0.0:
                    continue
                diff = vals - np.roll(np.roll(vals, kx, axis=0), ky, axis=1)
                total += w * np.sum(diff * diff)
    return 0.5 * dx ** (2 * g.dimension) * total


# ---------------------------------------------------------------------------
# Stroock-Varopoulos inequalities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MarginReport:
    """One inequality trial: left - right with the pass verdict."""

    margin: float
    reference: float
    passed: bool


def _power_field(f: GridField, a: float) -> GridField:
    if a == 0.0:
        # the convention f^0 = 1 everywhere (constants have zero form)
        return GridField(f.grid, np.ones(f.grid.shape))
    return GridField(f.grid, f.values**a)


def stroock_varopoulos_check(source, f: GridField, a, b) -> MarginReport:
    """E(f^a, f^b) >= a b E(f, f) for f >= 0, a + b = 2."""
    if (f.values < 0).any():
        raise DomainError("field must be nonnegative")
    if abs(a + b - 2.0) > 1e-12:
        raise DomainError(f"need a + b = 2, got a + b = {a + b}")
    if a < 0 or b < 0:
        raise DomainError("exponents must be nonnegative")
    energy = dirichlet_form_spectral(source, f)
    left = dirichlet_bilinear(source, _power_field(f, a), _power_field(f, b))
    margin = left - a * b * energy
    return MarginReport(margin=margin, reference=energy, passed=bool(margin >= -MARGIN_TOL * energy))


@dataclass(frozen=True)
class SVTriple:
    """Maps (F, G, H) with the certificate F'G' >= (H')^2.

    The catalog triple for exponents (sigma, p) is

        F(z) = |z|^(sigma-1) z,   G(z) = |z|^(p-2) z,
        H(z) = c |z|^((p+sigma-1)/2 - 1) z,
        c = 2 sqrt(sigma (p-1)) / (p + sigma - 1),

    for which the certificate holds with equality in the power count.
    """

    F: object
    G: object
    H: object
    description: str
    certified: bool = True


def sv_power_triple(sigma: float, p: float) -> SVTriple:
    if not (sigma >= 1 and p > 1):
        raise DomainError(f"catalog triple needs sigma >= 1, p > 1, got ({sigma}, {p})")
    c = 2.0 * math.sqrt(sigma * (p - 1.0)) / (p + sigma - 1.0)
    h_pow = 0.5 * (p + sigma - 1.0)

    def F(z):
        return np.abs(z) ** (sigma - 1.0) * z

    def G(z):
        return np.abs(z) ** (p - 2.0) * z

    def H(z):
        return c * np.abs(z) ** (h_pow - 1.0) * z

    return SVTriple(F=F, G=G, H=H, description=f"power triple sigma={sigma}, p={p}")


def generalized_sv_check(source, u: GridField, triple: SVTriple) -> MarginReport:
    """E(F(u), G(u)) >= E(H(u), H(u)) whenever F'G' >= (H')^2."""
    if not triple.certified:
        raise ContractError(
            "triple lacks the certificate F'G' >= (H')^2; use a catalog triple "
            "or certify explicitly"
        )
    fu = GridField(u.grid, np.asarray(triple.F(u.values), dtype=float))
    gu = GridField(u.grid, np.asarray(triple.G(u.values), dtype=float))
    hu = GridField(u.grid, np.asarray(triple.H(u.values), dtype=float))
    right = dirichlet_form_spectral(source, hu)
    left = dirichlet_bilinear(source, fu, gu)
    margin = left - right
    return MarginReport(margin=margin, reference=right, passed=bool(margin >= -MARGIN_TOL * right))


# ---------------------------------------------------------------------------
# Nash-type ratios
# ---------------------------------------------------------------------------


def _norms(f: GridField, ps):
    from .spectral import lp_norm

    return [lp_norm(f, p) for p in ps]


def nash_ratio(source, f: GridField, d: float, r_norm: float) -> float:
    """Scale-invariant Nash quotient.

    Normalizes g = f / ||f||_r and returns
    E(g, g) / (||g||_2^2 min{1, ||g||_2^(2/d)}).
    """
    if not d > 0:
        raise DomainError(f"d must be positive, got {d}")
    if not 1.0 <= r_norm < 2.0:
        raise DomainError(f"r must lie in [1, 2), got {r_norm}")
    nr, n2 = _norms(f, [r_norm, 2.0])
    if nr == 0.0:
        raise DomainError("zero field")
    g = GridField(f.grid, f.values / nr)
    g2 = n2 / nr
    denom = g2**2 * min(1.0, g2 ** (2.0 / d))
    return dirichlet_form_spectral(source, g) / denom


@dataclass(frozen=True)
class NashReport:
    """Ratio landscape of a dilation sweep."""

    ratios: np.ndarray
    scales: np.ndarray
    branch_poincare: int
    branch_nash: int
    family: str
    branches: tuple = ()

    @property
    def min_ratio(self):
        return float(self.ratios.min())

    @property
    def passed(self):
        return bool(self.min_ratio > 0.0)


def nash_dilation_sweep(
    source,
    grid: PeriodicGrid,
    d: float,
    *,
    r_norm=1.0,
    scales=None,
    half_width=1.0,
    edge_width=0.25,
) -> NashReport:
    """nash_ratio along the mass-preserving dilation family
    lambda^N f(lambda x) of a mollified box.

    With r = 1 the family keeps ||f||_1 fixed while ||f||_2 sweeps both
    sides of 1, exercising both branches of the min.
    """
    if scales is None:
        scales = 2.0 ** np.arange(-6.0, 6.5, 0.5)
    scales = np.asarray(scales, dtype=float)
    ratios = np.empty_like(scales)
    poincare = nash = 0
    from .spectral import lp_norm

    branches = []
    for i, lam in enumerate(scales):
        f = mollified_box_field(grid, half_width=half_width, edge_width=edge_width, scale=lam)
        ratios[i] = nash_ratio(source, f, d, r_norm)
        g2 = lp_norm(f, 2.0) / lp_norm(f, r_norm)
        if g2 >= 1.0:
            poincare += 1
            branches.append("poincare")
        else:
            nash += 1
            branches.append("nash")
    return NashReport(
        ratios=ratios,
        scales=scales,
        branch_poincare=poincare,
        branch_nash=nash,
        family=f"mollified box dilations, half_width={half_width}, edge={edge_width}",
        branches=tuple(branches),
    )


@dataclass(frozen=True)
class ConverseNashReport:
    ratio: float
    branch: str
    passed: bool


def converse_nash_check(source, v: GridField, q, p, nu, tau, C2, certificate) -> ConverseNashReport:
    """Ratio form of the converse Nash inequality
    E(v,v) >= C ||v||_2^2 min{1/tau, (||v||_2/||v||_q)^(2/nu)}.

    (q, p, nu, tau, C2) are the parameters of the decay premise
    ||v(t)||_p <= C2 t^-nu ||v0||_q; ``certificate`` must be the
    DecayFit that established it for this flow — without one the
    premise is unverified and the check refuses to run.
    """
    if certificate is None:
        raise ContractError("decay premise not certified: run a decay fit first")
    if not (nu > 0 and tau > 0 and C2 > 0):
        raise DomainError("nu, tau and C2 must be positive")
    if not 1 <= q < p:
        raise DomainError(f"need 1 <= q < p, got q={q}, p={p}")
    if np.ptp(v.values) == 0.0:
        raise ContractError("constant fields do not satisfy the decay premise")
    nq, n2 = _norms(v, [q, 2.0])
    if n2 == 0.0:
        raise DomainError("zero field")
    arm1 = 1.0 / tau
    arm2 = (n2 / nq) ** (2.0 / nu)
    denom = n2**2 * min(arm1, arm2)
    ratio = dirichlet_form_spectral(source, v) / denom
    return ConverseNashReport(
        ratio=float(ratio),
        branch="time" if arm1 <= arm2 else "nash",
        passed=bool(ratio > 0.0),
    )


# ---------------------------------------------------------------------------
# interpolation inequality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterpolationReport:
    required_constant: float
    theta1: float
    theta2: float
    norm_s_sq: float
    monomial1: float
    monomial2: float


def theta_exponents(r, s, gamma, N):
    """Interpolation exponents theta1 = r[N(2-s)+gamma s] / (s[N(2-r)+gamma r]),
    theta2 = r(2-s)/(s(2-r)); always theta1 > theta2 on the admissible range."""
    if not 1.0 < r < s <= 2.0:
        raise DomainError(f"need 1 < r < s <= 2, got r={r}, s={s}")
    if not 0.0 < gamma <= 2.0:
        raise DomainError(f"need gamma in (0, 2], got {gamma}")
    if N not in (1, 2):
        raise DomainError(f"N must be 1 or 2, got {N}")
    theta1 = r * (N * (2.0 - s) + gamma * s) / (s * (N * (2.0 - r) + gamma * r))
    theta2 = r * (2.0 - s) / (s * (2.0 - r))
    if not theta1 > theta2:
        raise ContractError(f"exponent order violated: theta1={theta1} <= theta2={theta2}")
    return theta1, theta2


def interpolation_check(source, z: GridField, r, s, gamma) -> InterpolationReport:
    """Smallest constant c making
    ||z||_s^2 <= c (||z||_r^(2 theta1) E^(1-theta1) + ||z||_r^(2 theta2) E^(1-theta2))
    hold for this z."""
    theta1, theta2 = theta_exponents(r, s, gamma, z.grid.dimension)
    energy = dirichlet_form_spectral(source, z)
    if energy <= 0.0:
        raise DomainError("field has zero energy; the inequality is vacuous")
    nr, ns = _norms(z, [r, s])
    m1 = nr ** (2.0 * theta1) * energy ** (1.0 - theta1)
    m2 = nr ** (2.0 * theta2) * energy ** (1.0 - theta2)
    return InterpolationReport(
        required_constant=float(ns**2 / (m1 + m2)),
        theta1=theta1,
        theta2=theta2,
        norm_s_sq=float(ns**2),
        monomial1=float(m1),
        monomial2=float(m2),
    )


# ---------------------------------------------------------------------------
# exponent algebra
# ---------------------------------------------------------------------------


def rho_eps(q, p, N, alpha, sigma):
    """Decay exponent pair for the (possibly nonlinear) flow:
    rho = N(p-q) / (p [N(sigma-1) + alpha q]),  eps = 1 - (sigma-1) rho.

    sigma = 1 reduces to the linear pair (N/alpha (1/q - 1/p), 1).
    The range is q >= 1, q >= sigma - 1, q < p; the boundary
    q = sigma - 1 is admitted because the formulas stay finite there.
    """
    if not sigma >= 1:
        raise DomainError(f"sigma must be >= 1, got {sigma}")
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if N not in (1, 2):
        raise DomainError(f"N must be 1 or 2, got {N}")
    if q < 1 or q < sigma - 1.0 or not q < p:
        raise DomainError(
            f"need 1 <= q, sigma - 1 <= q, q < p; got q={q}, p={p}, sigma={sigma}"
        )
    rho = N * (p - q) / (p * (N * (sigma - 1.0) + alpha * q))
    eps = 1.0 - (sigma - 1.0) * rho
    return rho, eps


@dataclass(frozen=True)
class ExponentSet:
    """All exponents of one (q, p) decay estimate collected in one place.

    Derived values: rho and epsilon (decay and iteration exponents),
    the norm indices s = 2p/(p+sigma-1) and r = s q / p entering the
    interpolation step, theta1/theta2 at gamma = min(alpha, 2), and the
    Nash dimension d = N(2-r)/(r gamma).  theta1/theta2 are lazy: they
    exist only when 1 < r, which excludes the open endpoint r = 1.
    """

    q: float
    p: float
    N: int
    alpha: float
    sigma: float = 1.0

    def __post_init__(self):
        rho_eps(self.q, self.p, self.N, self.alpha, self.sigma)  # range check

    @cached_property
    def rho(self):
        return rho_eps(self.q, self.p, self.N, self.alpha, self.sigma)[0]

    @cached_property
    def epsilon(self):
        return rho_eps(self.q, self.p, self.N, self.alpha, self.sigma)[1]

    @property
    def gamma(self):
        return min(self.alpha, 2.0)

    @property
    def s(self):
        # mathematically <= 2 for sigma >= 1; clamp the roundoff residue
        return min(2.0, 2.0 * self.p / (self.p + self.sigma - 1.0))

    @property
    def r(self):
        return self.s * self.q / self.p

    @cached_property
    def thetas(self):
        return theta_exponents(self.r, self.s, self.gamma, self.N)

    @property
    def theta1(self):
        return self.thetas[0]

    @property
    def theta2(self):
        return self.thetas[1]

    @property
    def d(self):
        return self.N * (2.0 - self.r) / (self.r * self.gamma)


# ---------------------------------------------------------------------------
# decay fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    """Power-law fit norm ~ prefactor * t^(-exponent) over a window."""

    exponent: float
    prefactor: float
    window: tuple
    r_squared: float

    def __post_init__(self):
        lo, hi = self.window
        if not lo < hi:
            raise DomainError(f"window must be increasing, got {self.window}")
        if self.r_squared > 1.0 + 1e-12:
            raise DomainError(f"r_squared cannot exceed 1, got {self.r_squared}")


def fit_decay_exponent(series, window=None) -> DecayFit:
    """Least squares on (log t, log norm); exponent = -slope.

    ``series`` is a sequence of (t, norm) pairs with increasing positive
    times and positive norms; ``window`` restricts to t in [lo, hi].
    """
    arr = np.asarray(list(series), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("series must be (t, norm) pairs")
    t, y = arr[:, 0], arr[:, 1]
    if (np.diff(t) <= 0).any():
        raise DomainError("times must be strictly increasing")
    if window is not None:
        lo, hi = window
        keep = (t >= lo) & (t <= hi)
        t, y = t[keep], y[keep]
    if t.size < 5:
        raise DomainError(f"need at least 5 points in the window, got {t.size}")
    if (y <= 0).any():
        raise DomainError("norms must be positive to fit a power law")
    lt, ly = np.log(t), np.log(y)
    slope, intercept = np.polyfit(lt, ly, 1)
    resid = ly - (slope * lt + intercept)
    sstot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if sstot == 0.0 else 1.0 - float(np.sum(resid**2)) / sstot
    return DecayFit(
        exponent=float(-slope),
        prefactor=float(math.exp(intercept)),
        window=(float(t[0]), float(t[-1])),
        r_squared=r2,
    )


def fit_late_decay(series, min_points=5) -> DecayFit:
    """Best suffix-window fit: maximize r^2 over late-time windows.

    The theory's decay onset time depends on the data through an
    unspecified constant, so the window is selected empirically.
    """
    arr = np.asarray(list(series), dtype=float)
    n = arr.shape[0]
    if n < min_points:
        raise DomainError(f"need at least {min_points} points, got {n}")
    best = None
    for start in range(0, n - min_points + 1):
        fit = fit_decay_exponent(arr[start:])
        if best is None or fit.r_squared > best.r_squared:
            best = fit
    return best


# ---------------------------------------------------------------------------
# regularizing-effect diagnostic
# ---------------------------------------------------------------------------

CONVERGENT = "CONVERGENT"
DIVERGENT = "DIVERGENT"
UNDECIDED = "UNDECIDED"

#: highest regularity order probed by the C^k indicator
CK_PROBE_MAX = 8


@dataclass(frozen=True)
class RegularityReport:
    classification: str
    partial_integrals: np.ndarray
    cutoffs: np.ndarray
    ck_order: object  # smallest k with divergent k-th moment, or None (C^inf)
    time: float


def _weighted_partials(tab: SymbolTable, t: float, cutoffs, weight_power: int):
    """Partial integrals I(R) = int_{|xi| <= R} |xi|^k e^{-m t} d xi on
    a sequence of radial cutoffs, by log-trapezoid on the table.

    Returns (partials, increments): the increments are the per-interval
    integrals kept separately so that a tiny tail contribution is not
    lost to cancellation against the running total.
    """
    dim = tab.dimension
    surface = 2.0 if dim == 1 else 2.0 * math.pi
    lo = tab.radial_grid[0] if tab.closed_form is None else min(1e-6, cutoffs[0] * 1e-6)
    lo = min(lo, cutoffs[0])
    # the core |xi| <= lo: integrand <= lo^k, contributes at most the
    # ball volume; include it at the e^{-m(lo) t} value
    core = surface * lo ** (weight_power + dim) / (weight_power + dim)
    total = core * math.exp(-float(tab.evaluate(lo)) * t)
    partials, increments = [], []
    prev = lo
    for R in cutoffs:
        inc = 0.0
        if R > prev:
            grid = np.geomspace(prev, R, max(int(64 * math.log10(R / prev)), 16) + 1)
            mvals = tab.evaluate(grid)
            integrand = surface * grid ** (weight_power + dim - 1) * np.exp(-mvals * t)
            inc = float(np.trapezoid(integrand, grid))
            total += inc
            prev = R
        partials.append(total)
        increments.append(inc)
    return np.asarray(partials), np.asarray(increments)


def _classify(partials, increments):
    """Trend call: DIVERGENT when the increments are nondecreasing (and
    still positive) across the last three cutoff intervals, CONVERGENT
    when the last increment has fallen below 1e-6 of the total."""
    if len(partials) < 4:
        return UNDECIDED
    inc = increments[-3:]
    if inc[-1] > 0.0 and inc[0] <= inc[1] * (1 + 1e-9) and inc[1] <= inc[2] * (1 + 1e-9):
        return DIVERGENT
    if inc[-1] < 1e-6 * partials[-1]:
        return CONVERGENT
    return UNDECIDED


def regularizing_diagnostic(tab: SymbolTable, t, cutoffs=None) -> RegularityReport:
    """Does e^{-m t} have finite integral (and finite |xi|^k moments)?

    CONVERGENT means the discrete evolution measure at time t has a
    bounded, continuous density; DIVERGENT is the no-regularizing-effect
    regime; UNDECIDED when neither trend criterion fires within the
    cutoff range.
    """
    if not t > 0:
        raise DomainError(f"time must be positive, got {t}")
    if cutoffs is None:
        hi = tab.radial_grid[-1] if tab.closed_form is None else 1e8
        lo = max(1.0, tab.radial_grid[0] * 10 if tab.closed_form is None else 1.0)
        decades = int(math.floor(math.log10(hi / lo)))
        cutoffs = lo * 10.0 ** np.arange(0, decades + 1)
    cutoffs = np.asarray(sorted(cutoffs), dtype=float)
    if tab.closed_form is None and (
        cutoffs[-1] > tab.radial_grid[-1] * (1 + 1e-12) or cutoffs[0] < tab.radial_grid[0]
    ):
        raise DomainError("cutoffs outside the tabulated range")
    partials, increments = _weighted_partials(tab, float(t), cutoffs, 0)
    cls = _classify(partials, increments)
    ck = None
    if cls is CONVERGENT:
        for k in range(1, CK_PROBE_MAX + 1):
            mp, mi = _weighted_partials(tab, float(t), cutoffs, k)
            if _classify(mp, mi) is not CONVERGENT:
                ck = k
                break
    elif cls is DIVERGENT:
        ck = 0
    return RegularityReport(
        classification=cls,
        partial_integrals=partials,
        cutoffs=cutoffs,
        ck_order=ck,
        time=float(t),
    )


def log_symbol_slope(tab: SymbolTable, decades=2.0) -> float:
    """Growth rate omega = lim m(rho)/log(rho), fitted over the top
    ``decades`` decades of the table (finite and positive exactly for
    logarithmically growing multipliers)."""
    rho, m = tab.radial_grid, tab.values
    if rho.size < 8:
        raise DomainError("table too small to fit a slope")
    hi = rho[-1]
    keep = rho >= hi / 10.0**decades
    if keep.sum() < 4:
        raise DomainError("not enough points in the requested decades")
    slope, _ = np.polyfit(np.log(rho[keep]), m[keep], 1)
    return float(slope)
