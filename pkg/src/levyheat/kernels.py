"""Radial Levy jump kernels assembled from a catalog of profiles.

A kernel is the pair of a near-origin profile on ``0 < |z| <= 1`` and a
tail profile on ``|z| > 1``, glued continuously at ``|z| = 1`` by a
matching constant whenever both sides are positive.  The near behaviour
is most conveniently described through the profile function

    ell(r) = r^N J(r),

which is what every regularity statement in the package is phrased in:
``psi1(r) = int_r^1 ell(s)/s ds`` measures the accumulated singular
mass, ``psi2(r) = r^-2 int_0^r s ell(s) ds`` the quadratic truncation.

The admissibility (Levy) condition ``int J(z) min(|z|^2, 1) dz < inf``
is certified numerically by ``levy_moment``, which refines the
integration limits decade by decade and flags the diverging end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import AdmissibilityError, DomainError
from .quadrature import adaptive_quad, wynn_epsilon_limit

#: deepest oscillation band kept in the Oscillating profile; below
#: ``2**-OSC_BAND_LIMIT`` the profile continues with ell = 1.
OSC_BAND_LIMIT = 40


# ---------------------------------------------------------------------------
# near-origin profiles (define J on 0 < r <= 1)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FractionalPower:
    """``J(z) = |z|^(-N-beta)``, the fractional-Laplacian-type singularity.

    ``beta`` in (0, 2) is the admissible range; larger values may be
    constructed but fail the Levy moment certification at the origin.
    """

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"FractionalPower needs beta > 0, got {self.beta}")

    def j(self, r, dim):
        return np.asarray(r, dtype=float) ** (-dim - self.beta)

    def j_scalar(self, r, dim):
        return r ** (-dim - self.beta)

    def ell(self, r, dim):
        return np.asarray(r, dtype=float) ** (-self.beta)

    def ell_at_one(self, dim):
        return 1.0

    def breakpoints(self):
        return ()

    def int_symbol_measure(self, a, b, dim):
        # int_a^b ell(r)/r dr = int_a^b r^(-1-beta) dr
        return (a**-self.beta - b**-self.beta) / self.beta

    def int_moment_measure(self, a, b, dim):
        # int_a^b r ell(r) dr = int_a^b r^(1-beta) dr
        if self.beta == 2.0:
            return math.log(b / a)
        e = 2.0 - self.beta
        return (b**e - a**e) / e


@dataclass(frozen=True)
class Borderline:
    """``J(z) = |z|^-N``: ell is identically one, the threshold case."""

    def j(self, r, dim):
        return np.asarray(r, dtype=float) ** (-dim)

    def j_scalar(self, r, dim):
        return r**-dim

    def ell(self, r, dim):
        return np.ones_like(np.asarray(r, dtype=float))

    def ell_at_one(self, dim):
        return 1.0

    def breakpoints(self):
        return ()

    def int_symbol_measure(self, a, b, dim):
        return math.log(b / a)

    def int_moment_measure(self, a, b, dim):
        return 0.5 * (b * b - a * a)


@dataclass(frozen=True)
class LogPerturbed:
    """``J(z) = |z|^-N log(e/|z|)^-p`` with ``0 < p <= 1``.

    A logarithmic thinning of the borderline kernel; the ``e`` inside
    the logarithm pins ``J = 1`` at ``|z| = 1`` while keeping the same
    origin asymptotics as ``|z|^-N log(1/|z|)^-p``.
    """

    p: float

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise DomainError(f"LogPerturbed needs p in (0, 1], got {self.p}")

    def j(self, r, dim):
        r = np.asarray(r, dtype=float)
        return r ** (-dim) * np.log(np.e / r) ** (-self.p)

    def j_scalar(self, r, dim):
        return r**-dim * math.log(math.e / r) ** (-self.p)

    def ell(self, r, dim):
        r = np.asarray(r, dtype=float)
        return np.log(np.e / r) ** (-self.p)

    def ell_at_one(self, dim):
        return 1.0

    def breakpoints(self):
        return ()

    def int_symbol_measure(self, a, b, dim):
        # substitute u = log(e/r): int ell/r dr = int_{log(e/b)}^{log(e/a)} u^-p du
        ua, ub = math.log(math.e / b), math.log(math.e / a)
        if self.p == 1.0:
            return math.log(ub / ua)
        q = 1.0 - self.p
        return (ub**q - ua**q) / q

    def int_moment_measure(self, a, b, dim):
        return None  # no elementary form; quadrature fallback


@dataclass(frozen=True)
class Bounded:
    """``J(z) = c0`` near the origin: no singularity at all."""

    c0: float

    def __post_init__(self):
        if not self.c0 > 0:
            raise DomainError(f"Bounded needs c0 > 0, got {self.c0}")

    def j(self, r, dim):
        return np.full_like(np.asarray(r, dtype=float), self.c0)

    def j_scalar(self, r, dim):
        return self.c0

    def ell(self, r, dim):
        return self.c0 * np.asarray(r, dtype=float) ** dim

    def ell_at_one(self, dim):
        return self.c0

    def breakpoints(self):
        return ()

    def int_symbol_measure(self, a, b, dim):
        return self.c0 * (b**dim - a**dim) / dim

    def int_moment_measure(self, a, b, dim):
        e = dim + 2
        return self.c0 * (b**e - a**e) / e


@dataclass(frozen=True)
class Oscillating:
    """Dyadic bands where ell jumps to ``b_k = 2^(alpha_osc k)`` and back to 1.

    Inside the dyadic block ``(2^-k-1, 2^-k]`` the profile equals ``b_k``
    on the thin band ``(a_k, 2^-k]`` with ``a_k = 2^-k (1 - 1/b_k)`` and
    one elsewhere, so ell is unbounded along the band tops while the
    accumulated mass psi1 still grows only linearly in k.  Bands with
    ``b_k <= 2`` would overlap their dyadic block and are skipped; the
    construction stops at ``k = OSC_BAND_LIMIT``.
    """

    alpha_osc: float

    def __post_init__(self):
        if not self.alpha_osc >= 0:
            raise DomainError(f"Oscillating needs alpha_osc >= 0, got {self.alpha_osc}")

    @cached_property
    def _band_list(self):
        out = []
        for k in range(1, OSC_BAND_LIMIT + 1):
            b_k = 2.0 ** (self.alpha_osc * k)
            if b_k <= 2.0:
                continue
            hi = 2.0**-k
            out.append((hi * (1.0 - 1.0 / b_k), hi, b_k))
        return tuple(out)

    def bands(self):
        """Active bands as (lo, hi, value) with lo = 2^-k (1 - 1/b_k)."""
        return self._band_list

    def ell(self, r, dim):
        r = np.asarray(r, dtype=float)
        shape = r.shape
        r = np.atleast_1d(r)
        out = np.ones_like(r)
        for lo, hi, val in self.bands():
            out[(r > lo) & (r <= hi)] = val
        return out.reshape(shape)

    def ell_scalar(self, r):
        for lo, hi, val in self.bands():
            if lo < r <= hi:
                return val
        return 1.0

    def j(self, r, dim):
        r = np.asarray(r, dtype=float)
        return self.ell(r, dim) * r ** (-dim)

    def j_scalar(self, r, dim):
        return self.ell_scalar(r) * r**-dim

    def ell_at_one(self, dim):
        return 1.0

    def breakpoints(self):
        pts = []
        for lo, hi, _ in self.bands():
            pts.extend((lo, hi))
        return tuple(sorted(pts))

    def _segments(self, a, b):
        """Constant-ell segments of (a, b) as (lo, hi, value)."""
        edges = sorted({a, b, *(p for p in self.breakpoints() if a < p < b)})
        segs = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid = math.sqrt(lo * hi) if lo > 0 else 0.5 * hi
            segs.append((lo, hi, float(self.ell(np.asarray(mid), 0))))
        return segs

    def int_symbol_measure(self, a, b, dim):
        return sum(v * math.log(hi / lo) for lo, hi, v in self._segments(a, b))

    def int_moment_measure(self, a, b, dim):
        return sum(0.5 * v * (hi * hi - lo * lo) for lo, hi, v in self._segments(a, b))


# ---------------------------------------------------------------------------
# tail profiles (define J on r > 1, up to the matching constant)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerTail:
    """``J(z) = matching * |z|^(-N-alpha)`` beyond the unit ball.

    ``alpha`` in (0, 2] is the range the decay theory addresses;
    ``tail_exponent`` caps the reported exponent at 2 regardless.
    """

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"PowerTail needs alpha > 0, got {self.alpha}")

    def matching(self, ell1):
        return ell1

    def j(self, r, dim, match):
        return match * np.asarray(r, dtype=float) ** (-dim - self.alpha)

    def j_scalar(self, r, dim, match):
        return match * r ** (-dim - self.alpha)

    def int_measure(self, a, dim, match):
        # int_a^inf J r^(dim-1) dr; the r powers cancel to r^(-1-alpha)
        return match * a**-self.alpha / self.alpha

    def cos_transform_tail(self, a, omega, dim, match):
        return None  # no closed form; QAWF fallback in the symbol engine

    def exponent(self):
        return min(self.alpha, 2.0)


@dataclass(frozen=True)
class CompactSupport:
    """``J = 0`` beyond the unit ball."""

    def matching(self, ell1):
        return 1.0  # nothing to match against

    def j(self, r, dim, match):
        return np.zeros_like(np.asarray(r, dtype=float))

    def j_scalar(self, r, dim, match):
        return 0.0

    def int_measure(self, a, dim, match):
        return 0.0

    def cos_transform_tail(self, a, omega, dim, match):
        return 0.0

    def exponent(self):
        return 2.0


@dataclass(frozen=True)
class ExponentialTail:
    """``J(z) = matching * exp(-lam |z|)`` beyond the unit ball."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"ExponentialTail needs lam > 0, got {self.lam}")

    def matching(self, ell1):
        return ell1 * math.exp(self.lam)

    def j(self, r, dim, match):
        return match * np.exp(-self.lam * np.asarray(r, dtype=float))

    def j_scalar(self, r, dim, match):
        return match * math.exp(-self.lam * r)

    def int_measure(self, a, dim, match):
        lam = self.lam
        if dim == 1:
            return match * math.exp(-lam * a) / lam
        return match * math.exp(-lam * a) * (a / lam + 1.0 / lam**2)

    def cos_transform_tail(self, a, omega, dim, match):
        # Re int_a^inf r^(dim-1) e^(-(lam - i omega) r) dr
        c = complex(self.lam, -omega)
        if dim == 1:
            return match * (np.exp(-c * a) / c).real
        return match * (np.exp(-c * a) * (a / c + 1.0 / c**2)).real

    def exponent(self):
        return 2.0


NEAR_PROFILES = (FractionalPower, Borderline, LogPerturbed, Bounded, Oscillating)
TAIL_PROFILES = (PowerTail, CompactSupport, ExponentialTail)


# ---------------------------------------------------------------------------
# the kernel itself
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevyKernel:
    """A radial jump kernel on R^N, N in {1, 2}.

    ``matching_constant`` scales the tail profile so that J is
    continuous at ``|z| = 1`` where both profiles are positive; it is
    derived, not chosen.
    """

    dimension: int
    near: object
    tail: object
    matching_constant: float = field(init=False)

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise DomainError(f"dimension must be 1 or 2, got {self.dimension}")
        if not isinstance(self.near, NEAR_PROFILES):
            raise DomainError(f"unknown near profile {self.near!r}")
        if not isinstance(self.tail, TAIL_PROFILES):
            raise DomainError(f"unknown tail profile {self.tail!r}")
        match = self.tail.matching(self.near.ell_at_one(self.dimension))
        object.__setattr__(self, "matching_constant", match)

    # -- radial evaluation ---------------------------------------------------

    def eval_radial(self, r):
        """J at radius r > 0 (vectorized)."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        if (r <= 0).any():
            raise DomainError("kernel radius must be positive")
        out = np.empty_like(r)
        near = r <= 1.0
        if near.any():
            out[near] = self.near.j(r[near], self.dimension)
        if (~near).any():
            out[~near] = self.tail.j(r[~near], self.dimension, self.matching_constant)
        return out[0] if scalar else out

    def profile(self):
        """The near profile as a plain rule r -> ell(r), with breakpoints."""
        return ProfileFn(
            lambda r: self.near.ell(np.asarray(r, dtype=float), self.dimension),
            breakpoints=tuple(self.near.breakpoints()),
        )


@dataclass(frozen=True)
class ProfileFn:
    """A bare profile rule r -> ell(r) on (0, 1], used by the checker
    that compares a multiplier against psi1 of a smaller profile."""

    fn: object
    breakpoints: tuple = ()

    def __call__(self, r):
        return self.fn(r)

    def psi1(self, r, *, rtol=1e-10):
        if not 0 < r <= 1:
            raise DomainError(f"psi1 needs r in (0, 1], got {r}")
        if r == 1.0:
            return 0.0
        val, _ = adaptive_quad(
            lambda s: self.fn(s) / s, r, 1.0, breakpoints=self.breakpoints, rtol=rtol
        )
        return val

    @staticmethod
    def constant(value=1.0):
        return ProfileFn(lambda r: np.full_like(np.asarray(r, dtype=float), value))

    @staticmethod
    def power(exponent):
        return ProfileFn(lambda r: np.asarray(r, dtype=float) ** (-exponent))


# ---------------------------------------------------------------------------
# catalog operations
# ---------------------------------------------------------------------------


def eval_kernel(kernel: LevyKernel, z):
    """Kernel value J(z) at radius |z| (vectorized, z != 0)."""
    return kernel.eval_radial(np.abs(np.asarray(z, dtype=float)))


def ell(kernel: LevyKernel, r):
    """Profile value ell(r) = r^N J(r) for r in (0, 1]."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if ((r_arr <= 0) | (r_arr > 1)).any():
        raise DomainError(f"ell is defined on (0, 1], got {r}")
    out = kernel.near.ell(r_arr, kernel.dimension)
    return out[0] if np.ndim(r) == 0 else out


def psi1(kernel: LevyKernel, r, *, rtol=1e-10):
    """Accumulated profile mass ``int_r^1 ell(s)/s ds``.

    Closed forms cover the fractional, borderline and bounded profiles;
    the rest go through adaptive quadrature split at the profile's
    breakpoints.
    """
    if not 0 < r <= 1:
        raise DomainError(f"psi1 needs r in (0, 1], got {r}")
    if r == 1.0:
        return 0.0
    near, dim = kernel.near, kernel.dimension
    if isinstance(near, (FractionalPower, Borderline, Bounded)):
        return near.int_symbol_measure(r, 1.0, dim)
    val, _ = adaptive_quad(
        lambda s: float(near.ell(np.asarray(s), dim)) / s,
        r,
        1.0,
        breakpoints=near.breakpoints(),
        rtol=rtol,
    )
    return val


def psi2(kernel: LevyKernel, r, *, rtol=1e-10):
    """Truncated second moment ``r^-2 int_0^r s ell(s) ds``."""
    if not 0 < r <= 1:
        raise DomainError(f"psi2 needs r in (0, 1], got {r}")
    near, dim = kernel.near, kernel.dimension
    if isinstance(near, FractionalPower) and near.beta >= 2.0:
        raise AdmissibilityError(
            f"psi2 integrand s^(1-beta) is not integrable at 0 for beta={near.beta}",
            end="origin",
        )
    if isinstance(near, (FractionalPower, Borderline, Bounded)):
        return near.int_moment_measure(0.0, r, dim) / r**2
    val, _ = adaptive_quad(
        lambda s: s * float(near.ell(np.asarray(s), dim)),
        0.0,
        r,
        breakpoints=near.breakpoints(),
        rtol=rtol,
    )
    return val / r**2


def _surface_factor(dim):
    # the angular measure of the unit sphere: two points or a circle
    return 2.0 if dim == 1 else 2.0 * math.pi


def _probe_refined(piece, decades, total_limit, rtol, end):
    """Sum片 integrals over a refinement ladder, watching for divergence.

    ``piece(d)`` returns the integral over the d-th decade.  Divergence
    is declared when the running total passes ``total_limit`` or when
    the per-decade increments stop decreasing; otherwise the partial
    sums are extrapolated to their limit.
    """
    partials = []
    total = 0.0
    increments = []
    for d in range(decades):
        inc = piece(d)
        if not np.isfinite(inc):
            raise AdmissibilityError(f"kernel moment diverges at the {end}", end=end)
        total += inc
        increments.append(inc)
        partials.append(total)
        if total > total_limit:
            raise AdmissibilityError(
                f"kernel moment exceeds {total_limit:g} at the {end}", end=end
            )
    if increments[-1] <= rtol * max(total, 1e-300):
        return total
    if increments[-1] >= increments[-2] * (1.0 - 1e-3):
        # increments no longer decreasing: logarithmic or worse divergence
        raise AdmissibilityError(
            f"kernel moment increments do not decay at the {end}", end=end
        )
    val, err = wynn_epsilon_limit(np.asarray(partials))
    if err > 10 * rtol * abs(val):
        raise AdmissibilityError(
            f"kernel moment fails to converge at the {end} "
            f"(extrapolation residual {err:.2e})",
            end=end,
        )
    return val


def _near_piece(kernel, a, b, rtol):
    closed = kernel.near.int_moment_measure(a, b, kernel.dimension)
    if closed is not None:
        return closed
    val, _ = adaptive_quad(
        lambda s: s * float(kernel.near.ell(np.asarray(s), kernel.dimension)),
        a,
        b,
        breakpoints=kernel.near.breakpoints(),
        rtol=rtol,
    )
    return val


def levy_moment(kernel: LevyKernel, *, rtol=1e-8):
    """``int J(z) min(|z|^2, 1) dz``, the admissibility certificate.

    Raises AdmissibilityError naming the diverging end when the partial
    integrals fail to settle under decade-by-decade refinement.
    """
    near_val = _probe_refined(
        lambda d: _near_piece(kernel, 10.0 ** -(d + 1), 10.0**-d, rtol),
        decades=16,
        total_limit=1e12,
        rtol=rtol,
        end="origin",
    )
    if isinstance(kernel.tail, CompactSupport):
        tail_val = 0.0
    else:
        tail_val = _probe_refined(
            lambda d: (
                kernel.tail.int_measure(10.0**d, kernel.dimension, kernel.matching_constant)
                - kernel.tail.int_measure(
                    10.0 ** (d + 1), kernel.dimension, kernel.matching_constant
                )
            ),
            decades=16,
            total_limit=1e12,
            rtol=rtol,
            end="infinity",
        )
    return _surface_factor(kernel.dimension) * (near_val + tail_val)


def tail_exponent(kernel: LevyKernel):
    """Effective tail decay index: min(alpha, 2) for power tails, 2 for
    anything decaying at least that fast."""
    return kernel.tail.exponent()
