"""Periodic grids, the discrete transform pair, and field constructors.

Functions live on the torus [-L, L)^N sampled at n points per axis (n a
power of two).  The transform normalization approximates the continuum
Fourier transform,

    coeff(kappa) = dx^N sum_x values(x) e^{-i xi_kappa . x},
    xi_kappa = (pi / L) kappa,

so a Fourier multiplier m(xi) applies to the coefficients without any
rescaling.  With x running from -L, this is an FFT decorated with the
alternating phase (-1)^kappa and the volume element dx^N.

Decay experiments on the torus stand in for the whole space; the caller
is responsible for choosing L large enough that nothing of size matters
reaches the boundary (the pipeline's domain-escape guard enforces
this).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import erf

from .errors import ContractError, DomainError, GridMismatchError


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on [-L, L)^N with power-of-two points per axis."""

    dimension: int
    half_width: float
    points_per_axis: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise DomainError(f"dimension must be 1 or 2, got {self.dimension}")
        if not self.half_width > 0:
            raise DomainError(f"half_width must be positive, got {self.half_width}")
        n = self.points_per_axis
        if n < 2 or n & (n - 1):
            raise DomainError(f"points_per_axis must be a power of two >= 2, got {n}")

    @property
    def spacing(self):
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dimension

    @property
    def cell_volume(self):
        return self.spacing**self.dimension

    @cached_property
    def axis(self):
        """Sample points along one axis."""
        n = self.points_per_axis
        return -self.half_width + self.spacing * np.arange(n)

    @cached_property
    def freq_axis(self):
        """Radian frequencies along one axis, FFT ordering."""
        n = self.points_per_axis
        return 2.0 * math.pi * np.fft.fftfreq(n, d=self.spacing)

    @cached_property
    def _phase(self):
        n = self.points_per_axis
        alt = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        if self.dimension == 1:
            return alt
        return np.outer(alt, alt)

    def coordinates(self):
        """Node coordinates, one array per axis (broadcastable)."""
        if self.dimension == 1:
            return (self.axis,)
        return (self.axis[:, None], self.axis[None, :])

    def freq_radii(self):
        """|xi| at each lattice frequency, FFT ordering."""
        if self.dimension == 1:
            return np.abs(self.freq_axis)
        fx, fy = self.freq_axis[:, None], self.freq_axis[None, :]
        return np.hypot(fx, fy)

    @property
    def max_frequency(self):
        """Largest |xi| along one axis: pi / dx."""
        return math.pi / self.spacing


@dataclass(frozen=True)
class GridField:
    """Real scalar samples on a periodic grid; always finite."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise GridMismatchError(
                f"field shape {vals.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.isfinite(vals).all():
            raise ContractError("field values must be finite")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class SpectrumField:
    """Complex transform coefficients indexed by integer frequency."""

    grid: PeriodicGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.grid.shape:
            raise GridMismatchError(
                f"spectrum shape {c.shape} does not match grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "coeffs", c)


def forward(f: GridField) -> SpectrumField:
    """Continuum-normalized transform: dx^N (-1)^kappa FFT."""
    g = f.grid
    coeffs = g.cell_volume * g._phase * np.fft.fftn(f.values)
    return SpectrumField(g, coeffs)


def inverse(F: SpectrumField) -> GridField:
    """Inverse of :func:`forward`; discards the O(roundoff) imaginary part."""
    g = F.grid
    vals = np.fft.ifftn(F.coeffs * g._phase).real / g.cell_volume
    return GridField(g, vals)


def lp_norm(f: GridField, p) -> float:
    """Discrete L^p norm (dx^N sum |u|^p)^(1/p); max |u| for p = inf."""
    if p == math.inf or p == "inf":
        return float(np.max(np.abs(f.values)))
    p = float(p)
    if p < 1.0:
        raise DomainError(f"p must be >= 1 or inf, got {p}")
    return float((f.grid.cell_volume * np.sum(np.abs(f.values) ** p)) ** (1.0 / p))


def mass(f: GridField) -> float:
    return float(f.grid.cell_volume * np.sum(f.values))


def spectrum_l2(F: SpectrumField) -> float:
    """L2 norm read off the spectrum: ((2L)^-N sum |coeff|^2)^(1/2)."""
    vol = (2.0 * F.grid.half_width) ** F.grid.dimension
    return float(math.sqrt(np.sum(np.abs(F.coeffs) ** 2) / vol))


# ---------------------------------------------------------------------------
# field constructors (the reproducible test-function families)
# ---------------------------------------------------------------------------


def box_field(grid: PeriodicGrid, width=1.0, height=1.0, center=0.0) -> GridField:
    """Indicator of a (hyper)cube [c - w/2, c + w/2), scaled by height.

    The half-open convention keeps discrete norms of lattice-aligned
    boxes exact.
    """
    centers = np.broadcast_to(np.asarray(center, dtype=float), (grid.dimension,))
    mask = np.ones(grid.shape, dtype=bool)
    for ax, c in zip(grid.coordinates(), centers):
        mask &= (ax >= c - 0.5 * width) & (ax < c + 0.5 * width)
    return GridField(grid, height * mask.astype(float))


def gaussian_field(grid: PeriodicGrid, sigma=1.0, height=1.0, center=0.0) -> GridField:
    """``height * exp(-|x - c|^2 / (2 sigma^2))``."""
    centers = np.broadcast_to(np.asarray(center, dtype=float), (grid.dimension,))
    sq = np.zeros(grid.shape)
    for ax, c in zip(grid.coordinates(), centers):
        sq = sq + (ax - c) ** 2
    return GridField(grid, height * np.exp(-0.5 * sq / sigma**2))


def delta_surrogate(grid: PeriodicGrid) -> GridField:
    """Narrow Gaussian (width 3 dx) with discrete mass exactly one."""
    g = gaussian_field(grid, sigma=3.0 * grid.spacing)
    return GridField(grid, g.values / mass(g))


def mode_field(grid: PeriodicGrid, k, amplitude=1.0) -> GridField:
    """Single cosine mode cos(xi_k . x): an eigenfunction of every
    radial multiplier on the lattice."""
    ks = np.broadcast_to(np.asarray(k, dtype=float), (grid.dimension,))
    phase = np.zeros(grid.shape)
    for ax, ki in zip(grid.coordinates(), ks):
        phase = phase + (math.pi / grid.half_width) * ki * ax
    return GridField(grid, amplitude * np.cos(phase))


def mollified_box_field(
    grid: PeriodicGrid, half_width=1.0, edge_width=0.25, scale=1.0
) -> GridField:
    """Smooth box: per-axis profile (erf((x+h)/w) - erf((x-h)/w))/2.

    ``scale`` = lambda evaluates the mass-preserving dilation
    lambda^N f(lambda x), the family driving the Nash-ratio sweeps.
    """
    vals = np.full(grid.shape, float(scale) ** grid.dimension)
    for ax in grid.coordinates():
        y = scale * ax
        vals = vals * 0.5 * (erf((y + half_width) / edge_width) - erf((y - half_width) / edge_width))
    return GridField(grid, vals)


def random_band_limited(grid: PeriodicGrid, rng, band_fraction=0.25) -> GridField:
    """Seeded random real field with spectrum confined to
    |xi| <= band_fraction * (pi / dx); unit sup-norm."""
    if not 0 < band_fraction <= 1:
        raise DomainError(f"band_fraction must lie in (0, 1], got {band_fraction}")
    white = rng.standard_normal(grid.shape)
    spec = np.fft.fftn(white)
    keep = grid.freq_radii() <= band_fraction * grid.max_frequency
    vals = np.fft.ifftn(spec * keep).real
    peak = np.max(np.abs(vals))
    if peak == 0.0:
        raise DomainError("degenerate random field (all filtered out)")
    return GridField(grid, vals / peak)


def random_nonnegative(grid: PeriodicGrid, rng, band_fraction=0.25, floor=0.05) -> GridField:
    """Nonnegative random field: band-limited sample shifted above zero."""
    f = random_band_limited(grid, rng, band_fraction)
    vals = f.values - f.values.min() + floor
    return GridField(grid, vals)


def translate(f: GridField, cells) -> GridField:
    """Shift by whole cells along each axis (exact on the torus)."""
    shift = np.broadcast_to(np.asarray(cells, dtype=int), (f.grid.dimension,))
    return GridField(f.grid, np.roll(f.values, tuple(shift), axis=tuple(range(f.grid.dimension))))


def write_field_csv(f: GridField, path):
    """Snapshot format: header ``x[,y],u``, lexicographic nodes, 17
    significant digits."""
    g = f.grid
    with open(path, "w") as fh:
        if g.dimension == 1:
            fh.write("x,u\n")
            for x, u in zip(g.axis, f.values):
                fh.write(f"{x:.17g},{u:.17g}\n")
        else:
            fh.write("x,y,u\n")
            for i, x in enumerate(g.axis):
                for j, y in enumerate(g.axis):
                    fh.write(f"{x:.17g},{y:.17g},{f.values[i, j]:.17g}\n")
