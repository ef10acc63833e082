"""Time evolution: the exact linear semigroup and a nonlinear stepper.

The linear flow is diagonal in the transform variables,

    u_hat(xi, t) = e^{-m(xi) t} u0_hat(xi),

so propagation is exact in time; the only discretization is the grid
itself.  The fundamental solution is the inverse transform of
e^{-m(xi) t} and exists on a grid only when that factor has decayed
below roundoff scale before the lattice's maximum frequency --
precisely the regime in which the continuum equation regularizes.

The nonlinear problem  du/dt + L_J Phi(u) = 0  with Phi an odd power
is integrated by an explicit midpoint (second-order Runge-Kutta) rule
with a spectral-radius step bound; snapshot times are landed on
exactly by clipping the step, never by interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractError,
    DomainError,
    GridMismatchError,
    StabilityError,
    UnresolvableMeasureError,
)
from .spectral import GridField, PeriodicGrid, SpectrumField, forward, inverse
from .symbol import SymbolTable, symbol_quadrature


@dataclass(frozen=True)
class LinearPropagator:
    """Multiplier values bound to a grid's frequency lattice."""

    grid: PeriodicGrid
    symbol_values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.symbol_values, dtype=float)
        if vals.shape != self.grid.shape:
            raise GridMismatchError(
                f"symbol lattice shape {vals.shape} does not match grid {self.grid.shape}"
            )
        if not np.isfinite(vals).all() or (vals < 0).any():
            raise ContractError("symbol values must be finite and nonnegative")
        zero = (0,) * self.grid.dimension
        if vals[zero] != 0.0:
            raise ContractError(f"symbol at frequency 0 must vanish, got {vals[zero]}")
        object.__setattr__(self, "symbol_values", vals)

    @classmethod
    def from_table(cls, grid: PeriodicGrid, tab: SymbolTable, scale=1.0):
        """Evaluate a symbol table on the grid's exact frequencies.

        ``scale`` rescales the multiplier (used e.g. to normalize the
        alpha = 1 symbol from pi |xi| to |xi|).
        """
        vals = scale * tab.evaluate(grid.freq_radii())
        zero = (0,) * grid.dimension
        vals[zero] = 0.0
        return cls(grid, vals)

    @classmethod
    def from_kernel(cls, grid: PeriodicGrid, kernel, *, rtol=1e-8, scale=1.0):
        """Direct quadrature at every distinct lattice radius.

        Cost grows with the number of distinct radii; meant for the
        small grids of cross-validation runs, not production evolution.
        """
        radii = grid.freq_radii()
        flat = radii.ravel()
        uniq, inv = np.unique(flat, return_inverse=True)
        values = np.empty_like(uniq)
        for i, rho in enumerate(uniq):
            values[i] = 0.0 if rho == 0.0 else symbol_quadrature(kernel, rho, rtol=rtol)
        vals = scale * values[inv].reshape(radii.shape)
        return cls(grid, vals)

    @property
    def m_max(self):
        return float(self.symbol_values.max())

    @property
    def edge_value(self):
        """Symbol value at the axis Nyquist frequency (resolution edge)."""
        n = self.grid.points_per_axis
        idx = (n // 2,) + (0,) * (self.grid.dimension - 1)
        return float(self.symbol_values[idx])


def apply_operator(P: LinearPropagator, f: GridField) -> GridField:
    """The discrete nonlocal operator: multiplier m applied in frequency."""
    if f.grid != P.grid:
        raise GridMismatchError("field and propagator live on different grids")
    F = forward(f)
    return inverse(SpectrumField(P.grid, P.symbol_values * F.coeffs))


def propagate_linear(P: LinearPropagator, u0: GridField, t) -> GridField:
    """Exact-in-time linear solution at time t >= 0."""
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if u0.grid != P.grid:
        raise GridMismatchError("field and propagator live on different grids")
    F = forward(u0)
    damp = np.exp(-P.symbol_values * float(t))
    return inverse(SpectrumField(P.grid, damp * F.coeffs))


#: resolvability threshold: e^{-m_edge t} must fall below this before
#: the lattice edge, else the discrete fundamental solution aliases
RESOLVABLE_EDGE = 1e-6


def fundamental_solution(P: LinearPropagator, t) -> GridField:
    """Grid surrogate of the kernel of the semigroup at time t > 0.

    Raises UnresolvableMeasureError when e^{-m t} has not decayed at
    the grid's edge frequency -- the bounded-multiplier regime where
    the continuum measure keeps a singular part and no grid resolves
    it.
    """
    if not t > 0:
        raise DomainError(f"time must be positive, got {t}")
    edge = math.exp(-P.edge_value * float(t))
    if edge > RESOLVABLE_EDGE:
        raise UnresolvableMeasureError(
            f"e^(-m t) = {edge:.3e} at the grid edge frequency; the evolution "
            f"measure at t = {t} retains mass beyond the lattice and cannot be "
            f"represented on this grid"
        )
    damp = np.exp(-P.symbol_values * float(t))
    return inverse(SpectrumField(P.grid, damp.astype(complex)))


@dataclass(frozen=True)
class PhiLaw:
    """Odd-power nonlinearity Phi(z) = |z|^(sigma-1) z on |z| <= M."""

    sigma: float
    M: float = 1.0

    def __post_init__(self):
        if not self.sigma >= 1:
            raise DomainError(f"sigma must be >= 1, got {self.sigma}")
        if not self.M > 0:
            raise DomainError(f"M must be positive, got {self.M}")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.sigma == 1.0:
            return z.copy()
        return np.abs(z) ** (self.sigma - 1.0) * z

    def derivative_bound(self, amplitude):
        """sup |Phi'| on [-amplitude, amplitude] = sigma * amplitude^(sigma-1)."""
        if amplitude == 0.0:
            return 0.0
        return self.sigma * amplitude ** (self.sigma - 1.0)


def evolve_nonlinear(
    P: LinearPropagator,
    phi: PhiLaw,
    u0: GridField,
    t_end,
    snapshots,
    *,
    cfl=1.0,
):
    """Integrate du/dt = -L_J Phi(u); return fields at snapshot times.

    Explicit midpoint steps with dt <= cfl * 0.5 / (m_max |Phi'|_sup);
    each requested snapshot is hit exactly by clipping dt.  Growth of
    the sup-norm by more than 1% in a single step aborts with a
    StabilityError.
    """
    if not t_end > 0:
        raise DomainError(f"t_end must be positive, got {t_end}")
    if u0.grid != P.grid:
        raise GridMismatchError("field and propagator live on different grids")
    snaps = sorted(float(s) for s in snapshots)
    if snaps and (snaps[0] < 0 or snaps[-1] > t_end + 1e-12 * t_end):
        raise DomainError("snapshots must lie in [0, t_end]")
    sup0 = float(np.max(np.abs(u0.values)))
    if sup0 > phi.M * (1 + 1e-12):
        raise ContractError(
            f"initial sup-norm {sup0} exceeds the nonlinearity's validity bound M = {phi.M}"
        )
    if not 0 < cfl <= 1.0:
        raise DomainError(f"cfl must lie in (0, 1], got {cfl}")

    m = P.symbol_values
    m_max = P.m_max

    def rhs(vals):
        F = np.fft.fftn(vals)
        return -np.fft.ifftn(m * F).real

    out = []
    pending = list(snaps)
    t = 0.0
    u = u0.values.copy()
    sup = sup0
    while pending and math.isclose(pending[0], 0.0, abs_tol=1e-15):
        out.append(GridField(P.grid, u.copy()))
        pending.pop(0)

    while pending:
        target = pending[0]
        while t < target - 1e-13 * max(target, 1.0):
            dphi = phi.derivative_bound(sup)
            dt_stab = cfl * 0.5 / (m_max * dphi) if m_max * dphi > 0 else target - t
            dt = min(dt_stab, target - t)
            half = u + 0.5 * dt * rhs(phi(u))
            u_next = u + dt * rhs(phi(half))
            sup_next = float(np.max(np.abs(u_next)))
            if sup_next > sup * 1.01 + 1e-300:
                raise StabilityError(
                    f"sup-norm grew {sup:.6e} -> {sup_next:.6e} in one step at "
                    f"t = {t:.6e}",
                    dt=dt,
                )
            u = u_next
            sup = sup_next
            t += dt
        t = target
        out.append(GridField(P.grid, u.copy()))
        pending.pop(0)
    return out
