"""Ermakov amplitudes by quadratic-form superposition, and their invariant.

Given a fundamental pair (y1, y2) of y'' + Omega^2(q) y = 0 with Wronskian
W, every positive solution of the nonlinear amplitude equation

    rho'' + Omega^2(q) rho = k / rho^3

is a quadratic form rho^2 = A y1^2 + B y2^2 + 2 D y1 y2 constrained by
A B - D^2 = k / W^2.  The conserved quantity certified here is

    I = ((rho y' - rho' y)^2 + k y^2 / rho^2) / 2,

constant in q for any partner solution y of the linear equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    ConfigurationError,
    ConstraintViolationError,
    GridMismatchError,
    IntegrationFailureError,
    NodeApproachError,
    NonpositiveFormError,
)
from .linear import DEFAULT_SETTINGS, Column, FundamentalPair, IntegrationSettings

CONSTRAINT_TOL = 1e-10
NODE_FLOOR = 1e-8


@dataclass(frozen=True)
class PinneyCoefficients:
    """Quadratic-form coefficients (A, B, D) with flux-squared constant k."""

    A: float
    B: float
    D: float
    k: float

    def __post_init__(self):
        if self.k < 0.0:
            raise ConfigurationError(f"flux-squared constant k must be >= 0, got {self.k!r}")
        if self.A < 0.0 or self.B < 0.0:
            raise ConfigurationError(
                f"A and B must be nonnegative for a positive amplitude, got ({self.A}, {self.B})"
            )

    def constraint_residual(self, wronskian: float) -> float:
        return abs(self.A * self.B - self.D**2 - self.k / wronskian**2)

    def validate(self, wronskian: float, tol: float = CONSTRAINT_TOL) -> None:
        target = self.k / wronskian**2
        residual = self.constraint_residual(wronskian)
        if residual > tol * max(1.0, abs(target)):
            raise ConstraintViolationError(residual, tol * max(1.0, abs(target)))


def coefficients_from_ab(
    A: float, B: float, k: float, wronskian: float, sign: float = 1.0
) -> PinneyCoefficients:
    """Complete (A, B, k) to valid coefficients via D = sign*sqrt(AB - k/W^2).

    A discriminant within rounding of zero is clamped to D = 0, so the
    boundary choice A*B = k/W^2 is representable.
    """
    target = k / wronskian**2
    disc = A * B - target
    if disc < 0.0:
        if abs(disc) <= 1e-12 * max(1.0, abs(target)):
            disc = 0.0
        else:
            raise ConfigurationError(
                f"A*B = {A * B!r} is below k/W^2 = {target!r}; no real D exists"
            )
    return PinneyCoefficients(A, B, math.copysign(math.sqrt(disc), sign), k)


def symmetric_coefficients(k: float, wronskian: float) -> PinneyCoefficients:
    """Default D = 0 coefficients: A = B = sqrt(k)/|W| (or (1,0,0) at k = 0)."""
    if k == 0.0:
        return PinneyCoefficients(1.0, 0.0, 0.0, 0.0)
    root = math.sqrt(k) / abs(wronskian)
    return PinneyCoefficients(root, root, 0.0, k)


@dataclass(frozen=True)
class ErmakovAmplitude:
    """Sampled amplitude rho > 0 with derivative and provenance.

    ``coefficients``/``pair`` are set when the amplitude came from the
    quadratic-form route and are None for directly integrated amplitudes.
    """

    grid: np.ndarray
    rho: np.ndarray
    drho: np.ndarray
    coefficients: PinneyCoefficients | None = None
    pair: FundamentalPair | None = None
    nodes: tuple[float, ...] = ()


def pinney_amplitude(
    coeffs: PinneyCoefficients,
    pair: FundamentalPair,
    constraint_tol: float = CONSTRAINT_TOL,
) -> ErmakovAmplitude:
    """Amplitude rho = sqrt(A y1^2 + B y2^2 + 2 D y1 y2) on the pair's grid.

    The derivative comes from the chain rule on the pair's exact derivative
    columns.  Inputs violating the constraint are rejected, not projected.
    For k = 0 the form may touch zero (bound-sector nodes); node locations
    are reported in the result instead of raising.
    """
    coeffs.validate(pair.W, constraint_tol)
    a, b, d = coeffs.A, coeffs.B, coeffs.D
    form = a * pair.y1**2 + b * pair.y2**2 + 2.0 * d * pair.y1 * pair.y2
    scale = float(np.max(form)) if form.size else 0.0
    if scale <= 0.0:
        raise NonpositiveFormError(float(pair.grid[int(np.argmin(form))]))
    bad = form < -1e-14 * scale
    if coeffs.k > 0.0:
        bad |= form <= 0.0
    if np.any(bad):
        raise NonpositiveFormError(float(pair.grid[int(np.argmax(bad))]))
    node_mask = form <= 1e-14 * scale
    form = np.where(node_mask, 0.0, form)
    rho = np.sqrt(form)
    dform = (
        a * pair.y1 * pair.dy1
        + b * pair.y2 * pair.dy2
        + d * (pair.dy1 * pair.y2 + pair.y1 * pair.dy2)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        drho = np.where(node_mask, np.nan, dform / np.where(node_mask, 1.0, rho))
    nodes = tuple(float(q) for q in pair.grid[node_mask])
    return ErmakovAmplitude(pair.grid, rho, drho, coeffs, pair, nodes)


def solve_ep_direct(
    profile,
    k: float,
    ic: tuple[float, float],
    interval: tuple[float, float],
    settings: IntegrationSettings = DEFAULT_SETTINGS,
    grid: np.ndarray | None = None,
    anchor: float | None = None,
) -> ErmakovAmplitude:
    """Integrate rho'' + Omega^2 rho = k/rho^3 directly (cross-check route).

    Initial data is posed at ``anchor`` (interval midpoint by default) and
    integrated outward.  Integration halts with :class:`NodeApproachError`
    if rho falls below the node floor, which k = 0 trajectories passing
    through zeros of the linear solution will do.
    """
    if ic[0] <= 0.0:
        raise ConfigurationError(f"initial amplitude must be positive, got {ic[0]!r}")
    if k < 0.0:
        raise ConfigurationError(f"k must be >= 0, got {k!r}")
    lo, hi = float(interval[0]), float(interval[1])
    if grid is None:
        grid = np.linspace(lo, hi, settings.dense_output)
    else:
        grid = np.asarray(grid, dtype=float)
    a = 0.5 * (lo + hi) if anchor is None else float(anchor)

    omega2 = profile.omega2_array

    def rhs(t, y):
        w2 = float(omega2(np.asarray(t)))
        rho = y[0]
        source = k / rho**3 if k != 0.0 else 0.0
        return (y[1], -w2 * rho + source)

    def node_event(t, y):
        return y[0] - NODE_FLOOR

    node_event.terminal = True
    node_event.direction = -1.0

    def run(span, t_eval):
        kwargs = {}
        if math.isfinite(settings.max_step):
            kwargs["max_step"] = settings.max_step
        sol = solve_ivp(
            rhs,
            span,
            (float(ic[0]), float(ic[1])),
            method="DOP853",
            t_eval=t_eval,
            rtol=settings.rel_tol,
            atol=settings.abs_tol,
            events=node_event,
            **kwargs,
        )
        if sol.t_events[0].size:
            raise NodeApproachError(float(sol.t_events[0][0]))
        if not sol.success or not np.all(np.isfinite(sol.y)):
            last = float(sol.t[-1]) if sol.t.size else float(span[0])
            raise IntegrationFailureError(
                f"amplitude integration failed: {sol.message}", last_q=last
            )
        return sol.y

    rho = np.empty_like(grid)
    drho = np.empty_like(grid)
    right = grid >= a
    if np.any(right):
        ys = run((a, max(hi, grid[right][-1])), grid[right])
        rho[right], drho[right] = ys[0], ys[1]
    if np.any(~right):
        ys = run((a, min(lo, grid[~right][0])), grid[~right][::-1])
        rho[~right], drho[~right] = ys[0][::-1], ys[1][::-1]
    return ErmakovAmplitude(grid, rho, drho)


def el_invariant(amplitude: ErmakovAmplitude, partner: Column, k: float) -> np.ndarray:
    """Invariant samples I(q) = ((rho y' - rho' y)^2 + k y^2/rho^2) / 2."""
    if amplitude.grid.shape != partner.grid.shape or not np.array_equal(
        amplitude.grid, partner.grid
    ):
        raise GridMismatchError("amplitude and partner column grids differ")
    cross = amplitude.rho * partner.dy - amplitude.drho * partner.y
    out = 0.5 * cross**2
    if k != 0.0:
        out = out + 0.5 * k * partner.y**2 / amplitude.rho**2
    return out


class DriftResult(NamedTuple):
    drift: float
    location: float
    absolute: bool


def invariant_drift(values: np.ndarray, grid: np.ndarray | None = None) -> DriftResult:
    """Max deviation of the samples from their midpoint value.

    Relative to the midpoint reference when it is meaningfully nonzero;
    otherwise the absolute deviation is returned with ``absolute=True``.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ConfigurationError("drift needs at least two samples")
    ref = float(values[values.size // 2])
    absolute = abs(ref) <= 1e-14
    dev = np.abs(values - ref)
    idx = int(np.argmax(dev))
    drift = float(dev[idx]) / max(abs(ref), 1e-14) if not absolute else float(dev[idx])
    where = float(grid[idx]) if grid is not None else float(idx)
    return DriftResult(drift, where, absolute)
