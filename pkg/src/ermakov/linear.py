"""Adaptive integration of the linear partner equation y'' + Omega^2(q) y = 0.

The equation has no first-derivative term, so the Wronskian of any two
solutions is exactly constant; the engine certifies each integrated pair by
measuring the pointwise drift of y1*y2' - y1'*y2 against its anchor value.

Integration uses an adaptive embedded Runge-Kutta method of order 8(5,3)
(DOP853) with output sampled on the caller's grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigurationError, IntegrationFailureError, SingularEndpointError


@dataclass(frozen=True)
class IntegrationSettings:
    """Tolerances and output density for one integration run.

    The defaults are tight because integrated pairs feed the invariant
    certificates: at 1e-10 relative tolerance the parabolic-cylinder pair
    already shows ~3e-9 Wronskian drift on [-4, 4], which would eat the
    whole certification budget.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_step: float = math.inf
    dense_output: int = 2001

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ConfigurationError("tolerances must be positive")
        if self.max_step <= 0:
            raise ConfigurationError("max_step must be positive")
        if self.dense_output < 2:
            raise ConfigurationError("dense_output must be at least 2")


DEFAULT_SETTINGS = IntegrationSettings()


@dataclass(frozen=True)
class Column:
    """One sampled solution with its derivative."""

    grid: np.ndarray
    y: np.ndarray
    dy: np.ndarray


@dataclass(frozen=True)
class FundamentalPair:
    """Two independent solutions on a shared grid with constant Wronskian W."""

    grid: np.ndarray
    y1: np.ndarray
    dy1: np.ndarray
    y2: np.ndarray
    dy2: np.ndarray
    W: float

    def __post_init__(self):
        if self.W == 0.0:
            raise ConfigurationError("fundamental pair requires a nonzero Wronskian")
        if np.any(np.diff(self.grid) <= 0):
            raise ConfigurationError("pair grid must be strictly increasing")

    def column(self, index: int) -> Column:
        if index == 1:
            return Column(self.grid, self.y1, self.dy1)
        if index == 2:
            return Column(self.grid, self.y2, self.dy2)
        raise ConfigurationError(f"column index must be 1 or 2, got {index!r}")

    def wronskian_samples(self) -> np.ndarray:
        return self.y1 * self.dy2 - self.dy1 * self.y2

    def subgrid(self, indices) -> "FundamentalPair":
        """Restriction of the pair to a subset of grid points."""
        idx = np.asarray(indices)
        return FundamentalPair(
            self.grid[idx], self.y1[idx], self.dy1[idx], self.y2[idx], self.dy2[idx], self.W
        )


def wronskian_check(pair: FundamentalPair) -> float:
    """Max absolute drift of the pointwise Wronskian from the pair's W."""
    return float(np.max(np.abs(pair.wronskian_samples() - pair.W)))


def _rhs(profile):
    omega2 = profile.omega2_array

    def rhs(t, y):
        try:
            w2 = float(omega2(np.asarray(t)))
        except (SingularEndpointError, FloatingPointError, ZeroDivisionError):
            w2 = math.nan
        return (y[1], -w2 * y[0])

    return rhs


def _run_ivp(profile, span, y0, t_eval, settings):
    if span[0] == span[1]:
        return np.asarray([]), np.zeros((2, 0))
    kwargs = {}
    if math.isfinite(settings.max_step):
        kwargs["max_step"] = settings.max_step
    sol = solve_ivp(
        _rhs(profile),
        span,
        y0,
        method="DOP853",
        t_eval=t_eval,
        rtol=settings.rel_tol,
        atol=settings.abs_tol,
        dense_output=False,
        **kwargs,
    )
    if not sol.success or not np.all(np.isfinite(sol.y)):
        last = float(sol.t[-1]) if sol.t.size else float(span[0])
        raise IntegrationFailureError(
            f"integration failed: {sol.message}", last_q=last
        )
    return sol.t, sol.y


def integrate_normal_form(
    profile,
    interval: tuple[float, float],
    ic: tuple[float, float],
    settings: IntegrationSettings = DEFAULT_SETTINGS,
    grid: np.ndarray | None = None,
    anchor: float | None = None,
) -> Column:
    """Integrate y'' + Omega^2 y = 0 with data ``ic`` posed at ``anchor``.

    The anchor defaults to the left end of ``interval``.  When it lies in
    the interior the two half-ranges are integrated outward separately, so
    the returned samples cover the whole grid.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ConfigurationError(f"empty integration interval {interval!r}")
    if ic[0] == 0.0 and ic[1] == 0.0:
        raise ConfigurationError("initial data (0, 0) only generates the trivial solution")
    if grid is None:
        grid = np.linspace(lo, hi, settings.dense_output)
    else:
        grid = np.asarray(grid, dtype=float)
        if np.any(np.diff(grid) <= 0):
            raise ConfigurationError("output grid must be strictly increasing")
        if grid[0] < lo - 1e-12 or grid[-1] > hi + 1e-12:
            raise ConfigurationError("output grid exceeds the integration interval")
    a = lo if anchor is None else float(anchor)
    if not lo <= a <= hi:
        raise ConfigurationError(f"anchor {a!r} outside interval {interval!r}")

    y = np.empty_like(grid)
    dy = np.empty_like(grid)
    y0 = (float(ic[0]), float(ic[1]))

    right = grid >= a
    if np.any(right):
        t, ys = _run_ivp(profile, (a, max(hi, grid[right][-1])), y0, grid[right], settings)
        y[right], dy[right] = ys[0], ys[1]
    left = ~right
    if np.any(left):
        t, ys = _run_ivp(profile, (a, min(lo, grid[left][0])), y0, grid[left][::-1], settings)
        y[left], dy[left] = ys[0][::-1], ys[1][::-1]
    return Column(grid, y, dy)


def fundamental_pair(
    profile,
    interval: tuple[float, float],
    anchor: float,
    settings: IntegrationSettings = DEFAULT_SETTINGS,
    grid: np.ndarray | None = None,
    ic1: tuple[float, float] = (1.0, 0.0),
    ic2: tuple[float, float] = (0.0, 1.0),
) -> FundamentalPair:
    """Pair with data ic1/ic2 at the anchor (identity data by default, W = 1)."""
    lo, hi = interval
    if not lo <= anchor <= hi:
        raise ConfigurationError(f"anchor {anchor!r} outside interval {interval!r}")
    c1 = integrate_normal_form(profile, interval, ic1, settings, grid=grid, anchor=anchor)
    c2 = integrate_normal_form(profile, interval, ic2, settings, grid=c1.grid, anchor=anchor)
    w = ic1[0] * ic2[1] - ic1[1] * ic2[0]
    if w == 0.0:
        raise ConfigurationError("initial data sets are linearly dependent")
    return FundamentalPair(c1.grid, c1.y, c1.dy, c2.y, c2.dy, float(w))


def companion_pair(
    profile,
    column: Column,
    settings: IntegrationSettings | None = None,
) -> FundamentalPair:
    """Complete a single solution column with a second-kind companion.

    The companion is generated by identity-type data (0, 1) posed where the
    given column is largest in magnitude, so W = y1(anchor) is well away
    from zero.
    """
    idx = int(np.argmax(np.abs(column.y)))
    anchor = float(column.grid[idx])
    w = float(column.y[idx])
    if w == 0.0:
        raise ConfigurationError("column vanishes identically; no companion exists")
    c2 = integrate_normal_form(
        profile,
        (float(column.grid[0]), float(column.grid[-1])),
        (0.0, 1.0),
        settings or DEFAULT_SETTINGS,
        grid=column.grid,
        anchor=anchor,
    )
    return FundamentalPair(column.grid, column.y, column.dy, c2.y, c2.dy, w)


def clip_interval(
    sector, interval: tuple[float, float], offset_fraction: float = 1e-3
) -> tuple[float, float]:
    """Pull the interval off singular sector endpoints by a fixed fraction."""
    lo, hi = float(interval[0]), float(interval[1])
    span = hi - lo
    pad = offset_fraction * span
    if lo in sector.singular_endpoints:
        lo += pad
    if hi in sector.singular_endpoints:
        hi -= pad
    if not lo < hi:
        raise ConfigurationError("interval collapsed while clipping singular endpoints")
    return lo, hi
