"""Physical guiding fields built from normalized amplitudes.

The stationary continuity equation integrates to p = C / R^2 per sector,
with R = rho / sqrt(s) the physical amplitude.  C = 0 marks bound
(zero-current) sectors; C != 0 marks open ones.  Trajectories follow from
the first-order quadrature x' = C / (m R^2(x)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .catalog import SectorSpec
from .errors import (
    ConfigurationError,
    IntegrationFailureError,
    NodeApproachError,
    NodeSingularityError,
    PathExitsGridError,
    SingularEndpointError,
)
from .linear import DEFAULT_SETTINGS, IntegrationSettings
from .pinney import ErmakovAmplitude

_WEIGHT_FLOOR = 1e-12
_NODE_FLOOR = 1e-10
_TRAJECTORY_FLOOR = 1e-8


@dataclass(frozen=True)
class BohmSector:
    """Per-coordinate guiding-field bundle."""

    label: str
    C: float
    grid: np.ndarray
    R: np.ndarray
    p: np.ndarray
    Q: np.ndarray
    E_sector: float
    invariant: np.ndarray


@dataclass(frozen=True)
class FluxLedger:
    """Flux constants of all sectors of one run."""

    entries: tuple[tuple[str, float], ...]

    def total(self) -> float:
        return float(sum(c for _, c in self.entries))


@dataclass(frozen=True)
class FluxCheck:
    residual: float
    passed: bool
    enforced: bool
    note: str = ""


def physical_amplitude(amplitude: ErmakovAmplitude, sector: SectorSpec) -> np.ndarray:
    """R = rho / sqrt(s) on the amplitude grid."""
    s = np.asarray(sector.weight.value(amplitude.grid), dtype=float)
    bad = ~np.isfinite(s) | (s < _WEIGHT_FLOOR)
    if np.any(bad):
        raise SingularEndpointError(
            float(amplitude.grid[int(np.argmax(bad))]),
            "weight vanishes on the requested grid; clip it off the singular endpoint",
        )
    return amplitude.rho / np.sqrt(s)


def momentum_field(C: float, R: np.ndarray) -> np.ndarray:
    """p = C / R^2; identically zero for C = 0 regardless of nodes."""
    R = np.asarray(R, dtype=float)
    if C == 0.0:
        return np.zeros_like(R)
    nodes = np.abs(R) <= _NODE_FLOOR
    if np.any(nodes):
        raise NodeSingularityError(np.flatnonzero(nodes).tolist())
    return C / R**2


def quantum_potential(
    psi: np.ndarray, d2psi: np.ndarray, m: float = 1.0, hbar: float = 1.0
) -> np.ndarray:
    """Curvature potential -(hbar^2/2m) psi''/psi from explicit samples."""
    psi = np.asarray(psi, dtype=float)
    d2psi = np.asarray(d2psi, dtype=float)
    nodes = psi == 0.0
    if np.any(nodes):
        raise NodeSingularityError(np.flatnonzero(nodes).tolist())
    return -(hbar**2 / (2.0 * m)) * d2psi / psi


def quantum_potential_from_frequency(
    omega2: np.ndarray, m: float = 1.0, hbar: float = 1.0
) -> np.ndarray:
    """Curvature potential of a linear solution via psi'' = -Omega^2 psi."""
    return (hbar**2 / (2.0 * m)) * np.asarray(omega2, dtype=float)


def quantum_potential_ep(
    omega2: np.ndarray,
    k: float,
    rho: np.ndarray,
    m: float = 1.0,
    hbar: float = 1.0,
) -> np.ndarray:
    """Curvature potential of the amplitude itself.

    Substituting the amplitude equation rho'' = -Omega^2 rho + k/rho^3 gives
    -(hbar^2/2m) rho''/rho = (hbar^2/2m)(Omega^2 - k/rho^4), which is what
    enters the separated energy balance p^2/2m + V + Q = E.
    """
    rho = np.asarray(rho, dtype=float)
    return (hbar**2 / (2.0 * m)) * (np.asarray(omega2, dtype=float) - k / rho**4)


def trajectory(
    C: float,
    grid: np.ndarray,
    R: np.ndarray,
    m: float,
    x0: float,
    t_grid: np.ndarray,
    settings: IntegrationSettings | None = None,
) -> np.ndarray:
    """Solve x' = C / (m R^2(x)) from x(t0) = x0 on the given time grid.

    R is interpolated with a monotone-preserving cubic, which cannot invent
    spurious nodes between samples.  The integration stops with an error if
    the path leaves the field grid or approaches a node of R.
    """
    grid = np.asarray(grid, dtype=float)
    R = np.asarray(R, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    lo, hi = float(grid[0]), float(grid[-1])
    if not lo <= x0 <= hi:
        raise ConfigurationError(f"x0 = {x0!r} outside the field grid [{lo}, {hi}]")
    if C == 0.0:
        return np.full_like(t_grid, float(x0))
    settings = settings or DEFAULT_SETTINGS

    interp = PchipInterpolator(grid, R, extrapolate=True)
    v = C / m
    # Rounding pad: a path landing exactly on the grid boundary is not an exit.
    pad = 1e-9 * (hi - lo)

    def rhs(t, y):
        return (v / float(interp(y[0])) ** 2,)

    def exit_lo(t, y):
        return y[0] - (lo - pad)

    def exit_hi(t, y):
        return (hi + pad) - y[0]

    def node(t, y):
        return abs(float(interp(y[0]))) - _TRAJECTORY_FLOOR

    for ev in (exit_lo, exit_hi, node):
        ev.terminal = True

    kwargs = {}
    if math.isfinite(settings.max_step):
        kwargs["max_step"] = settings.max_step
    # dense output instead of t_eval: on failure the internal steps still
    # expose the last reached state
    sol = solve_ivp(
        rhs,
        (float(t_grid[0]), float(t_grid[-1])),
        (float(x0),),
        method="DOP853",
        dense_output=True,
        rtol=settings.rel_tol,
        atol=settings.abs_tol,
        events=(exit_lo, exit_hi, node),
        **kwargs,
    )
    if sol.t_events[0].size or sol.t_events[1].size:
        which = 0 if sol.t_events[0].size else 1
        t_exit = float(sol.t_events[which][0])
        raise PathExitsGridError(t_exit, float(sol.y_events[which][0][0]))
    if sol.t_events[2].size:
        raise NodeApproachError(
            float(sol.y_events[2][0][0]),
            f"trajectory approached an amplitude node at t = {float(sol.t_events[2][0])!r}",
        )
    if not sol.success:
        # The velocity C/(m R^2) blows up near a node; the solver may stall
        # on vanishing steps before the node event gets a clean root.
        x_last = float(sol.y[0][-1]) if sol.y.size else float(x0)
        if abs(float(interp(x_last))) <= 1e3 * _TRAJECTORY_FLOOR:
            raise NodeApproachError(
                x_last, f"trajectory stalled at an amplitude node near x = {x_last!r}"
            )
        raise IntegrationFailureError(f"trajectory integration failed: {sol.message}")
    return np.asarray(sol.sol(t_grid))[0]


def flux_constraint_check(ledger: FluxLedger, enforce: bool = True) -> FluxCheck:
    """Residual |sum C_i| against the stationary global constraint."""
    if not ledger.entries:
        raise ConfigurationError("flux ledger is empty")
    residual = abs(ledger.total())
    if not enforce:
        return FluxCheck(
            residual, True, False, "constraint not enforced (open/scattering sectors)"
        )
    return FluxCheck(residual, residual <= 1e-12, True)
