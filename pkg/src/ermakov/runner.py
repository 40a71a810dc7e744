"""Configuration-driven pipeline runner.

Reads a flat key=value run description, executes each sector pipeline
(profile -> pair -> quadratic form -> invariant -> fields -> trajectories),
and emits field tables plus a certification report.  Outputs are
deterministic: fixed column and key order, reals rendered with 17
significant digits, and write-then-rename file emission so failures leave
no partial files.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .fields import (
    FluxCheck,
    FluxLedger,
    flux_constraint_check,
    momentum_field,
    physical_amplitude,
    quantum_potential_ep,
    trajectory,
)
from .linear import FundamentalPair, IntegrationSettings, wronskian_check
from .pinney import (
    ErmakovAmplitude,
    PinneyCoefficients,
    coefficients_from_ab,
    el_invariant,
    invariant_drift,
    pinney_amplitude,
    symmetric_coefficients,
)
from .problems import ProblemSpec, SectorSetup, build_problem

FIELD_COLUMNS = ("q", "omega2", "y1", "y2", "wronskian", "rho", "R", "p", "Q", "invariant")
OUTPUT_FORMATS = ("csv", "json-lines")


@dataclass(frozen=True)
class Tolerances:
    invariant: float = 1e-8
    wronskian: float = 1e-9
    pinney: float = 1e-10
    continuity: float = 1e-10
    flux: float = 1e-12
    ode_residual: float = 1e-3

    def as_dict(self) -> dict:
        return {
            "invariant": self.invariant,
            "wronskian": self.wronskian,
            "pinney": self.pinney,
            "continuity": self.continuity,
            "flux": self.flux,
            "ode_residual": self.ode_residual,
        }


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemSpec
    settings: IntegrationSettings | None = None  # None: per-component defaults
    tolerances: Tolerances = Tolerances()
    pinney: dict = field(default_factory=dict)  # label -> {"A":..,"B":..,"D":..}
    trajectories: dict = field(default_factory=dict)  # label -> [(x0, t_end, n)]
    flux_enforce: bool = False
    output_dir: str = "out"
    output_format: str = "csv"

    def __post_init__(self):
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigurationError(
                f"output.format must be one of {OUTPUT_FORMATS}, got {self.output_format!r}"
            )


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def _parse_scalar(text: str):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return float(text)
    except ValueError:
        return text


def _parse_triplet(text: str, key: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigurationError(f"{key}: expected lo:hi:n, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), float(parts[2])
    except ValueError:
        raise ConfigurationError(f"{key}: non-numeric entry in {text!r}") from None


_SECTOR_KEYS = ("C", "k", "A", "B", "D", "grid")
_INTEGRATION_KEYS = ("rel_tol", "abs_tol", "max_step", "samples")
_TOLERANCE_KEYS = ("invariant", "wronskian", "pinney", "continuity", "flux", "ode_residual")


def parse_config_text(text: str) -> RunConfig:
    """Parse the flat dotted key=value run description."""
    entries: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigurationError(f"line {lineno}: empty key or value")
        if key in entries:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value

    problem_kind = None
    problem_mh = {"m": 1.0, "hbar": 1.0}
    params: dict[str, object] = {}
    flux: dict[str, float] = {}
    k_sector: dict[str, float] = {}
    grids: dict[str, tuple[float, float, int]] = {}
    pinney: dict[str, dict[str, float]] = {}
    trajectories: dict[str, list[tuple[float, float, int]]] = {}
    integration: dict[str, float] = {}
    tol_kw: dict[str, float] = {}
    flux_enforce = False
    output_dir = "out"
    output_format = "csv"

    for key, raw_value in entries.items():
        parts = key.split(".")
        section = parts[0]
        if section == "problem" and len(parts) == 2:
            name = parts[1]
            value = _parse_scalar(raw_value)
            if name == "kind":
                problem_kind = str(raw_value)
            elif name in ("m", "hbar"):
                problem_mh[name] = float(value)
            else:
                params[name] = value
        elif section == "sector" and len(parts) == 3 and parts[2] in _SECTOR_KEYS:
            label, what = parts[1], parts[2]
            if what == "grid":
                lo, hi, n = _parse_triplet(raw_value, key)
                grids[label] = (lo, hi, int(n))
            elif what == "C":
                flux[label] = float(_parse_scalar(raw_value))
            elif what == "k":
                k_sector[label] = float(_parse_scalar(raw_value))
            else:
                pinney.setdefault(label, {})[what] = float(_parse_scalar(raw_value))
        elif section == "trajectory" and len(parts) == 3:
            label = parts[1]
            x0, t_end, n = _parse_triplet(raw_value, key)
            trajectories.setdefault(label, []).append((x0, t_end, int(n)))
        elif section == "integration" and len(parts) == 2 and parts[1] in _INTEGRATION_KEYS:
            integration[parts[1]] = float(_parse_scalar(raw_value))
        elif section == "tolerance" and len(parts) == 2 and parts[1] in _TOLERANCE_KEYS:
            tol_kw[parts[1]] = float(_parse_scalar(raw_value))
        elif key == "flux.enforce":
            value = _parse_scalar(raw_value)
            if not isinstance(value, bool):
                raise ConfigurationError(f"flux.enforce must be true/false, got {raw_value!r}")
            flux_enforce = value
        elif key == "output.dir":
            output_dir = raw_value
        elif key == "output.format":
            output_format = raw_value
        else:
            raise ConfigurationError(f"unknown configuration key {key!r}")

    if problem_kind is None:
        raise ConfigurationError("missing required key problem.kind")
    spec = ProblemSpec(
        kind=problem_kind,
        m=problem_mh["m"],
        hbar=problem_mh["hbar"],
        params=params,
        flux=flux,
        k_sector=k_sector,
        grids=grids,
    )
    settings_kw = {}
    if "rel_tol" in integration:
        settings_kw["rel_tol"] = integration["rel_tol"]
    if "abs_tol" in integration:
        settings_kw["abs_tol"] = integration["abs_tol"]
    if "max_step" in integration:
        settings_kw["max_step"] = integration["max_step"]
    if "samples" in integration:
        settings_kw["dense_output"] = int(integration["samples"])
    return RunConfig(
        problem=spec,
        settings=IntegrationSettings(**settings_kw) if settings_kw else None,
        tolerances=Tolerances(**tol_kw),
        pinney=pinney,
        trajectories=trajectories,
        flux_enforce=flux_enforce,
        output_dir=output_dir,
        output_format=output_format,
    )


def parse_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from None
    return parse_config_text(text)


# ---------------------------------------------------------------------------
# Sector pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectorResult:
    label: str
    setup: SectorSetup
    pair: FundamentalPair
    coefficients: PinneyCoefficients
    amplitude: ErmakovAmplitude
    omega2: np.ndarray
    R: np.ndarray
    p: np.ndarray
    Q: np.ndarray
    invariant: np.ndarray
    invariant_drift: float
    invariant_absolute: bool
    wronskian_drift: float
    pinney_residual: float
    continuity_residual: float
    ode_residual: float
    trajectories: tuple[tuple[tuple[float, float, int], np.ndarray, np.ndarray], ...] = ()


def _resolve_coefficients(
    setup: SectorSetup, pair: FundamentalPair, override: dict | None
) -> PinneyCoefficients:
    override = override or {}
    if "A" in override and "B" in override and "D" in override:
        return PinneyCoefficients(override["A"], override["B"], override["D"], setup.k)
    if "A" in override and "B" in override:
        return coefficients_from_ab(override["A"], override["B"], setup.k, pair.W)
    if override:
        raise ConfigurationError(
            f"sector {setup.label!r}: give (A, B) or (A, B, D) to override the"
            " quadratic form"
        )
    return symmetric_coefficients(setup.k, pair.W)


def _ode_residual(grid: np.ndarray, y: np.ndarray, omega2: np.ndarray) -> float:
    """Scaled max residual of the second divided difference against -Omega^2 y."""
    h = np.diff(grid)
    if not np.allclose(h, h[0], rtol=1e-8, atol=0.0):
        return math.nan
    step = float(h[0])
    interior = (y[:-2] - 2.0 * y[1:-1] + y[2:]) / step**2 + omega2[1:-1] * y[1:-1]
    scale = max(1.0, float(np.max(np.abs(omega2 * y))))
    return float(np.max(np.abs(interior))) / scale


def execute_sector(
    setup: SectorSetup,
    settings: IntegrationSettings | None = None,
    pinney_override: dict | None = None,
    trajectory_requests: list[tuple[float, float, int]] | None = None,
) -> SectorResult:
    """Run the full pipeline for one sector."""
    pair = setup.build_pair(settings)
    coeffs = _resolve_coefficients(setup, pair, pinney_override)
    amplitude = pinney_amplitude(coeffs, pair)
    inv = el_invariant(amplitude, pair.column(1), setup.k)
    drift = invariant_drift(inv, grid=pair.grid)
    omega2 = setup.profile.omega2_array(pair.grid)
    big_r = physical_amplitude(amplitude, setup.sector)
    p = momentum_field(setup.C, big_r)
    q_pot = quantum_potential_ep(
        omega2, setup.k, amplitude.rho, m=setup.profile.m, hbar=setup.profile.hbar
    )
    cont = np.max(np.abs(p * big_r**2 - setup.C))
    cont_scale = abs(setup.C) if setup.C != 0.0 else 1.0
    trajs = []
    for request in trajectory_requests or []:
        x0, t_end, n = request
        t_grid = np.linspace(0.0, t_end, int(n))
        x_t = trajectory(setup.C, pair.grid, big_r, setup.profile.m, x0, t_grid, settings)
        trajs.append((request, t_grid, x_t))
    return SectorResult(
        label=setup.label,
        setup=setup,
        pair=pair,
        coefficients=coeffs,
        amplitude=amplitude,
        omega2=omega2,
        R=big_r,
        p=p,
        Q=q_pot,
        invariant=inv,
        invariant_drift=drift.drift,
        invariant_absolute=drift.absolute,
        wronskian_drift=wronskian_check(pair),
        pinney_residual=coeffs.constraint_residual(pair.W),
        continuity_residual=float(cont) / cont_scale,
        ode_residual=_ode_residual(pair.grid, pair.y1, omega2),
        trajectories=tuple(trajs),
    )


# ---------------------------------------------------------------------------
# Certification report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CertificationReport:
    problem_kind: str
    tolerances: Tolerances
    sectors: tuple[dict, ...]
    flux: FluxCheck
    verdict: str

    def as_dict(self) -> dict:
        return {
            "problem": self.problem_kind,
            "tolerances": self.tolerances.as_dict(),
            "sectors": list(self.sectors),
            "flux": {
                "enforced": self.flux.enforced,
                "residual": self.flux.residual,
                "pass": self.flux.passed,
                "note": self.flux.note,
            },
            "verdict": self.verdict,
        }


def _sector_report(result: SectorResult, tol: Tolerances) -> dict:
    coeffs = result.coefficients
    target = coeffs.k / result.pair.W**2
    checks = {
        "invariant": result.invariant_drift <= tol.invariant,
        "wronskian": result.wronskian_drift <= tol.wronskian * max(1.0, abs(result.pair.W)),
        "pinney": result.pinney_residual <= tol.pinney * max(1.0, abs(target)),
        "continuity": result.continuity_residual <= tol.continuity,
        "ode_residual": (
            math.isnan(result.ode_residual) or result.ode_residual <= tol.ode_residual
        ),
    }
    return {
        "label": result.label,
        "points": int(result.pair.grid.size),
        "C": result.setup.C,
        "k": result.setup.k,
        "wronskian": result.pair.W,
        "coefficients": {"A": coeffs.A, "B": coeffs.B, "D": coeffs.D},
        "invariant_reference": float(result.invariant[result.invariant.size // 2]),
        "invariant_drift": result.invariant_drift,
        "invariant_drift_absolute": result.invariant_absolute,
        "wronskian_drift": result.wronskian_drift,
        "pinney_residual": result.pinney_residual,
        "continuity_residual": result.continuity_residual,
        "ode_residual": result.ode_residual,
        "checks": checks,
        "pass": all(checks.values()),
    }


def certify(results: list[SectorResult], tolerances: Tolerances, flux_enforce: bool,
            problem_kind: str) -> CertificationReport:
    sector_reports = tuple(_sector_report(r, tolerances) for r in results)
    ledger = FluxLedger(tuple((r.label, r.setup.C) for r in results))
    flux = flux_constraint_check(ledger, enforce=flux_enforce)
    flux_ok = flux.passed or flux.residual <= tolerances.flux or not flux_enforce
    verdict = "pass" if all(s["pass"] for s in sector_reports) and flux_ok else "fail"
    return CertificationReport(problem_kind, tolerances, sector_reports, flux, verdict)


# ---------------------------------------------------------------------------
# Deterministic serialization
# ---------------------------------------------------------------------------

def format_real(x: float) -> str:
    """Reals with 17 significant digits (round-trip exact for doubles)."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def _json_render(value, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_json_render(v, indent + 1)}'
            for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = ",\n".join(f"{pad}  {_json_render(v, indent + 1)}" for v in value)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = format_real(float(value))
        return json.dumps(text) if text in ("nan", "inf", "-inf") else text
    if value is None:
        return "null"
    return json.dumps(str(value))


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data)
    os.replace(tmp, path)


def emit_report(report: CertificationReport, path: str | Path) -> Path:
    """Serialize the report deterministically (fixed key order, 17 digits)."""
    path = Path(path)
    _atomic_write(path, _json_render(report.as_dict()) + "\n")
    return path


def _field_rows(result: SectorResult) -> np.ndarray:
    return np.column_stack(
        [
            result.pair.grid,
            result.omega2,
            result.pair.y1,
            result.pair.y2,
            result.pair.wronskian_samples(),
            result.amplitude.rho,
            result.R,
            result.p,
            result.Q,
            result.invariant,
        ]
    )


def _table_text(columns: tuple[str, ...], rows: np.ndarray, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(format_real(v) for v in row))
        return "\n".join(lines) + "\n"
    lines = []
    for row in rows:
        body = ", ".join(
            f"{json.dumps(name)}: {format_real(v)}" for name, v in zip(columns, row)
        )
        lines.append("{" + body + "}")
    return "\n".join(lines) + "\n"


def run_config(config: RunConfig, output_dir: str | Path | None = None):
    """Execute every sector, certify, and emit field files plus the report.

    Returns (report, written paths).  Files are rendered in memory first and
    written only after the whole run succeeded, each atomically.
    """
    out = Path(output_dir if output_dir is not None else config.output_dir)
    setups = build_problem(config.problem)
    known = {s.label for s in setups}
    referenced = (
        set(config.pinney)
        | set(config.trajectories)
        | set(config.problem.flux)
        | set(config.problem.k_sector)
        | set(config.problem.grids)
    )
    for label in sorted(referenced - known):
        raise ConfigurationError(
            f"config references unknown sector {label!r}; sectors: {sorted(known)}"
        )
    results = [
        execute_sector(
            setup,
            config.settings,
            pinney_override=config.pinney.get(setup.label),
            trajectory_requests=config.trajectories.get(setup.label),
        )
        for setup in setups
    ]
    report = certify(results, config.tolerances, config.flux_enforce, config.problem.kind)

    suffix = "csv" if config.output_format == "csv" else "jsonl"
    rendered: dict[str, str] = {}
    for result in results:
        rendered[f"{result.label}_fields.{suffix}"] = _table_text(
            FIELD_COLUMNS, _field_rows(result), config.output_format
        )
        for i, (request, t_grid, x_t) in enumerate(result.trajectories, start=1):
            rendered[f"{result.label}_trajectory_{i}.{suffix}"] = _table_text(
                ("t", "x"), np.column_stack([t_grid, x_t]), config.output_format
            )

    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in rendered.items():
        path = out / name
        _atomic_write(path, text)
        written.append(path)
    written.append(emit_report(report, out / "report.json"))
    return report, written
