"""Run configuration and the JSON verification report."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .numkit import FIRST, SECOND, Stencil

SCHEMA_VERSION = 1

# Upper bounds unless listed in LOWER_BOUNDS.
DEFAULT_TOLERANCES = {
    "sphere_axioms": 1e-10,
    "cone_kahler": 1e-6,
    "deta_factor": 1e-6,
    "omega_exponent": 1e-6,
    "phi_exponent": 1e-6,
    "regularity": 1e-6,
    "invariance": 1e-9,
    "level_frames": 1e-10,
    "radii": 1e-10,
    "product_metric": 1e-10,
    "shape_forms": 1e-6,
    "xi_shape_identities": 1e-10,
    "mixed_curvature": 1e-8,
    "xi_killing": 1e-9,
    "dimension": 0.5,
    "curvature_symmetry": 1e-6,
    "sasaki": 1e-4,
    "killing_zeta": 1e-4,
    "reeb_unit": 1e-8,
    "contact": 1e-6,
    "einstein": 1e-2,
    "oneill_A": 1e-8,
    "oneill_crosscheck": 1e-4,
    "cone_commutation": 1e-6,
    "control_sasaki_scaled": 0.1,
    "control_nijenhuis": 1e-2,
    "control_flow": 1e-2,
    "control_killing": 1e-2,
}

LOWER_BOUNDS = {"regularity", "contact", "control_sasaki_scaled", "control_nijenhuis",
                "control_flow", "control_killing"}

CHECK_GROUPS = {
    "sphere": ["sphere_axioms"],
    "cone": ["cone_kahler", "cone_commutation"],
    "scaling": ["deta_factor", "omega_exponent", "phi_exponent"],
    "action": ["regularity", "invariance"],
    "levelset": ["level_frames", "radii", "product_metric", "shape_forms", "xi_shape_identities",
                 "mixed_curvature", "xi_killing"],
    "quotient": ["dimension", "curvature_symmetry", "sasaki", "killing_zeta", "reeb_unit", "contact",
                 "einstein"],
    "oneill": ["oneill_A", "oneill_crosscheck"],
    "controls": ["control_sasaki_scaled", "control_nijenhuis", "control_flow", "control_killing"],
}

ALL_CHECKS = [name for group in CHECK_GROUPS.values() for name in group]


@dataclass
class RunConfig:
    weights: list
    n: int
    samples: int = 100
    charts: int = 10
    chart_points: int = 20
    cone_points: int = 20
    seed: int = 42
    first_stencil: Stencil = FIRST
    second_stencil: Stencil = SECOND
    tolerances: dict = field(default_factory=dict)
    checks: list = field(default_factory=lambda: list(ALL_CHECKS))
    example: str | None = None
    out: str | None = None
    csv: str | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        W = np.asarray(self.weights)
        if W.size and (W.ndim != 2 or W.shape[1] != self.n):
            raise ConfigError(f"weights of shape {W.shape} do not match n = {self.n}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance names: {sorted(unknown)}")
        self.checks = expand_checks(self.checks)

    def tolerance(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def wants(self, name: str) -> bool:
        return name in self.checks

    def environment(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "charts": self.charts,
            "chart_points": self.chart_points,
            "cone_points": self.cone_points,
            "stencils": {"first": asdict(self.first_stencil), "second": asdict(self.second_stencil)},
        }


def expand_checks(selection) -> list:
    out = []
    for item in selection:
        if item in CHECK_GROUPS:
            out.extend(CHECK_GROUPS[item])
        elif item in DEFAULT_TOLERANCES:
            out.append(item)
        elif item == "all":
            out.extend(ALL_CHECKS)
        else:
            raise ConfigError(f"unknown check {item!r}")
    return [c for c in ALL_CHECKS if c in out]


@dataclass
class CheckRecord:
    name: str
    residual: float | None
    tolerance: float
    comparison: str
    passed: bool | None
    detail: dict = field(default_factory=dict)
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "comparison": self.comparison,
            "pass": self.passed,
            "detail": self.detail,
            "error": self.error,
        }


class VerificationReport:
    def __init__(self, config: RunConfig):
        self.config = config
        self.checks: list[CheckRecord] = []
        self.measured: dict = {}
        self.discrepancies: list = []
        self.per_point: list = []
        self.subject: dict = {}

    def record(self, name, residual, detail=None, informational=False, error=None):
        tol = self.config.tolerance(name)
        lower = name in LOWER_BOUNDS
        if error is not None or residual is None:
            passed = None if informational else False
        elif informational:
            passed = None
        else:
            passed = bool(residual >= tol) if lower else bool(residual <= tol)
        rec = CheckRecord(name, None if residual is None else float(residual), tol,
                          ">=" if lower else "<=", passed, _plain(detail or {}), error)
        self.checks.append(rec)
        return rec

    def add_points(self, name, values):
        self.per_point.extend((name, i, float(v)) for i, v in enumerate(values))

    @property
    def verdict(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def to_json(self, timestamp=True) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "subject": _plain(self.subject),
            "checks": [c.to_json() for c in self.checks],
            "measured": _plain(self.measured),
            "discrepancies": _plain(self.discrepancies),
            "environment": self.config.environment(),
            "verdict": "pass" if self.verdict else "fail",
        }
        if timestamp:
            doc["timestamp"] = datetime.now(timezone.utc).isoformat()
        return doc

    def dumps(self, timestamp=True) -> str:
        return json.dumps(self.to_json(timestamp), indent=2, sort_keys=True)

    def write(self, path):
        Path(path).write_text(self.dumps() + "\n")

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["check", "index", "residual"])
            writer.writerows(self.per_point)


def _plain(obj):
    """Convert numpy scalars/arrays to JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "checks", "measured", "discrepancies", "environment", "verdict"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "timestamp": {"type": "string"},
        "subject": {"type": "object"},
        "verdict": {"enum": ["pass", "fail"]},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "residual", "tolerance", "comparison", "pass"],
                "properties": {
                    "name": {"type": "string"},
                    "residual": {"type": ["number", "null"]},
                    "tolerance": {"type": "number"},
                    "comparison": {"enum": ["<=", ">="]},
                    "pass": {"type": ["boolean", "null"]},
                    "detail": {"type": "object"},
                    "error": {"type": ["string", "null"]},
                },
            },
        },
        "measured": {
            "type": "object",
            "required": ["deta_factor", "omega_exponent", "phi_exponent"],
        },
        "discrepancies": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["quantity", "stated", "measured"],
            },
        },
        "environment": {
            "type": "object",
            "required": ["seed", "stencils"],
        },
    },
}
