"""Run configuration, sampled-torque CSV and the solution artifact format."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .material import CylinderGeometry, MaterialParams, ModalRoot
from .modal_basis import ModeShape, Torque, TorqueSpectrum
from .solver import ModalSolution, assemble

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Flat run configuration; every key may appear in JSON or key=value text."""

    lambda_re: float | None = None
    lambda_im: float | None = None
    mu_re: float | None = None
    mu_im: float | None = None
    rho: float | None = None
    omega: float | None = None
    elastic_limit: bool = False
    a: float = 0.01
    h: float = 0.05
    torque: str = "linear"
    tau0: float = 1.0
    p: float = 1.0
    mode_n: int = 2
    amplitude: float = 1.0
    torque_csv: str | None = None
    N: int = 32
    grid_r: int = 24
    grid_theta: int = 16
    grid_z: int = 24
    fd_step: float | None = None
    out: str = "out"

    def material(self) -> MaterialParams:
        for key in ("lambda_re", "mu_re", "rho", "omega"):
            if getattr(self, key) is None:
                raise ConfigError(f"{key}: value required")
        for key, rel in (("mu_im", "Im mu > 0"), ("lambda_im", "3 Im lambda + 2 Im mu > 0")):
            if getattr(self, key) is None and not self.elastic_limit:
                raise ConfigError(
                    f"{key} missing: strong convexity condition requires {rel} "
                    "(set elastic_limit to allow a purely elastic medium)"
                )
        mu = complex(self.mu_re, self.mu_im or 0.0)
        lam = complex(self.lambda_re, self.lambda_im or 0.0)
        return MaterialParams(lam, mu, self.rho, self.omega, self.elastic_limit)

    def geometry(self) -> CylinderGeometry:
        return CylinderGeometry(self.a, self.h)

    def make_torque(self, base_dir: Path | None = None) -> Torque:
        if self.torque_csv:
            path = Path(self.torque_csv)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            r, f = read_torque_csv(path)
            return Torque.from_samples(r, f, self.a)
        params = {
            "zero": {},
            "linear": {"tau0": self.tau0},
            "power": {"tau0": self.tau0, "p": self.p},
            "mode": {"n": self.mode_n, "amplitude": self.amplitude},
        }
        if self.torque not in params:
            raise ConfigError(f"torque must be one of {sorted(params)} or torque_csv, got {self.torque!r}")
        return Torque(self.torque, self.a, params[self.torque])

    def to_dict(self) -> dict:
        return asdict(self)


# mu = (1 + 0.3i) MPa, lambda = 2 mu, rho = 1000 kg/m^3, 10 Hz, a = 1 cm, h = 5 cm
DEFAULT_CONFIG = RunConfig(lambda_re=2.0e6, lambda_im=0.6e6, mu_re=1.0e6, mu_im=0.3e6,
                           rho=1000.0, omega=2 * math.pi * 10)

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value):
    kind = _FIELD_TYPES[key]
    if value is None or (isinstance(value, str) and value.lower() in ("none", "null", "")):
        if "None" in kind:
            return None
        raise ConfigError(f"{key}: value required")
    try:
        if kind.startswith("bool"):
            if isinstance(value, str):
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                return value.lower() in ("true", "1", "yes")
            return bool(value)
        if kind.startswith("int"):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if kind.startswith("float"):
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse {value!r} as {kind}") from None


def config_from_mapping(d: dict) -> RunConfig:
    if "config" in d and isinstance(d["config"], dict):
        d = d["config"]
    unknown = set(d) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**{k: _coerce(k, v) for k, v in d.items()})


def parse_config_text(text: str) -> RunConfig:
    """Parse JSON or flat ``key = value`` lines (``#`` starts a comment)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return config_from_mapping(json.loads(stripped))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from None
    d = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        d[key] = value
    return config_from_mapping(d)


def load_config(path) -> RunConfig:
    return parse_config_text(Path(path).read_text())


def read_torque_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column ``r,f`` CSV with a header row."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError(f"{path}: empty torque CSV")
    header = [c.strip() for c in rows[0]]
    if header != ["r", "f"]:
        raise ConfigError(f"{path}: torque CSV header must be exactly 'r,f', got {','.join(header)!r}")
    r, f = [], []
    for i, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != 2:
            raise ConfigError(f"{path}:{i}: expected 2 columns, got {len(row)}")
        try:
            r.append(float(row[0]))
            f.append(float(row[1]))
        except ValueError:
            raise ConfigError(f"{path}:{i}: non-numeric value") from None
    return np.array(r), np.array(f)


# --- solution artifact -------------------------------------------------------

def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _uc(pair) -> complex:
    return complex(pair[0], pair[1])


def solution_to_dict(sol: ModalSolution, config: RunConfig | None = None) -> dict:
    m, g = sol.material, sol.geometry
    return {
        "schema_version": SCHEMA_VERSION,
        "config": None if config is None else config.to_dict(),
        "material": {"lambda": _c(m.lam), "mu": _c(m.mu), "rho": m.rho, "omega": m.omega,
                     "elastic_limit": m.elastic_limit},
        "geometry": {"a": g.a, "h": g.h},
        "torque": sol.torque.to_dict() if isinstance(sol.torque, Torque) else None,
        "modes": [
            {"n": md.n, "k_n": md.k_n, "c_n": md.c_n, "gamma": _c(md.gamma)} for md in sol.modes
        ],
        "spectrum": {
            "coeffs": [_c(c) for c in sol.spectrum.coeffs],
            "h_half_diag": sol.spectrum.h_half_diag,
            "decay_exponent": sol.spectrum.decay_exponent,
            "boundary_mismatch": sol.spectrum.boundary_mismatch,
        },
        "amplitude_bounds": [float(b) for b in sol.amplitude_bounds],
        "suggested_truncation": sol.suggested_truncation,
    }


def solution_from_dict(d: dict) -> ModalSolution:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported solution schema version {d.get('schema_version')!r}")
    try:
        m = d["material"]
        mat = MaterialParams(_uc(m["lambda"]), _uc(m["mu"]), m["rho"], m["omega"], m["elastic_limit"])
        geom = CylinderGeometry(**d["geometry"])
        modes = tuple(ModalRoot(x["n"], x["k_n"], _uc(x["gamma"]), x["c_n"]) for x in d["modes"])
        shapes = tuple(ModeShape(x.n, x.k_n, x.c_n, geom.a) for x in modes)
        s = d["spectrum"]
        spectrum = TorqueSpectrum(np.array([_uc(c) for c in s["coeffs"]]), len(s["coeffs"]),
                                  s["h_half_diag"], s["decay_exponent"], s["boundary_mismatch"])
        torque = Torque.from_dict(d["torque"]) if d.get("torque") else None
    except (KeyError, TypeError, IndexError) as exc:
        raise ConfigError(f"malformed solution file: {exc!r}") from None
    if len(modes) != spectrum.N:
        raise ConfigError("solution file: modes and spectrum lengths differ")
    return ModalSolution(mat, geom, modes, shapes, spectrum, torque,
                         np.array(d["amplitude_bounds"]), int(d["suggested_truncation"]))


def dump_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")


def save_solution(sol: ModalSolution, path, config: RunConfig | None = None):
    dump_json(solution_to_dict(sol, config), path)


def load_solution(path) -> ModalSolution:
    try:
        return solution_from_dict(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None


def solve_config(config: RunConfig, base_dir: Path | None = None) -> ModalSolution:
    return assemble(config.material(), config.geometry(), config.make_torque(base_dir), config.N)
