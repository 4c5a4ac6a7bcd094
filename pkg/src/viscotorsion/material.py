"""Complex Lame moduli, cylinder geometry and axial wavenumbers."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, MaterialError, ResonanceError
from .modal_basis import make_mode

# |1 + exp(-2 gamma h)| below this counts as a resonant denominator
RESONANCE_TOL = 1e-14


@dataclass(frozen=True)
class MaterialParams:
    """Viscoelastic material at a single angular frequency.

    Validation enforces strong convexity: Re mu > 0, Im mu > 0,
    3 Re lambda + 2 Re mu > 0 and 3 Im lambda + 2 Im mu > 0. With
    ``elastic_limit=True`` the two imaginary inequalities are relaxed to >= 0.
    """

    lam: complex
    mu: complex
    rho: float
    omega: float
    elastic_limit: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "mu", complex(self.mu))
        lam, mu = self.lam, self.mu
        for name, v in (("rho", self.rho), ("omega", self.omega)):
            if not (np.isfinite(v) and v > 0):
                raise MaterialError(f"{name} must be positive and finite, got {v}")
        if not (np.isfinite(lam) and np.isfinite(mu)):
            raise MaterialError("Lame moduli must be finite")
        bad = []
        if not mu.real > 0:
            bad.append("Re mu > 0")
        if not 3 * lam.real + 2 * mu.real > 0:
            bad.append("3 Re lambda + 2 Re mu > 0")
        if self.elastic_limit:
            if mu.imag < 0:
                bad.append("Im mu >= 0 (elastic limit)")
            if 3 * lam.imag + 2 * mu.imag < 0:
                bad.append("3 Im lambda + 2 Im mu >= 0 (elastic limit)")
        else:
            if not mu.imag > 0:
                bad.append("Im mu > 0")
            if not 3 * lam.imag + 2 * mu.imag > 0:
                bad.append("3 Im lambda + 2 Im mu > 0")
        if bad:
            hint = "" if self.elastic_limit else "; pass elastic_limit=True to allow Im mu = 0"
            raise MaterialError(
                "strong convexity condition violated: " + ", ".join(bad) + hint
            )


@dataclass(frozen=True)
class CylinderGeometry:
    a: float
    h: float

    def __post_init__(self):
        for name, v in (("a", self.a), ("h", self.h)):
            if not (np.isfinite(v) and v > 0):
                raise GeometryError(f"cylinder {name} must be positive and finite, got {v}")


@dataclass(frozen=True)
class ModalRoot:
    n: int
    k_n: float | None
    gamma: complex
    c_n: float

    @property
    def gamma_sq(self) -> complex:
        return self.gamma * self.gamma


def shear_wavenumber_sq(m: MaterialParams) -> complex:
    """k^2 = rho omega^2 / mu."""
    return m.rho * m.omega**2 / m.mu


def principal_gamma(gamma_sq: complex) -> complex:
    """Square root with Re >= 0; on the imaginary axis take Im > 0."""
    g = cmath.sqrt(complex(gamma_sq.real, gamma_sq.imag + 0.0))
    if g.real < 0 or (g.real == 0 and g.imag < 0):
        g = -g
    return g


def axial_wavenumbers(m: MaterialParams, g: CylinderGeometry, roots,
                      count: int | None = None) -> list[ModalRoot]:
    """gamma_n for n = 1..count from gamma_1^2 = -k^2, gamma_n^2 = k_n^2/a^2 - k^2.

    ``roots[0]`` is k_2. Raises ResonanceError when gamma_n = 0 or when the
    axial profile denominator 1 + exp(-2 gamma_n h) vanishes.
    """
    count = len(roots) + 1 if count is None else count
    k2 = shear_wavenumber_sq(m)
    out = []
    for n in range(1, count + 1):
        kn = None if n == 1 else float(roots[n - 2])
        gsq = -k2 if kn is None else (kn / g.a) ** 2 - k2
        if gsq == 0:
            raise ResonanceError(n, "gamma_n = 0")
        gamma = principal_gamma(gsq)
        if abs(1 + cmath.exp(-2 * gamma * g.h)) < RESONANCE_TOL:
            raise ResonanceError(n, "cosh(gamma_n h) = 0")
        out.append(ModalRoot(n, kn, gamma, make_mode(n, roots, g.a).c_n))
    return out
