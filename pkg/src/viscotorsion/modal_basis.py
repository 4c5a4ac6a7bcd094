"""Orthonormal Dini basis on L^2((0, a), r dr) and projection of radial torques.

phi_1(s) = c_1 s and phi_n(s) = c_n J1(k_n s) for n >= 2 on the unit disc,
scaled as phi_n^a(r) = phi_n(r / a) / a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError, DomainError
from .quadrature import integrate
from .special_fn import bessel_j01, modal_roots

PROJECTION_RTOL = 1e-10
# relative slack when checking r against [0, a]
_EDGE_SLACK = 1e-12


@dataclass(frozen=True)
class ModeShape:
    n: int
    k_n: float | None
    c_n: float
    a: float

    @property
    def radial_wavenumber(self) -> float:
        """k_n / a, zero for the linear mode."""
        return 0.0 if self.k_n is None else self.k_n / self.a


def make_mode(n: int, roots, a: float) -> ModeShape:
    """Mode n of the basis; ``roots[0]`` is k_2."""
    if n < 1:
        raise ValueError("mode index starts at 1")
    if not a > 0:
        raise ValueError("radius must be positive")
    if n == 1:
        return ModeShape(1, None, 2.0, float(a))
    if n - 2 >= len(roots):
        raise IndexError(f"mode {n} needs {n - 1} roots, only {len(roots)} available")
    k = float(roots[n - 2])
    _, j1, _ = bessel_j01(np.array(k))
    # int_0^1 J1(k r)^2 r dr = J1(k)^2 / 2 when k J1'(k) = J1(k)
    return ModeShape(n, k, math.sqrt(2.0) / abs(float(j1)), float(a))


def make_modes(count: int, roots, a: float) -> list[ModeShape]:
    return [make_mode(n, roots, a) for n in range(1, count + 1)]


def _check_radius(r, a):
    if np.any(r < 0) or np.any(r > a * (1 + _EDGE_SLACK)):
        raise DomainError(f"radius outside [0, {a}]")


@dataclass(frozen=True)
class RadialTerms:
    value: np.ndarray
    derivative: np.ndarray
    antiderivative: np.ndarray
    over_r: np.ndarray
    # antiderivative shifted by a constant so that it solves Bessel's
    # order-0 equation; only differs from ``antiderivative`` for n >= 2
    helmholtz_potential: np.ndarray


def radial_terms(m: ModeShape, r) -> RadialTerms:
    r = np.asarray(r, dtype=float)
    _check_radius(r, m.a)
    a, c = m.a, m.c_n
    if m.k_n is None:
        value = c * r / a**2
        deriv = np.full_like(r, c / a**2)
        anti = c * r**2 / (2 * a**2)
        return RadialTerms(value, deriv, anti, deriv.copy(), anti)
    k = m.k_n
    j0, j1, j1x = bessel_j01(k * r / a)
    value = c * j1 / a
    over_r = c * k / a**2 * j1x
    deriv = c * k / a**2 * j0 - over_r
    anti = c * (1.0 - j0) / k
    return RadialTerms(value, deriv, anti, over_r, -c * j0 / k)


def eval_mode(m: ModeShape, r):
    """Return ``(phi_n^a(r), d/dr phi_n^a(r), int_0^r phi_n^a(s) ds)``."""
    t = radial_terms(m, r)
    if np.ndim(r) == 0:
        return float(t.value), float(t.derivative), float(t.antiderivative)
    return t.value, t.derivative, t.antiderivative


def mode_values(modes, r) -> np.ndarray:
    """Array of shape ``(len(modes), *r.shape)`` with phi_n^a(r)."""
    return np.stack([radial_terms(m, r).value for m in modes])


def gram_matrix(modes) -> np.ndarray:
    a = modes[0].a
    kmax = max(m.k_n or 1.0 for m in modes)

    def integrand(r):
        v = mode_values(modes, r)
        return v[:, None, :] * v[None, :, :] * r

    return integrate(integrand, 0.0, a, panel_width=2 * a / kmax, rtol=1e-12, atol=1e-14 / a)


# --- torque profiles -------------------------------------------------------

BUILTIN_TORQUES = ("zero", "linear", "power", "mode", "samples")


@dataclass(frozen=True)
class Torque:
    """Axisymmetric torque profile f(r) on the bottom face, 0 <= r <= a.

    ``kind`` is one of ``BUILTIN_TORQUES``. ``linear`` is ``tau0 * r / a``,
    ``power`` is ``tau0 * (r / a) ** p``, ``mode`` is ``amplitude * phi_n^a``
    and ``samples`` interpolates tabulated ``(r, f)`` with a monotone cubic.
    """

    kind: str
    a: float
    params: dict = field(default_factory=dict)
    r_samples: tuple = ()
    f_samples: tuple = ()

    def __post_init__(self):
        if self.kind not in BUILTIN_TORQUES:
            raise ConfigError(f"unknown torque kind {self.kind!r}; expected one of {BUILTIN_TORQUES}")
        if self.kind == "samples":
            r = np.asarray(self.r_samples, dtype=float)
            if r.size < 2 or len(self.f_samples) != r.size:
                raise ConfigError("sampled torque needs at least two (r, f) rows")
            if np.any(np.diff(r) <= 0):
                raise ConfigError("sampled torque radii must be strictly increasing")
            if r[0] < 0 or r[-1] > self.a * (1 + _EDGE_SLACK):
                raise ConfigError(f"sampled torque radii must lie in [0, {self.a}]")

    @classmethod
    def from_samples(cls, r, f, a: float) -> "Torque":
        return cls("samples", float(a), {}, tuple(map(float, r)), tuple(map(float, f)))

    @property
    def breakpoints(self) -> tuple:
        return self.r_samples if self.kind == "samples" else ()

    def _interp(self):
        r = np.asarray(self.r_samples)
        return PchipInterpolator(r, np.asarray(self.f_samples), extrapolate=True)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        p = self.params
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "linear":
            return p.get("tau0", 1.0) * r / self.a
        if self.kind == "power":
            return p.get("tau0", 1.0) * (r / self.a) ** p.get("p", 1.0)
        if self.kind == "mode":
            n = int(p["n"])
            roots = modal_roots(max(n - 1, 1))
            return p.get("amplitude", 1.0) * radial_terms(make_mode(n, roots, self.a), r).value
        return self._interp()(r)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "a": self.a, "params": dict(self.params)}
        if self.kind == "samples":
            d["r"] = list(self.r_samples)
            d["f"] = list(self.f_samples)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Torque":
        if d["kind"] == "samples":
            return cls.from_samples(d["r"], d["f"], d["a"])
        return cls(d["kind"], float(d["a"]), dict(d.get("params", {})))


@dataclass(frozen=True)
class TorqueSpectrum:
    coeffs: np.ndarray
    N: int
    h_half_diag: float
    decay_exponent: float | None = None
    boundary_mismatch: float | None = None

    @classmethod
    def from_coeffs(cls, coeffs, boundary_mismatch=None) -> "TorqueSpectrum":
        c = np.asarray(coeffs, dtype=complex)
        n = np.arange(1, c.size + 1)
        return cls(c, int(c.size), float(np.sum(np.abs(c) ** 2 / n)), decay_exponent(c), boundary_mismatch)

    def reconstruct(self, modes, r):
        """Truncated Dini sum of the first N modes at radii ``r``."""
        return np.tensordot(self.coeffs, mode_values(modes[: self.N], r), axes=1)


def decay_exponent(coeffs) -> float | None:
    """Least-squares slope p in |f_n|^2 ~ n^(-p); None with fewer than 3 usable terms."""
    mag2 = np.abs(np.asarray(coeffs)) ** 2
    if mag2.size == 0 or mag2.max() == 0:
        return None
    n = np.arange(1, mag2.size + 1)
    keep = mag2 > 1e-28 * mag2.max()
    if keep.sum() < 3:
        return None
    slope, _ = np.polyfit(np.log(n[keep]), np.log(mag2[keep]), 1)
    return float(-slope)


def _as_callable(f, a) -> tuple[Callable, tuple]:
    if isinstance(f, Torque):
        return f, f.breakpoints
    if isinstance(f, tuple) and len(f) == 2 and not callable(f[0]):
        t = Torque.from_samples(f[0], f[1], a)
        return t, t.breakpoints
    if callable(f):
        return f, ()
    raise TypeError("torque must be callable, a Torque or an (r, f) pair of samples")


def project_torque(f, modes, N: int | None = None) -> TorqueSpectrum:
    """Dini coefficients f_n = int_0^a f(r) phi_n^a(r) r dr for n = 1..N."""
    N = len(modes) if N is None else N
    if N < 1 or N > len(modes):
        raise ValueError(f"truncation N={N} needs 1 <= N <= {len(modes)}")
    modes = modes[:N]
    a = modes[0].a
    func, breaks = _as_callable(f, a)
    kmax = max(m.k_n or 1.0 for m in modes)

    def integrand(r):
        return mode_values(modes, r) * (np.asarray(func(r)) * r)

    # scale for the absolute floor: L2 norm of f under r dr
    norm2 = integrate(lambda r: np.abs(np.asarray(func(r), dtype=complex)) ** 2 * r, 0.0, a,
                      breakpoints=breaks, panel_width=a / 8, rtol=1e-8)
    floor = PROJECTION_RTOL * math.sqrt(float(np.real(norm2)))
    coeffs = integrate(integrand, 0.0, a, breakpoints=breaks, panel_width=2 * a / kmax,
                       rtol=PROJECTION_RTOL, atol=floor)
    coeffs = np.asarray(coeffs, dtype=complex)
    recon_a = complex(np.dot(coeffs, mode_values(modes, np.array([a]))[:, 0]))
    mismatch = abs(complex(np.asarray(func(np.array([a])))[0]) - recon_a)
    return TorqueSpectrum.from_coeffs(coeffs, boundary_mismatch=mismatch)
