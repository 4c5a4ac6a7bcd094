"""Point evaluation of displacement, tractions and the stream potential psi."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .modal_basis import radial_terms
from .solver import ModalSolution, cosh_ratio, q_profile, q_profile_dz

TRACTION_NAMES = ("t_rr", "t_rtheta", "t_rz", "t_ztheta", "t_zz")
_EDGE_SLACK = 1e-12


@dataclass(frozen=True)
class FieldSample:
    r: np.ndarray
    theta: np.ndarray
    z: np.ndarray
    u_cart: np.ndarray  # (..., 3)
    u_cyl: np.ndarray  # (..., 3): u_r, u_theta, u_z
    tractions: dict
    psi: np.ndarray

    @property
    def t_zr(self):
        return self.tractions["t_rz"]


@dataclass(frozen=True)
class _Sums:
    v: np.ndarray  # sum f_n v_n; u_theta = -v
    dv_dr: np.ndarray
    v_over_r: np.ndarray
    dv_dz: np.ndarray
    psi: np.ndarray
    psi_helmholtz: np.ndarray


def check_domain(sol: ModalSolution, r, z):
    a, h = sol.geometry.a, sol.geometry.h
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    bad = (r < 0) | (r > a * (1 + _EDGE_SLACK)) | (z < -h * _EDGE_SLACK) | (z > h * (1 + _EDGE_SLACK))
    if np.any(bad):
        raise DomainError(f"{int(np.sum(bad))} point(s) outside the cylinder 0<=r<={a}, 0<=z<={h}")
    return np.clip(r, 0, a), np.clip(z, 0, h)


def inside(sol: ModalSolution, r, z) -> np.ndarray:
    a, h = sol.geometry.a, sol.geometry.h
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    return (r >= 0) & (r <= a * (1 + _EDGE_SLACK)) & (z >= -h * _EDGE_SLACK) & (z <= h * (1 + _EDGE_SLACK))


def _sums(sol: ModalSolution, r, z, need_potential: bool = True) -> _Sums:
    r, z = check_domain(sol, r, z)
    r, z = np.broadcast_arrays(r, z)
    mu, h, a = sol.material.mu, sol.geometry.h, sol.geometry.a
    zero = np.zeros(r.shape, dtype=complex)
    v, dv_dr, v_over_r, dv_dz, psi, psi_h = (zero.copy() for _ in range(6))
    for shape, mode, fn in zip(sol.shapes, sol.modes, sol.spectrum.coeffs):
        if fn == 0:
            continue
        amp = fn / (mu * mode.gamma)
        rad = radial_terms(shape, r)
        q = q_profile(mode.gamma, h, z)
        dq = q_profile_dz(mode.gamma, h, z)
        v += amp * q * rad.value
        dv_dr += amp * q * rad.derivative
        v_over_r += amp * q * rad.over_r
        dv_dz += amp * dq * rad.value
        if need_potential:
            psi += amp * q * rad.antiderivative
            term = rad.helmholtz_potential * q
            if shape.k_n is None:
                # z-only term cancelling (d_rr + d_r / r) of c_1 r^2 / (2 a^2)
                term = term - shape.c_n / (a**2 * mode.gamma) * (h - z) * cosh_ratio(mode.gamma, h, z)
            psi_h += amp * term
    return _Sums(v, dv_dr, v_over_r, dv_dz, psi, psi_h)


def _cart(v, theta):
    return np.stack([v * np.sin(theta), -v * np.cos(theta), np.zeros_like(v)], axis=-1)


def displacement(sol: ModalSolution, r, theta, z):
    """``(u_cart, u_cyl)`` with u_theta = -sum f_n v_n and u_r = u_z = 0."""
    s = _sums(sol, r, z, need_potential=False)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), s.v.shape)
    u_cyl = np.stack([np.zeros_like(s.v), -s.v, np.zeros_like(s.v)], axis=-1)
    return _cart(s.v, theta), u_cyl


def displacement_cartesian(sol: ModalSolution, x, y, z):
    """u in Cartesian components at Cartesian points."""
    x, y, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z)))
    s = _sums(sol, np.hypot(x, y), z, need_potential=False)
    r = np.hypot(x, y)
    safe = np.where(r > 0, r, 1.0)
    # Theta = (sin, -cos, 0) = (y / r, -x / r, 0); v vanishes on the axis
    sin_t = np.where(r > 0, y / safe, 0.0)
    cos_t = np.where(r > 0, x / safe, 1.0)
    return np.stack([s.v * sin_t, -s.v * cos_t, np.zeros_like(s.v)], axis=-1)


def tractions(sol: ModalSolution, r, theta, z) -> dict:
    """Cylindrical traction components from analytic modal derivatives.

    At r = 0 the 1/r term uses the per-mode limit of phi_n^a(r)/r.
    """
    return _traction_dict(_sums(sol, r, z, need_potential=False), sol.material.mu)


def _traction_dict(s: _Sums, mu) -> dict:
    zero = np.zeros_like(s.v)
    # u_r = u_z = 0 and div u = 0, so the normal components vanish identically;
    # t_zr is the same stored array as t_rz
    return {
        "t_rr": zero,
        "t_rtheta": -mu * (s.dv_dr - s.v_over_r),
        "t_rz": zero,
        "t_ztheta": -mu * s.dv_dz,
        "t_zz": zero,
    }


def potential_psi(sol: ModalSolution, r, z):
    """psi(r, z) = sum_n (int_0^r phi_n^a) f_n q_n(z) / (mu gamma_n); u = curl(psi e_z)."""
    return _sums(sol, r, z).psi


def potential_psi_helmholtz(sol: ModalSolution, r, z):
    """psi plus a function of z alone, chosen so that (Delta + k^2) psi = 0.

    Adding g(z) leaves curl(psi e_z) unchanged. Modes n >= 2 shift the
    antiderivative by -c_n / k_n; the linear mode needs the secular term
    -(c_1 / (a^2 gamma_1)) (h - z) cosh(gamma_1 (h - z)) / cosh(gamma_1 h).
    """
    return _sums(sol, r, z).psi_helmholtz


def gradient_cyl(sol: ModalSolution, r, z):
    """``(d_r u_theta, u_theta / r, d_z u_theta)``; |grad u|^2 is the sum of their squares."""
    s = _sums(sol, r, z, need_potential=False)
    return -s.dv_dr, -s.v_over_r, -s.dv_dz


def evaluate(sol: ModalSolution, r, theta, z) -> FieldSample:
    r, theta, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (r, theta, z)))
    s = _sums(sol, r, z)
    t = _traction_dict(s, sol.material.mu)
    zero = np.zeros_like(s.v)
    u_cyl = np.stack([zero, -s.v, zero], axis=-1)
    return FieldSample(r, theta, z, _cart(s.v, theta), u_cyl, t, s.psi)
