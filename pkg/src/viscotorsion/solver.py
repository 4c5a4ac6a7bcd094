"""Truncated modal solution of the torsional mixed boundary value problem.

u = sum_n f_n v_n(r, z) Theta(theta), with
v_n = q_n(z) phi_n^a(r) / (mu gamma_n) and Theta = sin(theta) e_1 - cos(theta) e_2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .material import CylinderGeometry, MaterialParams, ModalRoot, axial_wavenumbers
from .modal_basis import ModeShape, Torque, TorqueSpectrum, make_modes, project_torque, radial_terms
from .special_fn import modal_roots

DEFAULT_N = 32
TAIL_RTOL = 1e-10
_SUP_SAMPLES = 257


def _ratio_terms(gamma, h, z):
    # exp(-gamma z) / (1 + exp(-2 gamma h)) and exp(-2 gamma (h - z)); finite for Re gamma >= 0
    z = np.asarray(z, dtype=float)
    gamma = complex(gamma)
    lead = np.exp(-gamma * z) / (1.0 + np.exp(-2.0 * gamma * h))
    return lead, np.exp(-2.0 * gamma * (h - z))


def q_profile(gamma, h, z, naive: bool = False):
    """q(z) = sinh(gamma (h - z)) / cosh(gamma h).

    The default form uses negative exponents only. ``naive=True`` evaluates
    the textbook ratio of exponentials and overflows for large Re(gamma) h;
    it exists as a test oracle.
    """
    if naive:
        z = np.asarray(z, dtype=float)
        return (np.exp(gamma * (h - z)) - np.exp(gamma * (z - h))) / (np.exp(-gamma * h) + np.exp(gamma * h))
    lead, tail = _ratio_terms(gamma, h, z)
    return lead * (1.0 - tail)


def cosh_ratio(gamma, h, z):
    """cosh(gamma (h - z)) / cosh(gamma h)."""
    lead, tail = _ratio_terms(gamma, h, z)
    return lead * (1.0 + tail)


def q_profile_dz(gamma, h, z):
    """dq/dz = -gamma cosh(gamma (h - z)) / cosh(gamma h)."""
    return -complex(gamma) * cosh_ratio(gamma, h, z)


def modal_field(mat: MaterialParams, geom: CylinderGeometry, shape: ModeShape, mode: ModalRoot, r, z):
    """v_n(r, z) = q_n(z) phi_n^a(r) / (mu gamma_n)."""
    phi = radial_terms(shape, r).value
    return q_profile(mode.gamma, geom.h, z) * phi / (mat.mu * mode.gamma)


@dataclass(frozen=True)
class ModalSolution:
    material: MaterialParams
    geometry: CylinderGeometry
    modes: tuple[ModalRoot, ...]
    shapes: tuple[ModeShape, ...]
    spectrum: TorqueSpectrum
    torque: object = None
    amplitude_bounds: np.ndarray = field(default=None, repr=False)
    suggested_truncation: int = 1

    @property
    def N(self) -> int:
        return self.spectrum.N

    def with_gamma(self, n: int, gamma: complex) -> "ModalSolution":
        """Copy with gamma_n replaced; used for fault injection."""
        modes = tuple(
            ModalRoot(m.n, m.k_n, complex(gamma), m.c_n) if m.n == n else m for m in self.modes
        )
        return ModalSolution(self.material, self.geometry, modes, self.shapes, self.spectrum,
                             self.torque, self.amplitude_bounds, self.suggested_truncation)


def amplitude_bounds(mat, geom, modes, coeffs) -> np.ndarray:
    """|f_n| sup_z |q_n(z)| / |mu gamma_n| for every mode."""
    z = np.linspace(0.0, geom.h, _SUP_SAMPLES)
    out = np.empty(len(modes))
    for i, (m, fn) in enumerate(zip(modes, coeffs)):
        out[i] = abs(fn) * np.abs(q_profile(m.gamma, geom.h, z)).max() / abs(mat.mu * m.gamma)
    return out


def suggest_truncation(bounds) -> int:
    """Smallest N' whose omitted tail bound is below TAIL_RTOL times the retained sum."""
    bounds = np.asarray(bounds)
    kept = np.cumsum(bounds)
    tail = kept[-1] - kept
    for i in range(bounds.size):
        if tail[i] <= TAIL_RTOL * kept[i]:
            return i + 1
    return bounds.size


def assemble(mat: MaterialParams, geom: CylinderGeometry, torque, N: int = DEFAULT_N) -> ModalSolution:
    """Build the truncated series solution for a bottom-face torque.

    ``torque`` may be a ``Torque``, a callable f(r), sampled ``(r, f)`` arrays
    or a ready ``TorqueSpectrum`` of length N.
    """
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    roots = modal_roots(max(N - 1, 1))
    shapes = tuple(make_modes(N, roots, geom.a))
    modes = tuple(axial_wavenumbers(mat, geom, roots, N))
    if isinstance(torque, TorqueSpectrum):
        if torque.N != N:
            raise ValueError(f"spectrum has {torque.N} coefficients, expected N={N}")
        spectrum, source = torque, None
    else:
        spectrum = project_torque(torque, list(shapes), N)
        source = torque
    bounds = amplitude_bounds(mat, geom, modes, spectrum.coeffs)
    return ModalSolution(mat, geom, modes, shapes, spectrum, source, bounds, suggest_truncation(bounds))


def single_mode(mat: MaterialParams, geom: CylinderGeometry, n: int, amplitude: complex = 1.0,
                N: int | None = None) -> ModalSolution:
    """Solution driven by ``amplitude * phi_n^a``, i.e. ``amplitude * w_n``."""
    N = max(n, 1) if N is None else N
    coeffs = np.zeros(N, dtype=complex)
    coeffs[n - 1] = amplitude
    sol = assemble(mat, geom, TorqueSpectrum.from_coeffs(coeffs), N)
    torque = Torque("mode", geom.a, {"n": n, "amplitude": complex(amplitude).real}) \
        if complex(amplitude).imag == 0 else None
    return ModalSolution(sol.material, sol.geometry, sol.modes, sol.shapes, sol.spectrum, torque,
                         sol.amplitude_bounds, sol.suggested_truncation)
