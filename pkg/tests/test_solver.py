import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viscotorsion import Torque, TorqueSpectrum, assemble, single_mode
from viscotorsion.fields import displacement
from viscotorsion.solver import TAIL_RTOL, cosh_ratio, q_profile, q_profile_dz, suggest_truncation


def test_q_reference_value():
    # sinh(0.5) / cosh(1)
    assert q_profile(1.0, 1.0, 0.5) == pytest.approx(0.33769803971141094, rel=1e-14)


def test_q_boundary_values():
    g = 3 + 2j
    assert q_profile(g, 0.7, 0.7) == 0
    assert q_profile(g, 0.7, 0.0) == pytest.approx(np.tanh(g * 0.7), rel=1e-14)
    assert q_profile_dz(g, 0.7, 0.0) == pytest.approx(-g, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 20), st.floats(-20, 20), st.floats(0, 1))
def test_stable_form_matches_naive_when_safe(gr, gi, s):
    g, h = complex(gr, gi), 1.0
    z = s * h
    assert abs(q_profile(g, h, z) - q_profile(g, h, z, naive=True)) <= 1e-12


def test_stable_form_survives_large_gamma():
    z = np.linspace(0, 1, 11)
    with np.errstate(all="ignore"):
        naive = q_profile(2000.0, 1.0, z, naive=True)
    stable = q_profile(2000.0, 1.0, z)
    assert not np.all(np.isfinite(naive))
    assert np.all(np.isfinite(stable))
    assert stable[0] == pytest.approx(1.0)
    assert np.allclose(stable[:-1].real, np.exp(-2000.0 * z[:-1]), rtol=1e-12, atol=0)
    assert stable[-1] == 0


def test_derivative_against_finite_difference():
    g, h, z, e = 4 - 7j, 0.9, 0.3, 1e-6
    fd = (q_profile(g, h, z + e) - q_profile(g, h, z - e)) / (2 * e)
    assert q_profile_dz(g, h, z) == pytest.approx(fd, rel=1e-8)
    assert cosh_ratio(g, h, h) == pytest.approx(1 / np.cosh(g * h), rel=1e-13)


def test_single_mode_structure(material, geometry):
    sol = single_mode(material, geometry, 2)
    assert sol.N == 2
    assert list(sol.spectrum.coeffs) == [0, 1]
    assert sol.torque.kind == "mode"


def test_assemble_rejects_bad_truncation(material, geometry):
    with pytest.raises(ValueError):
        assemble(material, geometry, Torque("linear", geometry.a), 0)
    with pytest.raises(ValueError):
        assemble(material, geometry, TorqueSpectrum.from_coeffs([1.0, 2.0]), 3)


@settings(max_examples=25, deadline=None)
@given(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_linearity_in_torque(material, geometry, alpha, beta):
    f = np.array([1.0, -0.5, 0.25, 0.1], dtype=complex)
    g = np.array([0.0, 2.0, 0.0, -1.0], dtype=complex)
    r = np.linspace(0, geometry.a, 7)
    z = np.linspace(0, geometry.h, 7)
    R, Z = np.meshgrid(r, z)

    def u(c):
        sol = assemble(material, geometry, TorqueSpectrum.from_coeffs(c), 4)
        return displacement(sol, R, 0.3, Z)[0]

    combo = u(alpha * f + beta * g)
    expected = alpha * u(f) + beta * u(g)
    scale = max(1.0, abs(alpha), abs(beta)) * np.abs(u(f)).max() + abs(beta) * np.abs(u(g)).max()
    assert np.abs(combo - expected).max() <= 1e-12 * scale


def test_truncation_suggestion():
    assert suggest_truncation([1.0, 0.0, 0.0]) == 1
    assert suggest_truncation([1.0, 1.0, 1e-12]) == 2
    assert suggest_truncation([1.0, 1.0, 1.0]) == 3


def test_suggested_truncation_tail_bound(material, geometry):
    sol = assemble(material, geometry, Torque("power", geometry.a, {"p": 3}), 32)
    n = sol.suggested_truncation
    b = sol.amplitude_bounds
    assert b[n:].sum() <= TAIL_RTOL * b[:n].sum()


def test_tail_bound_dominates_omitted_modes(material, geometry):
    sol = assemble(material, geometry, Torque("power", geometry.a, {"p": 3}), 40)
    n = 20
    short = assemble(material, geometry, TorqueSpectrum.from_coeffs(sol.spectrum.coeffs[:n]), n)
    r = np.linspace(0, geometry.a, 41)
    z = np.linspace(0, geometry.h, 41)
    R, Z = np.meshgrid(r, z)
    diff = displacement(sol, R, 0.0, Z)[1][..., 1] - displacement(short, R, 0.0, Z)[1][..., 1]
    bound = sol.amplitude_bounds[n:].sum()
    # |phi_n^a| <= c_n |J_1| / a <= sqrt(2) * 0.6 / (a |J_1(k_n)|)
    phi_sup = max(abs(s.c_n) * 0.582 / geometry.a for s in sol.shapes[n:])
    assert np.abs(diff).max() <= bound * phi_sup


def test_convergence_in_truncation(material, geometry):
    torque = Torque("power", geometry.a, {"p": 3})
    ref = assemble(material, geometry, torque, 64)
    r = np.linspace(0, geometry.a, 33)
    z = np.linspace(0.002, geometry.h, 33)
    R, Z = np.meshgrid(r, z)
    u_ref = displacement(ref, R, 0.0, Z)[1][..., 1]
    errs = []
    for N in (8, 16, 32):
        u = displacement(assemble(material, geometry, torque, N), R, 0.0, Z)[1][..., 1]
        errs.append(np.abs(u - u_ref).max() / np.abs(u_ref).max())
    assert errs[0] > errs[1] > errs[2]


def test_mode_decays_away_from_driven_face(material, geometry):
    sol = single_mode(material, geometry, 5)
    z = np.linspace(0, geometry.h, 50)
    u = np.abs(displacement(sol, np.full_like(z, 0.5 * geometry.a), 0.0, z)[1][..., 1])
    assert np.all(np.diff(u) < 0)
    assert u[-1] == 0


@pytest.mark.parametrize("n", [1, 2, 4])
def test_modal_field_ode_by_finite_difference(material, geometry, roots, n):
    from viscotorsion.material import axial_wavenumbers
    from viscotorsion.modal_basis import make_mode
    from viscotorsion.solver import modal_field

    shape = make_mode(n, roots, geometry.a)
    mode = axial_wavenumbers(material, geometry, roots, n)[-1]
    v = lambda r, z: modal_field(material, geometry, shape, mode, r, z)
    # balances stencil error (kappa e)^2 / 12 against Bessel roundoff / (kappa e)^2
    e = 1e-4 * geometry.a
    rng = np.random.default_rng(n)
    worst = 0.0
    for r, z in zip(rng.uniform(0.1, 0.9, 10) * geometry.a, rng.uniform(0.1, 0.9, 10) * geometry.h):
        v0 = v(r, z)
        d_rr = (v(r + e, z) - 2 * v0 + v(r - e, z)) / e**2
        d_r = (v(r + e, z) - v(r - e, z)) / (2 * e)
        d_zz = (v(r, z + e) - 2 * v0 + v(r, z - e)) / e**2
        terms = [material.mu * d_rr, material.mu * d_r / r, material.mu * v0 / r**2,
                 material.mu * d_zz, material.rho * material.omega**2 * v0]
        resid = terms[0] + terms[1] - terms[2] + terms[3] + terms[4]
        worst = max(worst, abs(resid) / max(abs(t) for t in terms))
    assert worst <= 1e-6
