import math

import numpy as np
import pytest

from viscotorsion import MaterialParams, Torque, TorqueSpectrum, assemble, single_mode
from viscotorsion.errors import ConfigError, NyquistError
from viscotorsion.verify import (
    BC_KEYS,
    GridSpec,
    boundary_residuals,
    curl_residual,
    dini_truncation_error,
    h1_norm,
    h_minus_half_norm,
    helmholtz_residual,
    literal_potential_defect,
    pde_convergence_factor,
    pde_residual,
    stability_ratio,
    verify_solution,
)

MU = (1 + 0.3j) * 1e6
SMALL = GridSpec(16, 8, 16)


@pytest.fixture(scope="module")
def mode2(material, geometry):
    return single_mode(material, geometry, 2)


def test_pde_residual_passes_for_exact_mode(mode2):
    assert pde_residual(mode2, SMALL) <= 1e-5


def test_pde_residual_detects_wrong_gamma(mode2):
    bad = mode2.with_gamma(2, mode2.modes[1].gamma * 1.01)
    assert pde_residual(bad, SMALL) > 1e-3


def test_pde_residual_second_order(mode2):
    assert 3.5 <= pde_convergence_factor(mode2, SMALL) <= 4.5


def test_relative_to_inertia_is_reported(mode2):
    _, info = pde_residual(mode2, SMALL, details=True)
    # the inertia-only normalisation is far larger: radial and axial parts cancel
    assert info["relative_to_inertia"] > 100 * info["abs_residual"] / info["term_scale"]


def test_zero_solution_is_zero_residual(material, geometry):
    sol = assemble(material, geometry, Torque("zero", geometry.a), 4)
    assert pde_residual(sol, SMALL) == 0
    report = verify_solution(sol, SMALL)
    assert report.passed
    assert report.stability_ratio is None


def test_nyquist_refusal(mode2):
    with pytest.raises(NyquistError) as exc:
        pde_residual(mode2, GridSpec(8, 4, 8, step=1e-4))
    assert exc.value.exit_code == 7


def test_step_too_large_for_geometry(mode2):
    with pytest.raises(ConfigError):
        GridSpec(step=1e-2).resolve(mode2)


def test_boundary_residuals(mode2):
    bc = boundary_residuals(mode2)
    assert set(BC_KEYS) <= set(bc)
    for key in BC_KEYS:
        limit = 1e-14 if key.startswith("top") else 1e-9
        assert bc[key] <= limit, key


def test_bottom_condition_independent_of_gamma(mode2):
    # t_ztheta(r, 0) = sum f_n phi_n^a for any gamma, so only the PDE gate can see gamma faults
    shifted = mode2.with_gamma(2, mode2.modes[1].gamma * 1.01)
    assert boundary_residuals(shifted)["bottom_t_ztheta"] <= 1e-9


def test_exact_torque_mismatch_sees_wrong_spectrum(material, geometry):
    from dataclasses import replace

    sol = assemble(material, geometry, Torque("linear", geometry.a), 8)
    spec = TorqueSpectrum.from_coeffs(sol.spectrum.coeffs * 1.01)
    wrong = replace(sol, spectrum=spec)
    bc = boundary_residuals(wrong)
    assert bc["bottom_t_ztheta"] <= 1e-9
    assert bc["bottom_t_ztheta_exact"] > 5e-3


def test_helmholtz_residual(mode2):
    assert helmholtz_residual(mode2, SMALL) <= 1e-5


def test_helmholtz_frequency_sensitivity(geometry):
    # at 10 Hz k^2 is negligible against the modal wavenumbers, so probe at high frequency
    mat = MaterialParams(2 * MU, MU, 1000.0, 1.6e4)
    sol = single_mode(mat, geometry, 2)
    assert helmholtz_residual(sol, SMALL) <= 1e-5
    assert helmholtz_residual(sol, SMALL, omega_scale=1.01) > 1e-3


def test_literal_potential_defect_is_z_only(material, geometry):
    sol = assemble(material, geometry, Torque("linear", geometry.a), 8)
    d = literal_potential_defect(sol, SMALL)
    assert d["residual"] > 1e-2
    assert d["r_variation"] < 1e-4


def test_curl_residual(mode2, material, geometry):
    assert curl_residual(mode2) <= 1e-8
    sol = assemble(material, geometry, Torque("power", geometry.a, {"p": 2}), 16)
    assert curl_residual(sol, seed=3) <= 1e-8


def test_dini_error_reported(material, geometry):
    sol = assemble(material, geometry, Torque("power", geometry.a, {"p": 3}), 16)
    err = dini_truncation_error(sol)
    assert 0 < err < 0.1
    no_torque = assemble(material, geometry, TorqueSpectrum.from_coeffs([1.0]), 1)
    assert dini_truncation_error(no_torque) is None


def test_h1_norm_brute_force(mode2, geometry):
    # direct tensor-product quadrature of |u|^2 + |grad u|^2 on (r, z)
    from viscotorsion.fields import displacement, gradient_cyl

    xr, wr = np.polynomial.legendre.leggauss(120)
    xz, wz = np.polynomial.legendre.leggauss(200)
    r = 0.5 * geometry.a * (xr + 1)
    z = 0.5 * geometry.h * (xz + 1)
    R, Z = np.meshgrid(r, z, indexing="ij")
    u = displacement(mode2, R, 0.0, Z)[1][..., 1]
    g = gradient_cyl(mode2, R, Z)
    dens = np.abs(u) ** 2 + sum(np.abs(c) ** 2 for c in g)
    W = np.outer(wr * 0.5 * geometry.a * r, wz * 0.5 * geometry.h)
    brute = math.sqrt(2 * math.pi * np.sum(dens * W))
    assert h1_norm(mode2) == pytest.approx(brute, rel=1e-8)


def test_stability_scaling_invariance(material, geometry):
    base = assemble(material, geometry, Torque("power", geometry.a, {"p": 2}), 12)
    doubled = assemble(material, geometry, TorqueSpectrum.from_coeffs(2 * base.spectrum.coeffs), 12)
    rep = stability_ratio([base, doubled])
    assert abs(rep.ratios[1] / rep.ratios[0] - 1) <= 1e-12
    assert h_minus_half_norm(doubled) == pytest.approx(2 * h_minus_half_norm(base), rel=1e-15)


def test_report_round_trip(mode2):
    report = verify_solution(mode2, SMALL)
    assert report.passed, report.failed
    d = report.to_dict()
    assert d["passed"] is True
    assert set(BC_KEYS) <= set(d["bc_residuals"])


def test_report_names_failed_gate(mode2):
    bad = mode2.with_gamma(2, mode2.modes[1].gamma * 1.01)
    report = verify_solution(bad, SMALL)
    assert "pde_residual" in report.failed
    assert not report.passed
