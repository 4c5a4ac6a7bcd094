import numpy as np
import pytest

from viscotorsion import Torque, assemble, single_mode
from viscotorsion.errors import DomainError
from viscotorsion.fields import (
    TRACTION_NAMES,
    displacement,
    displacement_cartesian,
    evaluate,
    gradient_cyl,
    potential_psi,
    potential_psi_helmholtz,
    tractions,
)


@pytest.fixture(scope="module")
def linear_solution(material, geometry):
    return assemble(material, geometry, Torque("linear", geometry.a), 32)


def test_displacement_is_circumferential(linear_solution, geometry):
    rng = np.random.default_rng(1)
    r = rng.uniform(0, geometry.a, 50)
    th = rng.uniform(0, 2 * np.pi, 50)
    z = rng.uniform(0, geometry.h, 50)
    u, u_cyl = displacement(linear_solution, r, th, z)
    assert np.all(u_cyl[:, 0] == 0) and np.all(u_cyl[:, 2] == 0)
    assert np.all(u[:, 2] == 0)
    # u . e_r = 0
    assert np.abs(u[:, 0] * np.cos(th) + u[:, 1] * np.sin(th)).max() <= 1e-15 * np.abs(u).max()
    # Theta = sin e_1 - cos e_2, and u = u_theta e_theta with e_theta = -Theta
    assert np.allclose(u[:, 0], -u_cyl[:, 1] * np.sin(th), rtol=1e-14, atol=0)


def test_cartesian_entry_point_agrees(linear_solution, geometry):
    r, th, z = 0.4 * geometry.a, 1.1, 0.3 * geometry.h
    u, _ = displacement(linear_solution, r, th, z)
    uc = displacement_cartesian(linear_solution, r * np.cos(th), r * np.sin(th), z)
    assert np.allclose(u, uc, rtol=1e-13, atol=0)
    assert np.all(displacement_cartesian(linear_solution, 0.0, 0.0, 0.01) == 0)


def test_divergence_free_by_finite_difference(linear_solution, geometry):
    x0 = np.array([0.003, -0.002, 0.01])
    e = 1e-7
    div = 0
    for j in range(3):
        p, m = x0.copy(), x0.copy()
        p[j] += e
        m[j] -= e
        up = displacement_cartesian(linear_solution, *p)
        um = displacement_cartesian(linear_solution, *m)
        div += (up[j] - um[j]) / (2 * e)
    grad_scale = np.abs(gradient_cyl(linear_solution, np.hypot(*x0[:2]), x0[2])[0])
    assert abs(div) <= 1e-7 * grad_scale


def test_axis_values_are_finite(linear_solution):
    fs = evaluate(linear_solution, 0.0, 0.0, 0.01)
    assert fs.u_cyl[1] == 0
    for name in TRACTION_NAMES:
        assert np.isfinite(fs.tractions[name])
    assert fs.tractions["t_rtheta"] == 0 or abs(fs.tractions["t_rtheta"]) < 1e-20


def test_zero_traction_components(linear_solution, geometry):
    t = tractions(linear_solution, np.linspace(0, geometry.a, 5), 0.2, np.linspace(0, geometry.h, 5))
    for name in ("t_rr", "t_rz", "t_zz"):
        assert np.all(t[name] == 0)


def test_t_zr_aliases_t_rz(linear_solution):
    fs = evaluate(linear_solution, 0.005, 0.0, 0.01)
    assert fs.t_zr is fs.tractions["t_rz"]


def test_bottom_traction_reproduces_torque(linear_solution, geometry):
    r = np.linspace(0, geometry.a, 101)
    t = tractions(linear_solution, r, 0.0, 0.0)["t_ztheta"]
    assert np.abs(t - r / geometry.a).max() <= 1e-12


def test_wall_traction_vanishes(linear_solution, geometry):
    z = np.linspace(0, geometry.h, 40)
    t = tractions(linear_solution, np.full_like(z, geometry.a), 0.0, z)["t_rtheta"]
    assert np.abs(t).max() <= 1e-12


def test_gradient_against_finite_difference(material, geometry):
    sol = single_mode(material, geometry, 3)
    r, z, e = 0.6 * geometry.a, 0.2 * geometry.h, 1e-8
    d_r, over_r, d_z = gradient_cyl(sol, r, z)
    u = lambda rr, zz: displacement(sol, rr, 0.0, zz)[1][..., 1]
    assert d_r == pytest.approx((u(r + e, z) - u(r - e, z)) / (2 * e), rel=1e-6)
    assert d_z == pytest.approx((u(r, z + e) - u(r, z - e)) / (2 * e), rel=1e-6)
    assert over_r == pytest.approx(u(r, z) / r, rel=1e-14)


def test_potentials_differ_by_function_of_z(linear_solution, geometry):
    r = np.linspace(0, geometry.a, 9)
    for z in (0.0, 0.02, 0.04):
        d = potential_psi_helmholtz(linear_solution, r, z) - potential_psi(linear_solution, r, z)
        assert np.abs(d - d[0]).max() <= 1e-12 * np.abs(d).max()


def test_psi_on_axis_is_zero(linear_solution):
    assert potential_psi(linear_solution, 0.0, 0.01) == 0


@pytest.mark.parametrize("r, z", [(-1e-4, 0.01), (0.0101, 0.01), (0.005, -0.001), (0.005, 0.06)])
def test_outside_points_rejected(linear_solution, r, z):
    with pytest.raises(DomainError):
        displacement(linear_solution, r, 0.0, z)


def test_boundary_points_accepted(linear_solution, geometry):
    displacement(linear_solution, geometry.a, 0.0, geometry.h)
    displacement(linear_solution, geometry.a * (1 + 1e-14), 0.0, 0.0)


def test_top_clamp_exact(linear_solution, geometry):
    r = np.linspace(0, geometry.a, 50)
    assert np.all(displacement(linear_solution, r, 0.0, geometry.h)[1] == 0)
