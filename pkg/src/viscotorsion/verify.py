"""Independent certification of an assembled solution.

The finite-difference checks only consume point samples of u and psi; they
never touch the analytic modal derivatives used in ``fields``. Boundary
tractions are taken from the analytic evaluation, since a finite-difference
stencil cannot resolve the 1e-9 level those conditions hold to.

FD residuals are normalised by the largest individual term of the operator
(each second partial derivative, each mixed term, the inertia term). For
torsional modes the radial and axial parts of the Laplacian nearly cancel, so
normalising by the assembled Laplacian or by rho omega^2 |u| alone would
measure stencil error against a quantity much smaller than what the stencil
actually differentiates.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, NyquistError
from .fields import (
    displacement,
    displacement_cartesian,
    potential_psi,
    potential_psi_helmholtz,
    tractions,
)
from .material import shear_wavenumber_sq
from .modal_basis import radial_terms
from .quadrature import gauss_legendre_grid, integrate
from .solver import ModalSolution, q_profile, q_profile_dz

DEFAULT_STEP_FRACTION = 1e-3
DEFAULT_MARGIN_STEPS = 5
# largest admissible (wavenumber * step): the second-order stencil error
# (w step)^2 / 12 then stays below the 1e-5 PDE gate
NYQUIST_LIMIT = 0.01
CHUNK = 32768

BC_KEYS = (
    "wall_t_rr", "wall_t_rtheta", "wall_t_rz",
    "bottom_t_zr", "bottom_t_ztheta", "bottom_t_zz",
    "top_u_r", "top_u_theta", "top_u_z",
)

DEFAULT_THRESHOLDS = {
    "pde_residual": 1e-5,
    "helmholtz_residual": 1e-5,
    "curl_residual": 1e-8,
    "wall_t_rr": 1e-9, "wall_t_rtheta": 1e-9, "wall_t_rz": 1e-9,
    "bottom_t_zr": 1e-9, "bottom_t_ztheta": 1e-9, "bottom_t_zz": 1e-9,
    "top_u_r": 1e-14, "top_u_theta": 1e-14, "top_u_z": 1e-14,
}


@dataclass(frozen=True)
class GridSpec:
    n_r: int = 64
    n_theta: int = 64
    n_z: int = 64
    step: float | None = None  # FD step; default 1e-3 * min(a, h)
    margin: float | None = None  # distance kept from the boundary; default 5 steps

    def resolve(self, sol: ModalSolution) -> tuple[float, float]:
        a, h = sol.geometry.a, sol.geometry.h
        step = self.step if self.step is not None else DEFAULT_STEP_FRACTION * min(a, h)
        margin = self.margin if self.margin is not None else DEFAULT_MARGIN_STEPS * step
        if not (0 < step and 2 * (margin + 2 * step) < min(a, h)):
            raise ConfigError(f"step {step} / margin {margin} too large for a={a}, h={h}")
        return step, margin


@dataclass
class ResidualReport:
    pde_residual: float
    bc_residuals: dict
    helmholtz_residual: float
    curl_residual: float
    stability_ratio: float | None
    dini_truncation_error: float | None
    grid: dict
    diagnostics: dict = field(default_factory=dict)
    failed: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def max_wavenumber(sol: ModalSolution) -> float:
    """Largest of |k|, k_n/a and |gamma_n| over the modes that carry amplitude.

    Modes beyond the solver's suggested truncation contribute less than its
    tail tolerance and do not constrain the step.
    """
    k = math.sqrt(abs(shear_wavenumber_sq(sol.material)))
    n_eff = sol.suggested_truncation
    w = [max(s.radial_wavenumber, abs(m.gamma)) for s, m in zip(sol.shapes[:n_eff], sol.modes[:n_eff])]
    return max([k, *w])


def check_nyquist(sol: ModalSolution, step: float):
    w = max_wavenumber(sol)
    if w * step > NYQUIST_LIMIT:
        raise NyquistError(
            f"FD step {step:.3e} too coarse: max wavenumber {w:.4e} gives "
            f"{w * step:.3f} rad per step (limit {NYQUIST_LIMIT}); reduce the step or N"
        )


def _safe_ratio(num: float, den: float) -> float:
    return 0.0 if num == 0.0 else (num / den if den > 0 else math.inf)


def interior_points(sol: ModalSolution, grid: GridSpec):
    """Cartesian sample points on an (r, theta, z) tensor grid away from the boundary."""
    step, margin = grid.resolve(sol)
    a, h = sol.geometry.a, sol.geometry.h
    reach = margin + 2 * step
    r = np.linspace(margin, a - reach, grid.n_r)
    th = np.linspace(0.0, 2 * np.pi, grid.n_theta, endpoint=False)
    z = np.linspace(reach, h - reach, grid.n_z)
    R, T, Z = np.meshgrid(r, th, z, indexing="ij")
    return np.stack([R * np.cos(T), R * np.sin(T), Z], axis=-1).reshape(-1, 3)


def _pde_terms(sol: ModalSolution, pts: np.ndarray, step: float):
    lam, mu = sol.material.lam, sol.material.mu
    rw2 = sol.material.rho * sol.material.omega**2
    eye = np.eye(3)

    def u_at(shift):
        p = pts + np.asarray(shift) * step
        return displacement_cartesian(sol, p[:, 0], p[:, 1], p[:, 2])

    u0 = u_at((0, 0, 0))
    d2 = {}
    for i in range(3):
        d2[i, i] = (u_at(eye[i]) - 2 * u0 + u_at(-eye[i])) / step**2
        for j in range(i + 1, 3):
            d2[i, j] = d2[j, i] = (
                u_at(eye[i] + eye[j]) - u_at(eye[i] - eye[j])
                - u_at(-eye[i] + eye[j]) + u_at(-eye[i] - eye[j])
            ) / (4 * step**2)
    lap = d2[0, 0] + d2[1, 1] + d2[2, 2]
    grad_div = np.stack([sum(d2[i, j][:, j] for j in range(3)) for i in range(3)], axis=-1)
    resid = (lam + mu) * grad_div + mu * lap + rw2 * u0
    mixed = max(float(np.abs((lam + mu) * d2[i, j][:, j]).max()) for i in range(3) for j in range(3))
    scale = max(
        abs(mu) * max(float(np.abs(d2[i, i]).max()) for i in range(3)),
        mixed,
        rw2 * float(np.abs(u0).max()),
    )
    return float(np.abs(resid).max()), scale, rw2 * float(np.abs(u0).max())


def pde_residual(sol: ModalSolution, grid: GridSpec = GridSpec(), details: bool = False):
    """Max |(lambda+mu) grad div u + mu Lap u + rho omega^2 u| over interior samples.

    Second-order central differences in Cartesian coordinates on sampled u,
    divided by the largest individual operator term.
    """
    step, _ = grid.resolve(sol)
    check_nyquist(sol, step)
    pts = interior_points(sol, grid)
    res = scale = inertia = 0.0
    for i in range(0, len(pts), CHUNK):
        r_, s_, in_ = _pde_terms(sol, pts[i:i + CHUNK], step)
        res, scale, inertia = max(res, r_), max(scale, s_), max(inertia, in_)
    value = _safe_ratio(res, scale)
    if details:
        return value, {"abs_residual": res, "term_scale": scale,
                       "relative_to_inertia": _safe_ratio(res, inertia), "step": step,
                       "points": len(pts)}
    return value


def pde_convergence_factor(sol: ModalSolution, grid: GridSpec = GridSpec()) -> float:
    """Ratio of PDE residuals at step and step/2 on identical sample points."""
    step, margin = grid.resolve(sol)
    coarse = pde_residual(sol, GridSpec(grid.n_r, grid.n_theta, grid.n_z, step, margin))
    fine = pde_residual(sol, GridSpec(grid.n_r, grid.n_theta, grid.n_z, step / 2, margin))
    return coarse / fine if fine > 0 else math.inf


def _rz_grid(sol: ModalSolution, grid: GridSpec):
    step, margin = grid.resolve(sol)
    a, h = sol.geometry.a, sol.geometry.h
    reach = margin + step
    r = np.linspace(reach, a - reach, grid.n_r)
    z = np.linspace(reach, h - reach, grid.n_z)
    return np.meshgrid(r, z, indexing="ij"), step


def helmholtz_residual(sol: ModalSolution, grid: GridSpec = GridSpec(), omega_scale: float = 1.0,
                       potential=potential_psi_helmholtz, details: bool = False):
    """Max |(d_rr + d_r / r + d_zz + rho omega^2 / mu) psi| on interior (r, z) samples.

    ``omega_scale`` perturbs the frequency inside the check only.
    """
    (R, Z), step = _rz_grid(sol, grid)
    check_nyquist(sol, step)
    k2 = shear_wavenumber_sq(sol.material) * omega_scale**2
    p0 = potential(sol, R, Z)
    prp, prm = potential(sol, R + step, Z), potential(sol, R - step, Z)
    pzp, pzm = potential(sol, R, Z + step), potential(sol, R, Z - step)
    d_rr = (prp - 2 * p0 + prm) / step**2
    d_r = (prp - prm) / (2 * step) / R
    d_zz = (pzp - 2 * p0 + pzm) / step**2
    resid = d_rr + d_r + d_zz + k2 * p0
    terms = [np.abs(t).max() for t in (d_rr, d_r, d_zz, k2 * p0)]
    value = _safe_ratio(float(np.abs(resid).max()), float(max(terms)))
    if details:
        return value, resid
    return value


def literal_potential_defect(sol: ModalSolution, grid: GridSpec = GridSpec()) -> dict:
    """Helmholtz residual of psi with antiderivatives based at r = 0.

    That residual is a function of z alone (so it does not affect curl(psi e_z));
    ``r_variation`` measures how far it departs from being r-independent.
    """
    value, resid = helmholtz_residual(sol, grid, potential=potential_psi, details=True)
    spread = np.abs(resid - resid.mean(axis=0, keepdims=True)).max()
    peak = np.abs(resid).max()
    return {"residual": value, "r_variation": _safe_ratio(float(spread), float(peak))}


def curl_residual(sol: ModalSolution, n_points: int = 100, seed: int = 0, rel_step: float = 1e-5,
                  potential=potential_psi) -> float:
    """max |u_theta + d_r psi| / max |u_theta| at random interior points.

    d_r psi uses a fourth-order central difference with step rel_step * a.
    """
    a, h = sol.geometry.a, sol.geometry.h
    eps = rel_step * a
    rng = np.random.default_rng(seed)
    r = rng.uniform(4 * eps, a - 4 * eps, n_points)
    th = rng.uniform(0, 2 * np.pi, n_points)
    z = rng.uniform(0, h, n_points)
    dpsi = (-potential(sol, r + 2 * eps, z) + 8 * potential(sol, r + eps, z)
            - 8 * potential(sol, r - eps, z) + potential(sol, r - 2 * eps, z)) / (12 * eps)
    _, u_cyl = displacement(sol, r, th, z)
    u_theta = u_cyl[..., 1]
    return _safe_ratio(float(np.abs(u_theta + dpsi).max()), float(np.abs(u_theta).max()))


def boundary_residuals(sol: ModalSolution, n_r: int = 64, n_theta: int = 16, n_z: int = 64) -> dict:
    """The nine conditions on the wall, bottom and top, plus the exact-torque mismatch.

    Traction entries are divided by max |f| on the bottom face; the clamp
    entries by max |u| over a volume sample (u and f carry different units).
    """
    a, h = sol.geometry.a, sol.geometry.h
    r = np.linspace(0.0, a, n_r)
    th = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    z = np.linspace(0.0, h, n_z)

    Tw, Zw = np.meshgrid(th, z, indexing="ij")
    wall = tractions(sol, np.full_like(Tw, a), Tw, Zw)
    Rb, Tb = np.meshgrid(r, th, indexing="ij")
    bottom = tractions(sol, Rb, Tb, np.zeros_like(Rb))
    f_trunc = sol.spectrum.reconstruct(sol.shapes, Rb)
    _, u_top = displacement(sol, Rb, Tb, np.full_like(Rb, h))

    Rv, Zv = np.meshgrid(r, z, indexing="ij")
    _, u_vol = displacement(sol, Rv, np.zeros_like(Rv), Zv)
    u_scale = float(np.abs(u_vol).max())

    f_exact = None
    if sol.torque is not None:
        f_exact = np.asarray(sol.torque(r), dtype=complex)[:, None]
    f_scale = float(np.abs(f_trunc).max())
    if f_exact is not None:
        f_scale = max(f_scale, float(np.abs(f_exact).max()))

    def rel(x, scale):
        return _safe_ratio(float(np.abs(x).max()), scale)

    out = {
        "wall_t_rr": rel(wall["t_rr"], f_scale),
        "wall_t_rtheta": rel(wall["t_rtheta"], f_scale),
        "wall_t_rz": rel(wall["t_rz"], f_scale),
        "bottom_t_zr": rel(bottom["t_rz"], f_scale),
        "bottom_t_ztheta": rel(bottom["t_ztheta"] - f_trunc, f_scale),
        "bottom_t_zz": rel(bottom["t_zz"], f_scale),
        "top_u_r": rel(u_top[..., 0], u_scale),
        "top_u_theta": rel(u_top[..., 1], u_scale),
        "top_u_z": rel(u_top[..., 2], u_scale),
    }
    out["bottom_t_ztheta_exact"] = None if f_exact is None else rel(bottom["t_ztheta"] - f_exact, f_scale)
    return out


def dini_truncation_error(sol: ModalSolution, n_r: int = 257) -> float | None:
    """max_r |t_ztheta(r, 0) - f(r)| / max |f|; None without an exact torque."""
    if sol.torque is None:
        return None
    r = np.linspace(0.0, sol.geometry.a, n_r)
    f = np.asarray(sol.torque(r), dtype=complex)
    t = tractions(sol, r, np.zeros_like(r), np.zeros_like(r))["t_ztheta"]
    return _safe_ratio(float(np.abs(t - f).max()), float(np.abs(f).max()))


def h1_norm(sol: ModalSolution, r_order: int = 16) -> float:
    """||u||_{H^1(Omega)} with analytic gradients.

    Each term of |u|^2 + |grad u|^2 is a double sum over modes of products
    X_n(r) Y_n(z), so the volume integral factors into r- and z-Gram matrices:
    composite Gauss-Legendre in r, adaptive Gauss-Legendre in z.
    """
    a, h = sol.geometry.a, sol.geometry.h
    live = [i for i, fn in enumerate(sol.spectrum.coeffs) if fn != 0]
    if not live:
        return 0.0
    shapes = [sol.shapes[i] for i in live]
    modes = [sol.modes[i] for i in live]
    amp = np.array([sol.spectrum.coeffs[i] / (sol.material.mu * sol.modes[i].gamma) for i in live])

    kmax = max(s.k_n or 1.0 for s in shapes)
    rn, rw = gauss_legendre_grid(0.0, a, max(4, int(kmax)), r_order)
    rad = [radial_terms(s, rn) for s in shapes]
    wr = rn * rw

    def r_gram(parts):
        x = np.stack(parts)
        return (x * wr) @ x.T

    g_val = r_gram([t.value for t in rad])
    g_der = r_gram([t.derivative for t in rad])
    g_ovr = r_gram([t.over_r for t in rad])

    gmax = max(abs(m.gamma) for m in modes)

    def z_integrand(z):
        q = np.stack([q_profile(m.gamma, h, z) for m in modes])
        dq = np.stack([q_profile_dz(m.gamma, h, z) for m in modes])
        return np.stack([q[:, None] * q.conj()[None], dq[:, None] * dq.conj()[None]])

    zq, zdq = integrate(z_integrand, 0.0, h, panel_width=min(h, 2.0 / gmax), rtol=1e-12)
    w = np.outer(amp, amp.conj())
    # |u_theta|^2 + |d_r u_theta|^2 + |u_theta / r|^2 + |d_z u_theta|^2
    total = np.sum(w * ((g_val + g_der + g_ovr) * zq + g_val * zdq))
    return math.sqrt(2 * math.pi * max(float(total.real), 0.0))


def h_minus_half_norm(sol: ModalSolution) -> float:
    """(sum |f_n|^2 / n)^(1/2)."""
    return math.sqrt(sol.spectrum.h_half_diag)


@dataclass(frozen=True)
class StabilityReport:
    ratios: list
    h1_norms: list
    h_minus_half_norms: list

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)

    @property
    def spread(self) -> float:
        return max(self.ratios) / min(self.ratios)


def stability_ratio(solutions) -> StabilityReport:
    """||u||_H1 / ||f||_{-1/2} for each solution; zero torques are skipped."""
    ratios, h1s, hms = [], [], []
    for sol in solutions:
        hm = h_minus_half_norm(sol)
        if hm == 0:
            continue
        h1 = h1_norm(sol)
        ratios.append(h1 / hm)
        h1s.append(h1)
        hms.append(hm)
    return StabilityReport(ratios, h1s, hms)


def verify_solution(sol: ModalSolution, grid: GridSpec = GridSpec(24, 16, 24),
                    thresholds: dict | None = None, curl_points: int = 100) -> ResidualReport:
    """Run every check and gate it against ``thresholds`` (defaults above)."""
    th = dict(DEFAULT_THRESHOLDS)
    th.update(thresholds or {})
    step, margin = grid.resolve(sol)
    pde, pde_info = pde_residual(sol, grid, details=True)
    bc = boundary_residuals(sol)
    helm = helmholtz_residual(sol, grid)
    curl = curl_residual(sol, curl_points)
    hm = h_minus_half_norm(sol)
    stab = h1_norm(sol) / hm if hm > 0 else None
    report = ResidualReport(
        pde_residual=pde,
        bc_residuals=bc,
        helmholtz_residual=helm,
        curl_residual=curl,
        stability_ratio=stab,
        dini_truncation_error=dini_truncation_error(sol),
        grid={"n_r": grid.n_r, "n_theta": grid.n_theta, "n_z": grid.n_z, "step": step, "margin": margin},
        diagnostics={
            "pde": pde_info,
            "literal_psi_helmholtz": literal_potential_defect(sol, grid),
            "suggested_truncation": sol.suggested_truncation,
            "h_half_diag": sol.spectrum.h_half_diag,
            "decay_exponent": sol.spectrum.decay_exponent,
            "dini_boundary_mismatch": sol.spectrum.boundary_mismatch,
        },
    )
    values = {"pde_residual": pde, "helmholtz_residual": helm, "curl_residual": curl, **bc}
    report.failed = [k for k, limit in th.items() if not values[k] <= limit]
    return report
