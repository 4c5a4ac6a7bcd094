"""Series solution and residual certification for torsion of a viscoelastic cylinder."""

from .errors import (
    ConfigError,
    DomainError,
    GeometryError,
    MaterialError,
    NyquistError,
    QuadratureError,
    ResonanceError,
    RootFindingError,
    TorsionError,
)
from .fields import FieldSample, displacement, evaluate, potential_psi, potential_psi_helmholtz, tractions
from .material import CylinderGeometry, MaterialParams, ModalRoot, axial_wavenumbers, shear_wavenumber_sq
from .modal_basis import ModeShape, Torque, TorqueSpectrum, eval_mode, make_mode, project_torque
from .solver import ModalSolution, assemble, modal_field, q_profile, q_profile_dz, single_mode
from .special_fn import BesselEval, bessel_j, modal_roots
from .verify import GridSpec, ResidualReport, verify_solution

__version__ = "0.1.0"
