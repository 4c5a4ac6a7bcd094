"""Exception hierarchy. Each class carries a CLI exit code."""


class TorsionError(Exception):
    exit_code = 1


class MaterialError(TorsionError, ValueError):
    exit_code = 2


class GeometryError(TorsionError, ValueError):
    exit_code = 2


class ConfigError(TorsionError, ValueError):
    exit_code = 2


class DomainError(TorsionError, ValueError):
    """A point lies outside the closed cylinder."""

    exit_code = 3


class RootFindingError(TorsionError, RuntimeError):
    exit_code = 4


class QuadratureError(TorsionError, RuntimeError):
    exit_code = 5


class ResonanceError(TorsionError, ArithmeticError):
    def __init__(self, n: int, detail: str = ""):
        self.n = n
        super().__init__(f"modal resonance at n={n}" + (f": {detail}" if detail else ""))

    exit_code = 6


class NyquistError(TorsionError, ValueError):
    """Finite-difference step too coarse for the retained modes."""

    exit_code = 7
