import math

import mpmath as mp
import numpy as np
import pytest

from viscotorsion import CylinderGeometry, MaterialParams, modal_roots

MU = (1 + 0.3j) * 1e6


def bessel_series_oracle(nu: int, x: float, dps: int = 60) -> float:
    """Alternating power series for J_nu summed in extended precision."""
    with mp.workdps(dps):
        x = mp.mpf(x)
        total, m = mp.mpf(0), 0
        while True:
            term = (-1) ** m * (x / 2) ** (2 * m + nu) / (mp.factorial(m) * mp.factorial(m + nu))
            total += term
            if m > x and abs(term) < mp.mpf(10) ** (-dps + 5):
                return float(total)
            m += 1


def j2_zeros_by_bisection(count: int, lo: float = 0.1, hi: float = 50.0, step: float = 0.1):
    """Zeros of J2 from sign changes of the series, refined by plain bisection."""
    def j2(x):
        return bessel_series_oracle(2, x, dps=40)

    zeros = []
    grid = np.arange(lo, hi, step)
    vals = [j2(x) for x in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa * fb < 0:
            for _ in range(60):
                mid = 0.5 * (a + b)
                fm = j2(mid)
                if fa * fm <= 0:
                    b = mid
                else:
                    a, fa = mid, fm
            zeros.append(0.5 * (a + b))
            if len(zeros) == count:
                break
    return zeros


@pytest.fixture(scope="session")
def roots():
    return modal_roots(70)


@pytest.fixture(scope="session")
def material():
    return MaterialParams(lam=2 * MU, mu=MU, rho=1000.0, omega=2 * math.pi * 10)


@pytest.fixture(scope="session")
def geometry():
    return CylinderGeometry(a=0.01, h=0.05)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Append one pass/fail line per acceptance criterion; printed at session end."""
    def _record(label: str, ok: bool, detail: str):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        print(ACCEPTANCE_LINES[-1])
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
