from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from cohmismatch import backend
from cohmismatch.rng import make_rng
from cohmismatch.states import haar_random_pure, mix, random_density

ORACLES = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def oracle():
    return ORACLES


@pytest.fixture(params=sorted(backend.available()))
def kernels(request):
    """Every importable kernel backend (numpy fallback and, when built, Cython)."""
    return backend.available()[request.param]


def noisy_state(seed: int, i: int, dmin: int = 2, dmax: int = 64, eta_lo: float = 0.0, eta_hi: float = 1.0):
    rng = make_rng(seed, i)
    d = int(rng.integers(dmin, dmax + 1))
    eta = float(rng.uniform(max(eta_lo, 1e-3), eta_hi))
    psi = haar_random_pure(d, rng)
    return mix(eta, psi, random_density(d, rng)), psi


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
