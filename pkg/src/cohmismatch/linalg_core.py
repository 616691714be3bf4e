"""Dense Hermitian linear algebra and state distances.

Functions accept plain arrays or the state value types from
:mod:`cohmismatch.states` (anything with a ``matrix`` or ``amplitudes``
attribute).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput

HERMITIAN_TOL = 1e-12


def as_matrix(x) -> np.ndarray:
    m = getattr(x, "matrix", x)
    return np.asarray(m, dtype=complex)


def as_vector(x) -> np.ndarray:
    v = getattr(x, "amplitudes", x)
    return np.asarray(v, dtype=complex)


def tolerance(m: np.ndarray, base: float = HERMITIAN_TOL) -> float:
    """Absolute-plus-relative tolerance ``base * (1 + ||m||_HS)``."""
    return base * (1.0 + float(np.linalg.norm(m)))


def hermitize(m, name: str = "matrix") -> np.ndarray:
    """Return ``(m + m^dag)/2`` after checking the Hermiticity residual."""
    a = as_matrix(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonHermitianInput(f"{name} has non-finite entries")
    resid = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if resid > tolerance(a):
        raise NonHermitianInput(f"{name} Hermiticity residual {resid:.3e}")
    return 0.5 * (a + a.conj().T)


@dataclass(frozen=True)
class HermitianEigenSystem:
    """Eigenvalues sorted descending with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(m) -> HermitianEigenSystem:
    a = hermitize(m)
    w, v = np.linalg.eigh(a)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    w.setflags(write=False)
    v.setflags(write=False)
    return HermitianEigenSystem(w, v)


def eigvalsh_desc(m) -> np.ndarray:
    return np.linalg.eigvalsh(hermitize(m))[::-1]


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b``."""
    ma, mb = as_matrix(a), as_matrix(b)
    _check_same_dim(ma, mb)
    diff = ma - mb
    d = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(0.5 * np.sum(np.abs(d)))


def fidelity_pure(psi, rho) -> float:
    """``<psi|rho|psi>`` for a pure reference state."""
    v = as_vector(psi)
    m = as_matrix(rho)
    if m.shape != (v.shape[0], v.shape[0]):
        raise DimensionMismatch(f"state dim {v.shape[0]} vs matrix shape {m.shape}")
    return float(np.real(np.vdot(v, m @ v)))


def projector(psi) -> np.ndarray:
    v = as_vector(psi)
    return np.outer(v, v.conj())


def hs_norm(m) -> float:
    return float(np.linalg.norm(as_matrix(m)))


def schatten_norm(m, p: float) -> float:
    """Schatten p-norm from singular values; ``p=np.inf`` is the spectral norm."""
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.sum(s**p) ** (1.0 / p))


def spectral_norm(m) -> float:
    return schatten_norm(m, np.inf)


def householder_complement(psi) -> np.ndarray:
    """Unitary whose first column is proportional to ``psi``.

    The remaining columns form an orthonormal basis of the orthogonal
    complement. Built from one Householder reflection, so it is cheap and
    deterministic.
    """
    v = as_vector(psi)
    d = v.shape[0]
    v0 = v[0]
    phase = v0 / abs(v0) if abs(v0) > 0 else 1.0
    u = v.copy()
    u[0] += phase
    nu2 = float(np.real(np.vdot(u, u)))
    return np.eye(d, dtype=complex) - (2.0 / nu2) * np.outer(u, u.conj())
