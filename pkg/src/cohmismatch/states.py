"""State value types, random ensembles and the ideal-weight decomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg_core as la
from .errors import (
    DimensionMismatch,
    EtaOutOfRange,
    InvalidDimension,
    InvalidDistribution,
    InvalidState,
    NoDecomposition,
    ZeroFidelity,
)
from .rng import make_rng

NORM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalised state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex)
        if v.ndim != 1 or v.shape[0] < 1:
            raise InvalidDimension(f"amplitudes must be a non-empty vector, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidState("non-finite amplitudes")
        n = float(np.linalg.norm(v))
        if abs(n - 1.0) > NORM_TOL:
            raise InvalidState(f"state norm {n!r} differs from 1")
        object.__setattr__(self, "amplitudes", _frozen(v))

    @classmethod
    def from_vector(cls, v) -> "PureState":
        v = np.asarray(v, dtype=complex)
        n = np.linalg.norm(v)
        if n == 0:
            raise InvalidState("zero vector")
        return cls(v / n)

    @classmethod
    def basis(cls, dim: int, k: int = 0) -> "PureState":
        v = np.zeros(dim, dtype=complex)
        v[k] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        return la.projector(self.amplitudes)

    def density(self) -> "DensityMatrix":
        return DensityMatrix._trusted(self.projector())

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, la.as_vector(other)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace positive semidefinite Hermitian matrix.

    Inputs within the Hermiticity tolerance are symmetrised; the smallest
    eigenvalue may be as low as ``-1e-10``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = la.hermitize(self.matrix, "density matrix")
        if m.shape[0] < 1:
            raise InvalidDimension("empty density matrix")
        tr = float(np.real(np.trace(m)))
        if abs(tr - 1.0) > TRACE_TOL * (1.0 + np.linalg.norm(m)):
            raise InvalidState(f"trace {tr!r} differs from 1")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -PSD_TOL:
            raise InvalidState(f"smallest eigenvalue {lo:.3e} is negative")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def _trusted(cls, m: np.ndarray) -> "DensityMatrix":
        """Wrap a matrix that is PSD with unit trace by construction."""
        obj = object.__new__(cls)
        m = np.asarray(m, dtype=complex)
        object.__setattr__(obj, "matrix", _frozen(0.5 * (m + m.conj().T)))
        return obj

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls._trusted(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def diagonal(cls, p) -> "DensityMatrix":
        return cls(np.diag(np.asarray(p, dtype=complex)))

    def validate(self) -> None:
        """Re-run the full invariant checks (useful for trusted constructions)."""
        DensityMatrix(np.array(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


@dataclass(frozen=True, eq=False)
class EtaDecomposition:
    """``rho = eta |psi_id><psi_id| + (1 - eta) rho_err`` with maximal ``eta``."""

    eta: float
    rho_err: DensityMatrix
    mu1: float
    delta: float


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 2:
        raise InvalidDimension(f"dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def haar_random_pure(dim: int, seed) -> PureState:
    """Haar-random state from normalised i.i.d. complex Gaussians."""
    dim = _check_dim(dim)
    rng = make_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(z / np.linalg.norm(z))


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar-random unitary: QR of a Ginibre matrix with the R diagonal phase-fixed."""
    if int(dim) != dim or dim < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {dim!r}")
    rng = make_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_simplex(dim: int, seed) -> np.ndarray:
    """Uniform point on the probability simplex via sorted-uniform spacings."""
    rng = make_rng(seed)
    cuts = np.sort(rng.random(dim - 1))
    return np.diff(np.concatenate(([0.0], cuts, [1.0])))


def random_density(dim: int, seed) -> DensityMatrix:
    """``U diag(p) U^dag`` with ``p`` uniform on the simplex and ``U`` Haar."""
    dim = _check_dim(dim)
    rng = make_rng(seed)
    p = random_simplex(dim, rng)
    u = haar_unitary(dim, rng)
    return DensityMatrix._trusted((u * p) @ u.conj().T)


def mix(eta: float, psi_id: PureState, rho_err: DensityMatrix) -> DensityMatrix:
    if not 0.0 < eta <= 1.0:
        raise EtaOutOfRange(f"eta must lie in (0, 1], got {eta!r}")
    if psi_id.dim != rho_err.dim:
        raise DimensionMismatch(f"dims {psi_id.dim} and {rho_err.dim} differ")
    return DensityMatrix._trusted(eta * psi_id.projector() + (1.0 - eta) * rho_err.matrix)


def _min_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(m)[0])


def optimal_eta(
    rho: DensityMatrix,
    psi_id: PureState,
    *,
    full_rank_floor: float = 1e-9,
    iterations: int = 60,
) -> EtaDecomposition:
    """Largest ``eta`` with ``rho - eta |psi_id><psi_id|`` still PSD.

    Full-rank states use ``1/<psi_id|rho^-1|psi_id>``. When the smallest
    eigenvalue falls below ``full_rank_floor`` the weight is found by
    bisection on the smallest eigenvalue of the remainder.
    """
    if psi_id.dim != rho.dim:
        raise DimensionMismatch(f"dims {psi_id.dim} and {rho.dim} differ")
    m = rho.matrix
    f = la.fidelity_pure(psi_id, rho)
    if f <= la.tolerance(m):
        raise ZeroFidelity(f"fidelity {f:.3e} is not positive")
    p = psi_id.projector()
    w, v = np.linalg.eigh(m)
    if w[0] > full_rank_floor:
        amp = np.abs(v.conj().T @ psi_id.amplitudes) ** 2
        eta = 1.0 / float(np.sum(amp / w))
        eta = min(eta, 1.0)
    else:
        tol = 1e-14
        if _min_eig(m - p) >= -tol:
            eta = 1.0
        else:
            lo, hi = 0.0, min(1.0, f)
            for _ in range(iterations):
                mid = 0.5 * (lo + hi)
                if _min_eig(m - mid * p) >= -tol:
                    lo = mid
                else:
                    hi = mid
            eta = lo
    if eta <= 1e-12:
        raise NoDecomposition("no positive ideal-state weight can be split off")
    if eta >= 1.0 - 1e-15:
        # remainder vanishes; any error state reconstructs rho, pick the ideal state itself
        return EtaDecomposition(1.0, psi_id.density(), 1.0, 0.0)
    err = (m - eta * p) / (1.0 - eta)
    err = err / np.real(np.trace(err))
    rho_err = DensityMatrix._trusted(err)
    mu1 = float(np.linalg.eigvalsh(rho_err.matrix)[-1])
    return EtaDecomposition(eta, rho_err, mu1, (1.0 / eta - 1.0) * mu1)


def renyi_entropy(p, order: float) -> float:
    """Renyi entropy (natural log) of a probability vector; order may be ``inf``."""
    q = np.asarray(p, dtype=float)
    if q.ndim != 1 or q.size == 0 or np.any(q < 0) or abs(q.sum() - 1.0) > 1e-10:
        raise InvalidDistribution("entries must be non-negative and sum to 1")
    if not order > 0:
        raise InvalidDistribution(f"order must be positive, got {order!r}")
    if np.isinf(order):
        return float(-np.log(q.max()))
    nz = q[q > 0]
    if order == 1:
        return float(-np.sum(nz * np.log(nz)))
    return float(np.log(np.sum(nz**order)) / (1.0 - order))
