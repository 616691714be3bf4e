"""Arrowhead reduction of a density matrix relative to an ideal state.

In the basis led by ``psi_id`` and completed by the eigenvectors of the
compressed error block, ``U rho U^dag`` has non-zero off-diagonal entries only
in its first row and column::

    [[F,   C_2, C_3, ...],
     [C_2, D_2, 0,   ...],
     [C_3, 0,   D_3, ...], ...]

Its spectrum is the root set of ``x - F + sum C_k^2 / (D_k - x)`` and the
dominant eigenvector's overlap with ``psi_id`` follows in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import linalg_core as la
from .backend import kernels
from .errors import DegenerateDominantEigenvalue, DimensionMismatch, PerturbationSingular
from .states import DensityMatrix, PureState

DEFLATE_TOL = 1e-14
TIE_TOL = 1e-15
GAP_TOL = 1e-8
NEAR_DEGENERATE = 1e-6


@dataclass(frozen=True, eq=False)
class ArrowheadForm:
    """Fidelity corner ``F``, arm ``C`` and diagonal ``D`` plus the reducing unitary.

    Rows of ``basis`` are the new basis vectors, so ``basis @ psi_id = e_1``
    and ``basis @ rho @ basis^dag`` is the assembled matrix.
    """

    F: float
    C: np.ndarray
    D: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.C.shape[0] + 1

    def matrix(self) -> np.ndarray:
        d = self.dim
        a = np.zeros((d, d))
        a[0, 0] = self.F
        a[0, 1:] = self.C
        a[1:, 0] = self.C
        a[np.arange(1, d), np.arange(1, d)] = self.D
        return a

    @classmethod
    def from_entries(cls, F: float, C, D) -> "ArrowheadForm":
        """Arrowhead in the standard basis (``psi_id = e_1``)."""
        C = np.asarray(C, dtype=float)
        D = np.asarray(D, dtype=float)
        if C.shape != D.shape or C.ndim != 1:
            raise DimensionMismatch("C and D must be vectors of equal length")
        order = np.argsort(-D, kind="stable")
        d = C.shape[0] + 1
        basis = np.eye(d, dtype=complex)
        basis[1:] = basis[1:][order]
        return cls(float(F), C[order], D[order], basis)


@dataclass(frozen=True, eq=False)
class MismatchResult:
    c: float
    eigenvalue: float
    dominant_vector: PureState
    gap: float
    near_degenerate: bool = False


def decompose(rho: DensityMatrix, psi_id: PureState) -> ArrowheadForm:
    if rho.dim != psi_id.dim:
        raise DimensionMismatch(f"dims {rho.dim} and {psi_id.dim} differ")
    m = rho.matrix
    psi = psi_id.amplitudes
    w = la.householder_complement(psi)[:, 1:]
    block = w.conj().T @ m @ w
    dvals, y = np.linalg.eigh(0.5 * (block + block.conj().T))
    dvals = dvals[::-1]
    phis = w @ y[:, ::-1]
    arm = psi.conj() @ m @ phis
    mag = np.abs(arm)
    phase = np.ones_like(arm)
    nz = mag > 0
    phase[nz] = arm[nz].conj() / mag[nz]
    phis = phis * phase
    basis = np.vstack([psi.conj()[None, :], phis.conj().T])
    F = float(np.real(np.vdot(psi, m @ psi)))
    return ArrowheadForm(F, mag, dvals.copy(), basis)


@dataclass(frozen=True)
class _Spectrum:
    """All eigenvalues plus the data needed to rebuild the dominant eigenvector."""

    eigenvalues: np.ndarray  # descending
    top: float
    top_gaps: np.ndarray | None  # top - D_k for every k, None if top is a bare pole
    top_pole: int  # index into D of the bare pole when top_gaps is None


def _solve(a: ArrowheadForm) -> _Spectrum:
    C = np.asarray(a.C, dtype=float)
    D = np.asarray(a.D, dtype=float)
    m = D.shape[0]
    # merge tied poles: one combined arm per group, the rest are exact eigenvalues
    groups: list[list[int]] = []
    scale = max(1.0, float(np.max(np.abs(D)))) if m else 1.0
    for k in range(m):
        if groups and abs(D[groups[-1][0]] - D[k]) <= TIE_TOL * scale:
            groups[-1].append(k)
        else:
            groups.append([k])
    poles, arms, reps, loose = [], [], [], []
    for g in groups:
        cg = float(np.sqrt(np.sum(C[g] ** 2)))
        loose.extend(D[g[1:]].tolist())
        if cg <= DEFLATE_TOL:
            loose.append(float(D[g[0]]))
        else:
            poles.append(float(D[g[0]]))
            arms.append(cg)
            reps.append(g)
    if poles:
        pd = np.array(poles)
        roots, origin, tau = kernels.secular_roots(float(a.F), np.array(arms), pd)
        roots = np.asarray(roots)
        o = int(origin[0])
        top_root = float(roots[0])
        # top - D_k computed relative to the origin pole for full precision
        gaps = float(tau[0]) + (pd[o] - D)
    else:
        roots = np.array([float(a.F)])
        top_root = float(a.F)
        gaps = top_root - D
    ev = np.sort(np.concatenate([roots, np.array(loose)]))[::-1]
    loose_arr = np.array(loose)
    if loose_arr.size and loose_arr.max() > top_root:
        k = int(np.flatnonzero(D == loose_arr.max())[0])
        return _Spectrum(ev, float(loose_arr.max()), None, k)
    return _Spectrum(ev, top_root, gaps, -1)


def secular_eigenvalues(a: ArrowheadForm) -> np.ndarray:
    """All eigenvalues of the arrowhead matrix, descending."""
    return _solve(a).eigenvalues


def _dominant(a: ArrowheadForm, spec: _Spectrum, gap_tol: float) -> MismatchResult:
    ev = spec.eigenvalues
    gap = float(ev[0] - ev[1]) if ev.shape[0] > 1 else np.inf
    if gap <= gap_tol:
        raise DegenerateDominantEigenvalue(gap, gap_tol)
    d = a.dim
    comp = np.zeros(d)
    if spec.top_gaps is None:
        comp[1 + spec.top_pole] = 1.0
        c = 1.0
    else:
        comp[0] = 1.0
        arm = np.asarray(a.C, dtype=float)
        use = arm > 0
        comp[1:][use] = arm[use] / spec.top_gaps[use]
        s = float(np.sum(comp[1:] ** 2))
        c = s / (1.0 + s)
    vec = a.basis.conj().T @ (comp / np.linalg.norm(comp))
    return MismatchResult(c, spec.top, PureState.from_vector(vec), gap, gap < NEAR_DEGENERATE)


def mismatch_analytic(a: ArrowheadForm, eigenvalue: float | None = None, *, gap_tol: float = GAP_TOL) -> MismatchResult:
    """Coherent mismatch ``1 - [1 + sum C_k^2/(lambda - D_k)^2]^-1``.

    With ``eigenvalue=None`` the dominant root is solved for (with
    pole-relative precision); otherwise the given value is used as lambda.
    """
    spec = _solve(a)
    if eigenvalue is not None:
        lam = float(eigenvalue)
        spec = _Spectrum(spec.eigenvalues, lam, lam - np.asarray(a.D, dtype=float), -1)
    return _dominant(a, spec, gap_tol)


def mismatch_direct(rho: DensityMatrix, psi_id: PureState, *, gap_tol: float = GAP_TOL) -> MismatchResult:
    """Coherent mismatch from a dense eigendecomposition."""
    if rho.dim != psi_id.dim:
        raise DimensionMismatch(f"dims {rho.dim} and {psi_id.dim} differ")
    es = la.hermitian_eig(rho.matrix)
    ev = es.eigenvalues
    gap = float(ev[0] - ev[1]) if ev.shape[0] > 1 else np.inf
    if gap <= gap_tol:
        raise DegenerateDominantEigenvalue(gap, gap_tol)
    v = es.eigenvectors[:, 0]
    c = 1.0 - abs(np.vdot(psi_id.amplitudes, v)) ** 2
    c = min(max(c, 0.0), 1.0)
    return MismatchResult(c, float(ev[0]), PureState.from_vector(v), gap, gap < NEAR_DEGENERATE)


def mismatch_perturbative(a: ArrowheadForm, variant: Literal["first_order", "wilkinson"] = "first_order") -> float:
    """Perturbative mismatch with ``(F - D_k)^2`` or ``(lambda - lambda_k)^2`` denominators.

    Arms with ``C_k`` at or below the deflation tolerance contribute nothing.
    """
    C = np.asarray(a.C, dtype=float)
    D = np.asarray(a.D, dtype=float)
    use = C > DEFLATE_TOL
    if not use.any():
        return 0.0
    if variant == "first_order":
        den = a.F - D[use]
        if np.any(np.abs(den) <= 1e-12):
            raise PerturbationSingular("F coincides with a diagonal entry D_k")
    elif variant == "wilkinson":
        ev = la.eigvalsh_desc(a.matrix())
        den = (ev[0] - ev[1:])[use]
        if np.any(np.abs(den) <= 1e-12):
            raise PerturbationSingular("dominant eigenvalue coincides with another eigenvalue")
    else:
        raise ValueError(f"unknown variant {variant!r}")
    s = float(np.sum((C[use] / den) ** 2))
    return s / (1.0 + s)
