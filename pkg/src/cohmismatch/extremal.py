"""Density matrices that saturate the mismatch bounds.

The orthogonal complement of ``psi_id`` used by each construction is drawn
Haar-randomly from ``seed``, so every seed gives a different member of the
saturating family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import InfeasibleSpec, ParameterOutOfRange
from .states import DensityMatrix, PureState, haar_unitary

FEAS_TOL = 1e-12

Kind = Literal["delta_worst", "commutator_worst", "commutator_best", "limiting_small_delta", "limiting_global"]


@dataclass(frozen=True)
class ExtremalSpec:
    """Parameters of one extremal construction.

    ``params`` carries the kind-specific arguments not covered by the common
    fields (``F``, ``C2``/``Cm``, ``D``/``D_m``/``mid``, ``omega``, ``delta``).
    """

    kind: Kind
    dim: int = 2
    eta: float | None = None
    mu1: float | None = None
    tail: tuple[float, ...] = ()
    seed: int = 0
    params: dict = field(default_factory=dict)

    @property
    def alpha(self) -> float | None:
        if self.eta is None or self.mu1 is None:
            return None
        return 0.5 * (1.0 - (1.0 / self.eta - 1.0) * self.mu1)


def _frame(dim: int, seed) -> np.ndarray:
    return haar_unitary(dim, seed)


def _embed(a: np.ndarray, w: np.ndarray) -> tuple[DensityMatrix, PureState]:
    rho = DensityMatrix._trusted(w @ a @ w.conj().T)
    return rho, PureState.from_vector(w[:, 0])


def _check_trace(total: float, what: str) -> None:
    if abs(total - 1.0) > FEAS_TOL:
        raise InfeasibleSpec("trace", f"{what} sums to {total!r}, not 1")


def worst_case_delta(
    dim: int, eta: float, mu1: float, tail=None, seed=0
) -> tuple[DensityMatrix, PureState]:
    """State whose mismatch equals ``(1 - sqrt(1 - delta^2))/2``.

    ``rho = eta rho_id + (1 - eta)(mu1 |chi><chi| + R)`` with
    ``chi = sqrt(alpha) psi_id + sqrt(1 - alpha) phi_2``, ``alpha = (1-delta)/2``,
    and ``R`` diagonal in the remaining complement vectors with entries ``tail``.
    When ``tail`` is omitted the leftover weight is spread evenly.
    """
    if int(dim) != dim or dim < 2:
        raise InfeasibleSpec("dimension", f"need dim >= 2, got {dim!r}")
    if not 0.0 < eta < 1.0:
        raise InfeasibleSpec("eta", f"need 0 < eta < 1, got {eta!r}")
    if not 0.0 < mu1 <= 1.0:
        raise InfeasibleSpec("mu1", f"need 0 < mu1 <= 1, got {mu1!r}")
    n_tail = dim - 2
    if tail is None:
        tail = np.full(n_tail, (1.0 - mu1) / n_tail) if n_tail else np.zeros(0)
    tail = np.asarray(tail, dtype=float)
    if tail.shape != (n_tail,):
        raise InfeasibleSpec("tail length", f"need {n_tail} entries, got {tail.shape[0]}")
    if np.any(tail < 0):
        raise InfeasibleSpec("tail positivity", "tail entries must be non-negative")
    if np.any(tail > mu1 + FEAS_TOL):
        raise InfeasibleSpec("dominance", "tail entries must not exceed mu1")
    _check_trace(mu1 + float(tail.sum()), "mu1 + tail")
    delta = (1.0 / eta - 1.0) * mu1
    if delta > 1.0:
        raise InfeasibleSpec("delta <= 1", f"delta = {delta!r}")
    alpha = 0.5 * (1.0 - delta)
    d = int(dim)
    chi = np.zeros(d)
    chi[0] = np.sqrt(alpha)
    chi[1] = np.sqrt(1.0 - alpha)
    err = mu1 * np.outer(chi, chi)
    err[np.arange(2, d), np.arange(2, d)] += tail
    a = eta * np.outer(np.eye(d)[0], np.eye(d)[0]) + (1.0 - eta) * err
    return _embed(a, _frame(d, seed))


def limiting_small_delta(dim: int, delta: float, seed=0) -> tuple[DensityMatrix, PureState]:
    """Worst-case state at small ``delta`` with a fully dominant error (``mu1 = 1``)."""
    if not 0.0 < delta <= 1.0:
        raise ParameterOutOfRange(f"delta must lie in (0, 1], got {delta!r}")
    eta = 1.0 / (1.0 + delta)
    tail = np.zeros(dim - 2)
    return worst_case_delta(dim, eta, 1.0, tail, seed)


def _check_arrowhead_entries(F: float, D: np.ndarray) -> None:
    if F < 0 or np.any(D < 0):
        raise InfeasibleSpec("positivity", "F and D entries must be non-negative")
    if np.any(np.diff(D) > 0):
        raise InfeasibleSpec("ordering", "diagonal tail must be descending")


def worst_case_commutator(dim: int, F: float, C2: float, D, seed=0) -> tuple[DensityMatrix, PureState]:
    """Arrowhead with a single arm ``C2``: saturates the commutator upper bound.

    ``D = (D_2, ..., D_d)``. For ``dim >= 3`` the block's smaller eigenvalue
    must stay the second largest overall, which holds when
    ``D_2 >= D_3 + C2^2/(F - D_3)``.
    """
    D = np.asarray(D, dtype=float)
    d = int(dim)
    if D.shape != (d - 1,):
        raise InfeasibleSpec("tail length", f"need {d - 1} diagonal entries, got {D.shape[0]}")
    _check_arrowhead_entries(F, D)
    if C2 < 0:
        raise InfeasibleSpec("positivity", "C2 must be non-negative")
    _check_trace(F + float(D.sum()), "F + D")
    if C2 * C2 > F * D[0] + FEAS_TOL:
        raise InfeasibleSpec("PSD", f"C2^2 = {C2 * C2!r} exceeds F D_2 = {F * D[0]!r}")
    if d >= 3 and C2 > 0:
        if F <= D[1]:
            raise InfeasibleSpec("second eigenvalue", "need F > D_3")
        if D[0] < D[1] + C2 * C2 / (F - D[1]) - FEAS_TOL:
            raise InfeasibleSpec("second eigenvalue", "need D_2 >= D_3 + C2^2/(F - D_3)")
    a = np.diag(np.concatenate(([F], D)))
    a[0, 1] = a[1, 0] = C2
    top = 0.5 * (F + D[0] + np.hypot(F - D[0], 2 * C2))
    if d >= 3 and top <= D[1]:
        raise InfeasibleSpec("dominance", "block eigenvalue must exceed the remaining diagonal")
    return _embed(a, _frame(d, seed))


def best_case_commutator(dim: int, F: float, Cm: float, D_m: float, mid, seed=0) -> tuple[DensityMatrix, PureState]:
    """Arrowhead with its only arm on the smallest non-zero diagonal entry ``D_m``.

    ``mid = (D_2, ..., D_{d-1})`` holds the uncoupled entries; each must be
    zero or at least ``D_m``. Saturates the commutator lower bound.
    """
    mid = np.asarray(mid, dtype=float)
    d = int(dim)
    if mid.shape != (d - 2,):
        raise InfeasibleSpec("tail length", f"need {d - 2} middle entries, got {mid.shape[0]}")
    _check_arrowhead_entries(F, mid)
    if not D_m > 0:
        raise InfeasibleSpec("positivity", "D_m must be positive")
    if np.any((mid > 0) & (mid < D_m)):
        raise InfeasibleSpec("smallest entry", "D_m must be the smallest non-zero diagonal entry")
    if Cm < 0:
        raise InfeasibleSpec("positivity", "Cm must be non-negative")
    _check_trace(F + D_m + float(mid.sum()), "F + D_m + mid")
    if Cm > 0 and Cm * Cm >= F * D_m:
        raise InfeasibleSpec("PSD", "need Cm < sqrt(D_m F) so the block stays full rank")
    top = 0.5 * (F + D_m + np.hypot(F - D_m, 2 * Cm))
    if mid.size and top <= mid.max():
        raise InfeasibleSpec("dominance", "block eigenvalue must exceed every middle entry")
    diag = np.concatenate(([F], mid, [D_m]))
    a = np.diag(diag)
    a[0, -1] = a[-1, 0] = Cm
    return _embed(a, _frame(d, seed))


def limiting_global(omega: float) -> DensityMatrix:
    """``1/2 |0><0| + 1/2 |chi><chi|`` with ``chi = sqrt(omega)|0> + sqrt(1-omega)|1>``.

    The mismatch is exactly ``(1 - sqrt(omega))/2`` and tends to 1/2 as
    ``omega -> 0``, where the state itself approaches ``I/2``; the ideal state
    is ``|0>``.
    """
    if not 0.0 < omega <= 0.1:
        raise ParameterOutOfRange(f"omega must lie in (0, 0.1], got {omega!r}")
    chi = np.array([np.sqrt(omega), np.sqrt(1.0 - omega)])
    m = 0.5 * np.diag([1.0, 0.0]) + 0.5 * np.outer(chi, chi)
    return DensityMatrix._trusted(m)


def build(spec: ExtremalSpec):
    """Dispatch an :class:`ExtremalSpec` to its constructor."""
    p = spec.params
    if spec.kind == "delta_worst":
        return worst_case_delta(spec.dim, spec.eta, spec.mu1, spec.tail or None, spec.seed)
    if spec.kind == "commutator_worst":
        return worst_case_commutator(spec.dim, p["F"], p["C2"], p["D"], spec.seed)
    if spec.kind == "commutator_best":
        return best_case_commutator(spec.dim, p["F"], p["Cm"], p["D_m"], p["mid"], spec.seed)
    if spec.kind == "limiting_small_delta":
        return limiting_small_delta(spec.dim, p["delta"], spec.seed)
    if spec.kind == "limiting_global":
        return limiting_global(p["omega"])
    raise ParameterOutOfRange(f"unknown kind {spec.kind!r}")
