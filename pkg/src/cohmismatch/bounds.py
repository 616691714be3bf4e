"""Closed-form mismatch bounds.

Two families: the weight-ratio bound in terms of ``delta = (1/eta - 1) mu1``,
and the commutator bounds built from ``sigma``, the single singular value of
``[rho_id, rho]``, scaled by the spectral gap of ``rho``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg_core as la
from .arrowhead import GAP_TOL, mismatch_direct
from .errors import (
    DegenerateDominantEigenvalue,
    DimensionMismatch,
    NoDecomposition,
    ParameterOutOfRange,
    ZeroFidelity,
)
from .states import DensityMatrix, PureState, optimal_eta

ZERO_EIG = 1e-12


@dataclass(frozen=True)
class CommutatorMetrics:
    sigma: float
    sigma_r: float
    Q: float
    Q_min: float
    Delta: float
    Delta_min: float
    eigenvalue: float
    eigenvalue2: float


@dataclass(frozen=True)
class BoundReport:
    c: float
    delta: float | None
    delta_bound: float
    Delta_bound: float
    lower_bound: float
    weyl_lambda_range: tuple[float, float] | None
    weyl_lambda2_range: tuple[float, float] | None
    ratio_estimate: float
    metrics: CommutatorMetrics
    eta: float | None = None
    mu1: float | None = None


def weyl_bounds(eta: float, delta: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Ranges ``lambda in [eta, eta(1+delta)]`` and ``lambda_2 in [0, eta delta]``."""
    if not 0.0 < eta <= 1.0:
        raise ParameterOutOfRange(f"eta must lie in (0, 1], got {eta!r}")
    if delta < 0:
        raise ParameterOutOfRange(f"delta must be non-negative, got {delta!r}")
    return (eta, eta * (1.0 + delta)), (0.0, eta * delta)


def _arch(x: float) -> float:
    """``(1 - sqrt(1 - 4 x^2))/2`` for ``x <= 1/2`` and ``1/2`` above."""
    if x > 0.5:
        return 0.5
    # stable form of 1 - sqrt(1 - y)
    y = 4.0 * x * x
    return 0.5 * y / (1.0 + np.sqrt(1.0 - y))


def delta_upper_bound(delta: float) -> float:
    """Largest mismatch compatible with weight ratio ``delta``: ``(1 - sqrt(1 - delta^2))/2``."""
    if not 0.0 <= delta <= 1.0:
        raise ParameterOutOfRange(f"delta must lie in [0, 1], got {delta!r}")
    return _arch(0.5 * delta)


def commutator_metrics(rho: DensityMatrix, psi_id: PureState, *, gap_tol: float = GAP_TOL) -> CommutatorMetrics:
    """``sigma`` from the variance ``<rho^2> - <rho>^2`` and the gap ratios.

    ``Q_min`` uses the smallest eigenvalue above ``1e-12``; for a state with a
    single non-zero eigenvalue ``Delta_min`` is reported as 0.
    """
    if rho.dim != psi_id.dim:
        raise DimensionMismatch(f"dims {rho.dim} and {psi_id.dim} differ")
    m = rho.matrix
    v = psi_id.amplitudes
    mv = m @ v
    F = float(np.real(np.vdot(v, mv)))
    sigma2 = max(float(np.real(np.vdot(mv, mv))) - F * F, 0.0)
    sigma = float(np.sqrt(sigma2))
    ev = la.eigvalsh_desc(m)
    lam = float(ev[0])
    lam2 = float(ev[1]) if ev.shape[0] > 1 else 0.0
    if lam - lam2 <= gap_tol:
        raise DegenerateDominantEigenvalue(lam - lam2, gap_tol)
    nz = ev[ev > ZERO_EIG]
    lam_m = float(nz[-1])
    Q = max(lam2, 0.0) / lam
    Q_min = lam_m / lam
    sigma_r = sigma / lam
    Delta = sigma_r / (1.0 - Q)
    Delta_min = 0.0 if nz.shape[0] == 1 else sigma_r / (1.0 - Q_min)
    return CommutatorMetrics(sigma, sigma_r, Q, Q_min, Delta, Delta_min, lam, lam2)


def commutator(rho, psi_id) -> np.ndarray:
    """Explicit ``[rho_id, rho]`` (skew-Hermitian)."""
    p = la.projector(psi_id)
    m = la.as_matrix(rho)
    return p @ m - m @ p


def commutator_norm(rho: DensityMatrix, psi_id: PureState, p: float) -> float:
    """Schatten ``p``-norm of ``[rho_id, rho]``: ``2^(1/p) sigma``."""
    if p not in (1, 2, np.inf):
        raise ParameterOutOfRange(f"p must be 1, 2 or inf, got {p!r}")
    m = la.as_matrix(rho)
    v = la.as_vector(psi_id)
    mv = m @ v
    F = float(np.real(np.vdot(v, mv)))
    sigma = float(np.sqrt(max(float(np.real(np.vdot(mv, mv))) - F * F, 0.0)))
    return sigma if np.isinf(p) else 2.0 ** (1.0 / p) * sigma


def commutator_upper_bound(metrics: CommutatorMetrics) -> float:
    return _arch(metrics.Delta)


def commutator_lower_bound(metrics: CommutatorMetrics) -> float:
    return _arch(metrics.Delta_min)


def bound_ratio(Q: float, Q_min: float) -> float:
    """Leading-order ratio of lower to upper bound, ``(1-Q)^2/(1-Q_min)^2``.

    An estimate valid up to ``O(sigma^4)`` corrections, not a guarantee.
    """
    if not 0.0 <= Q_min <= Q < 1.0:
        raise ParameterOutOfRange(f"need 0 <= Q_min <= Q < 1, got Q={Q!r}, Q_min={Q_min!r}")
    return ((1.0 - Q) / (1.0 - Q_min)) ** 2


def bound_report(rho: DensityMatrix, psi_id: PureState, *, gap_tol: float = GAP_TOL) -> BoundReport:
    """Mismatch together with every bound that applies to ``(rho, psi_id)``.

    When no ideal-weight decomposition exists ``delta`` is ``None``; when
    ``delta > 1`` the weight-ratio bound is vacuous and reported as 1.
    """
    res = mismatch_direct(rho, psi_id, gap_tol=gap_tol)
    met = commutator_metrics(rho, psi_id, gap_tol=gap_tol)
    try:
        dec = optimal_eta(rho, psi_id)
    except (NoDecomposition, ZeroFidelity):
        dec = None
    if dec is None:
        delta = eta = mu1 = None
        dbound = 1.0
        wl = wl2 = None
    else:
        delta, eta, mu1 = dec.delta, dec.eta, dec.mu1
        dbound = delta_upper_bound(delta) if delta <= 1.0 else 1.0
        wl, wl2 = weyl_bounds(eta, delta)
    q_min = min(met.Q_min, met.Q)
    return BoundReport(
        c=res.c,
        delta=delta,
        delta_bound=dbound,
        Delta_bound=commutator_upper_bound(met),
        lower_bound=commutator_lower_bound(met),
        weyl_lambda_range=wl,
        weyl_lambda2_range=wl2,
        ratio_estimate=bound_ratio(met.Q, q_min),
        metrics=met,
        eta=eta,
        mu1=mu1,
    )
