"""State powers, noise-floor convergence, observable errors and copy counts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import linalg_core as la
from .arrowhead import GAP_TOL
from .errors import (
    DegenerateDominantEigenvalue,
    DegenerateInput,
    DimensionMismatch,
    InvalidDimension,
    ParameterOutOfRange,
)
from .rng import make_rng
from .states import DensityMatrix, PureState

FIT_FLOOR = 1e-11


@dataclass(frozen=True)
class DistillationTrace:
    """Trace distances ``T(rho^n / tr rho^n, rho_id)`` for ``n = 1..n_max``.

    ``decay_rate`` is the fitted per-copy factor of ``|T_n - sqrt(c)|`` over
    the tail (``nan`` when fewer than three points lie above the float floor).
    """

    n_values: np.ndarray
    trace_distances: np.ndarray
    predicted_floor: float
    Q: float
    decay_rate: float


def _powers(w: np.ndarray, n: int) -> np.ndarray:
    top = float(w.max())
    if top <= 0 or n * math.log(top) < math.log(1e-300):
        raise DegenerateInput(f"trace of rho^{n} underflows")
    q = np.clip(w, 0.0, None) / top
    p = q**n
    return p / p.sum()


def distilled_state(rho: DensityMatrix, n: int) -> DensityMatrix:
    """``rho^n / tr rho^n`` built in the eigenbasis of ``rho``."""
    if int(n) != n or n < 1:
        raise ParameterOutOfRange(f"n must be a positive integer, got {n!r}")
    if n == 1:
        return rho
    w, v = np.linalg.eigh(rho.matrix)
    p = _powers(w, int(n))
    return DensityMatrix._trusted((v * p) @ v.conj().T)


def _fit_rate(n: np.ndarray, dev: np.ndarray) -> float:
    ok = dev > FIT_FLOOR
    if ok.sum() < 3:
        return float("nan")
    # tail: last contiguous run above the floor, second half of it
    idx = np.flatnonzero(ok)
    last = idx[-1]
    run = [last]
    for i in idx[::-1][1:]:
        if i == run[-1] - 1:
            run.append(i)
        else:
            break
    run = np.array(run[::-1])
    if run.size < 3:
        return float("nan")
    run = run[run.size // 2 :] if run.size >= 6 else run
    slope = np.polyfit(n[run], np.log(dev[run]), 1)[0]
    return float(np.exp(slope))


def noise_floor_trace(rho: DensityMatrix, psi_id: PureState, n_max: int = 50, *, gap_tol: float = GAP_TOL) -> DistillationTrace:
    if rho.dim != psi_id.dim:
        raise DimensionMismatch(f"dims {rho.dim} and {psi_id.dim} differ")
    if n_max < 1:
        raise ParameterOutOfRange(f"n_max must be positive, got {n_max!r}")
    w, v = np.linalg.eigh(rho.matrix)
    w, v = w[::-1], v[:, ::-1]
    gap = float(w[0] - w[1])
    if gap <= gap_tol:
        raise DegenerateDominantEigenvalue(gap, gap_tol)
    # work in the eigenbasis of rho: rho_n is diagonal there
    x = v.conj().T @ psi_id.amplitudes
    ideal = np.outer(x, x.conj())
    c = max(0.0, 1.0 - abs(x[0]) ** 2)
    ns = np.arange(1, n_max + 1)
    td = np.empty(n_max)
    for i, n in enumerate(ns):
        p = _powers(w, int(n))
        diff = np.diag(p) - ideal
        td[i] = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff)))
    Q = max(float(w[1]), 0.0) / float(w[0])
    rate = _fit_rate(ns.astype(float), np.abs(td - math.sqrt(c)))
    return DistillationTrace(ns, td, math.sqrt(c), Q, rate)


def observable_error(psi_a: PureState, psi_b: PureState, O) -> float:
    """``|<a|O|a> - <b|O|b>|``."""
    o = la.as_matrix(O)
    a, b = psi_a.amplitudes, psi_b.amplitudes
    if a.shape != b.shape or o.shape != (a.shape[0], a.shape[0]):
        raise DimensionMismatch("states and observable dimensions differ")
    ea = np.real(np.vdot(a, o @ a))
    eb = np.real(np.vdot(b, o @ b))
    return float(abs(ea - eb))


def observable_error_bound(c: float, o_norm: float, eigenstate: bool = False) -> float:
    """``2 sqrt(c) ||O||`` in general, ``2 c ||O||`` when the reference is an eigenvector of O."""
    if not 0.0 <= c <= 1.0:
        raise ParameterOutOfRange(f"c must lie in [0, 1], got {c!r}")
    if o_norm < 0:
        raise ParameterOutOfRange(f"o_norm must be non-negative, got {o_norm!r}")
    return 2.0 * (c if eigenstate else math.sqrt(c)) * o_norm


def random_normalized_observable(dim: int, seed) -> np.ndarray:
    """Gaussian Hermitian matrix rescaled to unit spectral norm."""
    if int(dim) != dim or dim < 2:
        raise InvalidDimension(f"dimension must be an integer >= 2, got {dim!r}")
    rng = make_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = 0.5 * (g + g.conj().T)
    return h / np.max(np.abs(np.linalg.eigvalsh(h)))


def eigenstate_observable(psi_id: PureState, seed) -> np.ndarray:
    """Unit-norm observable with ``psi_id`` as an eigenvector.

    ``O = e |psi_id><psi_id| + P O' P`` with ``e`` uniform in ``[-1, 1]`` and
    ``O'`` Gaussian Hermitian, then rescaled.
    """
    d = psi_id.dim
    rng = make_rng(seed)
    e = rng.uniform(-1.0, 1.0)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = 0.5 * (g + g.conj().T)
    pid = psi_id.projector()
    p = np.eye(d) - pid
    o = e * pid + p @ h @ p
    o = 0.5 * (o + o.conj().T)
    return o / np.max(np.abs(np.linalg.eigvalsh(o)))


def copies_needed(eta: float, mu1: float, target: Literal["general_sqrt", "eigenstate_quadratic"] = "general_sqrt") -> int:
    """Estimated number of copies to push incoherent error below the coherent floor.

    Uses ``Q ~ (1/eta - 1) mu1`` and the largest error eigenvalue ``~ mu1``.
    The general target compares ``mu1 Q^(n-1)`` with ``2 sqrt(c) ~ Q``; the
    eigenstate target compares it with ``2 c ~ Q^2 / 2``. The result is an
    estimate, rounded up and never below 2.
    """
    if not 0.0 < eta <= 1.0:
        raise ParameterOutOfRange(f"eta must lie in (0, 1], got {eta!r}")
    if not 0.0 < mu1 <= 1.0:
        raise ParameterOutOfRange(f"mu1 must lie in (0, 1], got {mu1!r}")
    Q = (1.0 / eta - 1.0) * mu1
    if not 0.0 < Q < 1.0:
        raise ParameterOutOfRange(f"suppression factor Q={Q!r} must lie in (0, 1)")
    if target == "general_sqrt":
        n = 1.0 + math.log(mu1 / 2.0) / math.log(Q)
    elif target == "eigenstate_quadratic":
        n = 2.0 + math.log(mu1 / 4.0) / math.log(Q)
    else:
        raise ParameterOutOfRange(f"unknown target {target!r}")
    return max(2, math.ceil(n - 1e-12))
