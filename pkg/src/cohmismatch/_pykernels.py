"""Pure-numpy kernels: secular root solver and in-place density-matrix channels.

The Cython module ``_kernels`` implements the same functions with the same
signatures; :mod:`cohmismatch.backend` picks one at import time.

Qubit ``q`` of an ``n``-qubit register is bit ``n - 1 - q`` of the basis
index (qubit 0 is the most significant).
"""

from __future__ import annotations

import numpy as np

_EPS = np.finfo(float).eps
MAX_ITER = 200


def secular_roots(F: float, C: np.ndarray, D: np.ndarray):
    """All roots of ``x - F + sum C_k^2/(D_k - x)``.

    ``C`` must be strictly positive and ``D`` strictly descending. Returns
    ``(roots, origin, tau)`` with ``roots`` descending and
    ``roots[r] = D[origin[r]] + tau[r]``; the shifted ``tau`` keeps full
    relative precision for roots that sit close to a pole.
    """
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    m = D.shape[0]
    c2 = C * C
    cnorm = float(np.sqrt(c2.sum()))
    origin = np.empty(m + 1, dtype=np.intp)
    lo = np.empty(m + 1)
    hi = np.empty(m + 1)

    origin[0] = 0
    lo[0] = 0.0
    hi[0] = max(F - D[0], 0.0) + cnorm
    if m > 1:
        mids = 0.5 * (D[:-1] + D[1:])
        pm = mids - F + np.sum(c2[None, :] / (D[None, :] - mids[:, None]), axis=1)
        below = pm >= 0.0  # root lies in (D[r], mid]
        r = np.arange(1, m)
        origin[1:m] = np.where(below, r, r - 1)
        lo[1:m] = np.where(below, 0.0, mids - D[r - 1])
        hi[1:m] = np.where(below, mids - D[r], 0.0)
    origin[m] = m - 1
    lo[m] = min(F - D[m - 1], 0.0) - cnorm
    hi[m] = 0.0

    base = D[origin] - F
    delta = D[None, :] - D[origin][:, None]
    tau = 0.5 * (lo + hi)
    active = np.ones(m + 1, dtype=bool)
    for _ in range(MAX_ITER):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        t = tau[idx]
        q = 1.0 / (delta[idx] - t[:, None])
        p = base[idx] + t + np.sum(c2[None, :] * q, axis=1)
        dp = 1.0 + np.sum(c2[None, :] * q * q, axis=1)
        pos = p > 0
        neg = p < 0
        hi[idx[pos]] = t[pos]
        lo[idx[neg]] = t[neg]
        new = t - p / dp
        l, h = lo[idx], hi[idx]
        bad = ~((new > l) & (new < h))
        new[bad] = 0.5 * (l[bad] + h[bad])
        step = np.abs(new - t)
        done = (p == 0) | (step <= 2 * _EPS * np.abs(new)) | (h - l <= 2 * _EPS * np.maximum(np.abs(l), np.abs(h)))
        done |= (h - l) <= 1e-300
        tau[idx] = np.where(p == 0, t, new)
        active[idx[done]] = False
    roots = D[origin] + tau
    return roots, origin, tau


def _left_1q(rho: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    d = rho.shape[0]
    left = 1 << q
    r = rho.reshape(left, 2, (d // (2 * left)) * d)
    return np.matmul(u, r).reshape(d, d)


def apply_1q(rho: np.ndarray, u: np.ndarray, q: int, n: int) -> None:
    """``rho <- U rho U^dag`` on qubit ``q``; Hermiticity of rho is used."""
    x = _left_1q(rho, u, q, n)
    rho[...] = _left_1q(np.ascontiguousarray(x.conj().T), u, q, n).conj().T


def _left_2q(rho: np.ndarray, u: np.ndarray, q1: int, q2: int, n: int) -> np.ndarray:
    d = rho.shape[0]
    t = rho.reshape((2,) * n + (d,))
    t = np.tensordot(u.reshape(2, 2, 2, 2), t, axes=([2, 3], [q1, q2]))
    t = np.moveaxis(t, [0, 1], [q1, q2])
    return t.reshape(d, d)


def apply_2q(rho: np.ndarray, u: np.ndarray, q1: int, q2: int, n: int) -> None:
    """``rho <- U rho U^dag`` with ``U`` acting on ``(q1, q2)`` in that order."""
    x = _left_2q(rho, u, q1, q2, n)
    rho[...] = _left_2q(np.ascontiguousarray(x.conj().T), u, q1, q2, n).conj().T


def _blocks(rho: np.ndarray, q: int, n: int) -> np.ndarray:
    d = rho.shape[0]
    left = 1 << q
    return rho.reshape(left, 2, d // (2 * left), left, 2, d // (2 * left))


def depolarize_1q(rho: np.ndarray, p: float, q: int, n: int) -> None:
    """Single-qubit depolarising channel, each Pauli with probability ``p/3``."""
    t = _blocks(rho, q, n)
    a = t[:, 0, :, :, 0, :].copy()
    b = t[:, 1, :, :, 1, :].copy()
    t[:, 0, :, :, 0, :] = (1 - 2 * p / 3) * a + (2 * p / 3) * b
    t[:, 1, :, :, 1, :] = (1 - 2 * p / 3) * b + (2 * p / 3) * a
    s = 1 - 4 * p / 3
    t[:, 0, :, :, 1, :] *= s
    t[:, 1, :, :, 0, :] *= s


def dephase_1q(rho: np.ndarray, p: float, q: int, n: int) -> None:
    """``(1-p) rho + p Z rho Z`` on qubit ``q``."""
    t = _blocks(rho, q, n)
    t[:, 0, :, :, 1, :] *= 1 - 2 * p
    t[:, 1, :, :, 0, :] *= 1 - 2 * p


def _parity(n: int, q1: int, q2: int) -> np.ndarray:
    i = np.arange(1 << n)
    return ((i >> (n - 1 - q1)) ^ (i >> (n - 1 - q2))) & 1


def dephase_zz(rho: np.ndarray, p: float, q1: int, q2: int, n: int) -> None:
    """``(1-p) rho + p ZZ rho ZZ`` on the pair ``(q1, q2)``."""
    par = _parity(n, q1, q2)
    flip = par[:, None] != par[None, :]
    rho[flip] *= 1 - 2 * p


def damp_1q(rho: np.ndarray, gamma: float, q: int, n: int) -> None:
    """Amplitude damping with decay probability ``gamma`` on qubit ``q``."""
    t = _blocks(rho, q, n)
    s = np.sqrt(1 - gamma)
    t[:, 0, :, :, 0, :] += gamma * t[:, 1, :, :, 1, :]
    t[:, 1, :, :, 1, :] *= 1 - gamma
    t[:, 0, :, :, 1, :] *= s
    t[:, 1, :, :, 0, :] *= s
