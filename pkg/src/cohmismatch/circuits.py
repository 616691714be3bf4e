"""Small noisy-circuit simulator and the commutator-norm bound family.

Each gate is followed by its error channel ``(1-eps) U rho U^dag + eps sum M U rho U^dag M^dag``.
Error operators act on the gate's target qubits:

* ``dephasing``: ``Z`` after single-qubit gates, ``Z (x) Z`` after two-qubit
  gates, so the channel always has a single error operator.
* ``depolarising``: single-qubit depolarising of strength ``eps``; after a
  two-qubit gate each target gets strength ``eps/2``.
* ``damping``: amplitude damping with ``gamma = eps`` on every target.

Qubit 0 is the most significant bit of the basis index.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import backend
from .errors import BranchExplosion, InvalidDimension, ParameterOutOfRange, TooManyQubits, UnsupportedChannel
from .rng import make_rng
from .states import DensityMatrix, PureState

MAX_STATEVECTOR_QUBITS = 12
MAX_DENSITY_QUBITS = 10
MAX_BRANCH_GATES = 14
XX_DEFAULT_ANGLE = math.pi / 2

Channel = Literal["dephasing", "depolarising", "damping", "none"]
CHANNELS = ("dephasing", "depolarising", "damping", "none")
GATE_KINDS = ("rx", "rz", "cnot", "xx")
ANGLE_MODES = ("haar_uniform", "linear", "constant")

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class GateOp:
    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ParameterOutOfRange(f"unknown gate kind {self.kind!r}")
        t = tuple(int(q) for q in self.targets)
        object.__setattr__(self, "targets", t)
        need = 1 if self.kind in ("rx", "rz") else 2
        if len(t) != need or len(set(t)) != need:
            raise ParameterOutOfRange(f"{self.kind} needs {need} distinct targets, got {t}")
        if self.kind in ("rx", "rz") and self.angle is None:
            raise ParameterOutOfRange(f"{self.kind} needs an angle")

    def unitary(self) -> np.ndarray:
        if self.kind == "rx":
            h = 0.5 * self.angle
            return np.array([[math.cos(h), -1j * math.sin(h)], [-1j * math.sin(h), math.cos(h)]])
        if self.kind == "rz":
            h = 0.5 * self.angle
            return np.diag([np.exp(-1j * h), np.exp(1j * h)])
        if self.kind == "cnot":
            u = np.eye(4, dtype=complex)
            u[2:, 2:] = _X
            return u
        h = 0.5 * (XX_DEFAULT_ANGLE if self.angle is None else self.angle)
        return math.cos(h) * np.eye(4) - 1j * math.sin(h) * np.kron(_X, _X)


@dataclass(frozen=True)
class NoiseSpec:
    channel: str = "none"
    epsilon: float = 0.0
    overrides: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise UnsupportedChannel(f"unknown channel {self.channel!r}")
        eps = [self.epsilon] + list(self.overrides or ())
        if any(not 0.0 <= e < 1.0 for e in eps):
            raise ParameterOutOfRange("error probabilities must lie in [0, 1)")

    def rates(self, nu: int) -> np.ndarray:
        if self.channel == "none":
            return np.zeros(nu)
        if self.overrides is not None:
            if len(self.overrides) != nu:
                raise ParameterOutOfRange(f"need {nu} per-gate rates, got {len(self.overrides)}")
            return np.asarray(self.overrides, dtype=float)
        return np.full(nu, float(self.epsilon))


@dataclass(frozen=True)
class CircuitSpec:
    qubits: int
    gates: tuple[GateOp, ...]
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.qubits < 1:
            raise InvalidDimension("need at least one qubit")
        if len(self.gates) < 1:
            raise ParameterOutOfRange("a circuit needs at least one gate")
        for g in self.gates:
            if max(g.targets) >= self.qubits or min(g.targets) < 0:
                raise ParameterOutOfRange(f"gate targets {g.targets} outside {self.qubits} qubits")

    @property
    def nu(self) -> int:
        return len(self.gates)

    def with_noise(self, channel: str, epsilon: float) -> "CircuitSpec":
        return replace(self, noise=NoiseSpec(channel, epsilon))


@dataclass(frozen=True, eq=False)
class CircuitRunResult:
    rho: DensityMatrix
    psi_id: PureState
    sigma2: float
    xi: float
    eta_tilde: float
    f_exact: float
    f_approx: float


def _apply_state(psi: np.ndarray, u: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Apply a gate to a batch of statevectors shaped ``(B, 2**n)``."""
    b = psi.shape[0]
    t = psi.reshape((b,) + (2,) * n)
    k = len(targets)
    axes = [q + 1 for q in targets]
    t = np.tensordot(u.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), axes))
    t = np.moveaxis(t, list(range(k)), axes)
    return t.reshape(b, -1)


def simulate_ideal(spec: CircuitSpec) -> PureState:
    n = spec.qubits
    if n > MAX_STATEVECTOR_QUBITS:
        raise TooManyQubits(f"{n} qubits exceeds the statevector limit {MAX_STATEVECTOR_QUBITS}")
    psi = np.zeros((1, 1 << n), dtype=complex)
    psi[0, 0] = 1.0
    for g in spec.gates:
        psi = _apply_state(psi, g.unitary(), g.targets, n)
    return PureState.from_vector(psi[0])


def local_kraus(gate: GateOp, channel: str, eps: float) -> list[np.ndarray]:
    """Kraus operators of one noisy gate on its target qubits (in target order)."""
    u = gate.unitary()
    k = len(gate.targets)
    if channel == "none" or eps == 0.0:
        return [u]
    if channel == "dephasing":
        m = _Z if k == 1 else np.kron(_Z, _Z)
        return [math.sqrt(1 - eps) * u, math.sqrt(eps) * m @ u]

    def single(p: float) -> list[np.ndarray]:
        if channel == "depolarising":
            return [math.sqrt(1 - p) * _I2] + [math.sqrt(p / 3) * s for s in (_X, _Y, _Z)]
        if channel == "damping":
            return [np.diag([1.0, math.sqrt(1 - p)]).astype(complex), np.array([[0, math.sqrt(p)], [0, 0]], dtype=complex)]
        raise UnsupportedChannel(channel)

    if k == 1:
        return [e @ u for e in single(eps)]
    p = eps / 2 if channel == "depolarising" else eps
    ops = single(p)
    return [np.kron(a, b) @ u for a in ops for b in ops]


def simulate_density(spec: CircuitSpec, kernels=None) -> DensityMatrix:
    """Gate-by-gate channel evolution starting from ``|0...0>``."""
    n = spec.qubits
    if n > MAX_DENSITY_QUBITS:
        raise TooManyQubits(f"{n} qubits exceeds the density-matrix limit {MAX_DENSITY_QUBITS}")
    k = backend.kernels if kernels is None else kernels
    d = 1 << n
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    rates = spec.noise.rates(spec.nu)
    ch = spec.noise.channel
    for g, eps in zip(spec.gates, rates):
        u = g.unitary()
        t = g.targets
        if len(t) == 1:
            k.apply_1q(rho, u, t[0], n)
        else:
            k.apply_2q(rho, u, t[0], t[1], n)
        if eps == 0.0 or ch == "none":
            continue
        if ch == "dephasing":
            if len(t) == 1:
                k.dephase_1q(rho, eps, t[0], n)
            else:
                k.dephase_zz(rho, eps, t[0], t[1], n)
        elif ch == "depolarising":
            p = eps if len(t) == 1 else eps / 2
            for q in t:
                k.depolarize_1q(rho, p, q, n)
        elif ch == "damping":
            for q in t:
                k.damp_1q(rho, eps, q, n)
    rho /= np.real(np.trace(rho))
    return DensityMatrix._trusted(rho)


def sigma2_of(rho, psi) -> float:
    """``<psi|rho^2|psi> - <psi|rho|psi>^2`` via the component of ``rho psi`` orthogonal to ``psi``."""
    m = getattr(rho, "matrix", rho)
    v = getattr(psi, "amplitudes", psi)
    r = m @ v
    r = r - np.vdot(v, r) * v
    return float(np.real(np.vdot(r, r)))


def circuit_sigma2(spec: CircuitSpec, kernels=None) -> CircuitRunResult:
    psi = simulate_ideal(spec)
    rho = simulate_density(spec, kernels)
    rates = spec.noise.rates(spec.nu)
    xi = float(rates.sum())
    nu = spec.nu
    eta_t = float(np.prod(1.0 - rates))
    fe = f_bound(xi, nu, "exact") if xi < nu else float("nan")
    fa = f_bound(xi, nu, "approx") if xi < nu else float("nan")
    return CircuitRunResult(rho, psi, sigma2_of(rho, psi), xi, eta_t, fe, fa)


@dataclass(frozen=True, eq=False)
class BranchTable:
    """Every error event: probability, ``<psi_id|E_k>``, its modulus and the branch state."""

    probabilities: np.ndarray
    overlaps: np.ndarray
    a: np.ndarray
    states: np.ndarray
    patterns: np.ndarray  # (branches, nu) boolean: which gates erred


def enumerate_branches(spec: CircuitSpec) -> tuple[float, BranchTable]:
    """Exact ``sigma^2`` from all ``2^nu`` error events of a single-operator channel.

    Row 0 of the table is the error-free branch; the remaining ``2^nu - 1`` rows
    are the error events.
    """
    if spec.noise.channel != "dephasing":
        raise UnsupportedChannel("branch enumeration needs a single error operator per gate (dephasing)")
    nu = spec.nu
    if nu > MAX_BRANCH_GATES:
        raise BranchExplosion(f"{nu} gates gives 2^{nu} branches; limit is {MAX_BRANCH_GATES} gates")
    n = spec.qubits
    if n > MAX_STATEVECTOR_QUBITS:
        raise TooManyQubits(f"{n} qubits exceeds the statevector limit")
    rates = spec.noise.rates(nu)
    states = np.zeros((1, 1 << n), dtype=complex)
    states[0, 0] = 1.0
    probs = np.ones(1)
    pats = np.zeros((1, 0), dtype=bool)
    for g, eps in zip(spec.gates, rates):
        states = _apply_state(states, g.unitary(), g.targets, n)
        m = _Z if len(g.targets) == 1 else np.kron(_Z, _Z)
        err = _apply_state(states, m, g.targets, n)
        states = np.concatenate([states, err])
        probs = np.concatenate([probs * (1 - eps), probs * eps])
        pats = np.concatenate(
            [np.hstack([pats, np.zeros((pats.shape[0], 1), bool)]), np.hstack([pats, np.ones((pats.shape[0], 1), bool)])]
        )
    # order branches by error pattern read as a binary number, gate 1 most significant
    weights = 1 << np.arange(nu - 1, -1, -1)
    order = np.argsort(pats.astype(np.int64) @ weights if nu else np.zeros(1, np.int64), kind="stable")
    states, probs, pats = states[order], probs[order], pats[order]
    psi = states[0]
    ov = states.conj() @ psi  # <E_k|psi_id>
    phi = (probs * ov) @ states
    phi = phi - np.vdot(psi, phi) * psi
    sigma2 = float(np.real(np.vdot(phi, phi)))
    table = BranchTable(probs, ov.conj(), np.abs(ov), states, pats)
    return sigma2, table


def _check_xi_nu(xi: float, nu: float) -> None:
    if not nu > 0:
        raise ParameterOutOfRange(f"nu must be positive, got {nu!r}")
    if not 0.0 <= xi < nu:
        raise ParameterOutOfRange(f"need 0 <= xi < nu, got xi={xi!r}, nu={nu!r}")


def f_bound(xi: float, nu: float, form: Literal["exact", "approx"] = "exact") -> float:
    """Bound function ``f(xi)`` on the diagonal branch contribution to ``sigma^2``.

    Exact: ``(1-eps)^(2 nu) [((1 - 2(1-eps) eps)/(1-eps)^2)^nu - 1]`` with
    ``eps = xi/nu``. Approximate: ``exp(-2 xi) xi^2 / nu``.
    """
    if form not in ("exact", "approx"):
        raise ParameterOutOfRange(f"unknown form {form!r}")
    if form == "exact" and nu < 1:
        raise ParameterOutOfRange(f"nu must be at least 1, got {nu!r}")
    return _f(xi, nu, form)


def _f(xi: float, nu: float, form: str) -> float:
    _check_xi_nu(xi, nu)
    if form == "approx":
        return math.exp(-2.0 * xi) * xi * xi / nu
    eps = xi / nu
    # (1 - 2(1-eps)eps) = (1-eps)^2 + eps^2
    return math.exp(2.0 * nu * math.log1p(-eps)) * math.expm1(nu * math.log1p((eps / (1.0 - eps)) ** 2))


def f_bound_general(xi: float, nu: float, kraus_rank: int = 1, kappa: float = 0.0) -> float:
    """Bound for Kraus rank ``K`` and a commuting fraction ``kappa`` of error operators.

    ``f/K`` for ``kappa = 0``; otherwise ``4(1-kappa) f(2(1-kappa) xi)`` with the
    gate count reduced to ``(1-kappa) nu``, again divided by ``K``.
    """
    if int(kraus_rank) != kraus_rank or kraus_rank < 1:
        raise ParameterOutOfRange(f"Kraus rank must be a positive integer, got {kraus_rank!r}")
    if not 0.0 <= kappa < 1.0:
        raise ParameterOutOfRange(f"kappa must lie in [0, 1), got {kappa!r}")
    if kappa == 0.0:
        return f_bound(xi, nu, "exact") / kraus_rank
    s = 1.0 - kappa
    return 4.0 * s * _f(2.0 * s * xi, s * nu, "exact") / kraus_rank


def xi_max(epsilon: float) -> tuple[float, float]:
    """Error rate ``xi = nu eps`` at which the exact ``f`` peaks when the gate count varies.

    With ``a = ln(1 - 2 eps + 2 eps^2)`` and ``b = 2 ln(1 - eps)``,
    ``f = exp(a nu) - exp(b nu)`` is stationary at ``nu* = ln(b/a)/(a - b)``.
    Returns ``(xi_max, f_max)``; ``xi_max = 1/2 - eps/8 + O(eps^2)`` and
    ``f_max ~ eps/(2e)``.
    """
    if not 0.0 < epsilon < 0.5:
        raise ParameterOutOfRange(f"epsilon must lie in (0, 1/2), got {epsilon!r}")
    a = math.log1p(-2.0 * epsilon + 2.0 * epsilon * epsilon)
    b = 2.0 * math.log1p(-epsilon)
    nu_star = math.log(b / a) / (a - b)
    return epsilon * nu_star, math.exp(a * nu_star) - math.exp(b * nu_star)


def argmax_xi_fixed_nu(nu: float, form: Literal["exact", "approx"] = "exact") -> tuple[float, float]:
    """Maximiser of ``f(xi)`` over ``xi`` at a fixed gate count (near ``xi = 1``)."""
    hi = min(float(nu) * (1 - 1e-9), 20.0)
    res = minimize_scalar(lambda x: -f_bound(x, nu, form), bounds=(0.0, hi), method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(-res.fun)


def eta_tilde(xi: float, nu: float) -> float:
    """No-error probability ``(1 - xi/nu)^nu`` of a circuit with uniform rates."""
    _check_xi_nu(xi, nu)
    return math.exp(nu * math.log1p(-xi / nu))


def mismatch_scaling_estimate(xi: float, nu: float, Q: float) -> float:
    """Unit-constant estimate ``xi^2 / (nu (1-Q)^2)`` of the circuit mismatch."""
    _check_xi_nu(xi, nu)
    if not 0.0 <= Q < 1.0:
        raise ParameterOutOfRange(f"Q must lie in [0, 1), got {Q!r}")
    return xi * xi / (nu * (1.0 - Q) ** 2)


def fidelity_ratio_estimate(xi: float, nu: float) -> float:
    """Leading behaviour ``e^xi - e^xi xi^2/nu`` of ``(1-c)/F``."""
    _check_xi_nu(xi, nu)
    return math.exp(xi) * (1.0 - xi * xi / nu)


def random_circuit(
    N: int,
    nu: int,
    angle_mode: str = "haar_uniform",
    entangler: str = "cnot",
    seed=0,
    noise: NoiseSpec | None = None,
) -> CircuitSpec:
    """Random circuit drawn uniformly from ``{rx, rz, entangler}``.

    Angles: ``haar_uniform`` draws uniformly in ``[0, 2 pi)``; ``linear`` uses
    ``0.01 k`` for the ``k``-th gate (1-based); ``constant`` uses 0.2. The
    ``xx`` entangler uses the angle of its slot too, ``cnot`` has none.
    """
    if int(N) != N or N < 2:
        raise InvalidDimension(f"need at least 2 qubits, got {N!r}")
    if int(nu) != nu or nu < 1:
        raise InvalidDimension(f"need at least one gate, got {nu!r}")
    if angle_mode not in ANGLE_MODES:
        raise ParameterOutOfRange(f"unknown angle mode {angle_mode!r}")
    if entangler not in ("cnot", "xx"):
        raise ParameterOutOfRange(f"unknown entangler {entangler!r}")
    rng = make_rng(seed)
    kinds = rng.integers(0, 3, size=nu)
    gates = []
    for k in range(nu):
        if angle_mode == "haar_uniform":
            theta = float(rng.uniform(0.0, 2.0 * math.pi))
        elif angle_mode == "linear":
            theta = 0.01 * (k + 1)
        else:
            theta = 0.2
        if kinds[k] < 2:
            q = int(rng.integers(0, N))
            gates.append(GateOp("rx" if kinds[k] == 0 else "rz", (q,), theta))
        else:
            a = int(rng.integers(0, N))
            b = int(rng.integers(0, N - 1))
            b = b + 1 if b >= a else b
            gates.append(GateOp(entangler, (a, b), theta if entangler == "xx" else None))
    return CircuitSpec(N, tuple(gates), noise or NoiseSpec(), seed if isinstance(seed, int) else None)


@dataclass(frozen=True)
class SweepRow:
    qubits: int
    sample_id: int
    xi: float
    epsilon: float
    sigma2: float
    f_exact: float
    f_approx: float


def sweep_sigma2(
    qubits: int,
    nu: int,
    channel: str,
    xi_grid: Sequence[float],
    samples: int,
    seed: int,
    angle_mode: str = "haar_uniform",
    entangler: str = "cnot",
    workers: int = 1,
    kernels=None,
) -> list[SweepRow]:
    """``sigma^2`` of ``samples`` random circuits at every ``xi`` of the grid.

    Circuit ``i`` is drawn from the substream ``(seed, qubits, i)`` and reused
    across the grid. Rows come back ordered by ``(sample_id, xi)`` regardless
    of ``workers``.
    """
    grid = [float(x) for x in xi_grid]

    def one(i: int) -> list[SweepRow]:
        base = random_circuit(qubits, nu, angle_mode, entangler, make_rng(seed, qubits, i))
        psi = simulate_ideal(base)
        out = []
        for xi in grid:
            eps = xi / nu
            rho = simulate_density(base.with_noise(channel, eps), kernels)
            out.append(SweepRow(qubits, i, xi, eps, sigma2_of(rho, psi), f_bound(xi, nu, "exact"), f_bound(xi, nu, "approx")))
        return out

    ids: Iterable[int] = range(samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(one, ids))
    else:
        chunks = [one(i) for i in ids]
    return [r for c in chunks for r in c]
