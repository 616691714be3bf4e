import numpy as np
import pytest

from cohmismatch import linalg_core as la
from cohmismatch.arrowhead import mismatch_direct
from cohmismatch.bounds import commutator_lower_bound, commutator_metrics, commutator_upper_bound, delta_upper_bound
from cohmismatch.errors import InfeasibleSpec, ParameterOutOfRange
from cohmismatch.extremal import (
    ExtremalSpec,
    best_case_commutator,
    build,
    limiting_global,
    limiting_small_delta,
    worst_case_commutator,
    worst_case_delta,
)
from cohmismatch.rng import make_rng
from cohmismatch.states import DensityMatrix, optimal_eta, random_simplex

SAT = 1e-10


def _delta_spec(i):
    rng = make_rng(401, i)
    d = int(rng.integers(2, 12))
    mu1 = float(rng.uniform(1.2 / (d - 1), 1.0)) if d > 2 else 1.0
    eta = float(rng.uniform(mu1 / (1 + mu1), 0.999))
    n = d - 2
    if n:
        # random tail with entries <= mu1 summing to 1 - mu1
        t = random_simplex(n, rng) * (1 - mu1)
        while t.max() > mu1:
            t = 0.5 * (t + (1 - mu1) / n)
    else:
        t = np.zeros(0)
    return d, eta, mu1, t


def _weights(rng, d):
    return np.sort(random_simplex(d, rng))[::-1]


def test_worst_case_delta_example(oracle):
    rho, psi = worst_case_delta(2, 0.9, 1.0, seed=3)
    assert mismatch_direct(rho, psi).c == pytest.approx(oracle["delta_worst_eta0.9"], abs=1e-12)


def test_worst_case_delta_saturates():
    for i in range(100):
        d, eta, mu1, t = _delta_spec(i)
        rho, psi = worst_case_delta(d, eta, mu1, t, seed=i)
        rho.validate()
        delta = (1 / eta - 1) * mu1
        assert mismatch_direct(rho, psi).c == pytest.approx(delta_upper_bound(delta), abs=SAT)
        dec = optimal_eta(rho, psi)
        assert dec.eta >= eta - 1e-9


def test_error_eigenvectors_orthogonal_to_ideal():
    for i in range(30):
        d, eta, mu1, t = _delta_spec(i)
        if d < 3:
            continue
        rho, psi = worst_case_delta(d, eta, mu1, t, seed=i)
        err = (rho.matrix - eta * psi.projector()) / (1 - eta)
        w, v = np.linalg.eigh(err)
        top = np.argmax(w)
        delta = (1 / eta - 1) * mu1
        # the dominant eigenvector carries overlap alpha = (1 - delta)/2
        assert abs(np.vdot(psi.amplitudes, v[:, top])) ** 2 == pytest.approx((1 - delta) / 2, abs=1e-10)
        for k in range(d):
            if k != top and w[k] > 1e-9:
                assert abs(np.vdot(psi.amplitudes, v[:, k])) <= 1e-12 * 1e3


def test_tail_choice_does_not_change_mismatch():
    a, pa = worst_case_delta(6, 0.8, 0.4, [0.15, 0.15, 0.15, 0.15], seed=1)
    b, pb = worst_case_delta(6, 0.8, 0.4, [0.4, 0.2, 0.0, 0.0], seed=2)
    assert mismatch_direct(a, pa).c == pytest.approx(mismatch_direct(b, pb).c, abs=1e-12)


def test_small_delta_limit_is_equal_superposition():
    rho, psi = limiting_small_delta(3, 1e-6, seed=0)
    err = (rho.matrix - (1 / (1 + 1e-6)) * psi.projector()) / (1 - 1 / (1 + 1e-6))
    chi = np.linalg.eigh(0.5 * (err + err.conj().T))[1][:, -1]
    assert abs(np.vdot(psi.amplitudes, chi)) ** 2 == pytest.approx(0.5, abs=1e-6)


def test_worst_case_delta_infeasible():
    with pytest.raises(InfeasibleSpec):
        worst_case_delta(2, 0.4, 1.0)
    with pytest.raises(InfeasibleSpec) as e:
        worst_case_delta(4, 0.9, 0.3, [0.6, 0.1])
    assert e.value.constraint == "dominance"
    with pytest.raises(InfeasibleSpec):
        worst_case_delta(4, 0.9, 0.5, [0.1, 0.1])


def test_worst_case_commutator_example():
    rho, psi = worst_case_commutator(3, 0.6, 0.2, [0.3, 0.1], seed=0)
    met = commutator_metrics(rho, psi)
    assert met.Delta == pytest.approx(0.4, abs=1e-12)
    assert commutator_upper_bound(met) == pytest.approx(0.2, abs=1e-12)
    assert mismatch_direct(rho, psi).c == pytest.approx(0.2, abs=1e-12)
    rho, psi = worst_case_commutator(3, 0.6, 0.0, [0.3, 0.1], seed=0)
    assert mismatch_direct(rho, psi).c == pytest.approx(0.0, abs=1e-14)


def test_worst_case_commutator_saturates():
    n = 0
    for i in range(100):
        rng = make_rng(402, i)
        d = int(rng.integers(2, 12))
        w = _weights(rng, d)
        F, D = w[0], w[1:]
        cmax = np.sqrt(F * D[0])
        if d >= 3:
            cmax = min(cmax, np.sqrt((D[0] - D[1]) * (F - D[1])))
        C2 = float(rng.uniform(0.05, 0.95)) * cmax
        rho, psi = worst_case_commutator(d, F, C2, D, seed=i)
        rho.validate()
        c = mismatch_direct(rho, psi).c
        assert c == pytest.approx(commutator_upper_bound(commutator_metrics(rho, psi)), abs=SAT)
        n += 1
    assert n == 100


def test_worst_case_commutator_infeasible():
    with pytest.raises(InfeasibleSpec) as e:
        worst_case_commutator(3, 0.6, 0.2, [0.2, 0.2])
    assert e.value.constraint == "second eigenvalue"
    with pytest.raises(InfeasibleSpec):
        worst_case_commutator(2, 0.6, 0.6, [0.4])
    with pytest.raises(InfeasibleSpec):
        worst_case_commutator(3, 0.6, 0.1, [0.3, 0.3])


def test_best_case_commutator_example():
    rho, psi = best_case_commutator(3, 0.6, 0.2, 0.1, [0.3], seed=0)
    c = mismatch_direct(rho, psi).c
    assert c == pytest.approx(commutator_lower_bound(commutator_metrics(rho, psi)), abs=SAT)
    rho, psi = best_case_commutator(3, 0.6, 0.0, 0.1, [0.3], seed=0)
    assert mismatch_direct(rho, psi).c == pytest.approx(0.0, abs=1e-14)


def test_best_case_commutator_saturates():
    for i in range(100):
        rng = make_rng(403, i)
        d = int(rng.integers(2, 12))
        w = _weights(rng, d)
        F, mid, Dm = w[0], w[1:-1], w[-1]
        Cm = float(rng.uniform(0.05, 0.95)) * np.sqrt(F * Dm)
        rho, psi = best_case_commutator(d, F, Cm, Dm, mid, seed=i)
        rho.validate()
        c = mismatch_direct(rho, psi).c
        assert c == pytest.approx(commutator_lower_bound(commutator_metrics(rho, psi)), abs=SAT)


def test_best_case_commutator_infeasible():
    with pytest.raises(InfeasibleSpec):
        best_case_commutator(3, 0.6, 0.3, 0.1, [0.3])
    with pytest.raises(InfeasibleSpec):
        best_case_commutator(3, 0.5, 0.1, 0.3, [0.2])


def test_limiting_global(oracle):
    for w, vals in oracle["limiting_global"].items():
        rho = limiting_global(float(w))
        from cohmismatch.states import PureState

        assert mismatch_direct(rho, PureState.basis(2)).c == pytest.approx(vals["c"], abs=1e-12)
        half = DensityMatrix.maximally_mixed(2).matrix
        assert la.trace_distance(rho.matrix, half) == pytest.approx(vals["trdist_to_half_identity"], abs=1e-12)
    with pytest.raises(ParameterOutOfRange):
        limiting_global(0.2)


def test_build_dispatch():
    rho, psi = build(ExtremalSpec("delta_worst", dim=3, eta=0.9, mu1=0.6, seed=4))
    assert rho.dim == 3 and psi.dim == 3
    spec = ExtremalSpec("commutator_worst", dim=3, seed=1, params={"F": 0.6, "C2": 0.2, "D": [0.3, 0.1]})
    assert mismatch_direct(*build(spec)).c == pytest.approx(0.2, abs=1e-12)
    assert ExtremalSpec("delta_worst", eta=0.5, mu1=1.0).alpha == pytest.approx(0.0)
    assert build(ExtremalSpec("limiting_global", params={"omega": 1e-2})).dim == 2


def test_seed_changes_frame_not_mismatch():
    a, pa = worst_case_delta(4, 0.7, 0.5, seed=1)
    b, pb = worst_case_delta(4, 0.7, 0.5, seed=2)
    assert not np.allclose(a.matrix, b.matrix)
    assert mismatch_direct(a, pa).c == pytest.approx(mismatch_direct(b, pb).c, abs=1e-12)
