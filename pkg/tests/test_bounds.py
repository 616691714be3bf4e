import numpy as np
import pytest

from cohmismatch import linalg_core as la
from cohmismatch.arrowhead import ArrowheadForm, mismatch_direct
from cohmismatch.bounds import (
    bound_ratio,
    bound_report,
    commutator,
    commutator_lower_bound,
    commutator_metrics,
    commutator_norm,
    commutator_upper_bound,
    delta_upper_bound,
    weyl_bounds,
)
from cohmismatch.errors import DegenerateDominantEigenvalue, ParameterOutOfRange
from cohmismatch.states import DensityMatrix, PureState, optimal_eta

from conftest import noisy_state

SANDWICH_TOL = 1e-12


def test_delta_bound_values():
    assert delta_upper_bound(0.0) == 0.0
    assert delta_upper_bound(1.0) == pytest.approx(0.5)
    assert delta_upper_bound(0.1) == pytest.approx((1 - np.sqrt(0.99)) / 2, rel=1e-14)
    assert delta_upper_bound(1e-9) == pytest.approx(0.25e-18, rel=1e-10)
    with pytest.raises(ParameterOutOfRange):
        delta_upper_bound(1.5)


def test_weyl_bounds():
    (lo, hi), (lo2, hi2) = weyl_bounds(0.8, 0.2)
    assert (lo, hi, lo2, hi2) == pytest.approx((0.8, 0.96, 0.0, 0.16))


def test_commutator_spectrum_and_norms():
    for i in range(50):
        rho, psi = noisy_state(11, i, 2, 12)
        k = commutator(rho.matrix, psi)
        assert np.allclose(k, -k.conj().T)
        met = commutator_metrics(rho, psi)
        sv = np.linalg.svd(k, compute_uv=False)
        assert sv[0] == pytest.approx(met.sigma, abs=1e-12)
        assert sv[1] == pytest.approx(met.sigma, abs=1e-12)
        assert np.all(sv[2:] <= 1e-12)
        ev = np.linalg.eigvals(k)
        assert np.max(np.abs(ev.real)) <= 1e-12
        assert np.max(np.abs(ev.imag)) == pytest.approx(met.sigma, abs=1e-12)
        hs2 = np.sum(np.abs(k) ** 2)
        assert hs2 == pytest.approx(2 * met.sigma**2, abs=1e-12)
        assert commutator_norm(rho, psi, 1) == pytest.approx(2 * met.sigma, abs=1e-12)
        assert commutator_norm(rho, psi, 2) == pytest.approx(np.sqrt(2) * met.sigma, abs=1e-12)
        assert commutator_norm(rho, psi, np.inf) == pytest.approx(met.sigma, abs=1e-12)


def test_arrowhead_sigma_is_arm_norm():
    a = ArrowheadForm.from_entries(0.6, [0.2, 0.1], [0.25, 0.15])
    rho = DensityMatrix(a.matrix())
    met = commutator_metrics(rho, PureState.basis(3))
    assert met.sigma == pytest.approx(np.hypot(0.2, 0.1), abs=1e-15)


def test_pure_state_has_zero_metrics():
    psi = PureState.from_vector([1, 1j, 0])
    met = commutator_metrics(psi.density(), psi)
    assert met.sigma == pytest.approx(0.0, abs=1e-7)
    assert met.Delta_min == 0.0
    assert commutator_upper_bound(met) == pytest.approx(0.0, abs=1e-13)


def test_sandwich_and_delta_bound():
    # eta >= 1/2 keeps c <= 1/2, where the capped upper bound is meaningful
    for i in range(2000):
        rho, psi = noisy_state(13, i, 2, 32, 0.5, 1.0)
        rep = bound_report(rho, psi)
        assert rep.lower_bound <= rep.c + SANDWICH_TOL
        assert rep.c <= rep.Delta_bound + SANDWICH_TOL
        if rep.delta is not None and rep.delta <= 1:
            assert rep.c <= rep.delta_bound + SANDWICH_TOL


def test_weyl_and_sigma_eta_delta():
    for i in range(300):
        rho, psi = noisy_state(17, i, 2, 16, 0.3, 1.0)
        rep = bound_report(rho, psi)
        if rep.delta is None:
            continue
        lam, lam2 = la.eigvalsh_desc(rho.matrix)[:2]
        lo, hi = rep.weyl_lambda_range
        lo2, hi2 = rep.weyl_lambda2_range
        assert lo - 1e-12 <= lam <= hi + 1e-12
        assert lo2 - 1e-12 <= lam2 <= hi2 + 1e-12
        assert rep.metrics.sigma <= rep.eta * rep.delta / 2 + 1e-12


def test_ratio_estimate_small_c():
    hits = 0
    for i in range(400):
        rho, psi = noisy_state(19, i, 3, 8, 0.97, 0.999)
        rep = bound_report(rho, psi)
        if rep.c >= 1e-4 or rep.metrics.Delta_min == 0:
            continue
        hits += 1
        ratio = rep.lower_bound / rep.Delta_bound
        assert ratio == pytest.approx(rep.ratio_estimate, rel=0.05)
    assert hits >= 20


def test_bound_ratio_validation():
    assert bound_ratio(0.5, 0.1) == pytest.approx((0.5 / 0.9) ** 2)
    with pytest.raises(ParameterOutOfRange):
        bound_ratio(0.1, 0.5)


def test_no_decomposition_gives_vacuous_delta_bound():
    # psi orthogonal to the support of rho: eta = 0
    rho = DensityMatrix.diagonal([0.0, 0.7, 0.3])
    rep = bound_report(rho, PureState.basis(3))
    assert rep.delta is None and rep.delta_bound == 1.0
    assert rep.c == pytest.approx(1.0)


def test_degenerate_metrics_raise():
    with pytest.raises(DegenerateDominantEigenvalue):
        commutator_metrics(DensityMatrix.diagonal([0.5, 0.5]), PureState.basis(2))


def test_report_matches_components():
    rho, psi = noisy_state(23, 0, 5, 5, 0.6, 0.9)
    rep = bound_report(rho, psi)
    dec = optimal_eta(rho, psi)
    assert rep.c == pytest.approx(mismatch_direct(rho, psi).c)
    assert rep.delta == pytest.approx(dec.delta)
    assert rep.lower_bound == pytest.approx(commutator_lower_bound(commutator_metrics(rho, psi)))
