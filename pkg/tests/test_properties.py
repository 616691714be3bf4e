import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from cohmismatch.arrowhead import ArrowheadForm, decompose, mismatch_analytic, mismatch_direct
from cohmismatch.bounds import bound_report, delta_upper_bound
from cohmismatch.circuits import eta_tilde, f_bound
from cohmismatch.errors import DegenerateDominantEigenvalue
from cohmismatch.rng import make_rng
from cohmismatch.states import haar_random_pure, mix, optimal_eta, random_density

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 24)
etas = st.floats(0.5, 0.999)

FAST = settings(max_examples=150, deadline=None)


def _state(seed, d, eta):
    rng = make_rng(seed)
    psi = haar_random_pure(d, rng)
    return mix(eta, psi, random_density(d, rng)), psi


@FAST
@given(seeds, dims, etas)
def test_analytic_equals_direct(seed, d, eta):
    rho, psi = _state(seed, d, eta)
    try:
        direct = mismatch_direct(rho, psi).c
    except DegenerateDominantEigenvalue:
        return
    assert abs(mismatch_analytic(decompose(rho, psi)).c - direct) <= 1e-9


@FAST
@given(seeds, dims, etas)
def test_bounds_sandwich(seed, d, eta):
    rho, psi = _state(seed, d, eta)
    rep = bound_report(rho, psi)
    assert rep.lower_bound <= rep.c + 1e-12
    assert rep.c <= rep.Delta_bound + 1e-12
    assert rep.c <= rep.delta_bound + 1e-12
    assert rep.c <= 0.5 + 1e-12


@FAST
@given(seeds, dims, etas)
def test_optimal_eta_is_at_least_mixing_weight(seed, d, eta):
    rho, psi = _state(seed, d, eta)
    dec = optimal_eta(rho, psi)
    assert dec.eta >= eta - 1e-9
    assert np.linalg.eigvalsh(dec.rho_err.matrix).min() >= -1e-8


@FAST
@given(st.floats(0.01, 0.99), st.lists(st.floats(0.0, 0.3), min_size=1, max_size=8), st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8))
def test_arrowhead_solver_matches_dense(F, C, D):
    m = min(len(C), len(D))
    a = ArrowheadForm.from_entries(F, C[:m], D[:m])
    dense = np.linalg.eigvalsh(a.matrix())
    from cohmismatch.arrowhead import secular_eigenvalues

    scale = 1.0 + float(np.max(np.abs(dense)))
    assert np.max(np.abs(np.sort(secular_eigenvalues(a)) - dense)) <= 1e-12 * scale * (m + 1)


@given(st.floats(0.0, 1.0))
def test_delta_bound_is_monotone_and_capped(delta):
    b = delta_upper_bound(delta)
    assert 0.0 <= b <= 0.5
    assert b <= delta_upper_bound(min(1.0, delta + 1e-3)) + 1e-15


@given(st.floats(0.0, 10.0), st.integers(20, 2000))
def test_f_forms_and_eta_tilde(xi, nu):
    ex = f_bound(xi, nu, "exact")
    ap = f_bound(xi, nu, "approx")
    assert ex >= 0.0 and ap >= 0.0
    assert eta_tilde(xi, nu) <= math.exp(-xi) * (1 + 1e-12)
    eps = xi / nu
    # the envelope is a small-eps, small xi^2/nu expansion; xi^2 underflows below 1e-100
    if xi > 1e-100 and eps <= 0.05 and xi * xi / nu <= 0.5:
        assert abs(ex / ap - 1) <= 2 * eps + xi * eps + xi * xi / nu + 1e-14
