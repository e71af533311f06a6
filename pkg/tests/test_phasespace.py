"""Tests for photon statistics, quadrature, Wigner, and Husimi evaluators:
closed forms against Fock-basis oracles, normalization, marginals, and the
structural facts (negativity, fringes, coherent-branch asymptotics)."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from beamcat.errors import DomainError, RangeCapError
from beamcat.phasespace import (
    EvalContext,
    PhaseSpaceGrid,
    component_husimi,
    husimi_closed,
    husimi_norm,
    husimi_oracle,
    mandel_q,
    mean_photon_number,
    photon_number_distribution,
    quadrature_distribution,
    quadrature_norm,
    quadrature_oracle,
    wigner_closed,
    wigner_norm,
    wigner_of_component,
    wigner_oracle,
)
from beamcat.states import (
    BeamSplitterParams,
    FockVector,
    SqueezeParams,
    apply_beam_splitter,
    component_state,
    conditional_coefficients,
    conditional_from_oracle,
    normalization_closed,
    squeezed_vacuum,
)

ALPHAS = (0.3, 0.6, 0.8)


def _state(alpha, m):
    return conditional_coefficients(alpha, m)


def _fock(n, n_max=4):
    v = np.zeros(n_max + 1, dtype=complex)
    v[n] = 1.0
    return FockVector(amplitudes=v, n_max=n_max)


def _count_maxima(values):
    inner = values[1:-1]
    return int(np.sum((inner > values[:-2]) & (inner > values[2:])))


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

def test_grid_axes_and_validation():
    g = PhaseSpaceGrid(-5, 5, -4, 4, nx=11, np=9)
    assert g.x_values()[0] == -5 and g.x_values()[-1] == 5
    assert g.p_values().shape == (9,)
    X, P = g.mesh()
    assert X.shape == (11, 9)
    with pytest.raises(DomainError):
        PhaseSpaceGrid(nx=1)
    with pytest.raises(DomainError):
        PhaseSpaceGrid(x_min=2.0, x_max=-2.0)


@given(alpha=st.floats(-0.999, 0.999), phi=st.floats(-10, 10))
def test_eval_context_invariants(alpha, phi):
    ctx = EvalContext.from_alpha(alpha)
    assert ctx.lam > 0
    assert float(ctx.delta_of_phi(phi)) > 0
    assert ctx.delta_of_phi(0.0) == pytest.approx((1 + ctx.alpha_abs) ** 2, rel=1e-12)
    assert ctx.delta_of_phi(math.pi / 2) == pytest.approx(
        (1 - ctx.alpha_abs) ** 2, rel=1e-9
    )


def test_eval_context_domain():
    with pytest.raises(DomainError):
        EvalContext.from_alpha(1.0)


# ---------------------------------------------------------------------------
# Photon-number statistics
# ---------------------------------------------------------------------------

def test_photon_distribution_vacuum_probability():
    p = photon_number_distribution(_state(0.6, 0))
    assert p[0] == pytest.approx(0.8, rel=1e-12)  # sqrt(1 - 0.36)


def test_photon_distribution_parity_zero():
    p = photon_number_distribution(_state(0.45, 2))
    assert p[1] == 0.0


def test_photon_distribution_matches_two_mode_oracle():
    two_mode = apply_beam_splitter(
        squeezed_vacuum(SqueezeParams.from_kappa(0.75)),
        BeamSplitterParams.from_t_abs2(0.8),
    )
    oracle_vec = conditional_from_oracle(two_mode, 1)
    p = photon_number_distribution(_state(0.6, 1))
    n = min(oracle_vec.n_max, len(p) - 1)
    np.testing.assert_allclose(
        p[: n + 1], np.abs(oracle_vec.amplitudes[: n + 1]) ** 2, atol=1e-10
    )


def test_photon_distribution_sums_to_one():
    for alpha in ALPHAS:
        for m in range(6):
            assert photon_number_distribution(_state(alpha, m)).sum() == pytest.approx(
                1.0, abs=1e-10
            )


def test_mean_photon_number_values():
    assert mean_photon_number(_state(0.6, 0)) == pytest.approx(0.5625, rel=1e-12)
    assert mean_photon_number(_state(0.0, 0)) == 0.0


def test_mean_photon_number_matches_moment():
    for alpha in (0.2, 0.4, 0.6, 0.8):
        for m in range(7):
            s = _state(alpha, m)
            moment = float(np.arange(s.n_max + 1) @ photon_number_distribution(s))
            assert mean_photon_number(s) == pytest.approx(moment, rel=1e-9)


def test_mandel_q_signs():
    for alpha in (0.2, 0.4, 0.6, 0.8):
        assert mandel_q(_state(alpha, 2)) > 0.0
    assert mandel_q(_state(0.1, 1)) < 0.0


def test_mandel_q_squeezed_vacuum_value():
    # variance of the squeezed vacuum gives Q = 1 + 2<n>
    s = _state(0.6, 0)
    assert mandel_q(s) == pytest.approx(1.0 + 2.0 * 0.5625, rel=1e-9)


def test_mandel_q_derivative_form():
    # Q = (alpha/<n>) d<n>/dalpha - 1, by central differences
    h = 1e-5
    for alpha in (0.3, 0.6):
        for m in range(5):
            s = _state(alpha, m)
            d_mean = (
                mean_photon_number(_state(alpha + h, m))
                - mean_photon_number(_state(alpha - h, m))
            ) / (2.0 * h)
            q_fd = alpha / mean_photon_number(s) * d_mean - 1.0
            assert mandel_q(s) == pytest.approx(q_fd, abs=1e-4)


def test_mandel_q_vacuum_domain_error():
    with pytest.raises(DomainError):
        mandel_q(_state(0.0, 0))


# ---------------------------------------------------------------------------
# Quadrature distributions
# ---------------------------------------------------------------------------

def test_quadrature_vacuum_gaussian():
    s = _state(0.0, 0)
    x = np.linspace(-3, 3, 13)
    for phi in (0.0, 0.9, math.pi / 2):
        np.testing.assert_allclose(
            quadrature_distribution(s, phi, x),
            np.exp(-x * x) / math.sqrt(math.pi),
            rtol=1e-12,
        )


def test_quadrature_odd_state_zero_at_origin():
    assert quadrature_distribution(_state(0.6, 1), 0.3, 0.0) == 0.0


def test_quadrature_matches_fock_oracle():
    x = np.linspace(-6, 6, 25)
    for alpha in ALPHAS:
        for m in range(6):
            s = _state(alpha, m)
            for phi in (0.0, 0.7, math.pi / 2):
                np.testing.assert_allclose(
                    quadrature_distribution(s, phi, x),
                    quadrature_oracle(s.coefficients, phi, x),
                    atol=1e-9,
                )


def test_quadrature_lobes_and_fringes():
    # phi = 0 is the anti-squeezed axis where the two lobes separate;
    # phi = pi/2 carries the interference fringes
    s = _state(0.6, 2)
    x = np.linspace(-6, 6, 601)
    assert _count_maxima(quadrature_distribution(s, 0.0, x)) == 2
    assert _count_maxima(quadrature_distribution(s, math.pi / 2, x)) >= 3


def test_quadrature_norm_gauss_hermite():
    for alpha in ALPHAS:
        for m in range(6):
            s = _state(alpha, m)
            for phi in (0.0, 1.1):
                assert quadrature_norm(s, phi) == pytest.approx(1.0, abs=1e-12)


def test_quadrature_norm_adaptive():
    # contracted adaptive-quadrature route for a representative subset
    for alpha, m in [(0.3, 1), (0.6, 3), (0.8, 5)]:
        s = _state(alpha, m)
        val, err = integrate.quad(
            lambda x: quadrature_distribution(s, 0.6, x), -np.inf, np.inf,
            epsabs=1e-9, limit=200,
        )
        assert val == pytest.approx(1.0, abs=1e-8)


def test_quadrature_negative_alpha_rotation():
    x = np.linspace(-5, 5, 21)
    for m in (0, 1, 2, 3):
        s = conditional_coefficients(-0.6, m)
        for phi in (0.0, 0.7, math.pi / 2):
            np.testing.assert_allclose(
                quadrature_distribution(s, phi, x),
                quadrature_oracle(s.coefficients, phi, x),
                atol=1e-10,
            )


def test_quadrature_range_cap():
    s = _state(0.3, 2)
    capped = type(s)(alpha=s.alpha, m=21, norm=s.norm, n_max=s.n_max,
                     coefficients=s.coefficients)
    with pytest.raises(RangeCapError):
        quadrature_distribution(capped, 0.0, 0.5)


# ---------------------------------------------------------------------------
# Wigner functions
# ---------------------------------------------------------------------------

def test_wigner_m0_is_squeezed_gaussian():
    s = _state(0.6, 0)
    lam = 0.25
    x, p = 0.7, -1.3
    assert wigner_closed(s, x, p) == pytest.approx(
        math.exp(-lam * x * x - p * p / lam) / math.pi, rel=1e-12
    )


def test_wigner_origin_value_m1():
    assert wigner_closed(_state(0.6, 1), 0.0, 0.0) == pytest.approx(
        -1.0 / math.pi, abs=1e-12
    )


def test_wigner_closed_matches_oracle():
    pts = np.linspace(-6, 6, 9)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    for alpha in ALPHAS:
        for m in range(6):
            s = _state(alpha, m)
            np.testing.assert_allclose(
                wigner_closed(s, X, P),
                wigner_oracle(s.coefficients, X, P),
                atol=1e-9,
            )


def test_wigner_bounded():
    pts = np.linspace(-5, 5, 41)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    for m in range(5):
        w = wigner_closed(_state(0.6, m), X, P)
        assert np.max(np.abs(w)) <= 1.0 / math.pi + 1e-12


def test_wigner_norm_gauss_hermite():
    for alpha in ALPHAS:
        for m in range(6):
            assert wigner_norm(_state(alpha, m)) == pytest.approx(1.0, abs=1e-12)


def test_wigner_norm_adaptive():
    for alpha, m in [(0.6, 0), (0.6, 3)]:
        s = _state(alpha, m)
        lam = (1 - alpha) / (1 + alpha)
        xb = math.sqrt(40.0 / lam)
        pb = math.sqrt(40.0 * lam) + 3.0
        val, err = integrate.dblquad(
            lambda p, x: wigner_closed(s, x, p), -xb, xb, -pb, pb,
            epsabs=1e-9, epsrel=1e-9,
        )
        assert val == pytest.approx(1.0, abs=1e-7)


def _wigner_marginal_over_p(s, x_vals, nodes=80):
    t, w = np.polynomial.hermite.hermgauss(nodes)
    lam = EvalContext.from_alpha(s.alpha).lam
    p_nodes = math.sqrt(lam) * t
    vals = wigner_closed(s, np.asarray(x_vals)[:, None], p_nodes[None, :])
    return math.sqrt(lam) * vals @ (w * np.exp(t * t))


def _wigner_marginal_over_x(s, p_vals, nodes=80):
    t, w = np.polynomial.hermite.hermgauss(nodes)
    lam = EvalContext.from_alpha(s.alpha).lam
    x_nodes = t / math.sqrt(lam)
    vals = wigner_closed(s, x_nodes[None, :], np.asarray(p_vals)[:, None])
    return vals @ (w * np.exp(t * t)) / math.sqrt(lam)


def test_wigner_marginals_are_quadrature_distributions():
    grid = np.linspace(-4, 4, 17)
    for alpha in ALPHAS:
        for m in range(6):
            s = _state(alpha, m)
            np.testing.assert_allclose(
                _wigner_marginal_over_p(s, grid),
                quadrature_distribution(s, 0.0, grid),
                atol=1e-6,
            )
            np.testing.assert_allclose(
                _wigner_marginal_over_x(s, grid),
                quadrature_distribution(s, math.pi / 2, grid),
                atol=1e-6,
            )


def test_wigner_negative_alpha_rotation():
    pts = np.linspace(-4, 4, 9)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    for m in (0, 1, 2, 3):
        s = conditional_coefficients(-0.6, m)
        np.testing.assert_allclose(
            wigner_closed(s, X, P),
            wigner_oracle(s.coefficients, X, P),
            atol=1e-10,
        )


def test_wigner_oracle_vacuum_and_fock1():
    pts = np.linspace(-2, 2, 7)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    np.testing.assert_allclose(
        wigner_oracle(_fock(0), X, P),
        np.exp(-X * X - P * P) / math.pi,
        atol=1e-14,
    )
    assert wigner_oracle(_fock(1), 0.0, 0.0) == pytest.approx(-1.0 / math.pi, abs=1e-14)


def test_wigner_oracle_squeezed_vacuum_crosscheck():
    sv = squeezed_vacuum(SqueezeParams.from_kappa(0.6))
    s = _state(0.6, 0)
    pts = np.linspace(-3, 3, 7)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    np.testing.assert_allclose(
        wigner_oracle(sv, X, P), wigner_closed(s, X, P), atol=1e-10
    )


def _wigner_direct_integral(state, x, p):
    """Defining transform W = (1/pi) Int psi*(x+y) psi(x-y) e^{2ipy} dy for a
    real wavefunction, via adaptive quadrature of the Fock-series psi."""

    def psi(u):
        return math.sqrt(quadrature_oracle(state, 0.0, u)) * math.copysign(
            1.0, _psi_signed(state, u)
        )

    def integrand(y):
        return _psi_signed(state, x + y) * _psi_signed(state, x - y) * math.cos(
            2.0 * p * y
        )

    val, _ = integrate.quad(integrand, -10.0, 10.0, epsabs=1e-10, limit=300)
    return val / math.pi


def _psi_signed(state, u):
    """Real position wavefunction sum_n c_n h_n(u) (coefficients are real)."""
    total = 0.0
    h_prev = math.pi ** -0.25 * math.exp(-u * u / 2.0)
    total += state.amplitudes[0].real * h_prev
    if state.n_max >= 1:
        h_curr = u * math.sqrt(2.0) * h_prev
        total += state.amplitudes[1].real * h_curr
        for n in range(1, state.n_max):
            h_prev, h_curr = h_curr, (
                u * math.sqrt(2.0 / (n + 1)) * h_curr
                - math.sqrt(n / (n + 1.0)) * h_prev
            )
            total += state.amplitudes[n + 1].real * h_curr
    return total


def test_wigner_oracle_agrees_with_defining_integral():
    for m in (0, 1, 2):
        s = _state(0.6, m)
        for x, p in [(0.5, 0.3), (1.2, -0.8)]:
            assert wigner_oracle(s.coefficients, x, p) == pytest.approx(
                _wigner_direct_integral(s.coefficients, x, p), abs=1e-6
            )


def test_wigner_range_cap():
    s = _state(0.3, 2)
    capped = type(s)(alpha=s.alpha, m=21, norm=s.norm, n_max=s.n_max,
                     coefficients=s.coefficients)
    with pytest.raises(RangeCapError):
        wigner_closed(capped, 0.0, 0.0)


# ---------------------------------------------------------------------------
# Husimi functions
# ---------------------------------------------------------------------------

def test_husimi_odd_state_zero_at_origin():
    assert husimi_closed(_state(0.6, 1), 0.0, 0.0) == 0.0


def test_husimi_m0_gaussian_shape():
    s = _state(0.6, 0)
    a = 0.6
    x, p = 0.9, -0.4
    ratio = husimi_closed(s, x, p) / husimi_closed(s, 0.0, 0.0)
    assert ratio == pytest.approx(
        math.exp(-0.5 * ((1 - a) * x * x + (1 + a) * p * p)), rel=1e-12
    )


def test_husimi_closed_matches_overlap_oracle():
    pts = np.linspace(-6, 6, 9)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    for alpha in ALPHAS:
        for m in range(6):
            s = _state(alpha, m)
            np.testing.assert_allclose(
                husimi_closed(s, X, P),
                husimi_oracle(s.coefficients, X, P),
                atol=1e-10,
            )


def test_husimi_nonnegative():
    pts = np.linspace(-5, 5, 21)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    for alpha in ALPHAS:
        for m in range(5):
            assert np.min(husimi_closed(_state(alpha, m), X, P)) >= 0.0


def test_husimi_norm_gauss_hermite():
    for alpha in ALPHAS:
        for m in range(6):
            assert husimi_norm(_state(alpha, m)) == pytest.approx(1.0, abs=1e-12)


def test_husimi_norm_adaptive():
    for alpha, m in [(0.6, 0), (0.6, 2)]:
        s = _state(alpha, m)
        bx = math.sqrt(80.0 / (1 - alpha)) + 3.0
        bp = math.sqrt(80.0 / (1 + alpha)) + 3.0
        val, _ = integrate.dblquad(
            lambda p, x: husimi_closed(s, x, p), -bx, bx, -bp, bp,
            epsabs=1e-9, epsrel=1e-9,
        )
        assert val == pytest.approx(1.0, abs=1e-7)


def test_husimi_negative_alpha_rotation():
    pts = np.linspace(-4, 4, 9)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    for m in (0, 1, 2):
        s = conditional_coefficients(-0.6, m)
        np.testing.assert_allclose(
            husimi_closed(s, X, P),
            husimi_oracle(s.coefficients, X, P),
            atol=1e-10,
        )


def _smoothed_wigner(fock, x0, p0, nodes=80):
    """Gaussian smoothing of the Fock-basis Wigner function, evaluated by
    Gauss-Hermite quadrature after completing the square (exact for a finite
    Fock expansion up to the rule's polynomial degree)."""
    t, w = np.polynomial.hermite.hermgauss(nodes)
    xs = x0 / 2.0 + t / math.sqrt(2.0)
    ps = p0 / 2.0 + t / math.sqrt(2.0)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    g = math.pi * np.exp(X * X + P * P) * wigner_oracle(fock, X, P)
    pref = math.exp(-(x0 * x0 + p0 * p0) / 2.0) / (2.0 * math.pi**2)
    return pref * float(np.einsum("i,j,ij->", w, w, g))


def test_husimi_is_smoothed_wigner():
    for m in (1, 2):
        s = _state(0.3, m)
        for x0, p0 in [(0.0, 0.0), (1.0, 0.5), (-0.7, 1.1)]:
            assert husimi_closed(s, x0, p0) == pytest.approx(
                _smoothed_wigner(s.coefficients, x0, p0), abs=1e-4
            )


# ---------------------------------------------------------------------------
# Component-state phase-space functions
# ---------------------------------------------------------------------------

def test_component_husimi_mirror_symmetry():
    plus = component_state(+1, 0.6, 3)
    minus = component_state(-1, 0.6, 3)
    pts = np.linspace(-4, 4, 9)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    np.testing.assert_allclose(
        component_husimi(minus, X, P),
        component_husimi(plus, -X, -P),
        rtol=1e-13, atol=1e-300,
    )


def test_component_husimi_matches_overlap_oracle():
    pts = np.linspace(-5, 5, 9)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    for m in (0, 1, 3):
        comp = component_state(+1, 0.6, m)
        np.testing.assert_allclose(
            component_husimi(comp, X, P),
            husimi_oracle(comp.coefficients, X, P),
            atol=1e-9,
        )


def test_component_husimi_normalized():
    comp = component_state(+1, 0.6, 1)
    val, _ = integrate.dblquad(
        lambda p, x: component_husimi(comp, x, p), -14, 14, -8, 8,
        epsabs=1e-9, epsrel=1e-9,
    )
    assert val == pytest.approx(1.0, abs=1e-7)


def test_component_husimi_coherent_peak_location():
    # for large m the (+) branch approaches a coherent state at
    # (x, p) = (sqrt(2 alpha m / (1 - alpha)), 0) -- the saddle point of the
    # exact closed form; the peak offset decays like 1/m
    comp = component_state(+1, 0.6, 12)
    center = math.sqrt(2.0 * 0.6 * 12.0 / (1.0 - 0.6))
    xs = np.linspace(0.0, 6.0, 61)
    ps = np.linspace(-2.0, 2.0, 41)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    q = component_husimi(comp, X, P)
    i, j = np.unravel_index(np.argmax(q), q.shape)
    res = optimize.minimize(
        lambda v: -component_husimi(comp, v[0], v[1]),
        x0=np.array([X[i, j], P[i, j]]),
        method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-14},
    )
    x_peak, p_peak = res.x
    assert abs(x_peak - center) <= 0.05 * center
    assert abs(p_peak) <= 0.05 * center


def test_component_wigner_tiny_negativity():
    pts = np.linspace(-5, 5, 61)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    for m in (1, 3):
        comp = component_state(+1, 0.6, m)
        w = wigner_of_component(comp, X, P)
        assert np.min(w) < 0.0
        assert np.min(w) > -1e-3


def test_component_wigner_mirror_symmetry():
    plus = component_state(+1, 0.6, 2)
    minus = component_state(-1, 0.6, 2)
    pts = np.linspace(-3, 3, 7)
    X, P = np.meshgrid(pts, pts, indexing="ij")
    np.testing.assert_allclose(
        wigner_of_component(minus, X, P),
        wigner_of_component(plus, -X, -P),
        atol=1e-13,
    )


def test_component_wigner_normalized_m0():
    # the Fock-oracle Wigner function is exp(-x^2-p^2) times a polynomial of
    # degree 2 n_max per axis, so Gauss-Hermite quadrature with n_max + 1
    # nodes integrates it exactly
    comp = component_state(+1, 0.6, 0)
    nodes = comp.coefficients.n_max + 1
    t, w = np.polynomial.hermite.hermgauss(nodes)
    X, P = np.meshgrid(t, t, indexing="ij")
    vals = wigner_of_component(comp, X, P) * np.exp(X * X + P * P)
    total = float(np.einsum("i,j,ij->", w, w, vals))
    assert total == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------------------
# Consistency between the two normalization sums
# ---------------------------------------------------------------------------

def test_wigner_norm_constant_consistent_with_series_norm():
    from beamcat.phasespace import _n1m

    for alpha in (0.2, 0.5, 0.8):
        for m in range(8):
            lhs = normalization_closed(alpha, m)
            rhs = (
                (1.0 - alpha * alpha) ** (-(m + 0.5))
                * (alpha / 2.0) ** m
                * math.factorial(m) ** 2
                * _n1m(alpha, m)
            )
            assert lhs == pytest.approx(rhs, rel=1e-12)
