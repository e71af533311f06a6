"""Phase-space and counting observables of the conditional states.

Conventions, fixed once for every function here and locked against each other
by the marginal tests:

* quadrature operator x(phi) = 2^{-1/2} (e^{-i phi} a + e^{i phi} a^dagger),
  vacuum variance 1/2;
* Wigner function normalized to 1 over dx dp, vacuum (1/pi) e^{-x^2-p^2};
* Husimi function Q = |<beta|psi>|^2 / (2 pi) with beta = (x + i p)/sqrt(2),
  i.e. the Wigner function smoothed by the vacuum Gaussian.

Each distribution is implemented twice: a closed form in the heralding count m
(the production path, supported for m <= RANGE_CAP_M) and a Fock-basis oracle
that consumes raw coefficient vectors at any truncation (the reference path).
States with alpha < 0 are evaluated through the positive-alpha closed forms at
coordinates rotated a quarter turn; EvalContext carries that reduction.

A note on orientation: for alpha > 0 the *wide* (anti-squeezed) quadrature is
phi = 0 -- that is where the two component lobes separate -- while phi = pi/2
is the squeezed direction where the interference fringes live.  The quadrature
variance denominator used below, Delta(phi) = 1 + alpha^2 + 2 alpha cos(2 phi),
equals (1+alpha)^2 at phi = 0 and (1-alpha)^2 at phi = pi/2, which is the only
orientation consistent with the Wigner marginals; the closed Wigner form fixes
the x-axis variance to 1/(2 lambda) with lambda = (1-alpha)/(1+alpha) < 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, RangeCapError
from .specfun import _hermite_array, log_factorial_table, parabolic_cylinder_neg_array
from .states import ComponentState, ConditionalState, FockVector, _log_normalization

__all__ = [
    "RANGE_CAP_M",
    "PhaseSpaceGrid",
    "EvalContext",
    "photon_number_distribution",
    "mean_photon_number",
    "mandel_q",
    "quadrature_distribution",
    "quadrature_oracle",
    "wigner_closed",
    "wigner_oracle",
    "husimi_closed",
    "husimi_oracle",
    "component_husimi",
    "wigner_of_component",
    "quadrature_norm",
    "wigner_norm",
    "husimi_norm",
]

# The closed forms below run the Hermite and parabolic-cylinder recurrences
# without rescaling; they are validated (and safely overflow-free) up to this
# heralding count.  Larger m must go through the Fock-basis oracles.
RANGE_CAP_M = 20


def _check_m_cap(m: int) -> None:
    if m > RANGE_CAP_M:
        raise RangeCapError(
            f"closed-form evaluators support m <= {RANGE_CAP_M}; got m = {m}"
        )


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Rectangular evaluation window for Wigner/Husimi maps."""

    x_min: float = -5.0
    x_max: float = 5.0
    p_min: float = -5.0
    p_max: float = 5.0
    nx: int = 161
    np: int = 161

    def __post_init__(self):
        if self.nx < 2 or self.np < 2:
            raise DomainError("grid needs at least 2 points per axis")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise DomainError("grid bounds must satisfy max > min")

    def x_values(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def p_values(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, P) arrays of shape (nx, np), x varying along axis 0."""
        return np.meshgrid(self.x_values(), self.p_values(), indexing="ij")


@dataclass(frozen=True)
class EvalContext:
    """Cached per-state constants for the closed-form evaluators.

    `alpha` is the signed value carried by the state; `alpha_abs` is what
    enters every closed form; `rotation` is the phase-space angle that folds
    the sign away (pi/2 for alpha < 0, so Wigner/Husimi evaluate at
    (x', p') = (p, -x) and quadrature angles shift by phi -> phi - pi/2);
    `lam` = (1 - alpha_abs)/(1 + alpha_abs) is the squeezed-Gaussian shape
    parameter (x-axis Wigner variance 1/(2 lam)).
    """

    alpha: float
    alpha_abs: float
    lam: float
    rotation: float

    @classmethod
    def from_alpha(cls, alpha: float) -> "EvalContext":
        if not abs(alpha) < 1.0:
            raise DomainError("|alpha| must be < 1")
        a = abs(alpha)
        return cls(
            alpha=alpha,
            alpha_abs=a,
            lam=(1.0 - a) / (1.0 + a),
            rotation=0.0 if alpha >= 0.0 else math.pi / 2.0,
        )

    def delta_of_phi(self, phi):
        """Quadrature variance denominator Delta(phi) = 1 + a^2 + 2a cos 2phi:
        (1+a)^2 along the anti-squeezed axis phi = 0, (1-a)^2 at phi = pi/2."""
        a = self.alpha_abs
        return 1.0 + a * a + 2.0 * a * np.cos(2.0 * np.asarray(phi, dtype=float))

    def rotate(self, x, p):
        """Map lab-frame coordinates into the positive-alpha frame."""
        if self.rotation == 0.0:
            return x, p
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return x * c + p * s, -x * s + p * c


def _broadcast_xy(x, p) -> tuple[np.ndarray, np.ndarray, bool]:
    xa = np.asarray(x, dtype=float)
    pa = np.asarray(p, dtype=float)
    scalar = xa.ndim == 0 and pa.ndim == 0
    xb, pb = np.broadcast_arrays(xa, pa)
    return xb, pb, scalar


def _maybe_scalar(values: np.ndarray, scalar: bool):
    return float(values.reshape(())) if scalar else values


# ---------------------------------------------------------------------------
# Photon-number statistics
# ---------------------------------------------------------------------------

def photon_number_distribution(state: ConditionalState) -> np.ndarray:
    """P(n|m) for n = 0..n_max: squared magnitudes of the normalized
    coefficients, exactly zero at parity-forbidden n."""
    return np.abs(state.coefficients.amplitudes) ** 2


def mean_photon_number(state: ConditionalState) -> float:
    """Mean photon number of |Psi_m(alpha)> in closed form:

        <n> = alpha^2/(1-alpha^2) + m (1+alpha^2)/(1-alpha^2)
              - 2 * (sum_k k a_k) / (sum_k a_k),
        a_k = (2 alpha)^{-2k} / [(m-2k)! (k!)^2],

    even in alpha, so the signed value from the state enters as |alpha|."""
    a = abs(state.alpha)
    m = state.m
    if a < 1e-300:
        return 0.0
    lf = log_factorial_table(m).values
    log_terms = [
        -2.0 * k * math.log(2.0 * a) - lf[m - 2 * k] - 2.0 * lf[k]
        for k in range(m // 2 + 1)
    ]
    top = max(log_terms)
    weights = [math.exp(t - top) for t in log_terms]
    ratio = sum(k * w for k, w in enumerate(weights)) / sum(weights)
    one = 1.0 - a * a
    return a * a / one + m * (1.0 + a * a) / one - 2.0 * ratio


def mandel_q(state: ConditionalState) -> float:
    """Mandel Q = (<n^2> - <n>^2)/<n> - 1 from direct moments of P(n|m).

    (The equivalent derivative form (alpha/<n>) d<n>/dalpha - 1 is validated
    against this by finite differences in the test suite.)
    """
    probs = photon_number_distribution(state)
    n = np.arange(state.n_max + 1, dtype=float)
    mean = float(n @ probs)
    if mean <= 0.0:
        raise DomainError("Mandel Q is undefined for the vacuum state")
    second = float((n * n) @ probs)
    return (second - mean * mean) / mean - 1.0


# ---------------------------------------------------------------------------
# Quadrature distributions
# ---------------------------------------------------------------------------

def quadrature_distribution(state: ConditionalState, phi: float, x):
    """Homodyne distribution p(x, phi | m) in closed form:

        p = |alpha|^m / (N_m sqrt(pi Delta^{m+1}) 2^m)
            * exp(-(1-alpha^2) x^2 / Delta)
            * |H_m(w x)|^2,   w^2 = -(alpha e^{2i phi} + alpha^2)/Delta,

    with Delta = Delta(phi) from EvalContext.  The sqrt branch of w is
    irrelevant (|H_m(-z)| = |H_m(z)|).  Vectorized over x."""
    m = state.m
    _check_m_cap(m)
    ctx = EvalContext.from_alpha(state.alpha)
    a = ctx.alpha_abs
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    if a < 1e-300:  # vacuum (m = 0 is guaranteed: m > 0 is unpreparable)
        vals = np.exp(-x_arr * x_arr) / math.sqrt(math.pi)
        return _maybe_scalar(vals, scalar)
    phi_eff = phi - ctx.rotation
    delta = float(ctx.delta_of_phi(phi_eff))
    w = cmath.sqrt(-(a * cmath.exp(2j * phi_eff) + a * a) / delta)
    h_m = _hermite_array(w * x_arr.astype(complex), m)[m]
    log_pref = (
        m * math.log(a)
        - _log_normalization(a, m)
        - 0.5 * (math.log(math.pi) + (m + 1) * math.log(delta))
        - m * math.log(2.0)
    )
    vals = np.exp(log_pref - (1.0 - a * a) * x_arr * x_arr / delta) * np.abs(h_m) ** 2
    return _maybe_scalar(vals, scalar)


def quadrature_oracle(state: FockVector, phi: float, x):
    """|<x, phi|psi>|^2 from the Fock expansion: psi(x, phi) =
    sum_n c_n e^{-i n phi} h_n(x) with normalized Hermite functions h_n built
    by the stable two-term recurrence.  Reference route for any coefficient
    vector."""
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    c = state.amplitudes
    h_prev = math.pi ** -0.25 * np.exp(-x_arr * x_arr / 2.0)
    psi = c[0] * h_prev.astype(complex)
    if state.n_max >= 1:
        h_curr = x_arr * math.sqrt(2.0) * h_prev
        psi += c[1] * cmath.exp(-1j * phi) * h_curr
        for n in range(1, state.n_max):
            h_prev, h_curr = h_curr, (
                x_arr * math.sqrt(2.0 / (n + 1)) * h_curr
                - math.sqrt(n / (n + 1.0)) * h_prev
            )
            coeff = c[n + 1]
            if coeff != 0:
                psi += coeff * cmath.exp(-1j * (n + 1) * phi) * h_curr
    vals = np.abs(psi) ** 2
    return _maybe_scalar(vals, scalar)


# ---------------------------------------------------------------------------
# Wigner functions
# ---------------------------------------------------------------------------

def _n1m(alpha_abs: float, m: int) -> float:
    """Wigner normalization sum N1_m = sum_{k<=m/2} (2a)^{m-2k}/[(m-2k)!(k!)^2]."""
    return sum(
        (2.0 * alpha_abs) ** (m - 2 * k)
        / (math.factorial(m - 2 * k) * math.factorial(k) ** 2)
        for k in range(m // 2 + 1)
    )


def wigner_closed(state: ConditionalState, x, p):
    """Wigner function of |Psi_m(alpha)> in closed form:

        W(x,p|m) = (pi N1_m)^{-1} exp(-lam x^2 - p^2/lam)
                   * sum_{k=0}^m (-2a)^k / [k! ((m-k)!)^2]
                     * |H_{m-k}( i sqrt(a lam) (x + i p/lam) )|^2,

    lam = (1-a)/(1+a).  m = 0 reduces to the squeezed Gaussian
    (1/pi) exp(-lam x^2 - p^2/lam).  Vectorized over broadcast (x, p)."""
    m = state.m
    _check_m_cap(m)
    ctx = EvalContext.from_alpha(state.alpha)
    a, lam = ctx.alpha_abs, ctx.lam
    xb, pb, scalar = _broadcast_xy(x, p)
    xr, pr = ctx.rotate(xb, pb)
    envelope = np.exp(-lam * xr * xr - pr * pr / lam)
    if m == 0:
        return _maybe_scalar(envelope / math.pi, scalar)
    z = 1j * math.sqrt(a * lam) * (xr + 1j * pr / lam)
    h = _hermite_array(z, m)
    ksum = np.zeros(xr.shape, dtype=float)
    for k in range(m + 1):
        coef = (-2.0 * a) ** k / (math.factorial(k) * math.factorial(m - k) ** 2)
        ksum += coef * np.abs(h[m - k]) ** 2
    vals = envelope * ksum / (math.pi * _n1m(a, m))
    return _maybe_scalar(vals, scalar)


def wigner_oracle(state: FockVector, x, p):
    """Fock-basis Wigner function of an arbitrary coefficient vector:

        W = sum_{n,n'} c_n c*_{n'} W_{n,n'},
        W_{n,n+d} = (1/pi) (-1)^n sqrt(n!/(n+d)!) (sqrt(2)(x+ip))^d
                    * L_n^d(2(x^2+p^2)) e^{-(x^2+p^2)},  d >= 0,

    and W_{n+d,n} its conjugate.  The Laguerre ladder runs upward in n on the
    *scaled* quantity T_n = sqrt(n!/(n+d)!) (sqrt(2) r)^d e^{-r^2} L_n^d,
    which is bounded (it is a displaced-parity matrix element), so the sweep
    neither overflows nor loses the small far-tail values.  Complexity is
    O(n_max^2) per point, vectorized over the grid."""
    c = state.amplitudes
    n_top = int(np.max(np.nonzero(np.abs(c) > 0.0)[0])) if np.any(c != 0) else 0
    xb, pb, scalar = _broadcast_xy(x, p)
    shape = xb.shape
    xf = xb.ravel()
    pf = pb.ravel()
    r2 = xf * xf + pf * pf
    big_x = 2.0 * r2
    theta = np.arctan2(pf, xf)
    with np.errstate(divide="ignore"):
        ln_r = 0.5 * np.log(2.0 * r2)  # ln(sqrt(2) r); -inf at the origin
    lf = log_factorial_table(n_top).values
    signs = (-1.0) ** np.arange(n_top + 1)
    total = np.zeros(xf.shape, dtype=float)
    for d in range(n_top + 1):
        weights = signs[: n_top + 1 - d] * c[: n_top + 1 - d] * np.conj(c[d:n_top + 1])
        if not np.any(weights != 0):
            continue
        if d == 0:
            t_prev = np.exp(-r2)
        else:
            t_prev = np.exp(d * ln_r - 0.5 * lf[d] - r2)
        acc = weights[0] * t_prev if weights[0] != 0 else np.zeros(xf.shape, complex)
        if n_top - d >= 1:
            t_curr = math.sqrt(1.0 / (1.0 + d)) * ((1.0 + d) - big_x) * t_prev
            if weights[1] != 0:
                acc = acc + weights[1] * t_curr
            for n in range(2, n_top - d + 1):
                f1 = math.sqrt(n / (n + d))
                f2 = math.sqrt(n * (n - 1.0) / ((n + d) * (n + d - 1.0)))
                t_prev, t_curr = t_curr, (
                    (2.0 * n - 1.0 + d - big_x) * f1 * t_curr
                    - (n - 1.0 + d) * f2 * t_prev
                ) / n
                if weights[n] != 0:
                    acc = acc + weights[n] * t_curr
        if d == 0:
            total += acc.real
        else:
            total += 2.0 * (np.exp(1j * d * theta) * acc).real
    vals = (total / math.pi).reshape(shape)
    return _maybe_scalar(vals, scalar)


def wigner_of_component(comp: ComponentState, x, p):
    """Wigner function of one superposition branch, via the Fock-basis oracle
    (no closed form is used here; the branches are only approximately
    Gaussian and their tiny negativity is the object of interest)."""
    return wigner_oracle(comp.coefficients, x, p)


# ---------------------------------------------------------------------------
# Husimi functions
# ---------------------------------------------------------------------------

def husimi_closed(state: ConditionalState, x, p):
    """Husimi function of |Psi_m(alpha)> in closed form:

        Q(x,p|m) = |alpha|^m / (pi N_m 2^{m+1})
                   * |H_m( (i/2) sqrt(a) (x + i p) )|^2
                   * exp{-[(1-a) x^2 + (1+a) p^2]/2},

    nonnegative everywhere, and equal to the Gaussian-smoothed Wigner
    function.  Vectorized over broadcast (x, p)."""
    m = state.m
    _check_m_cap(m)
    ctx = EvalContext.from_alpha(state.alpha)
    a = ctx.alpha_abs
    xb, pb, scalar = _broadcast_xy(x, p)
    xr, pr = ctx.rotate(xb, pb)
    if a < 1e-300:  # vacuum
        vals = np.exp(-(xr * xr + pr * pr) / 2.0) / (2.0 * math.pi)
        return _maybe_scalar(vals, scalar)
    z = 0.5j * math.sqrt(a) * (xr + 1j * pr)
    h_m = _hermite_array(z, m)[m]
    log_pref = (
        m * math.log(a)
        - _log_normalization(a, m)
        - (m + 1) * math.log(2.0)
        - math.log(math.pi)
    )
    vals = (
        np.exp(log_pref - 0.5 * ((1.0 - a) * xr * xr + (1.0 + a) * pr * pr))
        * np.abs(h_m) ** 2
    )
    return _maybe_scalar(vals, scalar)


def husimi_oracle(state: FockVector, x, p):
    """Q = |<beta|psi>|^2/(2 pi), beta = (x+ip)/sqrt(2), from the Fock series
    <beta|psi> = e^{-|beta|^2/2} sum_n c_n beta*^n / sqrt(n!), accumulated on
    the bounded scaled terms t_n = e^{-|beta|^2/2} beta*^n/sqrt(n!)."""
    xb, pb, scalar = _broadcast_xy(x, p)
    beta_conj = (xb - 1j * pb) / math.sqrt(2.0)
    c = state.amplitudes
    t = np.exp(-(xb * xb + pb * pb) / 4.0).astype(complex)
    acc = c[0] * t
    for n in range(1, state.n_max + 1):
        t = t * beta_conj / math.sqrt(n)
        coeff = c[n]
        if coeff != 0:
            acc = acc + coeff * t
    vals = np.abs(acc) ** 2 / (2.0 * math.pi)
    return _maybe_scalar(vals, scalar)


def component_husimi(comp: ComponentState, x, p):
    """Husimi function of one superposition branch in closed form:

        Q^(s) = alpha^m (m!)^2 / (pi^2 N_m^(s))
                * e^{-|beta|^2} e^{alpha (beta^2 + beta*^2)/4}
                * |D_{-m-1}(-s sqrt(alpha) beta)|^2,  beta = (x+ip)/sqrt(2),

    with the parabolic cylinder function D evaluated by the hybrid
    forward/Miller recurrence.  The argument sign is pinned by the coherent
    overlap series (at m = 0 the series sums to erfc(-s sqrt(alpha/2) beta),
    and D_{-1}(z) carries erfc(+z/sqrt(2))); the constant is fixed by unit
    normalization.  For m >> 1 the branch approaches a coherent state whose
    center follows from the saddle point of the exact form:
    (x, p) = (s sqrt(2 alpha m / (1 - alpha)), 0).  (Keeping only the term
    linear in the argument of D in its large-m asymptotics would put the
    center at s sqrt(2 alpha m); the quadratic terms remain O(1) at the
    peak and shift it by the constant factor 1/sqrt(1 - alpha).)"""
    m = comp.m
    _check_m_cap(m)
    a = comp.alpha
    xb, pb, scalar = _broadcast_xy(x, p)
    beta = (xb + 1j * pb) / math.sqrt(2.0)
    d_vals = parabolic_cylinder_neg_array(m, -comp.sign * math.sqrt(a) * beta)
    # e^{-|beta|^2} e^{a(beta^2+beta*^2)/4} = exp(-(x^2+p^2)/2 + a(x^2-p^2)/4)
    gauss = np.exp(-(xb * xb + pb * pb) / 2.0 + a * (xb * xb - pb * pb) / 4.0)
    pref = a**m * math.factorial(m) ** 2 / (math.pi**2 * comp.norm)
    vals = pref * gauss * np.abs(d_vals) ** 2
    return _maybe_scalar(vals, scalar)


# ---------------------------------------------------------------------------
# Gauss-Hermite normalization checks (production-side self-checks)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _gh_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.hermite.hermgauss(n)


def quadrature_norm(state: ConditionalState, phi: float, nodes: int = 64) -> float:
    """integral of p(x, phi) dx by Gauss-Hermite quadrature.

    After pulling out the Gaussian factor the integrand is a polynomial of
    degree 2m, so the rule is exact (up to rounding) for nodes > m."""
    ctx = EvalContext.from_alpha(state.alpha)
    a = ctx.alpha_abs
    if a < 1e-300:
        return 1.0
    t, w = _gh_nodes(nodes)
    sigma = math.sqrt(float(ctx.delta_of_phi(phi - ctx.rotation)) / (1.0 - a * a))
    vals = quadrature_distribution(state, phi, sigma * t)
    return float(sigma * np.sum(w * vals * np.exp(t * t)))


def wigner_norm(state: ConditionalState, nodes: int = 64) -> float:
    """double integral of W dx dp by a tensor Gauss-Hermite rule (exact for
    the closed form: substituting x = t/sqrt(lam), p = u sqrt(lam) leaves
    weight e^{-t^2-u^2} times a polynomial)."""
    ctx = EvalContext.from_alpha(state.alpha)
    lam = ctx.lam
    t, w = _gh_nodes(nodes)
    xg = t[:, None] / math.sqrt(lam)
    pg = t[None, :] * math.sqrt(lam)
    vals = wigner_closed(state, xg, pg)
    expw = np.exp(t * t) * w
    return float(np.einsum("i,j,ij->", expw, expw, vals))


def husimi_norm(state: ConditionalState, nodes: int = 64) -> float:
    """double integral of Q dx dp by a tensor Gauss-Hermite rule (exact for
    the closed form after x = t sqrt(2/(1-a)), p = u sqrt(2/(1+a)))."""
    ctx = EvalContext.from_alpha(state.alpha)
    a = ctx.alpha_abs
    t, w = _gh_nodes(nodes)
    sx = math.sqrt(2.0 / (1.0 - a))
    sp = math.sqrt(2.0 / (1.0 + a))
    vals = husimi_closed(state, sx * t[:, None], sp * t[None, :])
    expw = np.exp(t * t) * w
    return float(sx * sp * np.einsum("i,j,ij->", expw, expw, vals))
