"""Special-function kernel for the conditional-cat-state calculations.

Scalar-oriented, pure functions: Hermite polynomial sequences (real or complex
argument), log-factorials and log-Gamma at half-integer arguments, the
complementary error function, the Gauss hypergeometric series 2F1, parabolic
cylinder functions D_{-m-1}, and the Hermite summation identities (Mehler's
formula and its index-shifted relatives) that the closed-form norms and
distributions are built on.

The kernel deliberately returns raw values: Hermite sequences are never
rescaled, and overflow to inf for extreme order/argument combinations is
permitted.  Callers that need large-order stability (the coefficient builders
do, around n ~ 150) work in log space on top of the log-factorial table instead
of asking this module for huge polynomial values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .errors import DomainError, NumericalError

__all__ = [
    "HermiteSequence",
    "LogFactorialTable",
    "hermite_sequence",
    "log_factorial_table",
    "log_factorial",
    "log_gamma_half",
    "erfc",
    "erfc_complex",
    "gauss_2f1",
    "parabolic_cylinder_neg",
    "parabolic_cylinder_neg_array",
    "mehler_sum",
    "shifted_mehler_sum",
    "hermite_generating_sum",
]


@dataclass(frozen=True)
class HermiteSequence:
    """Hermite polynomial values H_0(z) .. H_max_order(z) at a fixed argument."""

    argument: complex
    max_order: int
    values: np.ndarray  # complex, shape (max_order + 1,)


@dataclass(frozen=True)
class LogFactorialTable:
    """values[n] = ln(n!) for n = 0 .. max_n."""

    max_n: int
    values: np.ndarray


def hermite_sequence(z: complex, n_max: int) -> HermiteSequence:
    """All Hermite polynomials H_0..H_n_max at z by the upward three-term
    recurrence H_{n+1} = 2 z H_n - 2 n H_{n-1}.

    No rescaling is applied; overflow for large (|z|, n_max) is the caller's
    problem by design.
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    zc = complex(z)
    values = np.empty(n_max + 1, dtype=complex)
    values[0] = 1.0
    if n_max >= 1:
        values[1] = 2.0 * zc
    for n in range(1, n_max):
        values[n + 1] = 2.0 * zc * values[n] - 2.0 * n * values[n - 1]
    return HermiteSequence(argument=zc, max_order=n_max, values=values)


def _hermite_array(z: np.ndarray, n_max: int) -> np.ndarray:
    """Vectorized variant of :func:`hermite_sequence` for grid evaluation.

    Returns an array of shape (n_max + 1, *z.shape) with H_n stacked on the
    leading axis.  Same no-rescaling policy as the scalar version.
    """
    zc = np.asarray(z, dtype=complex)
    out = np.empty((n_max + 1,) + zc.shape, dtype=complex)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 2.0 * zc
    for n in range(1, n_max):
        out[n + 1] = 2.0 * zc * out[n] - 2.0 * n * out[n - 1]
    return out


def log_factorial_table(max_n: int) -> LogFactorialTable:
    if max_n < 0:
        raise DomainError("max_n must be >= 0")
    values = _sp.gammaln(np.arange(1, max_n + 2, dtype=float))
    return LogFactorialTable(max_n=max_n, values=values)


def log_factorial(n: int) -> float:
    """ln(n!) for a scalar n >= 0."""
    if n < 0:
        raise DomainError("factorial argument must be >= 0")
    return math.lgamma(n + 1.0)


def log_gamma_half(two_x: int) -> float:
    """ln Gamma(x) for half-integer x, passed as the doubled argument two_x = 2x.

    Consistent with ln-factorials at integer x and with the duplication
    identity Gamma(2n) = 4^n / (2 sqrt(pi)) * Gamma(n) * Gamma(n + 1/2) at
    half-integer x.
    """
    if two_x < 1:
        raise DomainError("log_gamma_half requires two_x >= 1")
    return math.lgamma(two_x / 2.0)


def erfc(x: float) -> float:
    """Complementary error function on the real line."""
    return float(_sp.erfc(x))


def erfc_complex(z: complex) -> complex:
    """erfc for complex argument via the Faddeeva function w:
    erfc(z) = exp(-z^2) w(iz) for Re z >= 0, reflection formula otherwise."""
    zc = complex(z)
    if zc.real >= 0.0:
        return cmath.exp(-zc * zc) * complex(_sp.wofz(1j * zc))
    return 2.0 - erfc_complex(-zc)


_2F1_MAX_TERMS = 100_000


def _2f1_direct(a: float, b: float, c: float, z: float) -> float:
    """Direct Gauss series with a relative tail-ratio stopping rule."""
    term = 1.0
    total = 1.0
    for k in range(_2F1_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if abs(term) < 1e-16 * abs(total):
            return total
    raise NumericalError(
        f"2F1({a},{b};{c};{z}) series did not converge within {_2F1_MAX_TERMS} terms"
    )


def _lgamma_signed(x: float) -> tuple[float, float]:
    """(sign, ln|Gamma(x)|), handling negative non-integer arguments."""
    return float(_sp.gammasgn(x)), float(_sp.gammaln(x))


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function F(a,b;c;z) for real z in [0,1).

    For z > 1/2 the z -> 1-z linear transformation is applied first so the
    series argument stays small; the only degenerate case (integer c-a-b,
    never hit by the component-norm instance where c-a-b = 1/2) falls back to
    the direct series, which still converges for z < 1 when c-a-b > 0.

    The two transformed pieces carry opposite signs and can cancel
    catastrophically when a, b are large (for c - a - b = 1/2 they grow like
    exp of a multiple of a while the function itself stays O(10)), so when the
    recombination loses more than a digit the direct series -- all positive
    terms for positive parameters, hence perfectly conditioned, just slower --
    is used instead.
    """
    if c <= 0.0 and float(c).is_integer():
        raise DomainError("2F1 is undefined for nonpositive integer c")
    if c <= 0.0:
        raise DomainError("gauss_2f1 requires c > 0")
    if not (0.0 <= z < 1.0):
        raise DomainError("gauss_2f1 requires 0 <= z < 1")
    if b < a:
        a, b = b, a  # canonical order makes the a<->b symmetry bit-exact
    if z <= 0.5:
        return _2f1_direct(a, b, c, z)
    s = c - a - b
    if abs(s - round(s)) < 1e-9:
        return _2f1_direct(a, b, c, z)
    sign_c, lg_c = _lgamma_signed(c)
    sign_s, lg_s = _lgamma_signed(s)
    sign_ca, lg_ca = _lgamma_signed(c - a)
    sign_cb, lg_cb = _lgamma_signed(c - b)
    sign_ms, lg_ms = _lgamma_signed(-s)
    sign_a, lg_a = _lgamma_signed(a)
    sign_b, lg_b = _lgamma_signed(b)
    t1 = 0.0
    if sign_ca != 0.0 and sign_cb != 0.0 and math.isfinite(lg_ca) and math.isfinite(lg_cb):
        t1 = (
            sign_c * sign_s * sign_ca * sign_cb
            * math.exp(lg_c + lg_s - lg_ca - lg_cb)
            * _2f1_direct(a, b, 1.0 - s, 1.0 - z)
        )
    t2 = 0.0
    if sign_a != 0.0 and sign_b != 0.0 and math.isfinite(lg_a) and math.isfinite(lg_b):
        t2 = (
            sign_c * sign_ms * sign_a * sign_b
            * math.exp(lg_c + lg_ms - lg_a - lg_b)
            * (1.0 - z) ** s
            * _2f1_direct(c - a, c - b, 1.0 + s, 1.0 - z)
        )
    total = t1 + t2
    if abs(total) < 0.1 * (abs(t1) + abs(t2)):
        return _2f1_direct(a, b, c, z)
    return total


def _erfc_complex_array(z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`erfc_complex` (Faddeeva route plus reflection)."""
    zc = np.asarray(z, dtype=complex)
    pos = zc.real >= 0.0
    zp = np.where(pos, zc, -zc)
    vals = np.exp(-zp * zp) * _sp.wofz(1j * zp)
    return np.where(pos, vals, 2.0 - vals)


def _d_minus_one(z: complex) -> complex:
    """D_{-1}(z) = sqrt(pi/2) exp(z^2/4) erfc(z/sqrt(2))."""
    return math.sqrt(math.pi / 2.0) * cmath.exp(z * z / 4.0) * erfc_complex(z / math.sqrt(2.0))


def _d_minus_one_array(z: np.ndarray) -> np.ndarray:
    zc = np.asarray(z, dtype=complex)
    return math.sqrt(math.pi / 2.0) * np.exp(zc * zc / 4.0) * _erfc_complex_array(
        zc / math.sqrt(2.0)
    )


def parabolic_cylinder_neg(m: int, z: complex) -> complex:
    """Parabolic cylinder function D_{-m-1}(z) for m >= 0, complex z.

    D_nu satisfies D_{nu+1} - z D_nu + nu D_{nu-1} = 0; writing s_m = D_{-m-1}
    this reads s_{m+1} = (s_{m-1} - z s_m)/(m+1) with seeds s_{-1} = D_0 =
    exp(-z^2/4) and s_0 = D_{-1}.  Along increasing m the two solutions of the
    recurrence separate like exp(±2 Re(z) sqrt(m)), and D_{-m-1} is the minimal
    one for Re z > 0, so the upward sweep is only used while Re(z) sqrt(m) is
    small; otherwise a backward Miller recursion (seeded well above the target
    order, normalized at D_{-1}) is used.  Both directions were validated
    against quadrature of the integral representation
    D_{-m-1}(z) = exp(-z^2/4)/m! * Int_0^inf t^m exp(-t^2/2 - z t) dt.
    """
    if m < 0:
        raise DomainError("parabolic_cylinder_neg requires m >= 0")
    zc = complex(z)
    if zc.real * math.sqrt(max(m, 1)) <= 3.0:
        return _pcf_forward(m, zc)
    return _pcf_miller(m, zc)


def _pcf_forward(m: int, z: complex) -> complex:
    d_prev = cmath.exp(-z * z / 4.0)  # D_0
    d_curr = _d_minus_one(z)          # D_{-1}
    if m == 0:
        return d_curr
    for j in range(m):
        d_prev, d_curr = d_curr, (d_prev - z * d_curr) / (j + 1.0)
    return d_curr


def parabolic_cylinder_neg_array(m: int, z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`parabolic_cylinder_neg` over an array of arguments.

    Branch selection matches the scalar route lane by lane; all backward-Miller
    lanes share one start order (the largest any lane needs -- overshooting a
    lane's minimum start only sharpens its Miller normalization).
    """
    if m < 0:
        raise DomainError("parabolic_cylinder_neg requires m >= 0")
    zc = np.asarray(z, dtype=complex)
    flat = zc.ravel()
    out = np.empty(flat.shape, dtype=complex)
    fwd = flat.real * math.sqrt(max(m, 1)) <= 3.0
    if np.any(fwd):
        zf = flat[fwd]
        d_prev = np.exp(-zf * zf / 4.0)
        d_curr = _d_minus_one_array(zf)
        for j in range(m):
            d_prev, d_curr = d_curr, (d_prev - zf * d_curr) / (j + 1.0)
        out[fwd] = d_curr
    back = ~fwd
    if np.any(back):
        zb = flat[back]
        re_min = float(zb.real.min())
        start = int(math.ceil((math.sqrt(m) + 21.0 / re_min) ** 2)) + 2
        s_hi = np.zeros(zb.shape, dtype=complex)
        s_lo = np.full(zb.shape, 1e-280, dtype=complex)
        target = None
        for j in range(start, 0, -1):
            s_prev = (j + 1.0) * s_hi + zb * s_lo
            s_hi, s_lo = s_lo, s_prev
            if j - 1 == m:
                target = s_prev.copy()
            big = (np.abs(s_lo.real) > 1e250) | (np.abs(s_lo.imag) > 1e250)
            if np.any(big):
                s_hi[big] *= 1e-250
                s_lo[big] *= 1e-250
                if target is not None:
                    target[big] *= 1e-250
        out[back] = target * (_d_minus_one_array(zb) / s_lo)
    return out.reshape(zc.shape)


def _pcf_miller(m: int, z: complex) -> complex:
    # Start far enough above m that the contamination by the dominant solution
    # has decayed below 1e-18 by the time the sweep reaches the target order:
    # the solutions separate like exp(2 Re(z) (sqrt(start) - sqrt(m))).
    start = int(math.ceil((math.sqrt(m) + 21.0 / z.real) ** 2)) + 2
    s_hi = 0.0 + 0.0j       # s_{j+1}
    s_lo = 1e-280 + 0.0j    # s_j
    target = None
    for j in range(start, 0, -1):
        s_prev = (j + 1.0) * s_hi + z * s_lo  # s_{j-1}
        s_hi, s_lo = s_lo, s_prev
        if j - 1 == m:
            target = s_prev
        if abs(s_lo.real) > 1e250 or abs(s_lo.imag) > 1e250:
            s_hi *= 1e-250
            s_lo *= 1e-250
            if target is not None:
                target *= 1e-250
    return target * (_d_minus_one(z) / s_lo)


def mehler_sum(x: float, y: float, z: float) -> float:
    """Closed form of the bilinear Hermite generating function
    Sum_k H_k(x) H_k(y) (z/2)^k / k! = (1-z^2)^{-1/2}
    exp{[2xyz - (x^2+y^2) z^2] / (1-z^2)}, for |z| < 1."""
    if abs(z) >= 1.0:
        raise DomainError("mehler_sum requires |z| < 1")
    one = 1.0 - z * z
    return math.exp((2.0 * x * y * z - (x * x + y * y) * z * z) / one) / math.sqrt(one)


def shifted_mehler_sum(x: float, y: float, z: float, l: int, j: int) -> float:
    """Closed form of the index-shifted bilinear sum
    Sum_k H_{k+l}(x) H_{k+j}(y) (z/2)^k / k!:

        (1-z^2)^{-(l+j+1)/2} * exp{[2xyz - (x^2+y^2) z^2]/(1-z^2)}
        * Sum_{k=0}^{min(l,j)} C(l,k) C(j,k) k! (2z)^k
              * H_{l-k}((x - z y)/sqrt(1-z^2)) * H_{j-k}((y - z x)/sqrt(1-z^2))

    Reduces to mehler_sum for l = j = 0.
    """
    if abs(z) >= 1.0:
        raise DomainError("shifted_mehler_sum requires |z| < 1")
    if l < 0 or j < 0:
        raise DomainError("shift orders must be >= 0")
    one = 1.0 - z * z
    root = math.sqrt(one)
    hx = hermite_sequence((x - z * y) / root, l).values.real
    hy = hermite_sequence((y - z * x) / root, j).values.real
    ksum = 0.0
    for k in range(min(l, j) + 1):
        ksum += (
            math.comb(l, k) * math.comb(j, k) * math.factorial(k)
            * (2.0 * z) ** k * hx[l - k] * hy[j - k]
        )
    return (
        one ** (-(l + j + 1) / 2.0)
        * math.exp((2.0 * x * y * z - (x * x + y * y) * z * z) / one)
        * ksum
    )


def hermite_generating_sum(x: float, z: float, j: int) -> float:
    """Hermite generating-function sums used by the norm derivations.

    j = 0: the full generating function
        Sum_k H_k(x) z^k / k! = exp(2xz - z^2).
    j > 0: the index-shifted sum in its halved-argument convention
        Sum_k H_{k+j}(x) (z/2)^k / k! = exp(xz - z^2/4) * H_j(x - z/2).
    """
    if j < 0:
        raise DomainError("shift order must be >= 0")
    if j == 0:
        return math.exp(2.0 * x * z - z * z)
    hj = hermite_sequence(x - 0.5 * z, j).values[j].real
    return math.exp(x * z - 0.25 * z * z) * hj
