"""State construction for the conditional-measurement scheme.

A squeezed vacuum enters port 1 of a beam splitter, vacuum enters port 2, and
counting m photons in output channel 2 prepares output channel 1 in a pure
state |Psi_m(alpha)> that depends only on m and the effective parameter
alpha = |T|^2 kappa (kappa = e^{i phi_xi} tanh|xi|).  This module builds all
of those states two independent ways:

* closed-form coefficient formulas, evaluated in log space (the production
  path), and
* a brute-force truncated two-mode beam-splitter oracle followed by projection
  onto the m-photon column (the reference path the closed forms are tested
  against).

Conventions: alpha is kept real (possibly negative); a complex phase phi_alpha
is equivalent to a phase-space rotation by phi_alpha/2 and is reduced upstream
(see phasespace).  For n + m odd every conditional coefficient vanishes
identically -- the states carry the parity of the heralding count.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ZeroProbabilityError
from .specfun import log_factorial_table, log_gamma_half

__all__ = [
    "FockVector",
    "SqueezeParams",
    "BeamSplitterParams",
    "ConditionalState",
    "ComponentState",
    "TwoModeFockMatrix",
    "default_n_max",
    "squeezed_vacuum",
    "apply_beam_splitter",
    "conditional_from_oracle",
    "oracle_event_probability",
    "conditional_coefficients",
    "normalization_closed",
    "event_probability",
    "component_state",
    "component_norm_closed",
    "superposition_constant",
]


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FockVector:
    """Truncated single-mode state: complex amplitudes over n = 0..n_max."""

    amplitudes: np.ndarray
    n_max: int

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class SqueezeParams:
    """Squeeze magnitude |xi| and phase phi_xi; kappa = e^{i phi_xi} tanh|xi|."""

    xi_abs: float
    phi_xi: float = 0.0

    def __post_init__(self):
        if self.xi_abs < 0:
            raise DomainError("squeeze magnitude must be >= 0")

    @property
    def kappa(self) -> complex:
        return cmath.exp(1j * self.phi_xi) * math.tanh(self.xi_abs)

    @classmethod
    def from_kappa(cls, kappa: complex) -> "SqueezeParams":
        k = complex(kappa)
        if abs(k) >= 1.0:
            raise DomainError("|kappa| must be < 1")
        return cls(xi_abs=math.atanh(abs(k)), phi_xi=cmath.phase(k) if k != 0 else 0.0)


@dataclass(frozen=True)
class BeamSplitterParams:
    """Mixing angle theta in [0, pi/2] plus transmittance/reflectance phases.

    The single-photon transfer matrix is
        (T11 T12)   ( cos(theta) e^{i phi_T}    sin(theta) e^{i phi_R} )
        (T21 T22) = (-sin(theta) e^{-i phi_R}   cos(theta) e^{-i phi_T}),
    so |T| = cos(theta), |R| = sin(theta).  The global phase is fixed to zero;
    it never affects an observable here.
    """

    theta: float
    phi_T: float = 0.0
    phi_R: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2.0:
            raise DomainError("theta must lie in [0, pi/2]")

    @property
    def t_abs2(self) -> float:
        return math.cos(self.theta) ** 2

    @property
    def t11(self) -> complex:
        return math.cos(self.theta) * cmath.exp(1j * self.phi_T)

    @property
    def t21(self) -> complex:
        return -math.sin(self.theta) * cmath.exp(-1j * self.phi_R)

    @classmethod
    def from_t_abs2(cls, t_abs2: float, phi_T: float = 0.0, phi_R: float = 0.0) -> "BeamSplitterParams":
        if not 0.0 < t_abs2 <= 1.0:
            raise DomainError("|T|^2 must lie in (0, 1]")
        return cls(theta=math.acos(math.sqrt(t_abs2)), phi_T=phi_T, phi_R=phi_R)


@dataclass(frozen=True)
class ConditionalState:
    """The pure conditional state |Psi_m(alpha)>.

    `coefficients` holds the normalized amplitudes c_{m,n}/sqrt(N_m); `norm` is
    the unnormalized squared norm N_m.  Coefficients vanish exactly whenever
    n + m is odd.
    """

    alpha: float
    m: int
    norm: float
    n_max: int
    coefficients: FockVector


@dataclass(frozen=True)
class ComponentState:
    """One branch |Psi_m^(+/-)> of the two-component superposition."""

    sign: int
    alpha: float
    m: int
    norm: float
    coefficients: FockVector


@dataclass(frozen=True)
class TwoModeFockMatrix:
    """Two-mode amplitudes indexed (n1, n2), each axis 0..n_max."""

    amplitudes: np.ndarray

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


# ---------------------------------------------------------------------------
# Truncation rule
# ---------------------------------------------------------------------------

def default_n_max(alpha_abs: float, m: int) -> int:
    """Truncation photon number for the conditional-state coefficient tail.

    The squared coefficients fall off like |alpha|^n n^m for large n (geometric
    decay dressed by a polynomial from the (n+m)!/n! ratio), so the cutoff
    solves |alpha|^n n^m < 1e-16 by fixed-point iteration and adds a 2m + 16
    safety margin, rounded up to even.  The resulting squared-norm deficit sits
    far below every tolerance used downstream.
    """
    if not 0.0 <= alpha_abs < 1.0:
        raise DomainError("|alpha| must lie in [0, 1)")
    if alpha_abs == 0.0:
        base = 0
    else:
        rate = -math.log(alpha_abs)
        target = -math.log(1e-16)
        n_est = target / rate
        for _ in range(8):
            n_est = (target + m * math.log(max(n_est, 2.0))) / rate
        base = math.ceil(n_est)
    n = max(64, base + 2 * m + 16)
    return n if n % 2 == 0 else n + 1


# ---------------------------------------------------------------------------
# Squeezed vacuum
# ---------------------------------------------------------------------------

def squeezed_vacuum(params: SqueezeParams, n_max: int | None = None) -> FockVector:
    """Fock expansion of the squeezed vacuum:
    c_{2n} = (1-|kappa|^2)^{1/4} sqrt((2n)!)/(2^n n!) kappa^n, odd c vanish."""
    kappa = params.kappa
    k_abs = abs(kappa)
    if k_abs >= 1.0:
        raise DomainError("|kappa| must be < 1")
    if n_max is None:
        n_max = default_n_max(k_abs, 0)
    amps = np.zeros(n_max + 1, dtype=complex)
    if k_abs == 0.0:
        amps[0] = 1.0
        return FockVector(amplitudes=amps, n_max=n_max)
    lf = log_factorial_table(n_max).values
    n = np.arange(n_max // 2 + 1)
    log_mag = (
        0.25 * math.log1p(-k_abs * k_abs)
        + 0.5 * lf[2 * n]
        - n * math.log(2.0)
        - lf[n]
        + n * math.log(k_abs)
    )
    phase = n * cmath.phase(kappa)
    amps[2 * n] = np.exp(log_mag) * np.exp(1j * phase)
    return FockVector(amplitudes=amps, n_max=n_max)


# ---------------------------------------------------------------------------
# Beam-splitter oracle
# ---------------------------------------------------------------------------

def apply_beam_splitter(input1: FockVector, bs: BeamSplitterParams) -> TwoModeFockMatrix:
    """Send `input1` into port 1 and vacuum into port 2.

    Total photon number is conserved, so the unitary is block diagonal over
    N = n1 + n2 and only the vacuum-port column of each block is needed:
    within block N the output amplitudes are
        amp(N - j, j) = c_N * sqrt(C(N, j)) * T11^{N-j} * T21^{j},
    built here by the (log-magnitude, phase) recurrence over j so that
    |T11|^N underflow cannot occur for near-grazing mixing angles.
    """
    n_max = input1.n_max
    t11, t21 = bs.t11, bs.t21
    out = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    lf = log_factorial_table(n_max).values
    abs11, abs21 = abs(t11), abs(t21)
    ph11, ph21 = cmath.phase(t11), cmath.phase(t21)
    for total in range(n_max + 1):
        c = input1.amplitudes[total]
        if c == 0:
            continue
        if abs21 == 0.0:  # fully transmitting
            out[total, 0] = c * t11**total
            continue
        if abs11 == 0.0:  # fully reflecting
            out[0, total] = c * t21**total
            continue
        j = np.arange(total + 1)
        log_mag = (
            0.5 * (lf[total] - lf[j] - lf[total - j])
            + (total - j) * math.log(abs11)
            + j * math.log(abs21)
        )
        phase = (total - j) * ph11 + j * ph21
        out[total - j, j] = c * np.exp(log_mag + 1j * phase)
    return TwoModeFockMatrix(amplitudes=out)


def oracle_event_probability(two_mode: TwoModeFockMatrix, m: int) -> float:
    """Probability of finding exactly m photons in channel 2: the squared norm
    of the m-th column before renormalization."""
    if m > two_mode.n_max:
        raise DomainError("m exceeds the oracle truncation")
    return float(np.sum(np.abs(two_mode.amplitudes[:, m]) ** 2))


def conditional_from_oracle(two_mode: TwoModeFockMatrix, m: int) -> FockVector:
    """Project channel 2 of the two-mode output onto |m> and renormalize.

    The overall phase of a conditional column is unobservable; the returned
    vector follows the convention that its first nonzero amplitude is real and
    positive, which is also the convention of the closed-form coefficients for
    real alpha > 0.
    """
    if m > two_mode.n_max:
        raise DomainError("m exceeds the oracle truncation")
    column = np.array(two_mode.amplitudes[:, m])
    norm_sq = float(np.sum(np.abs(column) ** 2))
    if norm_sq < 1e-300:
        raise ZeroProbabilityError(f"conditional column m={m} has zero probability")
    column /= math.sqrt(norm_sq)
    magnitudes = np.abs(column)
    lead = int(np.argmax(magnitudes > 1e-12 * magnitudes.max()))
    column *= np.conj(column[lead]) / abs(column[lead])
    return FockVector(amplitudes=column, n_max=two_mode.n_max)


# ---------------------------------------------------------------------------
# Closed-form conditional coefficients
# ---------------------------------------------------------------------------

def _log_coeff_magnitude(alpha_abs: float, m: int, n: np.ndarray, lf: np.ndarray) -> np.ndarray:
    """ln of (n+m)!/(Gamma((n+m)/2 + 1) sqrt(n!)) * (|alpha|/2)^{(n+m)/2}.

    Shared by the conditional and component coefficient builders so the
    two-branch reconstruction identity holds bit-exactly.  Gamma at the
    half-integer arguments that odd n + m produces goes through log_gamma_half.
    """
    npm = n + m
    lg_half = np.array([log_gamma_half(v + 2) for v in npm])
    return lf[npm] - lg_half - 0.5 * lf[n] + 0.5 * npm * math.log(alpha_abs / 2.0)


def conditional_coefficients(alpha: float, m: int, n_max: int | None = None) -> ConditionalState:
    """Closed-form conditional state |Psi_m(alpha)> for real alpha.

    Unnormalized coefficients (parity mask included)
        c_{m,n} = (n+m)! / (Gamma((n+m)/2 + 1) sqrt(n!))
                  * (1 + (-1)^{n+m})/2 * (alpha/2)^{(n+m)/2}
    are evaluated in log space -- the factorial ratio overflows direct
    arithmetic near n ~ 150 -- then scaled by 1/sqrt(N_m).
    """
    if m < 0:
        raise DomainError("m must be >= 0")
    if abs(alpha) >= 1.0:
        raise DomainError("|alpha| must be < 1")
    if abs(alpha) < 1e-300:
        # below double-precision resolution this is exactly the alpha = 0
        # limit: vacuum for m = 0, an unpreparable event otherwise
        if m > 0:
            raise ZeroProbabilityError("alpha = 0 with m > 0: all coefficients vanish")
        if n_max is None:
            n_max = default_n_max(0.0, 0)
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[0] = 1.0
        return ConditionalState(alpha=0.0, m=0, norm=1.0, n_max=n_max,
                                coefficients=FockVector(amplitudes=amps, n_max=n_max))
    if n_max is None:
        n_max = default_n_max(abs(alpha), m)
    log_norm = _log_normalization(abs(alpha), m)
    norm = math.exp(log_norm)
    lf = log_factorial_table(n_max + m).values
    # only n with n + m even survive the parity mask
    n = np.arange(m % 2, n_max + 1, 2)
    log_mag = _log_coeff_magnitude(abs(alpha), m, n, lf) - 0.5 * log_norm
    signs = np.where((alpha < 0) & (((n + m) // 2) % 2 == 1), -1.0, 1.0)
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[n] = signs * np.exp(log_mag)
    return ConditionalState(alpha=alpha, m=m, norm=norm, n_max=n_max,
                            coefficients=FockVector(amplitudes=amps, n_max=n_max))


def _log_sum_inverse_alpha_powers(alpha_abs: float, m: int, factorial_power: int) -> float:
    """ln of Sum_{k=0}^{floor(m/2)} (m!)^p / [(m-2k)! (k!)^2 (2 alpha)^{2k}].

    Returned as a log so callers can fold it into their prefactors before a
    single exponentiation; the bare sum alone overflows for small alpha even
    when the full product is ordinary-sized.
    """
    lf = log_factorial_table(m).values
    log_terms = [
        factorial_power * lf[m] - lf[m - 2 * k] - 2.0 * lf[k] - 2.0 * k * math.log(2.0 * alpha_abs)
        for k in range(m // 2 + 1)
    ]
    top = max(log_terms)
    return top + math.log(sum(math.exp(t - top) for t in log_terms))


def _log_normalization(alpha_abs: float, m: int) -> float:
    """ln N_m, kept in log form for the coefficient builders."""
    log_pref = -0.5 * math.log1p(-alpha_abs * alpha_abs) + m * (
        2.0 * math.log(alpha_abs) - math.log1p(-alpha_abs * alpha_abs)
    )
    return log_pref + _log_sum_inverse_alpha_powers(alpha_abs, m, factorial_power=2)


def normalization_closed(alpha: float, m: int) -> float:
    """Squared norm N_m of the unnormalized conditional coefficients:
    (1-alpha^2)^{-1/2} [alpha^2/(1-alpha^2)]^m
    Sum_k (m!)^2 / [(m-2k)! (k!)^2 (2 alpha)^{2k}]."""
    a = abs(alpha)
    if not 0.0 < a < 1.0:
        raise DomainError("normalization_closed requires 0 < |alpha| < 1")
    if m < 0:
        raise DomainError("m must be >= 0")
    return math.exp(_log_normalization(a, m))


def event_probability(kappa: float, t_abs2: float, m: int) -> float:
    """Probability P(m) of counting m photons in channel 2:
    sqrt[(1-kappa^2)/(1-alpha^2)] * [alpha^2 (1-|T|^2) / (|T|^2 (1-alpha^2))]^m
    * Sum_k m! / [(m-2k)! (k!)^2 (2 alpha)^{2k}],  alpha = |T|^2 kappa."""
    if not abs(kappa) < 1.0:
        raise DomainError("|kappa| must be < 1")
    if not 0.0 < t_abs2 <= 1.0:
        raise DomainError("|T|^2 must lie in (0, 1]")
    if m < 0:
        raise DomainError("m must be >= 0")
    if kappa == 0.0:
        return 1.0 if m == 0 else 0.0
    alpha = t_abs2 * kappa
    a = abs(alpha)
    if m == 0:
        return math.sqrt((1.0 - kappa * kappa) / (1.0 - a * a))
    if t_abs2 == 1.0:
        return 0.0
    log_pref = 0.5 * (math.log1p(-kappa * kappa) - math.log1p(-a * a)) + m * math.log(
        a * a * (1.0 - t_abs2) / (t_abs2 * (1.0 - a * a))
    )
    return math.exp(log_pref + _log_sum_inverse_alpha_powers(a, m, factorial_power=1))


# ---------------------------------------------------------------------------
# Component (cat-branch) states
# ---------------------------------------------------------------------------

def component_state(sign: int, alpha: float, m: int, n_max: int | None = None) -> ComponentState:
    """One branch of the two-component decomposition:
    c^{(s)}_{m,n} = (n+m)! / (Gamma((n+m)/2 + 1) sqrt(n!)) * (s sqrt(alpha/2))^{n+m},
    so c^{(-)}_{m,n} = (-1)^{n+m} c^{(+)}_{m,n} and the equal-weight average
    (c^+ + c^-)/2 reproduces the conditional coefficients with their parity
    mask emerging from the sign cancellation."""
    if sign not in (+1, -1):
        raise DomainError("sign must be +1 or -1")
    if not 0.0 < alpha < 1.0:
        raise DomainError("component_state requires 0 < alpha < 1 "
                          "(negative alpha reduces to a phase-space rotation)")
    if m < 0:
        raise DomainError("m must be >= 0")
    if n_max is None:
        n_max = default_n_max(alpha, m)
    norm = component_norm_closed(alpha, m)
    lf = log_factorial_table(n_max + m).values
    n = np.arange(n_max + 1)
    log_mag = _log_coeff_magnitude(alpha, m, n, lf) - 0.5 * math.log(norm)
    signs = np.where((n + m) % 2 == 1, float(sign), 1.0)
    amps = signs * np.exp(log_mag) + 0j
    return ComponentState(sign=sign, alpha=alpha, m=m, norm=norm,
                          coefficients=FockVector(amplitudes=amps, n_max=n_max))


def component_norm_closed(alpha: float, m: int) -> float:
    """Squared norm of one unnormalized branch: N_m^(+/-) = 2 N_m - I_m with
    the interference integral
    I_m = (m!)^2 (-|alpha|)^m / (sqrt(pi) 2^m Gamma(m + 3/2))
          * F((m+1)/2, (m+1)/2; m + 3/2; 1 - alpha^2)."""
    from .specfun import gauss_2f1, log_factorial

    a = abs(alpha)
    if not 0.0 < a < 1.0:
        raise DomainError("component_norm_closed requires 0 < |alpha| < 1")
    if m < 0:
        raise DomainError("m must be >= 0")
    hyp = gauss_2f1((m + 1) / 2.0, (m + 1) / 2.0, m + 1.5, 1.0 - a * a)
    log_mag = (
        2.0 * log_factorial(m)
        + m * math.log(a)
        - 0.5 * math.log(math.pi)
        - m * math.log(2.0)
        - log_gamma_half(2 * m + 3)
    )
    interference = (-1.0) ** m * math.exp(log_mag) * hyp
    return 2.0 * normalization_closed(alpha, m) - interference


def superposition_constant(alpha: float, m: int) -> float:
    """A = (1/2) sqrt(N_m^(+/-) / N_m): the weight with which the two
    normalized branches superpose to reconstruct the conditional state."""
    return 0.5 * math.sqrt(component_norm_closed(alpha, m) / normalization_closed(alpha, m))
