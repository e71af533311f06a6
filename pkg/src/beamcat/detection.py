"""Realistic photocounting for the heralding channel.

An N-diode multiplexed ("photon chopping") detector records k coincident
clicks when m photons arrive.  Ideal routing gives the click statistics

    P~_N(k|m) = N^{-m} C(N,k) Sum_{l=0}^{k} (-1)^l C(k,l) (k-l)^m   (k <= m),

zero for k > m.  We evaluate it through the equivalent Stirling-number form
C(N,k) k! S(m,k) / N^m in exact integer arithmetic: the alternating sum
loses all significant digits in floating point once k ~ m ~ 30, while the
big-integer route is exact for any m.  Bernoulli loss with efficiency eta
acts before the router,

    M_{l,m}(eta) = C(m,l) eta^l (1-eta)^{m-l},

so the measured response is the convolution
P~_{N,eta}(k|m) = Sum_l P~_N(k|l) M_{l,m}.  Bayes inversion against the
heralding probabilities P(m) turns a recorded click number k into a
statistical mixture over the conditional states |Psi_m(alpha)>:

    P(m|k) = P~_{N,eta}(k|m) P(m) / P~_{N,eta}(k),
    P~_{N,eta}(k) = Sum_m P~_{N,eta}(k|m) P(m).

Any lost photon flips the heralded parity, so for eta < 1 the posterior
mixes both parities and the phase-space interference washes out as k grows;
``oscillation_amplitude`` quantifies that smearing.

Mixtures are kept as (weight, pure state) ensembles, never densified: every
observable here is a convex combination of pure-state quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, NumericalError, ZeroProbabilityError
from .states import (
    ConditionalState,
    component_state,
    conditional_coefficients,
    event_probability,
    superposition_constant,
)
from .phasespace import quadrature_distribution, wigner_closed, wigner_of_component

__all__ = [
    "DetectorModel",
    "PosteriorMixture",
    "chopping_probability",
    "loss_matrix",
    "chopping_with_loss",
    "coincidence_prior",
    "posterior_mixture",
    "mixture_wigner",
    "mixture_quadrature",
    "mixture_purity",
    "count_local_maxima",
    "oscillation_amplitude",
]


# ---------------------------------------------------------------------------
# Click statistics of the multiplexed detector
# ---------------------------------------------------------------------------

# Rows of Stirling numbers of the second kind, S(m, k) for k = 0..m, grown on
# demand.  Exact integers; row m costs O(m) ints given row m-1.
_STIRLING_ROWS: list[tuple[int, ...]] = [(1,)]


def _stirling2_row(m: int) -> tuple[int, ...]:
    while len(_STIRLING_ROWS) <= m:
        j = len(_STIRLING_ROWS)
        prev = _STIRLING_ROWS[-1]
        row = [0] * (j + 1)
        for k in range(1, j + 1):
            row[k] = prev[k - 1] + (k * prev[k] if k < j else 0)
        _STIRLING_ROWS.append(tuple(row))
    return _STIRLING_ROWS[m]


def chopping_probability(n_diodes: int, k: int, m: int) -> float:
    """Probability that m photons fired exactly k of N uniformly fed diodes.

    Exact-rational evaluation of C(N,k) k! S(m,k) / N^m, the partition form
    of the alternating inclusion-exclusion sum (which is numerically fatal in
    floats for k ~ m ~ 30).  The float returned is the correctly rounded
    value of the exact rational.
    """
    if n_diodes < 1:
        raise DomainError("detector needs at least one diode")
    if k < 0 or k > n_diodes:
        raise DomainError("click count k must lie in 0..n_diodes")
    if m < 0:
        raise DomainError("photon number must be >= 0")
    if k > m:
        return 0.0
    stirling = _stirling2_row(m)[k]
    numer = math.comb(n_diodes, k) * math.factorial(k) * stirling
    return float(Fraction(numer, n_diodes ** m))


def loss_matrix(eta: float, l: int, m: int) -> float:
    """Bernoulli-loss kernel M_{l,m} = C(m,l) eta^l (1-eta)^{m-l} (l <= m)."""
    if not 0.0 < eta <= 1.0:
        raise DomainError("detector efficiency must lie in (0, 1]")
    if l < 0 or m < 0:
        raise DomainError("photon numbers must be >= 0")
    if l > m:
        return 0.0
    if eta == 1.0:
        return 1.0 if l == m else 0.0
    return math.comb(m, l) * eta ** l * (1.0 - eta) ** (m - l)


@dataclass(frozen=True)
class DetectorModel:
    """N-diode multiplexed photocounter with Bernoulli efficiency eta.

    The lossy response rows P~_{N,eta}(k|m) are built lazily and cached per
    m; every entry is a sum of nonnegative products of an exact-rational
    chopping probability and a binomial loss weight, so each row sums to 1
    to within a few ulps.  Rows are immutable once built.
    """

    n_diodes: int
    efficiency: float
    _response_rows: dict = field(default_factory=dict, init=False,
                                 repr=False, compare=False)

    def __post_init__(self):
        if self.n_diodes < 1:
            raise DomainError("detector needs at least one diode")
        if not 0.0 < self.efficiency <= 1.0:
            raise DomainError("detector efficiency must lie in (0, 1]")

    def response_row(self, m: int) -> np.ndarray:
        """P~_{N,eta}(k|m) for k = 0..min(N, m); entries beyond are zero."""
        if m < 0:
            raise DomainError("photon number must be >= 0")
        row = self._response_rows.get(m)
        if row is None:
            k_top = min(self.n_diodes, m)
            losses = [loss_matrix(self.efficiency, l, m) for l in range(m + 1)]
            row = np.zeros(k_top + 1)
            for k in range(k_top + 1):
                row[k] = math.fsum(
                    chopping_probability(self.n_diodes, k, l) * losses[l]
                    for l in range(k, m + 1)
                )
            row.setflags(write=False)
            self._response_rows[m] = row
        return row


def chopping_with_loss(det: DetectorModel, k: int, m: int) -> float:
    """Lossy click distribution P~_{N,eta}(k|m) = Sum_l P~_N(k|l) M_{l,m}."""
    if k < 0 or k > det.n_diodes:
        raise DomainError("click count k must lie in 0..n_diodes")
    if m < 0:
        raise DomainError("photon number must be >= 0")
    if k > m:
        # losses only remove photons and the router needs k distinct firings
        return 0.0
    return float(det.response_row(m)[k])


# ---------------------------------------------------------------------------
# Bayesian inversion of a recorded click number
# ---------------------------------------------------------------------------

_PRIOR_TAIL = 1e-10          # admissible untruncated prior mass
_PRIOR_M_HARD_CAP = 2000     # safety stop for the truncation search
_COMPONENT_FLOOR = 1e-10     # mixture components below this weight are skipped


def _prior_weights(kappa: float, t_abs2: float, k: int,
                   m_max: int | None) -> tuple[int, np.ndarray]:
    """Heralding probabilities P(m) for m = 0..m_max, resolving the cutoff.

    With m_max=None the cutoff is the smallest m whose cumulative probability
    exceeds 1 - 1e-10, but never less than k + 20.  An explicit m_max must
    leave a tail below the same bound (P(m) decays geometrically with ratio
    alpha^2 (1-|T|^2) / (|T|^2 (1-alpha^2)) < 1, so the search terminates).
    """
    if k < 0:
        raise DomainError("click count k must be >= 0")
    if m_max is None:
        probs = []
        total = 0.0
        m = 0
        while True:
            p = event_probability(kappa, t_abs2, m)
            probs.append(p)
            total += p
            if total > 1.0 - _PRIOR_TAIL:
                break
            if m >= _PRIOR_M_HARD_CAP:
                raise NumericalError(
                    "prior truncation did not converge by m = "
                    f"{_PRIOR_M_HARD_CAP}: cumulative probability {total!r}")
            m += 1
        while len(probs) - 1 < k + 20:
            probs.append(event_probability(kappa, t_abs2, len(probs)))
        return len(probs) - 1, np.asarray(probs)
    if m_max < 0:
        raise DomainError("m_max must be >= 0")
    probs = np.asarray([event_probability(kappa, t_abs2, mm)
                        for mm in range(m_max + 1)])
    tail = 1.0 - math.fsum(probs)
    if tail >= _PRIOR_TAIL:
        raise NumericalError(
            f"m_max = {m_max} leaves a heralding-probability tail of "
            f"{tail:.3e} (needs < {_PRIOR_TAIL:g}); raise the truncation")
    return m_max, probs


def coincidence_prior(det: DetectorModel, kappa: float, t_abs2: float,
                      k: int, m_max: int | None = None) -> float:
    """Unconditional click probability P~_{N,eta}(k) = Sum_m P~(k|m) P(m)."""
    if k < 0 or k > det.n_diodes:
        raise DomainError("click count k must lie in 0..n_diodes")
    m_top, priors = _prior_weights(kappa, t_abs2, k, m_max)
    return math.fsum(chopping_with_loss(det, k, m) * priors[m]
                     for m in range(k, m_top + 1))


@dataclass(frozen=True)
class PosteriorMixture:
    """Conditional state after recording k clicks: a diagonal ensemble.

    ``weights[m]`` is P(m|k) for m = 0..m_max; ``states`` holds one
    ConditionalState per nonzero weight, in increasing m.  ``prior_prob`` is
    the click probability P~_{N,eta}(k) the posterior was normalized by.
    """

    k: int
    weights: np.ndarray
    states: tuple
    prior_prob: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0.0):
            raise DomainError("posterior weights must be nonnegative")
        if abs(float(np.sum(w)) - 1.0) > 1e-10:
            raise DomainError("posterior weights must sum to 1")
        if np.any(w[: self.k] != 0.0):
            # a diode cannot fire without a photon, and loss only lowers m
            raise DomainError("P(m|k) must vanish for m < k")
        if len(self.states) != int(np.count_nonzero(w)):
            raise DomainError("need exactly one state per nonzero weight")

    @property
    def m_max(self) -> int:
        return len(self.weights) - 1

    def components(self):
        """Yield (m, weight, state) over the nonzero-weight components."""
        idx = np.flatnonzero(np.asarray(self.weights) > 0.0)
        for m, state in zip(idx, self.states):
            yield int(m), float(self.weights[m]), state


def posterior_mixture(det: DetectorModel, kappa: float, t_abs2: float,
                      k: int, m_max: int | None = None) -> PosteriorMixture:
    """Bayes-invert k recorded clicks into a mixture over |Psi_m(alpha)>."""
    if k < 0 or k > det.n_diodes:
        raise DomainError("click count k must lie in 0..n_diodes")
    m_top, priors = _prior_weights(kappa, t_abs2, k, m_max)
    response = np.asarray([chopping_with_loss(det, k, m)
                           for m in range(m_top + 1)])
    joint = response * priors
    prior_prob = math.fsum(joint)
    if prior_prob <= 0.0:
        raise ZeroProbabilityError(
            f"recording k = {k} clicks has zero probability at "
            f"kappa = {kappa}, |T|^2 = {t_abs2}")
    weights = joint / prior_prob
    weights.setflags(write=False)
    alpha = t_abs2 * kappa
    states = tuple(conditional_coefficients(alpha, m)
                   for m in range(m_top + 1) if weights[m] > 0.0)
    return PosteriorMixture(k=k, weights=weights, states=states,
                            prior_prob=prior_prob)


# ---------------------------------------------------------------------------
# Observables of the mixed conditional state
# ---------------------------------------------------------------------------

def mixture_wigner(mix: PosteriorMixture, x, p):
    """Wigner function of the mixture: Sum_m P(m|k) W(x, p|m).

    Components below the 1e-10 weight floor are skipped; the dropped mass is
    invisible at the 1e-7 normalization tolerance and keeps the closed-form
    evaluator inside its supported m range for far-tail components.
    """
    total = 0.0
    for _m, w, state in mix.components():
        if w < _COMPONENT_FLOOR:
            continue
        total = total + w * wigner_closed(state, x, p)
    return total


def mixture_quadrature(mix: PosteriorMixture, phi: float, x):
    """Quadrature distribution of the mixture: Sum_m P(m|k) p(x, phi|m)."""
    total = 0.0
    for _m, w, state in mix.components():
        if w < _COMPONENT_FLOOR:
            continue
        total = total + w * quadrature_distribution(state, phi, x)
    return total


def mixture_purity(mix: PosteriorMixture) -> float:
    """Tr rho^2 = Sum_{m,m'} P(m|k) P(m'|k) |<Psi_m|Psi_m'>|^2.

    The ensemble states are not orthogonal within a parity class, so this is
    computed from the actual coefficient overlaps; opposite-parity pairs have
    disjoint Fock support and drop out exactly.
    """
    comps = list(mix.components())
    total = 0.0
    for i, (mi, wi, si) in enumerate(comps):
        total += wi * wi
        ai = si.coefficients.amplitudes
        for mj, wj, sj in comps[:i]:
            if (mi + mj) % 2 == 1:
                continue
            aj = sj.coefficients.amplitudes
            n = min(ai.size, aj.size)
            overlap = complex(np.vdot(ai[:n], aj[:n]))
            total += 2.0 * wi * wj * abs(overlap) ** 2
    return float(total)


# ---------------------------------------------------------------------------
# Figure-structure diagnostics
# ---------------------------------------------------------------------------

def count_local_maxima(values) -> int:
    """Number of strict interior local maxima of a sampled curve."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return 0
    inner = v[1:-1]
    return int(np.sum((inner > v[:-2]) & (inner > v[2:])))


def oscillation_amplitude(mix: PosteriorMixture, p_values=None) -> float:
    """Interference-fringe amplitude of the mixture Wigner function.

    Largest deviation along the segment x = 0, p in [-2, 2] between the
    mixture Wigner function and its "two-Gaussian" baseline
    Sum_m P(m|k) A_m^2 [W_m^+ + W_m^-], i.e. the same two-component ensemble
    with every cross term dropped.  Lost photons mix the heralded parities,
    so this amplitude shrinks monotonically as the click number k grows at
    fixed detector parameters.  Requires alpha > 0 (the components of a
    rotated, negative-alpha state live on the rotated axes).
    """
    if p_values is None:
        p_values = np.linspace(-2.0, 2.0, 201)
    p = np.asarray(p_values, dtype=float)
    x = np.zeros_like(p)
    baseline = np.zeros_like(p)
    for m, w, state in mix.components():
        if w < _COMPONENT_FLOOR:
            continue
        amp2 = superposition_constant(state.alpha, m) ** 2
        for sign in (+1, -1):
            comp = component_state(sign, state.alpha, m, n_max=state.n_max)
            baseline = baseline + (w * amp2) * wigner_of_component(comp, x, p)
    deviation = np.abs(mixture_wigner(mix, x, p) - baseline)
    return float(np.max(deviation))
