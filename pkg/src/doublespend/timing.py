"""The defective distribution of the attack-achieving time.

The time to first achievement is continuous on (0, inf) with total mass
p_dsa(spec) < 1 for an inferior attacker; the remaining mass is a point
defect at infinity ("never succeeds"), carried as an explicit scalar and
never as a density feature.

Two independent evaluation routes are kept deliberately separate:

- the Erlang-mixture series (per-state masses times Erlang stage laws),
  which powers the success probability and expected-success-time operations
  with certified truncation tails;
- the closed-form density (hypergeometric block plus an incomplete-gamma
  block), retained as an independently tested evaluator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from .errors import (
    ConvergenceError,
    DomainError,
    SingularityError,
    UndefinedExpectationError,
)
from .specfun import HypergeomParams, log_hypergeom_pfq, regularized_gamma_p
from .walk import AttackSpec, p_dsa

_MIXTURE_CAP = 2_000_000
_TINY = 1e-300


@dataclass(frozen=True)
class DefectiveTimeDistribution:
    """Continuous density of the achieving time plus the defect at infinity."""

    spec: AttackSpec
    defect_mass: float
    density: Callable[[float], float]


def dsa_time_distribution(spec: AttackSpec, tol: float = 1e-12) -> DefectiveTimeDistribution:
    """Bundle the closed-form density with its defect mass 1 - p_dsa."""
    defect = max(1.0 - p_dsa(spec), 0.0)
    return DefectiveTimeDistribution(
        spec=spec,
        defect_mass=defect,
        density=lambda t: dsa_time_density(spec, t, tol),
    )


def dsa_time_density(spec: AttackSpec, t: float, tol: float = 1e-12) -> float:
    """Closed-form continuous density of the achieving time at t > 0.

    Sum of two blocks mirroring the two path families of p_dsa_at_state,
    with x = p_a * p_h * (lambda_t * t)^2:

    - overtake-after-confirmation: p_a * lambda_t * e^(-lambda_t t)
      * x^n_bc / (2 n_bc)! * sum_j binom(j-1, n_bc-1) 2F3(a_j; b_j; x),
      where for j = n_bc..2*n_bc
        a_j = (n_bc + 1 - j/2, n_bc + 1/2 - j/2)
        b_j = (2*n_bc + 2 - j, n_bc + 1, n_bc + 1/2);
    - confirmation-last: (p_h lambda_t t)^n_bc / (t (n_bc-1)!)
      * e^(-lambda_t t) * (e^(p_a lambda_t t) - sum_{k<=n_bc} (p_a lambda_t t)^k / k!),
      evaluated as e^(-lambda_h t) * P(n_bc+1, p_a lambda_t t) via the
      regularized lower incomplete gamma, which removes both the
      large-argument overflow and the small-argument cancellation of the
      raw form.

    Everything combines in log space; the hypergeometric factors use scaled
    accumulation, so large t cannot overflow before the e^(-lambda_t t)
    prefactor cancels the growth. Strictly nonnegative; t = 0 returns 0
    (at least 2*n_bc + 1 arrivals are needed, so the density vanishes at the
    origin like t^(2*n_bc)).
    """
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if t == 0.0:
        return 0.0
    n_bc = spec.n_bc
    lam_t = spec.lambda_t
    z = lam_t * t
    x = spec.p_a * spec.p_h * z * z

    log_pref = (
        math.log(spec.p_a)
        + math.log(lam_t)
        - z
        + n_bc * math.log(x)
        - math.lgamma(2 * n_bc + 1)
    )
    term1 = 0.0
    for j in range(n_bc, 2 * n_bc + 1):
        params = HypergeomParams(
            a=(n_bc + 1.0 - j / 2.0, n_bc + 0.5 - j / 2.0),
            b=(2.0 * n_bc + 2.0 - j, n_bc + 1.0, n_bc + 0.5),
        )
        log_f = log_hypergeom_pfq(params, x, tol)
        log_term = log_pref + math.log(math.comb(j - 1, n_bc - 1)) + log_f
        if log_term > -745.0:
            term1 += math.exp(log_term)

    gamma_factor = regularized_gamma_p(n_bc + 1.0, spec.p_a * z)
    term2 = 0.0
    if gamma_factor > 0.0:
        log_term2 = (
            n_bc * math.log(spec.p_h * z)
            - math.log(t)
            - math.lgamma(n_bc)
            - spec.lambda_h * t
            + math.log(gamma_factor)
        )
        if log_term2 > -745.0:
            term2 = math.exp(log_term2)
    return term1 + term2


def _state_mass_iter(spec: AttackSpec):
    """Yield (i, p_i) for i = 2*n_bc + 1, 2*n_bc + 2, ... without big integers.

    Float ratio recursions equivalent to p_dsa_at_state: the ballot-family
    lanes advance by C(n+1,m)/C(n,m) = (2n+m+1)(2n+m+2)/((n+1)(n+m+2)) times
    p_a*p_h per odd state, the confirmation-last lane by i/(i-n_bc+1) * p_a
    per state. Relative drift grows like (state count) * eps, far inside the
    certified-series budget; only the series summation uses this, the public
    p_dsa_at_state keeps exact integer coefficients.
    """
    n_bc = spec.n_bc
    pa, ph = spec.p_a, spec.p_h
    paph = pa * ph
    binoms = [float(math.comb(j - 1, n_bc - 1)) for j in range(n_bc, 2 * n_bc + 1)]
    ms = [2 * n_bc - j for j in range(n_bc, 2 * n_bc + 1)]
    ln_pa, ln_ph = math.log(pa), math.log(ph)
    lane0 = (n_bc + 1) * ln_pa + n_bc * ln_ph
    lanes = [math.exp(lane0) if lane0 > -745.0 else 0.0] * len(binoms)
    start2 = math.log(math.comb(2 * n_bc, n_bc - 1)) + n_bc * ln_ph + (n_bc + 1) * ln_pa
    t2 = math.exp(start2) if start2 > -745.0 else 0.0
    i = 2 * n_bc + 1
    n = 0
    while True:
        p_i = t2
        if (i - 2 * n_bc) % 2 == 1:
            p_i += sum(b * lane for b, lane in zip(binoms, lanes))
            for idx, m in enumerate(ms):
                lanes[idx] *= (
                    (2 * n + m + 1) * (2 * n + m + 2)
                    / ((n + 1) * (n + m + 2)) * paph
                )
            n += 1
        yield i, p_i
        t2 *= i / (i - n_bc + 1) * pa
        i += 1


def _mixture_moments(spec: AttackSpec, t_cut: float, tol: float,
                     want_time: bool) -> tuple[float, float]:
    """Shared Erlang-mixture series for P_AS and the E_TAS numerator.

    Returns (p_as, time_numerator) where

      p_as           = sum_i p_i * ErlangCDF(i, lambda_t, t_cut)
      time_numerator = sum_i p_i * (i / lambda_t) * ErlangCDF(i+1, lambda_t, t_cut)

    The Erlang CDFs advance by the recurrence P(i+1, x) = P(i, x) -
    e^-x x^i / i!, reset from the incomplete-gamma evaluator every 64 states
    to cancel additive drift. Truncation is certified against the closed-form
    total mass: the CDF decreases in the stage count i at fixed t, so the
    remaining p_as mass after state I is at most P(I+1, x) * (p_dsa -
    accumulated p-mass); for the numerator, integral(0..T) s *
    erlang_pdf(i, s) ds <= T * ErlangCDF(i, T) scales the same bound by
    t_cut.
    """
    lam_t = spec.lambda_t
    x = lam_t * t_cut
    total_mass = p_dsa(spec)
    i0 = 2 * spec.n_bc + 1
    cdf = regularized_gamma_p(float(i0), x)
    if cdf <= 0.0:
        return 0.0, 0.0  # not even the earliest state fits before t_cut
    log_u = i0 * math.log(x) - x - math.lgamma(i0 + 1)
    u = math.exp(log_u) if log_u > -745.0 else 0.0
    acc_p = 0.0
    acc_t = 0.0
    mass_seen = 0.0
    steps = 0
    for i, p_i in _state_mass_iter(spec):
        cdf_next = cdf - u
        if cdf_next < 0.0:
            cdf_next = 0.0
        mass_seen += p_i
        acc_p += p_i * cdf
        if want_time:
            acc_t += p_i * (i / lam_t) * cdf_next
        steps += 1
        if steps % 64 == 0 or cdf_next <= 1e-280:
            cdf_next = regularized_gamma_p(i + 1.0, x)
            log_u = (i + 1) * math.log(x) - x - math.lgamma(i + 2)
            u = math.exp(log_u) if log_u > -745.0 else 0.0
            bound = cdf_next * max(total_mass - mass_seen, 0.0)
            if bound <= tol * max(acc_p, _TINY):
                if not want_time or t_cut * bound <= tol * max(acc_t, _TINY):
                    return acc_p, acc_t
            if steps >= _MIXTURE_CAP:
                raise ConvergenceError(
                    f"Erlang-mixture series did not converge within "
                    f"{_MIXTURE_CAP} states",
                    acc_p,
                )
            cdf = cdf_next
        else:
            cdf = cdf_next
            u *= x / (i + 1)
    raise ConvergenceError("Erlang-mixture series terminated unexpectedly", acc_p)


def attack_success_prob(spec: AttackSpec, tol: float = 1e-12) -> float:
    """Probability the attack achieves before the cut-time.

    Finite cut: certified truncation of the Erlang-mixture series. Infinite
    cut: exactly the total mass p_dsa (waiting forever collects every state).
    Nondecreasing in t_cut with limit p_dsa.
    """
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if spec.infinite_cut:
        return p_dsa(spec)
    p_as, _ = _mixture_moments(spec, spec.t_cut, tol, want_time=False)
    return min(p_as, 1.0)


def expected_success_time(spec: AttackSpec, tol: float = 1e-12) -> float:
    """Mean achieving time conditioned on success before the cut-time.

    Finite cut: the mixture numerator uses the exact moment identity
    integral(0..T) s * erlang_pdf(i, s) ds = (i / lambda_t) *
    ErlangCDF(i+1, T), divided by the success probability. Always below
    t_cut. Infinite cut: the closed form of expected_success_time_inf.
    """
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if spec.infinite_cut:
        return expected_success_time_inf(spec)
    p_as, num = _mixture_moments(spec, spec.t_cut, tol, want_time=True)
    if p_as <= 0.0:
        raise UndefinedExpectationError(
            "success has zero probability before this cut-time; "
            "the conditional mean is undefined"
        )
    return num / p_as


def expected_success_time_inf(spec: AttackSpec) -> float:
    """Mean achieving time with no deadline, conditioned on eventual success.

    Closed form via generating-function derivatives of the per-state masses:

      (sum_j binom(j-1, n_bc-1) * Z_j + n_bc / p_h) / (lambda_t * p_dsa)

    with, writing p_max/p_min for the larger/smaller of p_a, p_h,

      Z_j = p_a * p_min^n_bc * p_max^(j - n_bc - 1)
            * (2*n_bc - 2*j*p_min + 1) / (p_max - p_min)
            - j * p_a^(j - n_bc) * p_h^n_bc.

    Singular at p_a = 1/2: the symmetric walk overtakes with probability one
    but only after a time of infinite mean, so evaluation is refused and
    callers are pointed to a finite cut or the simulation oracle.
    """
    if spec.p_a == 0.5:
        raise SingularityError(
            "the conditional mean success time diverges at p_a = 1/2; "
            "use a finite cut-time or the Monte Carlo estimator"
        )
    n_bc = spec.n_bc
    pa, ph = spec.p_a, spec.p_h
    p_big, p_small = spec.p_max, spec.p_min
    parts = [n_bc / ph]
    for j in range(n_bc, 2 * n_bc + 1):
        z_j = (
            pa
            * p_small ** n_bc
            * p_big ** (j - n_bc - 1)
            * (2 * n_bc - 2 * j * p_small + 1)
            / (p_big - p_small)
            - j * pa ** (j - n_bc) * ph ** n_bc
        )
        parts.append(math.comb(j - 1, n_bc - 1) * z_j)
    return math.fsum(parts) / (spec.lambda_t * p_dsa(spec))


def sampling_grid(spec: AttackSpec, times: list[float],
                  tol: float = 1e-12) -> list[tuple[float, float, float]]:
    """(t, density, cdf) rows for export, cdf being the success probability
    with the cut moved to t (the continuous part's distribution function)."""
    rows = []
    for t in times:
        if t < 0.0:
            raise DomainError(f"grid times must be nonnegative, got {t}")
        dens = dsa_time_density(spec, t, tol)
        cdf = 0.0 if t == 0.0 else attack_success_prob(
            replace(spec, t_cut=t), tol
        )
        rows.append((t, dens, cdf))
    return rows
