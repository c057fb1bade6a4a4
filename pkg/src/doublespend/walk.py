"""Attack parameterization and the exact per-state success probabilities.

Model: honest miners and the attacker each find blocks as independent Poisson
processes with rates lambda_H and lambda_A = lambda_H * p_A / p_H. The merged
process has rate lambda_T, and each arrival is an attacker block with
probability p_A. The walk S_i = (honest blocks) - (attacker blocks) after i
arrivals drives two conditions:

  confirmation: the honest chain has accumulated at least N_BC blocks;
  overtake:     the attacker chain is strictly longer, i.e. S_i < 0.

The attack achieves at the first state where both hold simultaneously. This
module computes the probability of that happening exactly at state i, the
total success probability over all states, and reference probabilities for
cross-checks (an independently derived confirmation-race sum, and the success
probability under the stricter pre-mining rule).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import ConvergenceError, DomainError


class _CutTime(enum.Enum):
    """Distinguished marker for an unbounded attack (no give-up deadline)."""

    INFINITE = "infinite"

    def __repr__(self) -> str:
        return "INFINITE"


INFINITE = _CutTime.INFINITE

_SERIES_CAP = 2_000_000


@dataclass(frozen=True)
class AttackSpec:
    """Stochastic parameters of one double-spend attempt.

    p_a        attacker share of total computing power, 0 < p_a < 1
    n_bc       confirmation count the merchant waits for, >= 1
    t_cut      give-up deadline in seconds, or INFINITE
    lambda_h   honest-chain block rate in blocks/second (defaults to 1.0,
               a dimensionless convention; success probabilities do not
               depend on it, absolute times scale with it)
    """

    p_a: float
    n_bc: int
    t_cut: float | _CutTime
    lambda_h: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.p_a < 1.0:
            raise DomainError(f"p_a must lie strictly in (0, 1), got {self.p_a}")
        if not isinstance(self.n_bc, int) or isinstance(self.n_bc, bool) or self.n_bc < 1:
            raise DomainError(f"n_bc must be an integer >= 1, got {self.n_bc!r}")
        if self.t_cut is not INFINITE:
            if not isinstance(self.t_cut, (int, float)) or not self.t_cut > 0.0:
                raise DomainError(
                    f"t_cut must be a positive number of seconds or INFINITE, got {self.t_cut!r}"
                )
            if math.isinf(self.t_cut):
                raise DomainError("use INFINITE for an unbounded attack, not float('inf')")
        if not self.lambda_h > 0.0:
            raise DomainError(f"lambda_h must be positive, got {self.lambda_h}")

    @property
    def p_h(self) -> float:
        """Honest share, stored only as the complement 1 - p_a."""
        return 1.0 - self.p_a

    @property
    def lambda_a(self) -> float:
        return self.lambda_h * self.p_a / self.p_h

    @property
    def lambda_t(self) -> float:
        return self.lambda_a + self.lambda_h

    @property
    def p_max(self) -> float:
        return max(self.p_a, self.p_h)

    @property
    def p_min(self) -> float:
        return min(self.p_a, self.p_h)

    @property
    def infinite_cut(self) -> bool:
        return self.t_cut is INFINITE


@dataclass(frozen=True)
class WalkPath:
    """A realized finite prefix of the block-arrival walk.

    steps: ordered (time_seconds, delta) pairs, delta = +1 for an honest
    block and -1 for an attacker block, times strictly increasing.
    """

    steps: tuple[tuple[float, int], ...]

    def __post_init__(self):
        prev = 0.0
        for idx, (t, d) in enumerate(self.steps):
            if d not in (1, -1):
                raise DomainError(f"step {idx}: delta must be +1 or -1, got {d!r}")
            if t < 0.0 or (idx > 0 and t <= prev) or (idx == 0 and t <= 0.0):
                raise DomainError(f"step {idx}: times must be strictly increasing and positive")
            prev = t

    def partial_sums(self) -> tuple[int, ...]:
        """S_i after each step: honest minus attacker block count."""
        out = []
        s = 0
        for _, d in self.steps:
            s += d
            out.append(s)
        return tuple(out)

    def block_counts(self) -> tuple[int, int]:
        """(honest, attacker) totals over the whole prefix."""
        ups = sum(1 for _, d in self.steps if d == 1)
        return ups, len(self.steps) - ups

    def first_achievement(self, n_bc: int) -> int | None:
        """1-based index of the first state where the attack achieves, or None.

        Achieving state: honest count >= n_bc and the walk is strictly
        negative (attacker chain longer).
        """
        honest = 0
        s = 0
        for idx, (_, d) in enumerate(self.steps, start=1):
            s += d
            if d == 1:
                honest += 1
            if honest >= n_bc and s < 0:
                return idx
        return None


def ballot_number(n: int, m: int) -> int:
    """Count of length-(2n+m) walks of +/-1 steps from 0 to m never going negative.

    (m+1)/(n+m+1) * binom(2n+m, n) for n, m >= 0 (the division is exact);
    0 for any negative argument. Exact arbitrary-precision integers.
    """
    if n < 0 or m < 0:
        return 0
    return (m + 1) * math.comb(2 * n + m, n) // (n + m + 1)


@lru_cache(maxsize=None)
def _ballot_coeff(n_bc: int, n: int) -> int:
    # integer weight of the odd-state term: paths that confirm at state j
    # (j = n_bc..2*n_bc ways to place the confirming blocks) and then first
    # touch -1 after 2n + (2*n_bc - j) more steps, counted by ballot numbers
    return sum(
        math.comb(j - 1, n_bc - 1) * ballot_number(n, 2 * n_bc - j)
        for j in range(n_bc, 2 * n_bc + 1)
    )


def p_dsa_at_state(spec: AttackSpec, i: int) -> float:
    """Probability the attack first achieves both conditions exactly at state i.

    Zero for i <= 2*n_bc (the attacker needs n_bc+1 + n_bc arrivals at
    minimum). Beyond that, two disjoint path families contribute:

    - confirmation completes at state i itself: the i-th arrival is the
      n_bc-th honest block and the attacker already leads, with mass
      binom(i-1, n_bc-1) * p_h^n_bc * p_a^(i-n_bc); this exists at every
      i > 2*n_bc, odd or even.
    - confirmation completed earlier and the walk first drops below zero at
      state i: ballot-number path counts; parity forces these onto odd i
      only (the walk must travel from a nonnegative height to -1).

    Both terms are evaluated in log space with exact integer coefficients, so
    deep confirmation counts cannot underflow prematurely.
    """
    if i < 1:
        raise DomainError(f"state index must be >= 1, got {i}")
    n_bc = spec.n_bc
    if i <= 2 * n_bc:
        return 0.0
    ln_pa = math.log(spec.p_a)
    ln_ph = math.log(spec.p_h)
    total = math.exp(
        math.log(math.comb(i - 1, n_bc - 1)) + n_bc * ln_ph + (i - n_bc) * ln_pa
    )
    if (i - 2 * n_bc - 1) % 2 == 0:  # odd i, since 2*n_bc is even
        n = (i - 2 * n_bc - 1) // 2
        w = _ballot_coeff(n_bc, n)
        total += math.exp(
            math.log(w) + (n_bc + n + 1) * ln_pa + (n_bc + n) * ln_ph
        )
    return total


def p_dsa(spec: AttackSpec) -> float:
    """Total probability the attack ever achieves, with unlimited time.

    1 when p_a >= 1/2 (the attacker's walk drifts its way). Otherwise the
    closed-form finite sum over the state j at which confirmation completes,
    combining the confirmation mass with the ruin probability of the
    remaining race:

      1 - sum_{j=n_bc}^{2 n_bc} binom(j-1, n_bc-1)
            * (p_h^n_bc p_a^(j-n_bc)  -  p_a^(n_bc+1) p_h^(j-n_bc-1))

    Exact integer binomials, per-term log-space powers, compensated
    summation. Note the outer 1 - (sum close to 1) cancellation makes very
    deep confirmation counts (n_bc in the hundreds) lose absolute accuracy
    ~1e-16; rosenfeld_p_dsa sums positive terms only and is the stable
    alternative in that regime.
    """
    if spec.p_a >= 0.5:
        return 1.0
    n_bc = spec.n_bc
    ln_pa = math.log(spec.p_a)
    ln_ph = math.log(spec.p_h)
    parts = [1.0]
    for j in range(n_bc, 2 * n_bc + 1):
        lc = math.log(math.comb(j - 1, n_bc - 1))
        parts.append(-math.exp(lc + n_bc * ln_ph + (j - n_bc) * ln_pa))
        parts.append(math.exp(lc + (n_bc + 1) * ln_pa + (j - n_bc - 1) * ln_ph))
    return math.fsum(parts)


def rosenfeld_p_dsa(spec: AttackSpec, tol: float = 1e-12,
                    max_terms: int = _SERIES_CAP) -> float:
    """Success probability via the confirmation-race sum (independent route).

    Conditions on k, the number of attacker blocks present when the n_bc-th
    honest block arrives (negative binomial mass binom(n_bc+k-1, k) p_h^n_bc
    p_a^k). For k <= n_bc the attacker trails and wins the remaining race
    with the gambler's-ruin factor (p_a/p_h)^(n_bc-k+1); the k = n_bc+1 term
    carries exponent 0, and from k >= n_bc+2 the attacker is already strictly
    ahead and has won outright.

    The infinite tail is truncated adaptively: term ratios decrease toward
    p_a < 1, so once the next ratio r < 1 the remainder is below
    term * r/(1-r); stops when that bound is under tol * sum.
    """
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if spec.p_a >= 0.5:
        return 1.0
    n_bc = spec.n_bc
    pa = spec.p_a
    ph = spec.p_h
    catch_up = pa / ph
    term = ph ** n_bc  # binom(n_bc-1, 0) p_a^0 p_h^n_bc
    total = term * catch_up ** (n_bc + 1)
    for k in range(1, n_bc + 2):
        term *= (n_bc + k - 1) / k * pa
        total += term * catch_up ** (n_bc - k + 1)
    k = n_bc + 1
    while k < max_terms:
        k += 1
        term *= (n_bc + k - 1) / k * pa
        total += term
        ratio = (n_bc + k) / (k + 1) * pa
        if ratio < 1.0 and term * ratio / (1.0 - ratio) <= tol * total:
            return total
    raise ConvergenceError(
        f"confirmation-race sum did not converge within {max_terms} terms", total
    )


def premine_success_prob(spec: AttackSpec) -> float:
    """Success probability under the stricter pre-mining rule.

    The attacker must not merely overtake but lead by n_bc + 1 blocks, a
    pure gambler's-ruin event with probability (p_a/p_h)^(n_bc+1); certain
    when p_a >= 1/2. Always strictly below p_dsa for p_a < 1/2.
    """
    if spec.p_a >= 0.5:
        return 1.0
    return (spec.p_a / spec.p_h) ** (spec.n_bc + 1)
