"""Independent validation: process-level simulation and exact enumeration.

The simulation draws the merged block-arrival process directly (exponential
inter-arrival gaps at the total rate, each arrival attributed to the
attacker with probability p_a) and replays the walk until the attack
achieves or the cut-time passes. It shares no code with the analytic modules
beyond the AttackSpec type, which is what makes it an oracle.

Reproducibility contract: trial k of a run seeded with master_seed draws
from a counter-based stream keyed (master_seed, k), so results are
bit-identical for identical (spec, trials, master_seed) regardless of
execution order, and trials could be farmed out concurrently without
reordering randomness. Aggregation is commutative sums only.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Callable, Iterable

import numpy as np

from .economics import EconomicModel, opex, reward
from .errors import CostGuardError, DomainError
from .walk import AttackSpec

_EVENT_CAP_DEFAULT = 10_000_000
_CHUNK = 48
_ENUM_MAX_STATES = 24


@dataclass(frozen=True)
class TrialOutcome:
    """One simulated attempt.

    t_dsa is the achieving time in seconds on success and None otherwise;
    truncated marks an unbounded-cut trial stopped by the event cap, which
    is neither a success nor a failure and is counted separately.
    """

    success: bool
    t_dsa: float | None
    blocks_a: int
    blocks_h: int
    truncated: bool = False


@dataclass(frozen=True)
class SimulationSummary:
    """Aggregates of an estimation run.

    mean_tas / var_tas are the sample mean and (ddof=1) variance of the
    achieving time over successful trials (NaN when there are none, or when
    fewer than two for the variance); se_p_as and se_tas are standard errors
    computed from observed counts and moments only. mean_profit is filled by
    estimate_profit and None otherwise. truncated_trials counts event-cap
    stops, excluded from every other aggregate.
    """

    trials: int
    successes: int
    p_as_hat: float
    mean_tas: float
    var_tas: float
    se_p_as: float
    se_tas: float
    seed: int
    mean_profit: float | None = None
    truncated_trials: int = 0


def _check_seed(seed: int) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return seed


def _cut_value(spec: AttackSpec) -> float:
    return math.inf if spec.infinite_cut else spec.t_cut


def simulate_one(spec: AttackSpec, stream_seed: int | tuple[int, int],
                 event_cap: int | None = None,
                 independent_clocks: bool = False) -> TrialOutcome:
    """Run a single attempt on the stream keyed by stream_seed.

    stream_seed is one 64-bit integer s, shorthand for the pair (s, 0), or
    a (master_seed, trial_index) pair used verbatim as the two-word Philox
    key. The attempt succeeds at the first
    arrival where the honest chain has at least n_bc blocks and the attacker
    chain is strictly longer, provided that arrival lands before the
    cut-time; it fails when the cut-time passes first; with an unbounded cut
    it is cut off (truncated) after event_cap arrivals.

    An unbounded cut with p_a < 0.5 requires an explicit event_cap: such a
    walk fails with positive probability only by running forever, so a trial
    without a cap could never report failure.
    """
    if event_cap is None:
        if spec.infinite_cut and spec.p_a < 0.5:
            raise DomainError(
                "unbounded cut-time with attacker share below one half needs "
                "an explicit event_cap: failing trials never terminate"
            )
        event_cap = _EVENT_CAP_DEFAULT
    elif event_cap < 1:
        raise DomainError(f"event cap must be positive, got {event_cap}")
    if isinstance(stream_seed, tuple):
        key = tuple(_check_seed(word) for word in stream_seed)
        if len(key) != 2:
            raise DomainError(
                f"stream key must hold two 64-bit words, got {len(key)}"
            )
    else:
        key = (_check_seed(stream_seed), 0)
    # explicit dtype: a plain tuple is cast through float64 and mangles
    # seeds above 2**53
    key = np.array(key, dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    if independent_clocks:
        return _simulate_two_clocks(spec, rng, event_cap)
    return _simulate_merged(spec, rng, event_cap)


def _simulate_merged(spec: AttackSpec, rng: np.random.Generator,
                     event_cap: int) -> TrialOutcome:
    # merged process: gaps ~ Exp(lambda_t), attacker attribution ~ Bernoulli(p_a)
    n_bc = spec.n_bc
    p_a = spec.p_a
    inv_rate = 1.0 / spec.lambda_t
    t_cut = _cut_value(spec)
    t_base = 0.0
    a_base = 0
    events = 0
    offsets = np.arange(1, _CHUNK + 1)
    while events < event_cap:
        k = min(_CHUNK, event_cap - events)
        gaps = rng.standard_exponential(k) * inv_rate
        attacker = rng.random(k) < p_a
        times = t_base + np.cumsum(gaps)
        a_cum = a_base + np.cumsum(attacker)
        idx = offsets[:k] + events
        h_cum = idx - a_cum
        achieved = (h_cum >= n_bc) & (a_cum > h_cum)
        cut_at = int(np.searchsorted(times, t_cut, side="left"))
        if achieved.any():
            hit = int(np.argmax(achieved))
            if hit < cut_at:
                return TrialOutcome(
                    success=True,
                    t_dsa=float(times[hit]),
                    blocks_a=int(a_cum[hit]),
                    blocks_h=int(h_cum[hit]),
                )
        if cut_at < k:
            last = cut_at - 1
            blocks_a = int(a_cum[last]) if last >= 0 else a_base
            blocks_h = int(idx[last] - a_cum[last]) if last >= 0 else events - a_base
            return TrialOutcome(success=False, t_dsa=None,
                                blocks_a=blocks_a, blocks_h=blocks_h)
        events += k
        t_base = float(times[-1])
        a_base = int(a_cum[-1])
    return TrialOutcome(success=False, t_dsa=None,
                        blocks_a=a_base, blocks_h=events - a_base,
                        truncated=True)


def _simulate_two_clocks(spec: AttackSpec, rng: np.random.Generator,
                         event_cap: int) -> TrialOutcome:
    # self-check variant: two independent exponential clocks racing, no
    # attribution draw; statistically identical to the merged process
    n_bc = spec.n_bc
    t_cut = _cut_value(spec)
    scale_a = 1.0 / spec.lambda_a
    scale_h = 1.0 / spec.lambda_h
    next_a = rng.standard_exponential() * scale_a
    next_h = rng.standard_exponential() * scale_h
    blocks_a = 0
    blocks_h = 0
    for _ in range(event_cap):
        now = min(next_a, next_h)
        if now >= t_cut:
            return TrialOutcome(success=False, t_dsa=None,
                                blocks_a=blocks_a, blocks_h=blocks_h)
        if next_a < next_h:
            blocks_a += 1
            next_a = now + rng.standard_exponential() * scale_a
        else:
            blocks_h += 1
            next_h = now + rng.standard_exponential() * scale_h
        if blocks_h >= n_bc and blocks_a > blocks_h:
            return TrialOutcome(success=True, t_dsa=float(now),
                                blocks_a=blocks_a, blocks_h=blocks_h)
    return TrialOutcome(success=False, t_dsa=None, blocks_a=blocks_a,
                        blocks_h=blocks_h, truncated=True)


def _aggregate(outcomes: Iterable[TrialOutcome], trials: int, master_seed: int,
               profit_of: Callable[[TrialOutcome], float] | None = None,
               trace_to: IO[str] | None = None) -> SimulationSummary:
    writer = None
    if trace_to is not None:
        writer = csv.writer(trace_to)
        writer.writerow(["trial", "success", "t_dsa", "blocks_a", "blocks_h"])
    successes = 0
    truncated = 0
    sum_t = 0.0
    sum_t2 = 0.0
    sum_profit = 0.0
    counted = 0
    for k, out in enumerate(outcomes):
        if writer is not None:
            writer.writerow([
                k, int(out.success),
                "" if out.t_dsa is None else repr(out.t_dsa),
                out.blocks_a, out.blocks_h,
            ])
        if out.truncated:
            truncated += 1
            continue
        counted += 1
        if out.success:
            successes += 1
            sum_t += out.t_dsa
            sum_t2 += out.t_dsa * out.t_dsa
        if profit_of is not None:
            sum_profit += profit_of(out)
    p_hat = successes / counted if counted else math.nan
    if successes > 0:
        mean_t = sum_t / successes
        var_t = (
            (sum_t2 - successes * mean_t * mean_t) / (successes - 1)
            if successes > 1 else math.nan
        )
    else:
        mean_t = math.nan
        var_t = math.nan
    se_p = math.sqrt(p_hat * (1.0 - p_hat) / counted) if counted else math.nan
    se_t = (
        math.sqrt(var_t / successes)
        if successes > 1 and var_t == var_t else math.nan
    )
    return SimulationSummary(
        trials=trials,
        successes=successes,
        p_as_hat=p_hat,
        mean_tas=mean_t,
        var_tas=var_t,
        se_p_as=se_p,
        se_tas=se_t,
        seed=master_seed,
        mean_profit=(sum_profit / counted if profit_of is not None and counted else None),
        truncated_trials=truncated,
    )


def estimate(spec: AttackSpec, trials: int, master_seed: int,
             event_cap: int | None = None,
             independent_clocks: bool = False,
             trace_to: IO[str] | None = None) -> SimulationSummary:
    """Estimate the success probability and success-time moments.

    Runs `trials` attempts on streams keyed (master_seed, 0..trials-1) and
    aggregates in fixed trial order. Optional trace_to receives one CSV row
    per trial.
    """
    if trials < 1:
        raise DomainError(f"trial count must be positive, got {trials}")
    _check_seed(master_seed)
    outcomes = (
        simulate_one(spec, (master_seed, k), event_cap, independent_clocks)
        for k in range(trials)
    )
    return _aggregate(outcomes, trials, master_seed, trace_to=trace_to)


def estimate_profit(model: EconomicModel, spec: AttackSpec, trials: int,
                    master_seed: int, event_cap: int | None = None,
                    trace_to: IO[str] | None = None) -> SimulationSummary:
    """Estimate like `estimate`, adding the per-trial profit mean.

    Profit of a successful trial is value + reward(t_dsa) - opex(t_dsa); a
    failed trial pays -opex(t_cut). Cost and reward growth models are
    evaluated pointwise, so nonlinear models are fully supported here.
    """
    if spec.infinite_cut:
        raise DomainError(
            "profit estimation needs a finite cut-time: a failed unbounded "
            "attempt has unbounded cost"
        )
    if trials < 1:
        raise DomainError(f"trial count must be positive, got {trials}")
    _check_seed(master_seed)
    lam_a = spec.lambda_a

    def profit_of(out: TrialOutcome) -> float:
        if out.success:
            return model.value + reward(model, lam_a, out.t_dsa) \
                - opex(model, lam_a, out.t_dsa)
        return -opex(model, lam_a, spec.t_cut)

    outcomes = (
        simulate_one(spec, (master_seed, k), event_cap) for k in range(trials)
    )
    return _aggregate(outcomes, trials, master_seed,
                      profit_of=profit_of, trace_to=trace_to)


def enumerate_exact(spec: AttackSpec, i_max: int) -> list[float]:
    """Exact first-achievement mass at every state i = 1..i_max.

    Walks the full binary tree of arrival attributions as a dynamic program
    over (walk height, honest count) with exact integer path counts, weighing
    each first-achieving path by p_h^(honest) * p_a^(attacker) in exact
    rational arithmetic before a single final rounding to float. Element
    k of the result is the mass for state i = k + 1.

    Refuses i_max beyond 24: the implied path space doubles per state and
    this is a verification oracle, not a production path.
    """
    if i_max < 1:
        raise DomainError(f"i_max must be positive, got {i_max}")
    if i_max > _ENUM_MAX_STATES:
        raise CostGuardError(
            f"exact enumeration is limited to {_ENUM_MAX_STATES} states, "
            f"got {i_max}"
        )
    p_a = Fraction(spec.p_a)
    p_h = 1 - p_a
    n_bc = spec.n_bc
    # survivors: (height s, honest count h) -> number of length-k paths that
    # never achieved; achieving extensions leave the survivor set immediately
    survivors: dict[tuple[int, int], int] = {(0, 0): 1}
    result: list[float] = []
    for step in range(1, i_max + 1):
        nxt: dict[tuple[int, int], int] = {}
        achieved_mass = Fraction(0)
        for (s, h), count in survivors.items():
            for delta, dh in ((1, 1), (-1, 0)):
                s2, h2 = s + delta, h + dh
                if h2 >= n_bc and s2 < 0:
                    achieved_mass += count * p_h ** h2 * p_a ** (step - h2)
                else:
                    key = (s2, h2)
                    nxt[key] = nxt.get(key, 0) + count
        result.append(float(achieved_mass))
        survivors = nxt
    return result
