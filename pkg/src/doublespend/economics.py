"""Cost, reward and profitability of an attack campaign.

Operating expense and mining reward are linear in attack duration in the
base model (cost gamma and reward beta per expected block), with optional
growth factors for generalized cost curves. Closed-form expectations exist
only for the linear model; nonlinear models are evaluated pointwise here and
in expectation by the Monte Carlo module.

All currency quantities are unit-agnostic: outputs carry whatever unit
gamma, beta and the transaction value were supplied in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, UnsupportedAnalyticError
from .timing import attack_success_prob, expected_success_time, expected_success_time_inf
from .walk import AttackSpec

GrowthPairs = tuple[tuple[float, float], tuple[float, float]]

#: Returned by required_value when no finite transaction value can make the
#: attack profitable (inferior attacker refusing to ever give up). A typed
#: float outcome rather than an exception so tables can render it inline and
#: expressions like expected_profit = p_as * (value - required) stay ordered.
INFINITE_REQUIREMENT = math.inf


@dataclass(frozen=True)
class EconomicModel:
    """Cost/reward parameters of the attacker.

    gamma          cost per block-mining effort, currency/block
    beta           block reward, currency/block
    value          the fraudulent transaction's value (currency); only the
                   profit operations read it
    cost_growth    optional ((x1, x2), (x3, x4)), each base and argument > 1;
                   omitted or with x1 == x2 and x3 == x4 the cost is linear
    reward_growth  same shape for the reward side
    """

    gamma: float
    beta: float
    value: float = 0.0
    cost_growth: GrowthPairs | None = None
    reward_growth: GrowthPairs | None = None

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if not self.beta > 0.0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if self.value < 0.0:
            raise DomainError(f"transaction value must be nonnegative, got {self.value}")
        for label, pairs in (("cost_growth", self.cost_growth),
                             ("reward_growth", self.reward_growth)):
            if pairs is None:
                continue
            for base, arg in pairs:
                if not (base > 1.0 and arg > 1.0):
                    raise DomainError(
                        f"{label} constants must all exceed 1, got ({base}, {arg})"
                    )

    @property
    def mu(self) -> float:
        """Reward-to-cost ratio beta/gamma; above 1, honest mining pays."""
        return self.beta / self.gamma

    @property
    def linear_cost(self) -> bool:
        if self.cost_growth is None:
            return True
        (x1, x2), (x3, x4) = self.cost_growth
        return x1 == x2 and x3 == x4

    @property
    def linear_reward(self) -> bool:
        if self.reward_growth is None:
            return True
        (r1, r2), (r3, r4) = self.reward_growth
        return r1 == r2 and r3 == r4


def _growth_factor(pairs: GrowthPairs | None, lambda_a: float, t: float) -> float:
    if pairs is None:
        return 1.0
    (b1, a1), (b2, a2) = pairs
    return (math.log(a1) / math.log(b1)) ** lambda_a * (math.log(a2) / math.log(b2)) ** t


def opex(model: EconomicModel, lambda_a: float, t: float) -> float:
    """Operating expense of attacking for t seconds at block rate lambda_a.

    gamma * lambda_a * t scaled by the cost growth factors (both exactly 1
    in the linear model).
    """
    if lambda_a < 0.0 or t < 0.0:
        raise DomainError("rate and time must be nonnegative")
    return model.gamma * lambda_a * t * _growth_factor(model.cost_growth, lambda_a, t)


def reward(model: EconomicModel, lambda_a: float, t: float) -> float:
    """Mining reward earned over t seconds, the beta-side mirror of opex."""
    if lambda_a < 0.0 or t < 0.0:
        raise DomainError("rate and time must be nonnegative")
    return model.beta * lambda_a * t * _growth_factor(model.reward_growth, lambda_a, t)


def _require_linear(model: EconomicModel, need_reward: bool) -> None:
    if not model.linear_cost or (need_reward and not model.linear_reward):
        raise UnsupportedAnalyticError(
            "closed forms exist only for linear cost/reward; "
            "use the Monte Carlo estimator for growth models"
        )


def expected_opex(model: EconomicModel, spec: AttackSpec, tol: float = 1e-12) -> float:
    """Expected OPEX of one attempt: pay until success or until giving up.

    p_as * gamma * lambda_a * e_tas + (1 - p_as) * gamma * lambda_a * t_cut.
    With no deadline this is finite only for a superior attacker (success is
    certain); an inferior attacker who never gives up pays without bound, so
    the expectation is returned as inf.
    """
    _require_linear(model, need_reward=False)
    rate_cost = model.gamma * spec.lambda_a
    if spec.infinite_cut:
        if spec.p_a >= 0.5:
            return rate_cost * expected_success_time_inf(spec)
        return math.inf
    p_as = attack_success_prob(spec, tol)
    give_up = (1.0 - p_as) * rate_cost * spec.t_cut
    if p_as <= 0.0:
        return give_up
    return p_as * rate_cost * expected_success_time(spec, tol) + give_up


def expected_profit(model: EconomicModel, spec: AttackSpec, tol: float = 1e-12) -> float:
    """Expected profit of one attempt at the model's transaction value.

    p_as * (value + beta * lambda_a * e_tas) - expected opex. Positive iff
    the attack is profitable; affine in the value with slope p_as and root
    at required_value.
    """
    _require_linear(model, need_reward=True)
    e_x = expected_opex(model, spec, tol)
    if spec.infinite_cut:
        if spec.p_a >= 0.5:
            gain = model.value + model.beta * spec.lambda_a * expected_success_time_inf(spec)
            return gain - e_x
        return -math.inf
    p_as = attack_success_prob(spec, tol)
    if p_as <= 0.0:
        return -e_x
    gain = model.value + model.beta * spec.lambda_a * expected_success_time(spec, tol)
    return p_as * gain - e_x


def required_value(model: EconomicModel, spec: AttackSpec, tol: float = 1e-12) -> float:
    """Smallest transaction value making the expected profit positive.

    Finite cut:  (1 - p_as)/p_as * gamma * lambda_a * t_cut
                 - (mu - 1) * gamma * lambda_a * e_tas.
    No deadline, superior attacker: the first term vanishes (success is
    certain), leaving -(mu - 1) * gamma * lambda_a * e_tas — negative
    whenever mining is profitable (mu > 1), i.e. profitable at any value.
    With mu < 1 the same formula yields a positive requirement (the attack
    must recoup unprofitable mining) and is applied as stated.
    No deadline, inferior attacker: the requirement grows without bound;
    returns INFINITE_REQUIREMENT.
    """
    _require_linear(model, need_reward=True)
    rate_cost = model.gamma * spec.lambda_a
    if spec.infinite_cut:
        if spec.p_a >= 0.5:
            # p_a = 1/2 raises the singularity from the mean success time
            return -(model.mu - 1.0) * rate_cost * expected_success_time_inf(spec)
        return INFINITE_REQUIREMENT
    p_as = attack_success_prob(spec, tol)
    if p_as <= 0.0:
        raise DomainError(
            "success probability is zero at this cut-time; "
            "no finite value makes the attack profitable"
        )
    e_tas = expected_success_time(spec, tol)
    return (1.0 - p_as) / p_as * rate_cost * spec.t_cut \
        - (model.mu - 1.0) * rate_cost * e_tas


def repeated_attack_projection(model: EconomicModel, spec: AttackSpec, n: int,
                               tol: float = 1e-12) -> dict[str, float]:
    """Long-run projection over n independent attempts.

    expected_runtime_per_attempt: p_as * e_tas + (1 - p_as) * t_cut
    expected_net_profit:          n * p_as * (value - required_value)
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise DomainError(f"attack count must be a nonnegative integer, got {n!r}")
    _require_linear(model, need_reward=True)
    if spec.infinite_cut:
        if spec.p_a >= 0.5:
            runtime = expected_success_time_inf(spec)
        else:
            runtime = math.inf
    else:
        p_as = attack_success_prob(spec, tol)
        if p_as <= 0.0:
            runtime = spec.t_cut
        else:
            runtime = p_as * expected_success_time(spec, tol) \
                + (1.0 - p_as) * spec.t_cut
    if n == 0:
        net = 0.0
    else:
        c_req = required_value(model, spec, tol)
        p_as_n = attack_success_prob(spec, tol)
        net = n * p_as_n * (model.value - c_req)
    return {
        "expected_runtime_per_attempt": runtime,
        "expected_net_profit": net,
    }
