"""Seeded Monte Carlo trial engine: an independent check on every closed form.

Each trial consumes exactly three uniforms in a fixed order (joint latent
draw, policy decision draw, post-rejection solve draw), so the scalar
`sample_trial` and the vectorized `estimate_accuracy` walk the same random
stream and produce identical outcomes for the same seed.  Shards own disjoint
substreams derived deterministically from (seed, shard index), making every
estimate a pure function of (scenario, n_trials, seed, shards).
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np

from .model import (
    FIXED_RATE,
    Indiscriminate,
    OUTCOME_CELLS,
    RoutineAccept,
    RoutineIgnore,
    Scenario,
    SelfGated,
    conditional_user_rates,
    joint_success_probability,
)

# Uniforms consumed per trial, in fixed order.
DRAWS_PER_TRIAL = 3
# Trials simulated per vectorized batch; bounds peak memory.
_BATCH = 1_000_000

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


def shard_rng(seed: int, shard: int) -> np.random.Generator:
    """Deterministic substream for one shard.

    The 64-bit seed (taken modulo 2**64) is fed to numpy's SeedSequence as
    entropy with the shard index as spawn key; SeedSequence's documented
    hash mixing keeps substreams decorrelated.
    """
    entropy = int(seed) % (1 << 64)
    return np.random.default_rng(np.random.SeedSequence(entropy=entropy, spawn_key=(shard,)))


@dataclass(frozen=True)
class TrialOutcome:
    """One sampled trial of the decision process."""

    advice_correct: bool
    user_would_be_correct: bool
    attended: bool
    accepted_or_used: bool
    final_correct: bool


@dataclass(frozen=True)
class SimEstimate:
    """Monte Carlo estimate of aided accuracy with its outcome counts.

    Attributes:
        p_hat: fraction of trials with a correct final answer.
        std_err: binomial standard error sqrt(p_hat * (1 - p_hat) / n).
        ci95: normal-approximation 95% interval, clipped to [0, 1].
        outcome_counts: trial counts per (advice_correct, accepted_or_used,
            final_correct) cell; they sum to n_trials.
        advice_correct_count / user_correct_count / either_correct_count:
            latent marginals, kept for cross-checks against the configured
            hit rates and the combined-accuracy ceiling.
    """

    p_hat: float
    n_trials: int
    std_err: float
    ci95: tuple[float, float]
    seed: int
    n_shards: int
    outcome_counts: dict[tuple[bool, bool, bool], int]
    advice_correct_count: int
    user_correct_count: int
    either_correct_count: int

    def __post_init__(self):
        if set(self.outcome_counts) != set(OUTCOME_CELLS):
            raise ValueError("outcome_counts must cover exactly the 8 canonical cells")
        total = sum(self.outcome_counts.values())
        if total != self.n_trials:
            raise ValueError(f"outcome_counts sum to {total}, expected {self.n_trials}")
        expected_se = math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.n_trials)
        if abs(self.std_err - expected_se) > 1e-9:
            raise ValueError("std_err inconsistent with p_hat and n_trials")

    def to_dict(self) -> dict[str, Any]:
        return {
            "p_hat": self.p_hat,
            "n_trials": self.n_trials,
            "std_err": self.std_err,
            "ci95": list(self.ci95),
            "seed": self.seed,
            "n_shards": self.n_shards,
            "outcome_counts": [
                {
                    "advice_correct": advice,
                    "accepted_or_used": accepted,
                    "final_correct": final,
                    "count": self.outcome_counts[(advice, accepted, final)],
                }
                for advice, accepted, final in OUTCOME_CELLS
            ],
            "advice_correct_count": self.advice_correct_count,
            "user_correct_count": self.user_correct_count,
            "either_correct_count": self.either_correct_count,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SimEstimate":
        counts = {
            (row["advice_correct"], row["accepted_or_used"], row["final_correct"]): row[
                "count"
            ]
            for row in data["outcome_counts"]
        }
        return cls(
            p_hat=data["p_hat"],
            n_trials=data["n_trials"],
            std_err=data["std_err"],
            ci95=(data["ci95"][0], data["ci95"][1]),
            seed=data["seed"],
            n_shards=data["n_shards"],
            outcome_counts=counts,
            advice_correct_count=data["advice_correct_count"],
            user_correct_count=data["user_correct_count"],
            either_correct_count=data["either_correct_count"],
        )


def _joint_cell_cuts(scenario: Scenario) -> tuple[float, float, float]:
    """Cumulative cuts for the four-cell joint latent draw.

    u < p11 -> both correct; u < p_a -> advice only; u < p_a + p01 -> user
    only; otherwise neither.
    """
    p_a = scenario.aid.p_advice_correct
    p_u = scenario.user.p_unaided_correct
    p11 = joint_success_probability(scenario.aid, scenario.user, scenario.dependency)
    p01 = max(0.0, p_u - p11)
    return p11, p_a, p_a + p01


def _post_reject_rates(scenario: Scenario) -> tuple[float, float]:
    if scenario.effective_degradation_mode == FIXED_RATE:
        r = scenario.user.p_post_reject_correct
        return r, r
    return conditional_user_rates(scenario)


def sample_trial(scenario: Scenario, rng: np.random.Generator) -> TrialOutcome:
    """Draw one trial, consuming exactly DRAWS_PER_TRIAL uniforms from rng."""
    u1, u2, u3 = rng.random(DRAWS_PER_TRIAL)
    c_both, c_advice, c_user = _joint_cell_cuts(scenario)
    advice = bool(u1 < c_advice)
    user = bool(u1 < c_both or (c_advice <= u1 < c_user))

    policy = scenario.policy
    if isinstance(policy, RoutineAccept):
        return TrialOutcome(advice, user, False, True, advice)
    if isinstance(policy, RoutineIgnore):
        return TrialOutcome(advice, user, False, False, user)
    if isinstance(policy, SelfGated):
        use_threshold = (1.0 - policy.p_ignore_given_user_correct) if user else policy.p_use_given_user_wrong
        used = bool(u2 < use_threshold)
        return TrialOutcome(advice, user, False, used, advice if used else user)

    if isinstance(policy, Indiscriminate):
        ac = aw = policy.p_accept
    else:
        ac, aw = policy.p_accept_given_correct, policy.p_accept_given_wrong
    accepted = bool(u2 < (ac if advice else aw))
    if accepted:
        return TrialOutcome(advice, user, True, True, advice)
    u_c, u_w = _post_reject_rates(scenario)
    final = bool(u3 < (u_c if advice else u_w))
    return TrialOutcome(advice, user, True, False, final)


def _simulate_batch(
    scenario: Scenario, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, int, int, int]:
    """Vectorized batch of n trials; returns (8-cell counts, marginal counts)."""
    u = rng.random((n, DRAWS_PER_TRIAL))
    u1, u2, u3 = u[:, 0], u[:, 1], u[:, 2]
    c_both, c_advice, c_user = _joint_cell_cuts(scenario)
    advice = u1 < c_advice
    user = (u1 < c_both) | ((u1 >= c_advice) & (u1 < c_user))

    policy = scenario.policy
    if isinstance(policy, RoutineAccept):
        accepted = np.ones(n, dtype=bool)
        final = advice
    elif isinstance(policy, RoutineIgnore):
        accepted = np.zeros(n, dtype=bool)
        final = user
    elif isinstance(policy, SelfGated):
        use_threshold = np.where(
            user, 1.0 - policy.p_ignore_given_user_correct, policy.p_use_given_user_wrong
        )
        accepted = u2 < use_threshold
        final = np.where(accepted, advice, user)
    else:
        if isinstance(policy, Indiscriminate):
            ac = aw = policy.p_accept
        else:
            ac, aw = policy.p_accept_given_correct, policy.p_accept_given_wrong
        accepted = u2 < np.where(advice, ac, aw)
        u_c, u_w = _post_reject_rates(scenario)
        solved_alone = u3 < np.where(advice, u_c, u_w)
        final = np.where(accepted, advice, solved_alone)

    cell_index = advice.astype(np.int64) * 4 + accepted.astype(np.int64) * 2 + final.astype(np.int64)
    counts = np.bincount(cell_index, minlength=8)
    return (
        counts,
        int(advice.sum()),
        int(user.sum()),
        int((advice | user).sum()),
    )


def estimate_accuracy(
    scenario: Scenario, n_trials: int, seed: int, shards: int = 1
) -> SimEstimate:
    """Aggregate n_trials Monte Carlo samples into a SimEstimate.

    Deterministic for fixed (scenario, n_trials, seed, shards); trials are
    spread across shards as evenly as possible, remainder to the lowest
    shard indices.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if shards < 1:
        raise ValueError("shards must be >= 1")

    counts = np.zeros(8, dtype=np.int64)
    n_advice = n_user = n_either = 0
    base, remainder = divmod(n_trials, shards)
    for shard in range(shards):
        shard_n = base + (1 if shard < remainder else 0)
        if shard_n == 0:
            continue
        rng = shard_rng(seed, shard)
        done = 0
        while done < shard_n:
            batch = min(_BATCH, shard_n - done)
            c, a, uu, e = _simulate_batch(scenario, batch, rng)
            counts += c
            n_advice += a
            n_user += uu
            n_either += e
            done += batch

    n_correct = int(counts[1::2].sum())  # odd cell indices have final_correct = True
    p_hat = n_correct / n_trials
    std_err = math.sqrt(p_hat * (1.0 - p_hat) / n_trials)
    ci95 = (max(0.0, p_hat - _Z95 * std_err), min(1.0, p_hat + _Z95 * std_err))
    outcome_counts = {
        (bool(idx & 4), bool(idx & 2), bool(idx & 1)): int(counts[idx]) for idx in range(8)
    }
    return SimEstimate(
        p_hat=p_hat,
        n_trials=n_trials,
        std_err=std_err,
        ci95=ci95,
        seed=int(seed),
        n_shards=shards,
        outcome_counts=outcome_counts,
        advice_correct_count=n_advice,
        user_correct_count=n_user,
        either_correct_count=n_either,
    )
