"""Retry policy: exponential backoff with jitter."""

import random
from dataclasses import dataclass

from .task import TaskOutcome


@dataclass(frozen=True)
class RetryPolicy:
    max_retries: int = 0
    base_delay_ms: float = 200.0
    factor: float = 2.0
    jitter: float = 0.1

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class RetryDecision:
    action: str                 # "retry" | "fail"
    delay_ms: float = 0.0


def apply_retry_policy(outcome: TaskOutcome, policy: RetryPolicy, attempt: int,
                       rng: random.Random = None) -> RetryDecision:
    """Decide what to do with a failed attempt.

    Attempt numbers are 1-based; a task may run at most max_retries + 1
    times.  Delay is base * factor^(attempt-1) with +-jitter applied.
    """
    if outcome.status != "Failed":
        raise ValueError("retry policy applies to Failed outcomes only")
    if attempt > policy.max_retries:
        return RetryDecision(action="fail")
    delay = policy.base_delay_ms * (policy.factor ** (attempt - 1))
    if policy.jitter and rng is not None:
        delay *= 1.0 + rng.uniform(-policy.jitter, policy.jitter)
    elif policy.jitter:
        delay *= 1.0 + random.uniform(-policy.jitter, policy.jitter)
    return RetryDecision(action="retry", delay_ms=delay)
