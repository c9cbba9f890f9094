from .task import TERMINAL_STATES, TaskInstance, TaskOutcome, TaskState, render_tag
from .cache import CacheEntry, CacheStore, cache_key, contract_cache_key, task_workdir
from .retry import RetryDecision, RetryPolicy, apply_retry_policy
from .resources import ProcessMonitor, ResourceSample, sample_resources
from .execute import TaskContext, execute_task
from .runner import RunOptions, RunResult, default_workdir, run_workflow

__all__ = [
    "TERMINAL_STATES", "TaskInstance", "TaskOutcome", "TaskState", "render_tag",
    "CacheEntry", "CacheStore", "cache_key", "contract_cache_key", "task_workdir",
    "RetryDecision", "RetryPolicy", "apply_retry_policy",
    "ProcessMonitor", "ResourceSample", "sample_resources",
    "TaskContext", "execute_task",
    "RunOptions", "RunResult", "default_workdir", "run_workflow",
]
