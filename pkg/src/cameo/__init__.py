"""cameo: co-design workflow engine for energy-system design sweeps.

Declarative parameter-sweep workflows expand into parallel task graphs
with content-addressed caching, resume, retries and per-task provenance.
Ships a battery-sizing use case end to end: synthetic data generation,
scenario sets and scenario trees, two stochastic sizing formulations, and
consolidated reporting.
"""

__version__ = "0.1.0"

from .builtins import default_registry
from .registry import ComponentContract, OperationRegistry

__all__ = ["__version__", "default_registry", "ComponentContract", "OperationRegistry"]
