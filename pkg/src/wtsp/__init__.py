"""Node weight dependent TSP toolkit."""

from .core import (
    CapExceededError,
    CostReport,
    Instance,
    NotMetricError,
    Tour,
    ValidationError,
    WtspError,
    cost_report,
    latency_cost,
    normalize_tour,
    prefix_weights,
    reverse_tour,
    tsp_cost,
    tsp_path_cost,
    weighted_cost,
)

__version__ = "0.1.0"
