"""Citation-network analytics: disruption, windowed citations and cohort statistics."""
__version__ = "0.1.0"

from .graph import CitationGraph, TimeWindow, DEFAULT_WINDOW  # noqa: E402
from .ingest import IngestReport, load_corpus, validate_corpus  # noqa: E402
from .metrics import MetricFilters, MetricTable, compute_metric_table  # noqa: E402

__all__ = [
    "CitationGraph", "TimeWindow", "DEFAULT_WINDOW", "IngestReport", "load_corpus",
    "validate_corpus", "MetricFilters", "MetricTable", "compute_metric_table", "__version__",
]
