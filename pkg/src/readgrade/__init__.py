"""Grade-band readability classification and corpus tooling."""

from .errors import ProviderError, ReadGradeError, ValidationError
from .integration import IntegrationResult, MetricGroup, integrate
from .metrics import BandMappingConfig, GradeBand, MetricId, MetricReport, score_all
from .textstats import TextStats, WordLists, compute_text_stats, count_syllables, segment_sentences

__version__ = "0.1.0"

__all__ = [
    "BandMappingConfig",
    "GradeBand",
    "IntegrationResult",
    "MetricGroup",
    "MetricId",
    "MetricReport",
    "ProviderError",
    "ReadGradeError",
    "TextStats",
    "ValidationError",
    "WordLists",
    "compute_text_stats",
    "count_syllables",
    "integrate",
    "score_all",
    "segment_sentences",
    "__version__",
]
