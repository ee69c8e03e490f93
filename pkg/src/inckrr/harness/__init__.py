from .data import Dataset, ingest, synthesize
from .report import report, summary
from .stream import RoundReport, StreamPlan, StreamResult, max_deviation, run_stream

__all__ = [
    "Dataset",
    "RoundReport",
    "StreamPlan",
    "StreamResult",
    "ingest",
    "max_deviation",
    "report",
    "run_stream",
    "summary",
    "synthesize",
]
