"""Python bindings for the humor toolkit."""

from humor._core import (
    DataError,
    HumorError,
    NGramModel,
    UsageError,
    clean_text,
    evaluation_report,
    run_cli,
    score_token,
    split_setup_punchline,
    tokenize,
)

__all__ = [
    "DataError",
    "HumorError",
    "NGramModel",
    "UsageError",
    "clean_text",
    "evaluation_report",
    "run_cli",
    "score_token",
    "split_setup_punchline",
    "tokenize",
]
