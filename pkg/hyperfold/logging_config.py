"""
Structured logging configuration for the hyperfold package.
Call setup_logging() once at startup (main.py or the CLI entry point).
"""

import logging
import sys

_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"


def setup_logging(verbose: bool = False):
    """Configure structured logging to stdout for the 'hyperfold' namespace."""
    root = logging.getLogger("hyperfold")
    root.setLevel(logging.DEBUG if verbose else logging.INFO)

    # Repeated CLI invocations in one process must not stack handlers
    if any(getattr(h, "_hyperfold", False) for h in root.handlers):
        return

    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter(_FORMAT))
    handler._hyperfold = True
    root.addHandler(handler)
