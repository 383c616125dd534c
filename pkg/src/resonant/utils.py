"""Small shared helpers."""

from __future__ import annotations

import os


def worker_count(n_tasks: int | None = None) -> int:
    """Worker processes to use: RESONANT_THREADS env var, default logical cores."""
    raw = os.environ.get("RESONANT_THREADS", "").strip()
    if raw:
        n = max(1, int(raw))
    else:
        n = os.cpu_count() or 1
    if n_tasks is not None:
        n = min(n, max(1, n_tasks))
    return n
