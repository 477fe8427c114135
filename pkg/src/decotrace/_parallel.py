"""Order-preserving fan-out capped by the DECOTRACE_THREADS variable."""

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigurationError

ENV_VAR = "DECOTRACE_THREADS"


def worker_count():
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigurationError(f"{ENV_VAR} must be >= 1, got {n}")
    return n


def ordered_map(fn, items):
    """``list(map(fn, items))``, possibly on worker threads; order is kept."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
