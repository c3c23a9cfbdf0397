"""Thread-count plumbing shared by the FFT and pairwise kernels."""

import os


def thread_limit() -> int | None:
    raw = os.environ.get("MORAWETZ_THREADS")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"MORAWETZ_THREADS must be an integer, got {raw!r}") from None
    return max(1, value)


def fft_workers() -> int:
    limit = thread_limit()
    return limit if limit is not None else (os.cpu_count() or 1)
