"""Shared record of acceptance-criterion outcomes for the terminal summary."""
import functools
import time

RESULTS: dict[int, tuple[str, str, float]] = {}


def criterion(number: int, title: str, limit_s: float):
    """Mark a test as acceptance criterion ``number`` with a runtime limit."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - t0
                assert elapsed < limit_s, f"took {elapsed:.1f}s, limit {limit_s}s"
            except BaseException:
                RESULTS[number] = ("FAIL", title, time.perf_counter() - t0)
                print(f"AC{number} FAIL  {title}")
                raise
            RESULTS[number] = ("PASS", title, elapsed)
            print(f"AC{number} PASS  {title} ({elapsed:.1f}s)")

        return wrapper

    return deco
