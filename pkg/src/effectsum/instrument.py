"""Lightweight operation counters for cost measurements.

Counting is off by default so the hot paths stay cheap; the bench harness and
the scaling tests enable it around the operations they measure.  Call sites
guard with ``if instrument.enabled`` before calling :func:`bump`.
"""

from __future__ import annotations

enabled = False
counters: dict[str, int] = {}


def bump(name: str, n: int = 1) -> None:
    counters[name] = counters.get(name, 0) + n


def peak(name: str, value: int) -> None:
    if value > counters.get(name, 0):
        counters[name] = value


def reset() -> None:
    counters.clear()


class capture:
    """Context manager: reset counters, enable counting, expose the live dict."""

    def __enter__(self) -> dict[str, int]:
        global enabled
        self._prev = enabled
        reset()
        enabled = True
        return counters

    def __exit__(self, *exc) -> None:
        global enabled
        enabled = self._prev
