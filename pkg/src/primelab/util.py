"""Shared plumbing: error types, compensated accumulation, numeric parsing."""

from __future__ import annotations

import numpy as np


class DomainError(ValueError):
    """Input outside an operation's mathematical domain or precondition."""


class CapacityError(RuntimeError):
    """Request exceeds the configured memory or enumeration budget."""


class PoleError(ValueError):
    """Evaluation requested at a pole."""


class KahanSum:
    """Compensated accumulator; error stays O(eps * |term|) regardless of count."""

    __slots__ = ("_s", "_c")

    def __init__(self, start: float = 0.0) -> None:
        self._s = float(start)
        self._c = 0.0

    def add(self, x: float) -> None:
        y = float(x) - self._c
        t = self._s + y
        self._c = (t - self._s) - y
        self._s = t

    @property
    def value(self) -> float:
        return self._s


def parse_count(text) -> int:
    """Parse an integer-valued CLI number, accepting scientific notation ('1e8')."""
    if isinstance(text, (int, np.integer)):
        return int(text)
    s = str(text).strip()
    try:
        return int(s)
    except ValueError:
        pass
    try:
        v = float(s)
    except ValueError:
        raise DomainError(f"not a number: {text!r}") from None
    n = int(round(v))
    if abs(v - n) > 1e-6 * max(1.0, abs(v)):
        raise DomainError(f"expected an integer value, got {text!r}")
    return n


def rng_from_seed(seed: int) -> np.random.Generator:
    # Philox: counter-based, 256-bit state, reproducible across platforms.
    return np.random.Generator(np.random.Philox(key=int(seed)))
