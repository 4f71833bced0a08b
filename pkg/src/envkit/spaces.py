"""Observation and action spaces: membership testing, seeded sampling, text form."""

from __future__ import annotations

from typing import Union

import numpy as np

# A value is either a discrete action/observation (int) or a float64 vector.
Value = Union[int, np.ndarray]


class Space:
    """Base class for the two space variants, Discrete and Box."""

    def contains(self, value: Value) -> bool:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> Value:
        """Draw a uniform sample from this space using the given generator."""
        raise NotImplementedError

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    def to_text(self) -> str:
        """Serialize to the manifest text form (see :mod:`envkit.monitor`)."""
        raise NotImplementedError

    def __contains__(self, value: Value) -> bool:
        return self.contains(value)


class Discrete(Space):
    """The integer set {0, 1, ..., n-1}."""

    def __init__(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"Discrete space needs n >= 1, got {n}")
        self.n = int(n)

    def contains(self, value: Value) -> bool:
        if isinstance(value, (bool, np.bool_)):
            return False
        if not isinstance(value, (int, np.integer)):
            return False
        return 0 <= int(value) < self.n

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.n))

    @property
    def dimension(self) -> int:
        return 1

    def to_text(self) -> str:
        return f"discrete:{self.n}"

    def __repr__(self) -> str:
        return f"Discrete({self.n})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Discrete) and other.n == self.n


class Box(Space):
    """A bounded box in R^d with finite per-coordinate bounds, low[i] < high[i]."""

    def __init__(self, low, high) -> None:
        self.low = np.asarray(low, dtype=np.float64)
        self.high = np.asarray(high, dtype=np.float64)
        if self.low.ndim != 1 or self.high.ndim != 1:
            raise ValueError("Box bounds must be 1-dimensional vectors")
        if self.low.shape != self.high.shape or self.low.size < 1:
            raise ValueError("Box bounds must have equal nonzero length")
        if not (np.all(np.isfinite(self.low)) and np.all(np.isfinite(self.high))):
            raise ValueError("Box bounds must be finite")
        if not np.all(self.low < self.high):
            raise ValueError("Box requires low[i] < high[i] for every coordinate")

    def contains(self, value: Value) -> bool:
        if isinstance(value, (bool, int, np.bool_, np.integer)):
            return False
        arr = np.asarray(value)
        if arr.shape != self.low.shape or not np.issubdtype(arr.dtype, np.floating):
            return False
        return bool(np.all(arr >= self.low) and np.all(arr <= self.high))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high)

    @property
    def dimension(self) -> int:
        return int(self.low.size)

    def to_text(self) -> str:
        lo = ",".join(repr(float(v)) for v in self.low)
        hi = ",".join(repr(float(v)) for v in self.high)
        return f"box:{self.dimension}:[{lo}]:[{hi}]"

    def __repr__(self) -> str:
        return f"Box({self.low.tolist()}, {self.high.tolist()})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Box)
            and other.low.shape == self.low.shape
            and bool(np.all(other.low == self.low))
            and bool(np.all(other.high == self.high))
        )


def parse_space(text: str) -> Space:
    """Inverse of ``Space.to_text``. Raises ValueError on malformed input."""
    if text.startswith("discrete:"):
        return Discrete(int(text.split(":", 1)[1]))
    if text.startswith("box:"):
        body = text[len("box:"):]
        dim_part, _, rest = body.partition(":")
        d = int(dim_part)
        if not (rest.startswith("[") and rest.endswith("]") and "]:[" in rest):
            raise ValueError(f"malformed box text: {text!r}")
        lo_part, hi_part = rest[1:-1].split("]:[", 1)
        low = [float(v) for v in lo_part.split(",")]
        high = [float(v) for v in hi_part.split(",")]
        if len(low) != d or len(high) != d:
            raise ValueError(f"box dimension mismatch in {text!r}")
        return Box(low, high)
    raise ValueError(f"unknown space text: {text!r}")
