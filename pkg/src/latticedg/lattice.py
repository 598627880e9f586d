"""Lattice vectors, box constraints and the counting evaluation oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class DimensionError(ValueError):
    """A lattice vector does not match the ground set it is used with."""


class DomainError(ValueError):
    """A lattice point lies outside the oracle's box."""


class CapacityError(RuntimeError):
    """An exhaustive computation would exceed its state-space guard."""


@dataclass(frozen=True)
class GroundSet:
    size: int

    def __post_init__(self):
        if int(self.size) < 1:
            raise ValueError(f"ground set must be non-empty, got size={self.size}")

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(range(self.size))

    def zeros(self) -> np.ndarray:
        return np.zeros(self.size, dtype=np.int64)

    def unit(self, e: int) -> np.ndarray:
        """The unit vector chi_e."""
        if not 0 <= e < self.size:
            raise IndexError(f"element {e} outside ground set of size {self.size}")
        v = self.zeros()
        v[e] = 1
        return v


def lattice_vector(values, size: Optional[int] = None) -> np.ndarray:
    """Validate ``values`` as a nonnegative integer point and return an int64 copy."""
    x = np.array(values, dtype=np.int64).reshape(-1)
    if size is not None and x.shape[0] != size:
        raise DimensionError(f"expected a vector of length {size}, got {x.shape[0]}")
    if np.any(x < 0):
        raise ValueError("lattice vectors must be nonnegative")
    return x


@dataclass(frozen=True)
class BoxConstraint:
    """The feasible region ``0 <= x <= bounds``."""

    bounds: np.ndarray

    def __post_init__(self):
        b = np.array(self.bounds, dtype=np.int64).reshape(-1)
        if b.size == 0:
            raise ValueError("box must have at least one coordinate")
        if np.any(b < 1):
            raise ValueError("all bounds must be >= 1")
        b.setflags(write=False)
        object.__setattr__(self, "bounds", b)

    @classmethod
    def uniform(cls, size: int, bound: int) -> "BoxConstraint":
        return cls(np.full(size, bound, dtype=np.int64))

    @property
    def size(self) -> int:
        return int(self.bounds.shape[0])

    @property
    def ground_set(self) -> GroundSet:
        return GroundSet(self.size)

    @property
    def l1_norm(self) -> int:
        return int(self.bounds.sum())

    @property
    def linf_norm(self) -> int:
        return int(self.bounds.max())

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return x.shape == self.bounds.shape and bool(np.all(x >= 0) and np.all(x <= self.bounds))

    def __eq__(self, other):
        return isinstance(other, BoxConstraint) and np.array_equal(self.bounds, other.bounds)

    def __hash__(self):
        return hash(self.bounds.tobytes())


@dataclass
class OracleHandle:
    """Counting wrapper around an objective ``f``.

    ``target`` is any callable taking an int64 vector. If it also defines
    ``marginal(x, e, step)`` returning ``f(x + step*chi_e) - f(x)``, marginal
    queries go through it and count as one call; otherwise they cost two
    evaluations. One handle belongs to one algorithm run.
    """

    target: Callable[[np.ndarray], float]
    ground_set: GroundSet
    box: Optional[BoxConstraint] = None
    call_count: int = field(default=0)

    def __post_init__(self):
        if isinstance(self.ground_set, int):
            self.ground_set = GroundSet(self.ground_set)
        if self.box is not None and self.box.size != self.ground_set.size:
            raise DimensionError("box and ground set sizes differ")
        self._fast = getattr(self.target, "marginal", None)

    @property
    def has_fast_marginal(self) -> bool:
        return self._fast is not None

    def _check(self, x):
        if x.shape[0] != self.ground_set.size:
            raise DimensionError(
                f"vector of length {x.shape[0]} for ground set of size {self.ground_set.size}"
            )
        if self.box is not None and not self.box.contains(x):
            raise DomainError(f"point {x.tolist()} outside box {self.box.bounds.tolist()}")

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=np.int64)
        self._check(x)
        self.call_count += 1
        return float(self.target(x))

    __call__ = evaluate

    def _marginal(self, x, e: int, step: int) -> float:
        x = np.asarray(x, dtype=np.int64)
        if x.shape[0] != self.ground_set.size:
            raise DimensionError(
                f"vector of length {x.shape[0]} for ground set of size {self.ground_set.size}"
            )
        # only coordinate e moves; the rest of x is the caller's responsibility
        moved_e = int(x[e]) + step
        if moved_e < 0 or (self.box is not None and moved_e > self.box.bounds[e]):
            raise DomainError(f"coordinate {e} stepped to {moved_e} leaves the box")
        if self._fast is not None:
            self.call_count += 1
            return float(self._fast(x, e, step))
        moved = x.copy()
        moved[e] = moved_e
        self.call_count += 2
        return float(self.target(moved)) - float(self.target(x))

    def marginal_up(self, x, e: int) -> float:
        """f(chi_e | x) = f(x + chi_e) - f(x)."""
        return self._marginal(x, e, 1)

    def marginal_down(self, y, e: int) -> float:
        """f(-chi_e | y) = f(y - chi_e) - f(y); needs y(e) >= 1."""
        if y[e] < 1:
            raise ValueError(f"cannot step down coordinate {e} from {y[e]}")
        return self._marginal(y, e, -1)

    def reset(self):
        self.call_count = 0
