"""Piecewise-constant (1+eps)-approximation of a non-increasing function.

``sketch_build`` probes ``phi`` on ``{0, ..., B-1}`` with binary searches at
geometric thresholds ``delta, delta(1+eps), ...`` and keeps, for each
threshold ``tau``, the first point ``b_tau`` where ``phi`` drops below it.
``sketch_eval(b)`` returns the threshold attached to the smallest
``b_tau > b``, which lies within a factor ``1+eps`` below ``phi(b)`` when
``phi(b) > 0`` and is zero otherwise.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Sequence

# slack on the loop test tau <= Delta, absorbs rounding in repeated multiplication
_TAU_RTOL = 1e-12


@dataclass(frozen=True)
class Sketch:
    pairs: tuple  # ((b_tau, tau), ...) ascending in b_tau, tau strictly decreasing
    epsilon: float
    domain_size: int
    evaluations: int = 0

    @property
    def breakpoints(self) -> list:
        return [b for b, _ in self.pairs]

    @property
    def thresholds(self) -> list:
        return [t for _, t in self.pairs]

    def _index(self, b: int) -> int:
        if not 0 <= b < self.domain_size:
            raise ValueError(f"b={b} outside sketch domain 0..{self.domain_size - 1}")
        return bisect.bisect_right(self._keys, b)

    def __call__(self, b: int) -> float:
        return self.pairs[self._index(b)][1]

    def piece_end(self, b: int) -> int:
        """Exclusive end of the constant piece containing ``b``."""
        return self.pairs[self._index(b)][0]

    def __post_init__(self):
        object.__setattr__(self, "_keys", [b for b, _ in self.pairs])

    def max_positive(self) -> float:
        return self.pairs[0][1]

    def min_positive(self) -> float:
        pos = [t for _, t in self.pairs if t > 0]
        return min(pos) if pos else 0.0


def _first_below(phi, lo: int, hi: int, B: int, pred) -> int:
    """Smallest b in [lo, hi] with pred(phi(b)); phi(B) counts as -inf."""
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(phi(mid)):
            hi = mid
        else:
            lo = mid + 1
    return lo


def sketch_build(phi: Callable[[int], float], B: int, epsilon: float, validate: bool = False) -> Sketch:
    """Sketch a non-increasing ``phi`` on ``{0, ..., B-1}``.

    ``phi`` is queried O((1/eps) log(Delta/delta) log B) times when it has a
    positive value and O(log B) times otherwise; repeated probes of the same
    point are served from a per-build cache. With ``validate=True`` the whole
    domain is scanned first and a ValueError is raised if ``phi`` increases.
    """
    B = int(B)
    if B <= 0:
        raise ValueError(f"domain size must be positive, got {B}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")

    cache = {}

    def value(b):
        v = cache.get(b)
        if v is None:
            v = cache[b] = float(phi(b))
        return v

    if validate:
        vals = [value(b) for b in range(B)]
        for b in range(1, B):
            if vals[b] > vals[b - 1]:
                raise ValueError(f"phi increases at b={b}: {vals[b - 1]} -> {vals[b]}")

    b0 = _first_below(value, 0, B, B, lambda v: v <= 0)
    if b0 == 0:
        return Sketch(((B, 0.0),), float(epsilon), B, len(cache))

    # endpoints of the positive run; ordered so delta <= Delta even if phi misbehaves
    delta, Delta = sorted((value(0), value(b0 - 1)))
    found = []
    tau = delta
    # with non-increasing phi, delta <= Delta and the first search returns b0
    while tau <= Delta * (1.0 + _TAU_RTOL):
        found.append((_first_below(value, 0, B, B, lambda v, t=tau: v < t), tau))
        tau *= 1.0 + epsilon

    # keep the largest tau per breakpoint; larger tau means smaller b_tau
    best = {}
    for b, t in found:
        if t > best.get(b, -1.0):
            best[b] = t
    pairs = sorted(best.items())
    if not found or found[0][0] != B:
        pairs.append((B, 0.0))
    return Sketch(tuple(pairs), float(epsilon), B, len(cache))


def sketch_eval(s: Sketch, b: int) -> float:
    return s(b)


def sketch_from_values(values: Sequence[float], epsilon: float) -> Sketch:
    """Convenience: sketch a finite non-increasing sequence."""
    return sketch_build(lambda b: values[b], len(values), epsilon)
