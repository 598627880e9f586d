"""Double greedy maximizers on the bounded integer lattice."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .lattice import BoxConstraint, GroundSet, OracleHandle
from .rng import ElementStreams, check_seed
from .sketch import Sketch, sketch_build


class Algorithm(str, enum.Enum):
    SG = "SG"
    DG = "DG"
    FastDG = "FastDG"
    PolyDG = "PolyDG"

    @classmethod
    def parse(cls, name) -> "Algorithm":
        if isinstance(name, cls):
            return name
        for a in cls:
            if a.value.lower() == str(name).lower():
                return a
        raise ValueError(f"unknown algorithm {name!r}; choose from {[a.value for a in cls]}")


class DRViolationError(RuntimeError):
    """alpha + beta < 0 was observed, so f is not DR-submodular on the box."""


@dataclass
class RunReport:
    solution: np.ndarray
    objective: float
    oracle_calls: int
    seed: int
    algorithm: Algorithm
    epsilon: Optional[float] = None
    wall_time: float = 0.0  # seconds
    failed: bool = False
    shift: float = 0.0
    process_calls: int = 0
    process_failures: int = 0
    eta: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def shifted_objective(self) -> float:
        return self.objective - self.shift


def as_handle(f, box: BoxConstraint) -> OracleHandle:
    if isinstance(f, OracleHandle):
        if f.ground_set.size != box.size:
            raise ValueError("oracle ground set does not match the box")
        return f
    return OracleHandle(f, GroundSet(box.size), box)


def _order(box: BoxConstraint, order: Optional[Sequence[int]]):
    if order is None:
        return range(box.size)
    order = [int(e) for e in order]
    if sorted(order) != list(range(box.size)):
        raise ValueError("order must be a permutation of the ground set")
    return order


def shuffled_order(size: int, seed: int) -> list:
    """Seeded permutation for experiments that randomize the element order."""
    return [int(e) for e in np.random.default_rng(seed).permutation(size)]


def _finish(handle, x, seed, algorithm, epsilon, t0, **kw) -> RunReport:
    # the reported value is an uncounted re-evaluation, so oracle_calls is the algorithm's own cost
    return RunReport(
        solution=x,
        objective=float(handle.target(x)),
        oracle_calls=handle.call_count,
        seed=seed,
        algorithm=algorithm,
        epsilon=epsilon,
        wall_time=time.perf_counter() - t0,
        **kw,
    )


def _up_probability(alpha: float, beta: float) -> float:
    total = alpha + beta
    return 1.0 if total == 0 else alpha / total


def double_greedy(f, box: BoxConstraint, seed: int = 0, order=None, strict: bool = True) -> RunReport:
    """Pseudopolynomial double greedy; 1/2-approximation in expectation.

    Starts from x = 0, y = B and closes the gap one unit at a time using
    alpha = f(chi_e | x) and beta = f(-chi_e | y). Uses Theta(||B||_1) marginal
    queries. With ``strict`` a DRViolationError is raised when alpha + beta is
    clearly negative.
    """
    seed = check_seed(seed)
    handle = as_handle(f, box)
    streams = ElementStreams(seed)
    t0 = time.perf_counter()
    x = np.zeros(box.size, dtype=np.int64)
    y = box.bounds.copy()
    for e in _order(box, order):
        while x[e] < y[e]:
            alpha = handle.marginal_up(x, e)
            beta = handle.marginal_down(y, e)
            if strict and alpha + beta < -1e-9 * max(1.0, abs(alpha), abs(beta)):
                raise DRViolationError(
                    f"alpha + beta = {alpha + beta:.6g} < 0 at element {e} (x(e)={x[e]}, y(e)={y[e]})"
                )
            if beta < 0:
                x[e] += 1
            elif alpha < 0:
                y[e] -= 1
            elif streams[e].random() < _up_probability(alpha, beta):
                x[e] += 1
            else:
                y[e] -= 1
    return _finish(handle, x, seed, Algorithm.DG, None, t0)


def element_sketches(handle: OracleHandle, x, y, e: int, bound: int, epsilon: float):
    """Sketches of g(b) = f(chi_e | x + b chi_e) and h(b) = f(-chi_e | y - b chi_e).

    ``x`` and ``y`` are the current lower and upper solutions with
    ``x(e) = 0`` and ``y(e) = bound``; both functions live on ``0..bound-1``.
    """
    xb = x.copy()
    yb = y.copy()

    def g(b):
        xb[e] = b
        return handle.marginal_up(xb, e)

    def h(b):
        yb[e] = bound - b
        return handle.marginal_down(yb, e)

    return sketch_build(g, bound, epsilon), sketch_build(h, bound, epsilon)


def fast_double_greedy(f, box: BoxConstraint, epsilon: float, seed: int = 0, order=None) -> RunReport:
    """Double greedy driven by sketched marginals; 1/(2+eps)-approximation.

    Per element, g and h are sketched once up front, then the unit walk runs
    on the sketch values only, so oracle calls are
    O(|E|/eps * log(Delta/delta) * log ||B||_inf).
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    seed = check_seed(seed)
    handle = as_handle(f, box)
    streams = ElementStreams(seed)
    t0 = time.perf_counter()
    x = np.zeros(box.size, dtype=np.int64)
    y = box.bounds.copy()
    for e in _order(box, order):
        bound = int(box.bounds[e])
        g_sk, h_sk = element_sketches(handle, x, y, e, bound, epsilon)
        xe, ye = 0, bound
        while xe < ye:
            alpha = g_sk(xe)
            beta = h_sk(bound - ye)
            assert alpha >= 0 and beta >= 0
            if streams[e].random() < _up_probability(alpha, beta):
                xe += 1
            else:
                ye -= 1
        x[e] = y[e] = xe
    return _finish(handle, x, seed, Algorithm.FastDG, float(epsilon), t0)


def single_greedy(f, box: BoxConstraint, seed: int = 0, order=None) -> RunReport:
    """Coordinate-wise greedy baseline: raise x(e) while the gain stays positive."""
    handle = as_handle(f, box)
    t0 = time.perf_counter()
    x = np.zeros(box.size, dtype=np.int64)
    for e in _order(box, order):
        while x[e] < box.bounds[e] and handle.marginal_up(x, e) > 0:
            x[e] += 1
    return _finish(handle, x, check_seed(seed), Algorithm.SG, None, t0)


class ShiftedObjective:
    """f(x) - c; marginals are unchanged and reuse the base's fast path."""

    def __init__(self, base, shift: float):
        self.base = base
        self.shift = float(shift)
        fast = getattr(base, "marginal", None)
        if fast is not None:
            self.marginal = fast

    def __call__(self, x):
        return float(self.base(x)) - self.shift


def shifted_maximize(f, box: BoxConstraint, algo="DG", epsilon: Optional[float] = None,
                     seed: int = 0, **kwargs) -> RunReport:
    """Maximize f(x) - min(f(0), f(B)) for objectives that may be negative.

    The report's ``objective`` is the raw f(solution); ``shifted_objective``
    subtracts the shift. The two extra evaluations are included in
    ``oracle_calls``.
    """
    algo = Algorithm.parse(algo)
    handle = as_handle(f, box)
    shift = min(handle.evaluate(np.zeros(box.size, dtype=np.int64)), handle.evaluate(box.bounds.copy()))
    inner = OracleHandle(ShiftedObjective(handle.target, shift), GroundSet(box.size), box)
    report = run_algorithm(inner, box, algo, epsilon=epsilon, seed=seed, **kwargs)
    report.oracle_calls += handle.call_count
    report.objective = float(handle.target(report.solution))
    report.shift = shift
    return report


def run_algorithm(f, box: BoxConstraint, algo, epsilon: Optional[float] = None, seed: int = 0,
                  **kwargs) -> RunReport:
    algo = Algorithm.parse(algo)
    if algo is Algorithm.SG:
        return single_greedy(f, box, seed=seed, **kwargs)
    if algo is Algorithm.DG:
        return double_greedy(f, box, seed=seed, **kwargs)
    if epsilon is None:
        raise ValueError(f"{algo.value} needs epsilon")
    if algo is Algorithm.FastDG:
        return fast_double_greedy(f, box, epsilon, seed=seed, **kwargs)
    from .fastsim import poly_maximize

    return poly_maximize(f, box, epsilon, seed=seed, **kwargs)
