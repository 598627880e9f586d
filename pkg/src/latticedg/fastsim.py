"""Batched simulation of the double greedy walk.

Inside one constant piece of the sketches, Fast-DG is the random process
P(p, l_a, l_b, l_ab): starting from a = b = 0, increment a with probability
p and b otherwise until a = l_a, b = l_b or a + b = l_ab. ``simulate_process``
reproduces its terminal distribution D in polylogarithmic time by drawing
binomial batches far from every boundary and geometric runs near one;
``poly_maximize`` runs the Fast-DG walk piece by piece with it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lattice import CapacityError
from .maximize import Algorithm, RunReport, _finish, as_handle, _order, element_sketches
from .rng import ElementStreams, check_seed


_GEOMETRIC_CAP = 1 << 62


def sample_geometric(p: float, rng: np.random.Generator) -> int:
    """Number of Bernoulli(p) trials up to and including the first success.

    Inversion: ``1 + floor(log U / log(1-p))`` with U uniform on (0, 1], O(1).
    """
    if not 0 < p <= 1:
        raise ValueError(f"geometric parameter must lie in (0, 1], got {p}")
    if p == 1:
        return 1
    u = 1.0 - rng.random()
    k = math.log(u) / math.log1p(-p)
    # p near the underflow limit: the draw exceeds any limit a caller can hold
    return 1 + int(k) if k < _GEOMETRIC_CAP else _GEOMETRIC_CAP


def sample_binomial(n: int, p: float, rng: np.random.Generator) -> int:
    if n < 0:
        raise ValueError(f"binomial n must be nonnegative, got {n}")
    if not 0 <= p <= 1:
        raise ValueError(f"binomial p must lie in [0, 1], got {p}")
    if n == 0 or p == 0:
        return 0
    if p == 1:
        return n
    return int(rng.binomial(n, p))


@dataclass(frozen=True)
class ProcessParams:
    p: float
    l_a: int
    l_b: int
    l_ab: int
    eta: float = 0.01

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if min(self.l_a, self.l_b, self.l_ab) < 0:
            raise ValueError("process limits must be nonnegative")
        if not 0 < self.eta < 1:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")

    def is_terminal(self, a: int, b: int) -> bool:
        return a >= self.l_a or b >= self.l_b or a + b >= self.l_ab

    @property
    def batch_threshold(self) -> int:
        """N = ceil(6 ln(3L/eta)), L = ceil(log2(l_a + l_b + l_ab + 2)) + 1 halving rounds."""
        rounds = math.ceil(math.log2(self.l_a + self.l_b + self.l_ab + 2)) + 1
        return math.ceil(6.0 * math.log(3.0 * rounds / self.eta))


@dataclass(frozen=True)
class ProcessOutcome:
    a: int
    b: int
    failed: bool = False


def _stopped(params: ProcessParams, a: int, b: int) -> ProcessOutcome:
    # every successful outcome sits on a boundary and inside all three limits
    assert a <= params.l_a and b <= params.l_b and a + b <= params.l_ab, (params, a, b)
    assert a == params.l_a or b == params.l_b or a + b == params.l_ab, (params, a, b)
    return ProcessOutcome(a, b)


def process_naive(params: ProcessParams, rng: np.random.Generator) -> ProcessOutcome:
    """One coin per step; the reference definition of the process."""
    a = b = 0
    while not params.is_terminal(a, b):
        if rng.random() < params.p:
            a += 1
        else:
            b += 1
    return _stopped(params, a, b)


def process_exact_distribution(params: ProcessParams, max_states: int = 10**6) -> dict:
    """Terminal distribution of the process by forward dynamic programming."""
    p, la, lb, lab = params.p, params.l_a, params.l_b, params.l_ab
    if params.is_terminal(0, 0):
        return {(0, 0): 1.0}
    amax, bmax = min(la, lab), min(lb, lab)
    if (amax + 1) * (bmax + 1) > max_states:
        raise CapacityError(f"{(amax + 1) * (bmax + 1)} states exceed the guard of {max_states}")
    q = 1.0 - p
    mass = np.zeros((amax + 1, bmax + 1))
    mass[0, 0] = 1.0
    out = {}
    for t in range(lab + 1):
        for a in range(max(0, t - bmax), min(t, amax) + 1):
            b = t - a
            m = mass[a, b]
            if m == 0.0:
                continue
            if params.is_terminal(a, b):
                out[(a, b)] = out.get((a, b), 0.0) + m
                continue
            if p > 0:
                mass[a + 1, b] += m * p
            if q > 0:
                mass[a, b + 1] += m * q
    return out


def simulate_process(params: ProcessParams, rng: np.random.Generator) -> ProcessOutcome:
    """Sample from the process's terminal distribution, failing with probability <= eta.

    Far from every boundary, floor(n/2) steps are drawn at once as a binomial
    batch, where n bounds the steps that certainly fit; a batch landing on or
    past a boundary is reported as a failure. Within N of the a- or sum-limit,
    the walk advances one a-increment at a time with the intervening
    b-increments drawn geometrically, and symmetrically near the b-limit.
    """
    p, la, lb, lab = params.p, params.l_a, params.l_b, params.l_ab
    if params.is_terminal(0, 0):
        return ProcessOutcome(0, 0)
    # degenerate coins: the walk is deterministic and G(0) is undefined
    if p >= 1.0:
        return _stopped(params, min(la, lab), 0)
    if p <= 0.0:
        return _stopped(params, 0, min(lb, lab))
    q = 1.0 - p
    N = params.batch_threshold
    a = b = 0
    while not params.is_terminal(a, b):
        if la - a <= N or lab - (a + b) < N:
            while True:
                s = sample_geometric(p, rng)  # s-1 b-steps, then an a-step
                if b + s <= lb and a + b + s <= lab:
                    a += 1
                    b += s - 1
                    if a == la or a + b == lab:
                        return _stopped(params, a, b)
                else:
                    return _stopped(params, a, min(lb, lab - a))
        if lb - b <= N:
            while True:
                s = sample_geometric(q, rng)  # s-1 a-steps, then a b-step
                if a + s <= la and a + b + s <= lab:
                    a += s - 1
                    b += 1
                    if b == lb or a + b == lab:
                        return _stopped(params, a, b)
                else:
                    return _stopped(params, min(la, lab - b), b)
        n = lab - (a + b)
        if la - a < n * p:
            n = int(math.floor((la - a) / p))
        if lb - b < n * q:
            n = int(math.floor((lb - b) / q))
        m = n // 2
        s = sample_binomial(m, p, rng)
        a += s
        b += m - s
        if params.is_terminal(a, b):
            return ProcessOutcome(a, b, failed=True)
    return _stopped(params, a, b)


def _eta_for(g_sk, h_sk, epsilon: float, n_elements: int, c: float) -> float:
    hi = max(g_sk.max_positive(), h_sk.max_positive())
    lows = [v for v in (g_sk.min_positive(), h_sk.min_positive()) if v > 0]
    spread = math.log(hi / min(lows)) if lows else 0.0
    return epsilon ** 2 / (c * (2.0 + epsilon) * n_elements * max(1.0, spread))


def poly_maximize(f, box, epsilon: float, seed: int = 0, order=None, c: float = 4.0) -> RunReport:
    """Fast-DG with each constant piece of the sketches simulated in one shot.

    Makes exactly the oracle calls of ``fast_double_greedy`` (same sketches)
    and, unless a batched simulation fails, returns a sample from the same
    output distribution. On failure the zero vector is returned and the
    report is flagged. ``eta`` per element is
    eps^2 / (c (2+eps) |E| max(1, ln(Delta/delta))), with Delta/delta read
    off that element's sketches.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    seed = check_seed(seed)
    handle = as_handle(f, box)
    streams = ElementStreams(seed)
    t0 = time.perf_counter()
    x = np.zeros(box.size, dtype=np.int64)
    y = box.bounds.copy()
    calls = 0
    min_eta: Optional[float] = None
    for e in _order(box, order):
        bound = int(box.bounds[e])
        g_sk, h_sk = element_sketches(handle, x, y, e, bound, epsilon)
        eta = _eta_for(g_sk, h_sk, epsilon, box.size, c)
        min_eta = eta if min_eta is None else min(min_eta, eta)
        xe, ye = 0, bound
        while xe < ye:
            alpha = g_sk(xe)
            beta = h_sk(bound - ye)
            if beta == 0:
                xe = ye
                break
            # alpha == 0 runs through the process with p = 0: y falls to the end of h's piece
            params = ProcessParams(
                p=alpha / (alpha + beta),
                l_a=g_sk.piece_end(xe) - xe,
                l_b=h_sk.piece_end(bound - ye) - (bound - ye),
                l_ab=ye - xe,
                eta=eta,
            )
            out = simulate_process(params, streams[e])
            calls += 1
            if out.failed:
                zero = np.zeros(box.size, dtype=np.int64)
                return _finish(handle, zero, seed, Algorithm.PolyDG, float(epsilon), t0, failed=True,
                               process_calls=calls, process_failures=1, eta=min_eta)
            xe += out.a
            ye -= out.b
        x[e] = y[e] = xe
    return _finish(handle, x, seed, Algorithm.PolyDG, float(epsilon), t0,
                   process_calls=calls, eta=min_eta)
