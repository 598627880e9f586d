"""Objective functions on the integer lattice.

The revenue objective: budget ``x(i)`` on vertex ``i`` makes it an advocate
independently with probability ``1 - q^x(i)`` (``q = 1 - p``), and the
revenue is the total weight from advocates to non-advocates. Its
expectation is

    f(x) = sum over ordered pairs (i, j) of w_ij (1 - q^x(i)) q^x(j).

Tabular objectives hold every value on a small box and back the exhaustive
tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .lattice import BoxConstraint, CapacityError

DEFAULT_P = 0.0001
_SMALL_POWER = 64


@dataclass(frozen=True)
class WeightedGraph:
    """Weighted graph stored as ordered arcs (i, j, w_ij).

    Undirected input is expanded to both orientations. Parallel arcs keep the
    largest weight.
    """

    vertex_count: int
    edges: tuple
    directed: bool = False
    out_arcs: tuple = field(init=False, repr=False, compare=False)
    in_arcs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.vertex_count)
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        arcs = {}
        for i, j, *rest in self.edges:
            i, j = int(i), int(j)
            w = float(rest[0]) if rest else 1.0
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) outside 0..{n - 1}")
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not w >= 0:
                raise ValueError(f"negative weight {w} on edge ({i}, {j})")
            pairs = [(i, j)] if self.directed else [(i, j), (j, i)]
            for key in pairs:
                arcs[key] = max(w, arcs.get(key, 0.0))
        ordered = tuple(sorted((i, j, w) for (i, j), w in arcs.items()))
        out = [[] for _ in range(n)]
        inc = [[] for _ in range(n)]
        for i, j, w in ordered:
            out[i].append((j, w))
            inc[j].append((i, w))
        object.__setattr__(self, "edges", ordered)
        object.__setattr__(self, "out_arcs", tuple(tuple(a) for a in out))
        object.__setattr__(self, "in_arcs", tuple(tuple(a) for a in inc))

    @property
    def arc_count(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def arrays(self):
        if not self.edges:
            return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
        src, dst, w = zip(*self.edges)
        return np.array(src, np.int64), np.array(dst, np.int64), np.array(w, float)


class RevenueObjective:
    """Expected revenue; DR-submodular-looking but see ``is_dr_submodular``.

    ``marginal(x, i, step)`` touches only the arcs at ``i`` and is exposed to
    the oracle as a one-call marginal.
    """

    def __init__(self, graph: WeightedGraph, p: float = DEFAULT_P):
        if not 0 < p < 1:
            raise ValueError(f"advocacy probability must lie in (0, 1), got {p}")
        self.graph = graph
        self.p = float(p)
        self.q = 1.0 - self.p
        self._log_q = math.log1p(-self.p)
        powers = [1.0]
        for _ in range(_SMALL_POWER):
            powers.append(powers[-1] * self.q)
        self._powers = powers
        self._src, self._dst, self._w = graph.arrays()

    @property
    def size(self) -> int:
        return self.graph.vertex_count

    def qpow(self, k) -> float:
        k = int(k)
        if k <= _SMALL_POWER:
            return self._powers[k]
        return math.exp(k * self._log_q)

    def _qpow_vec(self, x):
        out = np.exp(x * self._log_q)
        small = x <= _SMALL_POWER
        out[small] = np.asarray(self._powers)[x[small]]
        return out

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=np.int64)
        qx = self._qpow_vec(x)
        return float(np.sum(self._w * (1.0 - qx[self._src]) * qx[self._dst]))

    def marginal(self, x, i: int, step: int) -> float:
        # as a function of t = x(i): f = const + (C - A) q^t
        qpow = self.qpow
        A = 0.0
        for j, w in self.graph.out_arcs[i]:
            A += w * qpow(x[j])
        C = 0.0
        for j, w in self.graph.in_arcs[i]:
            C += w * (1.0 - qpow(x[j]))
        t = int(x[i])
        if step == 1:
            change = -self.p * qpow(t)
        elif step == -1:
            change = self.p * qpow(t - 1)
        else:
            change = qpow(t + step) - qpow(t)
        return (C - A) * change


def revenue_value(obj: RevenueObjective, x) -> float:
    return obj(x)


def sample_revenue(obj: RevenueObjective, x, rng: np.random.Generator, trials: int) -> np.ndarray:
    """Monte-Carlo revenue of the advocate process, one value per trial."""
    x = np.asarray(x, dtype=np.int64)
    adv_prob = 1.0 - obj._qpow_vec(x)
    src, dst, w = obj._src, obj._dst, obj._w
    S = rng.random((trials, obj.size)) < adv_prob
    return (w * (S[:, src] & ~S[:, dst])).sum(axis=1)


def edge_term(q: float, x, i: int, j: int) -> float:
    """Per-arc term g(x) = (1 - q^x(i)) q^x(j)."""
    return (1.0 - q ** int(x[i])) * q ** int(x[j])


def revenue_marginal_identity_check(obj: RevenueObjective, x, i: int, j: int, tol: float = 1e-12) -> bool:
    """Check g(chi_i | x + chi_j) = q g(chi_i | x) for the arc term g of (i, j).

    With ``i == j`` the shift coordinate equals the incremented one; the
    identity is then checked on the term of every arc (i, k), k != i.
    """
    x = np.asarray(x, dtype=np.int64)
    q = obj.q
    n = obj.size
    if i == j:
        return all(_identity_holds(q, x, i, k, i, tol) for k in range(n) if k != i)
    return _identity_holds(q, x, i, j, j, tol)


def _identity_holds(q, x, i, j, shift, tol) -> bool:
    def gain(at):
        up = at.copy()
        up[i] += 1
        return edge_term(q, up, i, j) - edge_term(q, at, i, j)

    shifted = x.copy()
    shifted[shift] += 1
    return abs(gain(shifted) - q * gain(x)) <= tol


class TabularObjective:
    """Explicit table of f over the box, row-major in ``bounds + 1``."""

    def __init__(self, box: BoxConstraint, table):
        shape = tuple(int(b) + 1 for b in box.bounds)
        table = np.asarray(table, dtype=float)
        if table.size != int(np.prod(shape)):
            raise ValueError(f"table has {table.size} entries, box needs {int(np.prod(shape))}")
        self.box = box
        self.values = table.reshape(shape)
        self.values.setflags(write=False)

    @property
    def table(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __call__(self, x) -> float:
        return float(self.values[tuple(x)])

    def maximum(self):
        """Brute-force optimum (value, argmax point)."""
        k = int(np.argmax(self.values))
        return float(self.values.reshape(-1)[k]), np.array(np.unravel_index(k, self.values.shape), dtype=np.int64)

    @classmethod
    def from_function(cls, f, box: BoxConstraint, max_points: int = 10**6) -> "TabularObjective":
        shape = tuple(int(b) + 1 for b in box.bounds)
        if int(np.prod(shape)) > max_points:
            raise CapacityError(f"box has {int(np.prod(shape))} points, guard is {max_points}")
        vals = [f(np.array(pt, dtype=np.int64)) for pt in product(*(range(s) for s in shape))]
        return cls(box, vals)


def is_dr_submodular(obj: TabularObjective, tol: float = 1e-12, max_points: int = 10**7) -> bool:
    """Whether f(chi_e | x) >= f(chi_e | y) - tol for all x <= y with y + chi_e in the box.

    Checked through unit steps: every marginal f(chi_e | .) must be
    non-increasing along each coordinate, which chains to all x <= y.
    """
    v = obj.values
    if v.size > max_points:
        raise CapacityError(f"table of {v.size} points exceeds the guard of {max_points}")
    for e in range(v.ndim):
        gain = np.diff(v, axis=e)
        for k in range(v.ndim):
            if gain.shape[k] > 1 and np.any(np.diff(gain, axis=k) > tol):
                return False
    return True


def generate_dr_table(box: BoxConstraint, rng: np.random.Generator, max_points: int = 10**5,
                      attempts: int = 20) -> TabularObjective:
    """Random nonnegative DR-submodular table on a small box.

    Sum of per-coordinate concave sequences (rising then falling), a concave
    function of ||x||_1 and nonpositive pairwise products, shifted to be
    nonnegative; verified exhaustively and resampled on failure.
    """
    shape = tuple(int(b) + 1 for b in box.bounds)
    if int(np.prod(shape)) > max_points:
        raise CapacityError(f"box has {int(np.prod(shape))} points, guard is {max_points}")
    grids = np.meshgrid(*(np.arange(s) for s in shape), indexing="ij")
    for _ in range(attempts):
        values = np.zeros(shape)
        for e, g in enumerate(grids):
            steps = np.sort(rng.uniform(-1.0, 1.0, shape[e] - 1))[::-1] * rng.uniform(0.5, 2.0)
            values += np.concatenate([[0.0], np.cumsum(steps)])[g]
        total = sum(grids)
        steps = np.sort(rng.normal(0.0, 1.0, int(total.max())))[::-1] * rng.uniform(0.0, 1.0)
        values += np.concatenate([[0.0], np.cumsum(steps)])[total]
        for k in range(len(grids)):
            for l in range(k + 1, len(grids)):
                values -= rng.uniform(0.0, 0.3) * grids[k] * grids[l]
        values += -values.min() + rng.uniform(0.0, 0.2) * (values.max() - values.min())
        table = TabularObjective(box, values)
        if is_dr_submodular(table):
            return table
    # separable concave fallback is DR-submodular by construction
    values = np.zeros(shape)
    for e, g in enumerate(grids):
        values += g * (shape[e] - 1 - g)
    return TabularObjective(box, values)


def revenue_table(obj: RevenueObjective, box: BoxConstraint) -> TabularObjective:
    return TabularObjective.from_function(obj, box)


def random_graph(n: int, rng: np.random.Generator, density: float = 0.5, weighted: bool = False) -> WeightedGraph:
    """Undirected G(n, density) graph with unit or uniform(0, 2] weights."""
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                edges.append((i, j, float(rng.uniform(0.0, 2.0)) if weighted else 1.0))
    return WeightedGraph(n, tuple(edges))
