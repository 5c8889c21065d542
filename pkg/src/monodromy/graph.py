"""Graphs of homotopies and the monodromy solver loop.

Vertices carry a parameter point and the set of solutions known there.
Edges carry a pair of nonzero complex numbers ``(gamma_i, gamma_j)``
describing the segment homotopy between ``gamma_i F_{p_i}`` and
``gamma_j F_{p_j}``, the partial matching of known points established by
tracking along it, and the start points whose paths failed.

Directions are encoded as ``0`` for ``i -> j`` and ``1`` for ``j -> i``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .polysys import ParametricSystem, build_homotopy, create_seed_pair, random_complex
from .tracker import TrackOptions, TrackStatus, newton_refine, track_path


class SolutionCountExceeded(RuntimeError):
    """More distinct points than the declared solution count: the count is
    wrong or the deduplication tolerance is too tight."""


class PointArray:
    """Indexed set of complex vectors, deduplicated up to a relative tolerance.

    Two points are the same when ``max|x - y| <= tol * (1 + max|x|)``.
    """

    def __init__(self, num_vars: int, tol: float = 1e-6, points: Iterable = ()):
        self.num_vars = num_vars
        self.tol = tol
        self._data = np.empty((8, num_vars), dtype=np.complex128)
        self._len = 0
        for x in points:
            self.insert(x)

    def __len__(self) -> int:
        return self._len

    def __getitem__(self, i: int) -> np.ndarray:
        if not 0 <= i < self._len:
            raise IndexError(i)
        return self._data[i]

    def __iter__(self):
        return iter(self._data[: self._len])

    def as_array(self) -> np.ndarray:
        return self._data[: self._len].copy()

    def find(self, x) -> int | None:
        if self._len == 0:
            return None
        x = np.asarray(x, dtype=np.complex128)
        dist = np.abs(self._data[: self._len] - x).max(axis=1)
        k = int(np.argmin(dist))
        if dist[k] <= self.tol * (1.0 + np.abs(x).max()):
            return k
        return None

    def append(self, x) -> int:
        x = np.asarray(x, dtype=np.complex128).reshape(-1)
        if x.shape[0] != self.num_vars:
            raise ValueError(f"point must have length {self.num_vars}")
        if self._len == self._data.shape[0]:
            self._data = np.concatenate([self._data, np.empty_like(self._data)])
        self._data[self._len] = x
        self._len += 1
        return self._len - 1

    def insert(self, x) -> tuple[int, bool]:
        k = self.find(x)
        if k is not None:
            return k, False
        return self.append(x), True


def insert_point(Q: PointArray, x) -> tuple[int, bool]:
    return Q.insert(x)


@dataclass
class Vertex:
    p: np.ndarray
    points: PointArray
    is_base: bool = False


@dataclass
class HomotopyEdge:
    i: int
    j: int
    gammas: tuple[complex, complex]
    # matches[0]: index in Q_i -> index in Q_j; matches[1] the inverse.
    matches: tuple[dict, dict] = field(default_factory=lambda: ({}, {}))
    failed: tuple[set, set] = field(default_factory=lambda: (set(), set()))
    attempted: list = field(default_factory=lambda: [0, 0])
    succeeded: list = field(default_factory=lambda: [0, 0])

    def ends(self, direction: int) -> tuple[int, int]:
        return (self.i, self.j) if direction == 0 else (self.j, self.i)

    @property
    def correspondence(self) -> set[tuple[int, int]]:
        return set(self.matches[0].items())

    def __len__(self) -> int:
        return len(self.matches[0])

    def record(self, direction: int, a: int, b: int) -> None:
        """Match source ``a`` to target ``b`` (indices in the direction's
        source and target vertices)."""
        fwd, bwd = self.matches[direction], self.matches[1 - direction]
        if a in fwd or b in bwd:
            raise ValueError("correspondence would stop being a partial bijection")
        fwd[a] = b
        bwd[b] = a
        self.failed[direction].discard(a)
        self.failed[1 - direction].discard(b)


class Strategy(str, enum.Enum):
    RANDOM = "random"
    POTENTIAL_LOWER_BOUND = "potentialLowerBound"
    POTENTIAL_E = "potentialE"

    @classmethod
    def parse(cls, text: str | Strategy) -> Strategy:
        if isinstance(text, cls):
            return text
        aliases = {"lower-bound": cls.POTENTIAL_LOWER_BOUND, "potential-e": cls.POTENTIAL_E}
        if text in aliases:
            return aliases[text]
        return cls(text)


@dataclass(frozen=True)
class StopCriterion:
    kind: str
    value: int | None = None

    def __post_init__(self):
        if self.kind not in ("known-count", "saturation", "stabilization"):
            raise ValueError(f"unknown stop criterion {self.kind!r}")
        if self.kind != "saturation" and (self.value is None or self.value < 1):
            raise ValueError(f"{self.kind} needs a positive integer")

    @classmethod
    def known_count(cls, d: int) -> StopCriterion:
        return cls("known-count", d)

    @classmethod
    def saturation(cls) -> StopCriterion:
        return cls("saturation")

    @classmethod
    def stabilization(cls, window: int = 10) -> StopCriterion:
        return cls("stabilization", window)

    @property
    def count(self) -> int | None:
        return self.value if self.kind == "known-count" else None


class HomotopyGraph:
    """Mutable solver state: vertices, edges, counters and failure records."""

    def __init__(self, system: ParametricSystem, rng: np.random.Generator,
                 track_options: TrackOptions | None = None, dedup_tol: float = 1e-6,
                 store_tol: float = 1e-8):
        if not system.is_square:
            raise ValueError("the graph needs a square system; use square_system first")
        self.system = system
        self.rng = rng
        self.track_options = track_options or TrackOptions()
        self.dedup_tol = dedup_tol
        self.store_tol = store_tol
        self.vertices: list[Vertex] = []
        self.edges: list[HomotopyEdge] = []
        self.paths_attempted = 0
        self.paths_succeeded = 0
        self.paths_failed = 0
        self.failures: list[dict] = []
        self.history: list[tuple[int, ...]] = []

    def add_vertex(self, p=None, points: Iterable = (), is_base: bool = False) -> int:
        if p is None:
            p = random_complex(self.rng, self.system.num_params)
        p = np.asarray(p, dtype=np.complex128)
        if p.shape != (self.system.num_params,):
            raise ValueError(f"parameter point must have length {self.system.num_params}")
        Q = PointArray(self.system.num_vars, self.dedup_tol, points)
        self.vertices.append(Vertex(p, Q, is_base))
        return len(self.vertices) - 1

    def add_edge(self, i: int, j: int, gammas: tuple[complex, complex] | None = None) -> int:
        if i == j:
            raise ValueError("loops induce trivial homotopies and are not allowed")
        for v in (i, j):
            if not 0 <= v < len(self.vertices):
                raise IndexError(f"no vertex {v}")
        if gammas is None:
            angles = self.rng.uniform(0, 2 * np.pi, 2)
            gammas = (complex(np.exp(1j * angles[0])), complex(np.exp(1j * angles[1])))
        if gammas[0] == 0 or gammas[1] == 0:
            raise ValueError("gamma must be nonzero")
        self.edges.append(HomotopyEdge(i, j, (complex(gammas[0]), complex(gammas[1]))))
        return len(self.edges) - 1

    def points(self, v: int) -> PointArray:
        return self.vertices[v].points

    def degree(self, v: int) -> int:
        return sum((e.i == v) + (e.j == v) for e in self.edges)

    def num_components(self) -> int:
        parent = list(range(len(self.vertices)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e in self.edges:
            parent[find(e.i)] = find(e.j)
        return len({find(v) for v in range(len(self.vertices))})

    def betti_number(self) -> int:
        return len(self.edges) - len(self.vertices) + self.num_components()

    def eligible(self, e: int, direction: int) -> list[int]:
        edge = self.edges[e]
        src, _ = edge.ends(direction)
        matched, failed = edge.matches[direction], edge.failed[direction]
        return [a for a in range(len(self.vertices[src].points))
                if a not in matched and a not in failed]

    def eligible_count(self, e: int, direction: int) -> int:
        edge = self.edges[e]
        src, _ = edge.ends(direction)
        return (len(self.vertices[src].points) - len(edge.matches[direction])
                - len(edge.failed[direction]))

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(v.points) for v in self.vertices)

    def check_invariants(self) -> None:
        """Assert partial bijections, disjoint failure sets and stored residuals."""
        for k, edge in enumerate(self.edges):
            fwd, bwd = edge.matches
            assert len(fwd) == len(bwd), f"edge {k}: unbalanced matching"
            assert all(bwd[b] == a for a, b in fwd.items()), f"edge {k}: not a bijection"
            assert len(fwd) <= min(len(self.points(edge.i)), len(self.points(edge.j)))
            assert not (edge.failed[0] & fwd.keys()), f"edge {k}: failed source is matched"
            assert not (edge.failed[1] & bwd.keys()), f"edge {k}: failed source is matched"
        for v, vert in enumerate(self.vertices):
            S = self.system.specialize(vert.p)
            for x in vert.points:
                r = S.residual(x)
                assert r <= self.store_tol, \
                    f"vertex {v}: residual {r:.3g} above store tolerance"

    def snapshot(self) -> dict:
        """Plain-data summary of the current state, for reports."""
        return {
            "vertices": [
                {"p": _pairs(v.p), "known": len(v.points), "base": v.is_base}
                for v in self.vertices
            ],
            "edges": [
                {
                    "ends": [e.i, e.j],
                    "gammas": _pairs(e.gammas),
                    "matched": len(e),
                    "attempted": list(e.attempted),
                    "succeeded": list(e.succeeded),
                    "failed": [len(e.failed[0]), len(e.failed[1])],
                }
                for e in self.edges
            ],
            "betti_number": self.betti_number(),
            "paths": {
                "attempted": self.paths_attempted,
                "succeeded": self.paths_succeeded,
                "failed": self.paths_failed,
            },
            "failures": list(self.failures),
            "history": [list(h) for h in self.history],
        }


def _pairs(values) -> list[list[float]]:
    return [[float(np.real(z)), float(np.imag(z))] for z in values]


def _seeded_graph(F, rng, seed, **kwargs) -> HomotopyGraph:
    G = HomotopyGraph(F, rng, **kwargs)
    if seed is None:
        seed = create_seed_pair(F, rng)
    p0, x0 = seed
    G.add_vertex(p0, [x0], is_base=True)
    return G


def make_flower(s: int, t: int, F: ParametricSystem, rng: np.random.Generator,
                seed=None, **kwargs) -> HomotopyGraph:
    """A seeded central vertex and ``s`` petal vertices, each joined to the
    center by ``t`` edges."""
    if s < 1 or t < 1:
        raise ValueError("flower needs s >= 1 and t >= 1")
    G = _seeded_graph(F, rng, seed, **kwargs)
    for _ in range(s):
        v = G.add_vertex()
        for _ in range(t):
            G.add_edge(0, v)
    return G


def make_complete_graph(s: int, t: int, F: ParametricSystem, rng: np.random.Generator,
                        seed=None, **kwargs) -> HomotopyGraph:
    """``s`` vertices (the first one seeded), every pair joined by ``t`` edges."""
    if s < 2 or t < 1:
        raise ValueError("complete graph needs s >= 2 and t >= 1")
    G = _seeded_graph(F, rng, seed, **kwargs)
    for _ in range(s - 1):
        G.add_vertex()
    for a in range(s):
        for b in range(a + 1, s):
            for _ in range(t):
                G.add_edge(a, b)
    return G


def potential_lower_bound(G: HomotopyGraph, e: int, direction: int) -> int:
    """New points guaranteed by tracking every unmatched source."""
    src, dst = G.edges[e].ends(direction)
    return max(len(G.points(src)) - len(G.points(dst)), 0)


def potential_e(G: HomotopyGraph, e: int, direction: int, d: int) -> Fraction:
    """Expected number of new points from tracking one unmatched source,
    assuming the target fiber has ``d`` points."""
    edge = G.edges[e]
    src, dst = edge.ends(direction)
    matched = len(edge)
    if len(G.points(src)) - matched <= 0 or d <= matched:
        return Fraction(0)
    return Fraction(d - len(G.points(dst)), d - matched)


def _candidates(G: HomotopyGraph) -> list[tuple[int, int]]:
    return [(e, r) for e in range(len(G.edges)) for r in (0, 1) if G.eligible_count(e, r) > 0]


def is_saturated(G: HomotopyGraph) -> bool:
    return not _candidates(G)


def select_edge(G: HomotopyGraph, strategy: Strategy | str = Strategy.RANDOM,
                d: int | None = None) -> tuple[int, int] | None:
    """Pick an edge and direction with at least one eligible source, or
    ``None`` when there is nothing left to track."""
    strategy = Strategy.parse(strategy)
    cands = _candidates(G)
    if not cands:
        return None
    if strategy is Strategy.RANDOM:
        return cands[int(G.rng.integers(len(cands)))]
    if strategy is Strategy.POTENTIAL_LOWER_BOUND:
        scores = [potential_lower_bound(G, e, r) for e, r in cands]
    else:
        if d is None:
            raise ValueError("potentialE needs the solution count d")
        scores = [potential_e(G, e, r, d) for e, r in cands]
    best = max(scores)
    top = [c for c, s in zip(cands, scores) if s == best]
    return top[int(G.rng.integers(len(top)))]


def track_edge(G: HomotopyGraph, e: int, direction: int) -> int:
    """Track every eligible source along edge ``e`` and return the number of
    new points found at the target vertex."""
    edge = G.edges[e]
    src, dst = edge.ends(direction)
    g_src, g_dst = edge.gammas if direction == 0 else edge.gammas[::-1]
    Vs, Vd = G.vertices[src], G.vertices[dst]
    H = build_homotopy(G.system, Vs.p, Vd.p, g_src, g_dst)
    target = G.system.specialize(Vd.p)
    fwd, bwd = edge.matches[direction], edge.matches[1 - direction]
    new = 0
    for a in G.eligible(e, direction):
        G.paths_attempted += 1
        edge.attempted[direction] += 1
        outcome = track_path(H, Vs.points[a], G.track_options)
        reason = None
        if outcome.status is not TrackStatus.SUCCESS:
            reason = outcome.status.value
        else:
            polished = newton_refine(target, outcome.endpoint, G.store_tol, 3)
            if not polished.converged:
                reason = "polish-failed"
            else:
                y = polished.x
                b = Vd.points.find(y)
                if b is not None and b in bwd:
                    reason = "correspondence-conflict"
                else:
                    if b is None:
                        b = Vd.points.append(y)
                        new += 1
                    edge.record(direction, a, b)
                    edge.succeeded[direction] += 1
                    G.paths_succeeded += 1
        if reason is not None:
            edge.failed[direction].add(a)
            G.paths_failed += 1
            G.failures.append({"edge": e, "direction": direction, "source": a,
                               "reason": reason})
    return new


@dataclass
class MonodromyResult:
    vertex: int
    points: PointArray
    reason: str
    satisfied: bool
    # Trailing iterations without a new point; carried across augmentations.
    fruitless: int = 0

    def __iter__(self):
        # Allows ``j, Q = monodromy_solve(...)``.
        return iter((self.vertex, self.points))


def _largest(G: HomotopyGraph) -> int:
    sizes = G.sizes()
    return sizes.index(max(sizes))


def monodromy_solve(G: HomotopyGraph, stop: StopCriterion,
                    strategy: Strategy | str = Strategy.RANDOM,
                    initial: dict[int, Iterable] | None = None,
                    fruitless: int = 0) -> MonodromyResult:
    """Static graph strategy: repeatedly pick an edge-direction and track all
    its eligible sources until ``stop`` fires or nothing is left to track.

    Running out of work satisfies a saturation stop only; a count or
    stabilization stop that has not fired is reported as unsatisfied.
    ``fruitless`` seeds the stabilization counter.
    """
    strategy = Strategy.parse(strategy)
    for v, pts in (initial or {}).items():
        for x in pts:
            G.points(v).insert(x)
    if all(len(v.points) == 0 for v in G.vertices):
        raise ValueError("no known points to start from")
    d = stop.count
    if d is not None:
        for v, vert in enumerate(G.vertices):
            if len(vert.points) > d:
                raise SolutionCountExceeded(
                    f"vertex {v} has {len(vert.points)} points but the solution count is {d}")
            if len(vert.points) == d:
                return MonodromyResult(v, vert.points, "known-count", True)
    while True:
        choice = select_edge(G, strategy, d)
        if choice is None:
            reason = "exhausted" if d is not None else "saturation"
            v = _largest(G)
            return MonodromyResult(v, G.points(v), reason, stop.kind == "saturation", fruitless)
        e, direction = choice
        new = track_edge(G, e, direction)
        G.history.append(G.sizes())
        fruitless = 0 if new else fruitless + 1
        _, dst = G.edges[e].ends(direction)
        if d is not None:
            size = len(G.points(dst))
            if size > d:
                raise SolutionCountExceeded(
                    f"vertex {dst} has {size} points but the solution count is {d}")
            if size == d:
                return MonodromyResult(dst, G.points(dst), "known-count", True)
        if stop.kind == "stabilization" and fruitless >= stop.value:
            v = _largest(G)
            return MonodromyResult(v, G.points(v), "stabilization", True, fruitless)


def augment_least_connected(G: HomotopyGraph) -> int:
    """Add one randomly decorated edge between the two vertices of smallest
    degree (lowest indices on ties).  Raises the Betti number by one."""
    order = sorted(range(len(G.vertices)), key=lambda v: (G.degree(v), v))
    return G.add_edge(order[0], order[1])


def dynamic_monodromy_solve(G: HomotopyGraph, stop: StopCriterion,
                            strategy: Strategy | str = Strategy.RANDOM,
                            augment: Callable[[HomotopyGraph], object] = augment_least_connected,
                            max_fruitless: int = 3,
                            max_augmentations: int | None = None) -> MonodromyResult:
    """Run the static solver and augment the graph whenever it saturates
    before ``stop`` fires.

    The stabilization counter carries over between augmentations.  The run
    also ends after ``max_fruitless`` augmentations in a row that do not
    enlarge the largest known set, or when ``max_augmentations`` is used up.
    Either of those ends satisfies saturation and stabilization stops but
    not a known-count stop.
    """
    best = -1
    fruitless_augmentations = 0
    augmentations = 0
    carry = 0
    while True:
        result = monodromy_solve(G, stop, strategy, fruitless=carry)
        if result.satisfied and stop.kind != "saturation":
            return result
        carry = result.fruitless
        found = len(result.points)
        if augmentations and found <= best:
            fruitless_augmentations += 1
        else:
            fruitless_augmentations = 0
        best = max(best, found)
        budget_left = max_augmentations is None or augmentations < max_augmentations
        if fruitless_augmentations >= max_fruitless or not budget_left:
            return MonodromyResult(result.vertex, result.points, "dynamic-stabilization",
                                   stop.kind != "known-count", carry)
        augment(G)
        augmentations += 1
