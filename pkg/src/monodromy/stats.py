"""How many random monodromy generators does it take to act transitively?

Exact values come from the linear recursion

    d = sum_{i=1}^{d} binom(d, i)^(1 - j) * i * t_i

for ``t_d``, the probability that ``j`` independent uniform permutations of
``d`` points generate a transitive group, solved by forward substitution in
exact rational arithmetic.  Monte Carlo counterparts sample permutations
and merge orbits with a disjoint-set forest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from numba import njit

_TABLES: dict[int, list[Fraction]] = {}


def _column(j: int, d_max: int) -> list[Fraction]:
    """``[t_1, ..., t_{d_max}]`` for ``j`` generators, extended on demand."""
    col = _TABLES.setdefault(j, [])
    for d in range(len(col) + 1, d_max + 1):
        # Fraction(binom, 1) ** (1 - j) keeps everything exact for any j >= 0.
        acc = Fraction(0)
        for i in range(1, d):
            acc += Fraction(math.comb(d, i)) ** (1 - j) * i * col[i - 1]
        col.append((d - acc) / d)
    return col[:d_max]


def transitivity_probability(d: int, j: int) -> Fraction:
    """Exact probability that ``j`` uniform permutations of ``d`` points
    generate a transitive group."""
    if d < 1 or j < 0:
        raise ValueError("need d >= 1 and j >= 0")
    return _column(j, d)[d - 1]


@dataclass(frozen=True)
class TransitivityTable:
    d_max: int
    j: int
    values: tuple[Fraction, ...]

    @property
    def floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.values)

    def __getitem__(self, d: int) -> Fraction:
        return self.values[d - 1]

    def identity_residuals(self) -> list[Fraction]:
        """``d - sum_i binom(d, i)^(1-j) i t_i`` for every ``d``; all zero."""
        out = []
        for d in range(1, self.d_max + 1):
            s = sum(Fraction(math.comb(d, i)) ** (1 - self.j) * i * self.values[i - 1]
                    for i in range(1, d + 1))
            out.append(d - s)
        return out


def transitivity_table(d_max: int, j: int) -> TransitivityTable:
    if d_max < 1:
        raise ValueError("d_max must be positive")
    return TransitivityTable(d_max, j, tuple(_column(j, d_max)))


class BettiExpectation(NamedTuple):
    value: float
    tail_bound: float
    j_max: int


def _tail_bound(d: int, j_max: int) -> float:
    # Pr[X_d > j] <= sum over proper nonempty subsets S of Pr[S is invariant]
    #            = sum_{k=1}^{d-1} binom(d, k)^(1-j); sum that over j > j_max.
    total = 0.0
    for k in range(1, d):
        c = math.comb(d, k)
        total += float(Fraction(1, c) ** j_max) / (1.0 - 1.0 / c)
    return total


def expected_betti(d: int, j_max: int = 60) -> BettiExpectation:
    """Expected number of uniform generators needed for transitivity,
    ``E[X_d] = sum_{j >= 0} (1 - t_d(j))`` truncated at ``j_max``.

    ``tail_bound`` bounds the neglected terms from above.
    """
    if d < 1:
        raise ValueError("d must be positive")
    total = Fraction(0)
    for j in range(j_max + 1):
        total += 1 - transitivity_probability(d, j)
    return BettiExpectation(float(total), _tail_bound(d, j_max), j_max)


def coupon_collector_expected(d: int) -> float:
    """``d * (1 + 1/2 + ... + 1/d)``."""
    if d < 1:
        raise ValueError("d must be positive")
    return float(d * sum(Fraction(1, k) for k in range(1, d + 1)))


def harmonic(d: int) -> float:
    return float(sum(Fraction(1, k) for k in range(1, d + 1)))


@njit(cache=True)
def _transitive_trials(d, j, uniforms):
    trials = uniforms.shape[0]
    hits = 0
    perm = np.empty(d, dtype=np.int64)
    parent = np.empty(d, dtype=np.int64)
    for trial in range(trials):
        for v in range(d):
            parent[v] = v
        components = d
        for g in range(j):
            # Fisher-Yates
            for v in range(d):
                perm[v] = v
            for v in range(d - 1, 0, -1):
                w = int(uniforms[trial, g, v] * (v + 1))
                if w > v:
                    w = v
                tmp = perm[v]
                perm[v] = perm[w]
                perm[w] = tmp
            for v in range(d):
                a = v
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                b = perm[v]
                while parent[b] != b:
                    parent[b] = parent[parent[b]]
                    b = parent[b]
                if a != b:
                    parent[a] = b
                    components -= 1
        if components == 1:
            hits += 1
    return hits


def simulate_transitivity(d: int, j: int, trials: int, rng: np.random.Generator,
                          chunk: int = 200_000) -> float:
    """Fraction of trials in which ``j`` random permutations of ``d`` points
    generate a transitive group."""
    if trials < 1 or d < 1:
        raise ValueError("need trials >= 1 and d >= 1")
    hits = 0
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        hits += _transitive_trials(d, j, rng.random((k, j, d)))
        done += k
    return hits / trials


@njit(cache=True)
def _collector_trials(d, trials, seed):
    np.random.seed(seed)
    seen = np.zeros(d, dtype=np.bool_)
    total = 0
    for _ in range(trials):
        seen[:] = False
        found = 0
        draws = 0
        while found < d:
            # Image of the tracked point under a fresh uniform permutation.
            k = np.random.randint(0, d)
            draws += 1
            if not seen[k]:
                seen[k] = True
                found += 1
        total += draws
    return total


def simulate_naive_strategy(d: int, trials: int, rng: np.random.Generator) -> float:
    """Mean number of petals the one-point naive strategy needs to see all
    ``d`` solutions when every petal acts as a uniform permutation."""
    if d < 1 or trials < 1:
        raise ValueError("need d >= 1 and trials >= 1")
    seed = int(rng.integers(2**31 - 1))
    return _collector_trials(d, trials, seed) / trials
