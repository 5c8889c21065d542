"""Benchmark families of parametric polynomial systems.

Every generator gives each monomial coefficient (or payoff entry, or rate
constant) its own parameter, so the families are affine-linear in the
parameters and can be seeded by :func:`monodromy.polysys.create_seed_pair`.
Solution counts are attached only where they come from a published table
or a classical theorem; ``count_source`` says which.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .polysys import ParametricSystem, Term, square_system

# Mixed volumes of cyclic-n quoted in the MonodromySolver benchmarks.
CYCLIC_COUNTS = {5: 70, 6: 156, 7: 924, 10: 35940, 11: 184756}
# BKK bounds of Katsura-(n-1) with generic coefficients.
KATSURA_COUNTS = {5: 12, 6: 30, 7: 54, 8: 126, 9: 240, 10: 504}
NASH_COUNTS = {(3, 3): 10}
CRN_SMALL_COUNT = 4


@dataclass(frozen=True, eq=False)
class FamilySpec:
    name: str
    args: tuple
    system: ParametricSystem
    count: int | None = None
    count_source: str | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        if not self.args:
            return self.name
        sep = "x" if self.name == "nash" else ","
        return f"{self.name}:{sep.join(str(a) for a in self.args)}"


def sparse_family(supports: Sequence[Sequence[Sequence[int]]]) -> ParametricSystem:
    """One fresh parameter per monomial of each support, zero constant parts."""
    if not supports:
        raise ValueError("need at least one support")
    n = len(supports)
    equations = []
    k = 0
    for support in supports:
        if len(support) == 0:
            raise ValueError("empty support")
        eq = []
        for exps in support:
            if len(exps) != n:
                raise ValueError(f"monomial {tuple(exps)} does not have {n} exponents")
            eq.append(Term(tuple(exps), 0j, {k: 1.0}))
            k += 1
        equations.append(eq)
    return ParametricSystem.from_equations(equations, n, k)


def dense_family(degrees: Sequence[int]) -> FamilySpec:
    """All monomials of total degree <= d_i in equation i; Bezout many solutions."""
    n = len(degrees)
    if n == 0 or min(degrees) < 1:
        raise ValueError("degrees must be positive")
    supports = []
    for d in degrees:
        supports.append([e for e in itertools.product(range(d + 1), repeat=n) if sum(e) <= d])
    return FamilySpec("dense", tuple(degrees), sparse_family(supports),
                      count=math.prod(degrees), count_source="Bezout bound (dense generic system)")


def cyclic_supports(n: int) -> list[list[tuple[int, ...]]]:
    supports = []
    for i in range(1, n):
        eq = []
        for j in range(n):
            e = [0] * n
            for k in range(j, j + i):
                e[k % n] += 1
            eq.append(tuple(e))
        supports.append(eq)
    supports.append([(1,) * n, (0,) * n])
    return supports


def cyclic_family(n: int) -> FamilySpec:
    """Cyclic n-roots support with a parameter on every coefficient."""
    if n < 3:
        raise ValueError("cyclic family needs n >= 3")
    count = CYCLIC_COUNTS.get(n)
    return FamilySpec("cyclic", (n,), sparse_family(cyclic_supports(n)), count=count,
                      count_source="published mixed volume" if count else None)


def katsura_supports(n: int) -> list[list[tuple[int, ...]]]:
    """Supports of Katsura-(n-1) in the unknowns u_0..u_{n-1}.

    Equations ``u_m = sum_{l=-N}^{N} u_|l| u_|m-l|`` for ``m = 0..N-1`` and
    ``u_0 + 2 sum u_i = 1``, with ``N = n - 1`` and ``u_k = 0`` for ``k > N``.
    """
    N = n - 1

    def unit(*idx):
        e = [0] * n
        for i in idx:
            e[i] += 1
        return tuple(e)

    supports = []
    for m in range(N):
        monos = {unit(m)}
        for l in range(-N, N + 1):
            a, b = abs(l), abs(m - l)
            if a <= N and b <= N:
                monos.add(unit(a, b))
        supports.append(sorted(monos, reverse=True))
    supports.append([unit(i) for i in range(n)] + [(0,) * n])
    return supports


def katsura_family(n: int) -> FamilySpec:
    if n < 2:
        raise ValueError("katsura family needs n >= 2")
    count = KATSURA_COUNTS.get(n)
    return FamilySpec("katsura", (n,), sparse_family(katsura_supports(n)), count=count,
                      count_source="published BKK bound" if count else None)


def nash_family(players: int, options: int) -> FamilySpec:
    """Totally mixed Nash equilibria of a game with generic payoffs.

    Unknowns are ``q[i][k]``, the probability that player ``i`` picks option
    ``k`` for ``k < options - 1``; the last probability is ``1 - sum``.  The
    payoff ``a[i][k_1, ..., k_N]`` is parameter number
    ``i * options**N + ravel(k_1, ..., k_N)``.  Equations are
    ``P_1^(i) - P_j^(i)`` for ``j = 2..options``.
    """
    N, m = players, options
    if N < 2 or m < 2:
        raise ValueError("need at least 2 players with 2 options")
    n = N * (m - 1)

    def var(i, k):
        return i * (m - 1) + k

    def prob_form(i, k):
        # Linear form of p^(i)_k as {variable or None: coefficient}.
        if k < m - 1:
            return {var(i, k): 1}
        form = {None: 1}
        for r in range(m - 1):
            form[var(i, r)] = -1
        return form

    def expand(forms):
        poly = {(0,) * n: 1}
        for form in forms:
            nxt: dict[tuple[int, ...], int] = {}
            for e, c in poly.items():
                for v, a in form.items():
                    e2 = list(e)
                    if v is not None:
                        e2[v] += 1
                    e2 = tuple(e2)
                    nxt[e2] = nxt.get(e2, 0) + c * a
            poly = {e: c for e, c in nxt.items() if c != 0}
        return poly

    per_player = m ** N
    equations = []
    for i in range(N):
        others = [l for l in range(N) if l != i]
        for j in range(1, m):
            terms = []
            for ks in itertools.product(range(m), repeat=N - 1):
                poly = expand([prob_form(l, k) for l, k in zip(others, ks)])
                full = list(ks)
                full.insert(i, 0)
                first = i * per_player + int(np.ravel_multi_index(full, (m,) * N))
                full[i] = j
                other = i * per_player + int(np.ravel_multi_index(full, (m,) * N))
                for e, c in poly.items():
                    terms.append(Term(e, 0j, {first: c, other: -c}))
            equations.append(terms)
    system = ParametricSystem.from_equations(equations, n, N * per_player)
    count = NASH_COUNTS.get((N, m))
    return FamilySpec("nash", (N, m), system, count=count,
                      count_source="published root count" if count else None)


CRN_VARIABLES = ("xA", "xB", "xC", "xD", "xE")
CRN_PARAMETERS = ("k1", "k2", "k3", "k4", "k5", "k6", "c1", "c2")


def crn_equations() -> ParametricSystem:
    """Steady-state and conservation equations of the 5-species network
    ``A <-> 2B``, ``A + C <-> D``, ``D -> B + E``, ``B + E -> A + C``
    (7 equations, 5 unknowns, parameters k1..k6, c1, c2)."""
    k1, k2, k3, k4, k5, k6, c1, c2 = range(8)

    def mono(**powers):
        return tuple(powers.get(v, 0) for v in ("A", "B", "C", "D", "E"))

    xB2 = mono(B=2)
    xA = mono(A=1)
    xAxC = mono(A=1, C=1)
    xD = mono(D=1)
    xBxE = mono(B=1, E=1)
    one = mono()
    eqs = [
        [Term(xB2, 0, {k1: 1}), Term(xA, 0, {k2: -1}), Term(xAxC, 0, {k3: -1}),
         Term(xD, 0, {k4: 1}), Term(xBxE, 0, {k5: 1})],
        # Mass-action rate of B; this is the form under which both
        # conservation rows below are conserved quantities.
        [Term(xA, 0, {k2: 2}), Term(xB2, 0, {k1: -2}), Term(xD, 0, {k6: 1}),
         Term(xBxE, 0, {k5: -1})],
        [Term(xAxC, 0, {k3: -1}), Term(xD, 0, {k4: 1}), Term(xBxE, 0, {k5: 1})],
        [Term(xAxC, 0, {k3: 1}), Term(xD, 0, {k4: -1, k6: -1})],
        [Term(xBxE, 0, {k5: -1}), Term(xD, 0, {k6: 1})],
        [Term(mono(A=1), 2), Term(mono(B=1), 1), Term(mono(C=1), -1), Term(mono(D=1), 1),
         Term(one, 0, {c1: -1})],
        [Term(mono(A=1), -2), Term(mono(B=1), -1), Term(mono(C=1), 2), Term(mono(E=1), 1),
         Term(one, 0, {c2: -1})],
    ]
    return ParametricSystem.from_equations(eqs, 5, 8, var_names=CRN_VARIABLES)


def crn_small(rng: np.random.Generator | None = None) -> FamilySpec:
    """The 5-species reaction network squared to 5 x 5 by a random combination."""
    if rng is None:
        rng = np.random.default_rng(0)
    system = square_system(crn_equations(), rng)
    return FamilySpec("crn-small", (), system, count=CRN_SMALL_COUNT,
                      count_source="published solution count",
                      metadata={"squaring_matrix": system.squaring_matrix})


def load_sparse(path: str | Path) -> FamilySpec:
    """Read ``{"supports": [[[e, ...], ...], ...], "count": optional}``."""
    data = json.loads(Path(path).read_text())
    try:
        supports = data["supports"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: expected a 'supports' list") from exc
    count = data.get("count")
    return FamilySpec("sparse", (f"@{path}",), sparse_family(supports), count=count,
                      count_source="supplied by input file" if count is not None else None)


def parse_family(text: str, rng: np.random.Generator | None = None) -> FamilySpec:
    """Resolve a family name such as ``cyclic:7``, ``katsura:6``, ``nash:3x3``,
    ``crn-small``, ``dense:2,2`` or ``sparse:@file.json``."""
    name, _, arg = text.partition(":")
    try:
        if name == "cyclic":
            return cyclic_family(int(arg))
        if name == "katsura":
            return katsura_family(int(arg))
        if name == "nash":
            players, options = arg.lower().split("x")
            return nash_family(int(players), int(options))
        if name == "crn-small" and not arg:
            return crn_small(rng)
        if name == "dense":
            return dense_family([int(d) for d in arg.split(",")])
        if name == "sparse" and arg.startswith("@"):
            return load_sparse(arg[1:])
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad family {text!r}: {exc}") from exc
    raise ValueError(f"unknown family {text!r}")
