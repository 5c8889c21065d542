"""Polynomial systems whose coefficients are affine-linear in parameters.

A system with ``N`` equations in ``n`` variables and ``m`` parameters is
stored as a flat list of terms.  Term ``t`` belongs to equation
``eq_index[t]``, has exponent vector ``exponents[t]`` and coefficient

    coefficients[t, 0] + sum_k coefficients[t, k + 1] * p[k]

so for fixed ``x`` the system is an affine map ``p -> A(x) p + b(x)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, NamedTuple, Sequence

import numpy as np
import scipy.linalg

from . import _kernels


class SeedingError(RuntimeError):
    """The linear system ``F_p(x0) = 0`` in ``p`` has no solution."""


class Term(NamedTuple):
    exps: tuple[int, ...]
    c0: complex = 0j
    cp: Mapping[int, complex] = {}


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ParametricSystem:
    num_vars: int
    num_params: int
    num_equations: int
    exponents: np.ndarray
    eq_index: np.ndarray
    coefficients: np.ndarray
    # For a squared system: the original equations, used for seeding.
    unsquared: ParametricSystem | None = None
    squaring_matrix: np.ndarray | None = None
    var_names: tuple[str, ...] | None = None
    _selector: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        exps = np.ascontiguousarray(self.exponents, dtype=np.int64)
        eq = np.ascontiguousarray(self.eq_index, dtype=np.int64)
        coefs = np.ascontiguousarray(self.coefficients, dtype=np.complex128)
        if exps.ndim != 2 or exps.shape[1] != self.num_vars:
            raise ValueError(f"exponent vectors must have length {self.num_vars}")
        if coefs.shape != (exps.shape[0], self.num_params + 1):
            raise ValueError(f"coefficient forms must have {self.num_params} parameter slots")
        if eq.shape != (exps.shape[0],):
            raise ValueError("one equation index per term required")
        if exps.size and exps.min() < 0:
            raise ValueError("exponents must be nonnegative")
        if eq.size and (eq.min() < 0 or eq.max() >= self.num_equations):
            raise ValueError("equation index out of range")
        selector = np.zeros((self.num_equations, exps.shape[0]))
        selector[eq, np.arange(exps.shape[0])] = 1.0
        object.__setattr__(self, "exponents", _readonly(exps))
        object.__setattr__(self, "eq_index", _readonly(eq))
        object.__setattr__(self, "coefficients", _readonly(coefs))
        object.__setattr__(self, "_selector", _readonly(selector))

    @classmethod
    def from_equations(cls, equations: Sequence[Sequence[Term]], num_vars: int,
                       num_params: int, var_names=None) -> ParametricSystem:
        """Build a system from per-equation lists of :class:`Term`.

        Terms with equal exponents inside one equation are merged.
        """
        exps, eqs, coefs = [], [], []
        for i, eq in enumerate(equations):
            merged: dict[tuple[int, ...], np.ndarray] = {}
            for term in eq:
                e = tuple(int(v) for v in term.exps)
                if len(e) != num_vars:
                    raise ValueError(f"exponent vector {e} does not have length {num_vars}")
                form = np.zeros(num_params + 1, dtype=complex)
                form[0] = term.c0
                for k, c in term.cp.items():
                    if not 0 <= int(k) < num_params:
                        raise ValueError(f"parameter index {k} out of range")
                    form[int(k) + 1] += c
                if e in merged:
                    merged[e] = merged[e] + form
                else:
                    merged[e] = form
            for e, form in merged.items():
                exps.append(e)
                eqs.append(i)
                coefs.append(form)
        return cls(
            num_vars=num_vars,
            num_params=num_params,
            num_equations=len(equations),
            exponents=np.array(exps, dtype=np.int64).reshape(-1, num_vars),
            eq_index=np.array(eqs, dtype=np.int64),
            coefficients=np.array(coefs, dtype=complex).reshape(-1, num_params + 1),
            var_names=tuple(var_names) if var_names is not None else None,
        )

    @property
    def equations(self) -> list[list[Term]]:
        out: list[list[Term]] = [[] for _ in range(self.num_equations)]
        for e, i, form in zip(self.exponents, self.eq_index, self.coefficients):
            cp = {k: complex(c) for k, c in enumerate(form[1:]) if c != 0}
            out[i].append(Term(tuple(int(v) for v in e), complex(form[0]), cp))
        return out

    @property
    def num_terms(self) -> int:
        return self.exponents.shape[0]

    @property
    def is_square(self) -> bool:
        return self.num_equations == self.num_vars

    def coefficients_at(self, p) -> np.ndarray:
        """Numeric term coefficients of ``F_p``."""
        p = _vector(p, self.num_params, "p")
        return self.coefficients[:, 0] + self.coefficients[:, 1:] @ p

    def specialize(self, p) -> SquareSystem:
        return SquareSystem(self, np.array(_vector(p, self.num_params, "p")))

    def to_json(self) -> dict:
        eqs = []
        for eq in self.equations:
            eqs.append([
                {
                    "exps": list(t.exps),
                    "c0": [t.c0.real, t.c0.imag],
                    "cp": {str(k): [c.real, c.imag] for k, c in t.cp.items()},
                }
                for t in eq
            ])
        return {"vars": self.num_vars, "params": self.num_params, "equations": eqs}

    @classmethod
    def from_json(cls, data: dict | str) -> ParametricSystem:
        """Parse the JSON system format.

        ``{"vars": n, "params": m, "equations": [[{"exps": [...],
        "c0": [re, im], "cp": {"k": [re, im], ...}}, ...], ...]}`` with
        0-based parameter indices ``k``.
        """
        if isinstance(data, str):
            data = json.loads(data)
        try:
            n = int(data["vars"])
            m = int(data["params"])
            equations = [
                [
                    Term(
                        tuple(term["exps"]),
                        complex(*term.get("c0", [0.0, 0.0])),
                        {int(k): complex(*v) for k, v in term.get("cp", {}).items()},
                    )
                    for term in eq
                ]
                for eq in data["equations"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed system JSON: {exc}") from exc
        return cls.from_equations(equations, n, m)


@dataclass(frozen=True, eq=False)
class SquareSystem:
    """``scale * F_p`` for a fixed parameter point ``p``."""

    system: ParametricSystem
    p: np.ndarray
    scale: complex = 1.0

    def __post_init__(self):
        if not self.system.is_square:
            raise ValueError(
                f"system has {self.system.num_equations} equations in "
                f"{self.system.num_vars} variables; square it first")

    @property
    def coefficients(self) -> np.ndarray:
        return self.scale * self.system.coefficients_at(self.p)

    def scaled(self, gamma: complex) -> SquareSystem:
        return SquareSystem(self.system, self.p, self.scale * gamma)

    def evaluate(self, x) -> np.ndarray:
        s = self.system
        return _kernels.evaluate(s.exponents, s.eq_index, self.coefficients,
                                 _vector(x, s.num_vars, "x"), s.num_equations)

    def jacobian(self, x) -> np.ndarray:
        s = self.system
        return _kernels.evaluate_jacobian(s.exponents, s.eq_index, self.coefficients,
                                          _vector(x, s.num_vars, "x"), s.num_equations)[1]

    def residual(self, x) -> float:
        """``max_i |f_i(x)| / (1 + sum_T |c_T x^e_T|)``, the residual measured
        against the size of the terms that cancel in equation ``i``."""
        s = self.system
        return float(_kernels.residual(s.exponents, s.eq_index, self.coefficients,
                                       _vector(x, s.num_vars, "x"), s.num_equations))


def _vector(v, length: int, name: str) -> np.ndarray:
    a = np.ascontiguousarray(v, dtype=np.complex128).reshape(-1)
    if a.shape[0] != length:
        raise ValueError(f"{name} has length {a.shape[0]}, expected {length}")
    return a


def evaluate(F: ParametricSystem, p, x) -> np.ndarray:
    """``F_p(x)``, one entry per equation."""
    x = _vector(x, F.num_vars, "x")
    return _kernels.evaluate(F.exponents, F.eq_index, F.coefficients_at(p), x, F.num_equations)


def jacobian_x(F: ParametricSystem, p, x) -> np.ndarray:
    """``N x n`` matrix of partial derivatives in the variables."""
    x = _vector(x, F.num_vars, "x")
    return _kernels.evaluate_jacobian(F.exponents, F.eq_index, F.coefficients_at(p), x,
                                      F.num_equations)[1]


def affine_parts(F: ParametricSystem, x) -> tuple[np.ndarray, np.ndarray]:
    """``(A(x), b(x))`` with ``F_p(x) = A(x) p + b(x)`` for every ``p``."""
    x = _vector(x, F.num_vars, "x")
    mono = _kernels.monomials(F.exponents, x)
    weighted = F.coefficients * mono[:, None]
    full = F._selector @ weighted
    return full[:, 1:], full[:, 0]


def jacobian_p(F: ParametricSystem, p, x) -> np.ndarray:
    """``N x m`` matrix of the affine map ``p -> F_p(x)``; independent of ``p``."""
    _vector(p, F.num_params, "p")
    return affine_parts(F, x)[0]


@dataclass(frozen=True, eq=False)
class Homotopy:
    """``H(t, x) = (1 - t) gamma_start F_{p_start}(x) + t gamma_target F_{p_target}(x)``."""

    system: ParametricSystem
    p_start: np.ndarray
    p_target: np.ndarray
    gamma_start: complex
    gamma_target: complex

    @cached_property
    def start_coefficients(self) -> np.ndarray:
        return self.gamma_start * self.system.coefficients_at(self.p_start)

    @cached_property
    def target_coefficients(self) -> np.ndarray:
        return self.gamma_target * self.system.coefficients_at(self.p_target)

    @cached_property
    def is_constant(self) -> bool:
        return bool(np.all(self.start_coefficients == self.target_coefficients))

    def evaluate(self, t: float, x) -> np.ndarray:
        f1 = evaluate(self.system, self.p_start, x)
        f2 = evaluate(self.system, self.p_target, x)
        return (1 - t) * (self.gamma_start * f1) + t * (self.gamma_target * f2)

    def jacobian_x(self, t: float, x) -> np.ndarray:
        j1 = jacobian_x(self.system, self.p_start, x)
        j2 = jacobian_x(self.system, self.p_target, x)
        return (1 - t) * (self.gamma_start * j1) + t * (self.gamma_target * j2)

    def derivative_t(self, x) -> np.ndarray:
        f1 = evaluate(self.system, self.p_start, x)
        f2 = evaluate(self.system, self.p_target, x)
        return self.gamma_target * f2 - self.gamma_start * f1

    def reversed(self) -> Homotopy:
        return Homotopy(self.system, self.p_target, self.p_start,
                        self.gamma_target, self.gamma_start)


def build_homotopy(F: ParametricSystem, p1, p2, gamma1: complex = 1.0,
                   gamma2: complex = 1.0) -> Homotopy:
    if gamma1 == 0 or gamma2 == 0:
        raise ValueError("gamma must be nonzero")
    p1 = np.array(_vector(p1, F.num_params, "p1"))
    p2 = np.array(_vector(p2, F.num_params, "p2"))
    return Homotopy(F, _readonly(p1), _readonly(p2), complex(gamma1), complex(gamma2))


def random_complex(rng: np.random.Generator, size, radius: float = 1.0) -> np.ndarray:
    """Uniform samples from the box ``[-radius, radius]^2`` per complex entry."""
    return rng.uniform(-radius, radius, size) + 1j * rng.uniform(-radius, radius, size)


def create_seed_pair(F: ParametricSystem, rng: np.random.Generator):
    """Pick ``x0`` at random and ``p0`` generic in ``{p : F_p(x0) = 0}``.

    Squared systems are seeded through their original equations so that the
    seed lies on the solution set of the unsquared family.
    """
    G = F.unsquared if F.unsquared is not None else F
    x0 = random_complex(rng, G.num_vars)
    A, b = affine_parts(G, x0)
    scale = 1.0 + np.linalg.norm(b, np.inf)
    if G.num_params == 0:
        raise SeedingError("family has no parameters")
    particular, *_ = scipy.linalg.lstsq(A, -b)
    if np.linalg.norm(A @ particular + b, np.inf) > 1e-8 * scale:
        raise SeedingError("F_p(x0) = 0 has no solution p for random x0")
    kernel = scipy.linalg.null_space(A)
    p0 = particular + kernel @ random_complex(rng, kernel.shape[1])
    for _ in range(3):
        r = A @ p0 + b
        if np.linalg.norm(r, np.inf) <= 1e-13 * scale:
            break
        p0 = p0 - scipy.linalg.lstsq(A, r)[0]
    return p0, x0


def square_system(F: ParametricSystem, rng: np.random.Generator) -> ParametricSystem:
    """Replace ``N > n`` equations by ``n`` random linear combinations."""
    N, n = F.num_equations, F.num_vars
    if N < n:
        raise ValueError(f"cannot square {N} equations in {n} unknowns")
    if N == n:
        return F
    M = random_complex(rng, (n, N))
    exps, eqs, coefs = [], [], []
    for r in range(n):
        merged: dict[tuple[int, ...], np.ndarray] = {}
        for e, i, form in zip(F.exponents, F.eq_index, F.coefficients):
            key = tuple(int(v) for v in e)
            merged[key] = merged.get(key, 0) + M[r, i] * form
        for key, form in merged.items():
            exps.append(key)
            eqs.append(r)
            coefs.append(form)
    return ParametricSystem(
        num_vars=n,
        num_params=F.num_params,
        num_equations=n,
        exponents=np.array(exps, dtype=np.int64),
        eq_index=np.array(eqs, dtype=np.int64),
        coefficients=np.array(coefs),
        unsquared=F,
        squaring_matrix=_readonly(M),
        var_names=F.var_names,
    )
