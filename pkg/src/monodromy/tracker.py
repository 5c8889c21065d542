"""Predictor-corrector tracking of a single homotopy path."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .polysys import Homotopy, SquareSystem


class SingularMatrixError(ArithmeticError):
    pass


class TrackStatus(str, enum.Enum):
    SUCCESS = "success"
    SINGULAR_JACOBIAN = "singular-jacobian"
    MIN_STEP_REACHED = "min-step-reached"
    STEP_BUDGET_EXHAUSTED = "step-budget-exhausted"
    DIVERGED = "diverged"


_STATUS = {
    _kernels.SUCCESS: TrackStatus.SUCCESS,
    _kernels.SINGULAR: TrackStatus.SINGULAR_JACOBIAN,
    _kernels.MIN_STEP: TrackStatus.MIN_STEP_REACHED,
    _kernels.BUDGET: TrackStatus.STEP_BUDGET_EXHAUSTED,
    _kernels.DIVERGED: TrackStatus.DIVERGED,
}


@dataclass(frozen=True)
class TrackOptions:
    """Tracker settings.  ``grow_after`` accepted steps in a row multiply the
    step by ``growth``; a failed corrector multiplies it by ``shrink``.

    ``contraction`` is the largest allowed ratio between consecutive Newton
    updates inside the corrector; slower contraction rejects the step.
    """

    tol: float = 1e-8
    max_newton: int = 3
    initial_step: float = 0.05
    min_step: float = 1e-7
    max_step: float = 0.1
    max_steps: int = 10_000
    shrink: float = 0.5
    growth: float = 1.5
    grow_after: int = 3
    predictor: str = "euler"
    diverge_norm: float = 1e8
    contraction: float = 0.25

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial_step <= 1:
            raise ValueError("need 0 < min_step <= initial_step <= 1")
        if self.max_step < self.initial_step:
            raise ValueError("max_step must be at least initial_step")
        if not self.shrink < 1 < self.growth:
            raise ValueError("need shrink < 1 < growth")
        if self.shrink <= 0:
            raise ValueError("shrink must be positive")
        if self.tol <= 0 or self.max_newton < 1 or self.max_steps < 1 or self.grow_after < 1:
            raise ValueError("tol, max_newton, max_steps and grow_after must be positive")
        if not 0 < self.contraction <= 1:
            raise ValueError("contraction must lie in (0, 1]")
        if self.predictor not in ("euler", "rk4"):
            raise ValueError(f"unknown predictor {self.predictor!r}")


@dataclass(frozen=True)
class TrackOutcome:
    status: TrackStatus
    endpoint: np.ndarray | None
    steps: int
    newton_iterations: int

    @property
    def success(self) -> bool:
        return self.status is TrackStatus.SUCCESS


class NewtonResult(NamedTuple):
    x: np.ndarray
    residual: float
    converged: bool
    iterations: int
    reason: str


def lu_solve(A, b) -> np.ndarray:
    """Solve ``A x = b`` by LU with partial pivoting.

    Raises :class:`SingularMatrixError` when a pivot drops below
    ``1e-14 * max|A_ij|``.
    """
    A = np.ascontiguousarray(A, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    if b.shape != (A.shape[0],):
        raise ValueError("b has the wrong length")
    x, ok = _kernels.lu_solve(A, b)
    if not ok:
        raise SingularMatrixError("matrix is numerically singular")
    return x


def newton_refine(S: SquareSystem, x, tol: float = 1e-8, max_iter: int = 10) -> NewtonResult:
    """Newton iteration ``x <- x - J(x)^-1 F(x)`` until
    ``S.residual(x) <= tol`` or ``max_iter`` updates.  The reported residual
    is that relative residual."""
    s = S.system
    x0 = np.ascontiguousarray(x, dtype=np.complex128)
    if x0.shape != (s.num_vars,):
        raise ValueError(f"x must have length {s.num_vars}")
    xn, res, conv, its, singular = _kernels.newton(
        s.exponents, s.eq_index, S.coefficients, x0, s.num_equations, tol, max_iter)
    reason = "converged" if conv else ("singular-jacobian" if singular else "max-iterations")
    return NewtonResult(xn, float(res), bool(conv), int(its), reason)


def track_path(H: Homotopy, x_start, opts: TrackOptions | None = None) -> TrackOutcome:
    """Follow the solution path of ``H`` from ``t = 0`` to ``t = 1``.

    Numerical trouble is reported through :attr:`TrackOutcome.status`, never
    raised.
    """
    opts = opts or TrackOptions()
    s = H.system
    if not s.is_square:
        raise ValueError("homotopy system must be square")
    x0 = np.ascontiguousarray(x_start, dtype=np.complex128)
    if x0.shape != (s.num_vars,):
        raise ValueError(f"x_start must have length {s.num_vars}")
    c_start = H.start_coefficients
    c_target = H.target_coefficients
    if H.is_constant:
        x, _, conv, its, _ = _kernels.newton(s.exponents, s.eq_index, c_target, x0,
                                             s.num_vars, opts.tol, opts.max_newton)
        if conv:
            return TrackOutcome(TrackStatus.SUCCESS, x, 1, int(its))
        return TrackOutcome(TrackStatus.MIN_STEP_REACHED, None, 1, int(its))
    code, x, steps, its = _kernels.track(
        s.exponents, s.eq_index, c_start, c_target, x0,
        opts.tol, opts.max_newton, opts.initial_step, opts.min_step, opts.max_step,
        opts.max_steps, opts.shrink, opts.growth, opts.grow_after,
        opts.predictor == "rk4", opts.diverge_norm, opts.contraction)
    status = _STATUS[code]
    endpoint = x if status is TrackStatus.SUCCESS else None
    return TrackOutcome(status, endpoint, int(steps), int(its))
