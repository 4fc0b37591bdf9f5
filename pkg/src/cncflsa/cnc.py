"""Fused-lasso denoising with non-convex penalties kept globally convex.

The objective is

    F(x) = 0.5*||y - x||^2 + lambda0 * sum phi(x_n; a0)
                           + lambda1 * sum phi([diff(x)]_n; a1)

with phi a parameterized non-convex penalty.  F stays strictly convex as
long as the margin 1 - a0*lambda0 - 4*a1*lambda1 is nonnegative, because the
negative curvature of the penalties (bounded by a0, resp. a1 times the
largest eigenvalue of the squared difference operator, which is below 4)
never overcomes the unit curvature of the data term.  The solver majorizes
each penalty by the absolute value plus the tangent line of its smooth
residual, which turns every update into one exact L1 fused-lasso solve on a
shifted input.  There are no matrix inversions anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .penalties import PenaltySpec
from .prox import as_signal, diff_adjoint, fused_lasso_l1, _check_nonneg

# Roundoff tolerance when enforcing margin >= 0 on the convexity boundary.
MARGIN_TOL = 1e-12


class ConvexityError(ValueError):
    """Raised when a solve would run outside the certified convex regime."""


@dataclass
class CncConfig:
    """Full problem parameterization for :func:`solve`.

    lambda0/lambda1 must be positive; zero is allowed only with
    allow_degenerate=True, which reduces the inner step to pure TV denoising
    (lambda0 = 0) or pure soft thresholding (lambda1 = 0).  allow_nonconvex
    disables the convexity-margin precondition for experiments outside the
    certified region.
    """

    lambda0: float
    lambda1: float
    penalty0: PenaltySpec = field(default_factory=PenaltySpec)
    penalty1: PenaltySpec = field(default_factory=PenaltySpec)
    max_iter: int = 50
    tol: float = 1e-9
    allow_nonconvex: bool = False
    allow_degenerate: bool = False

    def __post_init__(self):
        self.lambda0 = _check_nonneg(self.lambda0, "lambda0")
        self.lambda1 = _check_nonneg(self.lambda1, "lambda1")
        if (self.lambda0 == 0.0 or self.lambda1 == 0.0) and not self.allow_degenerate:
            raise ValueError(
                "lambda0 and lambda1 must be positive; pass allow_degenerate=True "
                "to run with one of them disabled"
            )
        if not isinstance(self.penalty0, PenaltySpec) or not isinstance(self.penalty1, PenaltySpec):
            raise ValueError("penalty0 and penalty1 must be PenaltySpec instances")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        self.max_iter = int(self.max_iter)
        self.tol = float(self.tol)
        if not np.isfinite(self.tol) or self.tol <= 0.0:
            raise ValueError(f"tol must be a positive real, got {self.tol!r}")


@dataclass
class SolveResult:
    """Solution plus the recorded objective trajectory.

    objective_history[0] is the objective at the initializer and one more
    entry is appended per majorization-minimization update, so its length is
    iterations + 1 and it never increases along the way.
    """

    x: np.ndarray
    objective_history: np.ndarray
    iterations: int
    converged: bool


def convexity_margin_params(lambda0, lambda1, a0, a1):
    """Convexity margin 1 - a0*lambda0 - 4*a1*lambda1 from raw parameters."""
    return 1.0 - float(a0) * float(lambda0) - 4.0 * float(a1) * float(lambda1)


def convexity_margin(cfg: CncConfig) -> float:
    """Convexity margin of a configuration; nonnegative iff strict convexity
    of the objective is guaranteed."""
    return convexity_margin_params(cfg.lambda0, cfg.lambda1, cfg.penalty0.a, cfg.penalty1.a)


def select_a1(lambda0, lambda1, a0):
    """Largest difference-penalty non-convexity a1 that keeps the margin at 0.

    Returns (1 - a0*lambda0) / (4*lambda1), placing the parameters exactly on
    the convexity boundary so sparsity is induced as strongly as possible.
    """
    lambda0 = float(lambda0)
    lambda1 = float(lambda1)
    a0 = float(a0)
    if not (np.isfinite(lambda0) and lambda0 > 0.0) or not (np.isfinite(lambda1) and lambda1 > 0.0):
        raise ValueError("lambda0 and lambda1 must be positive")
    if not np.isfinite(a0) or a0 < 0.0:
        raise ValueError(f"a0 must be finite and >= 0, got {a0!r}")
    budget = a0 * lambda0
    if budget > 1.0 + MARGIN_TOL:
        raise ValueError(
            f"a0*lambda0 = {budget:.6g} exceeds 1; no nonnegative a1 can keep the problem convex"
        )
    return max(0.0, 1.0 - budget) / (4.0 * lambda1)


def objective(x, y, cfg: CncConfig) -> float:
    """Penalized objective F(x) for observation y under cfg."""
    x = as_signal(x, "x")
    y = as_signal(y, "y")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    r = y - x
    val = 0.5 * float(np.dot(r, r))
    val += cfg.lambda0 * float(np.sum(cfg.penalty0.value(x)))
    if x.size > 1:
        val += cfg.lambda1 * float(np.sum(cfg.penalty1.value(np.diff(x))))
    return val


def objective_smooth(x, y, cfg: CncConfig) -> float:
    """Twice continuously differentiable part G(x) of the objective.

    F(x) = G(x) + lambda0*||x||_1 + lambda1*||diff(x)||_1, and the convexity
    margin certifies strict convexity of G (hence of F).
    """
    x = as_signal(x, "x")
    y = as_signal(y, "y")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    r = y - x
    val = 0.5 * float(np.dot(r, r))
    val += cfg.lambda0 * float(np.sum(cfg.penalty0.residual(x)))
    if x.size > 1:
        val += cfg.lambda1 * float(np.sum(cfg.penalty1.residual(np.diff(x))))
    return val


def majorized_input(v, y, cfg: CncConfig):
    """Shifted observation fed to the inner fused-lasso step at iterate v.

    Returns y - lambda0*s0'(v) - lambda1*diff_adjoint(s1'(diff(v))), the
    input for which the L1 fused lasso minimizes the tangent-line majorizer
    of the objective at v.
    """
    v = as_signal(v, "v")
    y = as_signal(y, "y")
    if v.size != y.size:
        raise ValueError(f"length mismatch: {v.size} vs {y.size}")
    out = y - cfg.lambda0 * cfg.penalty0.residual_deriv(v)
    if v.size > 1:
        out = out - cfg.lambda1 * diff_adjoint(cfg.penalty1.residual_deriv(np.diff(v)))
    return out


def solve(y, cfg: CncConfig, init="flsa") -> SolveResult:
    """Minimize the penalized objective by majorization-minimization.

    Starts from the L1 fused-lasso solution (or zeros with init="zero"),
    then repeats: shift the observation via :func:`majorized_input`, solve
    one exact L1 fused lasso on it.  Each update decreases the objective.
    Stops when the relative objective change drops to cfg.tol or after
    cfg.max_iter updates.

    Raises ConvexityError when the margin is negative and cfg.allow_nonconvex
    is not set.
    """
    y = as_signal(y, "y")
    margin = convexity_margin(cfg)
    if margin < -MARGIN_TOL and not cfg.allow_nonconvex:
        raise ConvexityError(
            f"convexity margin {margin:.6g} is negative; set allow_nonconvex=True "
            "to run outside the certified regime"
        )
    if init == "flsa":
        x = fused_lasso_l1(y, cfg.lambda0, cfg.lambda1)
    elif init == "zero":
        x = np.zeros_like(y)
    else:
        raise ValueError(f"init must be 'flsa' or 'zero', got {init!r}")

    history = [objective(x, y, cfg)]
    converged = False
    iterations = 0
    for _ in range(cfg.max_iter):
        shifted = majorized_input(x, y, cfg)
        x = fused_lasso_l1(shifted, cfg.lambda0, cfg.lambda1)
        f = objective(x, y, cfg)
        prev = history[-1]
        history.append(f)
        iterations += 1
        if abs(prev - f) <= cfg.tol * max(1.0, abs(prev)):
            converged = True
            break
    return SolveResult(
        x=x,
        objective_history=np.asarray(history),
        iterations=iterations,
        converged=converged,
    )
