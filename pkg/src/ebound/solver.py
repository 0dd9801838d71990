"""Proximal gradient method with fixed or backtracking step sizes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientDataError, LineSearchError
from .losses import GeneralQuadratic, LeastSquares, Logistic
from .problem import ProblemInstance, residual_map
from .space import inner, norm

_MIN_STEP = 1e-14

CONVERGED = "converged"
ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class Fixed:
    t: float


@dataclass(frozen=True)
class Backtracking:
    beta: float = 0.5
    t0: float = 1.0


def lipschitz_bound(prob: ProblemInstance):
    """Global Lipschitz constant of ∇f when the loss admits one
    (L_h · ‖A‖²), else None.  1/L is a safe fixed step."""
    h = prob.smooth.h
    if isinstance(h, LeastSquares):
        L_h = 1.0
    elif isinstance(h, GeneralQuadratic):
        L_h = float(np.linalg.norm(h.B, 2))
    elif isinstance(h, Logistic):
        L_h = 0.25
    else:
        return None
    return L_h * prob.smooth.A.operator_norm() ** 2


@dataclass
class SolveTrace:
    """Per-iteration record (k, F(xₖ), ‖R(xₖ)‖, step) plus the terminal point."""

    iterations: list
    terminal: np.ndarray
    status: str

    @property
    def residuals(self) -> np.ndarray:
        return np.array([row[2] for row in self.iterations])


def proximal_gradient(
    prob: ProblemInstance,
    x0,
    step=Backtracking(),
    tol: float = 1e-9,
    max_iter: int = 20000,
) -> SolveTrace:
    """Iterate x⁺ = prox_{tP}(x − t∇f(x)) until ‖R(x)‖ ≤ tol.

    Backtracking halves t until the quadratic upper bound
    f(x⁺) ≤ f(x) + ⟨∇f(x), x⁺ − x⟩ + ‖x⁺ − x‖²/(2t) holds; steps that leave
    dom(f) count as failures.  The recorded residual is always the unit-step
    R(x), independent of the step size actually taken.
    """
    x = np.asarray(x0, dtype=float)
    if not prob.smooth.in_domain(x) or not np.isfinite(prob.reg.value(x)):
        raise DomainError("x0 lies outside dom(f) ∩ dom(P)")

    rows = []
    t = step.t0 if isinstance(step, Backtracking) else step.t
    for k in range(max_iter + 1):
        r = norm(residual_map(prob, x))
        rows.append((k, prob.smooth.value(x) + prob.reg.value(x), r, t))
        if r <= tol:
            return SolveTrace(rows, x, CONVERGED)
        if k == max_iter:
            break

        g = prob.smooth.gradient(x)
        fx = prob.smooth.value(x)
        if isinstance(step, Fixed):
            x = prob.reg.prox(x - t * g, t)
        else:
            # warm-started: keep the last accepted t, halve until the
            # quadratic upper bound holds (up to a few ulps of f)
            while True:
                cand = prob.reg.prox(x - t * g, t)
                dx = cand - x
                if prob.smooth.in_domain(cand):
                    fc = prob.smooth.value(cand)
                    bound = fx + inner(g, dx) + float(np.sum(dx * dx)) / (2.0 * t)
                    slack = 4.0 * np.finfo(float).eps * max(1.0, abs(fx), abs(fc))
                    if fc <= bound + slack:
                        break
                t *= step.beta
                if t < _MIN_STEP:
                    raise LineSearchError(f"step collapsed below {_MIN_STEP:g} at iteration {k}")
            x = cand

    return SolveTrace(rows, x, ITERATION_LIMIT)


def estimate_linear_rate(trace: SolveTrace, min_r_squared: float = 0.9):
    """Geometric decay factor of ‖R(xₖ)‖ fitted on the tail half of the trace.

    Returns exp(slope) of the least-squares line through (k, log ‖R(xₖ)‖),
    or None when the fit explains less than min_r_squared of the variance.
    """
    ks = np.array([row[0] for row in trace.iterations], dtype=float)
    rs = trace.residuals
    keep = rs > 0
    ks, rs = ks[keep], rs[keep]
    if ks.size < 10:
        raise InsufficientDataError(f"need >= 10 iterations with positive residual, got {ks.size}")
    half = ks.size // 2
    ks, logr = ks[half:], np.log(rs[half:])
    slope, intercept = np.polyfit(ks, logr, 1)
    fitted = slope * ks + intercept
    ss_res = float(np.sum((logr - fitted) ** 2))
    ss_tot = float(np.sum((logr - logr.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    if r_squared < min_r_squared:
        return None
    return float(math.exp(slope))
