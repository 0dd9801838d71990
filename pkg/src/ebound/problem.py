"""Composite problem assembly: F = f + P, the proximal residual map,
optimality certification, and distance to the optimal set.

The optimal set is the intersection of the affine piece {x : A(x) = ȳ} and
the inverse image Γ_P(ḡ); its nearest point is computed by Dykstra's
alternating projections unless the optimum is known to be unique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, NotOptimalError
from .losses import CompositeSmooth
from .regularizers import Regularizer
from .space import affine_project, norm

CERT_TOL = 1e-9


@dataclass(frozen=True)
class ProblemInstance:
    smooth: CompositeSmooth
    reg: Regularizer
    feasible_point: np.ndarray

    def __post_init__(self):
        x0 = np.asarray(self.feasible_point, dtype=float)
        object.__setattr__(self, "feasible_point", x0)
        if not self.smooth.in_domain(x0):
            raise DomainError("feasible_point lies outside dom(f)")
        if not np.isfinite(self.reg.value(x0)):
            raise DomainError("feasible_point lies outside dom(P)")

    @property
    def strongly_convex(self) -> bool:
        """f itself is strongly convex on compacts (identity A, suitable h)."""
        return self.smooth.A.is_identity and self.smooth.h.strongly_convex_on_compacts


@dataclass(frozen=True)
class OptimalityCertificate:
    """A verified optimum x* with the solution-set invariants
    ȳ = A(x*) and ḡ = ∇f(x*)."""

    x_star: np.ndarray
    y_bar: np.ndarray
    g_bar: np.ndarray
    residual_norm: float
    tol: float


def objective(prob: ProblemInstance, x) -> float:
    """F(x) = f(x) + P(x); +inf when P is an indicator and x is infeasible."""
    return prob.smooth.value(x) + prob.reg.value(x)


def residual_map(prob: ProblemInstance, x) -> np.ndarray:
    """R(x) = prox_P(x − ∇f(x)) − x, with the unit prox step."""
    x = np.asarray(x, dtype=float)
    return prob.reg.prox_diff(x, prob.smooth.gradient(x))


def certify(prob: ProblemInstance, x, tol: float = CERT_TOL) -> OptimalityCertificate:
    """Verify ‖R(x)‖ ≤ tol and freeze the invariants (ȳ, ḡ)."""
    x = np.asarray(x, dtype=float)
    r = norm(residual_map(prob, x))
    if r > tol:
        raise NotOptimalError(r, tol)
    return OptimalityCertificate(
        x_star=x,
        y_bar=prob.smooth.A(x),
        g_bar=prob.smooth.gradient(x),
        residual_norm=r,
        tol=tol,
    )


def r_alt(prob: ProblemInstance, cert: OptimalityCertificate, x) -> float:
    """The alternative residual ‖A(x) − ȳ‖ + d(−ḡ, ∂P(x))."""
    x = np.asarray(x, dtype=float)
    if not prob.reg.subdiff_nonempty(x):
        raise DomainError("∂P(x) is empty at the probe point")
    return norm(prob.smooth.A(x) - cert.y_bar) + prob.reg.subdiff_distance(x, -cert.g_bar)


def _dykstra(x0, project_a, project_b, tol, max_sweeps):
    """Projection of x0 onto the intersection of two closed convex sets."""
    x = np.asarray(x0, dtype=float).copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for _ in range(max_sweeps):
        y = project_a(x + p)
        p = x + p - y
        x_new = project_b(y + q)
        q = y + q - x_new
        gap = max(norm(y - x_new), norm(x_new - x))
        x = x_new
        if gap <= tol:
            return x
    raise ConvergenceError("Dykstra did not reach the intersection", gap)


def distance_to_solution_set(
    prob: ProblemInstance,
    cert: OptimalityCertificate,
    x,
    *,
    unique: bool = False,
    tol: float = 1e-10,
    max_sweeps: int = 10**4,
) -> float:
    """d(x, 𝒳) with 𝒳 = {z : A(z) = ȳ} ∩ Γ_P(ḡ).

    For strongly convex instances, or when the caller asserts the optimum is
    unique, this is just ‖x − x*‖.  Otherwise Dykstra alternates the exact
    affine projection with the Γ_P(ḡ) nearest-point map.
    """
    x = np.asarray(x, dtype=float)
    if unique or prob.strongly_convex:
        return norm(x - cert.x_star)
    image = prob.reg.inverse_image(cert.g_bar)
    image._require_nonempty()
    A = prob.smooth.A
    proj = _dykstra(
        x,
        lambda z: affine_project(z, A, cert.y_bar),
        image.project,
        tol,
        max_sweeps,
    )
    return norm(x - proj)
