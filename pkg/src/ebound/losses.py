"""Smooth losses h and the composite smooth part f = h∘A + ⟨c,·⟩."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidInputError
from .space import LinearMap, inner

# exp(y) overflows in double precision just above this
_POISSON_CAP = 700.0


class SmoothLoss:
    """Convex loss on the target space, C¹ on its (open) domain."""

    #: strongly convex with Lipschitz gradient on every compact convex
    #: subset of the domain; the regularity classification relies on it
    strongly_convex_on_compacts: bool = True

    def in_domain(self, y) -> bool:
        return True

    def value(self, y) -> float:
        raise NotImplementedError

    def gradient(self, y) -> np.ndarray:
        raise NotImplementedError

    def _check(self, y):
        y = np.asarray(y, dtype=float)
        if not self.in_domain(y):
            raise DomainError(f"{type(self).__name__}: point outside the loss domain")
        return y


@dataclass(frozen=True)
class LeastSquares(SmoothLoss):
    """h(y) = ½‖y − b‖²."""

    targets: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "targets", np.asarray(self.targets, dtype=float))

    def value(self, y):
        y = self._check(y)
        return 0.5 * float(np.sum((y - self.targets) ** 2))

    def gradient(self, y):
        y = self._check(y)
        return y - self.targets


@dataclass(frozen=True)
class GeneralQuadratic(SmoothLoss):
    """h(y) = ½‖B^{1/2}y − B^{−1/2}d‖² = ½yᵀBy − ⟨d,y⟩ + ½dᵀB⁻¹d, B ≻ 0."""

    B: np.ndarray
    d: np.ndarray
    _constant: float = field(init=False, repr=False)

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        d = np.asarray(self.d, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or d.ndim != 1 or d.size != B.shape[0]:
            raise InvalidInputError("GeneralQuadratic: B must be square and d conformable")
        if np.linalg.norm(B - B.T) > 1e-10 * max(1.0, np.linalg.norm(B)):
            raise InvalidInputError("GeneralQuadratic: B is not symmetric")
        w = np.linalg.eigvalsh((B + B.T) / 2.0)
        if w.min() <= 0:
            raise InvalidInputError(
                f"GeneralQuadratic: B is not positive definite (min eigenvalue {w.min():.3e})"
            )
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "_constant", 0.5 * float(d @ np.linalg.solve(B, d)))

    def value(self, y):
        y = self._check(y)
        return 0.5 * float(y @ self.B @ y) - float(self.d @ y) + self._constant

    def gradient(self, y):
        y = self._check(y)
        return self.B @ y - self.d


@dataclass(frozen=True)
class Logistic(SmoothLoss):
    """h(y) = Σᵢ log(1 + exp(−yᵢ bᵢ)) with labels bᵢ ∈ {−1, +1}."""

    labels: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.labels, dtype=float)
        if not np.all(np.isin(b, (-1.0, 1.0))):
            raise InvalidInputError("Logistic labels must be ±1")
        object.__setattr__(self, "labels", b)

    def value(self, y):
        y = self._check(y)
        return float(np.sum(np.logaddexp(0.0, -y * self.labels)))

    def gradient(self, y):
        y = self._check(y)
        # −b·sigmoid(−yb), written via tanh for stability at large |y|
        return -self.labels * 0.5 * (1.0 - np.tanh(0.5 * y * self.labels))


@dataclass(frozen=True)
class Poisson(SmoothLoss):
    """h(y) = Σᵢ (−yᵢ bᵢ + exp(yᵢ)) with counts bᵢ ∈ {0, 1, …}."""

    counts: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.counts, dtype=float)
        if np.any(b < 0) or np.any(b != np.round(b)):
            raise InvalidInputError("Poisson counts must be nonnegative integers")
        object.__setattr__(self, "counts", b)

    def in_domain(self, y):
        # exp overflow guard; the mathematical domain is all of T
        return bool(np.all(np.asarray(y) <= _POISSON_CAP))

    def value(self, y):
        y = self._check(y)
        return float(np.sum(-y * self.counts + np.exp(y)))

    def gradient(self, y):
        y = self._check(y)
        return -self.counts + np.exp(y)


@dataclass(frozen=True)
class NoncompactExample(SmoothLoss):
    """The two-variable loss on {(x, y) : x < 1}:

        h(x, y) = y·exp((x−1)/y)  if y > 0,   0  if y ≤ 0.

    Convex and C¹ on its domain, but flat on the y ≤ 0 half, so not
    strongly convex on compact sets.
    """

    strongly_convex_on_compacts: bool = False

    def in_domain(self, y):
        y = np.asarray(y)
        return y.shape == (2,) and y[0] < 1.0

    def value(self, y):
        y = self._check(y)
        a, b = y
        if b <= 0.0:
            return 0.0
        u = (a - 1.0) / b
        if u < -745.0:  # exp underflows; the value is indistinguishable from 0
            return 0.0
        return float(b * np.exp(u))

    def gradient(self, y):
        y = self._check(y)
        a, b = y
        if b <= 0.0:
            return np.zeros(2)
        u = (a - 1.0) / b
        if u < -745.0:
            return np.zeros(2)
        e = np.exp(u)
        return np.array([e, (1.0 - u) * e])


@dataclass(frozen=True)
class CompositeSmooth:
    """f(x) = h(A(x)) + ⟨c, x⟩ with gradient A*∇h(A(x)) + c."""

    h: SmoothLoss
    A: LinearMap
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))

    def in_domain(self, x) -> bool:
        return self.h.in_domain(self.A(np.asarray(x, dtype=float)))

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if not self.in_domain(x):
            raise DomainError("composite: A(x) outside the loss domain")
        return x

    def value(self, x) -> float:
        x = self._check(x)
        return self.h.value(self.A(x)) + inner(self.c, x)

    def gradient(self, x) -> np.ndarray:
        x = self._check(x)
        return self.A.adjoint(self.h.gradient(self.A(x))) + self.c
