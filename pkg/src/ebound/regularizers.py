"""Regularizer families: values, proximal maps, and the two distance
computations that drive the error-bound diagnostics,

    subdiff_distance(x, s)        = d(s, ∂P(x)),
    inverse_image_distance(g, x)  = d(x, Γ_P(g)),  Γ_P(g) = {x : −g ∈ ∂P(x)}.

inverse_image(g) returns an explicit parameterization of Γ_P(g) whose
project() method realizes the nearest point; the distance is derived from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleTargetError, InvalidInputError
from .space import GROUP_TOL, norm, psd_project, svd

TAU_EQ = 1e-8


# ---------------------------------------------------------------------------
# inverse images Γ_P(g)
# ---------------------------------------------------------------------------

class InverseImage:
    """A parameterized closed convex set with a nearest-point map."""

    is_empty: bool = False
    reason: str = ""

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x) -> float:
        return norm(np.asarray(x, dtype=float) - self.project(x))

    def _require_nonempty(self):
        if self.is_empty:
            raise InfeasibleTargetError(f"inverse image is empty: {self.reason}")


@dataclass
class EmptyImage(InverseImage):
    reason: str
    is_empty: bool = True

    def project(self, x):
        self._require_nonempty()


@dataclass
class BoxImage(InverseImage):
    """Per-coordinate interval sets (L1, orthant indicator, zero weights)."""

    lo: np.ndarray
    hi: np.ndarray

    def project(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)


@dataclass
class PointImage(InverseImage):
    point: np.ndarray

    def project(self, x):
        return self.point.copy()


GROUP_EMPTY = "empty"
GROUP_ZERO = "zero"
GROUP_RAY = "ray"
GROUP_FULL = "full_space"


@dataclass
class GroupImage(InverseImage):
    """Per-group cases of the grouped-LASSO inverse image: each block is
    ∅, {0}, the ray {a·g_J : a ≤ 0}, or the whole subspace."""

    groups: tuple
    cases: tuple  # (tag, payload) per group; payload is g_J for rays
    n: int

    def __post_init__(self):
        empties = [i for i, (tag, _) in enumerate(self.cases) if tag == GROUP_EMPTY]
        if empties:
            self.is_empty = True
            self.reason = f"group {empties[0]} has ‖g_J‖ > ω_J"

    def project(self, x):
        self._require_nonempty()
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for J, (tag, payload) in zip(self.groups, self.cases):
            xj = x[J]
            if tag == GROUP_FULL:
                out[J] = xj
            elif tag == GROUP_ZERO:
                out[J] = 0.0
            else:  # ray along payload = g_J with nonpositive multiplier
                a = min(float(xj @ payload) / float(payload @ payload), 0.0)
                out[J] = a * payload
        return out


@dataclass
class NuclearImage(InverseImage):
    """Γ_P(G) for the nuclear norm: with −G = Ū Σ V̄ᵀ and s̄ unit singular
    values, the set is Ū [Z 0; 0 0] V̄ᵀ over positive semidefinite Z (s̄×s̄)."""

    U: np.ndarray
    V: np.ndarray
    sigma: np.ndarray
    s_bar: int

    def project(self, x):
        self._require_nonempty()
        x = np.asarray(x, dtype=float)
        M = self.U.T @ x @ self.V
        s = self.s_bar
        out = np.zeros_like(M)
        if s > 0:
            out[:s, :s] = psd_project(M[:s, :s])
        return self.U @ out @ self.V.T


# ---------------------------------------------------------------------------
# regularizers
# ---------------------------------------------------------------------------

class Regularizer:
    expects_matrix: bool = False
    #: Γ_P(ḡ) is polyhedral, so the bounded-linear-regularity condition
    #: holds without further assumptions
    polyhedral_solution_set: bool = False

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        want = 2 if self.expects_matrix else 1
        if x.ndim != want:
            kind = "matrix" if self.expects_matrix else "vector"
            raise InvalidInputError(f"{type(self).__name__} applies to {kind} elements")
        return x

    def value(self, x) -> float:
        raise NotImplementedError

    def prox(self, z, t: float = 1.0) -> np.ndarray:
        """prox_{tP}(z); the unit step t = 1 matches the residual map."""
        raise NotImplementedError

    def prox_diff(self, x, g) -> np.ndarray:
        """prox_P(x − g) − x.  Overridden where the difference can be formed
        without cancellation (needed when ‖g‖ is far below the ulp of x)."""
        x = np.asarray(x, dtype=float)
        return self.prox(x - np.asarray(g, dtype=float)) - x

    def subdiff_nonempty(self, x) -> bool:
        return True

    def subdiff_distance(self, x, s) -> float:
        raise NotImplementedError

    def inverse_image(self, g, tau_eq: float = TAU_EQ) -> InverseImage:
        raise NotImplementedError

    def inverse_image_distance(self, g, x, tau_eq: float = TAU_EQ) -> float:
        img = self.inverse_image(g, tau_eq)
        img._require_nonempty()
        return img.distance(self._check(x))


@dataclass(frozen=True)
class L1(Regularizer):
    """P(x) = λ‖x‖₁."""

    weight: float = 1.0
    polyhedral_solution_set: bool = True

    def __post_init__(self):
        if self.weight < 0:
            raise InvalidInputError("L1 weight must be >= 0")

    def value(self, x):
        return self.weight * float(np.sum(np.abs(self._check(x))))

    def prox(self, z, t=1.0):
        z = self._check(z)
        lam = t * self.weight
        return np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)

    def subdiff_distance(self, x, s):
        x, s = self._check(x), self._check(s)
        lam = self.weight
        active = x != 0
        dist_sq = np.sum((s[active] - lam * np.sign(x[active])) ** 2)
        dist_sq += np.sum(np.maximum(np.abs(s[~active]) - lam, 0.0) ** 2)
        return float(np.sqrt(dist_sq))

    def inverse_image(self, g, tau_eq=TAU_EQ):
        g = self._check(g)
        lam = self.weight
        if lam == 0.0:
            if np.max(np.abs(g), initial=0.0) > tau_eq:
                return EmptyImage(reason="zero weight but g ≠ 0")
            return BoxImage(lo=np.full(g.shape, -np.inf), hi=np.full(g.shape, np.inf))
        lo = np.zeros_like(g)
        hi = np.zeros_like(g)
        band = tau_eq * max(1.0, lam)
        for i, gi in enumerate(g):
            if abs(-gi - lam) <= band:
                lo[i], hi[i] = 0.0, np.inf
            elif abs(-gi + lam) <= band:
                lo[i], hi[i] = -np.inf, 0.0
            elif abs(gi) < lam:
                lo[i], hi[i] = 0.0, 0.0
            else:
                return EmptyImage(reason=f"coordinate {i} has |g_i| > λ")
        return BoxImage(lo=lo, hi=hi)


@dataclass(frozen=True)
class Ridge(Regularizer):
    """P(x) = λ‖x‖₂²."""

    weight: float = 1.0
    polyhedral_solution_set: bool = True  # Γ_P(g) is a single point

    def __post_init__(self):
        if self.weight < 0:
            raise InvalidInputError("Ridge weight must be >= 0")

    def value(self, x):
        return self.weight * float(np.sum(self._check(x) ** 2))

    def prox(self, z, t=1.0):
        return self._check(z) / (1.0 + 2.0 * t * self.weight)

    def subdiff_distance(self, x, s):
        x, s = self._check(x), self._check(s)
        return norm(s - 2.0 * self.weight * x)

    def inverse_image(self, g, tau_eq=TAU_EQ):
        g = self._check(g)
        if self.weight == 0.0:
            if np.max(np.abs(g), initial=0.0) > tau_eq:
                return EmptyImage(reason="zero weight but g ≠ 0")
            return BoxImage(lo=np.full(g.shape, -np.inf), hi=np.full(g.shape, np.inf))
        return PointImage(point=-g / (2.0 * self.weight))


class GroupedLasso(Regularizer):
    """P(x) = Σ_J ω_J ‖x_J‖₂ over a partition of the coordinates."""

    polyhedral_solution_set = True

    def __init__(self, groups, weights):
        self.groups = tuple(np.asarray(J, dtype=int) for J in groups)
        self.weights = tuple(float(w) for w in weights)
        if len(self.groups) != len(self.weights):
            raise InvalidInputError("one weight per group required")
        if any(w < 0 for w in self.weights):
            raise InvalidInputError("group weights must be >= 0")
        covered = np.concatenate(self.groups) if self.groups else np.array([], dtype=int)
        self.n = covered.size
        if sorted(covered.tolist()) != list(range(self.n)):
            raise InvalidInputError("groups must partition the coordinate set")

    def _check(self, x):
        x = super()._check(x)
        if x.size != self.n:
            raise InvalidInputError(f"expected {self.n} coordinates, got {x.size}")
        return x

    def value(self, x):
        x = self._check(x)
        return float(sum(w * np.linalg.norm(x[J]) for J, w in zip(self.groups, self.weights)))

    def prox(self, z, t=1.0):
        z = self._check(z)
        out = np.zeros_like(z)
        for J, w in zip(self.groups, self.weights):
            zj = z[J]
            nz = np.linalg.norm(zj)
            if nz > 0.0:
                out[J] = max(1.0 - t * w / nz, 0.0) * zj
        return out

    def subdiff_distance(self, x, s):
        x, s = self._check(x), self._check(s)
        dist_sq = 0.0
        for J, w in zip(self.groups, self.weights):
            xj, sj = x[J], s[J]
            nx = np.linalg.norm(xj)
            if nx > 0.0:
                dist_sq += float(np.sum((sj - w * xj / nx) ** 2))
            else:
                dist_sq += max(np.linalg.norm(sj) - w, 0.0) ** 2
        return float(np.sqrt(dist_sq))

    def inverse_image(self, g, tau_eq=TAU_EQ):
        g = self._check(g)
        cases = []
        for J, w in zip(self.groups, self.weights):
            gj = g[J]
            ng = np.linalg.norm(gj)
            if w == 0.0:
                cases.append((GROUP_FULL, None) if ng <= tau_eq else (GROUP_EMPTY, None))
            elif abs(ng - w) <= tau_eq * max(1.0, w):
                cases.append((GROUP_RAY, gj.copy()))
            elif ng > w:
                cases.append((GROUP_EMPTY, None))
            else:
                cases.append((GROUP_ZERO, None))
        return GroupImage(groups=self.groups, cases=tuple(cases), n=self.n)


@dataclass(frozen=True)
class NuclearNorm(Regularizer):
    """P(X) = ‖X‖_* (sum of singular values)."""

    group_tol: float = GROUP_TOL
    expects_matrix: bool = True

    def value(self, x):
        return float(np.sum(svd(self._check(x), self.group_tol).sigma))

    def prox(self, z, t=1.0):
        """Matrix shrinkage: each singular value σ ↦ max(σ − t, 0)."""
        fac = svd(self._check(z), self.group_tol)
        m, n = fac.shape
        k = min(m, n)
        smat = np.zeros((m, n))
        smat[:k, :k] = np.diag(np.maximum(fac.sigma - t, 0.0))
        return fac.U @ smat @ fac.V.T

    def subdiff_distance(self, x, s):
        x = self._check(x)
        s = np.asarray(s, dtype=float)
        if s.shape != x.shape:
            raise InvalidInputError("subgradient candidate must match the matrix shape")
        fac = svd(x, self.group_tol)
        r = fac.rank
        S = fac.U.T @ s @ fac.V
        dist_sq = float(np.sum((S[:r, :r] - np.eye(r)) ** 2))
        dist_sq += float(np.sum(S[:r, r:] ** 2)) + float(np.sum(S[r:, :r] ** 2))
        tail = S[r:, r:]
        if min(tail.shape) > 0:
            sv = np.linalg.svd(tail, compute_uv=False)
            dist_sq += float(np.sum(np.maximum(sv - 1.0, 0.0) ** 2))
        return float(np.sqrt(dist_sq))

    def inverse_image(self, g, tau_eq=TAU_EQ):
        g = self._check(g)
        fac = svd(-g, self.group_tol)
        if fac.sigma.size and fac.sigma[0] > 1.0 + tau_eq:
            return EmptyImage(reason=f"spectral norm of -g is {fac.sigma[0]:.6g} > 1")
        s_bar = fac.count_at_least(1.0, tau_eq)
        return NuclearImage(U=fac.U, V=fac.V, sigma=fac.sigma, s_bar=s_bar)


class OrthantIndicator(Regularizer):
    """Indicator of a sign-constrained box C: signs[i] = −1 forces xᵢ ≤ 0,
    +1 forces xᵢ ≥ 0, 0 leaves the coordinate free."""

    polyhedral_solution_set = True

    def __init__(self, signs):
        signs = np.asarray(signs, dtype=int)
        if not np.all(np.isin(signs, (-1, 0, 1))):
            raise InvalidInputError("signs must be -1, 0, or +1")
        self.signs = signs
        self.lo = np.where(signs > 0, 0.0, -np.inf)
        self.hi = np.where(signs < 0, 0.0, np.inf)

    def _check(self, x):
        x = super()._check(x)
        if x.size != self.signs.size:
            raise InvalidInputError(f"expected {self.signs.size} coordinates, got {x.size}")
        return x

    def contains(self, x) -> bool:
        x = self._check(x)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def value(self, x):
        return 0.0 if self.contains(x) else float("inf")

    def prox(self, z, t=1.0):
        return np.clip(self._check(z), self.lo, self.hi)

    def prox_diff(self, x, g):
        # clip(x − g, lo, hi) − x == clip(−g, lo − x, hi − x), exactly;
        # the right-hand form keeps tiny gradients below the ulp of x alive
        x, g = self._check(x), self._check(g)
        return np.clip(-g, self.lo - x, self.hi - x)

    def subdiff_nonempty(self, x):
        return self.contains(x)

    def subdiff_distance(self, x, s):
        """Distance to the normal cone of C at x."""
        x, s = self._check(x), self._check(s)
        if not self.contains(x):
            raise DomainError("point outside the constraint set")
        dist_sq = 0.0
        for xi, si, sg in zip(x, s, self.signs):
            if sg == 0 or xi != 0.0:
                dist_sq += si * si  # interior: normal cone is {0}
            elif sg < 0:
                dist_sq += min(si, 0.0) ** 2  # cone [0, ∞)
            else:
                dist_sq += max(si, 0.0) ** 2  # cone (−∞, 0]
        return float(np.sqrt(dist_sq))

    def inverse_image(self, g, tau_eq=TAU_EQ):
        g = self._check(g)
        lo = np.zeros_like(g)
        hi = np.zeros_like(g)
        for i, (gi, sg) in enumerate(zip(g, self.signs)):
            v = -gi  # the required normal-cone member
            if sg == 0:
                if abs(v) > tau_eq:
                    return EmptyImage(reason=f"free coordinate {i} needs g_i = 0")
                lo[i], hi[i] = -np.inf, np.inf
            elif sg < 0:
                if v > tau_eq:
                    lo[i], hi[i] = 0.0, 0.0
                elif v < -tau_eq:
                    return EmptyImage(reason=f"coordinate {i}: -g_i < 0 not in cone [0, ∞)")
                else:
                    lo[i], hi[i] = -np.inf, 0.0
            else:
                if v < -tau_eq:
                    lo[i], hi[i] = 0.0, 0.0
                elif v > tau_eq:
                    return EmptyImage(reason=f"coordinate {i}: -g_i > 0 not in cone (−∞, 0]")
                else:
                    lo[i], hi[i] = 0.0, np.inf
        return BoxImage(lo=lo, hi=hi)
