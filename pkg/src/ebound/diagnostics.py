"""Empirical error-bound probing: sampled (d, ‖R‖, r_alt) triples, log-log
exponent fits, the strict-complementarity certificate for nuclear-norm
instances, and the regularity classification that predicts whether a
Lipschitzian error bound should hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyProbeError, InsufficientDataError, InvalidInputError
from .problem import (
    OptimalityCertificate,
    ProblemInstance,
    distance_to_solution_set,
    objective,
    r_alt,
    residual_map,
)
from .regularizers import TAU_EQ, NuclearNorm
from .space import norm, svd, sym_eig


@dataclass(frozen=True)
class ProbeSample:
    x: np.ndarray
    radius: float
    direction_id: int
    d: float
    r_prox: float
    r_alt: float
    F_val: float


@dataclass(frozen=True)
class RandomDirections:
    count: int
    seed: int


@dataclass(frozen=True)
class Curve:
    """Explicit probe points with their curve parameters (used as radii)."""

    params: tuple
    points: tuple

    @classmethod
    def from_map(cls, params, point_fn):
        params = tuple(float(p) for p in params)
        return cls(params=params, points=tuple(point_fn(p) for p in params))


def _unit_directions(shape, count, seed):
    rng = np.random.default_rng(seed)
    dirs = []
    for _ in range(count):
        u = rng.standard_normal(shape)
        dirs.append(u / norm(u))
    return dirs


def probe(
    prob: ProblemInstance,
    cert: OptimalityCertificate,
    radii,
    directions,
    *,
    unique: bool = False,
    distance_tol: float = 1e-10,
) -> list:
    """Sample x = x* + ρ·u (or explicit curve points) and record
    (d(x,𝒳), ‖R(x)‖, r_alt(x), F(x)) per sample.

    Points outside dom(f) are rejected; when the subdifferential of P is
    empty at a sample, r_alt is recorded as inf.  Samples are ordered by
    (radius, direction index) as generated, so reports are reproducible.
    """
    if isinstance(directions, Curve):
        pending = [(float(p), 0, np.asarray(pt, dtype=float))
                   for p, pt in zip(directions.params, directions.points)]
    else:
        units = _unit_directions(cert.x_star.shape, directions.count, directions.seed)
        pending = [(float(rho), j, cert.x_star + rho * u)
                   for rho in radii for j, u in enumerate(units)]

    samples = []
    for rho, j, x in pending:
        if not prob.smooth.in_domain(x):
            continue
        d = distance_to_solution_set(prob, cert, x, unique=unique, tol=distance_tol)
        rp = norm(residual_map(prob, x))
        try:
            ra = r_alt(prob, cert, x)
        except DomainError:
            ra = float("inf")
        samples.append(ProbeSample(
            x=x, radius=rho, direction_id=j, d=d, r_prox=rp, r_alt=ra,
            F_val=objective(prob, x),
        ))
    if not samples:
        raise EmptyProbeError("all probe points were rejected")
    return samples


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    kappa_max: float


def fit_exponent(samples, envelope: bool = False) -> ExponentFit:
    """Least-squares line through (log d, log r_prox).

    A slope near 1 is the Lipschitzian error-bound signature; the
    counterexample curve shows slope 2.  With envelope=True the samples are
    binned by d and only the largest r_prox per bin is fitted, so direction
    averaging cannot mask the worst case.  kappa_max = max d/r_prox is
    always taken over all usable samples.
    """
    pairs = [(s.d, s.r_prox) for s in samples if s.d > 0 and s.r_prox > 0]
    if len(pairs) < 4:
        raise InsufficientDataError(f"need >= 4 samples with d, r_prox > 0, got {len(pairs)}")
    kappa_max = max(d / r for d, r in pairs)
    if envelope:
        bins = {}
        for d, r in pairs:
            key = round(math.log10(d), 1)
            bins[key] = max(bins.get(key, 0.0), r)
        pairs = [(10.0**k, r) for k, r in sorted(bins.items())]
        if len(pairs) < 4:
            raise InsufficientDataError("fewer than 4 distinct d-bins for the envelope fit")
    logd = np.log(np.array([p[0] for p in pairs]))
    logr = np.log(np.array([p[1] for p in pairs]))
    slope, intercept = np.polyfit(logd, logr, 1)
    fitted = slope * logd + intercept
    ss_res = float(np.sum((logr - fitted) ** 2))
    ss_tot = float(np.sum((logr - logr.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ExponentFit(
        slope=float(slope), intercept=float(intercept),
        r_squared=float(r_squared), kappa_max=float(kappa_max),
    )


def kappa_by_decade(samples) -> dict:
    """max d/r_prox grouped by the decade of the sample radius."""
    out = {}
    for s in samples:
        if s.d <= 0 or s.r_prox <= 0 or s.radius <= 0:
            continue
        decade = int(math.floor(math.log10(s.radius) + 1e-12))
        out[decade] = max(out.get(decade, 0.0), s.d / s.r_prox)
    return out


@dataclass(frozen=True)
class ComplementarityReport:
    """Strict complementarity for nuclear-norm instances: the count s̄ of
    unit singular values of −ḡ must equal rank(x*); the margin is the
    smallest eigenvalue of x* expressed in the leading (Ū₁, V̄₁) block."""

    s_bar: int
    rank_x: int
    holds: bool
    margin: float


def strict_complementarity(
    prob: ProblemInstance,
    cert: OptimalityCertificate,
    tau_eq: float = TAU_EQ,
) -> ComplementarityReport:
    if not isinstance(prob.reg, NuclearNorm):
        raise InvalidInputError("strict complementarity applies to nuclear-norm instances")
    fac_g = svd(-cert.g_bar)
    s_bar = fac_g.count_at_least(1.0, tau_eq)
    rank_x = svd(cert.x_star).rank
    if s_bar == 0:
        margin = float("inf")
    else:
        block = fac_g.U[:, :s_bar].T @ cert.x_star @ fac_g.V[:, :s_bar]
        w, _ = sym_eig((block + block.T) / 2.0)
        margin = float(w[-1])
    return ComplementarityReport(
        s_bar=s_bar, rank_x=rank_x, holds=(rank_x == s_bar), margin=margin,
    )


STRONGLY_CONVEX = "strongly_convex"
POLYHEDRAL = "polyhedral"
NUCLEAR_WITH_SC = "nuclear_with_sc"
UNVERIFIED = "unverified"


@dataclass(frozen=True)
class RegularitySummary:
    condition: str
    eb_expected: bool
    detail: str


def regularity_summary(prob: ProblemInstance, cert: OptimalityCertificate) -> RegularitySummary:
    """Which sufficient condition for the Lipschitzian error bound applies.

    The strongly-convex and polyhedral routes both require the loss to be
    strongly convex with Lipschitz gradient on compact sets; without that
    the instance is reported as unverified.
    """
    if not prob.smooth.h.strongly_convex_on_compacts:
        return RegularitySummary(
            UNVERIFIED, False,
            "loss is not strongly convex on compact sets; no sufficient condition applies",
        )
    if prob.smooth.A.is_identity:
        return RegularitySummary(
            STRONGLY_CONVEX, True, "identity operator makes f strongly convex on compacts",
        )
    if prob.reg.polyhedral_solution_set:
        return RegularitySummary(
            POLYHEDRAL, True,
            "the inverse image of the subdifferential at the certificate is polyhedral",
        )
    if isinstance(prob.reg, NuclearNorm):
        report = strict_complementarity(prob, cert)
        if report.holds:
            return RegularitySummary(
                NUCLEAR_WITH_SC, True,
                f"strict complementarity holds (s_bar = rank = {report.s_bar})",
            )
        return RegularitySummary(
            UNVERIFIED, False,
            f"strict complementarity fails (s_bar = {report.s_bar}, rank = {report.rank_x})",
        )
    return RegularitySummary(UNVERIFIED, False, "no sufficient condition applies")
