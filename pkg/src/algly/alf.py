"""The gauge-type Lyapunov function built from a polynomial sublevel set.

Given a polynomial P with P(0) < 0, every ray from the origin exits the
set {P <= 0} through its boundary.  Writing P~ for the homogenization of
P, the scaling function tau(x) is the unique positive root of
P~(x, .) = 0; it is homogeneous of degree 1, equals 1 exactly on
{P = 0}, and serves as a Lyapunov function whenever the set is invariant
and star-convex about the origin.  tau(0) is defined as 0, the value
forced by degree-1 homogeneity.

Objects here are immutable after construction; `tau` and `tau_dot` are
pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import (
    DegenerateGradientError,
    DegreeError,
    DimensionMismatchError,
    MultiplePositiveRootsError,
    NoPositiveRootError,
    OriginNotInteriorError,
    ZeroPolynomialError,
)
from .homogenize import HomogeneousDecomposition, homogeneous_parts, homogenize, tau_coefficients
from .polycore import MultiPoly
from .roots import RootList, UniPoly, positive_roots

if TYPE_CHECKING:
    from .dynsys import PolyVectorField

# Roots farther apart than this fraction of the Cauchy bound are genuinely
# distinct; closer pairs are treated as refinement jitter / tangency.
ROOT_SEPARATION_FACTOR = 1e-8
# grad(P).y is compared against the term-magnitude scale of grad(P) at y;
# the factor leaves room for the root's own positional error.
_DEGENERATE_EPS = 1e-9


def _abs_eval(P: MultiPoly, x: Sequence[float]) -> float:
    total = 0.0
    for e, c in P.terms.items():
        v = abs(c)
        for xi, ei in zip(x, e):
            if ei:
                v *= abs(xi) ** ei
        total += v
    return total


def sample_directions(nvars: int, n: int, seed: int) -> list[tuple[float, ...]]:
    """Deterministic unit directions: exact angular grid in 2D, seeded
    normalized Gaussian draws for nvars >= 3."""
    if n < 1:
        raise ValueError("need at least one direction")
    if nvars == 1:
        return [(1.0,) if k % 2 == 0 else (-1.0,) for k in range(n)]
    if nvars == 2:
        return [
            (math.cos(2.0 * math.pi * k / n), math.sin(2.0 * math.pi * k / n))
            for k in range(n)
        ]
    rng = np.random.default_rng(seed)
    dirs = []
    while len(dirs) < n:
        v = rng.standard_normal(nvars)
        norm = float(np.linalg.norm(v))
        if norm > 0.0:
            dirs.append(tuple(float(c) for c in v / norm))
    return dirs


@dataclass(frozen=True)
class StarConvexityFailure:
    index: int
    direction: tuple[float, ...]
    root_count: int
    roots: tuple[float, ...]      # boundary radii along the ray
    suspected_tangency: bool


@dataclass(frozen=True)
class StarConvexityReport:
    passed: bool
    checked_directions: int
    failures: tuple[StarConvexityFailure, ...] = field(default=())


class HomogenizedLyapunov:
    """P together with its homogeneous parts and root-solver settings."""

    def __init__(
        self,
        P: MultiPoly,
        *,
        abs_tol: float = 1e-12,
        rel_tol: float = 1e-12,
        ray_samples: int = 256,
        seed: int = 0,
    ):
        if P.is_zero():
            raise ZeroPolynomialError("cannot build a scaling function from the zero polynomial")
        origin = (0.0,) * P.nvars
        value_at_origin = P.eval(origin)
        if value_at_origin >= 0.0:
            raise OriginNotInteriorError(
                f"P(0) = {value_at_origin} must be negative (origin strictly inside the set)")
        decomposition = homogeneous_parts(P)
        if decomposition.degree < 1:
            raise DegreeError("constant polynomial: no scaling function exists")
        self.P = P
        self.nvars = P.nvars
        self.decomposition: HomogeneousDecomposition = decomposition
        self.p = decomposition.degree
        self.homogenized = homogenize(decomposition)
        self.gradient = P.gradient()
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.ray_samples = ray_samples
        self.seed = seed

    # -- the scaling function -------------------------------------------------

    def _positive_roots_at(self, x: Sequence[float]) -> RootList:
        coeffs = tau_coefficients(self.decomposition, x)
        return positive_roots(UniPoly(coeffs), self.abs_tol, self.rel_tol)

    def tau(self, x: Sequence[float]) -> float:
        """The unique positive root of P~(x, .); 0 at the origin by convention.

        Raises NoPositiveRootError when the ray never meets the boundary
        and MultiplePositiveRootsError when it meets it more than once
        (roots closer than 1e-8 x Cauchy bound count as one tangency).
        """
        if len(x) != self.nvars:
            raise DimensionMismatchError(f"point has length {len(x)}, expected {self.nvars}")
        if all(v == 0.0 for v in x):
            return 0.0
        rl = self._positive_roots_at(x)
        if not rl.roots:
            raise NoPositiveRootError(x)
        if len(rl.roots) > 1:
            gap_tol = ROOT_SEPARATION_FACTOR * rl.bound
            gaps = [b - a for a, b in zip(rl.roots, rl.roots[1:])]
            if any(g > gap_tol for g in gaps):
                raise MultiplePositiveRootsError(x, rl.roots)
        return rl.roots[0]

    def tau_residual(self, x: Sequence[float]) -> float:
        """|P(x / tau(x))|, the defining identity's defect; 0.0 at the origin."""
        t = self.tau(x)
        if t == 0.0:
            return 0.0
        return abs(self.P.eval([v / t for v in x]))

    # -- unicity / star-convexity ----------------------------------------------

    def check_star_convex(self, n_directions: int | None = None) -> StarConvexityReport:
        """Count boundary crossings along sampled rays from the origin.

        For each unit direction d the radial polynomial r -> P(r*d) has
        coefficient vector [M_0(d) .. M_p(d)]; the set is star-convex
        exactly when every ray crosses the boundary once, i.e. the count
        is 1 and the root is simple.  Failures carry the crossing radii.
        """
        n = self.ray_samples if n_directions is None else n_directions
        directions = sample_directions(self.nvars, n, self.seed)
        failures = []
        for idx, d in enumerate(directions):
            radial = UniPoly([part.eval(d) for part in self.decomposition.parts])
            rl = positive_roots(radial, self.abs_tol, self.rel_tol)
            tangent = any(rl.suspected_multiple)
            if len(rl.roots) != 1 or tangent:
                failures.append(StarConvexityFailure(
                    index=idx,
                    direction=d,
                    root_count=len(rl.roots),
                    roots=rl.roots,
                    suspected_tangency=tangent,
                ))
        return StarConvexityReport(
            passed=not failures,
            checked_directions=n,
            failures=tuple(failures),
        )

    # -- decay rate --------------------------------------------------------------

    def tau_dot(self, f: "PolyVectorField", x: Sequence[float]) -> float:
        """Time derivative of tau along the field f at x.

        With c = tau(x) and y = x/c on the boundary, differentiating
        P(x(t)/c(t)) = 0 and using homogeneity of f gives

            dc/dt = c^(nu+1) * (grad P(y) . f(y)) / (grad P(y) . y).

        Raises DegenerateGradientError when the denominator vanishes
        against its own term scale (tangent crossing).
        """
        if all(v == 0.0 for v in x):
            raise ValueError("tau_dot is undefined at the origin")
        c = self.tau(x)
        y = [v / c for v in x]
        gvals = [g.eval(y) for g in self.gradient]
        denom = sum(gv * yv for gv, yv in zip(gvals, y))
        scale = sum(_abs_eval(g, y) * abs(yv) for g, yv in zip(self.gradient, y))
        if abs(denom) <= _DEGENERATE_EPS * max(1.0, scale):
            raise DegenerateGradientError(
                f"grad(P).y = {denom} vanishes at the boundary point {tuple(y)}")
        fvals = f.eval_at(y)
        num = sum(gv * fv for gv, fv in zip(gvals, fvals))
        return c ** (f.nu + 1) * num / denom
