"""Measurable subsets of S^n: caps, geodesic polytopes, unions, arc unions.

Membership tests are vectorized: `points` arguments are arrays of shape
(..., n+1) of unit vectors and the result has the leading shape.  Boundary
distances are lower bounds on the true distance to the topological boundary,
which is exactly what the positive-s estimators need (they may only skip a
shell that is certain to stay on one side).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimation import Estimate, as_stream
from .geometry import (
    GreatCircle,
    cap_area,
    circle_distance,
    geodesic_distance,
    sample_uniform,
    sphere_surface,
    unit_vector,
    volume_radius,
)

TWO_PI = 2.0 * math.pi


class DegenerateCircleError(RuntimeError):
    """A great circle is tangent to (or grazes a corner of) the set boundary."""


@dataclass(frozen=True)
class Cap:
    """Open geodesic cap {x : d(center, x) < radius} on S^n."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", unit_vector(self.center))
        r = float(self.radius)
        if not (0.0 <= r <= math.pi):
            raise ValueError(f"cap radius must lie in [0, pi], got {r}")
        object.__setattr__(self, "radius", r)

    @property
    def dimension(self) -> int:
        return self.center.size - 1

    def contains(self, points) -> np.ndarray:
        return geodesic_distance(points, self.center) < self.radius

    def boundary_distance(self, points) -> np.ndarray:
        return np.abs(self.radius - geodesic_distance(points, self.center))

    def boundary_measure(self) -> float:
        n = self.dimension
        return sphere_surface(n - 1) * math.sin(self.radius) ** (n - 1)

    def exact_measure(self) -> float:
        return cap_area(self.dimension, self.radius)


@dataclass(frozen=True)
class Polytope:
    """Intersection of closed hemispheres {x : x . u <= 0} over outward normals u.

    The nonempty-interior flag is caller-asserted; nothing here verifies it.
    """

    normals: np.ndarray
    assume_nonempty_interior: bool = True

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.normals, dtype=float))
        if u.ndim != 2 or u.shape[0] < 1 or u.shape[1] < 2:
            raise ValueError("normals must be a nonempty (k, n+1) array")
        norms = np.linalg.norm(u, axis=1)
        if np.any(norms == 0.0) or not np.all(np.isfinite(u)):
            raise ValueError("normals must be finite and nonzero")
        object.__setattr__(self, "normals", u / norms[:, None])

    @property
    def dimension(self) -> int:
        return self.normals.shape[1] - 1

    def contains(self, points) -> np.ndarray:
        dots = np.asarray(points, dtype=float) @ self.normals.T
        return np.all(dots <= 0.0, axis=-1)

    def boundary_distance(self, points) -> np.ndarray:
        # distance to the nearest face great-subsphere: |pi/2 - angle to its normal|
        angles = np.arccos(np.clip(np.asarray(points, dtype=float) @ self.normals.T, -1.0, 1.0))
        return np.min(np.abs(0.5 * math.pi - angles), axis=-1)

    def boundary_measure(self):
        return None

    def exact_measure(self):
        return None


@dataclass(frozen=True)
class PolyconvexUnion:
    """Finite union of caps/polytopes; disjointness is caller-asserted."""

    parts: tuple
    assume_disjoint: bool = True

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("union needs at least one part")
        dims = {p.dimension for p in parts}
        if len(dims) != 1:
            raise ValueError(f"union parts live on different spheres: dimensions {sorted(dims)}")
        object.__setattr__(self, "parts", parts)

    @property
    def dimension(self) -> int:
        return self.parts[0].dimension

    def contains(self, points) -> np.ndarray:
        out = self.parts[0].contains(points)
        for p in self.parts[1:]:
            out = out | p.contains(points)
        return out

    def boundary_distance(self, points):
        # valid as a lower bound when the parts are disjoint
        dists = [p.boundary_distance(points) for p in self.parts]
        if any(d is None for d in dists):
            return None
        return np.min(np.stack(dists, axis=-1), axis=-1)

    def boundary_measure(self):
        if not self.assume_disjoint:
            return None
        vals = [p.boundary_measure() for p in self.parts]
        if any(v is None for v in vals):
            return None
        return float(sum(vals))

    def exact_measure(self):
        if not self.assume_disjoint:
            return None
        vals = [p.exact_measure() for p in self.parts]
        if any(v is None for v in vals):
            return None
        return float(sum(vals))

    def probably_disjoint(self, rng, samples: int = 10000) -> bool:
        """Sample-based disjointness check: no point may hit two parts."""
        gen = as_stream(rng).generator
        x = sample_uniform(self.dimension, samples, gen)
        hits = np.zeros(samples, dtype=int)
        for p in self.parts:
            hits += p.contains(x).astype(int)
        return bool(np.all(hits <= 1))


@dataclass(frozen=True)
class Complement:
    """Complement of a set; shares its boundary."""

    inner: object

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def contains(self, points) -> np.ndarray:
        return ~self.inner.contains(points)

    def boundary_distance(self, points):
        return self.inner.boundary_distance(points)

    def boundary_measure(self):
        return self.inner.boundary_measure()

    def exact_measure(self):
        m = self.inner.exact_measure()
        if m is None:
            return None
        return sphere_surface(self.dimension) - m


@dataclass(frozen=True)
class Reflection:
    """Antipodal image -E = {-x : x in E}."""

    inner: object

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def contains(self, points) -> np.ndarray:
        return self.inner.contains(-np.asarray(points, dtype=float))

    def boundary_distance(self, points):
        return self.inner.boundary_distance(-np.asarray(points, dtype=float))

    def boundary_measure(self):
        return self.inner.boundary_measure()

    def exact_measure(self):
        return self.inner.exact_measure()


# ---------------------------------------------------------------------------
# circle sets (n = 1)


def _normalize_arcs(arcs):
    cleaned = []
    for start, length in arcs:
        length = float(length)
        if length <= 0.0:
            raise ValueError(f"arc length must be positive, got {length}")
        if length > TWO_PI + 1e-12:
            raise ValueError(f"arc length exceeds the circle, got {length}")
        cleaned.append((float(start) % TWO_PI, min(length, TWO_PI)))
    cleaned.sort()
    return cleaned


@dataclass(frozen=True)
class ArcUnion:
    """Union of disjoint open arcs on S^1, each as (start, length) in radians.

    Starts are reduced mod 2 pi and sorted; overlapping arcs are a
    construction error (touching endpoints are allowed).  An empty list is
    the empty set; total length 2 pi is the full circle.
    """

    arcs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        cleaned = _normalize_arcs(self.arcs)
        total = sum(length for _, length in cleaned)
        if total > TWO_PI + 1e-9:
            raise ValueError(f"arcs cover more than the circle: total length {total}")
        for i in range(1, len(cleaned)):
            prev_end = cleaned[i - 1][0] + cleaned[i - 1][1]
            if cleaned[i][0] < prev_end - 1e-12:
                raise ValueError("arcs overlap after normalization")
        if len(cleaned) > 1:
            wrap_end = cleaned[-1][0] + cleaned[-1][1]
            if wrap_end > TWO_PI + cleaned[0][0] + 1e-12:
                raise ValueError("arcs overlap across the wrap point")
        object.__setattr__(self, "arcs", tuple(cleaned))

    @property
    def dimension(self) -> int:
        return 1

    def measure(self) -> float:
        return float(sum(length for _, length in self.arcs))

    def exact_measure(self) -> float:
        return self.measure()

    def is_full(self) -> bool:
        return self.measure() >= TWO_PI - 1e-12

    def is_empty(self) -> bool:
        return not self.arcs

    def angles(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.arctan2(pts[..., 1], pts[..., 0]) % TWO_PI

    def contains_angle(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float) % TWO_PI
        out = np.zeros(phi.shape, dtype=bool)
        for start, length in self.arcs:
            out |= ((phi - start) % TWO_PI) < length
        return out

    def contains(self, points) -> np.ndarray:
        return self.contains_angle(self.angles(points))

    def boundary_distance(self, points):
        if self.is_empty() or self.is_full():
            return np.full(np.asarray(points, dtype=float).shape[:-1], math.pi)
        phi = self.angles(points)
        ends = np.array([e for start, length in self.arcs for e in (start, start + length)])
        return np.min(circle_distance(phi[..., None], ends[None, :]), axis=-1)

    def boundary_measure(self) -> float:
        """H^0 of the boundary: two endpoints per arc, none for empty/full."""
        if self.is_empty() or self.is_full():
            return 0.0
        return 2.0 * len(self.arcs)

    def gaps(self) -> "ArcUnion":
        """Complementary arcs (the closure's complement, up to endpoints)."""
        if self.is_empty():
            return ArcUnion([(0.0, TWO_PI)])
        if self.is_full():
            return ArcUnion([])
        out = []
        k = len(self.arcs)
        for i in range(k):
            end = self.arcs[i][0] + self.arcs[i][1]
            nxt = self.arcs[(i + 1) % k][0] + (TWO_PI if i == k - 1 else 0.0)
            if nxt - end > 1e-12:
                out.append((end % TWO_PI, nxt - end))
        return ArcUnion(out)

    def shifted(self, delta: float) -> "ArcUnion":
        return ArcUnion([(start + delta, length) for start, length in self.arcs])

    def intersect(self, other: "ArcUnion") -> "ArcUnion":
        """Intersection, again as a disjoint ArcUnion."""
        if self.is_empty() or other.is_empty():
            return ArcUnion([])
        if self.is_full():
            return other
        if other.is_full():
            return self
        out = []
        for sa, la in self.arcs:
            for sb, lb in other.arcs:
                # shift b's start next to a and clip
                sb_rel = (sb - sa) % TWO_PI
                for offset in (0.0, -TWO_PI):
                    lo = max(0.0, sb_rel + offset)
                    hi = min(la, sb_rel + offset + lb)
                    if hi - lo > 1e-12:
                        out.append(((sa + lo) % TWO_PI, hi - lo))
        return ArcUnion(out)


# ---------------------------------------------------------------------------
# derived operations


def rearrangement(n: int, measure: float, center) -> Cap:
    """Cap at `center` with prescribed H^n measure (the symmetric rearrangement)."""
    return Cap(np.asarray(center, dtype=float), volume_radius(n, measure))


def measure_mc(E, samples: int, rng) -> Estimate:
    """Monte Carlo H^n measure of E: omega_(n+1) times the hit fraction."""
    gen = as_stream(rng).generator
    total = sphere_surface(E.dimension)
    x = sample_uniform(E.dimension, samples, gen)
    values = E.contains(x).astype(float) * total
    return Estimate.from_values(values)


def symmetric_overlap_measure(E, samples: int = 100000, rng=None) -> Estimate:
    """H^n((-E) intersect E^c), the mass the antipodal image gains over E.

    Exact for caps (a(min(r, pi - r))) and for arc unions (arc algebra);
    Monte Carlo with a standard error otherwise, in which case rng is
    required.
    """
    if isinstance(E, Cap):
        r = E.radius
        return Estimate.exact(cap_area(E.dimension, min(r, math.pi - r)))
    if isinstance(E, ArcUnion):
        return Estimate.exact(E.shifted(math.pi).intersect(E.gaps()).measure())
    if rng is None:
        raise ValueError("Monte Carlo overlap needs an rng")
    gen = as_stream(rng).generator
    total = sphere_surface(E.dimension)
    x = sample_uniform(E.dimension, samples, gen)
    inside_reflected = E.contains(-x)
    outside = ~E.contains(x)
    return Estimate.from_values((inside_reflected & outside).astype(float) * total)


# ---------------------------------------------------------------------------
# traces on great circles


def _cap_trace_params(E: Cap, circle: GreatCircle):
    a = float(circle.e @ E.center)
    b = float(circle.f @ E.center)
    amplitude = math.hypot(a, b)
    c = math.cos(E.radius)
    return amplitude, c, math.atan2(b, a)


def circle_trace(E, circle: GreatCircle, grid: int = 4096) -> ArcUnion:
    """Parameter arcs of {phi : circle.point(phi) in E}.

    Caps are solved in closed form (the pullback of membership is
    A cos(phi - phi0) > cos r).  Polytopes and unions are located with a
    `grid`-point membership probe whose sign changes are refined by
    bisection to 1e-12; the grid only orders the finitely many arcs, the
    endpoints come from the bisection.

    Raises DegenerateCircleError for tangencies (|A - |cos r|| < 1e-9, or a
    vanishing parameter derivative at a polytope crossing).
    """
    if isinstance(E, Cap):
        amplitude, c, phi0 = _cap_trace_params(E, circle)
        if abs(amplitude - abs(c)) < 1e-9:
            raise DegenerateCircleError("circle tangent to cap boundary")
        if amplitude < abs(c):
            return ArcUnion([(0.0, TWO_PI)]) if c < 0.0 else ArcUnion([])
        delta = math.acos(c / amplitude)
        return ArcUnion([((phi0 - delta) % TWO_PI, 2.0 * delta)])
    if isinstance(E, (Polytope, PolyconvexUnion)):
        phis = np.arange(grid) * (TWO_PI / grid)
        inside = E.contains(circle.point(phis))
        if bool(np.all(inside)):
            return ArcUnion([(0.0, TWO_PI)])
        if not bool(np.any(inside)):
            return ArcUnion([])
        flips = np.flatnonzero(inside != np.roll(inside, -1))
        crossings = []
        for i in flips:
            lo, hi = phis[i], phis[i] + TWO_PI / grid
            lo_in = bool(inside[i])
            for _ in range(48):
                mid = 0.5 * (lo + hi)
                if bool(E.contains(circle.point(mid))) == lo_in:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-12:
                    break
            crossings.append((0.5 * (lo + hi), lo_in))
            _check_transversal(E, circle, 0.5 * (lo + hi))
        arcs = []
        # pair each entry (False -> True) with the following exit
        entries = [phi for phi, lo_in in crossings if not lo_in]
        exits = [phi for phi, lo_in in crossings if lo_in]
        if len(entries) != len(exits):
            raise DegenerateCircleError("unbalanced trace transitions")
        for start in entries:
            following = [e for e in exits if e > start] or [exits[0] + TWO_PI]
            arcs.append((start % TWO_PI, (min(following) - start) % TWO_PI or TWO_PI))
        return ArcUnion(arcs)
    raise TypeError(f"circle_trace supports Cap, Polytope and PolyconvexUnion, got {type(E).__name__}")


def _check_transversal(E, circle: GreatCircle, phi: float, tol: float = 1e-9):
    """Flag crossings where the active constraint has a vanishing phi-derivative."""
    polys = [E] if isinstance(E, Polytope) else [p for p in getattr(E, "parts", []) if isinstance(p, Polytope)]
    point = circle.point(phi)
    velocity = -math.sin(phi) * circle.e + math.cos(phi) * circle.f
    for poly in polys:
        vals = poly.normals @ point
        active = np.abs(vals) < 1e-7
        if np.any(active) and np.any(np.abs(poly.normals[active] @ velocity) < tol):
            raise DegenerateCircleError("circle tangent to a polytope face")


def crossing_count(E, circle: GreatCircle) -> int:
    """Number of boundary crossings of the circle through the boundary of E.

    Caps use the closed-form rule (2 when the circle's amplitude toward the
    center exceeds |cos r|, else 0).  Polytopes count the per-face zeros of
    phi -> point(phi) . u that satisfy the remaining constraints, which is
    exactly twice the number of maximal trace arcs.  Disjoint unions sum
    their parts.  Raises DegenerateCircleError for tangencies and corner
    grazes (margin 1e-9).
    """
    if isinstance(E, Cap):
        amplitude, c, _ = _cap_trace_params(E, circle)
        if abs(amplitude - abs(c)) < 1e-9:
            raise DegenerateCircleError("circle tangent to cap boundary")
        return 2 if amplitude > abs(c) else 0
    if isinstance(E, Polytope):
        a = circle.e @ E.normals.T
        b = circle.f @ E.normals.T
        amp = np.hypot(a, b)
        count = 0
        for j in range(E.normals.shape[0]):
            if amp[j] < 1e-12:
                continue  # circle lies inside this face plane; no transversal zeros
            base = math.atan2(b[j], a[j])
            for phi in (base + 0.5 * math.pi, base - 0.5 * math.pi):
                point = circle.point(phi)
                others = np.delete(np.arange(E.normals.shape[0]), j)
                vals = E.normals[others] @ point
                if np.any(np.abs(vals) < 1e-9):
                    raise DegenerateCircleError("circle passes through a polytope corner")
                if np.all(vals < 0.0):
                    count += 1
        return count
    if isinstance(E, PolyconvexUnion):
        return sum(crossing_count(p, circle) for p in E.parts)
    raise TypeError(f"crossing_count supports Cap, Polytope and PolyconvexUnion, got {type(E).__name__}")
