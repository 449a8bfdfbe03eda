"""Geodesic geometry on the unit sphere S^n embedded in R^(n+1).

Conventions used throughout the package: `n` is the dimension of the sphere
(so points are length n+1 unit vectors), every angle and radius is in
radians, and omega_k written in the docs means sphere_surface(k - 1), the
total measure of S^(k-1).  Point arrays have shape (..., n+1) with the
coordinate axis last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import beta as _beta_fn, betainc as _betainc


def sphere_surface(k: int) -> float:
    """Total k-dimensional Hausdorff measure of S^k.

    sphere_surface(0) = 2 (two points), sphere_surface(1) = 2 pi,
    sphere_surface(2) = 4 pi.
    """
    if k < 0:
        raise ValueError(f"sphere dimension must be >= 0, got {k}")
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


def unit_vector(v) -> np.ndarray:
    """Normalized copy of v as a float array; rejects zero and non-finite input."""
    x = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("a sphere point needs a 1-d vector with >= 2 coordinates")
    if not np.all(np.isfinite(x)):
        raise ValueError("sphere point coordinates must be finite")
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return x / norm


def geodesic_distance(x, y):
    """Geodesic distance arccos(<x, y>) in [0, pi].

    The inner product is clamped to [-1, 1] so coincident and antipodal
    pairs stay in the arccos domain under roundoff.  Broadcasts over
    leading axes.
    """
    dot = np.sum(np.asarray(x, float) * np.asarray(y, float), axis=-1)
    return np.arccos(np.clip(dot, -1.0, 1.0))


def normalized_distance(x, y):
    """Geodesic distance rescaled to [0, 1] (division by pi)."""
    return geodesic_distance(x, y) / math.pi


def cap_area(n: int, r):
    """H^n measure of the geodesic cap of radius r on S^n.

    Equals omega_n * int_0^r sin^(n-1) t dt with omega_n = sphere_surface(n-1).
    For n = 1 this is 2 r; for n >= 2 the substitution u = sin^2(t/2) turns
    the integral into 2^(n-1) B(n/2, n/2) I_u(n/2, n/2) with I the
    regularized incomplete beta.  Vectorized over r.

    Parameters
    ----------
    n : sphere dimension, >= 1
    r : radius in [0, pi], scalar or array

    Returns
    -------
    float or ndarray matching the shape of r
    """
    if n < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {n}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < -1e-15) or np.any(r_arr > math.pi + 1e-12):
        raise ValueError("cap radius must lie in [0, pi]")
    r_arr = np.clip(r_arr, 0.0, math.pi)
    if n == 1:
        out = 2.0 * r_arr
    else:
        half = n / 2.0
        frac = _betainc(half, half, np.sin(r_arr / 2.0) ** 2)
        out = sphere_surface(n - 1) * 2.0 ** (n - 1) * _beta_fn(half, half) * frac
    if np.isscalar(r) or np.ndim(r) == 0:
        return float(out)
    return out


def volume_radius(n: int, alpha: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Radius of the cap on S^n with H^n measure alpha (inverse of cap_area).

    Bisection on [0, pi]; cap_area is strictly increasing so the root is
    unique.  Stops when the bracket is shorter than tol.
    """
    total = sphere_surface(n)
    if not 0.0 <= alpha <= total + 1e-9 * total:
        raise ValueError(f"measure must lie in [0, {total}], got {alpha}")
    if alpha <= 0.0:
        return 0.0
    if alpha >= total:
        return math.pi
    lo, hi = 0.0, math.pi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if cap_area(n, mid) < alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def slice_cap_fraction(n: int, phi):
    """Fraction of directions u on S^(n-1) whose angle to a fixed axis exceeds phi.

    This is the outside fraction of a distance sphere cut by a cap:
    1 - cap_area(n-1, phi) / sphere_surface(n-1).  Monotone from 1 at phi=0
    to 0 at phi=pi.  Requires n >= 2; vectorized over phi.
    """
    if n < 2:
        raise ValueError("slice fractions need an (n-1)-sphere of directions, n >= 2")
    return 1.0 - cap_area(n - 1, phi) / sphere_surface(n - 1)


def sample_uniform(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """count independent uniform points on S^n, shape (count, n+1).

    Normalized standard Gaussians; the zero draw has probability 0 but is
    resampled anyway.
    """
    g = rng.standard_normal((count, n + 1))
    norms = np.linalg.norm(g, axis=-1)
    while np.any(norms == 0.0):
        bad = norms == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), n + 1))
        norms = np.linalg.norm(g, axis=-1)
    return g / norms[..., None]


def sample_at_distance(x: np.ndarray, theta, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the geodesic sphere at distance theta around x.

    x has shape (..., n+1); theta broadcasts against its leading shape.  The
    tangent direction is an isotropic Gaussian projected off x, so for each
    row the output is uniform on the distance-theta sphere.  Output rows are
    renormalized; the realized distance matches theta to ~1e-10.
    """
    x = np.asarray(x, dtype=float)
    g = rng.standard_normal(x.shape)
    g = g - np.sum(g * x, axis=-1, keepdims=True) * x
    norms = np.linalg.norm(g, axis=-1)
    while np.any(norms == 0.0):
        bad = norms == 0.0
        fresh = rng.standard_normal((int(bad.sum()), x.shape[-1]))
        xb = x[bad] if x.ndim > 1 else x[None]
        fresh = fresh - np.sum(fresh * xb, axis=-1, keepdims=True) * xb
        g[bad] = fresh
        norms = np.linalg.norm(g, axis=-1)
    u = g / norms[..., None]
    th = np.broadcast_to(np.asarray(theta, dtype=float), x.shape[:-1])[..., None]
    y = np.cos(th) * x + np.sin(th) * u
    return y / np.linalg.norm(y, axis=-1, keepdims=True)


@dataclass(frozen=True)
class GreatCircle:
    """Oriented great circle phi -> cos(phi) e + sin(phi) f on S^n.

    e and f must be orthonormal (checked to 1e-12).  The pair spans the
    2-plane L through the origin; the trace S^n intersect L is this circle.
    """

    e: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        e = unit_vector(self.e)
        f = np.asarray(self.f, dtype=float)
        if f.shape != e.shape:
            raise ValueError("e and f must have the same dimension")
        if abs(float(np.linalg.norm(f)) - 1.0) > 1e-12 or abs(float(e @ f)) > 1e-12:
            raise ValueError("e, f must be orthonormal to 1e-12")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "f", f)

    def point(self, phi):
        """Circle point(s) at parameter phi; phi may be an array."""
        phi = np.asarray(phi, dtype=float)
        return np.cos(phi)[..., None] * self.e + np.sin(phi)[..., None] * self.f


def circle_distance(phi, psi):
    """Intrinsic distance on the parameter circle: |phi-psi| folded into [0, pi]."""
    d = np.abs(np.asarray(phi, float) - np.asarray(psi, float)) % (2.0 * math.pi)
    return np.where(d > math.pi, 2.0 * math.pi - d, d)
