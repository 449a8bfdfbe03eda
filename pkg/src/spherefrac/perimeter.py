"""Fractional s-perimeters and seminorms on S^n.

The s-perimeter of E is the double integral of d(x,y)^-(n+s) over x in E,
y outside E, with geodesic distance d; s ranges over (-inf, 1).  The
normalized variant replaces d by d/pi.  Positive s concentrates the kernel
at the boundary (singular regime), s in [-n, 0] keeps it integrable (mild),
and s < -n flips the kernel into one that rewards antipodal separation
(smooth regime).
"""

from __future__ import annotations

import math

import numpy as np

from .estimation import (
    Estimate,
    RadialProposal,
    adaptive_quad,
    incomplete_beta,
    mc_estimate,
)
from .geometry import sample_at_distance, sample_uniform, slice_cap_fraction, sphere_surface
from .sets import ArcUnion, TWO_PI

_THETA_MIN_FLOOR = 1e-14


def validate_s(s: float) -> float:
    s = float(s)
    if not math.isfinite(s) or s >= 1.0:
        raise ValueError(f"s must be a finite number < 1, got {s}")
    return s


def s_regime(s: float, n: int) -> str:
    """Kernel regime: 'singular' for s in (0,1), 'mild' for s in [-n, 0], 'smooth' below."""
    s = validate_s(s)
    if s > 0.0:
        return "singular"
    if s >= -float(n):
        return "mild"
    return "smooth"


def perimeter_minus_n(n: int, measure: float) -> float:
    """Exact s = -n perimeter: H^n(E) * (omega_(n+1) - H^n(E)).

    At s = -n the kernel is constant 1, so the double integral only sees the
    measures of E and its complement.
    """
    total = sphere_surface(n)
    if not 0.0 <= measure <= total + 1e-9:
        raise ValueError(f"measure must lie in [0, {total}]")
    return measure * (total - measure)


# ---------------------------------------------------------------------------
# Monte Carlo estimators


def perimeter_mc(
    E,
    s: float,
    samples: int = 1_000_000,
    rng=None,
    normalized: bool = False,
    chunk_size: int = 1 << 16,
) -> Estimate:
    """Monte Carlo s-perimeter of E.

    Scheme: x uniform on S^n (contributing only when x lands in E), a radial
    distance theta drawn by importance sampling, y uniform on the distance-
    theta sphere around x, and the indicator of y outside E.  For s <= 0 the
    radial draw uses the shared RadialProposal for the kernel; for s > 0 it
    uses an exact power-law proposal ~ theta^(-1-s) on [theta_min(x), pi],
    where theta_min is the set's boundary-distance lower bound, so the
    singular shell that cannot contribute is never sampled.  Weights are
    exact densities; the weighted kernel is evaluated in collapsed form
    (bounded by the proposal constant), so values stay finite.

    Returns an Estimate of the perimeter (kernel (d/pi)^-(n+s) when
    normalized=True).
    """
    s = validate_s(s)
    n = E.dimension
    omega = sphere_surface(n) * sphere_surface(n - 1)
    if s > 0.0:
        probe = np.zeros((1, n + 1))
        probe[0, 0] = 1.0
        if E.boundary_distance(probe) is None:
            raise ValueError("positive s needs a set with a boundary_distance bound")
        scale = omega * (math.pi ** (n + s) if normalized else 1.0)

        def sampler(count, gen):
            x = sample_uniform(n, count, gen)
            inside = E.contains(x)
            wk = np.zeros(count)
            y = x
            if np.any(inside):
                t_min = np.maximum(E.boundary_distance(x[inside]), _THETA_MIN_FLOOR)
                lo = t_min ** (-s)
                hi = math.pi ** (-s)
                u = gen.random(int(inside.sum()))
                theta = (lo + u * (hi - lo)) ** (-1.0 / s)
                z = (lo - hi) / s
                y = x.copy()
                y[inside] = sample_at_distance(x[inside], theta, gen)
                wk[inside] = z * np.sinc(theta / math.pi) ** (n - 1)
            return x, inside, wk, y

        def integrand(batch):
            x, inside, wk, y = batch
            return scale * wk * inside * ~E.contains(y)

        return mc_estimate(sampler, integrand, samples, rng, chunk_size)

    proposal = RadialProposal(n, -(n + s), normalized=normalized)

    def sampler(count, gen):
        x = sample_uniform(n, count, gen)
        theta, wk = proposal.sample_weighted(count, gen)
        y = sample_at_distance(x, theta, gen)
        return x, wk, y

    def integrand(batch):
        x, wk, y = batch
        return omega * wk * E.contains(x) * ~E.contains(y)

    return mc_estimate(sampler, integrand, samples, rng, chunk_size)


def seminorm_mc(
    f,
    n: int,
    p: float,
    s: float,
    samples: int = 1_000_000,
    rng=None,
    chunk_size: int = 1 << 16,
) -> Estimate:
    """Gagliardo-type seminorm: double integral of |f(x)-f(y)|^p / dtilde^(n+sp).

    dtilde is the normalized distance d/pi and s must be negative (the
    positive-s seminorm of a generic f is infinite).  f must accept point
    arrays of shape (N, n+1) and return (N,) values.
    """
    s = validate_s(s)
    if s >= 0.0:
        raise ValueError("seminorm estimator requires s < 0")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    omega = sphere_surface(n) * sphere_surface(n - 1)
    proposal = RadialProposal(n, -(n + s * p), normalized=True)

    def sampler(count, gen):
        x = sample_uniform(n, count, gen)
        theta, wk = proposal.sample_weighted(count, gen)
        y = sample_at_distance(x, theta, gen)
        return x, wk, y

    def integrand(batch):
        x, wk, y = batch
        fx = np.asarray(f(x), dtype=float)
        fy = np.asarray(f(y), dtype=float)
        return omega * wk * np.abs(fx - fy) ** p

    return mc_estimate(sampler, integrand, samples, rng, chunk_size)


# ---------------------------------------------------------------------------
# cap quadrature oracle


def perimeter_cap(n: int, s: float, r: float, tol: float | None = None) -> float:
    """Deterministic s-perimeter of a radius-r cap on S^n by nested quadrature.

    Rotational symmetry reduces the double integral to the boundary offset
    x = r - t of a cap point at colatitude t and the distance theta to the
    outside point:

        P_s = omega_n int_0^r sin^(n-1)(r - x) * I(x) dx,
        I(x) = omega_n [ int_x^(min(pi, 2r-x)) theta^-(n+s) sin^(n-1)(theta)
                         * slice_cap_fraction(n, phi*(x, theta)) d theta
                       + int_(min(pi, 2r-x))^pi theta^-(n+s) sin^(n-1)(theta) d theta ],

    with cos(phi*) = (cos r - cos t cos theta)/(sin t sin theta) clamped to
    [-1, 1].  Below theta = x the distance sphere stays inside the cap
    (fraction 0); above 2r - x it lies fully outside (fraction 1, the tail
    term).  phi* is evaluated through the product identity
    cos r - cos t cos theta = 2 cos t sin((theta+x)/2) sin((theta-x)/2)
    - sin t sin x, which stays accurate when x is many orders of magnitude
    below r; the singular theta-range is integrated in log scale.

    For s > 0 the inner integral blows up like A x^-s at the boundary with
    the flat-limit constant A = omega_(n-1) B((s+1)/2, (n-1)/2) / (2s), so
    the outer integral is graded at x = 0 with exponent s and the stretch
    x < 1e-120 (which still carries x^(1-s) mass for s near 1, yet sits
    beyond float resolution of the integrand) is integrated against the
    asymptote in closed form.

    Default tol is 1e-8 for s <= 0.9 and 1e-6 above.  n = 1 delegates to the
    exact circle formula.
    """
    s = validate_s(s)
    if not (0.0 <= r <= math.pi):
        raise ValueError(f"cap radius must lie in [0, pi], got {r}")
    if n == 1:
        if r <= 0.0 or r >= math.pi:
            return 0.0
        return perimeter_circle_exact(ArcUnion([(-r, 2.0 * r)]), s)
    if tol is None:
        tol = 1e-8 if s <= 0.9 else 1e-6
    if r <= 0.0 or r >= math.pi:
        return 0.0
    omega_n = sphere_surface(n - 1)
    inner_tol = 0.2 * tol

    def radial_factor(theta):
        # theta^-(n+s) sin^(n-1) collapsed so magnitudes stay representable
        return theta ** (-1.0 - s) * np.sinc(theta / math.pi) ** (n - 1)

    def inner(x: float) -> float:
        t = r - x
        hi = min(math.pi, r + t)
        cos_t, sin_t = math.cos(t), math.sin(t)
        sin_x = math.sin(x)

        def fraction(theta):
            num = (
                2.0 * cos_t * np.sin(0.5 * (theta + x)) * np.sin(0.5 * (theta - x))
                - sin_t * sin_x
            )
            cos_phi = np.clip(num / (sin_t * np.sin(theta)), -1.0, 1.0)
            return slice_cap_fraction(n, np.arccos(cos_phi))

        if s > 0.0:
            # log substitution theta = x e^w; the kernel mass piles up at
            # theta = x, hundreds of binary decades below hi when x is small
            def h_log(w):
                theta = x * np.exp(w)
                return np.exp(-s * w) * np.sinc(theta / math.pi) ** (n - 1) * fraction(theta)

            val = x**-s * adaptive_quad(h_log, 0.0, math.log(hi / x), tol=inner_tol)
        else:

            def h(theta):
                return radial_factor(theta) * fraction(theta)

            val = adaptive_quad(h, x, hi, tol=inner_tol)
        if hi < math.pi:
            val += adaptive_quad(radial_factor, hi, math.pi, tol=inner_tol)
        return omega_n * val

    def outer(xs):
        return np.array(
            [math.sin(r - x) ** (n - 1) * inner(float(x)) for x in np.atleast_1d(xs)]
        )

    if s <= 0.0:
        return omega_n * adaptive_quad(outer, 0.0, r, tol=0.5 * tol)
    x_min = 1e-120
    flat_a = (
        sphere_surface(n - 2)
        * incomplete_beta(1.0, 0.5 * (s + 1.0), 0.5 * (n - 1.0))
        / (2.0 * s)
    )
    bulk = adaptive_quad(outer, x_min, r, tol=0.5 * tol, grading=(s, x_min))
    edge = math.sin(r) ** (n - 1) * flat_a * x_min ** (1.0 - s) / (1.0 - s)
    return omega_n * (bulk + edge)


# ---------------------------------------------------------------------------
# exact one-dimensional formulas


def _check_exponent(s: float) -> float:
    s = validate_s(s)
    if s == 0.0:
        raise ValueError("s = 0 hits the logarithmic antiderivative; not supported")
    return s


def _circle_G(x, s: float):
    """Second antiderivative of the periodic kernel delta(x)^-(1+s) on [0, 2 pi].

    G''(x) = min(x, 2pi - x)^-(1+s), matched C^1 at pi.  Double integrals of
    the kernel over a rectangle [a,b] x [alpha,beta] reduce to
    G(beta-a) - G(beta-b) - G(alpha-a) + G(alpha-b).
    """
    c = 1.0 / (s * (1.0 - s))
    x = np.asarray(x, dtype=float)
    lower = -c * x ** (1.0 - s)
    upper = -c * (TWO_PI - x) ** (1.0 - s) - (2.0 / s) * math.pi ** (-s) * (x - math.pi)
    return np.where(x <= math.pi, lower, upper)


def perimeter_circle_exact(E: ArcUnion, s: float) -> float:
    """Exact s-perimeter of an arc union on S^1.

    Summed in closed form over (arc, complement-gap) pairs: with the gap
    shifted to a representative [alpha, beta] ahead of the arc [a, b], the
    pair contributes G(beta-a) - G(beta-b) - G(alpha-a) + G(alpha-b) with G
    the matched second antiderivative of the intrinsic-distance kernel.
    Empty and full unions have zero perimeter.  s = 0 is rejected.
    """
    s = _check_exponent(s)
    if not isinstance(E, ArcUnion):
        raise TypeError("perimeter_circle_exact expects an ArcUnion")
    if E.is_empty() or E.is_full():
        return 0.0
    total = 0.0
    for a, la in E.arcs:
        b = a + la
        for g, lg in E.gaps().arcs:
            alpha = b + ((g - b) % TWO_PI)
            beta = alpha + lg
            args = np.array([beta - a, beta - b, alpha - a, alpha - b])
            ga, gb, gc, gd = _circle_G(np.clip(args, 0.0, TWO_PI), s)
            total += float(ga - gb - gc + gd)
    return total


def _finite_power_terms(s: float, *diffs) -> float:
    """Sum of signed |diff|^(1-s) terms, skipping infinite differences.

    Infinite endpoints always enter in cancelling pairs, so dropping them
    realizes the finite limit of the antiderivative formula.
    """
    out = 0.0
    for sign, d in diffs:
        if math.isinf(d):
            continue
        out += sign * abs(d) ** (1.0 - s)
    return out


def interval_perimeter_exact(intervals, window, s: float) -> float:
    """Exact line-case s-perimeter of disjoint intervals relative to a window.

    intervals is a list of (a, b) with a < b, pairwise disjoint and
    contained in window = (lo, hi); lo/hi may be -inf/+inf.  The value is
    the closed-form sum over (interval, gap) pairs of

        (1/(s(1-s))) [ (a-alpha)^(1-s) - (a-beta)^(1-s)
                       + (b-beta)^(1-s) - (b-alpha)^(1-s) ]

    with |.| powers; unbounded gaps drop their two cancelling terms.
    Requires 0 < s < 1.
    """
    s = validate_s(s)
    if not 0.0 < s < 1.0:
        raise ValueError("the interval formula is for s in (0, 1)")
    lo, hi = float(window[0]), float(window[1])
    ivs = sorted((float(a), float(b)) for a, b in intervals)
    for a, b in ivs:
        if not a < b:
            raise ValueError("intervals need a < b")
        if a < lo - 1e-12 or b > hi + 1e-12:
            raise ValueError("intervals must lie inside the window")
    for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
        if a2 < b1:
            raise ValueError("intervals overlap")
    if not ivs:
        return 0.0
    gaps = []
    if lo < ivs[0][0]:
        gaps.append((lo, ivs[0][0]))
    for (_, b1), (a2, _) in zip(ivs, ivs[1:]):
        if a2 > b1:
            gaps.append((b1, a2))
    if hi > ivs[-1][1]:
        gaps.append((ivs[-1][1], hi))
    c = 1.0 / (s * (1.0 - s))
    total = 0.0
    for a, b in ivs:
        for alpha, beta in gaps:
            total += c * _finite_power_terms(
                s, (1.0, a - alpha), (-1.0, a - beta), (1.0, b - beta), (-1.0, b - alpha)
            )
    return total


def interval_perimeter_localized(intervals, window, s: float, eps: float) -> float:
    """Epsilon-localized interval perimeter: only pairs with |x - y| < eps.

    Each relative boundary point (interval endpoint interior to the window)
    contributes eps^(1-s)/(1-s) exactly, provided eps is smaller than half
    the shortest interval or gap, so (1-s) times this tends to the boundary
    point count as s -> 1.
    """
    s = validate_s(s)
    if not 0.0 < s < 1.0:
        raise ValueError("the localized formula is for s in (0, 1)")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    lo, hi = float(window[0]), float(window[1])
    count = 0
    for a, b in intervals:
        if not a < b:
            raise ValueError("intervals need a < b")
        if 2.0 * eps > b - a:
            raise ValueError("eps must be below half the shortest interval")
        count += int(a > lo) + int(b < hi)
    return count * eps ** (1.0 - s) / (1.0 - s)


# ---------------------------------------------------------------------------
# antipodal concentration (deterministic)


def antipodal_concentration_quad(n: int, p: float, t: float, delta: float = math.pi, tol: float = 1e-10) -> float:
    """t^n times the normalized-kernel mass a distance-delta antipodal cap carries.

    Computes t^n * omega_n * int_(pi-delta)^pi sin^(n-1)(theta) (theta/pi)^(tp-n)
    d theta.  For large t the integrand concentrates in a layer of width
    ~pi/t at theta = pi, so the evaluation substitutes
    theta = pi exp(-x/(tp-n+1)), which flattens the power kernel into e^-x
    exactly; the remaining factor is smooth and adaptive quadrature is
    reliable for any t.

    As t grows this tends to omega_n pi^n (n-1)!/p^n independently of delta.
    """
    if p < 1.0:
        raise ValueError("p must be >= 1")
    if t * p <= n:
        raise ValueError(f"need t > n/p for an integrable normalized kernel, got t={t}")
    if not 0.0 < delta <= math.pi:
        raise ValueError("delta must lie in (0, pi]")
    q = t * p - n + 1.0
    x_cut = 46.0 + 3.0 * n
    if delta < math.pi:
        x_cut = min(x_cut, -q * math.log1p(-delta / math.pi))

    def g(x):
        theta = math.pi * np.exp(-x / q)
        return np.exp(-x) * np.sin(theta) ** (n - 1)

    integral = (math.pi / q) * adaptive_quad(g, 0.0, x_cut, tol=tol)
    return t**n * sphere_surface(n - 1) * integral
