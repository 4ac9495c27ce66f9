"""Numerical checks of the half-derivative Sobolev facts behind unboundedness.

* The Fourier-slice energy identity, tested on a Gaussian.
* The truncated Gagliardo integral

      G(delta) = ∬_{|x-y| >= delta} |1_S(x) - 1_S(y)|^2 / |x-y|^3 dx dy,

  which diverges like 4 * perimeter(S) * log(1/delta) for an indicator.
* The integrated inequality sum |d/dt R|^2 <= M * sum Lip^2 over directions.

Fourier convention: ``F f(xi) = ∫ f(x) exp(-i <x, xi>) dx`` and
``|f|^2_{H^1/2} = (2 pi)^-3 ∫ |xi| |F f(xi)|^2 dxi``.  With this choice
``|| d/dt R f ||^2_{L2(S^1 x R)} = 8 pi^2 |f|^2_{H^1/2}`` holds exactly; it is
the unitary ``exp(-2 pi i <x, xi>)`` convention with ``∫ |xi| |f^|^2`` rewritten.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, special

from .construction import build
from .directions import Direction
from .geometry import SignedRegion, StandardTriangle, standard_triangle
from .radon import pl_metrics, region_profile
from .report import Report

SEMINORM_NORMALIZATION = 1.0 / (8.0 * math.pi**3)
CI_Z = 1.959963984540054


@dataclass
class SeminormEstimate:
    value: float
    confidence_halfwidth: float
    delta: float
    sample_count: int
    method: str
    seed: int | None = None

    def to_row(self) -> tuple:
        return (self.delta, self.value, self.confidence_halfwidth)


# --------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Ball:
    radius: float = 1.0

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    @property
    def perimeter(self) -> float:
        return 2 * math.pi * self.radius

    @property
    def diameter(self) -> float:
        return 2 * self.radius


@dataclass(frozen=True)
class Triangle:
    """A (convex) standard triangle in float coordinates."""

    vertices: tuple

    @classmethod
    def standard(cls, side: float = 1.0) -> Triangle:
        T = standard_triangle(0, 0, 1)
        return cls(tuple((side * x, side * y) for x, y in T.float_vertices))

    @classmethod
    def from_standard(cls, T: StandardTriangle) -> Triangle:
        return cls(T.float_vertices)

    @property
    def _arr(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    @property
    def area(self) -> float:
        (ax, ay), (bx, by), (cx, cy) = self.vertices
        return 0.5 * abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))

    @property
    def perimeter(self) -> float:
        v = self._arr
        return float(sum(np.linalg.norm(v[(i + 1) % 3] - v[i]) for i in range(3)))

    @property
    def diameter(self) -> float:
        v = self._arr
        return float(max(np.linalg.norm(v[i] - v[j]) for i in range(3) for j in range(3)))

    @property
    def incenter_inradius(self) -> tuple[np.ndarray, float]:
        v = self._arr
        lens = np.array([np.linalg.norm(v[(i + 1) % 3] - v[(i + 2) % 3]) for i in range(3)])
        center = (lens[:, None] * v).sum(axis=0) / lens.sum()
        return center, 2 * self.area / lens.sum()

    def halfplanes(self) -> tuple[np.ndarray, np.ndarray]:
        """Outward unit normals n and offsets c with the triangle = {n.y <= c}."""
        v = self._arr
        center = v.mean(axis=0)
        ns, cs = [], []
        for i in range(3):
            a, b = v[i], v[(i + 1) % 3]
            e = b - a
            n = np.array([e[1], -e[0]]) / np.linalg.norm(e)
            if n @ (center - a) > 0:
                n = -n
            ns.append(n)
            cs.append(n @ a)
        return np.array(ns), np.array(cs)


@dataclass(frozen=True)
class Region:
    """A signed triangle region, e.g. a truncation of E."""

    region: SignedRegion

    @classmethod
    def E(cls, J: int) -> Region:
        return cls(build(J).region)

    @property
    def area(self) -> float:
        return sum(t.weight * t.triangle.area.to_float() for t in self.region.terms)

    @property
    def diameter(self) -> float:
        pts = np.array([v for t in self.region.terms for v in t.triangle.float_vertices])
        d = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())


def parse_shape(text: str):
    """``ball`` / ``ball:r``, ``triangle`` / ``triangle:s``, ``E:J``."""
    name, _, arg = text.partition(":")
    if name == "ball":
        return Ball(float(arg) if arg else 1.0)
    if name == "triangle":
        return Triangle.standard(float(arg) if arg else 1.0)
    if name == "E":
        return Region.E(int(arg) if arg else 2)
    raise ValueError(f"unknown shape {text!r}")


# --------------------------------------------------------------------------
# ray geometry


def _ball_exit(R: float, rho: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Distance from a point at radius rho to the circle along a ray at angle phi from the outward normal."""
    return -rho * np.cos(phi) + np.sqrt(np.maximum(R * R - (rho * np.sin(phi)) ** 2, 0.0))


def _convex_exit(normals: np.ndarray, offsets: np.ndarray, x: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Exit distance of rays x + r e from a convex polygon {n.y <= c}."""
    ne = e @ normals.T  # (m, 3)
    slack = offsets[None, :] - x @ normals.T
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(ne > 0, slack / ne, np.inf)
    return np.maximum(r.min(axis=1), 0.0)


def _triangle_ray_intervals(tris: np.ndarray, x: np.ndarray, e: np.ndarray):
    """Parameter intervals [a, b] (r >= 0) of rays inside each triangle.

    ``tris`` has shape (k, 3, 2).  Returns arrays (m, k); empty intervals
    have a >= b.
    """
    k = tris.shape[0]
    m = x.shape[0]
    lo = np.zeros((m, k))
    hi = np.full((m, k), np.inf)
    center = tris.mean(axis=1)
    for i in range(3):
        a = tris[:, i, :]
        b = tris[:, (i + 1) % 3, :]
        ed = b - a
        n = np.stack([ed[:, 1], -ed[:, 0]], axis=1)
        flip = ((center - a) * n).sum(axis=1) > 0
        n[flip] *= -1
        c = (n * a).sum(axis=1)
        ne = e @ n.T
        slack = c[None, :] - x @ n.T
        with np.errstate(divide="ignore", invalid="ignore"):
            r = slack / ne
        pos = ne > 0
        neg = ne < 0
        hi = np.where(pos, np.minimum(hi, r), hi)
        lo = np.where(neg, np.maximum(lo, r), lo)
        # parallel edge with the ray outside the half-plane
        outside = (ne == 0) & (slack < 0)
        hi = np.where(outside, -1.0, hi)
    return lo, hi


def _outside_integral_signed(region: Region, x: np.ndarray, e: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """∫_{r >= delta} r^-2 [x + r e outside the region] dr for each sample and delta."""
    terms = region.region.terms
    tris = np.array([t.triangle.float_vertices for t in terms])
    w = np.array([t.weight for t in terms], dtype=float)
    lo, hi = _triangle_ray_intervals(tris, x, e)
    valid = hi > lo
    out = np.empty((x.shape[0], deltas.size))
    for n, d in enumerate(deltas):
        a = np.maximum(lo, d)
        b = np.maximum(hi, d)
        inside = np.where(valid, 1.0 / a - np.where(np.isinf(b), 0.0, 1.0 / b), 0.0)
        out[:, n] = 1.0 / d - inside @ w
    return out


def _indicator(region: Region, x: np.ndarray) -> np.ndarray:
    terms = region.region.terms
    tris = np.array([t.triangle.float_vertices for t in terms])
    w = np.array([t.weight for t in terms], dtype=float)
    # a point lies in a triangle iff the ray interval starts at r = 0
    e = np.tile([[1.0, 0.0]], (x.shape[0], 1))
    lo, hi = _triangle_ray_intervals(tris, x, e)
    return ((lo <= 0) & (hi > 0)) @ w


# --------------------------------------------------------------------------
# Gagliardo seminorm


def _batch_streams(seed: int, batches: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(batches)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def _boundary_layer_batch(shape, deltas: np.ndarray, n: int, k_dirs: int, eps: float,
                          rng: np.random.Generator) -> np.ndarray:
    """One batch of the boundary-layer importance sampler for a convex shape.

    Points are drawn by distance u to the boundary with density
    proportional to 1/(u + eps), then uniformly along the level curve of
    that distance; k_dirs stratified ray angles are used per point.
    """
    if isinstance(shape, Ball):
        depth = shape.radius
    else:
        center, depth = shape.incenter_inradius
    L = math.log1p(depth / eps)
    U = rng.random(n)
    u = eps * np.expm1(U * L)
    pdf = 1.0 / ((u + eps) * L)
    phi = (np.arange(k_dirs)[None, :] + rng.random((n, 1))) * (2 * math.pi / k_dirs)
    if isinstance(shape, Ball):
        R = shape.radius
        level_len = 2 * math.pi * (R - u)
        d = _ball_exit(R, (R - u)[:, None], phi)
    else:
        v = shape._arr
        scale = 1.0 - u / depth
        level_len = shape.perimeter * scale
        # uniform point on the perimeter of the shrunk triangle
        s = rng.random(n) * 3.0
        idx = np.minimum(s.astype(int), 2)
        frac = (s - idx)[:, None]
        a = v[idx]
        b = v[(idx + 1) % 3]
        p = a + frac * (b - a)
        x = center + (p - center) * scale[:, None]
        ns, cs = shape.halfplanes()
        e = np.stack([np.cos(phi), np.sin(phi)], axis=-1).reshape(-1, 2)
        xr = np.repeat(x, k_dirs, axis=0)
        d = _convex_exit(ns, cs, xr, e).reshape(n, k_dirs)
    weight = level_len / pdf
    # integrand over directions: ∫_{r >= max(delta, d)} r^-2 dr = 1 / max(delta, d)
    est = np.empty(deltas.size)
    for i, dl in enumerate(deltas):
        inner = (1.0 / np.maximum(d, dl)).mean(axis=1) * 2 * math.pi
        est[i] = 2.0 * np.mean(weight * inner)
    return est


def _uniform_region_batch(shape: Region, deltas: np.ndarray, n: int, k_dirs: int,
                          rng: np.random.Generator) -> np.ndarray:
    terms = [t for t in shape.region.terms if t.weight > 0]
    areas = np.array([t.triangle.area.to_float() for t in terms])
    total = areas.sum()
    tris = np.array([t.triangle.float_vertices for t in terms])
    pick = rng.choice(len(terms), size=n, p=areas / total)
    r1, r2 = rng.random(n), rng.random(n)
    flip = r1 + r2 > 1
    r1, r2 = np.where(flip, 1 - r1, r1), np.where(flip, 1 - r2, r2)
    a, b, c = tris[pick, 0], tris[pick, 1], tris[pick, 2]
    x = a + r1[:, None] * (b - a) + r2[:, None] * (c - a)
    phi = (np.arange(k_dirs)[None, :] + rng.random((n, 1))) * (2 * math.pi / k_dirs)
    e = np.stack([np.cos(phi), np.sin(phi)], axis=-1).reshape(-1, 2)
    xr = np.repeat(x, k_dirs, axis=0)
    h = _outside_integral_signed(shape, xr, e, deltas).reshape(n, k_dirs, deltas.size)
    member = _indicator(shape, x) == 1
    inner = h.mean(axis=1) * 2 * math.pi
    return 2.0 * total * (member[:, None] * inner).mean(axis=0)


def gagliardo_truncated(shape, delta: float | Sequence[float], samples: int = 200_000,
                        seed: int = 12345, batches: int = 20, k_dirs: int = 8,
                        method: str = "monte-carlo", workers: int = 1) -> list[SeminormEstimate]:
    """Truncated Gagliardo integral of the indicator of ``shape``.

    ``delta`` may be a list; Monte-Carlo estimates for all deltas share the
    same samples, so they are nondecreasing as delta decreases.  The ball
    also supports ``method="quadrature"``.
    """
    deltas = np.atleast_1d(np.asarray(delta, dtype=float))
    if np.any(deltas <= 0):
        raise ValueError("delta must be positive")
    if method == "quadrature":
        if not isinstance(shape, Ball):
            raise ValueError("quadrature mode is only available for the ball")
        return [SeminormEstimate(ball_gagliardo_quadrature(shape.radius, d), 0.0, float(d), 0,
                                 "quadrature") for d in deltas]
    if method != "monte-carlo":
        raise ValueError(f"unknown method {method!r}")
    per_batch = max(1, samples // batches)
    eps = float(deltas.min())
    if isinstance(shape, (Ball, Triangle)):
        run = lambda rng: _boundary_layer_batch(shape, deltas, per_batch, k_dirs, eps, rng)
    elif isinstance(shape, Region):
        run = lambda rng: _uniform_region_batch(shape, deltas, per_batch, k_dirs, rng)
    else:
        raise TypeError(f"unsupported shape {shape!r}")
    streams = _batch_streams(seed, batches)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        # each batch owns its stream; map keeps batch order, so the result is schedule-free
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, streams))
    else:
        results = [run(rng) for rng in streams]
    res = np.array(results)  # (batches, deltas)
    means = res.mean(axis=0)
    half = CI_Z * res.std(axis=0, ddof=1) / math.sqrt(batches)
    return [SeminormEstimate(float(m), float(h), float(d), per_batch * batches, "monte-carlo", seed)
            for m, h, d in zip(means, half, deltas)]


def _ball_inner(R: float, rho: float, delta: float) -> float:
    """∫ over ray angles of 1/max(delta, exit distance), for a point at radius rho."""
    if rho == 0.0:
        return 2 * math.pi / max(delta, R)
    if R - rho >= delta:
        phi_star = 0.0
    else:
        c = (R * R - rho * rho - delta * delta) / (2 * rho * delta)
        phi_star = math.acos(min(1.0, max(-1.0, c)))
    if phi_star >= math.pi:
        return 2 * math.pi / delta
    # 1/d = (rho cos + sqrt(R^2 - rho^2 sin^2)) / (R^2 - rho^2)
    m = (rho / R) ** 2
    tail = (-rho * math.sin(phi_star)
            + R * (2 * special.ellipe(m) - special.ellipeinc(phi_star, m))) / (R * R - rho * rho)
    return 2 * (phi_star / delta + tail)


def ball_gagliardo_quadrature(R: float, delta: float) -> float:
    """Semi-analytic value for the disc: 1-D quadrature of an elliptic-integral integrand."""
    f = lambda rho: 2 * math.pi * rho * _ball_inner(R, rho, delta)
    pts = [R - delta] if 0 < R - delta < R else None
    val, _ = integrate.quad(f, 0.0, R, points=pts, limit=400, epsabs=1e-10, epsrel=1e-10)
    return 2.0 * val


def log_fit(deltas: Sequence[float], values: Sequence[float]) -> dict:
    """Least-squares fit value = a + b log(1/delta) with its R^2."""
    x = np.log(1.0 / np.asarray(deltas, dtype=float))
    y = np.asarray(values, dtype=float)
    b, a = np.polyfit(x, y, 1)
    resid = y - (a + b * x)
    r2 = 1.0 - (resid @ resid) / ((y - y.mean()) @ (y - y.mean()))
    return {"a": float(a), "b": float(b), "r2": float(r2)}


def gagliardo_divergence(shape=None, exponents: Sequence[int] = range(4, 13), **kw) -> Report:
    """Log-divergence of the truncated integral over delta = 2^-n."""
    shape = shape or Ball(1.0)
    rep = Report("gagliardo")
    deltas = [2.0**-n for n in exponents]
    est = gagliardo_truncated(shape, deltas, **kw)
    vals = [e.value for e in est]
    fit = log_fit(deltas, vals)
    rep.check(fit["r2"] > 0.99, clause="R2", **fit)
    rep.check(fit["b"] > 0, clause="slope", **fit)
    rep.check(all(b >= a for a, b in zip(vals, vals[1:])), clause="monotone in delta", values=vals)
    rep.details.update(fit)
    rep.details["model_slope"] = 4 * shape.perimeter if hasattr(shape, "perimeter") else None
    rep.details["estimates"] = [e.to_row() for e in est]
    return rep


# --------------------------------------------------------------------------
# Fourier-slice identity


@dataclass
class SliceIdentity:
    sigma: float
    lhs: float
    rhs: float

    @property
    def rel_err(self) -> float:
        return abs(self.lhs - self.rhs) / self.rhs


def gaussian_radon(sigma: float, t):
    """R_omega of exp(-|x|^2/sigma^2), the same for every omega."""
    return sigma * math.sqrt(math.pi) * np.exp(-np.asarray(t) ** 2 / sigma**2)


def gaussian_fourier(sigma: float, r):
    """F f at |xi| = r for f = exp(-|x|^2/sigma^2) (exp(-i x.xi) convention)."""
    return math.pi * sigma**2 * np.exp(-(sigma**2) * np.asarray(r) ** 2 / 4)


def slice_identity_gaussian(sigma: float) -> SliceIdentity:
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    def dR(t):
        return gaussian_radon(sigma, t) * (-2 * t / sigma**2)

    # the profile does not depend on omega, so the S^1 integral is 2 pi times one slice
    energy, _ = integrate.quad(lambda t: dR(t) ** 2, -np.inf, np.inf, epsabs=0, epsrel=1e-12)
    lhs = 2 * math.pi * energy
    radial, _ = integrate.quad(lambda r: r * r * gaussian_fourier(sigma, r) ** 2, 0, np.inf,
                               epsabs=0, epsrel=1e-12)
    seminorm = SEMINORM_NORMALIZATION * 2 * math.pi * radial
    return SliceIdentity(sigma, lhs, 8 * math.pi**2 * seminorm)


def slice_check(sigmas: Sequence[float] = (0.5, 1.0, 2.0), tol: float = 1e-6) -> Report:
    rep = Report("slice")
    rows = []
    for s in sigmas:
        r = slice_identity_gaussian(s)
        rep.check(r.rel_err <= tol, sigma=s, lhs=r.lhs, rhs=r.rhs, rel_err=r.rel_err)
        rows.append((s, r.lhs, r.rhs, r.rel_err))
    rep.details["rows"] = rows
    return rep


# --------------------------------------------------------------------------
# integrated Lipschitz inequality


def near_special(theta: float, tol: float = 1e-9) -> bool:
    q = theta / (math.pi / 6)
    return abs(q - round(q)) * (math.pi / 6) < tol


def offset_grid(n: int) -> list[Direction]:
    """n uniform directions shifted by half a step.

    Raises if a grid point falls on a special direction (odd n, n = 90, ...);
    720 and 360 are safe.
    """
    grid = [Direction.from_angle(2 * math.pi * (i + 0.5) / n) for i in range(n)]
    if any(near_special(w.theta) for w in grid):
        raise ValueError(f"the half-step grid of size {n} hits a special direction")
    return grid


@dataclass
class ChainResult:
    J: int
    lhs: float
    rhs: float
    M_hat: float
    per_direction: list = field(default_factory=list)


def chain_inequality_check(J: int, grid: Sequence[Direction]) -> Report:
    """sum_w ∫ |d/dt R_w|^2 <= M_hat * sum_w Lip(w)^2 over a quadrature grid on S^1."""
    if any(w.is_special or near_special(w.theta) for w in grid):
        raise ValueError("grid must avoid the 12 special directions")
    rep = Report(f"chain[J={J}]")
    region = build(J).region
    weight = 2 * math.pi / len(grid)
    metrics = [pl_metrics(region_profile(region, w, "float")) for w in grid]
    M_hat = max(m.support_measure for m in metrics)
    lhs = weight * sum(m.derivative_l2_sq for m in metrics)
    rhs = M_hat * weight * sum(m.lipschitz**2 for m in metrics)
    for w, m in zip(grid, metrics):
        rep.check(m.derivative_l2_sq <= m.support_measure * m.lipschitz**2 * (1 + 1e-12),
                  theta=w.theta, clause="pointwise")
    rep.check(lhs <= rhs, clause="integrated", lhs=lhs, rhs=rhs)
    rep.details.update({"J": J, "lhs": lhs, "rhs": rhs, "M_hat": M_hat, "directions": len(grid)})
    return rep
