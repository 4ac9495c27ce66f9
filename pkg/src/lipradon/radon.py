"""Exact piecewise-linear Radon profiles of signed triangle regions.

For a direction omega the profile of a region R is t -> length of
R ∩ {<x, omega> = t}.  For a triangle this is a hat function, or a ramp with
a single jump when an edge is orthogonal to omega.  Profiles of signed
regions are sums of these, assembled from per-breakpoint (jump, slope
change) events so that cancelling jumps vanish exactly in exact mode.

Exact mode (QS3 values) is used at the 12 special directions and is the only
mode allowed there.  Everywhere else profiles are binary64, with breakpoints
merged when closer than ``MERGE_REL_TOL`` times the largest |t|.  Equal exact
vertices round to identical floats, so merging only absorbs rounding noise.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .directions import Direction
from .field import QS3, ZERO
from .geometry import SignedRegion, StandardTriangle

MERGE_REL_TOL = 1e-14
MERGE_ABS_TOL = 1e-300
FLOAT_JUMP_TOL = 1e-12
FLOAT_ZERO_TOL = 1e-10

INF = math.inf


class ModeError(ValueError):
    pass


@dataclass(frozen=True)
class PLFunction:
    """Compactly supported piecewise-linear function with recorded jumps.

    ``left[i]``/``right[i]`` are the one-sided limits at ``breakpoints[i]``;
    ``slopes[i]`` is the slope on (breakpoints[i], breakpoints[i+1]).  The
    function vanishes outside [breakpoints[0], breakpoints[-1]].
    """

    breakpoints: tuple
    left: tuple
    right: tuple
    slopes: tuple
    exact: bool = True

    @classmethod
    def zero(cls, exact: bool = True) -> PLFunction:
        return cls((), (), (), (), exact)

    def __len__(self) -> int:
        return len(self.breakpoints)

    def __call__(self, t, side: str = "right"):
        return pl_eval(self, t, side)

    @property
    def jumps(self) -> list:
        return [r - l for l, r in zip(self.left, self.right)]

    def to_json(self) -> dict:
        conv = (lambda v: v.to_json()) if self.exact else float
        out = {
            "mode": "exact" if self.exact else "float",
            "breakpoints": [conv(v) for v in self.breakpoints],
            "left": [conv(v) for v in self.left],
            "right": [conv(v) for v in self.right],
            "slopes": [conv(v) for v in self.slopes],
        }
        if self.exact:
            out["float"] = {
                k: [float(v) for v in getattr(self, k)]
                for k in ("breakpoints", "left", "right", "slopes")
            }
        return out


@dataclass(frozen=True)
class ProfileMetrics:
    lipschitz: object
    integral: object
    sup: object
    support_measure: object
    derivative_l2_sq: object

    def as_floats(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def _merge_tol(ts) -> float:
    return max(MERGE_REL_TOL * max((abs(t) for t in ts), default=0.0), MERGE_ABS_TOL)


def _assemble(events: Iterable[tuple], exact: bool) -> PLFunction:
    """Build a PLFunction from (t, jump, slope_change[, coverage_change]) events.

    In float mode the optional coverage counter (number of triangles whose
    support contains t) lets the running value and slope be reset to exactly
    zero across gaps, so rounding residue cannot drift over long empty spans.
    """
    if exact:
        merged: dict = {}
        for ev in events:
            t, jmp, ds = ev[0], ev[1], ev[2]
            if t in merged:
                a, b = merged[t]
                merged[t] = (a + jmp, b + ds)
            else:
                merged[t] = (jmp, ds)
        items = [(t, j, d, 0) for t, (j, d) in merged.items() if j or d]
        items.sort(key=lambda e: e[0])
        track = False
    else:
        raw = sorted(events, key=lambda e: e[0])
        track = bool(raw) and all(len(e) == 4 for e in raw)
        tol = _merge_tol(e[0] for e in raw)
        clusters = []
        for ev in raw:
            t, jmp, ds = ev[0], ev[1], ev[2]
            cov = ev[3] if track else 0
            if clusters and t - clusters[-1][0] <= tol:
                t0, j0, d0, c0 = clusters[-1]
                clusters[-1] = (t0, j0 + jmp, d0 + ds, c0 + cov)
            else:
                clusters.append((t, jmp, ds, cov))
        items = [c for c in clusters if c[1] != 0.0 or c[2] != 0.0 or (track and c[3])]
    zero = ZERO if exact else 0.0
    bps, lefts, rights, slopes = [], [], [], []
    value, slope = zero, zero
    coverage = 0
    prev = None
    for t, jmp, ds, cov in items:
        if prev is not None:
            value = value + slope * (t - prev)
            slopes.append(slope)
        left_value = value
        value = value + jmp
        slope = slope + ds
        if track:
            coverage += cov
            if coverage == 0:
                # nothing covers t any more: the right limit is 0 and the left
                # limit is whatever the recorded jump says, not the residue
                left_value, value, slope = -jmp, 0.0, 0.0
        lefts.append(left_value)
        rights.append(value)
        bps.append(t)
        prev = t
    if exact and items and (value or slope):
        raise ArithmeticError("profile events do not close to zero")
    if not exact:
        return _drop_flat(PLFunction(tuple(bps), tuple(lefts), tuple(rights), tuple(slopes), False))
    return PLFunction(tuple(bps), tuple(lefts), tuple(rights), tuple(slopes), exact)


def _drop_flat(f: PLFunction) -> PLFunction:
    """Remove float breakpoints that are neither kinks nor jumps (coverage-only markers)."""
    n = len(f.breakpoints)
    keep = []
    for i in range(n):
        before = f.slopes[i - 1] if i > 0 else 0.0
        after = f.slopes[i] if i < n - 1 else 0.0
        if f.left[i] != f.right[i] or before != after or i == 0 or i == n - 1:
            keep.append(i)
    if len(keep) == n:
        return f
    bps = tuple(f.breakpoints[i] for i in keep)
    left = tuple(f.left[i] for i in keep)
    right = tuple(f.right[i] for i in keep)
    slopes = tuple(f.slopes[i] for i in keep[:-1])
    return PLFunction(bps, left, right, slopes, False)


def _resolve_mode(omega: Direction, mode: str | None) -> bool:
    if mode is None:
        return omega.is_special
    if mode == "exact":
        if not omega.is_special:
            raise ModeError("exact mode needs one of the 12 special directions")
        return True
    if mode == "float":
        if omega.is_special:
            raise ModeError("float mode is not allowed at special directions")
        return False
    raise ModeError(f"unknown mode {mode!r}")


def _triangle_events(T: StandardTriangle, omega: Direction, exact: bool, weight: int = 1) -> list[tuple]:
    if exact:
        ts = sorted(omega.project(v) for v in T.vertices)
        area = T.area
    else:
        ts = sorted(omega.project_float(v) for v in T.float_vertices)
        area = T.area.to_float()
    t1, t2, t3 = ts
    h = 2 * area / (t3 - t1)
    if exact:
        h = h * weight
    else:
        h *= weight
    if t1 == t2:
        s = h / (t3 - t2)
        return [(t1, h, -s, 1), (t3, 0 * h, s, -1)]
    if t2 == t3:
        s = h / (t2 - t1)
        return [(t1, 0 * h, s, 1), (t3, -h, -s, -1)]
    s1 = h / (t2 - t1)
    s2 = h / (t3 - t2)
    return [(t1, 0 * h, s1, 1), (t2, 0 * h, -s1 - s2, 0), (t3, 0 * h, s2, -1)]


def triangle_profile(T: StandardTriangle, omega: Direction, mode: str | None = None) -> PLFunction:
    exact = _resolve_mode(omega, mode)
    return _assemble(_triangle_events(T, omega, exact), exact)


def _float_region_profile(R: SignedRegion, omega: Direction) -> PLFunction:
    """Float profile evaluated term-by-term at every merged breakpoint.

    Values and slopes are direct sums over the triangles rather than running
    sums, so rounding does not accumulate along t.  Triangles whose sorted
    projections coincide in binary64 (t1 == t2 or t2 == t3) contribute a jump,
    read off from separate left and right limits.
    """
    if not R.terms:
        return PLFunction.zero(False)
    c, s = omega.vector
    verts = np.array([t.triangle.float_vertices for t in R.terms])  # (n, 3, 2)
    ts = np.sort(verts[:, :, 0] * c + verts[:, :, 1] * s, axis=1)
    t1, t2, t3 = ts[:, 0], ts[:, 1], ts[:, 2]
    areas = np.array([t.triangle.area.to_float() for t in R.terms])
    weights = np.array([t.weight for t in R.terms], dtype=float)
    h = weights * 2.0 * areas / (t3 - t1)
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(t2 > t1, h / (t2 - t1), 0.0)
        down = np.where(t3 > t2, h / (t3 - t2), 0.0)

    raw = np.sort(ts.ravel())
    tol = _merge_tol((raw[0], raw[-1]))
    # clusters [first, last] of breakpoints closer than tol; the left limit is
    # taken at the first point and the right limit at the last, so a ramp
    # narrower than tol shows up as a jump rather than silently vanishing
    firsts, lasts = [raw[0]], [raw[0]]
    for t in raw[1:]:
        if t - lasts[-1] > tol:
            firsts.append(t)
            lasts.append(t)
        else:
            lasts[-1] = t
    B = np.array(firsts)
    Bl = np.array(lasts)

    def left_limit(x):
        x = x[:, None]
        v = (np.where((x > t1) & (x <= t2), up * (x - t1), 0.0)
             + np.where((x > t2) & (x <= t3), down * (t3 - x), 0.0))
        return v.sum(axis=1)

    def right_limit(x):
        x = x[:, None]
        v = (np.where((x >= t1) & (x < t2), up * (x - t1), 0.0)
             + np.where((x >= t2) & (x < t3), down * (t3 - x), 0.0))
        return v.sum(axis=1)

    lefts = left_limit(B)
    rights = right_limit(Bl)
    if len(B) > 1:
        mid = 0.5 * (Bl[:-1] + B[1:])[:, None]
        slope = (np.where((mid > t1) & (mid < t2), up, 0.0)
                 - np.where((mid > t2) & (mid < t3), down, 0.0)).sum(axis=1)
    else:
        slope = np.zeros(0)
    return PLFunction(tuple(float(b) for b in B), tuple(float(v) for v in lefts),
                      tuple(float(v) for v in rights), tuple(float(x) for x in slope), False)


def region_profile(R: SignedRegion, omega: Direction, mode: str | None = None) -> PLFunction:
    exact = _resolve_mode(omega, mode)
    if not exact:
        return _float_region_profile(R, omega)
    events = []
    for term in R.terms:
        events.extend(_triangle_events(term.triangle, omega, exact, term.weight))
    return _assemble(events, exact)


def _events_of(f: PLFunction, scale=1) -> list[tuple]:
    out = []
    n = len(f.breakpoints)
    zero = ZERO if f.exact else 0.0
    for i in range(n):
        before = f.slopes[i - 1] if i > 0 else zero
        after = f.slopes[i] if i < n - 1 else zero
        out.append((f.breakpoints[i], (f.right[i] - f.left[i]) * scale, (after - before) * scale))
    return out


def pl_sum(fs: Sequence[PLFunction], weights: Sequence | None = None) -> PLFunction:
    if not fs:
        return PLFunction.zero()
    exact = fs[0].exact
    if any(f.exact != exact for f in fs):
        raise ModeError("cannot mix exact and float profiles")
    weights = weights or [1] * len(fs)
    events = []
    for f, w in zip(fs, weights):
        events.extend(_events_of(f, w))
    return _assemble(events, exact)


def pl_eval(f: PLFunction, t, side: str = "right"):
    """One-sided limit of f at t (``side`` is ``left`` or ``right``)."""
    bps = f.breakpoints
    if f.exact:
        t = QS3.coerce(t)
        zero = ZERO
    else:
        t = float(t)
        zero = 0.0
    if not bps or t < bps[0] or t > bps[-1]:
        return zero
    i = bisect.bisect_left(bps, t)
    if i < len(bps) and bps[i] == t:
        return f.left[i] if side == "left" else f.right[i]
    # t lies strictly inside piece i-1
    return f.right[i - 1] + f.slopes[i - 1] * (t - bps[i - 1])


def _is_nonzero(x, exact: bool, tol: float) -> bool:
    return bool(x) if exact else abs(x) > tol


def pl_metrics(f: PLFunction) -> ProfileMetrics:
    exact = f.exact
    zero = ZERO if exact else 0.0
    bps = f.breakpoints
    if not bps:
        return ProfileMetrics(zero, zero, zero, zero, zero)
    has_jump = any(_is_nonzero(r - l, exact, FLOAT_JUMP_TOL) for l, r in zip(f.left, f.right))
    lip = max((abs(s) for s in f.slopes), default=zero)
    integral = zero
    support = zero
    d2 = zero
    for i, s in enumerate(f.slopes):
        dt = bps[i + 1] - bps[i]
        a, b = f.right[i], f.left[i + 1]
        integral = integral + (a + b) * dt / 2
        if _is_nonzero(a, exact, FLOAT_ZERO_TOL) or _is_nonzero(b, exact, FLOAT_ZERO_TOL):
            support = support + dt
        d2 = d2 + s * s * dt
    sup = max(max(f.left), max(f.right), zero)
    if has_jump:
        return ProfileMetrics(INF, integral, sup, support, INF)
    return ProfileMetrics(lip, integral, sup, support, d2)


def kinks(f: PLFunction, lo=None, hi=None, strict: bool = True) -> list:
    """Breakpoints (optionally inside (lo, hi)) where f jumps or changes slope."""
    out = []
    exact = f.exact
    n = len(f.breakpoints)
    zero = ZERO if exact else 0.0
    for i, t in enumerate(f.breakpoints):
        if lo is not None and (t <= lo if strict else t < lo):
            continue
        if hi is not None and (t >= hi if strict else t > hi):
            continue
        before = f.slopes[i - 1] if i > 0 else zero
        after = f.slopes[i] if i < n - 1 else zero
        if _is_nonzero(f.right[i] - f.left[i], exact, FLOAT_JUMP_TOL) or after != before:
            out.append(t)
    return out


def window_lipschitz(f: PLFunction, lo, hi) -> tuple[object, list]:
    """Lipschitz constant of f restricted to [lo, hi], plus jumps located in it.

    The constant is +inf if any breakpoint in [lo, hi] carries a jump.
    """
    exact = f.exact
    zero = ZERO if exact else 0.0
    bps = f.breakpoints
    jumps = [(t, r - l) for t, l, r in zip(bps, f.left, f.right)
             if lo <= t <= hi and _is_nonzero(r - l, exact, FLOAT_JUMP_TOL)]
    lip = zero
    for i, s in enumerate(f.slopes):
        a, b = bps[i], bps[i + 1]
        if b > lo and a < hi:
            lip = max(lip, abs(s))
    # the function vanishes outside its support, so pieces there have slope 0
    return (INF if jumps else lip), jumps


def agree_on(f_eval: Callable, g_eval: Callable, lo, hi, checkpoints: Iterable) -> list:
    """Compare two piecewise-linear evaluators on [lo, hi].

    ``checkpoints`` must include every breakpoint of both inside [lo, hi];
    between consecutive checkpoints both are affine, so agreement of the
    one-sided limits there is equivalent to agreement on the whole interval.
    Returns a list of (t, side, f, g) mismatches.
    """
    pts = sorted({p for p in checkpoints if lo <= p <= hi} | {lo, hi})
    bad = []
    for p in pts:
        for side in ("left", "right"):
            if (p == lo and side == "left") or (p == hi and side == "right"):
                continue
            a, b = f_eval(p, side), g_eval(p, side)
            if a != b:
                bad.append((p, side, a, b))
    return bad


def profile_metrics(R: SignedRegion, omega: Direction, mode: str | None = None) -> ProfileMetrics:
    return pl_metrics(region_profile(R, omega, mode))
