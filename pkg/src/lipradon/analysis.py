"""Checks of the quantitative claims about E and its Radon profiles.

Covers the closed-form profile table f_j at direction w_0, the partial sums
F_k and their 3*sqrt(3) slope bound, jump cancellation at the edge-normal
directions, direction sweeps of the Lipschitz constant, and the line-count
bound for directions near w_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .construction import (
    TruncatedE,
    area_of_E,
    build,
    build_E1,
    feet_outer_edges,
    line_intersection_count,
    max_intersection_count,
    projection_intervals,
)
from .directions import Direction, acute_angle
from .field import QS3, SQRT3, ZERO
from .geometry import Orientation, SignedRegion, cell
from .radon import (
    INF,
    PLFunction,
    agree_on,
    kinks,
    pl_eval,
    pl_metrics,
    pl_sum,
    region_profile,
    window_lipschitz,
)
from .report import Report

# base intervals I^1..I^5 on [-1/2, 0] and the affine pieces (slope, intercept
# at scale 1) of f_0 / sqrt(3) on them
BASE_INTERVALS = (
    (Fraction(-1, 2), Fraction(-2, 7)),
    (Fraction(-2, 7), Fraction(-3, 14)),
    (Fraction(-3, 14), Fraction(-1, 7)),
    (Fraction(-1, 7), Fraction(-1, 14)),
    (Fraction(-1, 14), Fraction(0)),
)


@dataclass(frozen=True)
class FjTable:
    """Intervals I^0_j..I^5_j and the coefficients of f_j / sqrt(3) on each."""

    j: int
    intervals: tuple[tuple[Fraction, Fraction], ...]
    slopes: tuple[int, ...]
    intercepts: tuple[Fraction, ...]

    def piece(self, t: Fraction) -> int:
        for i, (lo, hi) in enumerate(self.intervals):
            if lo <= t <= hi:
                return i
        raise ValueError(f"t={t} outside [-1/2, 0]")


def fj_table(j: int) -> FjTable:
    if j < 0:
        raise ValueError("j must be >= 0")
    s = Fraction(1, 4**j)
    intervals = [(Fraction(-1, 2), -s / 2)] + [(s * a, s * b) for a, b in BASE_INTERVALS]
    two = Fraction(2)
    intercepts = (
        Fraction(0),
        two ** (-2 * j - 1),
        Fraction(3, 7) * two ** (-2 * j - 1),
        Fraction(3, 7) * two ** (-2 * j + 1),
        Fraction(1, 7) * two ** (-2 * j + 2),
        two ** (-2 * j - 1),
    )
    slopes = (0, 1, 0, 3, 1, 0)
    return FjTable(j, tuple(intervals), slopes, intercepts)


def fj_reference(j: int, t) -> QS3:
    """The closed-form six-case value of f_j(t) for t in [-1/2, 0]."""
    t = QS3.coerce(t)
    if not t.is_rational():
        raise ValueError("fj_reference takes rational t")
    tq = t.a
    if tq < Fraction(-1, 2) or tq > 0:
        raise ValueError(f"t={tq} outside [-1/2, 0]")
    table = fj_table(j)
    i = table.piece(tq)
    return SQRT3 * (table.slopes[i] * tq + table.intercepts[i])


def fj_function(j: int) -> PLFunction:
    """f_j restricted to [-1/2, 0] as an exact PLFunction (zero elsewhere)."""
    table = fj_table(j)
    pts = sorted({p for iv in table.intervals for p in iv})
    bps, left, right, slopes = [], [], [], []
    for n, p in enumerate(pts):
        inside_left = ZERO if n == 0 else fj_reference(j, p)
        inside_right = ZERO if n == len(pts) - 1 else fj_reference(j, p)
        bps.append(QS3(p))
        left.append(inside_left)
        right.append(inside_right)
        if n < len(pts) - 1:
            mid = (p + pts[n + 1]) / 2
            i = table.piece(mid)
            slopes.append(SQRT3 * table.slopes[i])
    return PLFunction(tuple(bps), tuple(left), tuple(right), tuple(slopes), True)


def _sample_points(lo: Fraction, hi: Fraction, n: int) -> list[Fraction]:
    if lo == hi:
        return [lo]
    return [lo + (hi - lo) * Fraction(m, n + 1) for m in range(n + 2)]


def scaled_E1_profile(j: int, orientation: Orientation = Orientation.UP, foot_label: int = 0) -> PLFunction:
    region = build_E1(orientation, foot_label).scaled(Fraction(1, 4**j))
    return region_profile(region, Direction.omega(0), "exact")


def verify_fj(j: int, sample_count: int = 100, orientation: Orientation = Orientation.UP,
              foot_label: int = 0) -> Report:
    """Compare the geometric profile of 4^-j E_1 at w_0 with the f_j table."""
    rep = Report(f"fj[j={j}]")
    prof = scaled_E1_profile(j, orientation, foot_label)
    table = fj_table(j)
    lo, hi = Fraction(-1, 2), Fraction(0)
    for i, (a, b) in enumerate(table.intervals):
        for t in _sample_points(a, b, sample_count):
            # the geometric profile is continuous at w_0: both limits must match
            got = (pl_eval(prof, QS3(t), "left"), pl_eval(prof, QS3(t), "right"))
            want = fj_reference(j, t)
            rep.check(got[0] == want and got[1] == want, t=t, interval=i, expected=want, got=got)
    ref = fj_function(j)
    geo_k = kinks(prof, QS3(lo), QS3(hi))
    ref_k = kinks(ref, QS3(lo), QS3(hi))
    rep.check(geo_k == ref_k, clause="breakpoints", expected=ref_k, got=geo_k)
    rep.details["breakpoints"] = [str(t) for t in geo_k]
    rep.details["samples_per_interval"] = sample_count
    return rep


def C(m: int) -> QS3:
    """C_m = (2/sqrt 3)(1 - 4^-(m+1)), the value of sum_{j<=m} f_j on I^5_m."""
    return (2 / SQRT3) * (1 - Fraction(1, 4 ** (m + 1)))


def verify_Fk(k_max: int) -> Report:
    """Exact check of the decomposition of F_k = f_0 + ... + f_k on [-1/2, 0]."""
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    rep = Report("Fk")
    fs = [fj_function(j) for j in range(k_max + 1)]
    Fs = [pl_sum(fs[: k + 1]) for k in range(k_max + 1)]
    lo, hi = QS3(Fraction(-1, 2)), QS3(0)
    bound = 3 * SQRT3
    lips = {}

    def ev(f):
        return lambda t, side: pl_eval(f, t, side)

    def shifted(f, c):
        return lambda t, side: pl_eval(f, t, side) + c

    for m in range(k_max):
        direct = sum((SQRT3 * Fraction(1, 2 ** (2 * j + 1)) for j in range(m + 1)), ZERO)
        rep.check(direct == C(m), clause="C", m=m, direct=direct, closed_form=C(m))

    for k in range(2, k_max + 1):
        tk, tk1, tk2 = fj_table(k), fj_table(k - 1), fj_table(k - 2)
        I0k, I1k, I5k1, I5k2 = tk.intervals[0], tk.intervals[1], tk1.intervals[5], tk2.intervals[5]
        pts = set(Fs[k].breakpoints) | set(Fs[k - 1].breakpoints) | set(fs[k].breakpoints) | set(fs[k - 1].breakpoints)

        bad = agree_on(ev(Fs[k]), ev(Fs[k - 1]), QS3(I0k[0]), QS3(I0k[1]), pts)
        rep.check(not bad, k=k, clause="a", mismatches=bad[:3])

        bad = agree_on(ev(Fs[k]), shifted(fs[k], C(k - 1)), QS3(I5k1[0]), QS3(I5k1[1]), pts)
        rep.check(not bad, k=k, clause="b", mismatches=bad[:3])

        rep.check(I5k2[0] <= I1k[0] and I1k[1] <= I5k2[1], k=k, clause="c-inclusion")
        rhs = pl_sum([fs[k - 1], fs[k]])
        bad = agree_on(ev(Fs[k]), shifted(rhs, C(k - 2)), QS3(I1k[0]), QS3(I1k[1]), pts | set(rhs.breakpoints))
        rep.check(not bad, k=k, clause="c", mismatches=bad[:3])

        cover = (I0k[0] == Fraction(-1, 2) and I0k[1] == I1k[0] and I1k[1] == I5k1[0] and I5k1[1] == 0)
        rep.check(cover, k=k, clause="d", intervals=[I0k, I1k, I5k1])

        lip, jumps = window_lipschitz(Fs[k], lo, hi)
        # the restriction to [-1/2, 0] ends with a drop to zero at t = 0; only
        # interior jumps matter
        interior = [(t, j) for t, j in jumps if lo < t < hi]
        slope_max = max((abs(s) for s, a, b in zip(Fs[k].slopes, Fs[k].breakpoints, Fs[k].breakpoints[1:])
                         if a >= lo and b <= hi), default=ZERO)
        rep.check(not interior and slope_max <= bound, k=k, clause="e", max_slope=slope_max, jumps=interior)
        lips[k] = slope_max
    rep.details["max_slope"] = {k: v for k, v in lips.items()}
    rep.details["bound"] = bound
    return rep


def verify_partial_sums_vs_E(k_max: int = 4) -> Report:
    """sum_{j<=k} f_j equals the profile of E_{2k+1} at w_0 on [-1/2, 0]."""
    rep = Report("Fk_vs_E")
    lo, hi = QS3(Fraction(-1, 2)), QS3(0)
    for k in range(k_max + 1):
        Fk = pl_sum([fj_function(j) for j in range(k + 1)])
        prof = region_profile(build(2 * k + 1).region, Direction.omega(0), "exact")
        pts = set(Fk.breakpoints) | set(prof.breakpoints)
        # F_k is cut off at t = 0 while the profile continues, so compare the
        # inward limit at 0 only (agree_on already skips the right side of hi)
        bad = agree_on(lambda t, s: pl_eval(prof, t, s), lambda t, s: pl_eval(Fk, t, s), lo, hi, pts)
        rep.check(not bad, k=k, J=2 * k + 1, mismatches=bad[:3])
    return rep


def rho(E: TruncatedE, omega: Direction) -> QS3:
    """Smallest |<p, omega>| over endpoints of the level-J outer edges."""
    vals = []
    for a, b in feet_outer_edges(E, E.J):
        pa, pb = omega.project(a), omega.project(b)
        if pa.sign() * pb.sign() < 0:
            return ZERO
        vals.extend([abs(pa), abs(pb)])
    return min(vals)


def _contributors(R: SignedRegion, omega: Direction, t) -> list:
    from .radon import triangle_profile

    out = []
    for term in R.terms:
        prof = triangle_profile(term.triangle, omega, "exact")
        for b, l, r in zip(prof.breakpoints, prof.left, prof.right):
            if b == t and r != l:
                out.append({"triangle": term.triangle.to_json(), "weight": term.weight})
    return out


def special_direction_check(J: int) -> Report:
    """Interior jump cancellation of E_J at the six edge-normal directions."""
    if J < 2:
        raise ValueError("J must be >= 2")
    E = build(J)
    rep = Report(f"special[J={J}]")
    per_dir = {}
    for m in (1, 3, 5, 7, 9, 11):
        omega = Direction.special(m)
        prof = region_profile(E.region, omega, "exact")
        r = rho(E, omega)
        lip, jumps = window_lipschitz(prof, -r, r)
        for t, j in jumps:
            rep.check(False, direction=omega.name, t=t, jump=j,
                      contributors=_contributors(E.region, omega, t))
        rep.check(lip != INF, direction=omega.name, clause="finite windowed Lipschitz")
        outside = [(t, j) for t, j in zip(prof.breakpoints, prof.jumps) if j and abs(t) > r]
        per_dir[omega.name] = {
            "rho": r,
            "window_lipschitz": lip,
            "uncancelled_outside_window": len(outside),
            "outside_jumps": [(float(t), float(j)) for t, j in outside],
        }
    # control: the first cell alone keeps its jump, so the check is not vacuous
    ctrl = region_profile(cell(E.T1), Direction.omega_perp(0), "exact")
    ctrl_jumps = [j for j in ctrl.jumps if j]
    rep.check(len(ctrl_jumps) > 0, clause="control cell(T_1) has a jump")
    rep.details["directions"] = per_dir
    rep.details["control_jumps"] = ctrl_jumps
    return rep


def rho_sequence(J_max: int) -> list[QS3]:
    omega = Direction.omega_perp(0)
    return [rho(build(J), omega) for J in range(2, J_max + 1)]


@dataclass
class SweepRow:
    omega: Direction
    lip: float
    support: float
    sup: float
    integral: float
    exact: bool = False
    windowed: bool = False


@dataclass
class SweepTable:
    J: int
    rows: list[SweepRow]
    grid: str
    mode: str = "mixed"
    summary: dict = field(default_factory=dict)

    def csv_rows(self) -> list[tuple]:
        return [(r.omega.theta, r.lip, r.support, r.sup, r.integral) for r in self.rows]


def uniform_grid(n: int) -> list[Direction]:
    """n equally spaced directions from angle 0; multiples of 30 degrees are special."""
    return [Direction.from_degrees(Fraction(360 * i, n)) for i in range(n)]


def dyadic_grid(toward: Direction, levels: Iterable[int], both_sides: bool = True) -> list[Direction]:
    out = []
    for n in levels:
        out.append(toward.rotated(2.0 ** -n))
        if both_sides:
            out.append(toward.rotated(-(2.0 ** -n)))
    return out


def default_grid(n: int = 720, levels: Sequence[int] = range(3, 11)) -> list[Direction]:
    grid = uniform_grid(n)
    for m in range(12):
        grid.extend(dyadic_grid(Direction.special(m), levels))
    return sorted(grid, key=lambda d: d.theta % (2 * math.pi))


def _sweep_one(E: TruncatedE, omega: Direction) -> SweepRow:
    if omega.is_special:
        prof = region_profile(E.region, omega, "exact")
        m = pl_metrics(prof)
        if omega.is_edge_normal:
            r = rho(E, omega)
            lip, _ = window_lipschitz(prof, -r, r)
            return SweepRow(omega, float(lip), float(m.support_measure), float(m.sup),
                            float(m.integral), True, True)
        return SweepRow(omega, float(m.lipschitz), float(m.support_measure), float(m.sup),
                        float(m.integral), True, False)
    prof = region_profile(E.region, omega, "float")
    m = pl_metrics(prof)
    return SweepRow(omega, m.lipschitz, m.support_measure, m.sup, m.integral)


def _sweep_chunk(J: int, grid: Sequence[Direction]) -> list[SweepRow]:
    E = build(J)
    return [_sweep_one(E, w) for w in grid]


def lip_sweep(grid: Sequence[Direction], J: int, grid_name: str = "custom",
              workers: int = 1) -> SweepTable:
    if not grid:
        raise ValueError("empty direction grid")
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        size = -(-len(grid) // workers)
        chunks = [list(grid[i:i + size]) for i in range(0, len(grid), size)]
        with ProcessPoolExecutor(workers) as pool:
            rows = [r for part in pool.map(_sweep_chunk, [J] * len(chunks), chunks) for r in part]
    else:
        rows = _sweep_chunk(J, grid)
    rows.sort(key=lambda r: r.omega.theta % (2 * math.pi))
    area = area_of_E(J).to_float()
    generic = [r for r in rows if not r.exact]
    summary = {
        "J": J,
        "directions": len(rows),
        "max_lip_generic": max((r.lip for r in generic), default=0.0),
        "all_generic_finite": all(math.isfinite(r.lip) for r in generic),
        "M_hat": max(r.support for r in rows),
        "max_sup": max(r.sup for r in rows),
        "chord_bound": 2 * math.sqrt(3),
        "area": area,
        "max_integral_rel_err": max(abs(r.integral - area) / area for r in rows),
    }
    return SweepTable(J, rows, grid_name, "mixed", summary)


def refinement_evidence(J: int = 12, levels: Sequence[int] = (4, 6, 8),
                        toward: Direction | None = None) -> Report:
    """max Lip over dyadic grids approaching w_0^perp, per refinement level."""
    toward = toward or Direction.omega_perp(0)
    rep = Report("unboundedness")
    E = build(J)
    maxima = []
    running = []
    for n in levels:
        running.extend(dyadic_grid(toward, range(1, n + 1)))
        maxima.append(max(_sweep_one(E, w).lip for w in running))
    for a, b, n in zip(maxima, maxima[1:], levels[1:]):
        rep.check(b > a, level=n, previous=a, current=b)
    rep.details["levels"] = list(levels)
    rep.details["max_lip"] = maxima
    if len(maxima) > 1:
        rates = [math.log2(b / a) / (n1 - n0) for a, b, n0, n1 in zip(maxima, maxima[1:], levels, levels[1:])]
        rep.details["empirical_log2_rate_per_level"] = rates
    return rep


def claim_directions(N: int) -> list[Direction]:
    """Directions whose acute angle to w_1 lies in (2^-N, 2^-N+1]."""
    w1 = Direction.omega(1)
    lo, hi = 2.0 ** -N, 2.0 ** (-N + 1)
    out = []
    for a in (lo * (1 + 2.0 ** -20), 1.5 * lo, hi):
        for sgn in (1, -1):
            d = w1.rotated(sgn * a)
            ang = acute_angle(d.perp(), w1.perp())
            assert lo < ang <= hi * (1 + 1e-12), (N, a, ang)
            out.append(d)
    return out


def claim_suite(N_range: Iterable[int], J_rule: Callable[[int], int] = lambda N: N + 4,
                lines_per_N: int = 1000, seed: int = 0) -> Report:
    """Lines near the w_1^perp axis meet at most max(N, 6) triangles of family k=1."""
    rep = Report("claim")
    rng = np.random.default_rng(seed)
    per_N = {}
    for N in N_range:
        J = J_rule(N)
        E = build(J)
        bound = max(N, 6)
        dirs = claim_directions(N)
        worst = 0
        n_lines = 0
        per_dir = max(1, -(-lines_per_N // len(dirs)))
        for omega in dirs:
            exact_max, witness = max_intersection_count(omega, J, 1)
            rep.check(exact_max <= bound, N=N, J=J, theta=omega.theta, t=witness, count=exact_max, sweep=True)
            worst = max(worst, exact_max)
            ivs = projection_intervals(E, omega, 1)
            lo = min(float(a) for _, a, _ in ivs)
            hi = max(float(b) for _, _, b in ivs)
            centers = [0.5 * (float(a) + float(b)) for _, a, b in ivs]
            ts = list(rng.uniform(lo, hi, per_dir)) + centers + [witness]
            for t in ts:
                c = line_intersection_count(omega, float(t), J, 1)
                n_lines += 1
                rep.check(c <= bound, N=N, J=J, theta=omega.theta, t=float(t), count=c)
        per_N[N] = {"J": J, "bound": bound, "max_count": worst, "lines": n_lines}
    rep.details["per_N"] = per_N
    # control at the excluded direction w_1: the axis line meets every foot
    w1 = Direction.omega(1)
    ctrl = {J: line_intersection_count(w1, QS3(0), J, 1) for J in (2, 4, 6, 8, 10)}
    rep.check(all(ctrl[a] < ctrl[b] for a, b in zip(sorted(ctrl), sorted(ctrl)[1:])),
              clause="control counts grow at w_1", counts=ctrl)
    rep.details["control_counts_at_omega1"] = ctrl
    rep.details["seed"] = seed
    return rep


def total_count_report(N: int, J: int | None = None) -> dict:
    """Maximum count over all families combined, reported without a bound."""
    J = J or N + 4
    return {str(round(d.theta, 12)): max_intersection_count(d, J, "all")[0] for d in claim_directions(N)}


AREA_TAIL_CONSTANT = SQRT3 * Fraction(6, 7) / 4


def area_checks(J_max: int = 20) -> Report:
    """|E_J| < sqrt(3)/2, strictly increasing, and |E| - |E_J| <= C 4^-J (exact)."""
    from .construction import area_limit

    rep = Report("area")
    limit = area_limit()
    half_sqrt3 = SQRT3 / 2
    prev = None
    gaps = []
    for j in range(1, J_max + 1):
        a = area_of_E(j)
        rep.check(a < half_sqrt3, clause="area < sqrt(3)/2", J=j, area=a)
        if prev is not None:
            rep.check(a > prev, clause="area increasing", J=j)
        gap = limit - a
        rep.check(gap.sign() >= 0 and gap <= AREA_TAIL_CONSTANT * Fraction(1, 4**j), clause="area tail", J=j, gap=gap)
        gaps.append(gap.to_float() * 4**j)
        prev = a
    rep.details["area_limit"] = limit
    rep.details["scaled_gaps"] = gaps
    return rep


def bounds_suite(J: int = 10, grid_n: int = 720, area_J_max: int = 20) -> Report:
    """Area bound and monotonicity, spacing, and the 2*sqrt(3) chord bound."""
    from .construction import spacing_check

    rep = Report("bounds")
    rep.merge(area_checks(area_J_max))
    rep.merge(spacing_check(max(2, min(J, 12))))
    table = lip_sweep(uniform_grid(grid_n), J, f"uniform{grid_n}")
    for r in table.rows:
        rep.check(r.sup <= 2 * math.sqrt(3) + 1e-9, clause="chord bound", theta=r.omega.theta, sup=r.sup)
    rep.details["max_sup"] = table.summary["max_sup"]
    rep.details["M_hat"] = table.summary["M_hat"]
    return rep
