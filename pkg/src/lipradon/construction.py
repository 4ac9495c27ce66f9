"""The recursive family of triangles and the truncated set E_J.

T_1 is the Up standard triangle of side 1 centred at the origin.  Generation
j carries three feet of T_j, of side (6/7) 2^-j for odd j and 2^-j for even
j, and T_{j+1} circumscribes their outer edges.  E_J keeps Cell(T_1), the
odd-generation feet whole, and the cells of the even-generation feet.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .directions import Direction
from .field import QS3, SQRT3
from .geometry import (
    ORIGIN,
    Orientation,
    SignedRegion,
    StandardTriangle,
    cell,
    circumscribe,
    feet,
    interiors_disjoint,
    min_sq_dist,
    outer_edge,
    region_area,
)
from .report import Report

FLOAT_COUNT_TOL = 1e-9


def foot_side(j: int) -> Fraction:
    if j < 1:
        raise ValueError("generation index starts at 1")
    if j % 2:
        return Fraction(6, 7) / 2**j
    return Fraction(1, 2**j)


@dataclass(frozen=True)
class Generation:
    j: int
    T: StandardTriangle
    feet: tuple[StandardTriangle, StandardTriangle, StandardTriangle]
    foot_side: QS3

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "T": self.T.to_json(),
            "foot_side": self.foot_side.to_json(),
            "feet": [f.to_json() for f in self.feet],
        }


@dataclass(frozen=True)
class CatalogueEntry:
    """A triangle of the catalogue; T_1 has j = 0 and k = None."""

    j: int
    k: int | None
    triangle: StandardTriangle


@dataclass(frozen=True)
class TruncatedE:
    J: int
    generations: tuple[Generation, ...]
    region: SignedRegion
    entries: tuple[CatalogueEntry, ...]

    @property
    def T1(self) -> StandardTriangle:
        return self.entries[0].triangle

    @property
    def catalogue(self) -> list[StandardTriangle]:
        return [e.triangle for e in self.entries]

    def tau(self, j: int, k: int) -> StandardTriangle:
        """tau_{j,k}, with tau_{0,k} := T_1."""
        if j == 0:
            return self.T1
        return self.generations[j - 1].feet[k]

    def family(self, which: str | int) -> list[CatalogueEntry]:
        if which == "all":
            return list(self.entries)
        k = int(which)
        return [e for e in self.entries if e.k is None or e.k == k]

    def to_json(self) -> dict:
        def shadow(T: StandardTriangle) -> list:
            return [list(v) for v in T.float_vertices]

        return {
            "J": self.J,
            "generations": [g.to_json() for g in self.generations],
            "catalogue": [
                {"j": e.j, "k": e.k, "triangle": e.triangle.to_json(),
                 "vertices_float": shadow(e.triangle)}
                for e in self.entries
            ],
            "region": self.region.to_json(),
            "area": region_area(self.region).to_json(),
            "area_float": region_area(self.region).to_float(),
        }


def generations(J: int, orientation: Orientation = Orientation.UP) -> list[Generation]:
    T = StandardTriangle(ORIGIN, QS3(1), orientation)
    out = []
    for j in range(1, J + 1):
        r = QS3(foot_side(j))
        fs = feet(T, r)
        out.append(Generation(j, T, fs, r))
        T = circumscribe(T, r)
    return out


@lru_cache(maxsize=64)
def build(J: int, orientation: Orientation = Orientation.UP) -> TruncatedE:
    if J < 1:
        raise ValueError("J must be >= 1")
    gens = generations(J, orientation)
    T1 = gens[0].T
    region = cell(T1)
    entries = [CatalogueEntry(0, None, T1)]
    for g in gens:
        for k, tau in enumerate(g.feet):
            entries.append(CatalogueEntry(g.j, k, tau))
            if g.j % 2:
                region = region + SignedRegion.of([tau])
            else:
                region = region + cell(tau)
    return TruncatedE(J, tuple(gens), region, tuple(entries))


def build_E1(orientation: Orientation = Orientation.UP, foot_label: int = 0) -> SignedRegion:
    """Cell(T_1) together with one first-generation foot.

    ``foot_label=0`` picks the foot on the vertical axis, which is the one that
    reproduces the closed-form profile table at direction w_0.
    """
    g = generations(1, orientation)[0]
    return cell(g.T) + SignedRegion.of([g.feet[foot_label]])


def area_of_E(J: int) -> QS3:
    return region_area(build(J).region)


def area_limit() -> QS3:
    """Closed form of |E| from the geometric series over generations."""
    s_odd = Fraction(1, 4) / (1 - Fraction(1, 16))
    s_even = Fraction(1, 16) / (1 - Fraction(1, 16))
    inner = Fraction(6, 7) + 3 * Fraction(36, 49) * s_odd + 3 * Fraction(6, 7) * s_even
    return SQRT3 * inner / 4


def catalogue_disjoint(E: TruncatedE) -> Report:
    rep = Report("catalogue_disjoint")
    cat = E.entries
    for a in range(len(cat)):
        for b in range(a + 1, len(cat)):
            rep.check(interiors_disjoint(cat[a].triangle, cat[b].triangle),
                      first=(cat[a].j, cat[a].k), second=(cat[b].j, cat[b].k))
    return rep


def spacing_check(J: int) -> Report:
    """Exact check of dist(tau_{j,k}, tau_{i,k}) >= 2^(j-2) for i < j (0 for j = 1)."""
    if J < 2:
        raise ValueError("spacing check needs J >= 2")
    E = build(J)
    rep = Report("spacing")
    minima = {}
    for k in range(3):
        for j in range(1, J + 1):
            bound_sq = Fraction(0) if j == 1 else Fraction(4) ** (j - 2)
            best = None
            for i in range(j):
                d2 = min_sq_dist(E.tau(j, k), E.tau(i, k))
                rep.check(d2 >= bound_sq, j=j, i=i, k=k, sq_dist=d2, bound_sq=bound_sq)
                if best is None or d2 < best:
                    best = d2
            minima[(j, k)] = best
    rep.details["min_sq_dist"] = {f"j={j},k={k}": v for (j, k), v in sorted(minima.items())}
    # exact min squared distance is the same for every k (rotational symmetry)
    seq = [minima[(j, 0)] for j in range(2, J + 1)]
    rep.details["min_sq_dist_increasing"] = all(a < b for a, b in zip(seq, seq[1:]))
    return rep


def _projection_interval(T: StandardTriangle, omega: Direction):
    if omega.is_special:
        ps = [omega.project(v) for v in T.vertices]
    else:
        ps = [omega.project_float(v) for v in T.float_vertices]
    return min(ps), max(ps)


def projection_intervals(E: TruncatedE, omega: Direction, family: str | int = "all"):
    return [(e, *_projection_interval(e.triangle, omega)) for e in E.family(family)]


def line_intersection_count(omega: Direction, t, J: int, family: str | int = "all") -> int:
    """Number of catalogue triangles met by the line {<x, omega> = t}.

    Exact at special directions (``t`` may be a QS3); otherwise intervals are
    widened by ``FLOAT_COUNT_TOL``, which can only over-count.
    """
    E = build(J)
    count = 0
    for _, lo, hi in projection_intervals(E, omega, family):
        if omega.is_special and not isinstance(t, float):
            t_ = QS3.coerce(t)
            count += lo <= t_ <= hi
        else:
            lo_f, hi_f = float(lo), float(hi)
            count += lo_f - FLOAT_COUNT_TOL <= float(t) <= hi_f + FLOAT_COUNT_TOL
    return count


def max_intersection_count(omega: Direction, J: int, family: str | int = "all") -> tuple[int, float]:
    """Supremum over all t of the intersection count, by an endpoint sweep.

    Closed intervals: at equal coordinates openings are processed before
    closings.  Returns (count, a witness t).
    """
    E = build(J)
    events = []
    for _, lo, hi in projection_intervals(E, omega, family):
        lo_f, hi_f = float(lo), float(hi)
        if not omega.is_special:
            lo_f -= FLOAT_COUNT_TOL
            hi_f += FLOAT_COUNT_TOL
        events.append((lo_f, 0))
        events.append((hi_f, 1))
    events.sort()
    depth = best = 0
    witness = 0.0
    for t, kind in events:
        if kind == 0:
            depth += 1
            if depth > best:
                best, witness = depth, t
        else:
            depth -= 1
    return best, witness


def feet_outer_edges(E: TruncatedE, j: int) -> list:
    g = E.generations[j - 1]
    return [outer_edge(f, k) for k, f in enumerate(g.feet)]


def all_generation_sides(J: int) -> Sequence[QS3]:
    return [g.T.side for g in build(J).generations]
