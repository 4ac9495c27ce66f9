import math
from fractions import Fraction

import pytest

from lipradon.analysis import (
    C,
    area_checks,
    claim_directions,
    claim_suite,
    default_grid,
    dyadic_grid,
    fj_reference,
    fj_table,
    lip_sweep,
    refinement_evidence,
    rho,
    rho_sequence,
    special_direction_check,
    total_count_report,
    uniform_grid,
    verify_Fk,
    verify_fj,
    verify_partial_sums_vs_E,
)
from lipradon.construction import build
from lipradon.directions import Direction, acute_angle
from lipradon.field import QS3, SQRT3
from lipradon.geometry import Orientation


@pytest.mark.parametrize("j", [0, 1, 2])
def test_fj_matches_geometry(j):
    rep = verify_fj(j, sample_count=20)
    assert rep.passed, rep.failures[:2]


def test_fj_down_orientation_gives_same_table():
    assert verify_fj(1, sample_count=10, orientation=Orientation.DOWN).passed


def test_fj_other_first_foot_does_not_match():
    # the foot off the vertical axis gives a different profile at w_0
    assert not verify_fj(0, sample_count=10, foot_label=1).passed


def test_fj_table_endpoints():
    # f_0 is continuous: neighbouring pieces agree at interior endpoints
    for j in range(4):
        t = fj_table(j)
        for (a, b), (c, d) in zip(t.intervals, t.intervals[1:]):
            assert b == c
        assert fj_reference(j, Fraction(-1, 2)) == 0
    assert fj_reference(0, 0) == SQRT3 / 2
    with pytest.raises(ValueError):
        fj_reference(0, Fraction(1, 3))


def test_C_closed_form():
    assert C(0) == SQRT3 / 2
    assert C(1) == SQRT3 * Fraction(5, 8)


def test_Fk_small():
    rep = verify_Fk(5)
    assert rep.passed, rep.failures[:2]
    assert all(v == 3 * SQRT3 for v in rep.details["max_slope"].values())


def test_Fk_needs_k2():
    with pytest.raises(ValueError):
        verify_Fk(1)


def test_partial_sums_vs_E():
    assert verify_partial_sums_vs_E(2).passed


def test_special_directions_cancel():
    rep = special_direction_check(6)
    assert rep.passed, rep.failures[:2]
    d = rep.details["directions"]["omega0perp"]
    assert d["uncancelled_outside_window"] >= 1
    assert rep.details["control_jumps"]


def test_rho_grows():
    seq = rho_sequence(7)
    assert all(a < b for a, b in zip(seq, seq[1:]))
    assert seq[0].to_float() == pytest.approx(0.9485, abs=1e-4)


def test_rho_is_positive_for_all_edge_normals():
    E = build(5)
    for m in (1, 3, 5, 7, 9, 11):
        assert rho(E, Direction.special(m)).sign() > 0


def test_small_sweep():
    table = lip_sweep(uniform_grid(24), 5)
    s = table.summary
    assert s["all_generic_finite"]
    assert s["max_sup"] <= 2 * math.sqrt(3)
    assert s["max_integral_rel_err"] < 1e-12
    assert len(table.csv_rows()) == 24
    thetas = [r[0] for r in table.csv_rows()]
    assert thetas == sorted(thetas)


def test_sweep_workers_match_serial():
    grid = uniform_grid(36)
    a = lip_sweep(grid, 4).csv_rows()
    b = lip_sweep(grid, 4, workers=2).csv_rows()
    assert a == b


def test_default_grid_contents():
    g = default_grid(72, range(3, 6))
    assert len(g) == 72 + 12 * 3 * 2
    assert sum(w.is_special for w in g) == 12


def test_dyadic_grid_angles():
    g = dyadic_grid(Direction.omega_perp(0), [3, 4])
    assert [abs(w.theta - Direction.omega_perp(0).theta) for w in g] == pytest.approx(
        [2**-3, 2**-3, 2**-4, 2**-4])


def test_claim_directions_in_band():
    for N in (3, 7):
        for d in claim_directions(N):
            a = acute_angle(d.perp(), Direction.omega(1).perp())
            assert 2.0**-N < a <= 2.0 ** (-N + 1) * (1 + 1e-12)


def test_claim_small():
    rep = claim_suite(range(3, 6), lines_per_N=100)
    assert rep.passed, rep.failures[:2]
    counts = rep.details["control_counts_at_omega1"]
    assert counts[10] > counts[2]


def test_total_count_is_reported():
    out = total_count_report(4)
    assert len(out) == 6 and all(v >= 1 for v in out.values())


def test_refinement_small():
    rep = refinement_evidence(J=8, levels=(3, 5, 7))
    assert rep.passed
    m = rep.details["max_lip"]
    assert m[0] < m[1] < m[2]


def test_area_checks():
    rep = area_checks(10)
    assert rep.passed
    assert all(g > 0 for g in rep.details["scaled_gaps"])
