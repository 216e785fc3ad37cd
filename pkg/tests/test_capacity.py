import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logineq import (CompactSet, GridFunction, ParameterError, Params, RadialGrid,
                     Weight, ball_capacity, capacity_grid, mazya_constant,
                     mazya_norm_lower_bound, mazya_residual,
                     scale_invariant_power_weight, unit_ball_volume,
                     variational_capacity)
from logineq.capacity import default_ball_family, set_weight_mass


def test_ball_capacity_closed_forms():
    assert ball_capacity(3, 2.0, 1.0) == pytest.approx(4 * math.pi, rel=1e-14)
    assert ball_capacity(4, 2.0, 1.0) == pytest.approx(4 * math.pi**2, rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(R=st.floats(0.05, 40.0), p=st.floats(1.2, 2.8))
def test_ball_capacity_scaling_homogeneity(R, p):
    base = ball_capacity(3, p, 1.0)
    assert ball_capacity(3, p, R) == pytest.approx(R ** (3 - p) * base, rel=1e-12)


def test_ball_capacity_degenerate_exponents():
    for p in (1.0, 3.0, 0.5):
        with pytest.raises(ParameterError):
            ball_capacity(3, p, 1.0)


def test_mazya_constant_values():
    assert mazya_constant(2.0) == pytest.approx(4.0, rel=1e-15)
    assert mazya_constant(3.0) == pytest.approx(27.0 / 4.0, rel=1e-15)
    assert mazya_constant(1.5) == pytest.approx(2.598076211353316, rel=1e-12)
    with pytest.raises(ParameterError):
        mazya_constant(1.0)


# -- variational solver ------------------------------------------------------

def test_variational_ball_matches_closed_form():
    F = CompactSet.ball(np.zeros(3), 1.0)
    est = variational_capacity(F, capacity_grid(F, 3, n=2048), 2.0, refinements=1)
    cf = ball_capacity(3, 2.0, 1.0)
    assert est.value == pytest.approx(cf, rel=0.02)
    # upper bound within solver tolerance, non-increasing under refinement
    assert est.value >= cf * (1 - 1e-3)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(est.convergence,
                                                    est.convergence[1:]))
    assert est.status == "converged"
    # the admissible profile certifies feasibility
    prof = est.admissible_profile
    inside = prof.grid.nodes <= 1.0
    assert np.all(prof.values[inside] >= 1.0 - 1e-12)


def test_variational_annulus_fills_the_hole():
    F = CompactSet.annulus(0.5, 1.0)
    est = variational_capacity(F, capacity_grid(F, 3, n=2048), 2.0, refinements=1)
    assert est.value == pytest.approx(ball_capacity(3, 2.0, 1.0), rel=0.02)


def test_variational_cube_bracketed_by_balls():
    F = CompactSet.cube(np.zeros(3), 1.0)
    est = variational_capacity(F, capacity_grid(F, 3, n=2048), 2.0, refinements=1)
    lo = ball_capacity(3, 2.0, 1.0)
    hi = ball_capacity(3, 2.0, math.sqrt(3.0))
    assert lo <= est.value <= hi * 1.02


def test_variational_monotone_under_inclusion():
    small = CompactSet.ball(np.zeros(3), 0.8)
    big = CompactSet.ball(np.zeros(3), 1.0)
    grid = capacity_grid(big, 3, n=2048)
    vs = variational_capacity(small, grid, 2.0, refinements=0).value
    vb = variational_capacity(big, grid, 2.0, refinements=0).value
    assert vs <= vb * (1 + 1e-9)


def test_variational_requires_set_inside_domain():
    F = CompactSet.ball(np.zeros(3), 1.0)
    grid = RadialGrid.geometric(1e-3, 0.5, 64, N=3)
    with pytest.raises(ValueError):
        variational_capacity(F, grid, 2.0)


# -- capacitary weight norm --------------------------------------------------

def test_hardy_weight_ball_ratios_are_one():
    fam = [CompactSet.ball(np.zeros(3), R) for R in np.geomspace(0.05, 50, 12)]
    mn = mazya_norm_lower_bound(Weight.power(2.0), 2.0, 2.0, fam, 3)
    for (_, _, _, ratio) in mn.per_set_ratios:
        assert ratio == pytest.approx(1.0, rel=1e-10)


def test_scale_invariant_weight_ratio_radius_free():
    P = Params(3, 2.0, 4.0)
    g1 = scale_invariant_power_weight(P)
    fam = [CompactSet.ball(np.zeros(3), R) for R in np.geomspace(0.05, 50, 12)]
    mn = mazya_norm_lower_bound(g1, 2.0, 4.0, fam, 3)
    ratios = [row[3] for row in mn.per_set_ratios]
    assert max(ratios) / min(ratios) == pytest.approx(1.0, rel=1e-10)
    assert mn.lower_bound == pytest.approx(1.0 / (8 * math.pi), rel=1e-10)


def test_zero_weight_norm_is_zero():
    fam = [CompactSet.ball(np.zeros(3), 1.0)]
    mn = mazya_norm_lower_bound(Weight.power(0.0, scale=0.0), 2.0, 4.0, fam, 3)
    assert mn.lower_bound == 0.0


def test_divergent_weight_flags_infinity():
    # |x|^{-3} is not integrable near 0 in R^3: evidence of non-membership
    fam = [CompactSet.ball(np.zeros(3), 1.0)]
    mn = mazya_norm_lower_bound(Weight.power(3.0), 2.0, 4.0, fam, 3)
    assert mn.divergent and math.isinf(mn.lower_bound)


def test_norm_absolute_homogeneity_exact():
    P = Params(3, 2.0, 4.0)
    g1 = scale_invariant_power_weight(P)
    fam = default_ball_family(3, radii=np.geomspace(0.1, 10, 6),
                              offsets=(0.0, 1.0))
    base = mazya_norm_lower_bound(g1, 2.0, 4.0, fam, 3)
    scaled = mazya_norm_lower_bound(g1.scaled(2.5), 2.0, 4.0, fam, 3)
    assert scaled.lower_bound == pytest.approx(2.5 * base.lower_bound, rel=1e-12)


def test_norm_triangle_inequality_on_family():
    # per-set masses are additive, so the family sup is subadditive
    fam = [CompactSet.ball(np.zeros(3), R) for R in np.geomspace(0.1, 10, 8)]
    ga, gb = Weight.power(1.0), Weight.power(2.0)
    na = mazya_norm_lower_bound(ga, 2.0, 4.0, fam, 3)
    nb = mazya_norm_lower_bound(gb, 2.0, 4.0, fam, 3)
    combined = max(
        (set_weight_mass(ga, F, 3) + set_weight_mass(gb, F, 3))
        / cappow for F, cappow in
        ((F, row[2]) for F, row in zip(fam, na.per_set_ratios)))
    assert combined <= na.lower_bound + nb.lower_bound + 1e-12


def test_strong_norm_controls_capacitary_norm():
    # truncated integrable power: family bound <= K * Lebesgue norm, with the
    # isocapacitary constant K = (|B|/Cap^{N/(N-p)})^{r/p*}
    N, p, r = 3, 2.0, 4.0
    pstar = 6.0
    g = Weight.truncated_power(1.0, 1.0)
    fam = default_ball_family(N, radii=np.geomspace(0.05, 20, 10),
                              offsets=(0.0, 0.5, 2.0))
    mn = mazya_norm_lower_bound(g, p, r, fam, N)
    q = pstar / (pstar - r)
    grid = RadialGrid.geometric(1e-8, 2.0, 8192, N=N)
    gv = g.sample(grid)
    strong = float(np.sum(grid.measures * gv**q)) ** (1 / q)
    c_iso = unit_ball_volume(N) / ball_capacity(N, p, 1.0) ** (N / (N - p))
    K = c_iso ** (r / pstar)
    assert mn.lower_bound <= K * strong * (1 + 1e-6)


def test_mazya_residual_gaussian(gauss3):
    P = Params(3, 2.0, 4.0)
    g1 = scale_invariant_power_weight(P)
    rec = mazya_residual(g1, gauss3, 2.0, 4.0, 1.0 / (8 * math.pi))
    assert rec["residual"] >= -1e-10
    assert rec["inconclusive_if_negative"]


def test_mazya_residual_zero_function(grid3):
    P = Params(3, 2.0, 4.0)
    g1 = scale_invariant_power_weight(P)
    rec = mazya_residual(g1, GridFunction(grid3, np.zeros(grid3.size)), 2.0, 4.0,
                         1.0)
    assert rec["lhs"] == 0.0 and rec["rhs"] == 0.0 and rec["residual"] == 0.0


def test_cylindrical_weight_ball_mass_closed_form():
    # int_{B_R} |x'|^{-1} dz in R^3 = pi^2 R^2
    w = Weight.cylindrical_power(1.0, split=2)
    for R in (0.5, 1.0, 2.0):
        assert w.ball_mass(3, R) == pytest.approx(math.pi**2 * R**2, rel=1e-6)


def test_union_and_warning_flags():
    u = CompactSet.union([CompactSet.ball(np.zeros(3), 1.0),
                          CompactSet.annulus(0.5, 0.8)])
    assert u.disjoint_warning            # radial shadows overlap
    lo, hi = u.radial_shadow()
    assert (lo, hi) == (0.0, 1.0)


def test_per_set_table_csv(tmp_path):
    fam = [CompactSet.ball(np.zeros(3), R) for R in (0.5, 1.0)]
    mn = mazya_norm_lower_bound(Weight.power(2.0), 2.0, 2.0, fam, 3)
    path = tmp_path / "ratios.csv"
    mn.to_csv(path)
    assert path.read_text().splitlines()[0] == "set,weight_mass,cap_pow,ratio"
