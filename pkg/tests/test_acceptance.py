"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with  pytest tests/test_acceptance.py -v -s  to see the per-criterion
summary lines and timings.
"""

import math
import time

import numpy as np
import pytest

from logineq import (BumpProfile, ClosedSet, CompactSet, CylindricalGrid,
                     GridFunction, OptConfig, Params, RadialGrid, Weight,
                     admissible_exponent_range, assouad_dimension, ball_capacity,
                     brezis_lieb_defect, capacity_grid, cylindrical_critical_weight,
                     decreasing_rearrangement, dilate, dirichlet_energy,
                     entropy_interpolation_report, hessian_energy,
                     interpolation_gap, laplacian_energy, log_hardy_report,
                     lorentz_quasinorm, mazya_constant, mazya_norm_lower_bound,
                     minimize_quotient, multistart_minimize, porosity_constant,
                     scale_invariant_power_weight, variational_capacity)
from logineq.inequalities import distance_weight_masses


def _report(num, label, elapsed, detail=""):
    print(f"\nACCEPTANCE {num} PASS: {label} [{elapsed:.1f}s] {detail}")


def _bump_closure(rng):
    k = int(rng.integers(2, 5))
    centers = rng.uniform(-1.0, 1.2, k)
    widths = rng.uniform(0.3, 0.9, k)
    amps = rng.uniform(0.2, 2.0, k)

    def fn(s):
        ls = np.log(np.maximum(np.asarray(s, dtype=float), 1e-300))
        out = np.zeros_like(ls)
        for c, w, a in zip(centers, widths, amps):
            out = out + a * np.exp(-((ls - c) / w) ** 2)
        return out

    return fn


def _r_values(params: Params) -> list:
    return [0.5 * (params.p + params.pstar), params.pstar]


NP_COMBOS = [(N, p) for N in (3, 4) for p in (1.5, 2.0, 2.5)]


def test_acceptance_1_entropy_interpolation():
    """Entropy-interpolation residuals over randomized profiles and weights."""
    t0 = time.monotonic()
    rng = np.random.default_rng(2024)
    closures = [_bump_closure(rng) for _ in range(50)]
    rgrids = {N: RadialGrid.geometric(1e-6, 50.0, 4096, N=N) for N in (3, 4)}
    # exact weight cells carry the singular mass, so the cylindrical grid only
    # needs to resolve where the profiles vary
    cgrids = {N: CylindricalGrid.geometric(0.02, 20.0, 960, N=N) for N in (3, 4)}
    checked = 0
    worst_budget = 0.0
    worst_residual = math.inf
    for (N, p) in NP_COMBOS:
        P0 = Params(N, p)
        for r in _r_values(Params(N, p, None)):
            P = Params(N, p, r).validate(need_r=True)
            g1 = scale_invariant_power_weight(P)
            gt = Weight.truncated_power(min(g1.alpha, N - 0.5) if g1.alpha > 0
                                        else 1.0, 1.0)
            beta = N * (P.pstar - r) / P.pstar
            g2 = cylindrical_critical_weight(P) if beta < 1.55 else None
            for fn in closures:
                u = GridFunction.from_profile(rgrids[N], fn)
                cases = [(g1, u), (gt, u)]
                if g2 is not None:
                    uc = GridFunction.from_profile(
                        cgrids[N], lambda a, b, f=fn: f(np.hypot(a, b)),
                        kind="cylindrical")
                    cases.append((g2, uc))
                for g, prof in cases:
                    rep = entropy_interpolation_report(prof, g, p, r)
                    scale = max(1.0, abs(rep.lhs), abs(rep.rhs))
                    rel_budget = rep.error_budget / scale
                    assert rep.residual >= -rep.error_budget - 1e-12 * scale
                    assert rel_budget <= 1e-4
                    worst_budget = max(worst_budget, rel_budget)
                    worst_residual = min(worst_residual, rep.residual)
                    checked += 1
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    _report(1, "entropy-interpolation residuals nonnegative", elapsed,
            f"({checked} cases, min residual {worst_residual:.2e}, "
            f"max rel budget {worst_budget:.1e})")


def test_acceptance_2_interpolation_endpoint():
    """Chain gap: exact zero at q = p, nonnegative across the q-sweep."""
    t0 = time.monotonic()
    rng = np.random.default_rng(7)
    checked = 0
    for (N, p) in NP_COMBOS:
        grid = RadialGrid.geometric(1e-6, 50.0, 4096, N=N)
        P = Params(N, p, None)
        r = _r_values(P)[0]
        g1 = scale_invariant_power_weight(Params(N, p, r))
        for _ in range(8):
            u = GridFunction.from_profile(grid, _bump_closure(rng))
            assert abs(interpolation_gap(u, g1, p, r, p)) <= 1e-10
            for q in np.linspace(p, r - 1e-9, 20):
                assert interpolation_gap(u, g1, p, r, q) >= -1e-6
                checked += 1
    elapsed = time.monotonic() - t0
    _report(2, "interpolation chain endpoint and sweep", elapsed,
            f"({checked} gap evaluations)")


def test_acceptance_3_capacity_oracle():
    """Variational capacity within 2% of the closed form, monotone refinement."""
    t0 = time.monotonic()
    details = []
    for (N, p) in NP_COMBOS:
        t1 = time.monotonic()
        F = CompactSet.ball(np.zeros(N), 1.0)
        est = variational_capacity(F, capacity_grid(F, N, n=2048), p,
                                   refinements=2)
        cf = ball_capacity(N, p, 1.0)
        gap = est.value / cf - 1.0
        inst = time.monotonic() - t1
        assert abs(gap) <= 0.02, (N, p, gap)
        seq = est.convergence
        assert all(b <= a * (1 + 1e-12) for a, b in zip(seq, seq[1:])), (N, p)
        assert inst < 60.0
        details.append(f"({N},{p}):{gap:+.2%}")
    elapsed = time.monotonic() - t0
    _report(3, "capacity oracle 2% with monotone refinement", elapsed,
            " ".join(details))


def test_acceptance_4_mazya_scale_check():
    """Capacitary ratios: radius-free for the critical weight, 1 for |x|^-p."""
    t0 = time.monotonic()
    radii = np.geomspace(0.05, 50.0, 12)          # covers a 10^3 radius range
    fam = [CompactSet.ball(np.zeros(3), R) for R in radii]
    g1 = scale_invariant_power_weight(Params(3, 2.0, 4.0))
    mn = mazya_norm_lower_bound(g1, 2.0, 4.0, fam, 3)
    ratios = [row[3] for row in mn.per_set_ratios]
    assert max(ratios) <= min(ratios) * 1.01
    hardy = mazya_norm_lower_bound(Weight.power(2.0), 2.0, 2.0, fam, 3)
    for row in hardy.per_set_ratios:
        assert row[3] == pytest.approx(1.0, rel=0.01)
    elapsed = time.monotonic() - t0
    _report(4, "capacitary ratios scale-free / unit", elapsed,
            f"(critical ratio {mn.lower_bound:.6f} = 1/(8pi) "
            f"{1/(8*math.pi):.6f})")


def test_acceptance_5_assouad_estimates():
    """Dimension estimates for the catalog and porosity of the unit sphere."""
    t0 = time.monotonic()
    d_point = assouad_dimension(ClosedSet.origin(3)).dim
    assert d_point == 0.0
    d_plane = assouad_dimension(ClosedSet.hyperplane([0, 0, 1.0])).dim
    assert d_plane == pytest.approx(2.0, abs=0.10)
    d_sphere = assouad_dimension(ClosedSet.sphere(np.zeros(3), 1.0)).dim
    assert d_sphere == pytest.approx(2.0, abs=0.15)
    d_seg = assouad_dimension(ClosedSet.segment([-1, 0, 0], [1, 0, 0])).dim
    assert d_seg == pytest.approx(1.0, abs=0.10)
    alpha, witness = porosity_constant(ClosedSet.sphere(np.zeros(3), 1.0))
    assert alpha >= 0.25 and witness is None
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    _report(5, "covering dimensions and sphere porosity", elapsed,
            f"(point {d_point:.0f}, plane {d_plane:.3f}, sphere {d_sphere:.3f}, "
            f"segment {d_seg:.3f}, alpha {alpha:.2f})")


def test_acceptance_6_exponent_windows():
    """Admissible windows match the quadratic-case endpoint exactly."""
    t0 = time.monotonic()
    w = admissible_exponent_range(3, 2.0, 0.0, "first")
    assert (w.lo, w.hi) == (-1.5, 0.5)
    for N in (3, 4, 5):
        w = admissible_exponent_range(N, 2.0, 0.0, "first")
        assert w.hi == (N - 2) / 2
    elapsed = time.monotonic() - t0
    _report(6, "exponent windows and quadratic endpoint", elapsed)


def test_acceptance_7_dilation_invariance():
    """Distance-weighted functionals drift below 1e-5 along the scaling family."""
    t0 = time.monotonic()
    grid = RadialGrid.geometric(1e-6, 50.0, 4096, N=3)
    u = GridFunction.from_profile(grid, lambda s: np.exp(-s**2 / 2.0))
    E = ClosedSet.origin(3)
    worst = 0.0
    for (p, a) in [(2.0, 0.0), (2.0, 0.4), (1.5, -0.5)]:
        e = (3 - p - p * a) / p
        base = log_hardy_report(u, E, p, a, C=1.0, with_budget=False)
        D0 = base.constants["weighted_gradient"]
        for lam in (0.25, 0.5, 2.0, 4.0):
            rep = log_hardy_report(dilate(u, lam, e), E, p, a, C=1.0,
                                   with_budget=False)
            drift_l = abs(rep.lhs - base.lhs) / max(1.0, abs(base.lhs))
            drift_d = abs(rep.constants["weighted_gradient"] - D0) / D0
            worst = max(worst, drift_l, drift_d)
            assert drift_l <= 1e-5 and drift_d <= 1e-5, (p, a, lam)
    elapsed = time.monotonic() - t0
    _report(7, "scaling-family invariance of distance functionals", elapsed,
            f"(worst drift {worst:.1e})")


def test_acceptance_8_second_order_identity():
    """Hessian energy equals the Laplacian quadrature at p = 2."""
    t0 = time.monotonic()
    rng = np.random.default_rng(88)
    worst = 0.0
    for N in (3, 5):
        grid = RadialGrid.uniform(1e-4, 1.0, 16384, N=N)
        for _ in range(10):
            coeffs = rng.uniform(-1.0, 1.0, 3)

            def fn(s, c=coeffs):
                poly = 1.0 + c[0] * s**2 + c[1] * s**4 + c[2] * s**6
                return (1 - s**2) ** 4 * poly

            u = GridFunction.from_profile(grid, fn, support_radius=1.0)
            h = hessian_energy(u, 2.0)
            l2 = laplacian_energy(u)
            rel = abs(h - l2) / abs(l2)
            worst = max(worst, rel)
            assert rel <= 1e-6, (N, rel)
    elapsed = time.monotonic() - t0
    _report(8, "second-order identity at p = 2", elapsed,
            f"(worst rel diff {worst:.1e})")


def test_acceptance_9_best_constant_consistency():
    """Monotone descent, stability under family doubling, capacitary floor."""
    t0 = time.monotonic()
    P = Params(3, 2.0, 4.0, gamma=3.0).validate(need_r=True, need_gamma=True)
    g1 = scale_invariant_power_weight(P)
    grid = RadialGrid.geometric(1e-6, 50.0, 2048, N=3)
    cfg = OptConfig(max_iter=1500, restarts=2, seed=11)
    tr = multistart_minimize(g1, 2.0, 3.0, grid, cfg, gamma_floor=P.gamma_floor)
    qs = [it["Q"] for it in tr.iterates]
    assert all(b <= a + 1e-12 for a, b in zip(qs, qs[1:]))
    tr2 = minimize_quotient(tr.profile.refined(), g1, 2.0, 3.0, grid,
                            OptConfig(max_iter=1500))
    assert abs(tr2.best_Q - tr.best_Q) <= 0.02 * tr.best_Q
    norm = mazya_norm_lower_bound(
        g1, 2.0, 4.0,
        [CompactSet.ball(np.zeros(3), R) for R in np.geomspace(0.05, 50, 12)],
        3).lower_bound
    product = tr.best_Q * mazya_constant(2.0) * norm ** (2.0 / 4.0)
    assert product >= 1.0 - 1e-3
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0
    _report(9, "best-constant search consistency", elapsed,
            f"(Q*={tr.best_Q:.4f}, doubling shift "
            f"{abs(tr2.best_Q - tr.best_Q)/tr.best_Q:.2%}, "
            f"floor product {product:.3f})")


def test_acceptance_10_brezis_lieb_defect():
    """Almost-additivity defect decays along separating translates."""
    t0 = time.monotonic()
    grid = RadialGrid.uniform(1e-4, 3.0, 800, N=3)
    bump = GridFunction.from_profile(
        grid,
        lambda s: np.where(s < 0.75,
                           np.exp(1 - 1 / np.maximum(1 - (s / 0.75) ** 2, 1e-300)),
                           0.0),
        support_radius=0.75)
    finals = []
    for p in (1.5, 2.0, 3.0):
        d = brezis_lieb_defect(bump, [1, 2, 4, 8], p)
        assert all(b <= a + 1e-12 for a, b in zip(d, d[1:])), p
        assert d[-1] < 1e-3
        finals.append(d[-1])
    elapsed = time.monotonic() - t0
    _report(10, "almost-additivity defect decay", elapsed,
            f"(final defects {['%.1e' % f for f in finals]})")


def test_acceptance_11_rearrangement_suite():
    """Equimeasurability, the indicator Lorentz norm, and ratio invariance."""
    t0 = time.monotonic()
    N, p = 3, 2.0
    pstar = 6.0
    grid = RadialGrid.geometric(1e-6, 50.0, 4096, N=N)
    rng = np.random.default_rng(4)
    for _ in range(10):
        u = GridFunction.from_profile(grid, _bump_closure(rng))
        star = decreasing_rearrangement(u)
        for q in (p, pstar):
            direct = float(np.sum(grid.measures * np.abs(u.values) ** q))
            assert abs(star.moment(q) - direct) <= 1e-4 * (1.0 + direct)
    fine = RadialGrid.uniform(2.5e-5, 2.0, 40001, N=3)
    chi = GridFunction.from_profile(fine, lambda s: (s <= 1.0).astype(float))
    val = lorentz_quasinorm(chi, 6.0, 2.0)
    assert val == pytest.approx(2.1989, abs=1e-3)
    gauss = GridFunction.from_profile(grid, lambda s: np.exp(-s**2 / 2.0))
    base = lorentz_quasinorm(gauss, pstar, p) ** p / dirichlet_energy(gauss, p)
    worst = 0.0
    for lam in (0.25, 0.5, 2.0, 4.0):
        ul = dilate(gauss, lam, (N - p) / p)
        ratio = lorentz_quasinorm(ul, pstar, p) ** p / dirichlet_energy(ul, p)
        worst = max(worst, abs(ratio - base) / base)
        assert abs(ratio - base) <= 1e-5 * base
    elapsed = time.monotonic() - t0
    _report(11, "rearrangement and Lorentz-Sobolev suite", elapsed,
            f"(indicator norm {val:.5f}, worst ratio drift {worst:.1e})")
