import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logineq import (GridFunction, ParameterError, Params, RadialGrid, dilate,
                     dirichlet_energy, hessian_energy, integrate,
                     integrate_with_budget, laplacian_energy, unit_ball_volume)

PI32 = math.pi ** 1.5


def test_measures_sum_to_ball_volume(grid3):
    assert grid3.measures.sum() == pytest.approx(unit_ball_volume(3) * 50.0**3,
                                                 rel=1e-14)


def test_integrate_indicator_ball(grid3):
    chi = GridFunction.from_profile(grid3, lambda s: (s <= 1.0).astype(float),
                                    support_radius=1.0)
    assert integrate(chi) == pytest.approx(4 * math.pi / 3, rel=5e-3)


def test_integrate_gaussian_closed_form(gauss3, grid3):
    f = GridFunction(grid3, gauss3.values**2)
    val, budget = integrate_with_budget(f)
    assert val == pytest.approx(PI32, rel=1e-4)
    assert abs(val - PI32) <= 3 * budget + 1e-12


def test_integrate_zero(grid3):
    assert integrate(GridFunction(grid3, np.zeros(grid3.size))) == 0.0


def test_nonfinite_samples_rejected(grid3):
    bad = np.ones(grid3.size)
    bad[7] = np.nan
    with pytest.raises(ValueError):
        GridFunction(grid3, bad)


def test_dirichlet_energy_gaussian(gauss3):
    assert dirichlet_energy(gauss3, 2.0) == pytest.approx(1.5 * PI32, rel=1e-4)


def test_dirichlet_energy_p_window(gauss3):
    with pytest.raises(ParameterError):
        dirichlet_energy(gauss3, 3.5)  # p >= N


def test_dirichlet_homogeneity_exact(gauss3):
    base = dirichlet_energy(gauss3, 2.0)
    assert dirichlet_energy(gauss3.scaled(3.0), 2.0) == pytest.approx(9.0 * base,
                                                                      rel=1e-14)


def test_constant_plateau_has_negligible_energy(grid3):
    # no decay: only the one-sided end stencils contribute
    u = GridFunction(grid3, np.ones(grid3.size))
    assert dirichlet_energy(u, 2.0) <= 1e-10
    assert u.truncation_flag


def test_capacity_extremal_profile_energy():
    # u = min(1, 1/|x|) in R^3, truncated far out; energy -> 4 pi
    grid = RadialGrid.geometric(1e-4, 1e3, 8192, N=3)
    u = GridFunction.from_profile(grid, lambda s: np.minimum(1.0, 1.0 / s))
    assert dirichlet_energy(u, 2.0) == pytest.approx(4 * math.pi, rel=0.02)


# -- second-order terms ------------------------------------------------------

def test_hessian_zero(grid3):
    assert hessian_energy(GridFunction(grid3, np.zeros(grid3.size)), 2.0) == 0.0


@pytest.mark.parametrize("N", [3, 5])
def test_hessian_matches_laplacian_for_gaussian(N):
    grid = RadialGrid.uniform(1e-4, 12.0, 16384, N=N)
    u = GridFunction.from_profile(grid, lambda s: np.exp(-s**2 / 2.0))
    h = hessian_energy(u, 2.0)
    l2 = laplacian_energy(u)
    assert h == pytest.approx(l2, rel=1e-6)


def test_hessian_polynomial_bump_oracle():
    # u = (1 - s^2)^2 on the unit ball of R^3:
    # int |D^2 u|^2 = 4*pi*int_0^1 (176 s^6 - 160 s^4 + 48 s^2) ds = 256 pi / 7
    grid = RadialGrid.uniform(1e-5, 1.0, 20000, N=3)
    u = GridFunction.from_profile(grid, lambda s: (1 - s**2) ** 2,
                                  support_radius=1.0)
    assert hessian_energy(u, 2.0) == pytest.approx(256 * math.pi / 7, rel=1e-4)


# -- dilation ----------------------------------------------------------------

def test_dilate_identity(gauss3):
    same = dilate(gauss3, 1.0, 0.7)
    assert np.allclose(same.values, gauss3.values, rtol=0, atol=0)


def test_dilate_requires_positive_lambda(gauss3):
    with pytest.raises(ValueError):
        dilate(gauss3, -1.0, 0.0)


def test_dilate_dirichlet_invariance(gauss3):
    base = dirichlet_energy(gauss3, 2.0)
    for lam in (0.5, 2.0):
        ul = dilate(gauss3, lam, (3 - 2) / 2)
        assert dirichlet_energy(ul, 2.0) == pytest.approx(base, rel=1e-6)


def test_dilate_l2_change_of_variables(gauss3, grid3):
    ul = dilate(gauss3, 2.0, 0.0)
    m0 = integrate(GridFunction(grid3, gauss3.values**2))
    ml = integrate(GridFunction(grid3, ul.values**2))
    assert ml == pytest.approx(2.0**-3 * m0, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(lam1=st.floats(0.3, 3.0), lam2=st.floats(0.3, 3.0),
       e=st.floats(-1.0, 1.0))
def test_dilate_semigroup_with_profile(lam1, lam2, e):
    grid = RadialGrid.geometric(1e-5, 30.0, 512, N=3)
    u = GridFunction.from_profile(grid, lambda s: np.exp(-s**2))
    once = dilate(dilate(u, lam1, e), lam2, e)
    joint = dilate(u, lam1 * lam2, e)
    assert np.allclose(once.values, joint.values, rtol=1e-12, atol=1e-12)


def test_dilate_semigroup_sampled_fallback(grid3, gauss3):
    u = gauss3.with_values(gauss3.values)   # drops the profile callable
    assert u.profile is None
    once = dilate(dilate(u, 2.0, 0.5), 2.0, 0.5)
    joint = dilate(u, 4.0, 0.5)
    scale = np.max(np.abs(joint.values))
    assert np.max(np.abs(once.values - joint.values)) <= 1e-5 * scale


def test_dilate_truncation_flag(grid3):
    wide = GridFunction.from_profile(grid3, lambda s: np.exp(-(s / 1e4) ** 2))
    assert wide.truncation_flag
    assert not dilate(wide, 1000.0, 0.0).truncation_flag


# -- parameter windows -------------------------------------------------------

def test_params_windows():
    Params(3, 2.0, 4.0).validate(need_r=True)
    with pytest.raises(ParameterError):
        Params(2, 1.5).validate()
    with pytest.raises(ParameterError):
        Params(3, 3.0).validate()
    with pytest.raises(ParameterError):
        Params(3, 2.0, 7.0).validate()          # r > p*
    with pytest.raises(ParameterError):
        Params(3, 2.0, 4.0, gamma=1.5).validate()  # gamma <= r/(r-p)
    assert Params(3, 2.0, 4.0).pstar == pytest.approx(6.0)
    assert Params(3, 2.0, 4.0).gamma_floor == pytest.approx(2.0)


def test_grid_csv_snapshot(tmp_path, grid3, gauss3):
    path = tmp_path / "snap.csv"
    grid3.to_csv(path, gauss3.values)
    rows = path.read_text().splitlines()
    assert rows[0] == "node,weight,value"
    assert len(rows) == grid3.size + 1
