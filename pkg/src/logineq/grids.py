"""Quadrature grids, sampled test functions, and integral/derivative primitives.

Radially symmetric functions on R^N are represented by samples on a 1-d grid of
radii; integrals use the shell formula

    int_{R^N} f dx  =  N omega_N int_0^inf f(s) s^(N-1) ds,

discretized by assigning each node the exact shell volume of its surrounding
cell (cell boundaries at arithmetic midpoints, extended to 0 on the left and to
r_max on the right).  Summing the cell measures therefore reproduces
omega_N * r_max^N exactly.  Cylindrically symmetric functions u(|x'|, |y|) on
R^k x R^(N-k) use the tensor product of two such shell measures.

Derivatives are second-order centered finite differences (one-sided at the
ends), valid on non-uniform grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Params",
    "ParameterError",
    "unit_ball_volume",
    "RadialGrid",
    "CylindricalGrid",
    "GridFunction",
    "integrate",
    "integrate_with_budget",
    "dirichlet_energy",
    "hessian_energy",
    "laplacian_energy",
    "dilate",
]


class ParameterError(ValueError):
    """Exponent tuple violates a validity window."""


def unit_ball_volume(N: int) -> float:
    """Volume omega_N of the unit ball in R^N."""
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


@dataclass(frozen=True)
class Params:
    """Exponent tuple (N, p, r, a, gamma) with the validity windows attached.

    ``pstar`` is the critical exponent N*p/(N-p).  ``validate`` raises
    :class:`ParameterError` naming the violated window:

    * 3 <= N and 1 < p < N always;
    * p < r <= pstar when r is set;
    * gamma > r/(r-p) when gamma is set for best-constant runs.
    """

    N: int
    p: float
    r: Optional[float] = None
    a: Optional[float] = None
    gamma: Optional[float] = None

    @property
    def pstar(self) -> float:
        return self.N * self.p / (self.N - self.p)

    @property
    def gamma_floor(self) -> float:
        """Smallest admissible log-Sobolev level, r/(r-p)."""
        if self.r is None:
            raise ParameterError("gamma_floor requires r")
        return self.r / (self.r - self.p)

    def validate(self, need_r: bool = False, need_gamma: bool = False) -> "Params":
        if self.N < 3:
            raise ParameterError(f"N={self.N} violates N >= 3")
        if not (1.0 < self.p < self.N):
            raise ParameterError(f"p={self.p} violates 1 < p < N={self.N}")
        if need_r and self.r is None:
            raise ParameterError("r is required")
        if self.r is not None and not (self.p < self.r <= self.pstar + 1e-12):
            raise ParameterError(
                f"r={self.r} violates p < r <= p* (p={self.p}, p*={self.pstar:.6g})"
            )
        if need_gamma and self.gamma is None:
            raise ParameterError("gamma is required")
        if self.gamma is not None and self.r is not None:
            if self.gamma <= self.gamma_floor:
                raise ParameterError(
                    f"gamma={self.gamma} violates gamma > r/(r-p) = {self.gamma_floor:.6g}"
                )
        return self


def _cell_bounds(nodes: np.ndarray, r_max: float) -> np.ndarray:
    """Cell boundaries: 0, midpoints, r_max."""
    b = np.empty(nodes.size + 1)
    b[0] = 0.0
    b[1:-1] = 0.5 * (nodes[:-1] + nodes[1:])
    b[-1] = r_max
    return b


@dataclass(frozen=True)
class RadialGrid:
    """Radii in (0, r_max] with per-node shell measures for the dx integral.

    ``measures[i]`` is omega_N * (b_{i+1}^N - b_i^N) for the node's cell, so
    ``measures.sum() == omega_N * r_max^N`` holds exactly.
    """

    nodes: np.ndarray
    N: int
    measures: np.ndarray = field(repr=False, default=None)
    bounds: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 4:
            raise ValueError("need a 1-d grid with at least 4 nodes")
        if not (np.all(np.diff(nodes) > 0) and nodes[0] > 0):
            raise ValueError("nodes must be strictly increasing and positive")
        if self.N < 1:
            raise ValueError("ambient dimension must be >= 1")
        nodes = nodes.copy()
        nodes.setflags(write=False)
        b = _cell_bounds(nodes, nodes[-1])
        w = unit_ball_volume(self.N) * np.diff(b**self.N)
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "measures", w)
        object.__setattr__(self, "bounds", b)

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def size(self) -> int:
        return self.nodes.size

    @classmethod
    def geometric(cls, r_min: float = 1e-6, r_max: float = 50.0,
                  n: int = 4096, N: int = 3) -> "RadialGrid":
        """Geometrically spaced nodes; clusters near 0 for singular weights."""
        return cls(np.geomspace(r_min, r_max, n), N)

    @classmethod
    def uniform(cls, r_min: float, r_max: float, n: int, N: int = 3) -> "RadialGrid":
        return cls(np.linspace(r_min, r_max, n), N)

    def coarsened(self) -> "RadialGrid":
        """Every other node (last node kept); used for Richardson error budgets."""
        idx = np.unique(np.r_[np.arange(0, self.size, 2), self.size - 1])
        return RadialGrid(self.nodes[idx], self.N)

    def to_csv(self, path, values: Optional[np.ndarray] = None) -> None:
        """Snapshot columns: node, weight, value."""
        vals = np.zeros(self.size) if values is None else np.asarray(values)
        arr = np.column_stack([self.nodes, self.measures, vals])
        np.savetxt(path, arr, delimiter=",", header="node,weight,value", comments="")


@dataclass(frozen=True)
class CylindricalGrid:
    """Tensor product grid for z = (x', y) in R^k x R^(N-k), sampled in (|x'|, |y|).

    ``axis_half=True`` restricts the second factor to a half-line when N-k == 1
    (for one-sided profiles such as half-space bumps).
    """

    rho: RadialGrid
    sigma: RadialGrid
    N: int
    split: int = 2
    axis_half: bool = False

    def __post_init__(self):
        if self.rho.N != self.split or self.sigma.N != self.N - self.split:
            raise ValueError("factor grids must carry dimensions split and N-split")
        if self.axis_half and self.N - self.split != 1:
            raise ValueError("axis_half only applies to a 1-d second factor")

    @property
    def shape(self) -> tuple:
        return (self.rho.size, self.sigma.size)

    @property
    def measures(self) -> np.ndarray:
        m = np.outer(self.rho.measures, self.sigma.measures)
        return 0.5 * m if self.axis_half else m

    @classmethod
    def geometric(cls, r_min: float = 1e-6, r_max: float = 50.0, n: int = 256,
                  N: int = 3, split: int = 2, axis_half: bool = False) -> "CylindricalGrid":
        return cls(RadialGrid.geometric(r_min, r_max, n, N=split),
                   RadialGrid.geometric(r_min, r_max, n, N=N - split),
                   N=N, split=split, axis_half=axis_half)


def _fd_first(nodes: np.ndarray, v: np.ndarray, axis: int = 0) -> np.ndarray:
    """Second-order first derivative on a non-uniform grid, one-sided ends."""
    v = np.moveaxis(v, axis, 0)
    s = nodes
    out = np.empty_like(v, dtype=float)
    hm = (s[1:-1] - s[:-2])[(...,) + (None,) * (v.ndim - 1)]
    hp = (s[2:] - s[1:-1])[(...,) + (None,) * (v.ndim - 1)]
    out[1:-1] = (hm**2 * v[2:] - hp**2 * v[:-2] + (hp**2 - hm**2) * v[1:-1]) / (
        hm * hp * (hm + hp)
    )
    # one-sided second-order stencils at the ends
    h0 = s[1] - s[0]
    h1 = s[2] - s[1]
    out[0] = (-(2 * h0 + h1) * v[0] + (h0 + h1) ** 2 / h1 * v[1]
              - h0**2 / h1 * v[2]) / (h0 * (h0 + h1))
    g0 = s[-1] - s[-2]
    g1 = s[-2] - s[-3]
    out[-1] = ((2 * g0 + g1) * v[-1] - (g0 + g1) ** 2 / g1 * v[-2]
               + g0**2 / g1 * v[-3]) / (g0 * (g0 + g1))
    return np.moveaxis(out, 0, axis)


def _fd_second(nodes: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Three-point second derivative; first/last nodes copy their neighbor."""
    s = nodes
    out = np.empty_like(v, dtype=float)
    hm = s[1:-1] - s[:-2]
    hp = s[2:] - s[1:-1]
    out[1:-1] = 2.0 * (hm * v[2:] - (hm + hp) * v[1:-1] + hp * v[:-2]) / (
        hm * hp * (hm + hp)
    )
    out[0] = out[1]
    out[-1] = out[-2]
    return out


@dataclass(frozen=True)
class GridFunction:
    """Sampled test function on a radial or cylindrical grid.

    ``profile`` optionally records the generating callable (of the radius for
    radial functions, of (rho, sigma) for cylindrical ones); resampling
    operations use it when present instead of interpolating samples.
    ``support_radius`` marks compactly supported functions.
    """

    grid: object
    values: np.ndarray
    profile_kind: str = "radial"
    profile: Optional[Callable] = None
    support_radius: Optional[float] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        if self.profile_kind == "radial":
            if v.shape != (self.grid.size,):
                raise ValueError("radial values must match grid size")
        elif self.profile_kind == "cylindrical":
            if v.shape != self.grid.shape:
                raise ValueError("cylindrical values must match grid shape")
        else:
            raise ValueError(f"unknown profile_kind {self.profile_kind!r}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_profile(cls, grid, fn: Callable, support_radius: Optional[float] = None,
                     kind: str = "radial") -> "GridFunction":
        if kind == "radial":
            vals = np.asarray(fn(grid.nodes), dtype=float)
        else:
            vals = np.asarray(fn(grid.rho.nodes[:, None], grid.sigma.nodes[None, :]),
                              dtype=float)
        return cls(grid, vals, profile_kind=kind, profile=fn,
                   support_radius=support_radius)

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return replace(self, values=values, profile=None)

    def scaled(self, c: float) -> "GridFunction":
        fn = None
        if self.profile is not None:
            base = self.profile
            fn = (lambda *args, _b=base, _c=c: _c * np.asarray(_b(*args)))
        return replace(self, values=c * self.values, profile=fn)

    # -- derivatives -------------------------------------------------------

    def derivative(self) -> np.ndarray:
        """du/ds for radial functions; centered differences."""
        if self.profile_kind != "radial":
            raise ValueError("derivative() is for radial functions; use gradient_sq()")
        return _fd_first(self.grid.nodes, self.values)

    def second_derivative(self) -> np.ndarray:
        if self.profile_kind != "radial":
            raise ValueError("second_derivative() is for radial functions")
        return _fd_second(self.grid.nodes, self.values)

    def gradient_sq(self) -> np.ndarray:
        """|grad u|^2 samples (works for both geometries)."""
        if self.profile_kind == "radial":
            return self.derivative() ** 2
        g = self.grid
        ur = _fd_first(g.rho.nodes, self.values, axis=0)
        us = _fd_first(g.sigma.nodes, self.values, axis=1)
        return ur**2 + us**2

    @property
    def truncation_flag(self) -> bool:
        """True when the profile has not decayed at the grid edge."""
        vmax = float(np.max(np.abs(self.values))) or 1.0
        if self.profile_kind == "radial":
            edge = abs(float(self.values[-1]))
        else:
            edge = max(float(np.max(np.abs(self.values[-1, :]))),
                       float(np.max(np.abs(self.values[:, -1]))))
        return edge > 1e-10 * vmax


# ---------------------------------------------------------------------------
# integral primitives
# ---------------------------------------------------------------------------

def integrate(f: GridFunction) -> float:
    """Quadrature value of int f dx over R^N (truncated at the grid edge)."""
    return float(np.sum(f.grid.measures * f.values))


def _coarse_value(f: GridFunction) -> float:
    if f.profile_kind == "radial":
        idx = np.unique(np.r_[np.arange(0, f.grid.size, 2), f.grid.size - 1])
        sub = RadialGrid(f.grid.nodes[idx], f.grid.N)
        return float(np.sum(sub.measures * f.values[idx]))
    g = f.grid
    ir = np.unique(np.r_[np.arange(0, g.rho.size, 2), g.rho.size - 1])
    isg = np.unique(np.r_[np.arange(0, g.sigma.size, 2), g.sigma.size - 1])
    sub_r = RadialGrid(g.rho.nodes[ir], g.rho.N)
    sub_s = RadialGrid(g.sigma.nodes[isg], g.sigma.N)
    m = np.outer(sub_r.measures, sub_s.measures)
    if g.axis_half:
        m = 0.5 * m
    return float(np.sum(m * f.values[np.ix_(ir, isg)]))


def integrate_with_budget(f: GridFunction) -> tuple:
    """(value, error budget) — budget from the node-halving Richardson difference."""
    v = integrate(f)
    return v, abs(v - _coarse_value(f)) / 3.0


def dirichlet_energy(u: GridFunction, p: float) -> float:
    """int |grad u|^p dx; for radial u this is the shell integral of |u'(s)|^p."""
    if not (1.0 < p < u.grid.N):
        raise ParameterError(f"p={p} outside (1, N)")
    gsq = u.gradient_sq()
    return float(np.sum(u.grid.measures * gsq ** (p / 2.0)))


def hessian_energy(u: GridFunction, p: float) -> float:
    """int |D^2 u|^p dx for radial u, |D^2 u|^2 = u''(s)^2 + (N-1)(u'(s)/s)^2.

    The first node uses a copied one-sided second difference; its cell's
    contribution is part of the reported error budget downstream.
    """
    if u.profile_kind != "radial":
        raise ValueError("hessian_energy requires a radial function")
    s = u.grid.nodes
    h2 = u.second_derivative() ** 2 + (u.grid.N - 1) * (u.derivative() / s) ** 2
    return float(np.sum(u.grid.measures * h2 ** (p / 2.0)))


def laplacian_energy(u: GridFunction) -> float:
    """int (Lap u)^2 dx for radial u, Lap u = u'' + (N-1) u'/s."""
    if u.profile_kind != "radial":
        raise ValueError("laplacian_energy requires a radial function")
    s = u.grid.nodes
    lap = u.second_derivative() + (u.grid.N - 1) * u.derivative() / s
    return float(np.sum(u.grid.measures * lap**2))


def dilate(u: GridFunction, lam: float, exponent: float) -> GridFunction:
    """u_lam(x) = lam^exponent * u(lam * x), resampled on the same grid.

    Exponent (N-p-p*a)/p gives the invariance family of the distance-weighted
    logarithmic functionals.  Raises on lam <= 0; resampling uses the analytic
    profile when available and linear interpolation otherwise (zero beyond the
    recorded data).
    """
    if lam <= 0:
        raise ValueError("dilation factor must be positive")
    c = lam**exponent
    if u.profile is not None:
        base = u.profile
        if u.profile_kind == "radial":
            fn = lambda s, _b=base, _l=lam, _c=c: _c * np.asarray(_b(_l * s))
        else:
            fn = lambda r, t, _b=base, _l=lam, _c=c: _c * np.asarray(_b(_l * r, _l * t))
        sup = None if u.support_radius is None else u.support_radius / lam
        return GridFunction.from_profile(u.grid, fn, support_radius=sup,
                                         kind=u.profile_kind)
    if u.profile_kind == "radial":
        s = u.grid.nodes
        vals = c * np.interp(lam * s, s, u.values, left=u.values[0], right=0.0)
        sup = None if u.support_radius is None else u.support_radius / lam
        return GridFunction(u.grid, vals, support_radius=sup)
    # bilinear resampling on the product grid
    g = u.grid
    r, t = g.rho.nodes, g.sigma.nodes
    vr = np.clip(np.searchsorted(r, lam * r) - 1, 0, r.size - 2)
    vt = np.clip(np.searchsorted(t, lam * t) - 1, 0, t.size - 2)
    fr = np.clip((lam * r - r[vr]) / (r[vr + 1] - r[vr]), 0.0, 1.0)
    ft = np.clip((lam * t - t[vt]) / (t[vt + 1] - t[vt]), 0.0, 1.0)
    V = u.values
    out = ((1 - fr)[:, None] * (1 - ft)[None, :] * V[np.ix_(vr, vt)]
           + fr[:, None] * (1 - ft)[None, :] * V[np.ix_(vr + 1, vt)]
           + (1 - fr)[:, None] * ft[None, :] * V[np.ix_(vr, vt + 1)]
           + fr[:, None] * ft[None, :] * V[np.ix_(vr + 1, vt + 1)])
    out[lam * r > r[-1], :] = 0.0
    out[:, lam * t > t[-1]] = 0.0
    return GridFunction(g, c * out, profile_kind="cylindrical")
