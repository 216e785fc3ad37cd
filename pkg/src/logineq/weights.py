"""Weight families g in L^1_loc and their exact cell masses on quadrature grids.

Supported kinds:

* ``power(alpha)``            g(x) = |x|^(-alpha)
* ``cylindrical_power(beta)`` g(x', y) = |x'|^(-beta) on R^k x R^(N-k)
* ``truncated(inner, cut)``   inner weight restricted to {|x| <= cut} (radial
                              inner) or to the cylinder {|x'| <= cut, |y| <= cut}
* ``tabulated(values)``       samples aligned with a grid

Integrals of g against grid samples use *exact* per-cell masses

    M_i = int_{cell_i} g(s) N omega_N s^(N-1) ds,

computed in closed form for the analytic kinds (first cell extended down to
s = 0).  Power weights put a slowly decaying fraction of their mass below any
practical r_min, so sampled-product quadrature of g * u misses several percent
of singular masses; the closed-form cells capture it exactly and keep errors
second order in the cell ratio of the smooth factor alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grids import CylindricalGrid, GridFunction, Params, RadialGrid

__all__ = ["Weight", "scale_invariant_power_weight", "cylindrical_critical_weight",
           "power_shell_mass", "power_shell_log_mass"]


def power_shell_mass(n_dim: int, alpha: float, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Exact n_dim * omega_n int_lo^hi s^(n_dim - 1 - alpha) ds, elementwise.

    ``lo`` may contain 0; the result is +inf there unless alpha < n_dim.
    """
    from .grids import unit_ball_volume

    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    k = n_dim - alpha
    c = n_dim * unit_ball_volume(n_dim)
    if abs(k) < 1e-14:
        out = np.where(lo > 0, c * np.log(np.maximum(hi, 1e-300) / np.maximum(lo, 1e-300)),
                       np.inf)
        return out
    with np.errstate(divide="ignore"):
        vals = c * (hi**k - lo**k) / k
    if k < 0:
        vals = np.where(lo > 0, vals, np.inf)
    return vals


def power_shell_log_mass(n_dim: int, alpha: float, lo: np.ndarray,
                         hi: np.ndarray) -> np.ndarray:
    """Exact n_dim * omega_n int_lo^hi s^(n_dim - 1 - alpha) log(s) ds.

    Needed because log(s) varies by many units across the innermost cell,
    which can carry a macroscopic share of a singular weight's mass.
    Requires alpha < n_dim.
    """
    from .grids import unit_ball_volume

    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    k = n_dim - alpha
    if k <= 0:
        raise ValueError("log-mass needs an integrable power (alpha < n)")
    c = n_dim * unit_ball_volume(n_dim)

    def anti(s):
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = s[pos] ** k * (np.log(s[pos]) - 1.0 / k) / k
        return out

    return c * (anti(hi) - anti(lo))


@dataclass(frozen=True)
class Weight:
    """A non-negative weight; ``kind`` selects the family.

    ``scale`` multiplies the weight pointwise (kept explicit so that absolute
    homogeneity of capacitary norms is exact).
    """

    kind: str
    alpha: float = 0.0
    split: int = 2
    cutoff: Optional[float] = None
    table: Optional[GridFunction] = None
    scale: float = 1.0

    # -- constructors --------------------------------------------------------

    @classmethod
    def power(cls, alpha: float, scale: float = 1.0) -> "Weight":
        return cls("power", alpha=alpha, scale=scale)

    @classmethod
    def cylindrical_power(cls, beta: float, split: int = 2, scale: float = 1.0) -> "Weight":
        if beta >= split:
            raise ValueError(
                f"|x'|^(-{beta}) is not locally integrable on a codimension-{split} axis"
            )
        return cls("cylindrical_power", alpha=beta, split=split, scale=scale)

    @classmethod
    def truncated_power(cls, alpha: float, cutoff: float, scale: float = 1.0) -> "Weight":
        return cls("truncated_power", alpha=alpha, cutoff=cutoff, scale=scale)

    @classmethod
    def truncated_cylindrical(cls, beta: float, cutoff: float, split: int = 2,
                              scale: float = 1.0) -> "Weight":
        if beta >= split:
            raise ValueError("beta must be below the axis codimension")
        return cls("truncated_cylindrical", alpha=beta, split=split, cutoff=cutoff,
                   scale=scale)

    @classmethod
    def tabulated(cls, table: GridFunction, scale: float = 1.0) -> "Weight":
        if np.any(table.values < 0):
            raise ValueError("weights must be non-negative")
        return cls("tabulated", table=table, scale=scale)

    @classmethod
    def constant_one(cls) -> "Weight":
        return cls("power", alpha=0.0)

    def scaled(self, c: float) -> "Weight":
        if c < 0:
            raise ValueError("weights must stay non-negative")
        return Weight(self.kind, self.alpha, self.split, self.cutoff, self.table,
                      self.scale * c)

    # -- evaluation ----------------------------------------------------------

    @property
    def is_radial(self) -> bool:
        return self.kind in ("power", "truncated_power", "tabulated")

    def label(self) -> str:
        if self.kind == "power":
            return f"{self.scale:g}*|x|^(-{self.alpha:g})"
        if self.kind == "cylindrical_power":
            return f"{self.scale:g}*|x'|^(-{self.alpha:g})@R{self.split}"
        if self.kind == "truncated_power":
            return f"{self.scale:g}*|x|^(-{self.alpha:g})1{{|x|<={self.cutoff:g}}}"
        if self.kind == "truncated_cylindrical":
            return f"{self.scale:g}*|x'|^(-{self.alpha:g})1{{cyl<={self.cutoff:g}}}"
        return f"{self.scale:g}*tabulated"

    def sample(self, grid) -> np.ndarray:
        """Pointwise values aligned with the grid (radial or cylindrical)."""
        if isinstance(grid, RadialGrid):
            s = grid.nodes
            if self.kind == "power":
                return self.scale * s ** (-self.alpha)
            if self.kind == "truncated_power":
                return self.scale * s ** (-self.alpha) * (s <= self.cutoff)
            if self.kind == "tabulated":
                if self.table.grid is not grid and self.table.grid.size != grid.size:
                    raise ValueError("tabulated weight is aligned with another grid")
                return self.scale * self.table.values
            raise ValueError(f"{self.kind} weight needs a cylindrical grid")
        rho = grid.rho.nodes[:, None]
        sig = grid.sigma.nodes[None, :]
        if self.kind == "cylindrical_power":
            return self.scale * rho ** (-self.alpha) * np.ones_like(sig)
        if self.kind == "truncated_cylindrical":
            box = (rho <= self.cutoff) & (sig <= self.cutoff)
            return self.scale * rho ** (-self.alpha) * box
        if self.kind == "power":
            rr = np.hypot(rho, sig)
            return self.scale * rr ** (-self.alpha)
        if self.kind == "tabulated":
            return self.scale * self.table.values
        raise ValueError(f"cannot sample {self.kind} on a cylindrical grid")

    def cell_masses(self, grid) -> np.ndarray:
        """Per-node masses int_cell g dx; exact for the analytic kinds."""
        if isinstance(grid, RadialGrid):
            b = grid.bounds
            if self.kind == "power":
                return self.scale * power_shell_mass(grid.N, self.alpha, b[:-1], b[1:])
            if self.kind == "truncated_power":
                lo = np.minimum(b[:-1], self.cutoff)
                hi = np.minimum(b[1:], self.cutoff)
                return self.scale * power_shell_mass(grid.N, self.alpha, lo, hi)
            if self.kind == "tabulated":
                return self.scale * self.table.values * grid.measures
            raise ValueError(f"{self.kind} weight needs a cylindrical grid")
        if self.kind in ("cylindrical_power", "truncated_cylindrical"):
            br = grid.rho.bounds
            bs = grid.sigma.bounds
            if self.kind == "truncated_cylindrical":
                br = np.minimum(br, self.cutoff)
                bs = np.minimum(bs, self.cutoff)
            m_rho = power_shell_mass(grid.split, self.alpha, br[:-1], br[1:])
            m_sig = power_shell_mass(grid.N - grid.split, 0.0, bs[:-1], bs[1:])
            if grid.axis_half:
                m_sig = 0.5 * m_sig
            return self.scale * np.outer(m_rho, m_sig)
        # non-separable kinds: sampled-product fallback
        return self.sample(grid) * grid.measures

    def ball_mass(self, N: int, R: float) -> float:
        """int_{B_R(0)} g dx, closed form where available; +inf when divergent.

        Cylindrical kinds reduce to a 1-d integral over the axis distance.
        """
        if self.kind == "power":
            if self.alpha >= N:
                return float("inf")
            return float(self.scale * power_shell_mass(N, self.alpha, 0.0, R))
        if self.kind == "truncated_power":
            if self.alpha >= N:
                return float("inf")
            return float(self.scale * power_shell_mass(N, self.alpha, 0.0,
                                                       min(R, self.cutoff)))
        if self.kind in ("cylindrical_power", "truncated_cylindrical"):
            from .grids import unit_ball_volume

            k = self.split
            if self.alpha >= k:
                return float("inf")
            # slice at |x'| = rho: y ranges over a ball of radius
            # min(sqrt(R^2 - rho^2), cutoff) in R^(N-k)
            cap = self.cutoff if self.kind == "truncated_cylindrical" else np.inf
            rho = np.linspace(0.0, min(R, cap), 20001)[1:]
            ysec = np.minimum(np.sqrt(np.maximum(R**2 - rho**2, 0.0)), cap)
            vol = unit_ball_volume(N - k)
            shell = k * unit_ball_volume(k) * rho ** (k - 1 - self.alpha)
            val = float(np.trapezoid(shell * vol * ysec ** (N - k), rho))
            # exact singular head over [0, rho_1], where ysec is flat
            head = float(power_shell_mass(k, self.alpha, 0.0, rho[0])) * vol * float(
                min(np.sqrt(R**2 - rho[0] ** 2), cap)) ** (N - k)
            return float(self.scale * (val + head))
        raise ValueError(f"ball_mass not available for kind {self.kind}")


def scale_invariant_power_weight(params: Params) -> Weight:
    """|x|^(-(N - (r/p)(N-p))): per-ball capacitary ratios are radius-free."""
    params.validate(need_r=True)
    alpha = params.N - (params.r / params.p) * (params.N - params.p)
    return Weight.power(alpha)


def cylindrical_critical_weight(params: Params, truncated: bool = False,
                                cutoff: float = 1.0) -> Weight:
    """|x'|^(-N(p*-r)/p*) on R^2 x R^(N-2); optionally cut to a unit cylinder."""
    params.validate(need_r=True)
    beta = params.N * (params.pstar - params.r) / params.pstar
    if truncated:
        return Weight.truncated_cylindrical(beta, cutoff=cutoff, split=2)
    return Weight.cylindrical_power(beta, split=2)
