"""p-capacity of compacta, the capacitary weight norm, and its inequality residual.

The p-capacity of F inside R^N is inf{ int |grad u|^p : u >= 1 on F, u in
D^{1,p}_0 }.  For balls it has the closed form

    Cap_p(B_R) = N omega_N ((N-p)/(p-1))^(p-1) R^(N-p),

the energy of the radial extremal min(1, (|x|/R)^(-(N-p)/(p-1))).  (A commonly
reprinted variant carries (N-1)/(p-1) in place of (N-p)/(p-1); the extremal's
energy integral and the variational solver below both give (N-p)/(p-1), which
is what this module implements.)

The variational estimate restricts to radial profiles, so it computes the
capacity of the radial shadow of F (the set of radii F occupies, holes filled);
that is always an upper bound for Cap_p(F) and is exact for balls, spheres and
annuli.  The discrete energy is the *exact* energy of the piecewise-linear
interpolant, so every feasible iterate certifies an upper bound, and inserting
midpoint nodes never increases the optimum.

The capacitary norm of a weight g is sup over compacta of
int_F |g| / Cap_p(F)^(r/p); finiteness of this norm characterizes the weighted
Sobolev inequality with constant C_H = p^p (p-1)^(1-p) (Maz'ya's criterion).
A finite family of test sets yields a certified lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .grids import GridFunction, ParameterError, RadialGrid, unit_ball_volume
from .weights import Weight

__all__ = [
    "CompactSet",
    "CapacityEstimate",
    "MazyaNorm",
    "ball_capacity",
    "variational_capacity",
    "capacity_grid",
    "mazya_constant",
    "mazya_norm_lower_bound",
    "default_ball_family",
    "mazya_residual",
]


# ---------------------------------------------------------------------------
# compact test sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompactSet:
    """Compact subset of R^N used as a capacity test set."""

    kind: str
    center: Optional[np.ndarray] = None
    radius: float = 0.0
    half_width: float = 0.0
    r_in: float = 0.0
    r_out: float = 0.0
    members: Tuple["CompactSet", ...] = ()
    disjoint_warning: bool = field(default=False, compare=False)

    @classmethod
    def ball(cls, center, radius: float) -> "CompactSet":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return cls("ball", center=np.asarray(center, dtype=float), radius=radius)

    @classmethod
    def cube(cls, center, half_width: float) -> "CompactSet":
        if half_width <= 0:
            raise ValueError("half_width must be positive")
        return cls("cube", center=np.asarray(center, dtype=float),
                   half_width=half_width)

    @classmethod
    def annulus(cls, r_in: float, r_out: float) -> "CompactSet":
        if not (0 < r_in < r_out):
            raise ValueError("need 0 < r_in < r_out")
        return cls("annulus", r_in=r_in, r_out=r_out)

    @classmethod
    def union(cls, members: Sequence["CompactSet"]) -> "CompactSet":
        members = tuple(members)
        if not members:
            raise ValueError("empty union")
        ivals = sorted(m.radial_shadow() for m in members)
        overlap = any(ivals[i][1] > ivals[i + 1][0] for i in range(len(ivals) - 1))
        return cls("union", members=members, disjoint_warning=overlap)

    def radial_shadow(self) -> Tuple[float, float]:
        """Interval of radii |x| occupied by the set (hull for unions)."""
        if self.kind == "ball":
            c = float(np.linalg.norm(self.center))
            return max(c - self.radius, 0.0), c + self.radius
        if self.kind == "cube":
            c = np.abs(self.center)
            lo = math.sqrt(float(np.sum(np.maximum(c - self.half_width, 0.0) ** 2)))
            hi = math.sqrt(float(np.sum((c + self.half_width) ** 2)))
            return lo, hi
        if self.kind == "annulus":
            return self.r_in, self.r_out
        shadows = [m.radial_shadow() for m in self.members]
        return min(s[0] for s in shadows), max(s[1] for s in shadows)

    def shadow_intervals(self) -> List[Tuple[float, float]]:
        if self.kind == "union":
            return sorted(m.radial_shadow() for m in self.members)
        return [self.radial_shadow()]

    def label(self) -> str:
        if self.kind == "ball":
            return f"ball(|c|={np.linalg.norm(self.center):.4g},R={self.radius:.4g})"
        if self.kind == "cube":
            return f"cube(|c|={np.linalg.norm(self.center):.4g},h={self.half_width:.4g})"
        if self.kind == "annulus":
            return f"annulus({self.r_in:.4g},{self.r_out:.4g})"
        return f"union[{len(self.members)}]"


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def ball_capacity(N: int, p: float, R: float) -> float:
    """Cap_p(B_R) = N omega_N ((N-p)/(p-1))^(p-1) R^(N-p)."""
    if not (1.0 < p < N):
        raise ParameterError(f"p={p} outside (1, N); the formula degenerates")
    if R <= 0:
        raise ValueError("radius must be positive")
    return N * unit_ball_volume(N) * ((N - p) / (p - 1.0)) ** (p - 1.0) * R ** (N - p)


def mazya_constant(p: float) -> float:
    """C_H = p^p (p-1)^(1-p), the explicit constant in the capacitary criterion."""
    if p <= 1.0:
        raise ParameterError("need p > 1")
    return p**p * (p - 1.0) ** (1.0 - p)


def capacity_set_value(F: CompactSet, N: int, p: float) -> float:
    """Capacity of F's radial shadow: closed form (upper bound for Cap_p(F),
    exact for origin-centered balls/annuli and off-center balls by translation)."""
    if F.kind == "ball":
        return ball_capacity(N, p, F.radius)
    lo, hi = F.radial_shadow()
    return ball_capacity(N, p, hi)


# ---------------------------------------------------------------------------
# variational solver
# ---------------------------------------------------------------------------

@dataclass
class CapacityEstimate:
    value: float
    kind: str                      # "closed_form" | "variational_upper"
    admissible_profile: Optional[GridFunction]
    convergence: List[float]
    status: str = "converged"
    iterations: int = 0
    truncation_note: Optional[str] = None

    def to_csv(self, path) -> None:
        arr = np.column_stack([np.arange(len(self.convergence)), self.convergence])
        np.savetxt(path, arr, delimiter=",", header="refinement,capacity", comments="")


def capacity_grid(F: CompactSet, N: int, n: int = 4096,
                  span: float = 1e8) -> RadialGrid:
    """Geometric grid sized for the capacity problem of F.

    The capacitary potential decays like s^(-(N-p)/(p-1)); a wide domain keeps
    the truncation surplus below the percent level even for slow decay.
    """
    lo, hi = F.radial_shadow()
    r_lo = max(lo, hi * 1e-4) if lo > 0 else hi * 1e-4
    nodes = np.geomspace(r_lo, hi * span, n)
    extra = [x for x in (lo, hi) if x > 0]
    nodes = np.unique(np.concatenate([nodes, extra]))
    return RadialGrid(nodes, N)


def _pw_linear_energy_coeffs(nodes: np.ndarray, N: int, p: float) -> np.ndarray:
    """a_i with  E(u) = sum_i a_i |u_{i+1} - u_i|^p  exact for pw-linear u."""
    h = np.diff(nodes)
    return unit_ball_volume(N) * np.diff(nodes**N) / h**p


def _shadow_mask(nodes: np.ndarray, intervals) -> np.ndarray:
    mask = np.zeros(nodes.size, dtype=bool)
    for lo, hi in intervals:
        mask |= (nodes >= lo - 1e-12 * max(hi, 1.0)) & (nodes <= hi * (1 + 1e-12))
    return mask


def _project(u: np.ndarray, mask: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    u[mask] = 1.0
    u[-1] = 0.0
    return u


def _descend(nodes: np.ndarray, N: int, p: float, mask: np.ndarray,
             u0: np.ndarray, max_iter: int, tol: float) -> tuple:
    """Projected descent on the exact piecewise-linear energy.

    The search direction is the gradient scaled by local curvature (the raw
    gradient step collapses on geometric grids whose cell stiffness spans many
    orders of magnitude); clamping and Armijo backtracking are unchanged.
    """
    a = _pw_linear_energy_coeffs(nodes, N, p)

    def energy(u):
        return float(np.sum(a * np.abs(np.diff(u)) ** p))

    def gradient(u):
        d = np.diff(u)
        flux = p * a * np.abs(d) ** (p - 1.0) * np.sign(d)
        g = np.zeros_like(u)
        g[:-1] -= flux
        g[1:] += flux
        return g, d

    u = _project(u0.copy(), mask)
    E = energy(u)
    status = "iteration_cap"
    it = 0
    stagnant = 0
    for it in range(1, max_iter + 1):
        g, d = gradient(u)
        g[mask] = 0.0
        g[-1] = 0.0
        gnorm = float(np.max(np.abs(g)))
        if gnorm == 0.0:
            status = "converged"
            break
        dref = max(float(np.max(np.abs(d))), 1e-12)
        curv = p * max(p - 1.0, 0.25) * (a * np.maximum(np.abs(d), 1e-3 * dref)
                                         ** (p - 2.0))
        diag = np.zeros_like(u)
        diag[:-1] += curv
        diag[1:] += curv
        step = g / np.maximum(diag, 1e-300)
        accepted = False
        t = 1.0
        for _ in range(40):
            trial = _project(u - t * step, mask)
            Et = energy(trial)
            if Et <= E - 1e-4 * float(np.dot(g, (u - trial))):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            status = "stalled"
            break
        drop = E - Et
        u, E = trial, Et
        stagnant = stagnant + 1 if drop <= tol * max(abs(E), 1e-300) else 0
        if stagnant >= 3:
            status = "converged"
            break
    return u, E, status, it


def variational_capacity(F: CompactSet, grid: RadialGrid, p: float,
                         max_iter: int = 2000, tol: float = 1e-10,
                         refinements: int = 2) -> CapacityEstimate:
    """Radial variational upper bound for Cap_p(F), with a refinement trace.

    Minimizes the exact piecewise-linear Dirichlet p-energy over grid profiles
    with u >= 1 on the radial shadow of F and u(r_max) = 0, by projected
    descent from the truncated-domain extremal.  Each refinement inserts
    geometric midpoints and warm-starts from the previous solution, so the
    convergence sequence is non-increasing by construction.
    """
    N = grid.N
    if not (1.0 < p < N):
        raise ParameterError(f"p={p} outside (1, N)")
    lo, hi = F.radial_shadow()
    if hi >= grid.r_max:
        raise ValueError("set must lie inside the grid domain")
    nodes = np.unique(np.concatenate([grid.nodes,
                                      [x for x in (lo, hi) if x > 0]]))
    intervals = F.shadow_intervals()

    kappa = (N - p) / (p - 1.0)
    S = nodes[-1]

    def extremal(s):
        top = s ** (-kappa) - S ** (-kappa)
        bot = hi ** (-kappa) - S ** (-kappa)
        return np.clip(top / bot, 0.0, 1.0)

    values: List[float] = []
    u = extremal(nodes)
    status = "converged"
    last_iters = 0
    prof_nodes = nodes
    for level in range(refinements + 1):
        if level > 0:
            mids = np.sqrt(prof_nodes[:-1] * prof_nodes[1:])
            new_nodes = np.sort(np.concatenate([prof_nodes, mids]))
            u = np.interp(new_nodes, prof_nodes, u)
            prof_nodes = new_nodes
        mask = _shadow_mask(prof_nodes, intervals)
        u, E, status, last_iters = _descend(prof_nodes, N, p, mask, u,
                                            max_iter, tol)
        values.append(E)

    note = None
    if grid.r_max / hi < 1e4:
        note = "domain only %.1e times the set radius; truncation inflates the bound" % (
            grid.r_max / hi)
    prof = GridFunction(RadialGrid(prof_nodes, N), u)
    return CapacityEstimate(value=values[-1], kind="variational_upper",
                            admissible_profile=prof, convergence=values,
                            status="not converged" if status == "iteration_cap"
                            else "converged", iterations=last_iters,
                            truncation_note=note)


# ---------------------------------------------------------------------------
# capacitary weight norm
# ---------------------------------------------------------------------------

@dataclass
class MazyaNorm:
    """Certified lower bound for the capacitary norm over a finite set family."""

    lower_bound: float
    family: str
    per_set_ratios: List[tuple]    # (label, mass, cap^(r/p), ratio)
    divergent: bool = False

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["set", "weight_mass", "cap_pow", "ratio"])
            for row in self.per_set_ratios:
                w.writerow(row)


def default_ball_family(N: int, radii: Optional[Sequence[float]] = None,
                        offsets: Optional[Sequence[float]] = None) -> List[CompactSet]:
    """Origin-centered plus offset balls over a geometric radius sweep."""
    if radii is None:
        radii = np.geomspace(0.05, 50.0, 12)
    if offsets is None:
        offsets = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
    fam = []
    e1 = np.zeros(N)
    for R in radii:
        for c in offsets:
            e1_c = e1.copy()
            e1_c[0] = c
            fam.append(CompactSet.ball(e1_c, float(R)))
    return fam


def _offcenter_power_ball_mass(alpha: float, N: int, center: float, R: float,
                               s_cap: float = math.inf) -> float:
    """int_{B_R(c e1), |x| <= s_cap} |x|^(-alpha) dx by shells around the origin."""
    if center == 0.0:
        return Weight.power(alpha).ball_mass(N, min(R, s_cap))
    lo, hi = max(center - R, 0.0), min(center + R, s_cap)
    if hi <= lo:
        return 0.0
    if lo == 0.0 and alpha >= N:
        return float("inf")
    from scipy.integrate import quad

    th_full = np.linspace(0.0, math.pi, 513)
    full = float(np.trapezoid(np.sin(th_full) ** (N - 2), th_full))

    def sphere_fraction(s):
        # fraction of the sphere |x| = s inside B_R(c e1)
        if s <= 0:
            return 1.0
        cosv = (s**2 + center**2 - R**2) / (2 * s * center)
        if cosv <= -1:
            return 1.0
        if cosv >= 1:
            return 0.0
        tt = np.linspace(0.0, math.acos(cosv), 257)
        return float(np.trapezoid(np.sin(tt) ** (N - 2), tt)) / full

    c = N * unit_ball_volume(N)
    val, _ = quad(lambda s: c * s ** (N - 1 - alpha) * sphere_fraction(s), lo, hi,
                  limit=200)
    return float(val)


def set_weight_mass(g: Weight, F: CompactSet, N: int) -> float:
    """int_F |g| dx for the supported (weight kind, set kind) combinations."""
    if F.kind == "ball":
        c = float(np.linalg.norm(F.center))
        if c == 0.0:
            return g.ball_mass(N, F.radius)
        if g.kind in ("power", "truncated_power"):
            s_cap = g.cutoff if g.kind == "truncated_power" else math.inf
            return g.scale * _offcenter_power_ball_mass(g.alpha, N, c, F.radius,
                                                        s_cap=s_cap)
        raise ValueError(f"mass of {g.kind} over off-center balls is unsupported")
    if F.kind == "annulus":
        if g.kind in ("power", "truncated_power"):
            hi = F.r_out if g.kind == "power" else min(F.r_out, g.cutoff)
            lo = F.r_in if g.kind == "power" else min(F.r_in, g.cutoff)
            if hi <= lo:
                return 0.0
            base = Weight.power(g.alpha)
            return (base.ball_mass(N, hi) - base.ball_mass(N, lo)) * g.scale
        raise ValueError("annulus masses implemented for radial powers only")
    if F.kind == "union":
        return float(sum(set_weight_mass(g, m, N) for m in F.members))
    raise ValueError(f"weight mass over {F.kind} sets is unsupported")


def mazya_norm_lower_bound(g: Weight, p: float, r: float,
                           family: Sequence[CompactSet], N: int) -> MazyaNorm:
    """sup over the family of int_F |g| / Cap_p(F)^(r/p).

    A certified lower bound for the capacitary norm (the sup over *all*
    compacta is not exhausted).  A divergent member mass yields the +inf
    sentinel: evidence that g is outside the capacitary class.
    """
    if not (1.0 < p < N) or not (p <= r <= N * p / (N - p) + 1e-12):
        raise ParameterError("need 1 < p < N and p <= r <= p*")
    if not family:
        raise ValueError("need a non-empty family")
    rows = []
    best = 0.0
    divergent = False
    for F in family:
        mass = set_weight_mass(g, F, N)
        cap = capacity_set_value(F, N, p) ** (r / p)
        ratio = mass / cap
        rows.append((F.label(), mass, cap, ratio))
        if math.isinf(ratio):
            divergent = True
        best = max(best, ratio)
    return MazyaNorm(lower_bound=float(best), family=f"{len(family)} sets",
                     per_set_ratios=rows, divergent=divergent)


def mazya_residual(g: Weight, u: GridFunction, p: float, r: float,
                   norm_value: float, lower_bound_only: bool = True) -> dict:
    """Residual of the capacitary sufficiency inequality

        C_H ||g||^{p/r} int |grad u|^p  -  ( int |g| |u|^r )^{p/r}  >= 0.

    With a family lower bound in place of the true norm a negative residual is
    inconclusive; the returned record carries that flag.
    """
    from .grids import dirichlet_energy

    masses = g.cell_masses(u.grid)
    B = float(np.sum(masses * np.abs(u.values) ** r))
    D = dirichlet_energy(u, p)
    lhs = B ** (p / r)
    rhs = mazya_constant(p) * norm_value ** (p / r) * D
    return {
        "lhs": lhs,
        "rhs": rhs,
        "residual": rhs - lhs,
        "norm_value": norm_value,
        "inconclusive_if_negative": bool(lower_bound_only),
        "divergent": not math.isfinite(B),
    }
