"""Variational search for the best weighted logarithmic Sobolev constant.

The best constant at level gamma is the reciprocal of

    inf { int |grad u|^p / exp( (1/gamma) int |g||u|^p log|u|^p )
          : int |g||u|^p = 1 },

so every evaluated profile certifies 1/Q as a lower bound for it.  Profiles
are sums of log-radius bumps with fixed, log-spaced centers and trainable
amplitudes/widths; the quotient is evaluated in log space (no overflow) after
internal renormalization of the weighted mass.

For scale-invariant power weights at gamma strictly above the critical level
r/(r-p) the quotient decreases along the dilation family (mass spreading to
ever larger scales), so the true infimum over all of D^{1,p}_0 is zero and no
minimizer exists — consistent with attainment requiring weights that vanish
at infinity in the capacitary sense.  The bounded center span of the bump
family deliberately arrests that escape: the reported Q* is the family-
restricted local value, probed for stability under family refinement, and is
never asserted to equal the true infimum.  Compactly supported weights do
admit minimizers; the concentration diagnostic tracks the weighted distance of
iterates to the final profile, which should vanish in that case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from .grids import GridFunction, RadialGrid, dirichlet_energy
from .inequalities import NormalizationError, _xlogx_sum
from .weights import Weight

__all__ = [
    "BumpProfile",
    "OptConfig",
    "OptimizationTrace",
    "rayleigh_quotient",
    "quotient_parts",
    "minimize_quotient",
    "multistart_minimize",
    "concentration_diagnostic",
]


@dataclass(frozen=True)
class BumpProfile:
    """Non-negative radial profile: sum of Gaussian bumps in log radius.

    theta = [amplitudes..., widths...] with box bounds; centers stay fixed so
    that finite-difference gradients remain well scaled.
    """

    centers: np.ndarray
    theta: np.ndarray
    amp_max: float = 10.0
    width_lo: float = 0.2
    width_hi: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "centers", np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        if self.theta.size != 2 * self.centers.size:
            raise ValueError("theta must hold one amplitude and one width per bump")

    @classmethod
    def initial(cls, n_bumps: int = 8, span=(0.25, 4.0),
                rng: Optional[np.random.Generator] = None,
                amp_max: float = 10.0) -> "BumpProfile":
        centers = np.geomspace(span[0], span[1], n_bumps)
        if rng is None:
            amps = np.exp(-np.log(centers) ** 2)      # unit-scale hump
        else:
            amps = rng.uniform(0.1, 1.0, n_bumps)
        widths = np.full(n_bumps, 0.5)
        return cls(centers, np.concatenate([amps, widths]), amp_max=amp_max)

    @property
    def amplitudes(self) -> np.ndarray:
        return self.theta[: self.centers.size]

    @property
    def widths(self) -> np.ndarray:
        return self.theta[self.centers.size:]

    def clipped(self, theta: np.ndarray) -> np.ndarray:
        n = self.centers.size
        out = theta.copy()
        out[:n] = np.clip(out[:n], 0.0, self.amp_max)
        out[n:] = np.clip(out[n:], self.width_lo, self.width_hi)
        return out

    def with_theta(self, theta: np.ndarray) -> "BumpProfile":
        return replace(self, theta=self.clipped(theta))

    def refined(self) -> "BumpProfile":
        """Double the bump resolution over the same center span."""
        lo, hi = self.centers[0], self.centers[-1]
        centters = np.geomspace(lo, hi, 2 * self.centers.size)
        amps = np.interp(np.log(centters), np.log(self.centers), self.amplitudes)
        widths = np.interp(np.log(centters), np.log(self.centers), self.widths)
        return BumpProfile(centters, np.concatenate([amps, widths]),
                           amp_max=self.amp_max, width_lo=self.width_lo,
                           width_hi=self.width_hi)

    def profile(self):
        logc = np.log(self.centers)
        amps = self.amplitudes.copy()
        widths = self.widths.copy()

        def fn(s):
            ls = np.log(np.maximum(np.asarray(s, dtype=float), 1e-300))
            z = (ls[..., None] - logc) / widths
            return np.sum(amps * np.exp(-z**2), axis=-1)

        return fn

    def realize(self, grid: RadialGrid) -> GridFunction:
        return GridFunction.from_profile(grid, self.profile())


def quotient_parts(prof: BumpProfile, g: Weight, p: float, gamma: float,
                   grid: RadialGrid) -> dict:
    """(log Q, Q, mass A before scaling, Dirichlet energy, entropy) of the
    internally normalized profile; raises on zero mass."""
    u = prof.realize(grid)
    masses = g.cell_masses(grid)
    vp = np.abs(u.values) ** p
    A = float(np.sum(masses * vp))
    if not (A > 0 and math.isfinite(A)):
        raise NormalizationError("profile has zero or divergent weighted mass")
    un = u.scaled(A ** (-1.0 / p))
    vp = np.abs(un.values) ** p
    ent = _xlogx_sum(masses, vp)
    D = dirichlet_energy(un, p)
    logq = math.log(D) - ent / gamma
    return {"logQ": logq, "Q": math.exp(logq), "A": A, "D": D, "entropy": ent}


def rayleigh_quotient(prof: BumpProfile, g: Weight, p: float, gamma: float,
                      grid: RadialGrid) -> float:
    """Q = int|grad u|^p / exp(entropy/gamma) for the mass-normalized profile."""
    return quotient_parts(prof, g, p, gamma, grid)["Q"]


@dataclass
class OptConfig:
    max_iter: int = 2000
    fd_step: float = 1e-4        # relative finite-difference step
    armijo: float = 1e-4
    backtrack: float = 0.5
    step0: float = 0.25
    gtol: float = 1e-7
    restarts: int = 2
    n_bumps: int = 8
    span: tuple = (0.25, 4.0)
    seed: int = 0


@dataclass
class OptimizationTrace:
    """Accepted iterates of one descent run (Q non-increasing by construction)."""

    iterates: List[dict] = field(default_factory=list)   # Q, A, D, entropy
    thetas: List[np.ndarray] = field(default_factory=list)
    status: str = "converged"
    accepted_steps: int = 0
    profile: Optional[BumpProfile] = None

    @property
    def best_Q(self) -> float:
        return self.iterates[-1]["Q"]

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "Q", "A", "D", "concentration"])
            for i, rec in enumerate(self.iterates):
                w.writerow([i, rec["Q"], rec["A"], rec["D"],
                            rec.get("concentration", "")])


def _fd_gradient(fun, theta: np.ndarray, rel: float) -> np.ndarray:
    g = np.zeros_like(theta)
    for i in range(theta.size):
        h = rel * max(abs(theta[i]), 0.05)
        tp = theta.copy()
        tp[i] += h
        tm = theta.copy()
        tm[i] -= h
        g[i] = (fun(tp) - fun(tm)) / (2 * h)
    return g


def minimize_quotient(prof0: BumpProfile, g: Weight, p: float, gamma: float,
                      grid: RadialGrid, config: Optional[OptConfig] = None,
                      gamma_floor: Optional[float] = None) -> OptimizationTrace:
    """Projected finite-difference descent on log Q with Armijo backtracking.

    ``gamma_floor`` (= r/(r-p) for the intended r) triggers a warning run when
    gamma does not exceed it — below that level the boundedness argument for
    minimizing sequences fails; the run proceeds regardless.
    """
    config = config or OptConfig()
    import warnings

    if gamma_floor is not None and gamma <= gamma_floor:
        warnings.warn(f"gamma={gamma} is not above the critical level "
                      f"{gamma_floor}; minimizing sequences need not be bounded",
                      stacklevel=2)

    def objective(theta):
        try:
            return quotient_parts(prof0.with_theta(theta), g, p, gamma, grid)["logQ"]
        except NormalizationError:
            return math.inf

    theta = prof0.clipped(prof0.theta)
    parts = quotient_parts(prof0.with_theta(theta), g, p, gamma, grid)
    trace = OptimizationTrace()
    trace.iterates.append(parts)
    trace.thetas.append(theta.copy())
    f = parts["logQ"]
    status = "iteration_cap"
    for _ in range(config.max_iter):
        grad = _fd_gradient(objective, theta, config.fd_step)
        gnorm = float(np.max(np.abs(grad)))
        if gnorm <= config.gtol:
            status = "converged"
            break
        t = config.step0 / max(gnorm, 1.0)
        accepted = False
        for _bt in range(30):
            trial = prof0.clipped(theta - t * grad)
            ft = objective(trial)
            decrease = float(grad @ (theta - trial))
            if math.isfinite(ft) and ft <= f - config.armijo * decrease \
                    and ft < f:
                accepted = True
                break
            t *= config.backtrack
        if not accepted:
            status = "stalled"
            break
        theta = trial
        f = ft
        parts = quotient_parts(prof0.with_theta(theta), g, p, gamma, grid)
        trace.iterates.append(parts)
        trace.thetas.append(theta.copy())
        trace.accepted_steps += 1
        if len(trace.iterates) > 2:
            d1 = trace.iterates[-2]["Q"] - trace.iterates[-1]["Q"]
            if 0 <= d1 <= 1e-10 * max(trace.iterates[-1]["Q"], 1e-300):
                status = "converged"
                break
    trace.status = status
    trace.profile = prof0.with_theta(theta)
    return trace


def multistart_minimize(g: Weight, p: float, gamma: float, grid: RadialGrid,
                        config: Optional[OptConfig] = None,
                        gamma_floor: Optional[float] = None) -> OptimizationTrace:
    """Best-of-restarts wrapper; deterministic by seed order."""
    config = config or OptConfig()
    best: Optional[OptimizationTrace] = None
    for k in range(max(config.restarts, 1)):
        rng = np.random.default_rng(config.seed + k) if k else None
        prof0 = BumpProfile.initial(config.n_bumps, config.span, rng=rng)
        tr = minimize_quotient(prof0, g, p, gamma, grid, config,
                               gamma_floor=gamma_floor)
        if best is None or tr.best_Q < best.best_Q:
            best = tr
    return best


def concentration_diagnostic(trace: OptimizationTrace, g: Weight, p: float,
                             grid: RadialGrid) -> List[float]:
    """A_n = int |g| |u_n - u_final|^p along the accepted iterates.

    Vanishing A_n mirrors the compactness mechanism that yields attainment
    for weights with vanishing capacitary tails; it is reported as evidence,
    not asserted, since that membership is itself only evidenced numerically.
    Traces shorter than 2 iterates yield an empty sequence.
    """
    if len(trace.thetas) < 2:
        return []
    masses = g.cell_masses(grid)
    prof = trace.profile

    def unit_mass(th):
        v = prof.with_theta(th).realize(grid).values
        a = float(np.sum(masses * np.abs(v) ** p))
        return v * a ** (-1.0 / p)

    final = unit_mass(trace.thetas[-1])
    return [float(np.sum(masses * np.abs(unit_mass(th) - final) ** p))
            for th in trace.thetas]
