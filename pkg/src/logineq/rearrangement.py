"""Distribution functions, decreasing rearrangements and Lorentz quasi-norms.

The rearrangement of a sampled function is computed by sorting (sample, cell
measure) pairs rather than by inverting the distribution function: the result
is a right-continuous step function u*(t) on (0, inf) whose plateau widths are
the cell measures, so equimeasurability

    int_0^inf (u*)^q dt  =  int |u|^q dx

holds exactly (same summands, reordered).  Lorentz quasi-norms and the
logarithmic entropy functional are integrated in closed form over the steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import GridFunction

__all__ = [
    "RearrangedProfile",
    "distribution_function",
    "decreasing_rearrangement",
    "lorentz_quasinorm",
    "lorentz_entropy",
    "lorentz_norm_with_flag",
]


@dataclass(frozen=True)
class RearrangedProfile:
    """Non-increasing step function: value ``values[k]`` on (edges[k], edges[k+1]].

    ``edges[0] == 0``; ``sup_flag`` marks profiles whose largest sample sits at
    the domain edge, where the discrete max only surrogates the essential sup.
    """

    edges: np.ndarray
    values: np.ndarray
    sup_flag: bool = False

    def __post_init__(self):
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def s_nodes(self) -> np.ndarray:
        """Right endpoints of the plateaus (increasing measure coordinates)."""
        return self.edges[1:]

    def __call__(self, t) -> np.ndarray:
        """u*(t) = inf{s > 0 : |{|u| > s}| < t}; u*(0) is the largest sample."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.edges[1:], t, side="left")
        idx = np.minimum(idx, self.values.size - 1)
        out = self.values[idx]
        return np.where(t > self.edges[-1], 0.0, out)

    def moment(self, q: float) -> float:
        """int_0^inf (u*)^q dt (equals int |u|^q dx exactly)."""
        return float(np.sum(self.values**q * np.diff(self.edges)))

    def to_csv(self, path) -> None:
        arr = np.column_stack([self.s_nodes, self.values])
        np.savetxt(path, arr, delimiter=",", header="s,u_star", comments="")


def distribution_function(u: GridFunction, s: float) -> float:
    """Measure of the superlevel set {|u| > s}."""
    if s <= 0:
        raise ValueError("level must be positive")
    mask = np.abs(u.values) > s
    return float(np.sum(u.grid.measures[mask]))


def decreasing_rearrangement(u: GridFunction) -> RearrangedProfile:
    vals = np.abs(u.values).ravel()
    meas = np.asarray(u.grid.measures).ravel()
    order = np.argsort(-vals, kind="stable")
    v = vals[order]
    m = meas[order]
    keep = v > 0.0
    v, m = v[keep], m[keep]
    edges = np.concatenate([[0.0], np.cumsum(m)])
    # profile still growing across the innermost decade: the discrete max only
    # surrogates the essential sup of a possibly unbounded function
    sup_at_edge = False
    if u.profile_kind == "radial" and vals.size and int(np.argmax(vals)) == 0 \
            and vals[0] > 0:
        nodes = u.grid.nodes
        j = int(np.searchsorted(nodes, 10.0 * nodes[0]))
        j = min(max(j, 1), vals.size - 1)
        sup_at_edge = bool(vals[0] > 1.5 * vals[j])
    return RearrangedProfile(edges, v, sup_flag=sup_at_edge)


def _tail_diverges(contrib: np.ndarray, edges_hi: np.ndarray) -> bool:
    """Heuristic +inf detector: per-decade contributions that refuse to decay."""
    pos = contrib > 0
    if not np.any(pos):
        return False
    dec = np.floor(np.log10(edges_hi[pos])).astype(int)
    tot = {}
    for d, c in zip(dec, contrib[pos]):
        tot[d] = tot.get(d, 0.0) + c
    if len(tot) < 5:
        return False
    ds = sorted(tot)
    tail = [tot[d] for d in ds[-4:]]
    peak = max(tot.values())
    return bool(min(tail) > 0.25 * peak)


def lorentz_quasinorm(u: GridFunction, p: float, q: float,
                      check_divergence: bool = True) -> float:
    """Lorentz quasi-norm ||u||_{L^{p,q}} from the step rearrangement.

    q < inf:   ( int_0^inf [t^{1/p - 1/q} u*(t)]^q dt )^{1/q}, integrated
               exactly over the plateaus;
    q == inf:  discrete sup of t^{1/p} u*(t) over plateau right endpoints
               (a lower bound for the essential sup).

    Returns +inf when the per-decade tail contributions fail to decay
    (truncation would otherwise hide a divergent tail).
    """
    if not (1.0 <= p < math.inf and 1.0 <= q):
        raise ValueError("need 1 <= p < inf and 1 <= q <= inf")
    star = decreasing_rearrangement(u)
    if star.values.size == 0:
        return 0.0
    lo, hi = star.edges[:-1], star.edges[1:]
    if math.isinf(q):
        return float(np.max(hi ** (1.0 / p) * star.values))
    a = q / p
    contrib = star.values**q * (hi**a - lo**a) / a
    if check_divergence and _tail_diverges(contrib, hi):
        return float("inf")
    return float(np.sum(contrib)) ** (1.0 / q)


def lorentz_norm_with_flag(u: GridFunction, p: float, q: float) -> tuple:
    """(norm, divergence_flag); the flag mirrors the +inf sentinel."""
    val = lorentz_quasinorm(u, p, q)
    return val, math.isinf(val)


def lorentz_entropy(u: GridFunction, N: int, p: float) -> tuple:
    """Entropy side of the logarithmic Lorentz-Sobolev inequality.

    Normalizes u so that ||u||_{L^{p*,p}} = 1 (the applied factor is returned)
    and evaluates

        int_0^inf s^(p/p* - 1) (u*)^p log( s^(1 - p/N) (u*)^p ) ds

    in closed form over the plateaus of u*.  Raises on u == 0.
    """
    pstar = N * p / (N - p)
    norm = lorentz_quasinorm(u, pstar, p, check_divergence=False)
    if norm == 0.0:
        raise ValueError("cannot normalize the zero function")
    star = decreasing_rearrangement(u)
    v = star.values / norm
    lo, hi = star.edges[:-1], star.edges[1:]
    a = p / pstar
    kappa = 1.0 - p / N
    # int s^(a-1) ds and int s^(a-1) log s ds over each plateau
    i0 = (hi**a - lo**a) / a
    i1 = (hi**a * (np.log(hi) - 1.0 / a) - np.where(lo > 0, lo**a * (np.log(
        np.maximum(lo, 1e-300)) - 1.0 / a), -lo**a / a)) / a
    vp = v**p
    # t log t -> 0 extension where v^p underflows
    logvp = np.zeros_like(vp)
    np.log(vp, out=logvp, where=vp > 0)
    terms = vp * kappa * i1 + vp * logvp * i0
    return float(np.sum(terms)), 1.0 / norm
