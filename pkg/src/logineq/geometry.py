"""Closed-set catalog with distance oracles, covering bounds, Assouad dimension.

The Assouad dimension of E is the smallest lambda such that the number
eta(E cap B_R(x), r) of r-balls (centers in E) needed to cover E cap B_R(x) is
O((R/r)^lambda) uniformly over centers x in E and scales 0 < r < R < diam(E)
(the diameter restriction is dropped for singletons, forcing dimension 0).

Covering counts are bracketed from a delta-dense sample of E cap B_R(x):

* upper bound: occupied lattice cells of side (r - delta)/sqrt(N); each such
  cell lies inside the closed r-ball around any of its sample points, and
  every point of E cap B_R(x) is within delta of a sample — so these balls
  cover, with centers in E;
* lower bound: the best parity class of occupied cells of side 2r; points kept
  from cells that agree mod 2 are pairwise more than 2r apart, so no r-ball
  holds two of them.

Both counts scale like (R/r)^dim with stable constants, so log-log slopes
estimate the dimension; the reported value uses the (conservative) upper
counts and is a sampled lower estimate of the true sup over centers/scales.
Porosity — a uniform relative hole B_{alpha r}(y) in every B_r(x) \\ E — is
searched on a candidate lattice through the distance oracle; alpha > 0 is
numerical evidence that the dimension is below N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "ClosedSet",
    "AssouadEstimate",
    "SamplingConfig",
    "distance_to_set",
    "covering_number_bounds",
    "assouad_dimension",
    "porosity_constant",
    "ExponentWindow",
    "admissible_exponent_range",
]


class UnsupportedSetError(ValueError):
    """Set kind cannot be sampled for the requested operation."""


@dataclass(frozen=True)
class ClosedSet:
    """Closed subset of R^N with an exact distance oracle."""

    kind: str
    N: int
    point: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    radius: float = 0.0
    normal: Optional[np.ndarray] = None
    offset: float = 0.0
    a: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None
    points: Optional[np.ndarray] = None
    members: Tuple["ClosedSet", ...] = ()

    @classmethod
    def single_point(cls, x0) -> "ClosedSet":
        x0 = np.asarray(x0, dtype=float)
        return cls("point", N=x0.size, point=x0)

    @classmethod
    def origin(cls, N: int) -> "ClosedSet":
        return cls.single_point(np.zeros(N))

    @classmethod
    def sphere(cls, center, radius: float) -> "ClosedSet":
        center = np.asarray(center, dtype=float)
        if radius <= 0:
            raise ValueError("radius must be positive")
        return cls("sphere", N=center.size, center=center, radius=radius)

    @classmethod
    def hyperplane(cls, normal, offset: float = 0.0) -> "ClosedSet":
        normal = np.asarray(normal, dtype=float)
        nrm = float(np.linalg.norm(normal))
        if nrm == 0:
            raise ValueError("normal must be nonzero")
        return cls("hyperplane", N=normal.size, normal=normal / nrm,
                   offset=offset / nrm)

    @classmethod
    def segment(cls, a, b) -> "ClosedSet":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if np.allclose(a, b):
            raise ValueError("degenerate segment")
        return cls("segment", N=a.size, a=a, b=b)

    @classmethod
    def point_cloud(cls, points) -> "ClosedSet":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return cls("point_cloud", N=pts.shape[1], points=pts)

    @classmethod
    def union(cls, members: Sequence["ClosedSet"]) -> "ClosedSet":
        members = tuple(members)
        if not members:
            raise ValueError("empty union")
        N = members[0].N
        if any(m.N != N for m in members):
            raise ValueError("mixed ambient dimensions")
        return cls("union", N=N, members=members)

    # -- geometry ------------------------------------------------------------

    def diameter(self) -> float:
        if self.kind == "point":
            return 0.0
        if self.kind == "sphere":
            return 2.0 * self.radius
        if self.kind == "hyperplane":
            return math.inf
        if self.kind == "segment":
            return float(np.linalg.norm(self.b - self.a))
        if self.kind == "point_cloud":
            if self.points.shape[0] == 1:
                return 0.0
            from scipy.spatial.distance import pdist

            if self.points.shape[0] <= 4000:
                return float(pdist(self.points).max())
            mn, mx = self.points.min(0), self.points.max(0)
            return float(np.linalg.norm(mx - mn))
        return max(2.0 * self._bounding_radius(), max(m.diameter()
                                                      for m in self.members))

    def _bounding_radius(self) -> float:
        pts = self.base_points(4)
        c = pts.mean(axis=0)
        return float(np.max(np.linalg.norm(pts - c, axis=1)))

    def distance(self, x: np.ndarray) -> np.ndarray:
        """Exact Euclidean distance from the rows of x to the set."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "point":
            d = np.linalg.norm(x - self.point, axis=1)
        elif self.kind == "sphere":
            d = np.abs(np.linalg.norm(x - self.center, axis=1) - self.radius)
        elif self.kind == "hyperplane":
            d = np.abs(x @ self.normal - self.offset)
        elif self.kind == "segment":
            ab = self.b - self.a
            t = np.clip((x - self.a) @ ab / float(ab @ ab), 0.0, 1.0)
            d = np.linalg.norm(x - (self.a + t[:, None] * ab), axis=1)
        elif self.kind == "point_cloud":
            from scipy.spatial import cKDTree

            d, _ = cKDTree(self.points).query(x, workers=-1)
            d = np.asarray(d)
        else:
            d = np.min(np.stack([m.distance(x) for m in self.members]), axis=0)
        return d

    def base_points(self, k: int = 4) -> np.ndarray:
        """Deterministic points on the set, used as covering base centers."""
        if self.kind == "point":
            return self.point[None, :]
        if self.kind == "sphere":
            out = []
            for i in range(k):
                v = np.zeros(self.N)
                v[i % self.N] = 1.0 if i < self.N else -1.0
                out.append(self.center + self.radius * v)
            return np.asarray(out)
        if self.kind == "hyperplane":
            x0 = self.offset * self.normal
            basis = _orthobasis(self.normal)
            out = [x0]
            for i in range(min(k - 1, basis.shape[0])):
                out.append(x0 + basis[i])
            return np.asarray(out)
        if self.kind == "segment":
            ts = np.linspace(0.25, 0.75, min(k, 3))
            return np.asarray([self.a + t * (self.b - self.a) for t in ts])
        if self.kind == "point_cloud":
            idx = np.linspace(0, self.points.shape[0] - 1, min(k, self.points.shape[0])
                              ).astype(int)
            return self.points[idx]
        pts = [m.base_points(max(1, k // len(self.members))) for m in self.members]
        return np.vstack(pts)[:k]

    def sample_in_ball(self, x: np.ndarray, R: float, spacing: float) -> np.ndarray:
        """spacing-dense sample of E cap closed B_R(x); raises on unsupported kinds."""
        x = np.asarray(x, dtype=float)
        if self.kind == "point":
            d = float(np.linalg.norm(self.point - x))
            return self.point[None, :] if d <= R else np.empty((0, self.N))
        if self.kind == "hyperplane":
            xp = x - (float(x @ self.normal) - self.offset) * self.normal
            basis = _orthobasis(self.normal)
            lat = _disk_lattice(basis.shape[0], R, spacing)
            pts = xp[None, :] + lat @ basis
            return pts[np.linalg.norm(pts - x, axis=1) <= R]
        if self.kind == "segment":
            ab = self.b - self.a
            L = float(np.linalg.norm(ab))
            ts = np.arange(0.0, L + spacing, spacing) / L
            ts = np.clip(ts, 0.0, 1.0)
            pts = self.a[None, :] + ts[:, None] * ab
            return pts[np.linalg.norm(pts - x, axis=1) <= R]
        if self.kind == "sphere":
            if self.N != 3:
                raise UnsupportedSetError("sphere sampling implemented for N=3")
            return _sphere_cap_sample(self.center, self.radius, x, R, spacing)
        if self.kind == "point_cloud":
            d = np.linalg.norm(self.points - x, axis=1)
            return self.points[d <= R]
        if self.kind == "union":
            parts = [m.sample_in_ball(x, R, spacing) for m in self.members]
            return np.vstack([p for p in parts if p.size] or
                             [np.empty((0, self.N))])
        raise UnsupportedSetError(self.kind)

    def label(self) -> str:
        return self.kind


def _orthobasis(normal: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to ``normal``."""
    N = normal.size
    M = np.eye(N) - np.outer(normal, normal)
    q, r = np.linalg.qr(M)
    cols = np.abs(np.diag(r)) > 1e-10
    return q[:, cols].T[: N - 1]


def _disk_lattice(dim: int, R: float, spacing: float) -> np.ndarray:
    n = int(math.floor(R / spacing))
    axes = [np.arange(-n, n + 1) * spacing] * dim
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    return pts[np.linalg.norm(pts, axis=1) <= R]


def _sphere_cap_sample(center: np.ndarray, rad: float, x: np.ndarray, R: float,
                       spacing: float) -> np.ndarray:
    """Ring sample of {|z - center| = rad} cap B_R(x) for N = 3."""
    u = (x - center) / rad
    # polar angle range around u covered by the cap
    cos_th = 1.0 - min(R**2 / (2 * rad**2), 2.0)
    th_max = math.acos(max(-1.0, cos_th))
    d_ang = spacing / rad
    n_th = max(2, int(math.ceil(th_max / d_ang)) + 1)
    thetas = np.linspace(0.0, th_max, n_th)
    # frame (u, e1, e2)
    a = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(u, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    pts = []
    for th in thetas:
        ring_r = rad * math.sin(th)
        n_phi = max(1, int(math.ceil(2 * math.pi * ring_r / spacing)))
        phis = 2 * math.pi * np.arange(n_phi) / n_phi
        ring = (center[None, :] + rad * math.cos(th) * u[None, :]
                + ring_r * (np.cos(phis)[:, None] * e1[None, :]
                            + np.sin(phis)[:, None] * e2[None, :]))
        pts.append(ring)
    pts = np.vstack(pts)
    return pts[np.linalg.norm(pts - x, axis=1) <= R]


# ---------------------------------------------------------------------------
# covering numbers and dimension
# ---------------------------------------------------------------------------

def distance_to_set(E: ClosedSet, x) -> float:
    """delta_E(x) for a single point."""
    return float(E.distance(np.atleast_2d(x))[0])


def covering_number_bounds(E: ClosedSet, x, R: float, r: float,
                           spacing: Optional[float] = None) -> Tuple[int, int]:
    """(lower, upper) bracket for eta(E cap B_R(x), r).

    Preconditions: 0 < r < R and, unless diam(E) = 0, R < diam(E).
    """
    diam = E.diameter()
    if diam == 0.0:
        return (1, 1) if E.distance(np.atleast_2d(x))[0] <= 1e-12 else (0, 0)
    if not (0 < r < R):
        raise ValueError("need 0 < r < R")
    if R >= diam:
        raise ValueError("need R < diam(E)")
    if spacing is None:
        spacing = r / 4.0
    pts = E.sample_in_ball(np.asarray(x, dtype=float), R, spacing)
    if pts.shape[0] == 0:
        return (0, 0)
    N = E.N
    cell_u = (r - spacing) / math.sqrt(N)
    if cell_u <= 0:
        raise ValueError("spacing must stay below r")
    upper = _occupied_cells(pts, cell_u)
    lower = _best_parity_cells(pts, 2.0 * r)
    return int(lower), int(upper)


def _cell_keys(pts: np.ndarray, cell: float) -> np.ndarray:
    """Collapse integer cell coordinates to unique 1-d keys (fast np.unique)."""
    idx = np.floor(pts / cell).astype(np.int64)
    idx -= idx.min(axis=0)
    spans = idx.max(axis=0) + 1
    key = idx[:, 0]
    for j in range(1, idx.shape[1]):
        key = key * spans[j] + idx[:, j]
    return np.unique(key), idx


def _occupied_cells(pts: np.ndarray, cell: float) -> int:
    keys, _ = _cell_keys(pts, cell)
    return int(keys.size)


def _best_parity_cells(pts: np.ndarray, cell: float) -> int:
    idx = np.floor(pts / cell).astype(np.int64)
    idx -= idx.min(axis=0)
    half = idx >> 1
    spans = half.max(axis=0) + 1
    key = half[:, 0]
    code = idx[:, 0] & 1
    for j in range(1, idx.shape[1]):
        key = key * spans[j] + half[:, j]
        code = (code << 1) | (idx[:, j] & 1)
    # count distinct half-resolution cells within each parity class
    combo = key * (1 << idx.shape[1]) + code
    uniq = np.unique(combo)
    counts = np.bincount((uniq & ((1 << idx.shape[1]) - 1)).astype(np.int64),
                         minlength=1 << idx.shape[1])
    return int(counts.max()) if counts.size else 0


@dataclass
class SamplingConfig:
    """Scale schedule for dimension estimates: base points and R/r ratios."""

    n_base_points: int = 3
    ratios: np.ndarray = field(default_factory=lambda: np.geomspace(3.0, 300.0, 10))
    R: Optional[float] = None
    spacing_factor: float = 3.0

    def pick_R(self, E: ClosedSet) -> float:
        if self.R is not None:
            return self.R
        d = E.diameter()
        return 1.0 if math.isinf(d) else 0.45 * d


@dataclass
class AssouadEstimate:
    dim: float
    regression_table: List[tuple]   # (base_index, R, r, lower, upper)
    confidence: float               # spread of per-pair exponents
    per_base_slopes: List[float]

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["base_point", "R", "r", "eta_lower", "eta_upper"])
            for row in self.regression_table:
                w.writerow(row)


def assouad_dimension(E: ClosedSet, sampling: Optional[SamplingConfig] = None
                      ) -> AssouadEstimate:
    """Log-log slope estimate of the Assouad dimension over sampled scales.

    The dimension is the max over base points of the least-squares slope of
    log(upper count) against log(R/r); ``confidence`` is the spread of the
    per-pair exponents.  Requires at least 3 scale ratios.  The sup in the
    definition runs over all centers and scales, so this is a lower estimate
    of the true value; it is exact for singletons.
    """
    sampling = sampling or SamplingConfig()
    ratios = np.asarray(sampling.ratios, dtype=float)
    if ratios.size < 3:
        raise ValueError("need at least 3 radius ratios")
    if E.kind == "point" or E.diameter() == 0.0:
        table = [(0, 1.0, 1.0 / rho, 1, 1) for rho in ratios]
        return AssouadEstimate(0.0, table, 0.0, [0.0])
    R = sampling.pick_R(E)
    bases = E.base_points(sampling.n_base_points)
    table = []
    slopes = []
    pair_exps = []
    for bi, x in enumerate(bases):
        ups = []
        for rho in ratios:
            r = R / rho
            lo, up = covering_number_bounds(E, x, R, r,
                                            spacing=r / sampling.spacing_factor)
            table.append((bi, R, r, lo, up))
            ups.append(max(up, 1))
        ups = np.asarray(ups, dtype=float)
        lr = np.log(ratios)
        lu = np.log(ups)
        slope = float(np.polyfit(lr, lu, 1)[0])
        slopes.append(max(slope, 0.0))
        pair_exps.extend(np.diff(lu) / np.diff(lr))
    dim = min(max(slopes), float(E.N))
    spread = float(np.max(pair_exps) - np.min(pair_exps)) if pair_exps else 0.0
    return AssouadEstimate(dim, table, spread, slopes)


def porosity_constant(E: ClosedSet, n_base_points: int = 4,
                      radii: Optional[Sequence[float]] = None,
                      lattice: int = 10,
                      base_points: Optional[np.ndarray] = None) -> tuple:
    """Largest alpha with a hole B_{alpha r}(y) in every sampled B_r(x) \\ E.

    Returns (alpha, witness); witness is the failing (x, r) when alpha == 0.
    alpha > 0 is evidence that the Assouad dimension is below N.  Explicit
    ``base_points`` override the catalog defaults (e.g. to probe interior
    points of a dense cloud).
    """
    diam = E.diameter()
    if radii is None:
        # the diameter restriction is dropped for singletons
        top = 0.8 if (math.isinf(diam) or diam == 0.0) else 0.4 * diam
        radii = np.geomspace(0.05 * top, top, 5)
    bases = E.base_points(n_base_points) if base_points is None else \
        np.atleast_2d(np.asarray(base_points, dtype=float))
    offs = _disk_lattice(E.N, 1.0, 1.0 / lattice)
    best = math.inf
    witness = None
    for x in bases:
        for r in radii:
            ys = x[None, :] + r * offs
            d = E.distance(ys)
            room = r - np.linalg.norm(ys - x[None, :], axis=1)
            alpha_xr = float(np.max(np.minimum(d, room)) / r)
            if alpha_xr <= 0 and witness is None:
                witness = (x.copy(), float(r))
            best = min(best, max(alpha_xr, 0.0))
    return (0.0 if witness is not None else best,
            witness)


# ---------------------------------------------------------------------------
# admissible exponent windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentWindow:
    """Admissible Hardy-exponent interval for a set of dimension d.

    ``conditions`` lists the two capacitary-inequality hypotheses that produce
    the endpoints, instantiated at (N, p, d); for the second-order window the
    gradient-to-Hessian step contributes an additional pair.
    """

    lo: float
    hi: float
    feasible: bool
    order: str
    conditions: tuple

    @property
    def empty(self) -> bool:
        return not self.feasible or self.lo >= self.hi

    def contains(self, a: float) -> bool:
        return self.feasible and self.lo < a < self.hi


def admissible_exponent_range(N: int, p: float, d: float,
                              order: str = "first") -> ExponentWindow:
    """Admissible exponent window for distance-weighted log-Hardy functionals.

    first order:  a in ( -(N-d)(p-1)/p , (N-p)(N-d)/(N p) );
    second order: a in ( 1-(N-d)(p-1)/p , (N-p)(N-d)/(N p) ), requiring
    p < N/2 and feasibility d < N(N-2p)/(N-p); an infeasible d yields an
    explicit infeasible window rather than an exception.
    """
    if N < 3 or not (1.0 < p < N):
        raise ValueError("need N >= 3 and 1 < p < N")
    if not (0.0 <= d <= N):
        raise ValueError("dimension must be in [0, N]")
    hi = (N - p) * (N - d) / (N * p)
    if order == "first":
        lo = -(N - d) * (p - 1.0) / p
        conds = (
            f"covering dimension d < (p*/p)(N-p-pa)  =>  a < {hi:.6g}",
            f"covering dimension d < N + pa/(p-1)    =>  a > {lo:.6g}",
        )
        return ExponentWindow(lo, hi, True, "first", conds)
    if order != "second":
        raise ValueError("order must be 'first' or 'second'")
    if not (p < N / 2.0):
        raise ValueError("second order requires p < N/2")
    lo = 1.0 - (N - d) * (p - 1.0) / p
    threshold = N * (N - 2.0 * p) / (N - p)
    feasible = d < threshold
    conds = (
        f"covering dimension d < (p*/p)(N-p-pa)   =>  a < {hi:.6g}",
        f"covering dimension d < N-p+(1-a)p       =>  a < {(N - d) / p:.6g}",
        f"covering dimension d < N-(1-a)p/(p-1)   =>  a > {lo:.6g}",
        f"feasibility d < N(N-2p)/(N-p) = {threshold:.6g}: {feasible}",
    )
    return ExponentWindow(lo, hi, feasible, "second", conds)
