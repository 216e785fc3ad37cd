"""Command-line entry point: scenario orchestration and reproducible reports.

Subcommands: verify, best-constant, capacity, assouad, sweep.  A scenario is a
declarative JSON config (``--config``) plus flag overrides; identical configs
and seeds produce byte-identical JSON/CSV outputs (no timestamps; every record
embeds the sha256 of the resolved config).  Exit status 0 means every asserted
residual cleared its error budget; 1 flags numerical failures; 2 is a usage or
parameter-window error naming the violated hypothesis.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .bestconst import OptConfig, concentration_diagnostic, multistart_minimize
from .capacity import (CompactSet, ball_capacity, capacity_grid, default_ball_family,
                       mazya_constant, mazya_norm_lower_bound, variational_capacity)
from .geometry import ClosedSet, SamplingConfig, assouad_dimension, porosity_constant
from .grids import (CylindricalGrid, GridFunction, ParameterError, Params,
                    RadialGrid)
from .inequalities import (InequalityReport, classical_report,
                           entropy_interpolation_report, log_hardy_report,
                           report_csv_row, CSV_HEADER)
from .weights import Weight, cylindrical_critical_weight, scale_invariant_power_weight

__all__ = ["ScenarioConfig", "run_scenario", "build_parser", "main"]


@dataclass
class ScenarioConfig:
    command: str = "verify"
    ineq: str = "wls"                 # wls | log-hardy | log-hardy-2 | mazya |
                                      # hardy | log-sobolev | lorentz-sobolev
    weight: str = "g1"                # g1 | g2 | g2-trunc | power:<alpha> | one
    set: str = "point"                # point | sphere | hyperplane | segment
    N: int = 3
    p: float = 2.0
    r: Optional[float] = None
    a: float = 0.0
    gamma: Optional[float] = None
    grid_nodes: int = 4096
    rmin: float = 1e-6
    rmax: float = 50.0
    seed: int = 0
    out: str = "reports"
    window_policy: str = "warn"       # warn | fail
    radius: float = 1.0               # capacity target radius
    set_kind: str = "ball"            # capacity target kind
    sweep: list = field(default_factory=list)   # list of override dicts
    workers: int = 1

    def resolved(self) -> dict:
        """Scenario identity: every semantic field; delivery details (output
        directory, worker count) are excluded so identical scenarios hash and
        serialize identically wherever they are written."""
        d = asdict(self)
        d.pop("out", None)
        d.pop("workers", None)
        return d

    def config_hash(self) -> str:
        payload = json.dumps(self.resolved(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def params(self, need_r: bool = False, need_gamma: bool = False) -> Params:
        return Params(self.N, self.p, r=self.r, a=self.a, gamma=self.gamma
                      ).validate(need_r=need_r, need_gamma=need_gamma)


class UsageError(ValueError):
    pass


def _load_config(args: argparse.Namespace) -> ScenarioConfig:
    cfg = ScenarioConfig()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        for k, v in data.items():
            if not hasattr(cfg, k):
                raise UsageError(f"unknown config key {k!r}")
            setattr(cfg, k, v)
    for k in ("ineq", "weight", "set", "N", "p", "r", "a", "gamma", "grid_nodes",
              "rmin", "rmax", "seed", "out", "window_policy", "radius",
              "set_kind", "workers"):
        v = getattr(args, k, None)
        if v is not None:
            setattr(cfg, k, v)
    cfg.command = args.command
    return cfg


def _make_weight(cfg: ScenarioConfig) -> Weight:
    P = cfg.params(need_r=cfg.weight in ("g1", "g2", "g2-trunc"))
    if cfg.weight == "g1":
        return scale_invariant_power_weight(P)
    if cfg.weight == "g2":
        return cylindrical_critical_weight(P)
    if cfg.weight == "g2-trunc":
        return cylindrical_critical_weight(P, truncated=True)
    if cfg.weight == "one":
        return Weight.constant_one()
    if cfg.weight.startswith("power:"):
        return Weight.power(float(cfg.weight.split(":", 1)[1]))
    if cfg.weight.startswith("trunc-power:"):
        alpha, cut = cfg.weight.split(":", 1)[1].split(",")
        return Weight.truncated_power(float(alpha), float(cut))
    raise UsageError(f"unknown weight {cfg.weight!r}")


def _make_set(cfg: ScenarioConfig) -> ClosedSet:
    if cfg.set == "point":
        return ClosedSet.origin(cfg.N)
    if cfg.set == "sphere":
        return ClosedSet.sphere(np.zeros(cfg.N), 1.0)
    if cfg.set == "hyperplane":
        n = np.zeros(cfg.N)
        n[-1] = 1.0
        return ClosedSet.hyperplane(n)
    if cfg.set == "segment":
        a = np.zeros(cfg.N)
        b = np.zeros(cfg.N)
        a[0], b[0] = -1.0, 1.0
        return ClosedSet.segment(a, b)
    raise UsageError(f"unknown set {cfg.set!r}")


def _test_profile(cfg: ScenarioConfig, cylindrical: bool = False) -> GridFunction:
    if cylindrical:
        grid = CylindricalGrid.geometric(max(cfg.rmin, 1e-5), min(cfg.rmax, 20.0),
                                         min(cfg.grid_nodes, 512), N=cfg.N)
        return GridFunction.from_profile(
            grid, lambda r, t: np.exp(-(r**2 + t**2) / 2.0), kind="cylindrical")
    grid = RadialGrid.geometric(cfg.rmin, cfg.rmax, cfg.grid_nodes, N=cfg.N)
    return GridFunction.from_profile(grid, lambda s: np.exp(-(s**2) / 2.0))


def _emit(out_dir: Path, name: str, reports, cfg: ScenarioConfig,
          extra: Optional[dict] = None) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    chash = cfg.config_hash()
    records = []
    for rep in reports:
        rec = rep.to_record() if isinstance(rep, InequalityReport) else rep
        rec["config_hash"] = chash
        records.append(rec)
    payload = {"config": cfg.resolved(), "config_hash": chash, "records": records}
    if extra:
        payload.update(extra)
    (out_dir / f"{name}.json").write_text(json.dumps(payload, sort_keys=True,
                                                     indent=1) + "\n")
    rows = [CSV_HEADER + ",config_hash"]
    for rep in reports:
        if isinstance(rep, InequalityReport):
            rows.append(report_csv_row(rep) + f",{chash}")
    if len(rows) > 1:
        (out_dir / f"{name}.csv").write_text("\n".join(rows) + "\n")


def _verify(cfg: ScenarioConfig) -> int:
    out = Path(cfg.out)
    ineq = cfg.ineq
    status = 0
    if ineq == "wls":
        P = cfg.params(need_r=True)
        g = _make_weight(cfg)
        u = _test_profile(cfg, cylindrical=not g.is_radial)
        norm = None
        if g.kind in ("power", "truncated_power"):
            fam = default_ball_family(cfg.N)
            norm = mazya_norm_lower_bound(g, cfg.p, cfg.r, fam, cfg.N).lower_bound
        rep = entropy_interpolation_report(u, g, cfg.p, cfg.r, mazya_norm=norm)
        ok = rep.residual >= -max(rep.error_budget, 1e-12)
        _emit(out, "verify_wls", [rep], cfg)
        status = 0 if ok else 1
    elif ineq in ("log-hardy", "log-hardy-2"):
        E = _make_set(cfg)
        order = "first" if ineq == "log-hardy" else "second"
        u = _test_profile(cfg, cylindrical=(cfg.set == "hyperplane"))
        if cfg.set == "sphere":
            grid = u.grid
            u = GridFunction.from_profile(
                grid, lambda s: np.exp(-(s**2) / 2.0) * np.clip(
                    np.abs(s - 1.0) / 0.2, 0.0, 1.0) ** 3)
        rep = log_hardy_report(u, E, cfg.p, cfg.a, order=order)
        warn = rep.flags.get("warning")
        if warn:
            print(f"warning: {warn}", file=sys.stderr)
        ok = rep.residual >= -max(rep.error_budget, 1e-12)
        _emit(out, f"verify_{ineq}", [rep], cfg)
        status = 0 if ok else 1
        if warn and cfg.window_policy == "fail":
            status = max(status, 1)
    elif ineq == "mazya":
        cfg.params(need_r=True)
        g = _make_weight(cfg)
        fam = default_ball_family(cfg.N)
        mn = mazya_norm_lower_bound(g, cfg.p, cfg.r, fam, cfg.N)
        out.mkdir(parents=True, exist_ok=True)
        mn.to_csv(out / "mazya_ratios.csv")
        payload = {"config": cfg.resolved(), "config_hash": cfg.config_hash(),
                   "lower_bound": mn.lower_bound, "divergent": mn.divergent,
                   "C_H": mazya_constant(cfg.p)}
        (out / "mazya.json").write_text(json.dumps(payload, sort_keys=True,
                                                   indent=1) + "\n")
        status = 1 if mn.divergent else 0
    elif ineq in ("hardy", "log-sobolev", "lorentz-sobolev"):
        kind = {"hardy": "hardy", "log-sobolev": "log_sobolev_lp",
                "lorentz-sobolev": "lorentz_sobolev"}[ineq]
        cfg.params()
        u = _test_profile(cfg)
        rep = classical_report(u, kind, cfg.N, cfg.p)
        ok = rep.residual >= -1e-9 * max(abs(rep.lhs), abs(rep.rhs), 1.0)
        _emit(out, f"verify_{ineq}", [rep], cfg)
        status = 0 if ok else 1
    else:
        raise UsageError(f"unknown inequality {ineq!r}")
    return status


def _best_constant(cfg: ScenarioConfig) -> int:
    P = cfg.params(need_r=True, need_gamma=True)
    g = _make_weight(cfg)
    if not g.is_radial:
        raise UsageError("best-constant search needs a radial weight")
    grid = RadialGrid.geometric(cfg.rmin, cfg.rmax, min(cfg.grid_nodes, 2048),
                                N=cfg.N)
    opt = OptConfig(seed=cfg.seed)
    trace = multistart_minimize(g, cfg.p, cfg.gamma, grid, opt,
                                gamma_floor=P.gamma_floor)
    fam = default_ball_family(cfg.N)
    norm = mazya_norm_lower_bound(g, cfg.p, cfg.r, fam, cfg.N).lower_bound
    ch = mazya_constant(cfg.p)
    qstar = trace.best_Q
    diag = concentration_diagnostic(trace, g, cfg.p, grid)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, a_n in enumerate(diag):
        trace.iterates[i]["concentration"] = a_n
    trace.to_csv(out / "best_constant_trace.csv")
    payload = {
        "config": cfg.resolved(), "config_hash": cfg.config_hash(),
        "Q_star": qstar,
        "best_constant_lower_bound": 1.0 / qstar,
        "bound_p_over_r": ch * norm ** (cfg.p / cfg.r),
        "bound_linear": ch * norm,
        "mazya_ball_bound": norm,
        "consistency_product": qstar * ch * norm ** (cfg.p / cfg.r),
        "status": trace.status,
        "accepted_steps": trace.accepted_steps,
    }
    (out / "best_constant.json").write_text(json.dumps(payload, sort_keys=True,
                                                       indent=1) + "\n")
    return 0 if payload["consistency_product"] >= 1.0 - 1e-3 else 1


def _capacity(cfg: ScenarioConfig) -> int:
    if cfg.set_kind == "ball":
        F = CompactSet.ball(np.zeros(cfg.N), cfg.radius)
    elif cfg.set_kind == "cube":
        F = CompactSet.cube(np.zeros(cfg.N), cfg.radius)
    elif cfg.set_kind == "annulus":
        F = CompactSet.annulus(cfg.radius / 2.0, cfg.radius)
    else:
        raise UsageError(f"unknown capacity set kind {cfg.set_kind!r}")
    cfg.params()
    grid = capacity_grid(F, cfg.N, n=cfg.grid_nodes)
    est = variational_capacity(F, grid, cfg.p)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    est.to_csv(out / "capacity_convergence.csv")
    payload = {"config": cfg.resolved(), "config_hash": cfg.config_hash(),
               "estimate": est.value, "kind": est.kind, "status": est.status,
               "convergence": est.convergence}
    if cfg.set_kind == "ball":
        payload["closed_form"] = ball_capacity(cfg.N, cfg.p, cfg.radius)
        payload["relative_gap"] = est.value / payload["closed_form"] - 1.0
    (out / "capacity.json").write_text(json.dumps(payload, sort_keys=True,
                                                  indent=1) + "\n")
    ok = est.status == "converged"
    if cfg.set_kind == "ball":
        ok = ok and abs(payload["relative_gap"]) <= 0.02
    return 0 if ok else 1


def _assouad(cfg: ScenarioConfig) -> int:
    E = _make_set(cfg)
    est = assouad_dimension(E, SamplingConfig())
    alpha, witness = porosity_constant(E)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    est.to_csv(out / "assouad_table.csv")
    payload = {"config": cfg.resolved(), "config_hash": cfg.config_hash(),
               "dim": est.dim, "confidence_spread": est.confidence,
               "per_base_slopes": est.per_base_slopes,
               "porosity_alpha": alpha,
               "porosity_witness": None if witness is None else
               [list(map(float, witness[0])), witness[1]]}
    (out / "assouad.json").write_text(json.dumps(payload, sort_keys=True,
                                                 indent=1) + "\n")
    return 0


def _sweep_one(payload: str) -> tuple:
    cfg = ScenarioConfig(**json.loads(payload))
    try:
        code = _verify(cfg)
    except (UsageError, ParameterError) as exc:
        return 2, str(exc)
    return code, cfg.config_hash()


def _sweep(cfg: ScenarioConfig) -> int:
    if not cfg.sweep:
        raise UsageError("sweep requires a 'sweep' list in the config file")
    jobs = []
    for i, override in enumerate(cfg.sweep):
        sub = ScenarioConfig(**{**asdict(cfg), "sweep": [],
                                "command": "verify", **override})
        sub.out = str(Path(cfg.out) / f"sweep_{i:03d}")
        jobs.append(json.dumps(asdict(sub), sort_keys=True))
    if cfg.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["index,exit_code,config_hash"]
    worst = 0
    for i, (code, tag) in enumerate(results):
        lines.append(f"{i},{code},{tag}")
        worst = max(worst, code)
    (out / "sweep_summary.csv").write_text("\n".join(lines) + "\n")
    return worst


def run_scenario(cfg: ScenarioConfig) -> int:
    """Execute one scenario; returns the process exit status."""
    np.random.seed(cfg.seed % (2**32))
    dispatch = {"verify": _verify, "best-constant": _best_constant,
                "capacity": _capacity, "assouad": _assouad, "sweep": _sweep}
    if cfg.command not in dispatch:
        raise UsageError(f"unknown command {cfg.command!r}")
    return dispatch[cfg.command](cfg)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="logineq",
        description="Numerical laboratory for weighted logarithmic Sobolev, "
                    "Hardy and Lorentz-Sobolev inequalities")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("verify", "best-constant", "capacity", "assouad", "sweep"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="JSON scenario file")
        sp.add_argument("--ineq", default=None)
        sp.add_argument("--weight", default=None)
        sp.add_argument("--set", default=None)
        sp.add_argument("--N", type=int, default=None)
        sp.add_argument("--p", type=float, default=None)
        sp.add_argument("--r", type=float, default=None)
        sp.add_argument("--a", type=float, default=None)
        sp.add_argument("--gamma", type=float, default=None)
        sp.add_argument("--grid-nodes", dest="grid_nodes", type=int, default=None)
        sp.add_argument("--rmin", type=float, default=None)
        sp.add_argument("--rmax", type=float, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--window-policy", dest="window_policy", default=None,
                        choices=("warn", "fail"))
        sp.add_argument("--radius", type=float, default=None)
        sp.add_argument("--set-kind", dest="set_kind", default=None)
        sp.add_argument("--workers", type=int, default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        return run_scenario(cfg)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
