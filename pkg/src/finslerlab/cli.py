"""Batch experiment runner: metric validation, curvature and geodesic reports,
volume tables and the identity verification suite.

Outputs are deterministic for a fixed config and seed: CSV for tables, JSON
for suite reports, each embedding the resolved configuration.  Exit codes:
0 all checks pass, 1 check failure, 2 usage or config error, 3 numerical
integrity error (independent routes disagree).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import comparison, curvature, measures
from ._grids import halton_directions
from .errors import (
    ConfigurationError,
    FinslerError,
    NumericalIntegrityError,
)
from .geodesics import integrate_geodesic, parallel_transport
from .metrics import (
    MetricSpec,
    chart_points,
    make_metric,
    okada_residual,
    validate_metric,
)
from .minkowski import (
    TangentSample,
    bh_density,
    cartan_tensor,
    fundamental_tensor,
    santalo_volume,
)

CSV_VERSION = "finslerlab csv v1"

_CONFIG_KEYS = {
    "metric", "dim", "domain", "variant", "c", "eps", "seed", "samples",
    "mc_samples", "out_dir", "radii", "t_end", "t_points", "start", "direction",
    "lam", "delta", "checks", "tolerances",
}

_DEFAULTS = {
    "metric": "funk",
    "dim": 2,
    "domain": None,
    "variant": None,
    "c": None,
    "eps": None,
    "seed": 20240817,
    "samples": 20,
    "mc_samples": 1_000_000,
    "out_dir": None,
    "radii": [0.5, 1.0, 2.0],
    "t_end": 3.0,
    "t_points": 31,
    "start": None,
    "direction": None,
    "lam": None,
    "delta": None,
    "checks": None,
    "tolerances": {},
}


def resolve_config(args) -> dict:
    cfg = dict(_DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - _CONFIG_KEYS
        if unknown:
            raise ConfigurationError(
                f"unknown config keys: {', '.join(sorted(unknown))}"
            )
        cfg.update(loaded)
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["metric"] == "berwald_product":
        cfg["dim"] = 3  # the product chart is three-dimensional
    return cfg


def build_metric(cfg) -> MetricSpec:
    name = cfg["metric"]
    kw = {}
    if name in ("euclidean", "riemannian_sphere", "riemannian_hyperbolic",
                "quartic_norm", "randers", "funk", "hilbert"):
        kw["n"] = int(cfg["dim"])
    if name in ("funk", "hilbert") and cfg["domain"]:
        kw["domain"] = cfg["domain"]
    if name == "quartic_norm" and cfg["eps"] is not None:
        kw["eps"] = float(cfg["eps"])
    if name == "randers":
        if cfg["variant"]:
            kw["variant"] = cfg["variant"]
        if cfg["c"] is not None:
            kw["c"] = float(cfg["c"])
    if name == "berwald_product" and cfg["c"] is not None:
        kw["c"] = float(cfg["c"])
    return make_metric(name, **kw)


def _out_dir(cfg):
    out = cfg.get("out_dir") or os.environ.get("FINSLERLAB_OUTDIR") or "finslerlab_runs"
    os.makedirs(out, exist_ok=True)
    return out


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _config_json(cfg):
    clean = {k: v for k, v in cfg.items() if v is not None}
    return json.dumps(clean, sort_keys=True, separators=(",", ":"))


def write_csv(path, kind, columns, rows, cfg):
    with open(path, "w") as fh:
        fh.write(f"# {CSV_VERSION} kind={kind}\n")
        fh.write(f"# config: {_config_json(cfg)}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# Verification suite
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    check_id: str
    anchor: str
    status: str  # pass | fail | skipped
    value: float | None
    tolerance: float | None
    runtime: float = 0.0


@dataclass
class SuiteReport:
    checks: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def n_failures(self):
        return sum(1 for c in self.checks if c.status == "fail")

    def to_payload(self):
        # runtimes are intentionally left out so equal configs give
        # byte-identical reports
        return {
            "config": {k: v for k, v in self.config.items() if v is not None},
            "checks": [
                {
                    "id": c.check_id,
                    "anchor": c.anchor,
                    "status": c.status,
                    "value": c.value,
                    "tolerance": c.tolerance,
                }
                for c in self.checks
            ],
            "failures": self.n_failures,
        }


def _samples_for(metric, count, seed, y_scale=1.0):
    pts = chart_points(metric, count)
    dirs = halton_directions(metric.n, count) * y_scale
    return [TangentSample(x, d) for x, d in zip(pts, dirs)]


_EXPECTED_KAPPA = {
    "funk": (-0.25, 1e-6),
    "hilbert": (-1.0, 1e-5),
    "riemannian_sphere": (1.0, 1e-6),
    "riemannian_hyperbolic": (-1.0, 1e-6),
    "euclidean": (0.0, 1e-8),
    "quartic_norm": (0.0, 1e-8),
}


def _check_okada(metric, cfg):
    samples = _samples_for(metric, 50, cfg["seed"])
    worst = max(float(np.max(np.abs(okada_residual(metric, s.x, s.y))))
                for s in samples)
    return worst, 1e-8


def _check_homogeneity(metric, cfg):
    samples = _samples_for(metric, cfg["samples"], cfg["seed"])
    worst = 0.0
    for s in samples:
        F = metric.F(s.x, s.y)
        for lam in (0.5, 2.0):
            worst = max(worst, abs(metric.F(s.x, lam * s.y) - lam * F) / max(F, 1e-12))
    return worst, 1e-10


def _check_definiteness(metric, cfg):
    samples = _samples_for(metric, cfg["samples"], cfg["seed"])
    min_eig = np.inf
    for s in samples:
        ft = fundamental_tensor(metric, s)
        min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(ft.g))))
    # passes when the smallest eigenvalue stays positive
    return -min_eig, 0.0


def _check_jb(metric, cfg):
    samples = _samples_for(metric, cfg["samples"], cfg["seed"])
    worst = 0.0
    for s in samples:
        bt = curvature.berwald_curvature(metric, s)
        L = curvature.landsberg_from_berwald(metric, s, bt)
        ft = fundamental_tensor(metric, s)
        gy = ft.g @ s.y
        resid = L + 0.5 * np.einsum("mijk,m->ijk", bt.B, gy)
        worst = max(worst, float(np.max(np.abs(resid)) / (1.0 + bt.norm())))
    return worst, 1e-6


def _check_es(metric, cfg):
    samples = _samples_for(metric, min(cfg["samples"], 10), cfg["seed"])
    worst = max(curvature.es_residual(metric, s) for s in samples)
    return worst, 1e-5


def _check_ll(metric, cfg):
    samples = _samples_for(metric, cfg["samples"], cfg["seed"])
    worst = 0.0
    for s in samples:
        L = curvature.landsberg_from_berwald(metric, s)
        C = cartan_tensor(metric, s)
        F = metric.F(s.x, s.y)
        worst = max(worst, float(np.max(np.abs(L + 0.5 * F * C))))
    return worst, 1e-4


def _check_kk(metric, cfg):
    samples = _samples_for(metric, min(cfg["samples"], 6), cfg["seed"])
    worst = 0.0
    for s in samples:
        Ld = curvature.landsberg_dot(metric, s)
        C = cartan_tensor(metric, s)
        F = metric.F(s.x, s.y)
        worst = max(worst, float(np.max(np.abs(Ld - F * F * C))))
    return worst, 1e-4


def _check_flag_curvature(metric, cfg):
    kappa, tol = _EXPECTED_KAPPA[metric.name]
    samples = _samples_for(metric, cfg["samples"], cfg["seed"])
    worst = 0.0
    for s in samples:
        rep = curvature.riemann_curvature(metric, s)
        worst = max(worst, float(np.max(np.abs(rep.principal - kappa))))
    return worst, tol


def _check_funk_s(metric, cfg):
    samples = _samples_for(metric, cfg["samples"], cfg["seed"])
    worst = 0.0
    for s in samples:
        sd = curvature.s_curvature(metric, s, method="analytic")
        F = metric.F(s.x, s.y)
        worst = max(worst, abs(sd.S - (metric.n + 1) / 2.0 * F))
    return worst, 1e-6


def _check_funk_e(metric, cfg):
    samples = _samples_for(metric, cfg["samples"], cfg["seed"])
    n = metric.n
    worst = 0.0
    for s in samples:
        bt = curvature.berwald_curvature(metric, s)
        ft = fundamental_tensor(metric, s)
        F = ft.F
        gy = ft.g @ s.y
        formula = (n + 1) / (4 * F ** 3) * (F * F * ft.g - np.outer(gy, gy))
        worst = max(worst, float(np.max(np.abs(bt.E - formula))))
    return worst, 1e-6


def _check_ball_formula(metric, cfg):
    est = measures.ball_volume(
        metric, measures.BallSpec(np.zeros(metric.n), 1.0, "funk_closed_form"),
        n_samples=cfg["mc_samples"], seed=cfg["seed"],
    )
    target = measures.funk_ball_formula(metric.n, 1.0)
    dev = abs(est.value - target)
    if dev > 3.0 * est.stderr and dev > 0.01 * target:
        return dev / target, 0.01
    return dev / target, max(0.01, 3.0 * est.stderr / target)


def _check_model_equality(metric, cfg):
    n = metric.n
    delta = (n + 1) / (2.0 * (n - 1))
    worst = 0.0
    for r in np.linspace(0.3, 6.0, 20):
        V = comparison.model_volume(-0.25, delta, n, r)
        worst = max(worst, abs(V - measures.funk_ball_formula(n, r)))
    return worst, 1e-8


def _check_santalo(metric, cfg):
    from ._grids import unit_sphere_area

    vol = santalo_volume(metric)
    target = unit_sphere_area(metric.n)
    if metric.name == "euclidean":
        return abs(vol - target), 1e-5
    # strict inequality with a definite margin for non-Euclidean norms
    margin = target - vol
    return -margin, -1e-4


def _check_cc_fit(metric, cfg):
    kappa, _ = _EXPECTED_KAPPA[metric.name]
    samples = _samples_for(metric, 3, cfg["seed"])
    ts = np.linspace(0.0, 1.5, 16)
    worst = 0.0
    for s in samples:
        fit = curvature.constant_curvature_ode_check(metric, s.x, s.y, kappa, ts)
        worst = max(worst, fit.prediction_error)
    return worst, 1e-4


def _check_dot_lc(metric, cfg):
    kappa, _ = _EXPECTED_KAPPA[metric.name]
    samples = _samples_for(metric, min(cfg["samples"], 6), cfg["seed"])
    worst = 0.0
    for s in samples:
        y = s.y / metric.F(s.x, s.y)
        worst = max(worst,
                    curvature.dot_lc_residual(metric, TangentSample(s.x, y), kappa))
    return worst, 1e-5 if metric.name == "funk" else 1e-4


def _check_projective_pair(metric, cfg):
    if metric.name == "funk":
        other = make_metric("hilbert", n=metric.n, domain=cfg["domain"])
        pair = (metric, other, -0.25, -1.0)
    else:
        other = make_metric("funk", n=metric.n, domain=cfg["domain"])
        pair = (metric, other, -1.0, -0.25)
    F, G, kF, kG = pair
    x = chart_points(metric, 3)[1]
    d = halton_directions(metric.n, 3)[1]
    ts = np.linspace(0.0, 2.0, 41)
    return curvature.projective_ode_check(F, G, kF, kG, x, d, ts), 1e-4


def _check_berwald_flat(metric, cfg):
    samples = _samples_for(metric, cfg["samples"], cfg["seed"])
    worst = 0.0
    for s in samples:
        bt = curvature.berwald_curvature(metric, s)
        worst = max(worst, bt.norm())
    return worst, 1e-8


def _check_berwald_s(metric, cfg):
    samples = _samples_for(metric, min(cfg["samples"], 6), cfg["seed"])
    worst = max(abs(curvature.s_curvature(metric, s, method="geodesic").S)
                for s in samples)
    return worst, 1e-6


def _check_transport_norms(metric, cfg):
    samples = _samples_for(metric, 3, cfg["seed"])
    worst = 0.0
    for s in samples:
        y = s.y / metric.F(s.x, s.y)
        frame = np.eye(metric.n)
        tr = parallel_transport(metric, s.x, y, 2.0, frame)
        for k in range(len(tr.ts)):
            for m in range(metric.n):
                F0 = metric.F(s.x, frame[m])
                Ft = metric.F(tr.path.x[k], tr.frames[k][m])
                worst = max(worst, abs(Ft - F0) / F0)
    return worst, 1e-6


_CHECKS = [
    # (id, anchor string, applies-to predicate, function)
    ("homogeneity_f2a", "F(x, t y) = t F(x, y) for t > 0",
     lambda m: True, _check_homogeneity),
    ("positive_definite_f2b", "g_y positive definite on the slit tangent bundle",
     lambda m: True, _check_definiteness),
    ("jb_identity", "L(u,v,w) = -g(B(u,v,w), y)/2",
     lambda m: True, _check_jb),
    ("es_identity", "E = (1/2) * fiber Hessian of S",
     lambda m: True, _check_es),
    ("okada_pde", "dF/dx^i = F dF/dy^i (Funk)",
     lambda m: m.name == "funk", _check_okada),
    ("ll_funk", "L + (F/2) C = 0 (Funk)",
     lambda m: m.name == "funk", _check_ll),
    ("kk_hilbert", "L-dot - F^2 C = 0 (Hilbert)",
     lambda m: m.name == "hilbert", _check_kk),
    ("flag_curvature", "principal curvatures equal the metric's constant",
     lambda m: m.name in _EXPECTED_KAPPA, _check_flag_curvature),
    ("funk_s_formula", "S = (n+1) F / 2 (Funk)",
     lambda m: m.name == "funk", _check_funk_s),
    ("funk_e_formula", "E = (n+1)/(4F^3) {F^2 g - g(y,.) g(y,.)} (Funk)",
     lambda m: m.name == "funk", _check_funk_e),
    ("ball_formula", "mu(B(x,r)) = n 2^n Vol(B^n) int e^{-(n+1)t} sinh^{n-1} t dt (Funk)",
     lambda m: m.name == "funk" and m.n == 2, _check_ball_formula),
    ("model_equality", "V_{-1/4, (n+1)/(2(n-1))} equals the Funk ball volume",
     lambda m: m.name == "funk", _check_model_equality),
    ("santalo", "indicatrix volume <= Vol(S^(n-1)), equality iff Euclidean",
     lambda m: m.is_minkowski and m.reversible and m.n in (2, 3), _check_santalo),
    ("cc_ode_fit", "C'' + kappa C = 0 along geodesics (closed-form fit)",
     lambda m: m.name in ("funk", "hilbert", "riemannian_sphere",
                          "riemannian_hyperbolic"), _check_cc_fit),
    ("dot_lc", "L-dot + kappa F^2 C = 0 at constant curvature",
     lambda m: m.name in ("funk", "hilbert"), _check_dot_lc),
    ("projective_pair", "phi'' + kappa phi = kappa~ / phi^3 for projectively related pairs",
     lambda m: m.name in ("funk", "hilbert"), _check_projective_pair),
    ("berwald_flat", "B = 0 for Berwald metrics",
     lambda m: m.name == "berwald_product", _check_berwald_flat),
    ("berwald_s_vanishes", "S = 0 for Berwald metrics with the BH measure",
     lambda m: m.name == "berwald_product", _check_berwald_s),
    ("transport_preserves_norms", "parallel transport preserves F on Berwald metrics",
     lambda m: m.name == "berwald_product", _check_transport_norms),
]


def run_verify(cfg) -> SuiteReport:
    metric = build_metric(cfg)
    selected = None
    if cfg.get("checks"):
        selected = set(cfg["checks"].split(",")) if isinstance(cfg["checks"], str) \
            else set(cfg["checks"])
        known = {cid for cid, *_ in _CHECKS}
        bad = selected - known
        if bad:
            raise ConfigurationError(f"unknown check ids: {', '.join(sorted(bad))}")
    report = SuiteReport(config=cfg)
    tol_over = cfg.get("tolerances", {})
    for cid, anchor, applies, fn in _CHECKS:
        if selected is not None and cid not in selected:
            continue
        if not applies(metric):
            report.checks.append(CheckResult(cid, anchor, "skipped", None, None))
            continue
        t0 = time.perf_counter()
        value, tol = fn(metric, cfg)
        tol = tol_over.get(cid, tol)
        status = "pass" if value <= tol else "fail"
        report.checks.append(
            CheckResult(cid, anchor, status, float(value), float(tol),
                        runtime=time.perf_counter() - t0)
        )
    return report


# ---------------------------------------------------------------------------
# Report subcommands
# ---------------------------------------------------------------------------


def run_curvature_report(cfg):
    metric = build_metric(cfg)
    samples = _samples_for(metric, cfg["samples"], cfg["seed"])
    rows = []
    for idx, s in enumerate(samples):
        rep = curvature.riemann_curvature(metric, s)
        rows.append([
            idx, *s.x, *s.y, rep.F, rep.ricci, *rep.principal,
            rep.flag_constant if rep.flag_constant is not None else float("nan"),
            rep.Ry_y_norm, rep.self_adjoint_defect,
        ])
    n = metric.n
    cols = (["i"] + [f"x{k}" for k in range(n)] + [f"y{k}" for k in range(n)]
            + ["F", "ricci"] + [f"kappa{k}" for k in range(n - 1)]
            + ["flag_constant", "Ry_y_rel", "self_adjoint_defect"])
    return cols, rows


def run_geodesic_report(cfg):
    metric = build_metric(cfg)
    n = metric.n
    x0 = cfg["start"] if cfg["start"] is not None else [0.0] * n
    y0 = cfg["direction"] if cfg["direction"] is not None else [1.0] + [0.0] * (n - 1)
    ts = np.linspace(0.0, float(cfg["t_end"]), int(cfg["t_points"]))
    path = integrate_geodesic(metric, x0, y0, float(cfg["t_end"]), t_eval=ts)
    cols = (["t"] + [f"x{k}" for k in range(n)] + [f"xdot{k}" for k in range(n)]
            + ["F"])
    return cols, path.to_rows(), path


def run_volume_report(cfg):
    metric = build_metric(cfg)
    n = metric.n
    lam = cfg["lam"] if cfg["lam"] is not None else (-0.25 if metric.name == "funk" else 0.0)
    delta = cfg["delta"] if cfg["delta"] is not None else (
        (n + 1) / (2.0 * (n - 1)) if metric.name == "funk" else 0.0
    )
    rows = []
    for k, r in enumerate(cfg["radii"]):
        if metric.name in ("funk", "hilbert"):
            source = "funk_closed_form" if metric.name == "funk" else "hilbert_closed_form"
            est = measures.ball_volume(
                metric, measures.BallSpec(np.zeros(n), float(r), source),
                n_samples=cfg["mc_samples"], seed=cfg["seed"] + k,
            )
        else:
            est = measures.ball_volume(
                metric, measures.BallSpec(np.zeros(n), float(r), "geodesic_polar"),
            )
        V = comparison.model_volume(lam, delta, n, float(r))
        rows.append([float(r), est.value, est.stderr, V,
                     est.value / V if V > 0 else float("nan")])
    return ["r", "mu", "stderr", "model_V", "ratio"], rows


def run_compare_report(cfg):
    metric = build_metric(cfg)
    lam = cfg["lam"] if cfg["lam"] is not None else -0.25
    delta = cfg["delta"] if cfg["delta"] is not None else 1.5
    rep = comparison.ratio_monotonicity_check(
        metric, np.zeros(metric.n), lam, delta, cfg["radii"],
        n_samples=cfg["mc_samples"], seed=cfg["seed"],
        sweep_samples=min(cfg["samples"], 50),
    )
    rows = [list(r) for r in rep.rows]
    meta = {
        "monotone_ok": rep.monotone_ok,
        "skipped": rep.skipped,
        "note": rep.note,
        "min_ricci_ratio": rep.precondition.min_ricci_ratio if rep.precondition else None,
        "min_s_ratio": rep.precondition.min_s_ratio if rep.precondition else None,
    }
    return ["r", "mu", "stderr", "model_V", "ratio"], rows, meta


def run_validate(cfg):
    metric = build_metric(cfg)
    validate_metric(metric, n_samples=max(cfg["samples"], 100))
    sigma = bh_density(metric, np.zeros(metric.n))
    return {
        "metric": metric.name,
        "n": metric.n,
        "reversible": metric.reversible,
        "validated_samples": max(cfg["samples"], 100),
        "bh_density_at_origin": sigma,
    }


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--metric", help="metric id from the catalog")
    p.add_argument("--dim", type=int, help="chart dimension")
    p.add_argument("--domain", help="convex domain: unit_ball or quartic:EPS")
    p.add_argument("--variant", help="randers variant: const, closed or curl")
    p.add_argument("--c", type=float, help="randers / berwald 1-form size")
    p.add_argument("--eps", type=float, help="quartic norm perturbation")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="tangent samples per check")
    p.add_argument("--mc-samples", dest="mc_samples", type=int)
    p.add_argument("--out", dest="out_dir", help="output directory")


def _parse_floats(text):
    return [float(v) for v in text.split(",")]


def make_parser():
    ap = argparse.ArgumentParser(
        prog="finslerlab",
        description="curvature, geodesic and volume laboratory for Finsler metrics",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="construction-time metric validity checks")
    _add_common(p)

    p = sub.add_parser("verify", help="run the identity verification suite")
    _add_common(p)
    p.add_argument("--checks", help="comma-separated check ids to run")

    p = sub.add_parser("curvature", help="curvature report over a sample grid")
    _add_common(p)

    p = sub.add_parser("geodesic", help="integrate one geodesic and dump the path")
    _add_common(p)
    p.add_argument("--from", dest="start", type=_parse_floats, help="start point")
    p.add_argument("--dir", dest="direction", type=_parse_floats, help="initial velocity")
    p.add_argument("--t", dest="t_end", type=float, help="integration time")
    p.add_argument("--t-points", dest="t_points", type=int)

    p = sub.add_parser("volume", help="metric-ball volume table")
    _add_common(p)
    p.add_argument("--radii", type=_parse_floats)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--delta", type=float)

    p = sub.add_parser("compare", help="volume-ratio comparison report")
    _add_common(p)
    p.add_argument("--radii", type=_parse_floats)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--delta", type=float)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = resolve_config(args)
        out = _out_dir(cfg)
        tag = f"{cfg['metric']}_n{cfg['dim']}"
        if args.command == "validate":
            payload = run_validate(cfg)
            payload["config"] = {k: v for k, v in cfg.items() if v is not None}
            path = write_json(os.path.join(out, f"validate_{tag}.json"), payload)
            print(f"validation passed; report at {path}")
            return 0
        if args.command == "verify":
            report = run_verify(cfg)
            path = write_json(os.path.join(out, f"verify_{tag}.json"),
                              report.to_payload())
            for c in report.checks:
                line = f"[{c.status.upper():7s}] {c.check_id}: {c.anchor}"
                if c.value is not None:
                    line += f" (value {c.value:.3e}, tol {c.tolerance:.1e})"
                print(line)
            print(f"report at {path}")
            return 1 if report.n_failures else 0
        if args.command == "curvature":
            cols, rows = run_curvature_report(cfg)
            path = write_csv(os.path.join(out, f"curvature_{tag}.csv"),
                             "curvature", cols, rows, cfg)
            print(f"curvature table at {path}")
            return 0
        if args.command == "geodesic":
            cols, rows, path_obj = run_geodesic_report(cfg)
            path = write_csv(os.path.join(out, f"geodesic_{tag}.csv"),
                             "geodesic", cols, rows, cfg)
            note = " (chart exit)" if path_obj.exited else ""
            print(f"geodesic table at {path}{note}")
            return 0
        if args.command == "volume":
            cols, rows = run_volume_report(cfg)
            path = write_csv(os.path.join(out, f"volume_{tag}.csv"),
                             "volume", cols, rows, cfg)
            print(f"volume table at {path}")
            return 0
        if args.command == "compare":
            cols, rows, meta = run_compare_report(cfg)
            path = write_csv(os.path.join(out, f"compare_{tag}.csv"),
                             "compare", cols, rows, cfg)
            write_json(os.path.join(out, f"compare_{tag}.json"),
                       {"config": {k: v for k, v in cfg.items() if v is not None},
                        **meta})
            print(f"comparison report at {path}")
            if meta["skipped"]:
                print(f"note: {meta['note']}")
            return 0
        raise ConfigurationError(f"unknown command {args.command!r}")
    except NumericalIntegrityError as exc:
        print(f"numerical integrity error: {exc}", file=sys.stderr)
        return 3
    except (ConfigurationError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FinslerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
