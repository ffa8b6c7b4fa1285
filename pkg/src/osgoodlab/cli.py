"""Command-line entry point.

Subcommands mirror the modules: ``mu`` (moduli), ``weight`` (weight
tables and the inequality probe), ``lp`` (dyadic decomposition and
commutator probes), ``mollify`` (approximation-bound sweeps), ``pliss``
(the explicit construction), and ``all`` (the cross-module verification
battery).  Reports are canonical JSON on stdout; grid and table exports are
CSV.  The output directory comes from --out or the OSGOODLAB_OUT
environment variable.

Exit codes: 0 all requested checks pass, 2 at least one check failed,
1 usage or runtime error (partial outputs of the failed run are removed).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import carleman, dyadic, mollify, modulus, pliss
from .report import CheckRow, VerificationReport, config_hash, merge_reports

__all__ = ["main", "run"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _json_out(payload) -> str:
    from .report import _json_default
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=True,
                      default=_json_default)


class _Outputs:
    """Tracks files written by one run so failures can clean up."""

    def __init__(self, out_dir: str | None):
        env = os.environ.get("OSGOODLAB_OUT")
        self.dir = Path(out_dir or env) if (out_dir or env) else None
        self.written: list[Path] = []

    def path(self, name: str) -> Path | None:
        if self.dir is None:
            return None
        self.dir.mkdir(parents=True, exist_ok=True)
        return self.dir / name

    def write_text(self, name: str, text: str) -> None:
        p = self.path(name)
        if p is None:
            return
        tmp = p.with_suffix(p.suffix + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, p)
        self.written.append(p)

    def cleanup(self) -> None:
        for p in self.written:
            try:
                p.unlink()
            except OSError:
                pass


def _emit_report(rep: VerificationReport, outs: _Outputs, name: str) -> int:
    text = rep.to_json()
    print(text)
    outs.write_text(name, text)
    return 0 if rep.passed else 2


# ---------------------------------------------------------------------------
# battery pieces (shared between subcommands and `all`)
# ---------------------------------------------------------------------------

def _battery_mu(seed: int) -> VerificationReport:
    rows = []
    oracle = {
        "linear": math.log(1e12),
        "loglinear": math.log(1.0 - math.log(1e-12)),
        "sqrt": 2.0 - 2e-6,
        "power:0.8": (1.0 - 1e-12 ** 0.2) / 0.2,
    }
    for name in ("linear", "loglinear", "sqrt", "power:0.8"):
        mu = modulus.modulus_from_name(name)
        res = modulus.osgood_integral(mu)
        rows.append(CheckRow(f"classify-{name}", "(3)/(4)",
                             measured=res.value, threshold=1e-8,
                             passed=res.classification is mu.osgood_class
                             and abs(res.value - oracle[name]) <= 1e-8
                             * max(1.0, oracle[name]),
                             detail=f"measured class {res.classification.value}"))
        rep = modulus.check_remark1(mu)
        rows.append(CheckRow(f"axioms-{name}", "rem1",
                             measured=float(sum(not r.passed for r in rep.rows)),
                             threshold=0.0, passed=rep.passed))
    return VerificationReport(module="modulus", rows=rows)


def _battery_weight(seed: int) -> VerificationReport:
    rows = []
    rng = np.random.default_rng(seed)
    for name in ("linear", "loglinear"):
        mu = modulus.make_builtin(name)
        wt = carleman.build_weight_table(mu, 1000.0)
        sub = carleman.weight_table_report(wt, rng=rng)
        for r in sub.rows:
            rows.append(CheckRow(f"{name}-{r.check_id}", r.anchor, r.measured,
                                 r.threshold, r.passed))
        tau = np.linspace(0.0, wt.tau_max, 501)
        if name == "linear":
            worst = float(np.max(np.abs(wt.Phi(tau) - (np.exp(tau) - 1.0))
                                 / np.maximum(np.exp(tau) - 1.0, 1.0)))
            ts = np.exp(rng.uniform(0.0, math.log(1000.0), 64))
            worst_phi = float(np.max(np.abs(wt.phi(ts) - np.log(ts))
                                     / np.maximum(np.abs(np.log(ts)), 1.0)))
        else:
            p1 = wt.phi_inverse(tau)
            worst = float(np.max(np.abs(p1 - np.exp(np.exp(tau) - 1.0)) / p1))
            ts = np.exp(rng.uniform(0.0, math.log(1000.0), 64))
            worst_phi = float(np.max(np.abs(wt.phi(ts) - np.log1p(np.log(ts)))
                                     / np.maximum(np.abs(np.log1p(np.log(ts))), 1.0)))
        rows.append(CheckRow(f"{name}-closed-form", "(6)",
                             measured=max(worst, worst_phi), threshold=1e-7,
                             passed=max(worst, worst_phi) <= 1e-7))
    return VerificationReport(module="carleman", rows=rows)


def _battery_lp(seed: int) -> VerificationReport:
    rows = []
    rng = np.random.default_rng(seed)
    for dim, res in ((1, 256), (2, 64)):
        part = dyadic.DyadicPartition(nu_max=12, dim=dim)
        top = part.block_limit(res)
        u = dyadic.random_band_limited(res, 2**top, rng, dim=dim)
        rec = dyadic.lp_reconstruct(part, u, top)
        err = (np.max(np.abs(rec.values - u.values))
               / max(np.max(np.abs(u.values)), 1e-300))
        rows.append(CheckRow(f"reconstruction-{dim}d", "(9)", measured=float(err),
                             threshold=1e-12, passed=err <= 1e-12))
        worst_lo, worst_hi = 1.0, 1.0
        for _ in range(10):
            f = dyadic.random_band_limited(res, 2**top, rng, dim=dim)
            ratio, _inv = dyadic.check_almost_orthogonality(part, f)
            worst_lo = min(worst_lo, ratio)
            worst_hi = max(worst_hi, ratio)
        rows.append(CheckRow(f"orthogonality-{dim}d", "(10)", measured=worst_lo,
                             threshold=0.5,
                             passed=worst_lo >= 0.5 and worst_hi <= 1.0 + 1e-12,
                             detail=f"ratio range [{worst_lo:.6f}, {worst_hi:.6f}]"))
        bern = dyadic.check_bernstein(part, u, min(3, top))
        rows.append(CheckRow(f"bernstein-{dim}d", "bernstein",
                             measured=float(sum(not r.passed for r in bern.rows)),
                             threshold=0.0, passed=bern.passed))
    part1 = dyadic.DyadicPartition(nu_max=8, dim=1)
    gap = dyadic.multiplier_locality_gap(part1, 256)
    rows.append(CheckRow("multiplier-locality", "(2.1)", measured=gap,
                         threshold=0.0, passed=gap == 0.0))
    return VerificationReport(module="dyadic", rows=rows)


def _battery_commutator(seed: int) -> VerificationReport:
    part = dyadic.DyadicPartition(nu_max=12, dim=1)
    resolutions = (128, 256, 512)
    N = max(resolutions)
    x = 2.0 * math.pi * np.arange(N) / N
    a = dyadic.GridField(1.0 + 0.3 * np.cos(x))
    v = dyadic.GridField(np.cos(8.0 * x))
    rep = dyadic.probe_commutator_bound(part, [[[a]]], v,
                                        resolutions=resolutions)
    rows = list(rep.rows)
    w = dyadic.GridField(np.cos(4.0 * x))
    cst = dyadic.GridField(np.full(N, 2.5))
    czero = np.max(np.abs(dyadic.commutator(part, cst, w, 2).values))
    rows.append(CheckRow("constant-commutes", "(2.7)", measured=float(czero),
                         threshold=1e-13, passed=czero <= 1e-13))
    return VerificationReport(module="dyadic", rows=rows,
                              context=rep.context)


def _battery_mollify(seed: int) -> VerificationReport:
    kern = mollify.make_kernel()
    mu = modulus.make_builtin("sqrt")
    saw = mollify.make_mu_sawtooth(mu, depth=18)
    eps = [2.0 ** -j for j in range(4, 11)]
    tg = np.linspace(-0.5, 0.5, 513)
    rep_saw, sweep_saw = mollify.verify_mollifier_bounds(saw, mu, kern, eps, tg)
    rows = [CheckRow("sawtooth-approx-global", "(13)",
                     measured=sweep_saw.global_spread("c"), threshold=2.0,
                     passed=sweep_saw.global_spread("c") <= 2.0),
            CheckRow("sawtooth-derivative-global", "(14)",
                     measured=sweep_saw.global_spread("ctilde"), threshold=2.0,
                     passed=sweep_saw.global_spread("ctilde") <= 2.0)]

    mu_cap = modulus.normalize_sqrt_cap(mu)
    pc = pliss.build_construction(mu_cap, n_segments=400)
    lf = pliss.l_time_function(pc)
    seqs, cuts = pc.seqs, pc.cuts
    tg2 = [np.linspace(seqs.a[0] - 0.2, 0.1, 401)]
    for n in range(min(50, seqs.n_segments)):
        tg2.append(seqs.a[n] + seqs.r[n]
                   * np.array([cuts.j_peak_pos, cuts.j_peak_neg, 0.25, 0.5]))
    tg2 = np.unique(np.concatenate(tg2))
    _rep_l, sweep_l = mollify.verify_mollifier_bounds(lf, mu_cap, kern, eps, tg2)
    rows.append(CheckRow("pliss-l-approx-stepwise", "(13)",
                         measured=sweep_l.stepwise_spread("c"), threshold=2.0,
                         passed=sweep_l.stepwise_spread("c") <= 2.0,
                         detail=f"C(eps)={sweep_l.c_fit.tolist()}"))
    return VerificationReport(module="mollify", rows=rows)


def _battery_pliss(seed: int) -> VerificationReport:
    rng = np.random.default_rng(seed)
    mu = modulus.normalize_sqrt_cap(modulus.make_builtin("sqrt"))
    pc = pliss.build_construction(mu, n_segments=200)
    rep = pliss.verify_conditions(pc)
    rows = list(rep.rows)
    cmu = pliss.verify_cmu_regularity(pc, rng=rng)
    rows.extend(cmu.rows)
    seqs = pc.seqs
    n = 20000
    ts = rng.uniform(seqs.a[0] - 0.5, 0.5, n)
    x1 = rng.uniform(0, 2 * math.pi, n)
    x2 = rng.uniform(0, 2 * math.pi, n)
    f = pliss.eval_fields(pc, ts, x1, x2)
    rows.append(CheckRow("equation-residual", "(5)",
                         measured=float(f["residual_rel"].max()), threshold=1e-10,
                         passed=float(f["residual_rel"].max()) <= 1e-10))
    lt = pliss.eval_l(pc, np.linspace(seqs.a[0] - 0.1, 0.1, 100000))
    ok_l = bool(lt.min() >= 0.5 and lt.max() <= 1.5)
    rows.append(CheckRow("parabolic-range", "(5)",
                         measured=float(lt.max()), threshold=1.5, passed=ok_l,
                         detail=f"l range [{lt.min():.6f}, {lt.max():.6f}]"))
    fd = pliss.fd_cross_check(pc, points=60, seed=seed + 1)
    rows.append(CheckRow("derivative-cross-check", "(5)", measured=fd,
                         threshold=1e-6, passed=fd <= 1e-6))
    gap = pliss.junction_continuity_gap(pc, seed=seed + 2)
    rows.append(CheckRow("junction-continuity", "plumbing", measured=gap,
                         threshold=1e-10, passed=gap <= 1e-10))
    w = pliss.eval_solution(pc, float(seqs.a[0]), 0.0, 0.0)
    rows.append(CheckRow("witness-nonzero", "support-claim",
                         measured=abs(w.u), threshold=0.0, passed=abs(w.u) > 0.0))
    z = pliss.eval_solution(pc.reflected(), -0.25, 1.0, 1.0)
    rows.append(CheckRow("support-free-side", "support-claim",
                         measured=abs(z.u), threshold=0.0, passed=z.u == 0.0))
    return VerificationReport(module="pliss", rows=rows, context=rep.context)


def _battery_carleman_probe(seed: int) -> VerificationReport:
    mu = modulus.make_builtin("linear")
    cfg = carleman.CarlemanProbeConfig()
    t_max = math.exp(min(cfg.gamma_grid[-1] * cfg.T * 1.02, 700.0))
    wt = carleman.build_weight_table(mu, t_max)
    rep = carleman.probe_carleman(cfg, wt).to_report()
    return rep


_BATTERY = [
    ("modulus", _battery_mu),
    ("carleman", _battery_weight),
    ("dyadic", _battery_lp),
    ("dyadic-commutator", _battery_commutator),
    ("mollify", _battery_mollify),
    ("pliss", _battery_pliss),
    ("carleman-probe", _battery_carleman_probe),
]


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_mu(args, outs: _Outputs) -> int:
    if args.mu_cmd == "list":
        print(_json_out({"moduli": modulus.builtin_names()}))
        return 0
    mu = modulus.modulus_from_name(args.name)
    if args.mu_cmd == "eval":
        print(_json_out({"name": mu.name, "s": args.s, "mu": float(mu.fn(args.s))}))
        return 0
    if args.mu_cmd == "osgood":
        try:
            res = modulus.osgood_integral(mu, eps_floor=args.floor)
            agree = (mu.osgood_class is modulus.OsgoodClass.UNKNOWN
                     or res.classification is mu.osgood_class)
            rep = VerificationReport(module="modulus", rows=[
                CheckRow("classification-agrees", "(3)/(4)",
                         measured=res.value, threshold=0.0, passed=agree,
                         detail=f"measured {res.classification.value}, "
                                f"claimed {mu.osgood_class.value}, "
                                f"diagnostic {res.diagnostic:.4g}")])
        except modulus.ClassificationError as exc:
            rep = VerificationReport(module="modulus", rows=[
                CheckRow("classification-agrees", "(3)/(4)", measured=math.nan,
                         threshold=0.0, passed=False, detail=str(exc))])
        return _emit_report(rep, outs, f"mu-osgood-{mu.name}.json")
    if args.mu_cmd == "check":
        rep = modulus.check_remark1(mu, sample_count=args.samples)
        return _emit_report(rep, outs, f"mu-check-{mu.name}.json")
    raise UsageError("unknown mu subcommand")


def _cmd_weight(args, outs: _Outputs) -> int:
    mu = modulus.modulus_from_name(args.mu)
    if args.weight_cmd == "probe":
        gammas = tuple(float(g) for g in args.gammas.split(","))
        cfg = carleman.CarlemanProbeConfig(T=args.T, gamma_grid=gammas,
                                           resolution=args.resolution,
                                           dim=args.dim,
                                           test_family=args.family)
        t_max = math.exp(min(gammas[-1] * args.T * 1.02, 700.0))
        wt = carleman.build_weight_table(mu, t_max)
        probe = carleman.probe_carleman(cfg, wt)
        rep = probe.to_report()
        rep.context["ratios"] = probe.ratios.tolist()
        rep.context["ratios_gamma"] = probe.ratios_gamma.tolist()
        return _emit_report(rep, outs, "weight-probe.json")
    wt = carleman.build_weight_table(mu, args.t_max, quad_tol=args.quad_tol)
    if args.weight_cmd == "build":
        table = np.column_stack([wt.t_nodes, wt.tau_nodes, wt.tau_nodes,
                                 wt.Phi_nodes, wt.t_nodes,
                                 wt.Phi2(wt.tau_nodes)])
        lines = ["t,phi,tau,Phi,Phi1,Phi2"]
        lines += [",".join(f"{v:.17g}" for v in row) for row in table]
        text = "\n".join(lines) + "\n"
        outs.write_text(f"weight-{mu.name}.csv", text)
        print(_json_out({"modulus": mu.name, "t_max": wt.t_max,
                         "tau_max": wt.tau_max, "nodes": len(wt.t_nodes)}))
        return 0
    if args.weight_cmd == "eval":
        val = carleman.weight_value(wt, args.gamma, args.T, args.t)
        print(_json_out({"modulus": mu.name, "gamma": args.gamma, "T": args.T,
                         "t": args.t, "weight": val}))
        return 0
    if args.weight_cmd == "check":
        rep = carleman.weight_table_report(wt)
        return _emit_report(rep, outs, f"weight-check-{mu.name}.json")
    raise UsageError("unknown weight subcommand")


def _cmd_lp(args, outs: _Outputs) -> int:
    rng = np.random.default_rng(args.seed)
    part = dyadic.DyadicPartition(nu_max=12, dim=args.dim)
    top = part.block_limit(args.resolution)
    u = dyadic.random_band_limited(args.resolution, 2**top, rng, dim=args.dim)
    if args.lp_cmd == "decompose":
        norms = {}
        lines = ["nu,index,value"]
        for nu in range(top + 1):
            blk = dyadic.lp_block(part, u, nu)
            norms[str(nu)] = blk.norm_l2()
            flat = blk.values.ravel()
            lines += [f"{nu},{i},{v:.17g}" for i, v in enumerate(flat)]
        outs.write_text("lp-blocks.csv", "\n".join(lines) + "\n")
        print(_json_out({"resolution": args.resolution, "dim": args.dim,
                         "block_norms": norms, "field_norm": u.norm_l2()}))
        return 0
    if args.lp_cmd == "check":
        rep = _battery_lp(args.seed)
        return _emit_report(rep, outs, "lp-check.json")
    if args.lp_cmd == "probe":
        rep = _battery_commutator(args.seed)
        return _emit_report(rep, outs, "lp-probe.json")
    raise UsageError("unknown lp subcommand")


def _cmd_mollify(args, outs: _Outputs) -> int:
    kern = mollify.make_kernel()
    mu = modulus.modulus_from_name(args.mu)
    js = range(int(-math.log2(args.eps_max)), int(-math.log2(args.eps_min)) + 1)
    eps = [2.0 ** -j for j in js]
    if args.family == "sawtooth":
        fam = mollify.make_mu_sawtooth(mu, depth=20)
        tg = np.linspace(-0.5, 0.5, 513)
    elif args.family == "pliss-l":
        mu = modulus.normalize_sqrt_cap(mu)
        if mu.osgood_class is not modulus.OsgoodClass.CONVERGENT:
            raise UsageError("pliss-l family needs a convergent modulus")
        if args.k0 is not None:
            seqs = pliss.build_sequences(mu, args.k0, args.segments or 400)
            fam = pliss.l_from_sequences(seqs)
            cuts = pliss.make_cutoffs()
        else:
            pc = pliss.build_construction(mu, n_segments=args.segments or 400)
            fam = pliss.l_time_function(pc)
            seqs, cuts = pc.seqs, pc.cuts
        tg = [np.linspace(seqs.a[0] - 0.2, 0.1, 401)]
        for n in range(min(60, seqs.n_segments)):
            tg.append(seqs.a[n] + seqs.r[n]
                      * np.array([cuts.j_peak_pos, cuts.j_peak_neg, 0.25, 0.5]))
        tg = np.unique(np.concatenate(tg))
    else:
        raise UsageError(f"unknown family {args.family!r}")
    rep, sweep = mollify.verify_mollifier_bounds(fam, mu, kern, eps, tg)
    rep.context["c_fit"] = sweep.c_fit.tolist()
    rep.context["ctilde_fit"] = sweep.ctilde_fit.tolist()
    return _emit_report(rep, outs, f"mollify-{args.family}.json")


def _build_pc(args) -> pliss.PlissConstruction:
    mu = modulus.normalize_sqrt_cap(modulus.modulus_from_name(args.mu))
    k0 = None if args.k0 in (None, "auto") else int(args.k0)
    orient = (pliss.Orientation.REFLECTED if getattr(args, "reflected", False)
              else pliss.Orientation.CONSTRUCTION)
    return pliss.build_construction(mu, k0=k0, n_segments=args.segments,
                                    orientation=orient)


def _cmd_pliss(args, outs: _Outputs) -> int:
    if args.pliss_cmd == "build":
        pc = _build_pc(args)
        s = pc.seqs
        print(_json_out({"modulus": s.mu.name, "k0": s.k0,
                         "segments": s.n_segments,
                         "a_first": float(s.a[0]), "a_last": float(s.a[-1]),
                         "j_prime_sup": pc.cuts.j_prime_sup,
                         "tail_bound_log": s.tail_bound_log}))
        return 0
    if args.pliss_cmd == "eval":
        pc = _build_pc(args)
        pe = pliss.eval_solution(pc, args.t, args.x1, args.x2)
        payload = {k: getattr(pe, k) for k in
                   ("t", "x1", "x2", "u", "u_t", "u_x1", "u_x2", "u_x1x1",
                    "u_x2x2", "l", "b1", "b2", "c", "Lu", "residual")}
        payload["scaled"] = {k: getattr(pe.scaled, k) for k in
                             ("log_scale", "u", "u_t", "u_x1", "u_x2",
                              "u_x1x1", "u_x2x2", "Lu", "residual",
                              "residual_rel")}
        print(_json_out(payload))
        return 0
    if args.pliss_cmd == "verify":
        pc = _build_pc(args)
        rng = np.random.default_rng(args.seed)
        rep = pliss.verify_conditions(pc)
        cmu = pliss.verify_cmu_regularity(pc, pair_count=args.pairs, rng=rng)
        merged = merge_reports([rep, cmu])
        merged.module = "pliss"
        return _emit_report(merged, outs, "pliss-verify.json")
    if args.pliss_cmd == "export":
        pc = _build_pc(args)
        if outs.dir is None:
            raise UsageError("pliss export needs --out (or OSGOODLAB_OUT)")
        path = outs.path("pliss-grid.csv" if args.format == "csv"
                         else "pliss-grid.json")
        outs.written.append(path)  # track before writing so failures clean up
        meta = pliss.export_construction(pc, args.grid, path, fmt=args.format)
        print(_json_out(meta))
        return 0
    raise UsageError("unknown pliss subcommand")


def _cmd_all(args, outs: _Outputs) -> int:
    seed = args.seed
    reports = []
    for name, fn in _BATTERY:
        reports.append(fn(seed))
    merged = merge_reports(reports, provenance={
        "seed": seed,
        "config_hash": config_hash({"seed": seed, "battery": [n for n, _ in _BATTERY]}),
    })
    text = merged.to_json()
    print(text)
    outs.write_text("report.json", text)
    for row in merged.rows:
        status = "PASS" if row.passed else "FAIL"
        print(f"{status} {row.module}:{row.check_id} measured={row.measured:.6g}",
              file=sys.stderr)
    return 0 if merged.passed else 2


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    p = _Parser(prog="osgoodlab", description=__doc__)
    p.add_argument("--out", default=None, help="output directory for reports")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    mu_p = sub.add_parser("mu", help="moduli of continuity")
    mu_sub = mu_p.add_subparsers(dest="mu_cmd", parser_class=_Parser)
    mu_sub.add_parser("list")
    q = mu_sub.add_parser("eval")
    q.add_argument("--name", required=True)
    q.add_argument("--s", type=float, required=True)
    q = mu_sub.add_parser("osgood")
    q.add_argument("--name", required=True)
    q.add_argument("--floor", type=float, default=1e-12)
    q = mu_sub.add_parser("check")
    q.add_argument("--name", required=True)
    q.add_argument("--samples", type=int, default=64)

    w_p = sub.add_parser("weight", help="weight tables and the probe")
    w_sub = w_p.add_subparsers(dest="weight_cmd", parser_class=_Parser)
    for name in ("build", "eval", "check", "probe"):
        q = w_sub.add_parser(name)
        q.add_argument("--mu", default="linear")
        q.add_argument("--t-max", dest="t_max", type=float, default=1000.0)
        q.add_argument("--quad-tol", dest="quad_tol", type=float, default=1e-9)
        if name == "eval":
            q.add_argument("--gamma", type=float, required=True)
            q.add_argument("--T", type=float, required=True)
            q.add_argument("--t", type=float, required=True)
        if name == "probe":
            q.add_argument("--T", type=float, default=0.3)
            q.add_argument("--gammas", default="8,16,32,64,128,256")
            q.add_argument("--resolution", type=int, default=256)
            q.add_argument("--dim", type=int, default=1, choices=(1, 2))
            q.add_argument("--family", default="sine-mode")

    lp_p = sub.add_parser("lp", help="dyadic decomposition")
    lp_sub = lp_p.add_subparsers(dest="lp_cmd", parser_class=_Parser)
    for name in ("decompose", "check", "probe"):
        q = lp_sub.add_parser(name)
        q.add_argument("--resolution", type=int, default=256)
        q.add_argument("--dim", type=int, default=1, choices=(1, 2))
        q.add_argument("--seed", type=int, default=0)

    mo_p = sub.add_parser("mollify", help="mollifier bound sweeps")
    mo_sub = mo_p.add_subparsers(dest="mollify_cmd", parser_class=_Parser)
    q = mo_sub.add_parser("check")
    q.add_argument("--mu", default="sqrt")
    q.add_argument("--family", default="sawtooth",
                   choices=("sawtooth", "pliss-l"))
    q.add_argument("--eps-min", dest="eps_min", type=float, default=2.0**-10)
    q.add_argument("--eps-max", dest="eps_max", type=float, default=2.0**-4)
    q.add_argument("--k0", type=int, default=None)
    q.add_argument("--segments", type=int, default=None)

    pl_p = sub.add_parser("pliss", help="the explicit construction")
    pl_sub = pl_p.add_subparsers(dest="pliss_cmd", parser_class=_Parser)
    for name in ("build", "eval", "verify", "export"):
        q = pl_sub.add_parser(name)
        q.add_argument("--mu", default="sqrt")
        q.add_argument("--k0", default="auto")
        q.add_argument("--segments", type=int,
                       default=200 if name in ("verify",) else None)
        if name == "eval":
            q.add_argument("--t", type=float, required=True)
            q.add_argument("--x1", type=float, default=0.0)
            q.add_argument("--x2", type=float, default=0.0)
            q.add_argument("--reflected", action="store_true")
        if name == "verify":
            q.add_argument("--pairs", type=int, default=2000)
            q.add_argument("--seed", type=int, default=0)
        if name == "export":
            q.add_argument("--grid", required=True,
                           help="t0:t1:nt,x10:x11:nx1,x20:x21:nx2")
            q.add_argument("--reflected", action="store_true")
            q.add_argument("--format", default="csv", choices=("csv", "json"))

    all_p = sub.add_parser("all", help="run the verification battery")
    all_p.add_argument("--seed", type=int, default=0)
    return p


_DISPATCH = {
    "mu": _cmd_mu,
    "weight": _cmd_weight,
    "lp": _cmd_lp,
    "mollify": _cmd_mollify,
    "pliss": _cmd_pliss,
    "all": _cmd_all,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.cmd is None:
        parser.print_help()
        return 1
    outs = _Outputs(args.out)
    try:
        return _DISPATCH[args.cmd](args, outs)
    except UsageError as exc:
        outs.cleanup()
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        outs.cleanup()
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
