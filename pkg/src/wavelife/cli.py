"""Command line front end: ``wavelife <subcommand> [options]``.

Every subcommand accepts ``--config``, ``--out``, ``--format``, ``--workers``
and ``--seed``.  Results go to stdout, or to ``<out>/<name>.json|csv`` when
``--out`` is given.  The exit status is 0 iff no check failed.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__, cutoffs, exponents as ex, hypergeometric as hg, kernels, lab, ode_lemma, solver
from . import suites

# exit codes
OK, FAILED, USAGE = 0, 1, 2


def _number(text: str):
    """Exact Fraction for integer or ``a/b`` input, float when a decimal point or exponent appears."""
    s = text.strip()
    if any(c in s for c in ".eE") or s.lower() in ("inf", "nan"):
        return float(s)
    return Fraction(s)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, Fraction)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def _emit(args, name: str, doc: dict, rows: Optional[list] = None) -> None:
    """Write ``doc`` as JSON, or ``rows`` (list of flat dicts) as CSV."""
    if args.format == "csv":
        rows = rows if rows is not None else [doc]
        buf = io.StringIO()
        keys = list(dict.fromkeys(k for r in rows for k in r))
        wr = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: _jsonable(v) for k, v in r.items()})
        text = buf.getvalue()
    else:
        text = json.dumps(_jsonable(doc), indent=2) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"{name}.{args.format}")
        with open(path, "w", newline="") as fh:
            fh.write(text)
        print(path)
    else:
        sys.stdout.write(text)


def _read_ini(path: Optional[str]) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path and not cp.read(path):
        raise FileNotFoundError(path)
    return cp


def _spec_from(args) -> ex.ProblemSpec:
    if args.config:
        pr = _read_ini(args.config)["problem"]
        get = lambda k, d=None: pr.get(k, d)
    else:
        get = lambda k, d=None: getattr(args, k, None) if getattr(args, k, None) is not None else d
    kind, N, p = get("kind"), get("N"), get("p")
    if kind is None or N is None or p is None:
        raise ex.DomainError("need --kind, --N and --p (or a [problem] section in --config)")
    q = get("q")
    return ex.ProblemSpec(ex.ProblemKind(kind), int(N), _number(str(p)),
                          _number(str(q)) if q not in (None, "") else None,
                          _number(str(get("a", "1"))), _number(str(get("b", "1"))))


# -- subcommands ------------------------------------------------------------

def cmd_classify(args) -> int:
    rep = ex.classification_report(_spec_from(args))
    law = rep["law"]
    row = {"kind": rep["inputs"]["kind"], "N": rep["inputs"]["N"], "p": rep["inputs"]["p"],
           "q": rep["inputs"]["q"], "form": law["form"], "exponent": law["exponent"],
           "binding_condition": law["binding_condition"], "near_critical": law["near_critical"],
           "log_corrected": law["log_corrected"]}
    _emit(args, "classify", rep, [row])
    return OK


def cmd_trace_curve(args) -> int:
    curve = ex.trace_critical_curve(args.kind, args.N, (args.p_min, args.p_max), args.resolution)
    rows = [{"curve": n, "p": p, "q": q} for n, p, q in curve.rows()]
    doc = {"schema": "wavelife.curve/1", "kind": curve.kind.value, "N": curve.N,
           "curves": {n: [[p, q] for p, q in pts] for n, pts in curve.curves.items()},
           "intersection": curve.intersection}
    _emit(args, "curve", doc, rows)
    return OK


def cmd_phi(args) -> int:
    if args.suite:
        checks = suites.suite_hypergeometric(seed=args.seed)
        return _report_checks(args, "phi_suite", checks)
    spec = hg.PhiSpec(args.beta, args.lam, args.N)
    r, t = np.asarray(_floats(args.r)), np.asarray(_floats(args.t))
    r, t = np.broadcast_arrays(r, t)
    val = np.atleast_1d(hg.phi(spec, r, t))
    dt = np.atleast_1d(hg.dphi_dt(spec, r, t))
    drv = np.atleast_1d(hg.dphi_dr(spec, r, t))
    try:
        resid = hg.verify_wave_identity(spec, zip(r, t), args.h, r_step_ratio=0.5)
    except ex.DomainError:
        resid = None
    rows = [{"r": float(a), "t": float(b), "value": float(v), "dt": float(c), "dr": float(d)}
            for a, b, v, c, d in zip(r, t, val, dt, drv)]
    doc = {"schema": "wavelife.phi/1", "beta": args.beta, "lam": args.lam, "N": args.N,
           "points": rows, "residuals": {"wave_identity": resid, "h": args.h}}
    _emit(args, "phi", doc, rows)
    return OK


def cmd_quad(args) -> int:
    if args.what == "psi-bounds":
        rows = []
        for k in _floats(args.k):
            spec = cutoffs.CutoffSpec(k, args.R)
            r1, r2 = cutoffs.psi_derivative_bounds(spec, np.linspace(0.0, args.R, args.n))
            rows.append({"k": k, "R": args.R, "ratio_d1": r1, "ratio_d2": r2, "passed": max(r1, r2) <= 1 + 1e-9})
        _emit(args, "psi_bounds", {"schema": "wavelife.psi-bounds/1", "rows": rows}, rows)
        return OK if all(r["passed"] for r in rows) else FAILED
    R = _floats(args.R_values) if args.R_values else None
    fit = cutoffs.int_phi_scaling(args.N, args.beta, args.p, args.lam, R)
    rows = fit.rows()
    doc = {"schema": "wavelife.int-phi/1", "N": fit.N, "beta": fit.beta, "p": fit.p, "lam": args.lam,
           "regime": fit.regime, "predicted": fit.predicted, "slope": fit.slope,
           "slope_log_removed": fit.slope_log, "measured": fit.measured, "error": fit.error, "rows": rows}
    _emit(args, "int_phi", doc, rows)
    return OK


def cmd_ode_lemma(args) -> int:
    params = ode_lemma.OdiParams(1.0, args.p1, args.p2, args.K1, args.K2, args.t0)
    rows = ode_lemma.delta_sweep(params, _floats(args.deltas))
    K3 = ode_lemma.lifespan_bound(params).K3
    viol = [r for r in rows if r.margin < 0]
    doc = {"schema": "wavelife.ode-lemma/1", "p1": args.p1, "p2": args.p2, "K1": args.K1, "K2": args.K2,
           "t0": args.t0, "K3": K3, "predicted_slope": -params.exponent,
           "slope": ode_lemma.loglog_slope(rows[-2:]) if len(rows) >= 2 else None,
           "violations": len(viol), "rows": [r.to_dict() for r in rows]}
    _emit(args, "ode_lemma", doc, [r.to_dict() for r in rows])
    return OK if not viol else FAILED


def _solver_config(args) -> solver.SolverConfig:
    if not args.config:
        raise ex.DomainError("this subcommand needs --config")
    return solver.config_from_parser(_read_ini(args.config))


def cmd_simulate(args) -> int:
    cfg = _solver_config(args)
    if args.certify:
        m = solver.measure_lifespan(cfg, backend=args.backend)
        _emit(args, "lifespan", {"schema": "wavelife.lifespan/1", "config": cfg.to_dict(), **m.to_dict()})
        return OK
    res = solver.simulate(cfg, backend=args.backend)
    if args.out:
        for p in solver.write_outputs(res, args.out, args.format):
            print(p)
    else:
        rep = res.report.to_dict()
        rep.pop("max_amplitude")
        sys.stdout.write(json.dumps(_jsonable(rep), indent=2) + "\n")
    return OK


def _sweep_plan(args) -> tuple[lab.SweepPlan, float]:
    cp = _read_ini(args.config)
    cfg = solver.config_from_parser(cp)
    sw = cp["sweep"] if cp.has_section("sweep") else {}
    eps = _floats(args.epsilons or sw.get("epsilons", ""))
    plan = lab.SweepPlan(cfg, tuple(eps), tol=float(sw.get("tol", 0.05)),
                         max_refinements=int(sw.get("max_refinements", 2)))
    return plan, float(sw.get("tol_rel", 0.2))


def cmd_sweep(args) -> int:
    if not args.config:
        raise ex.DomainError("sweep needs --config")
    plan, _ = _sweep_plan(args)
    if not plan.regression_ready():
        print("warning: fewer than 4 eps values or less than one decade; no fit possible", file=sys.stderr)
    recs = lab.run_sweep(plan, workers=args.workers, backend=args.backend, require=0)
    doc = lab.sweep_report(plan, recs)
    _emit(args, "sweep", doc, [r.to_dict() for r in recs])
    flagged = any(r.flag for r in recs)
    return FAILED if flagged else OK


def _load_records(path: str):
    if path.endswith(".csv"):
        with open(path) as fh:
            recs = []
            for row in csv.DictReader(fh):
                if row.get("certified", "True") in ("True", "true", "1") and row.get("T_num"):
                    recs.append((float(row["epsilon"]), float(row["T_num"])))
            return recs, None
    with open(path) as fh:
        doc = json.load(fh)
    recs = [(r["epsilon"], r["T_num"]) for r in doc["records"] if r["certified"] and r["T_num"] is not None]
    spec = None
    if "template" in doc:
        s = doc["template"]["spec"]
        spec = ex.ProblemSpec(s["kind"], s["N"], s["p"], s["q"], s["a"], s["b"])
    return recs, spec


def cmd_fit(args) -> int:
    tol_rel = args.tol_rel
    if args.input:
        recs, spec = _load_records(args.input)
        if spec is None or args.kind:
            spec = _spec_from(args)
    else:
        plan, tol_cfg = _sweep_plan(args)
        tol_rel = tol_rel if tol_rel is not None else tol_cfg
        recs, spec = lab.run_sweep(plan, workers=args.workers, backend=args.backend), plan.spec
    law = ex.classify(spec)
    fit = lab.fit_scaling(recs, law, tol_rel if tol_rel is not None else 0.2)
    doc = dict(fit.to_dict(), law=law.to_dict())
    _emit(args, "fit", doc, [{k: v for k, v in fit.to_dict().items() if k != "notes"}])
    return FAILED if fit.verdict == "inconsistent" else OK


def _report_checks(args, name, checks) -> int:
    for c in checks:
        print(c.line(), file=sys.stderr)
    rows = [c.to_dict() for c in checks]
    _emit(args, name, {"schema": suites.VERIFY_SCHEMA, "checks": rows}, rows)
    return FAILED if any(c.status == "FAIL" for c in checks) else OK


def cmd_verify(args) -> int:
    names = [s for s in (args.suites or "").replace(",", " ").split()] or None
    rep = suites.verify_all(names, coarse=args.coarse, seed=args.seed, workers=args.workers,
                            echo=lambda s: print(s, file=sys.stderr), timings=args.timings)
    _emit(args, "verify", rep, rep["checks"])
    return OK if rep["ok"] else FAILED


# -- parser -----------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="INI file with [problem], [data], [solver] and [sweep] sections")
    p.add_argument("--out", help="output directory (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--workers", type=int, default=1, help="parallel simulations in sweeps")
    p.add_argument("--seed", type=int, default=0, help="seed for sampling suites")
    p.add_argument("--backend", choices=("cython", "python"), default=None,
                   help="kernel backend (default: compiled when available)")
    return p


def _problem_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=[k.value for k in ex.ProblemKind])
    p.add_argument("--N", type=int)
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--a")
    p.add_argument("--b")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="wavelife", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"wavelife {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="predicted lifespan law for a problem")
    _problem_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("trace-curve", parents=[common], help="sample a critical curve in the (p, q) plane")
    p.add_argument("--kind", required=True, choices=[k.value for k in ex.ProblemKind if k.uses_q])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p-min", type=float, default=1.05)
    p.add_argument("--p-max", type=float, default=6.0)
    p.add_argument("--resolution", type=int, default=64)
    p.set_defaults(func=cmd_trace_curve)

    p = sub.add_parser("phi", parents=[common], help="evaluate self-similar solutions or run their suite")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--r", default="0.5", help="radii (comma separated)")
    p.add_argument("--t", default="1.0", help="times (comma separated)")
    p.add_argument("--h", type=float, default=1e-2, help="step of the wave-identity residual")
    p.add_argument("--suite", action="store_true", help="run the hypergeometric identity suite")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("quad", parents=[common], help="cutoff bounds and weighted integral scaling")
    p.add_argument("what", choices=("int-phi", "psi-bounds"))
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--lam", type=float, default=2.0)
    p.add_argument("--R-values", help="radii for the fit (comma separated)")
    p.add_argument("--k", default="2,3,4,6,8")
    p.add_argument("--R", type=float, default=10.0)
    p.add_argument("--n", type=int, default=200001)
    p.set_defaults(func=cmd_quad)

    p = sub.add_parser("ode-lemma", parents=[common], help="extremal ODE against the lifespan bound")
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--deltas", default="0.2,0.1,0.05,0.02")
    p.add_argument("--K1", type=float, default=1.0)
    p.add_argument("--K2", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=3.0)
    p.set_defaults(func=cmd_ode_lemma)

    p = sub.add_parser("simulate", parents=[common], help="run the radial solver from a config file")
    p.add_argument("--certify", action="store_true", help="measure the lifespan with grid refinement")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="lifespans over a list of eps values")
    p.add_argument("--epsilons", help="overrides [sweep] epsilons")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", parents=[common], help="scaling-law regression of sweep records")
    p.add_argument("--input", help="sweep.json or sweep.csv (otherwise the sweep in --config is run)")
    p.add_argument("--epsilons")
    p.add_argument("--tol-rel", type=float, default=None)
    _problem_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    p.add_argument("--suites", help=f"comma separated subset of {', '.join(suites.SUITES)}")
    p.add_argument("--coarse", action="store_true", help="skip grid-convergence checks")
    p.add_argument("--timings", action="store_true", help="include wall-clock seconds in the report")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.backend:
        os.environ[kernels.ENV_VAR] = args.backend
    try:
        return args.func(args)
    except (ex.DomainError, lab.AggregationError, lab.DegenerateRegressionError, FileNotFoundError,
            KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
