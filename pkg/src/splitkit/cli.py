"""Command-line front end: ``splitkit <command> --config run.json --out DIR``.

Exit codes
----------
0  success (converged, estimate written, normal solution found, all assertions pass)
1  configuration or usage error, or a failing/unknown scenario
2  ``solve`` did not converge
3  ``estimate-v`` overflowed
4  ``normal-solve`` detected divergence
5  ``normal-solve`` was inconclusive
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import scenarios
from .config import load_config
from .displacement import (DisplacementError, NormalStatus, estimate_v_iterative, normal_solve,
                           v_affine_closed_form)
from .errors import ConfigError, IterationError, NonConvergenceError, SplitkitError
from .operators import resolvent
from .product_space import average, parallel_fb_solve
from .splitting import DR, StopReason, affine_form, iterate, solve_primal

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED, EXIT_OVERFLOW, EXIT_DIVERGENT, EXIT_INCONCLUSIVE = range(6)


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _load(args):
    if args.config is None:
        raise ConfigError("--config is required", "--config")
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(args.config)) from None
    if args.max_iter is not None:
        cfg.max_iter = args.max_iter
    if args.tol is not None:
        cfg.tol = args.tol
    if args.seed is not None:
        cfg.seed = args.seed
    out = Path(args.out or cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return cfg, out


def _n_stages(cfg):
    return cfg.n_stages or max(1, cfg.max_iter // cfg.stage_len)


def cmd_solve(args) -> int:
    cfg, out = _load(args)
    if cfg.shift is not None:
        raise ConfigError("'shift' is not used by solve", "shift")
    problem = cfg.split_problem()
    x0 = cfg.start()
    if cfg.method == "dr":
        trace = iterate(DR(problem), x0, max_iter=cfg.max_iter, tol=cfg.tol,
                        divergence_threshold=cfg.divergence_threshold)
        trace.to_csv(out / "trace.csv")
        if trace.stop_reason is not StopReason.TOLERANCE:
            print(f"no convergence after {trace.n_final} iterations ({trace.stop_reason.value})")
            return EXIT_NONCONVERGED
        z = resolvent(problem.A, trace.x_final)
        result = {"z": z.tolist(), "governing_sequence_limit": trace.x_final.tolist()}
    else:
        try:
            sol = solve_primal(problem, x0, tol=cfg.tol, max_iter=cfg.max_iter,
                               divergence_threshold=cfg.divergence_threshold)
        except NonConvergenceError as exc:
            exc.trace.to_csv(out / "trace.csv")
            print(str(exc))
            return EXIT_NONCONVERGED
        sol.trace.to_csv(out / "trace.csv")
        result = sol.to_dict()
        trace = sol.trace
    if cfg.product is not None:
        result["z_lifted"] = result["z"]
        result["z"] = average(np.asarray(result["z_lifted"]), cfg.product.m).tolist()
    result.update(iterations=trace.n_final, stop_reason=trace.stop_reason.value,
                  trace=str(out / "trace.csv"))
    _write_json(out / "solution.json", result)
    print(f"converged after {trace.n_final} iterations: z = {result['z']}")
    return EXIT_OK


def cmd_estimate_v(args) -> int:
    cfg, out = _load(args)
    T = cfg.fixed_point_map()
    if args.closed_form:
        Taff = affine_form(T)
        if Taff is None:
            raise ConfigError("--closed-form needs an affine fixed-point map", "A")
        v = v_affine_closed_form(Taff)
        result = {"v": v.tolist(), "method": "closed_form"}
    else:
        try:
            est = estimate_v_iterative(T, cfg.start(), n_stages=_n_stages(cfg),
                                       stage_len=cfg.stage_len)
        except DisplacementError as exc:
            partial = None if exc.estimate is None else np.asarray(exc.estimate).tolist()
            _write_json(out / "estimate.json", {"error": str(exc), "last_estimate": partial})
            print(f"overflow: {exc}")
            return EXIT_OVERFLOW
        result = est.to_dict()
        result["method"] = "iterative"
    _write_json(out / "estimate.json", result)
    print(f"v = {result['v']}")
    return EXIT_OK


def cmd_normal_solve(args) -> int:
    cfg, out = _load(args)
    if cfg.method != "fb" or cfg.shift is not None:
        raise ConfigError("normal-solve uses the unshifted forward-backward map", "method")
    kw = dict(tol=cfg.tol, divergence_threshold=cfg.divergence_threshold, stage_len=cfg.stage_len)
    if cfg.product is not None:
        rep = parallel_fb_solve(cfg.product, cfg.x0, budget=cfg.max_iter, **kw)
    else:
        rep = normal_solve(cfg.split_problem(), cfg.x0, max_iter=cfg.max_iter,
                           n_stages=_n_stages(cfg), **kw)
    trace_path = out / "trace.csv"
    rep.trace.to_csv(trace_path)
    _write_json(out / "report.json", rep.to_dict(trace_path))
    print(f"status: {rep.status.value}; v = {rep.v.tolist()}")
    return {NormalStatus.FOUND: EXIT_OK, NormalStatus.DIVERGENT: EXIT_DIVERGENT,
            NormalStatus.INCONCLUSIVE: EXIT_INCONCLUSIVE}[rep.status]


def cmd_scenarios(args) -> int:
    ids = [args.id] if args.id else list(scenarios.REGISTRY)
    ok = True
    for sid in ids:
        try:
            rep = scenarios.run_scenario(sid, seed=args.seed)
        except KeyError as exc:
            print(exc.args[0], file=sys.stderr)
            return EXIT_CONFIG
        print(rep.to_text())
        if args.out:
            rep.write(args.out)
        ok = ok and rep.passed
    return EXIT_OK if ok else EXIT_CONFIG


def cmd_list_scenarios(args) -> int:
    for sid, desc, anchor in scenarios.list_scenarios():
        print(f"{sid:26s} {desc}  [{anchor}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--max-iter", type=int, metavar="N", dest="max_iter")
    common.add_argument("--tol", type=float, metavar="X")

    parser = argparse.ArgumentParser(prog="splitkit",
                                     description="Forward-backward and Douglas-Rachford splitting "
                                                 "with infeasibility diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="find a zero of A + B").set_defaults(func=cmd_solve)
    p = sub.add_parser("estimate-v", parents=[common], help="estimate the minimal displacement vector")
    p.add_argument("--closed-form", action="store_true", dest="closed_form",
                   help="use the closed form (affine maps only)")
    p.set_defaults(func=cmd_estimate_v)
    sub.add_parser("normal-solve", parents=[common],
                   help="solve the v-perturbed problem").set_defaults(func=cmd_normal_solve)
    p = sub.add_parser("scenarios", parents=[common], help="run one or all worked examples")
    p.add_argument("id", nargs="?")
    p.set_defaults(func=cmd_scenarios)
    sub.add_parser("list-scenarios", help="list scenario ids").set_defaults(func=cmd_list_scenarios)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IterationError as exc:
        if exc.trace is not None and args.command == "solve":
            out = Path(args.out or ".")
            exc.trace.to_csv(out / "trace.csv")
        print(f"iteration failed: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (SplitkitError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
