"""Command-line entry point: gen / metric / flow / bound subcommands.

Exit codes: 0 success, 2 usage or invalid argument, 3 numerical failure.
All commands are deterministic given their flags; JSON reports embed every
resolved default so a run can be replayed from the report alone.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import _accel, datasets
from .errors import GspmError, FlowDivergenceError, NumericalError
from .evaluation import wasserstein2_exact
from .flow import FlowConfig, convergence_bound, run_flow, theorem_constants
from .kernels import (
    KernelSpec,
    OperatorSpec,
    RbfKernel,
    SmoothingProfile,
    evaluation_mode,
    resolve_half_width,
)
from .metrics import BaseMetricSpec, gspm, max_gspm, mmd2
from .slicing import SliceFamily, sample_slices, slice_values

XI_CHOICES = ("w1", "w2", "cramer2", "smoothed-l2")


def _parse_family(text: str, dim: int) -> SliceFamily:
    if text == "linear":
        return SliceFamily("linear", dim)
    if text.startswith("poly:"):
        return SliceFamily("poly", dim, degree=int(text.split(":", 1)[1]))
    if text.startswith("circular:"):
        return SliceFamily("circular", dim, radius=float(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError(
        f"slices must be 'linear', 'poly:<m>' or 'circular:<s>', got {text!r}"
    )


def _smoothing_operator(operator: str, sigma: float):
    """Map (--operator, --sigma) to a (SmoothingProfile, OperatorSpec) pair."""
    if operator == "id":
        return SmoothingProfile.gaussian(sigma), OperatorSpec.identity()
    if sigma > 0:
        return SmoothingProfile.smoothstep_profile(0, sigma), OperatorSpec.cumulative()
    return SmoothingProfile.dirac(), OperatorSpec.cumulative()


def _write_log(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "mmd2", "w2", "beta"])
        for row in rows:
            w2 = row.get("w2")
            writer.writerow(
                [
                    row["iter"],
                    f"{row['mmd2']:.17g}",
                    "" if w2 is None else f"{w2:.17g}",
                    f"{row['beta']:.17g}",
                ]
            )


def cmd_gen(args) -> int:
    params = {}
    for item in args.param:
        if "=" not in item:
            raise GspmError(f"--param expects k=v, got {item!r}")
        key, value = item.split("=", 1)
        params[key] = float(value)
    if "dim" in params:
        params["dim"] = int(params["dim"])
    dist = datasets.generate(args.dataset, args.n, seed=args.seed, **params)
    datasets.save_csv(args.out, dist)
    print(f"wrote {dist.n} samples (d={dist.dim}) to {args.out}")
    return 0


def cmd_metric(args) -> int:
    p = datasets.load_csv(args.p)
    q = datasets.load_csv(args.q)
    if p.dim != q.dim:
        raise GspmError(f"dimension mismatch: p has d={p.dim}, q has d={q.dim}")
    family = _parse_family(args.slices, p.dim)
    slices = sample_slices(family, args.L, args.seed)
    smoothing, operator = _smoothing_operator(args.operator, args.sigma)

    report = {
        "command": "metric",
        "p": args.p,
        "q": args.q,
        "kind": args.kind,
        "xi": args.xi,
        "slices": args.slices,
        "L": args.L,
        "r": args.r,
        "sigma": args.sigma,
        "operator": args.operator,
        "seed": args.seed,
        "slice_seed": args.seed,
        "refine_steps": args.refine,
        "resolved_half_width": None,
        "eval_mode": None,
        "quadrature_points": 2048,
        "threads": _thread_setting(args),
    }

    if args.kind == "mmd2":
        if args.xi is not None:
            raise GspmError("--xi applies to gspm/max-gspm, not mmd2")
        spec = KernelSpec(smoothing, operator, family, slice_count=args.L, seed=args.seed)
        FP = slice_values(p.samples, slices)
        FQ = slice_values(q.samples, slices)
        T = resolve_half_width(spec, FP, FQ)
        value = mmd2(p, q, spec, slices, half_width=T)
        report["resolved_half_width"] = T
        report["eval_mode"] = evaluation_mode(spec)
    else:
        if args.xi is None:
            raise GspmError(f"--xi is required for --kind {args.kind}")
        if args.xi == "w1":
            xi = BaseMetricSpec.wasserstein(1.0)
        elif args.xi == "w2":
            xi = BaseMetricSpec.wasserstein(2.0)
        elif args.xi == "cramer2":
            xi = BaseMetricSpec.cramer(2.0)
        else:
            xi = BaseMetricSpec.smoothed_l2(smoothing, operator)
        if args.kind == "gspm":
            value = gspm(p, q, xi, r=args.r, slices=slices)
        else:
            value = max_gspm(p, q, xi, r=args.r, candidate_slices=slices, refine_steps=args.refine)
        report["eval_mode"] = "smoothed-l2-quadrature" if args.xi == "smoothed-l2" else "exact-1d"

    print(f"{value:.12g}")
    report["value"] = value
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_flow(args) -> int:
    target = datasets.load_csv(args.target)
    n = args.n_particles
    if n < 1:
        raise GspmError("--n-particles must be >= 1")
    family = _parse_family(args.slices, target.dim)
    if args.kernel == "rbf":
        kernel = RbfKernel(args.sigma)
    else:
        operator_flag = "id" if args.kernel == "gspm-id" else "cumint"
        smoothing, operator = _smoothing_operator(operator_flag, args.sigma)
        kernel = KernelSpec(smoothing, operator, family, slice_count=args.L, seed=args.seed)

    init = datasets.generate(
        "gaussian_init", n, seed=args.seed, init_scale=args.init_scale, dim=target.dim
    )

    if target.n < n:
        raise GspmError(
            f"target has {target.n} samples but {n} particles were requested; "
            "the exact W2 evaluator needs at least as many target samples"
        )
    if target.n > n:
        idx = np.random.default_rng(args.seed).choice(target.n, size=n, replace=False)
        eval_target = target.samples[idx]
    else:
        eval_target = target.samples
    evaluators = {"w2": lambda P: wasserstein2_exact(P, eval_target)}

    config = FlowConfig(
        kernel=kernel,
        eta=args.eta,
        iterations=args.iters,
        beta0=args.beta0,
        schedule="constant" if args.decay == "const" else "inverse_k",
        resample_slices=args.slice_policy == "resample",
        seed=args.seed,
        eval_every=args.eval_every,
    )
    try:
        state, log = run_flow(init, target, config, evaluators=evaluators)
    except FlowDivergenceError as err:
        if args.log and err.log:
            _write_log(args.log, err.log)
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    if args.log:
        _write_log(args.log, log)
    datasets.save_csv(args.out, state.particles)
    final = [row for row in log if "w2" in row][-1]
    print(
        f"finished {config.iterations} iterations: "
        f"mmd2={final['mmd2']:.12g} w2={final['w2']:.12g}"
    )
    return 0


def cmd_bound(args) -> int:
    constants = theorem_constants(args.gf, args.gphi, args.opnorm, args.d)
    betas = [float(b) for b in args.betas.split(",") if b.strip() != ""] if args.betas else []
    result = convergence_bound(args.zeta0, constants, args.eta, betas)
    print(f"L = {constants.l_const:.12g}")
    print(f"lambda = {constants.lambda_const:.12g}")
    print(f"bound = {result.value:.12g}")
    if not result.contracting:
        print(
            f"warning: eta = {args.eta:.6g} >= 1/(3L) = {1.0 / (3.0 * constants.l_const):.6g}; "
            "the bound does not contract",
        )
    return 0


def _thread_setting(args):
    flag = getattr(args, "threads", None)
    if flag is not None:
        return flag
    env = os.environ.get("GSPM_THREADS")
    return int(env) if env else None


def _apply_threads(args) -> None:
    cap = _thread_setting(args)
    if cap is not None:
        _accel.set_thread_cap(cap)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gspm",
        description="Sliced probability metrics, slice kernels, and particle flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument(
        "--threads", type=int, default=None, help="cap backend worker threads (or GSPM_THREADS)"
    )

    p_gen = sub.add_parser("gen", parents=[common], help="generate a synthetic sample CSV")
    p_gen.add_argument("--dataset", required=True, choices=datasets.DATASET_NAMES)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="K=V",
        help="override a generator parameter (repeatable)",
    )
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_metric = sub.add_parser("metric", parents=[common], help="distance between two sample CSVs")
    p_metric.add_argument("--p", required=True)
    p_metric.add_argument("--q", required=True)
    p_metric.add_argument("--kind", required=True, choices=("gspm", "max-gspm", "mmd2"))
    p_metric.add_argument("--xi", choices=XI_CHOICES, default=None)
    p_metric.add_argument("--slices", default="linear", help="linear | poly:<m> | circular:<s>")
    p_metric.add_argument("--L", type=int, default=10)
    p_metric.add_argument("--r", type=float, default=2.0)
    p_metric.add_argument("--sigma", type=float, default=0.1)
    p_metric.add_argument(
        "--operator",
        choices=("id", "cumint"),
        default="id",
        help="id: Gaussian profile; cumint: smoothstep-0 (sigma>0) or Dirac (sigma=0)",
    )
    p_metric.add_argument("--refine", type=int, default=0, help="max-gspm ascent steps")
    p_metric.add_argument("--report", default=None, help="write a JSON report here")
    p_metric.set_defaults(func=cmd_metric)

    p_flow = sub.add_parser("flow", parents=[common], help="particle flow toward a target CSV")
    p_flow.add_argument("--target", required=True)
    p_flow.add_argument("--n-particles", type=int, required=True)
    p_flow.add_argument("--kernel", required=True, choices=("gspm-id", "gspm-cramer", "rbf"))
    p_flow.add_argument("--slices", default="linear")
    p_flow.add_argument("--L", type=int, default=10)
    p_flow.add_argument("--sigma", type=float, default=0.1)
    p_flow.add_argument("--eta", type=float, default=0.05)
    p_flow.add_argument("--iters", type=int, default=1000)
    p_flow.add_argument("--beta0", type=float, default=0.0)
    p_flow.add_argument("--decay", choices=("const", "inv-k"), default="const")
    p_flow.add_argument(
        "--slice-policy",
        choices=("resample", "fixed"),
        default="resample",
        help="fresh slices each iteration (experiment protocol) or one fixed set",
    )
    p_flow.add_argument("--eval-every", type=int, default=10)
    p_flow.add_argument("--init-scale", type=float, default=1.0)
    p_flow.add_argument("--log", default=None, help="write the convergence log CSV here")
    p_flow.add_argument("--out", required=True, help="write final particles CSV here")
    p_flow.set_defaults(func=cmd_flow)

    p_bound = sub.add_parser("bound", parents=[common], help="convergence-bound constants")
    p_bound.add_argument("--gf", type=float, required=True)
    p_bound.add_argument("--gphi", type=float, required=True)
    p_bound.add_argument("--opnorm", type=float, required=True)
    p_bound.add_argument("--d", type=int, required=True)
    p_bound.add_argument("--eta", type=float, required=True)
    p_bound.add_argument("--zeta0", type=float, required=True)
    p_bound.add_argument("--betas", default="", help="comma-separated noise levels")
    p_bound.set_defaults(func=cmd_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_threads(args)
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (GspmError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
