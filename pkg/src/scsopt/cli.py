"""Command line entry point: ``scsopt {bench,ct,profile,recon}``.

Exit codes: 0 success, 2 usage error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from scsopt.core import DomainError, UsageError
from scsopt.ct.imageio import read_sinogram_csv, write_image_csv, write_pgm
from scsopt.ct.metrics import psnr, ssim
from scsopt.ct.problem import CtProblem, ScenarioSpec, build_scenario, ct_objective
from scsopt.ct.projector import Geometry
from scsopt.experiments import ct_config, load_config, make_profiles, run_bench, run_ct
from scsopt.solver import solve

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _study_args(p):
    p.add_argument("--config", type=Path, help="INI file overriding the preset")
    p.add_argument("--preset", choices=("desk", "full"), default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None, help="parallel worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scsopt", description="Spectral conjugate subgradient experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    bench = sub.add_parser("bench", help="run the nonsmooth benchmark study")
    _study_args(bench)
    bench.add_argument("--problems", help="comma separated problem names")
    bench.add_argument("--solvers", help="comma separated solver ids, e.g. NMB2,WB0")

    ct = sub.add_parser("ct", help="run the CT reconstruction study")
    _study_args(ct)
    ct.add_argument("--solvers", help="comma separated solver ids")

    prof = sub.add_parser("profile", help="performance profiles from result CSVs")
    prof.add_argument("csv", nargs="+", type=Path)
    prof.add_argument("--metric", required=True, choices=("error", "evals", "cpu", "f_min"))
    prof.add_argument("--rule", default="threshold", choices=("threshold", "ten_percent"))
    prof.add_argument("--out", default=None)

    recon = sub.add_parser("recon", help="reconstruct a single image")
    recon.add_argument("--phantom", default="shepplogan")
    recon.add_argument("--sinogram", type=Path, help="view,det,value CSV instead of a phantom")
    recon.add_argument("--N", type=int, default=64)
    recon.add_argument("--views", type=int, default=90)
    recon.add_argument("--det", type=int, default=None)
    recon.add_argument("--noise", type=float, default=0.01)
    recon.add_argument("--mu", type=float, default=0.159)
    recon.add_argument("--solver", default="NMB2")
    recon.add_argument("--iters", type=int, default=200)
    recon.add_argument("--seed", type=int, default=0)
    recon.add_argument("--out", default="recon.pgm", help="output image (.pgm or .csv)")
    return parser


def _split(text):
    return [t.strip() for t in text.split(",") if t.strip()] if text else None


def _run_study(args, study):
    overrides = dict(output=args.out, seed=args.seed, workers=args.workers,
                     solvers=_split(args.solvers))
    if study == "bench":
        overrides["problems"] = _split(args.problems)
    cfg = load_config(args.config, study=study, preset_name=args.preset, **overrides)
    out = run_bench(cfg) if study == "bench" else run_ct(cfg)
    print(f"results written to {out}")


def _recon(args):
    cfg = load_config(study="ct", max_iter=args.iters, seed=args.seed, solvers=[args.solver])
    truth = None
    if args.sinogram is not None:
        sino = read_sinogram_csv(args.sinogram)
        geom = Geometry.parallel(args.N, sino.shape[0], sino.shape[1])
        problem = CtProblem(geom, sino.ravel(), args.mu)
    else:
        spec = ScenarioSpec(args.phantom, "low_dose", args.views, args.noise, args.mu,
                            args.N, args.det, args.seed)
        problem, truth = build_scenario(spec)
    res = solve(ct_objective(problem), np.zeros(problem.geometry.n), ct_config(args.solver, cfg))
    image = res.x_best.reshape(args.N, args.N)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    (write_image_csv if out.suffix == ".csv" else write_pgm)(out, image)
    msg = f"f_min={res.f_min:.6g} evals={res.function_evals}"
    if truth is not None:
        msg += f" psnr={psnr(res.x_best, truth):.3f} ssim={ssim(res.x_best, truth):.4f}"
    print(msg)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command in ("bench", "ct"):
            _run_study(args, args.command)
        elif args.command == "profile":
            target = make_profiles(args.csv, args.metric, args.rule, args.out)
            print(f"profile written to {target}")
        else:
            _recon(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, OSError, FloatingPointError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
