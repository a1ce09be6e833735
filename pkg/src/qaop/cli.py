"""Command-line entry point ``qaop``.

Exit codes: 0 success, 2 when any run did not converge, 1 on errors.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .classical import solve_classical
from .emulation import CostParams, NoiseConfig, cost_compare, dyxl_run, improved_run
from .experiments import SweepSpec, plot_sweep, sweep, write_cost_csv
from .io import load_instance
from .iteration import PRECISION_ENV, solve_spectral
from .spectral import random_spectrum

log = logging.getLogger("qaop")

EXIT_OK, EXIT_ERROR, EXIT_UNCONVERGED = 0, 1, 2


def _write_rows(path, header, rows):
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def cmd_solve_classical(args):
    data = load_instance(args.instance)
    it = solve_classical(data, args.k, tol=args.tol, max_iter=args.max_iter)
    header = ["iteration", "objective_trace", "objective_ridge"] + [f"beta_{j}" for j in range(args.k)]
    rows = []
    for i in range(1, it.iteration + 1):
        rows.append([i, repr(it.objective_trace_history[i - 1]), repr(it.objective_history[i - 1])]
                    + [repr(float(b)) for b in it.beta_history[i]])
    _write_rows(args.out, header, rows)
    log.info("classical solver: %d iterations, converged=%s", it.iteration, it.converged)
    return EXIT_OK if it.converged else EXIT_UNCONVERGED


def cmd_solve_spectral(args):
    model = random_spectrum(args.k, args.kappa, args.seed)
    sol = solve_spectral(model, args.lambda2, args.eps, max_iter=args.max_iter,
                         precision=args.precision, record=True)
    header = ["iteration", "c_i", "kappa_i"] + [f"beta_{j}" for j in range(args.k)]
    rows = [
        [i + 1, repr(float(sol.trace.c[i])), repr(float(sol.trace.kappa[i]))]
        + [repr(float(b)) for b in sol.trace.betas[i]]
        for i in range(sol.n_iter)
    ]
    _write_rows(args.out, header, rows)
    log.info("spectral solver: s=%d, converged=%s, precision=%d bits",
             sol.n_iter, sol.converged, sol.precision)
    return EXIT_OK if sol.converged else EXIT_UNCONVERGED


def _cost_params(path):
    if path is None:
        return CostParams()
    try:
        return CostParams.from_dict(json.loads(Path(path).read_text()))
    except OSError as exc:
        raise OSError(f"cannot read cost parameters {path}: {exc}") from exc


def cmd_emulate(args):
    model = random_spectrum(args.k, args.kappa, args.seed)
    noise = NoiseConfig(eps1=args.eps1, eps2=args.eps2, mode=args.mode, seed=args.seed)
    run = dyxl_run if args.algo == "dyxl" else improved_run
    res = run(model, args.lambda2, args.s, noise, ledger=args.ledger,
              cost=_cost_params(args.params))
    doc = res.to_dict()
    doc["instance"] = {"k": args.k, "kappa": args.kappa, "lambda2": args.lambda2,
                       "s": args.s, "seed": args.seed, "noise": noise.to_dict()}
    try:
        Path(args.out).write_text(json.dumps(doc, indent=2))
    except OSError as exc:
        raise OSError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def cmd_sweep(args):
    spec = SweepSpec.from_json(args.spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = sweep(spec, jobs=args.jobs)
    result.write_csv(out / "sweep.csv")
    result.write_json(out / "sweep.json")
    if args.plot:
        plot_sweep(result, out / "sweep.png")
    if result.any_unconverged:
        log.warning("some trials did not converge")
        return EXIT_UNCONVERGED
    return EXIT_OK


def cmd_cost(args):
    params = _cost_params(args.params)
    table = cost_compare(params, range(1, args.s_max + 1), args.kappa, args.k)
    write_cost_csv(table, args.out)
    log.info("crossover at s=%s", table.crossover)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="qaop", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("solve-classical", help="matrix-space alternating solver")
    c.add_argument("--instance", required=True, help="JSON instance descriptor")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--max-iter", type=int, default=1000)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_solve_classical)

    s = sub.add_parser("solve-spectral", help="scalar iteration on a random spectrum")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--lambda2", type=float, default=1.0)
    s.add_argument("--eps", type=float, default=1e-10)
    s.add_argument("--precision", type=int, default=None,
                   help=f"working bits (default from ${PRECISION_ENV} or eps)")
    s.add_argument("--max-iter", type=int, default=10_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve_spectral)

    e = sub.add_parser("emulate", help="emulate a quantum pipeline")
    e.add_argument("--algo", choices=("dyxl", "improved"), required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--kappa", type=float, required=True)
    e.add_argument("--lambda2", type=float, default=1.0)
    e.add_argument("--s", type=int, required=True)
    e.add_argument("--eps1", type=float, default=0.0)
    e.add_argument("--eps2", type=float, default=0.0)
    e.add_argument("--mode", choices=("exact", "grid", "stochastic"), default="exact")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--ledger", choices=("analytic", "counted"), default="analytic")
    e.add_argument("--params", default=None, help="JSON cost parameters")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_emulate)

    w = sub.add_parser("sweep", help="iteration-count sweep")
    w.add_argument("--spec", required=True)
    w.add_argument("--out-dir", required=True)
    w.add_argument("--plot", action="store_true")
    w.add_argument("--jobs", type=int, default=1)
    w.set_defaults(func=cmd_sweep)

    t = sub.add_parser("cost", help="analytic cost comparison table")
    t.add_argument("--params", default=None, help="JSON cost parameters")
    t.add_argument("--s-max", type=int, required=True)
    t.add_argument("--kappa", type=float, default=10.0)
    t.add_argument("--k", type=int, default=16)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_cost)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        with np.errstate(all="ignore"):
            return args.func(args)
    except Exception as exc:  # noqa: BLE001 - top-level error reporting
        print(f"qaop {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
