"""Command-line entry point: gen | verify | scaling | profile | bench | fit."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .bench import InsufficientData, SolverSpec, WitnessError, campaign, fit_loglinear, parse_range, read_records
from .bundle import BundleError, default_output_dir, generate, verify_bundle
from .numeric import derive_seed
from .reduce import InconsistentInstance
from .scaling import predict, profile_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _gen_one(kwargs: dict, out: str, quiet: bool) -> str:
    b = generate(**kwargs)
    path = b.write(out)
    if not quiet:
        m = b.meta
        print(f"{path}: N={m['N']} cnf {m['cnf_vars']} vars / {m['cnf_clauses']} clauses, "
              f"ising {m['ising_spins']} spins / {m['ising_couplings']} couplings, E0={m['ising_E0']}")
    return str(path)


def cmd_gen(args) -> int:
    modes = [args.bits is not None, args.np is not None or args.nq is not None,
             args.p is not None or args.q is not None]
    if sum(modes) != 1:
        raise UsageError("give exactly one of --bits, --np/--nq, --p/--q")
    kwargs = dict(seed=args.seed, reduced=not args.no_reduce, planted=not args.no_planted,
                  allow_square=args.allow_square, trace=args.trace, dump=args.dump)
    if args.bits is not None:
        kwargs.update(n_p=args.bits, n_q=args.bits)
    elif modes[1]:
        if args.np is None or args.nq is None:
            raise UsageError("--np and --nq go together")
        kwargs.update(n_p=args.np, n_q=args.nq)
    else:
        if args.p is None or args.q is None:
            raise UsageError("--p and --q go together")
        if args.batch > 1:
            raise UsageError("--batch needs sampled primes")
        kwargs.update(p=args.p, q=args.q)
    out = args.out or default_output_dir()
    if args.batch <= 1:
        _gen_one(kwargs, out, args.quiet)
        return EXIT_OK
    jobs = []
    for i in range(args.batch):
        kw = dict(kwargs, seed=derive_seed(args.seed, "batch", i))
        jobs.append((kw, str(Path(out) / f"{i:04d}")))
    with ProcessPoolExecutor(max_workers=args.workers) as pool:
        futures = [pool.submit(_gen_one, kw, o, args.quiet) for kw, o in jobs]
        for fut in futures:
            fut.result()
    return EXIT_OK


def cmd_verify(args) -> int:
    status = EXIT_OK
    for directory in args.bundle:
        rep = verify_bundle(directory)
        if len(args.bundle) > 1:
            print(f"== {directory}")
        print(rep)
        if not rep.passed:
            status = EXIT_FAIL
    return status


def cmd_scaling(args) -> int:
    rep = predict(args.bits)
    sys.stdout.write(rep.to_keyvalue() if args.kv else rep.to_text())
    if args.profile:
        print("profile " + " ".join(str(m) for m in rep.profile))
    return EXIT_OK


def cmd_profile(args) -> int:
    d_list = [d for text in args.bits for d in parse_range(text)]
    data = profile_csv(d_list)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())
    return EXIT_OK


def cmd_bench(args) -> int:
    specs = [SolverSpec.parse(s) for s in args.solver]

    def show(rec):
        if not args.quiet:
            print(f"d={rec.d} seed={rec.seed} {rec.solver}: {rec.outcome} "
                  f"{rec.wall_time_s:.3f}s verified={int(rec.verified)}", flush=True)

    try:
        records = campaign(parse_range(args.bits), args.reps, specs, args.timeout, args.out,
                           campaign_seed=args.seed, workdir=args.workdir, workers=args.workers,
                           progress=show)
    except WitnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    anomalies = [r for r in records if r.anomaly]
    if anomalies:
        print(f"error: {len(anomalies)} runs reported UNSAT on satisfiable planted instances", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_fit(args) -> int:
    records = read_records(args.input)
    solvers = sorted({r.solver for r in records})
    if args.solver:
        solvers = [args.solver]
    status = EXIT_OK
    for name in solvers:
        try:
            fit = fit_loglinear([r for r in records if r.solver == name])
        except InsufficientData as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            status = EXIT_FAIL
            continue
        print(f"solver {name}")
        sys.stdout.write(str(fit))
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="factorsat", description=__doc__)
    ap.add_argument("--version", action="version", version=f"factorsat {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance bundle")
    g.add_argument("--bits", type=int, help="bit-length d of both factors")
    g.add_argument("--np", type=int, help="bit-length of p")
    g.add_argument("--nq", type=int, help="bit-length of q")
    g.add_argument("--p", type=int, help="explicit prime p")
    g.add_argument("--q", type=int, help="explicit prime q")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="bundle directory (default: $FACTORSAT_OUT or ./bundle)")
    g.add_argument("--no-reduce", action="store_true", help="skip Boolean preprocessing")
    g.add_argument("--no-planted", action="store_true", help="omit p, q and planted spins")
    g.add_argument("--allow-square", action="store_true", help="allow p == q")
    g.add_argument("--batch", type=int, default=1, help="number of bundles, written to OUT/0000 ...")
    g.add_argument("--workers", type=int, default=None)
    g.add_argument("--trace", action="store_true", help="also write reduce.trace")
    g.add_argument("--dump", action="store_true", help="also write circuit.txt")
    g.add_argument("--quiet", action="store_true")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="check one or more bundles")
    v.add_argument("bundle", nargs="+")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scaling", help="closed-form pre-reduction sizes")
    s.add_argument("--bits", type=int, required=True)
    s.add_argument("--kv", action="store_true", help="key=value output")
    s.add_argument("--profile", action="store_true", help="also print the column profile")
    s.set_defaults(func=cmd_scaling)

    p = sub.add_parser("profile", help="column-profile CSV")
    p.add_argument("--bits", nargs="+", required=True, help="values or ranges like 4..12")
    p.add_argument("--out")
    p.set_defaults(func=cmd_profile)

    b = sub.add_parser("bench", help="run external solvers over planted instances")
    b.add_argument("--solver", action="append", default=[], help="'name:cmd {cnf}', repeatable")
    b.add_argument("--bits", required=True, help="range like 8..16")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--timeout", type=float, default=3600.0)
    b.add_argument("--seed", type=int, default=0, help="campaign seed")
    b.add_argument("--out", required=True)
    b.add_argument("--workdir")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--quiet", action="store_true")
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("fit", help="log-linear fit of median runtimes")
    f.add_argument("--in", dest="input", required=True)
    f.add_argument("--solver")
    f.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.command is None:
            ap.print_usage(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (BundleError, InconsistentInstance, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def cmd_dispatch(argv) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
