"""Command line front end.

Every command loads an experiment config, runs one pipeline stage and writes
its artifacts under ``--out`` (default: ``$CONJCOUNT_OUT/<config name>`` or
``./conjcount_out/<config name>``).  Errors exit with a code per error kind
and print ``error[<code>]: message`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import load_config, shipped_configs
from .errors import ConjCountError
from .pipeline import ArtifactDir, Experiment, dumps, format_float

log = logging.getLogger("conjcount")

OUT_ENV = "CONJCOUNT_OUT"

EXIT_CODES = {
    "error": 1,
    "usage": 2,
    "unstable_coding": 3,
    "coding": 4,
    "budget": 5,
    "audit": 6,
    "convergence": 7,
    "empty_spectrum": 8,
    "verify_failed": 9,
}

COUNT_KINDS = ("full", "coset", "cylinder", "conjugacy")


def _out_dir(args, cfg) -> ArtifactDir:
    if args.out:
        return ArtifactDir(args.out)
    root = os.environ.get(OUT_ENV, "conjcount_out")
    return ArtifactDir(Path(root) / cfg.name)


def _experiment(args):
    cfg = load_config(args.config)
    return cfg, Experiment(cfg, jobs=args.jobs, depth=args.depth, tmax=args.tmax)


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


def cmd_acceptor(args):
    cfg, exp = _experiment(args)
    out = _out_dir(args, cfg)
    out.write_text("acceptor.txt", exp.geodesic.to_text())
    _emit({"states": exp.geodesic.n_states, "edges": len(exp.geodesic.edges), "file": "acceptor.txt"})


def cmd_coset_acceptor(args):
    cfg, exp = _experiment(args)
    out = _out_dir(args, cfg)
    a = exp.coset
    out.write_text("coset_acceptor.txt", a.to_text())
    _emit({"states": a.n_states, "edges": len(a.edges), "verified_len": a.verified_len,
           "signature_radius": a.signature_radius, "file": "coset_acceptor.txt"})


def cmd_pressure(args):
    cfg, exp = _experiment(args)
    out = _out_dir(args, cfg)
    curve = exp.pressure()
    out.write("pressure_curve.csv", curve.to_csv)
    _emit({"depth": exp.depth, "root": exp.delta[0], "file": "pressure_curve.csv"})


def cmd_delta(args):
    cfg, exp = _experiment(args)
    from .spectral import maximal_path_multiplicity

    delta, maximal = exp.delta
    _emit({"delta": delta, "depth": exp.depth, "maximal_components": sorted(maximal),
           "m": maximal_path_multiplicity(exp.components, maximal)})


def cmd_count(args):
    cfg, exp = _experiment(args)
    out = _out_dir(args, cfg)
    series = exp.count(args.kind, args.prefix)
    name = f"count_{args.kind}.csv" if args.kind != "cylinder" else f"count_cylinder_{args.prefix or 'e'}.csv"
    out.write(name, series.to_csv)
    _emit({"kind": series.kind, "T_max": float(series.thresholds[-1]), "N": series.counts[-1], "file": name})


def cmd_fit(args):
    cfg, exp = _experiment(args)
    out = _out_dir(args, cfg)
    series = exp.count(args.kind, args.prefix)
    window = cfg.conj_fit_window if args.kind == "conjugacy" else cfg.fit_window
    fit = exp.fit(series, window)
    out.write(f"count_{args.kind}.csv", series.to_csv)
    out.write(f"fit_{args.kind}.json", lambda fh: fh.write(dumps(fit.to_dict())))
    _emit(fit.to_dict())


def cmd_verify(args):
    cfg, exp = _experiment(args)
    checks = exp.verify()
    failed = 0
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    if failed:
        print(f"{failed} check(s) failed", file=sys.stderr)
        return EXIT_CODES["verify_failed"]
    return 0


def cmd_run(args):
    cfg, exp = _experiment(args)
    out = _out_dir(args, cfg)
    summary = exp.summary(out)
    _print_report(summary)


def cmd_report(args):
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    path = out.root / "summary.json"
    if not path.exists():
        print(f"error[usage]: no summary at {path}; run the 'run' command first", file=sys.stderr)
        return EXIT_CODES["usage"]
    _print_report(json.loads(path.read_text()))
    return 0


def _print_report(s: dict) -> None:
    f = format_float
    lines = [
        f"config            {s['config']} ({s['config_hash']})",
        f"g                 {s['g']}",
        f"delta (pressure)  {f(s['delta_pressure'])}",
        f"delta (fit)       {f(s['delta_fit'])}",
        f"conjugacy rate    {f(s['conjugacy_rate'])}",
        f"ratio             {f(s['ratio'])}",
        f"m                 {s['m']}",
        f"lattice           {s['lattice_verdict']}" + (f" (span {f(s['lattice_span'])})" if s.get("lattice_span") else ""),
        f"mixing flag       {s['mixing_hypothesis_flag']}",
        f"C estimate        {f(s['C_estimate'])}",
        "length audit      " + ", ".join(f"l={r['depth']}: {r['max_error']:.3g}" for r in s["length_audit"]),
    ]
    print("\n".join(lines))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True,
                        help=f"config file, or a shipped name ({', '.join(shipped_configs())})")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV}/<name>)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for enumeration")
    common.add_argument("--depth", type=int, help="cylinder depth for the pressure computation")
    common.add_argument("--tmax", type=float, help="override the counting threshold")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="conjcount", description="Conjugacy-class orbit counting experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("acceptor", parents=[common], help="write the geodesic acceptor").set_defaults(fn=cmd_acceptor)
    sub.add_parser("coset-acceptor", parents=[common], help="build and verify the coset acceptor").set_defaults(
        fn=cmd_coset_acceptor)
    sub.add_parser("pressure", parents=[common], help="pressure curve CSV").set_defaults(fn=cmd_pressure)
    sub.add_parser("delta", parents=[common], help="critical exponent of the system").set_defaults(fn=cmd_delta)
    for name, fn in (("count", cmd_count), ("fit", cmd_fit)):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("kind", choices=COUNT_KINDS if name == "count" else ("full", "coset", "conjugacy"))
        sp.add_argument("--prefix", help="cylinder prefix word (count cylinder)")
        sp.set_defaults(fn=fn)
    sub.add_parser("verify", parents=[common], help="oracle and invariant checks").set_defaults(fn=cmd_verify)
    sub.add_parser("run", parents=[common], help="full pipeline with summary").set_defaults(fn=cmd_run)
    sub.add_parser("report", parents=[common], help="print a stored summary").set_defaults(fn=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.jobs < 1:
        print("error[usage]: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CODES["usage"]
    if args.command == "count" and args.kind == "cylinder" and not args.prefix:
        print("error[usage]: count cylinder needs --prefix", file=sys.stderr)
        return EXIT_CODES["usage"]
    try:
        rc = args.fn(args)
    except ConjCountError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.code, 1)
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
