"""Command-line interface: run / sweep / certify / resources.

A flat JSON config file (--config) may supply any ExperimentConfig field;
explicit command-line flags override file values.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import __version__, certify, harness
from .extraction import PROTOCOL_NAMES
from .logical import EQ1_SEQUENCE, THETA_MODES


def _add_config_flags(p: argparse.ArgumentParser, many: bool = False):
    nargs = "+" if many else None
    p.add_argument("--config", help="flat JSON file with ExperimentConfig fields")
    p.add_argument("--protocol", nargs=nargs, choices=PROTOCOL_NAMES)
    p.add_argument("--env", choices=("depolarizing", "x-dominant", "y-dominant",
                                     "z-dominant", "zero"))
    p.add_argument("--p", type=float, nargs=nargs)
    p.add_argument("--q", type=int, nargs=nargs)
    p.add_argument("--trials", type=int)
    p.add_argument("--mode", choices=harness.MODES)
    p.add_argument("--max-weight", type=int, dest="max_weight")
    p.add_argument("--class-samples", type=int, dest="class_samples")
    p.add_argument("--tail-samples", type=int, dest="tail_samples")
    p.add_argument("--seed", type=int)
    p.add_argument("--sequence")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--theta", choices=THETA_MODES)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steane-sm",
        description="[[7,1,3]]-code syndrome-measurement strategy simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment cell")
    _add_config_flags(run)

    sweep = sub.add_parser("sweep", help="run a (protocol, p, q) grid")
    _add_config_flags(sweep, many=True)

    cert = sub.add_parser("certify", help="single-fault FT certification")
    cert.add_argument("--seed", type=int, default=0)
    cert.add_argument("--draw-seeds", type=int, default=2, dest="draw_seeds")

    sub.add_parser("resources", help="print the per-SM-round qubit cost table")
    return parser


_SCALAR_FIELDS = {f.name for f in dataclasses.fields(harness.ExperimentConfig)}


def _load_config(args, scalar_only=("protocol", "p", "q")) -> dict:
    """Merge config file values and CLI overrides into a field dict."""
    values = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_vals = json.load(fh)
        unknown = set(file_vals) - _SCALAR_FIELDS
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        values.update(file_vals)
    for name in _SCALAR_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    for name in scalar_only:
        if isinstance(values.get(name), list):
            if len(values[name]) != 1:
                raise SystemExit(f"'run' takes exactly one --{name}")
            values[name] = values[name][0]
    return values


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(results, fmt: str) -> str:
    if fmt == "json":
        return harness.to_json_lines(results)
    return harness.to_csv(results)


def cmd_run(args) -> int:
    config = harness.ExperimentConfig(**_load_config(args))
    result = harness.run_experiment(config)
    _emit(_render([result], args.format), args.out)
    return 0


def cmd_sweep(args) -> int:
    values = _load_config(args, scalar_only=())
    protocols = values.pop("protocol", "shor")
    p_values = values.pop("p", 1e-4)
    q_values = values.pop("q", 50)
    as_tuple = lambda v: tuple(v) if isinstance(v, (list, tuple)) else (v,)
    protocols, p_values, q_values = map(as_tuple, (protocols, p_values, q_values))
    base = harness.ExperimentConfig(protocol=protocols[0], p=p_values[0],
                                    q=q_values[0], **values)
    spec = harness.SweepSpec(base=base, protocols=protocols,
                             p_values=p_values, q_values=q_values,
                             workers=args.workers)
    results = harness.run_sweep(spec)
    for entry in results:
        if not isinstance(entry, harness.ExperimentResult):
            cfg, msg = entry
            print(f"cell failed (protocol={cfg.protocol} p={cfg.p} "
                  f"q={cfg.q}): {msg}", file=sys.stderr)
    _emit(_render(results, args.format), args.out)
    return 0


def cmd_certify(args) -> int:
    ok = True
    for name in ("steane", "shor"):
        report = certify.certify_gadget(name, seed=args.seed,
                                        draw_seeds=args.draw_seeds)
        status = "FT" if report.fault_tolerant else "NOT FT"
        print(f"{name}: {report.n_locations} fault locations, "
              f"{report.n_injections} injections -> {status}")
        for loc, op, which, ds in report.failures[:10]:
            print(f"  residual weight > 1: location {loc}, fault {op}, "
                  f"input |{which}_L>, draw stream {ds}")
        ok &= report.fault_tolerant
    witness = certify.find_nonft_witness("single", seed=args.seed)
    if witness is None:
        print("single: no uncorrectable single fault found (unexpected)")
        ok = False
    else:
        loc, op, which, infid = witness
        print(f"single: NOT FT as expected -- fault {op} at location {loc} "
              f"on |{which}_L> leaves logical infidelity {infid:.3g} "
              f"after perfect final SM")
    return 0 if ok else 1


def cmd_resources(args) -> int:
    print("protocol            qubits/SM-round")
    for name in ("single", "single-repeated", "shor-set", "shor",
                 "steane", "steane-repeated"):
        print(f"{name:<20}{harness.RESOURCE_TABLE[name]}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "sweep": cmd_sweep,
               "certify": cmd_certify, "resources": cmd_resources}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
