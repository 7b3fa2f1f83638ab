"""Command line: ``verify``, ``dump`` and ``show-config``.

Exit status: 0 when every check passes, 1 when any check fails, 2 for
configuration or I/O errors (reported before any computation starts).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .verify import DUMPS, ConfigError, VerifyConfig, dump_csv, run_battery

log = logging.getLogger("subspace_problem")


def _parse_tol(items):
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects check=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"--tol value for {key!r} is not a number: {val!r}") from None
    return out


def resolve_config(args) -> VerifyConfig:
    """Config file (JSON) first, then flag overrides."""
    doc = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from None
    cfg = VerifyConfig.from_dict(doc)
    if args.n_max is not None:
        cfg.n_max = args.n_max
    if args.trunc_N is not None:
        cfg.trunc_N = args.trunc_N
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = args.out
    cfg.tolerances = {**cfg.tolerances, **_parse_tol(args.tol)}
    cfg.validate()
    return cfg


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--n-max", type=int, dest="n_max", help="largest index for bound-only checks")
    common.add_argument("--trunc-N", type=int, dest="trunc_N", help="operator truncation N")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", action="append", metavar="CHECK=VALUE",
                        help="override a tolerance (repeatable)")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="subspace-verify",
                                description="Numerical verification battery for the outer-function construction.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the battery and write report.json")
    d = sub.add_parser("dump", parents=[common], help="write a CSV for plotting")
    d.add_argument("what", choices=DUMPS)
    d.add_argument("--k", type=int, default=1, help="weight level (weight dump)")
    d.add_argument("--n", type=int, default=1, help="outer function index (exponent dump)")
    d.add_argument("--grid", type=int, help="grid size per axis")
    sub.add_parser("show-config", parents=[common], help="print the resolved config")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "show-config":
        print(json.dumps({"config": cfg.to_dict(), "config_hash": cfg.digest()},
                         sort_keys=True, indent=2))
        return 0

    out = Path(cfg.out_dir)
    if args.command == "dump":
        opts = {"k": args.k, "n": args.n, "grid": args.grid}
        try:
            path = dump_csv(args.what, cfg, out / f"{args.what}.csv", **opts)
        except (OSError, ValueError) as exc:
            print(f"dump failed: {exc}", file=sys.stderr)
            return 2
        print(path)
        return 0

    report = run_battery(cfg)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json())
    except OSError as exc:
        print(f"cannot write report to {out}: {exc.strerror}", file=sys.stderr)
        return 2
    for r in report.records:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag}  {r.name:<36s} {r.status:<10s} quantity={r.quantity:.3e} bound={r.bound:.3e}")
    s = report.summary()
    print(f"{s['passed']}/{s['total']} checks passed; report: {out / 'report.json'}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
