"""Command line interface: ``isospec certify``, ``isospec jmap verify``, ``isospec family emit``."""
from __future__ import annotations

import argparse
import json
import sys

from .. import heatprobe, jmaps, mat
from .config import Config, ConfigError, load_config, parse_mu
from .report import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, emit_report, run_certification


class _Parser(argparse.ArgumentParser):
    # usage errors are config errors, not argparse's default exit 2 (which means "verdict fail")
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isospec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="run every check and write a JSON certificate")
    c.add_argument("--t", type=float, help="family parameter t (radians)")
    c.add_argument("--tprime", type=float, help="family parameter t' (radians)")
    c.add_argument("--n", type=int, help="CP^n / S^(2n+1) dimension parameter (default 4)")
    c.add_argument("--mu", type=str, help='weights as "a,b;c,d;..." (default "1,0;0,1;1,1;2,-1")')
    c.add_argument("--samples", type=int, help="random samples per check (default 100)")
    c.add_argument("--seed", type=int, help="base seed (default 42)")
    c.add_argument("--heatprobe", action="store_true", default=None, help="also run the Monte Carlo heat probe")
    c.add_argument("--mc-samples", type=int, dest="mc_samples", help="Monte Carlo samples per metric (default 20000)")
    c.add_argument("--out", help="certificate path (default stdout)")
    c.add_argument("--dump-curvature", dest="dump_curvature", help="CSV of curvature samples for t")
    c.add_argument("--config", help="JSON file with the same keys; command-line values win")

    j = sub.add_parser("jmap", help="inspect j-map pair files")
    jsub = j.add_subparsers(dest="action", required=True, parser_class=_Parser)
    v = jsub.add_parser("verify", help="validate one pair, or test two pairs for isospectrality")
    v.add_argument("pairs", nargs="+", metavar="pair.json")

    f = sub.add_parser("family", help="the reconstructed family j(t)")
    fsub = f.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = fsub.add_parser("emit", help="write j(t) as a pair file")
    e.add_argument("--t", type=float, required=True)
    e.add_argument("--out", required=True)
    return parser


def _config_from_args(args) -> Config:
    raw = load_config(args.config) if args.config else {}
    for key in ("t", "tprime", "n", "samples", "seed", "heatprobe", "mc_samples"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    if args.mu is not None:
        raw["mu"] = parse_mu(args.mu)
    return Config.from_json(raw)


def _certify(args) -> int:
    try:
        config = _config_from_args(args)
    except (ConfigError, TypeError) as exc:
        print(f"isospec certify: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.dump_curvature and not config.heatprobe:
        print("isospec certify: config error: --dump-curvature needs --heatprobe", file=sys.stderr)
        return EXIT_CONFIG
    samples: list = []
    cert = run_certification(config, samples_out=samples)
    code = emit_report(cert, args.out)
    if args.dump_curvature:
        heatprobe.write_curvature_csv(samples, args.dump_curvature)
    for chk in cert.checks:
        if chk.status == "fail":
            print(f"FAIL {chk.id}: residual {chk.residual} > {chk.tolerance}; {chk.notes}", file=sys.stderr)
    print(f"verdict: {cert.verdict['status']}", file=sys.stderr)
    return code


def _jmap_verify(args) -> int:
    if len(args.pairs) > 2:
        print("isospec jmap verify: give one or two pair files", file=sys.stderr)
        return EXIT_CONFIG
    try:
        pairs = [jmaps.read_pair(p) for p in args.pairs]
    except (OSError, ValueError, KeyError) as exc:
        print(f"isospec jmap verify: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = []
    for path, j in zip(args.pairs, pairs):
        report.append({
            "file": path,
            "m": j.m,
            "generic": jmaps.is_generic(j),
            "commutant_dimension": mat.commutant_dimension(j),
            "obstruction": jmaps.equivalence_obstruction(j),
        })
    out = {"pairs": report}
    code = EXIT_PASS
    if len(pairs) == 2:
        if pairs[0].m != pairs[1].m:
            out["isospectral"] = False
            out["residual"] = None
        else:
            res = jmaps.is_isospectral_pair(*pairs)
            out["isospectral"] = bool(res)
            out["residual"] = res.residual
        out["obstruction_delta"] = report[1]["obstruction"] - report[0]["obstruction"]
        code = EXIT_PASS if out["isospectral"] else EXIT_FAIL
    print(json.dumps(out, indent=2))
    return code


def _family_emit(args) -> int:
    try:
        jmaps.write_pair(jmaps.isospectral_family(args.t), args.out)
    except OSError as exc:
        print(f"isospec family emit: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_PASS


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "certify":
        if args.t is None and not args.config or args.tprime is None and not args.config:
            print("isospec certify: config error: --t and --tprime are required (or --config)", file=sys.stderr)
            return EXIT_CONFIG
        return _certify(args)
    if args.command == "jmap":
        return _jmap_verify(args)
    return _family_emit(args)


if __name__ == "__main__":
    sys.exit(main())
