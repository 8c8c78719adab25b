"""Command line entry point: ``freecoarse <verb> ...``.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .free import ap_norm, universal_extension_check, word_norm_bounds, y_base, FreeCoarseConfig
from .groups import AbelianExpP, ParseError, parse_ap_element, parse_word
from .harness import (
    DEFAULT_OUT,
    OUT_ENV,
    SUITES,
    ConfigError,
    SpaceConfig,
    SuiteReport,
    ball_growth_csv,
    load_config,
    run_suite,
    write_report,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def _config(args) -> SpaceConfig:
    overrides = {
        "p": args.p,
        "z": args.z,
        "seed": args.seed,
        "variety": args.variety,
        "max_grade": args.max_grade,
        "max_conj_len": args.max_conj_len,
    }
    return load_config(args.config, overrides)


def cmd_run(args) -> int:
    cfg = _config(args)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in SUITES:
        raise ConfigError("suite", f"unknown suite {args.suite!r}; see list-suites")
    out = _out_dir(args)
    ok = True
    for name in names:
        report = run_suite(name, cfg)
        path = write_report(report, out)
        ok &= report.passed
        _summarise(report, path)
    return EXIT_OK if ok else EXIT_FAIL


def _summarise(report: SuiteReport, path: Path) -> None:
    print(f"{'PASS' if report.passed else 'FAIL'} {report.suite} ({len(report.checks)} checks) -> {path}")
    for c in report.checks:
        if not c.passed:
            print(f"  fail {c.name}: {json.dumps(c.witness, sort_keys=True, default=str)}")


def cmd_norm(args) -> int:
    cfg = _config(args)
    F = cfg.build_space()
    try:
        if args.word is not None:
            fc = replace(cfg, variety="all").free_config(F)
            res = word_norm_bounds(parse_word(args.word, F.window), args.radius, fc)
        else:
            fc = replace(cfg, variety="abelian").free_config(F)
            res = ap_norm(parse_ap_element(args.element, F.window, cfg.p), args.radius, fc)
    except ParseError as exc:
        print(f"parse error at position {exc.position}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(res.to_dict(), sort_keys=True, default=str))
    return EXIT_OK


def cmd_balls(args) -> int:
    cfg = _config(args)
    radii = range(1, args.max_radius + 1)
    text = ball_growth_csv(cfg, radii, args.max_n)
    if args.csv:
        Path(args.csv).write_text(text, newline="")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check_map(args) -> int:
    cfg = _config(args)
    try:
        spec = json.loads(Path(args.map).read_text())
    except FileNotFoundError:
        raise ConfigError(args.map, "map file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.map}:{exc.lineno}:{exc.colno}", exc.msg) from None
    if not isinstance(spec, dict) or not isinstance(spec.get("map"), dict):
        raise ConfigError(f"{args.map}:$.map", "must be an object of label -> element")
    target_cfg = SpaceConfig.from_dict({"space": spec.get("target", {"kind": "path", "size": 6}), "p": cfg.p})
    T = target_cfg.build_space()
    source = cfg.build_space()
    f = {}
    for x in source.window:
        label = source.window.label(x)
        if label not in spec["map"]:
            raise ConfigError(f"{args.map}:$.map.{label}", "missing image")
        try:
            f[x] = parse_ap_element(spec["map"][label], T.window, cfg.p)
        except ParseError as exc:
            raise ConfigError(f"{args.map}:$.map.{label}", f"{exc} (position {exc.position})") from None
    radii = spec.get("radii", [1, 2])
    n_max = spec.get("n_max", 4)
    target = y_base(FreeCoarseConfig(T, T.window.points[0], AbelianExpP(cfg.p)), radii=(1, 2, 3),
                    max_grade=spec.get("target_max_grade", 12))
    rep = universal_extension_check(f, cfg.free_config(source), target, n_max, radii)
    print(json.dumps(rep.to_dict(), sort_keys=True, default=str))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_list(args) -> int:
    for name, (_, desc) in SUITES.items():
        print(f"{name:26s} {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config document")
    common.add_argument("--seed", type=int)
    common.add_argument("--p", type=int, help="prime modulus")
    common.add_argument("--z", type=int, help="index of the distinguished point")
    common.add_argument("--variety", choices=("abelian", "all"))
    common.add_argument("--max-grade", type=int)
    common.add_argument("--max-conj-len", type=int)
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or {DEFAULT_OUT})")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="freecoarse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", parents=[common], help="run a verification suite")
    p.add_argument("suite", help="suite name or 'all'")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("norm", parents=[common], help="norm of one element or word")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--element", help="element of A_p(X), e.g. 'x0+2x3'")
    g.add_argument("--word", help="reduced word, e.g. 'x0 x1^-1'")
    p.add_argument("--radius", "-r", type=int, default=1)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("balls", parents=[common], help="grade sizes as CSV")
    p.add_argument("--max-radius", type=int, default=2)
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--csv", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_balls)

    p = sub.add_parser("check-map", parents=[common], help="check the extension of a map X -> A(Y)")
    p.add_argument("--map", required=True, help="JSON file with 'map' and optional 'target'")
    p.set_defaults(func=cmd_check_map)

    p = sub.add_parser("list-suites", help="list suite names")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
