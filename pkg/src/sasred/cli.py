"""Command-line front end: ``sasred verify ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import registry
from .errors import ConfigError, NumericalError
from .numkit import FIRST, SECOND, Stencil
from .report import RunConfig
from .runner import run

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger("sasred")


def _parse_weights(text: str):
    try:
        W = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"weights are not valid JSON: {exc}") from None
    if W and not isinstance(W[0], list):
        W = [W]
    if not all(isinstance(v, int) for row in W for v in row):
        raise ConfigError("weights must be integers")
    return W


def _parse_tol(items):
    out = {}
    for item in items or []:
        for part in item.split(","):
            name, sep, value = part.partition("=")
            if not sep:
                raise ConfigError(f"tolerance override {part!r} is not name=value")
            try:
                out[name.strip()] = float(value)
            except ValueError:
                raise ConfigError(f"tolerance {name!r} has non-numeric value {value!r}") from None
    return out


def _stencil(base: Stencil, overrides: dict | None, step=None, levels=None) -> Stencil:
    merged = dict(overrides or {})
    if step is not None:
        merged["step"] = step
    if levels is not None:
        merged["richardson_levels"] = levels
    try:
        return Stencil(step=float(merged.get("step", base.step)),
                       richardson_levels=int(merged.get("richardson_levels", base.richardson_levels)),
                       order=base.order)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad stencil: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sasred", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification suites and write a JSON report")
    src = v.add_argument_group("subject")
    src.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    src.add_argument("--example", choices=sorted(registry.REGISTRY))
    src.add_argument("--k", type=int)
    src.add_argument("--a", type=int)
    src.add_argument("--b", type=int)
    src.add_argument("--weights", help='integer weights, e.g. "[-2,1,1,1]" or "[[1,-1,0],[0,1,-1]]"')
    src.add_argument("--n", type=int, help="complex dimension (ex43 block size or weight length)")

    run_ = v.add_argument_group("run")
    run_.add_argument("--samples", type=int)
    run_.add_argument("--charts", type=int)
    run_.add_argument("--chart-points", type=int)
    run_.add_argument("--cone-points", type=int)
    run_.add_argument("--seed", type=int)
    run_.add_argument("--checks", help="comma-separated check or group names")
    run_.add_argument("--tol", action="append", metavar="NAME=VALUE")
    run_.add_argument("--first-step", type=float)
    run_.add_argument("--first-levels", type=int)
    run_.add_argument("--second-step", type=float)
    run_.add_argument("--second-levels", type=int)

    out = v.add_argument_group("output")
    out.add_argument("--out", help="report path (stdout when omitted)")
    out.add_argument("--csv", help="per-point residual CSV path")
    out.add_argument("--no-timestamp", action="store_true")
    return parser


def config_from_args(args) -> tuple[RunConfig, registry.Example | None]:
    doc = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")

    example_name = args.example or doc.get("example")
    example = None
    if example_name:
        params = dict(doc.get("example_params", {}))
        params.update({k: v for k, v in (("k", args.k), ("a", args.a), ("b", args.b)) if v is not None})
        if example_name == "ex43" and args.n is not None:
            params["n"] = args.n
        example = registry.lookup(example_name.split("(")[0], **params)
        weights, n = [list(example.weights)], example.n
    else:
        weights = _parse_weights(args.weights) if args.weights else doc.get("weights")
        if weights is None:
            raise ConfigError("give --example, --weights or a config with weights")
        if weights and not isinstance(weights[0], list):
            weights = [weights]
        n = args.n or doc.get("n") or (len(weights[0]) if weights else None)
        if n is None:
            raise ConfigError("n is required when weights are empty")

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return doc.get(key, default)

    stencils = doc.get("stencils", {})
    checks = args.checks.split(",") if args.checks else doc.get("checks", ["all"])
    tolerances = dict(doc.get("tolerances", {}))
    tolerances.update(_parse_tol(args.tol))
    try:
        cfg = RunConfig(
            weights=weights,
            n=int(n),
            samples=int(pick(args.samples, "samples", 100)),
            charts=int(pick(args.charts, "charts", 10)),
            chart_points=int(pick(args.chart_points, "chart_points", 20)),
            cone_points=int(pick(args.cone_points, "cone_points", 20)),
            seed=int(pick(args.seed, "seed", 42)),
            first_stencil=_stencil(FIRST, stencils.get("first"), args.first_step, args.first_levels),
            second_stencil=_stencil(SECOND, stencils.get("second"), args.second_step, args.second_levels),
            tolerances=tolerances,
            checks=[c.strip() for c in checks if c.strip()],
            example=example.name if example else None,
            out=pick(args.out, "out", None),
            csv=pick(args.csv, "csv", None),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg, example


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, example = config_from_args(args)
        report = run(cfg, example)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    text = report.dumps(timestamp=not args.no_timestamp)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    else:
        print(text)
    if cfg.csv:
        report.write_csv(cfg.csv)
    for rec in report.checks:
        status = {True: "PASS", False: "FAIL", None: "INFO"}[rec.passed]
        log.info("%s %-22s %s", status, rec.name, rec.residual)
    return EXIT_PASS if report.verdict else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
