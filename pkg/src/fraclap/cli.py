"""Command-line entry point: ``fraclap run`` and ``fraclap selftest``."""

from __future__ import annotations

import argparse
import sys

from fraclap import harness


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fraclap", description="Fractional Laplacian comparison harness")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a comparison suite")
    run.add_argument("--suite", choices=harness.SUITES, help="suite name (overrides the config)")
    run.add_argument("--config", help="INI scenario file; suite defaults are used when omitted")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--format", choices=("csv", "json"), help="report format (default csv)")
    run.add_argument("--workers", type=int, help="thread pool width (default FRACLAP_WORKERS)")
    st = sub.add_parser("selftest", help="special-function and quadrature checks")
    st.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            cfg = harness.default_config("specfun-selftest")
            fmt, out = args.format, None
        else:
            if args.config:
                cfg = harness.load_config(args.config, args.suite)
            elif args.suite:
                cfg = harness.default_config(args.suite)
            else:
                print("error: give --suite or --config", file=sys.stderr)
                return 2
            fmt = args.format or cfg.fmt
            out = args.out or cfg.output
        rows, status = harness.run_suite(cfg, getattr(args, "workers", None))
        text = harness.emit_report(rows, fmt, out)
    except (harness.ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if out is None:
        sys.stdout.write(text)
    n_fail = sum(r.verdict == "fail" for r in rows)
    n_inc = sum(r.verdict == "inconclusive" for r in rows)
    print(f"{cfg.suite}: {len(rows)} rows, {n_fail} fail, {n_inc} inconclusive", file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
