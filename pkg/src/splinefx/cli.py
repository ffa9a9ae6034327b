"""Command-line entry point.

Subcommands:
  run CONFIG [--set path=value ...] [--dump-grid FILE [--grid-res N]]
  sweep CONFIG [--jobs N] [--set path=value ...]
  verify
  fetch-digits DEST

Exit codes: 0 success, 1 runtime/check failure, 2 config or usage error.
The digits dataset directory may also be pointed at via SPLINEFX_DIGITS.
"""

from __future__ import annotations

import argparse
import os
import sys
import urllib.error
import urllib.request
from pathlib import Path

DIGITS_URLS = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/optdigits/optdigits.tra",
    "https://archive.ics.uci.edu/ml/machine-learning-databases/optdigits/optdigits.tes",
)
DIGITS_ENV_VAR = "SPLINEFX_DIGITS"


def _load(config_path: str, overrides: list[str]):
    from .config import apply_overrides, load_config

    cfg = load_config(config_path)
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    scfg = cfg.get("stream", {})
    if scfg.get("kind") == "digits" and not scfg.get("path"):
        env = os.environ.get(DIGITS_ENV_VAR)
        if env:
            scfg["path"] = env
    return cfg


def cmd_run(args) -> int:
    from .config import ConfigError, dump_boundary_grid, run_experiment

    try:
        cfg = _load(args.config, args.set or [])
    except (ConfigError, FileNotFoundError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        log = run_experiment(cfg)
    except Exception as e:
        print(f"run failed: {e}", file=sys.stderr)
        return 1
    out = Path(cfg.get("output_dir", "runs")) / cfg["experiment"]
    print(f"{cfg['experiment']}: T={len(log.t)} final_regret={log.final_regret:.4f} "
          f"final_acc={log.final_acc:.4f} -> {out}")
    if args.dump_grid:
        try:
            dump_boundary_grid(log.meta["_model"], args.dump_grid, resolution=args.grid_res)
        except Exception as e:
            print(f"boundary grid export failed: {e}", file=sys.stderr)
            return 1
        print(f"boundary grid -> {args.dump_grid}")
    return 0


def cmd_sweep(args) -> int:
    from .config import ConfigError
    from .trainer import sweep, write_summary_csv

    try:
        cfg = _load(args.config, args.set or [])
    except (ConfigError, FileNotFoundError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        logs = sweep(cfg, jobs=args.jobs)
    except Exception as e:
        print(f"sweep failed: {e}", file=sys.stderr)
        return 1
    out = Path(cfg.get("output_dir", "runs")) / cfg["experiment"]
    write_summary_csv(out / "summary.csv", logs)
    for log in logs:
        print(f"{log.meta['run_id']}: final_regret={log.final_regret:.4f} "
              f"final_acc={log.final_acc:.4f}")
    print(f"{len(logs)} runs -> {out / 'summary.csv'}")
    return 0


def cmd_verify(_args) -> int:
    from .verify import run_all

    results = run_all()
    width = max(len(r.name) for r in results)
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"[{mark}] {r.name:<{width}}  {r.detail}  ({r.seconds:.2f}s)")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def cmd_fetch_digits(args) -> int:
    from .streams import DIGITS_COLS, DIGITS_ROWS, load_digits_file

    dest = Path(args.dest)
    if not dest.exists():
        dest.parent.mkdir(parents=True, exist_ok=True)
        chunks = []
        for url in DIGITS_URLS:
            print(f"fetching {url} ...")
            try:
                with urllib.request.urlopen(url, timeout=60) as resp:
                    chunks.append(resp.read().decode())
            except (urllib.error.URLError, OSError) as e:
                print(f"download failed: {e}\n"
                      f"Retrieve the two optdigits files (.tra and .tes) manually from\n"
                      f"the UCI repository, concatenate them into {dest}, or point\n"
                      f"{DIGITS_ENV_VAR} at an existing copy. The digits configs can also\n"
                      f"run on the bundled scikit-learn subset via\n"
                      f"--set stream.use_bundled_fallback=true.", file=sys.stderr)
                return 1
        dest.write_text("".join(c if c.endswith("\n") else c + "\n" for c in chunks))
    rows = load_digits_file(dest)
    if len(rows) != DIGITS_ROWS:
        print(f"validation failed: {dest} has {len(rows)} rows, expected {DIGITS_ROWS} "
              f"of {DIGITS_COLS} columns", file=sys.stderr)
        return 1
    print(f"{dest}: {len(rows)} rows x {DIGITS_COLS} columns OK")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="splinefx", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--set", action="append", metavar="PATH=VALUE",
                       help="override a config value by dotted path")
    p_run.add_argument("--dump-grid", metavar="FILE",
                       help="export dense-grid predictions (2-input models) as CSV")
    p_run.add_argument("--grid-res", type=int, default=100)
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="expand sweep axes and run all cells")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--set", action="append", metavar="PATH=VALUE")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the property-check suite")
    p_verify.set_defaults(fn=cmd_verify)

    p_fetch = sub.add_parser("fetch-digits", help="download and validate the digits corpus")
    p_fetch.add_argument("dest")
    p_fetch.set_defaults(fn=cmd_fetch_digits)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
