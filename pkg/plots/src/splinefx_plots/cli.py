"""Figure scripts: one subcommand per figure kind.

  splinefx-plots regret OUT.png STEPS.csv [STEPS.csv ...] [--markers 500 1000]
  splinefx-plots bitwidth OUT.png SUMMARY.csv
  splinefx-plots capacity OUT.png SUMMARY.csv [--axis G|N]
  splinefx-plots boundary OUT.png GRID.csv
  splinefx-plots running-acc OUT.png STEPS.csv [STEPS.csv ...]

Nonzero exit with a message on missing or malformed inputs.
"""

from __future__ import annotations

import argparse
import sys

from . import figures


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="splinefx-plots", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regret")
    p.add_argument("out")
    p.add_argument("csvs", nargs="+")
    p.add_argument("--markers", type=int, nargs="*", default=[500, 1000])
    p.set_defaults(fn=lambda a: figures.plot_regret(a.csvs, a.out, markers=tuple(a.markers)))

    p = sub.add_parser("bitwidth")
    p.add_argument("out")
    p.add_argument("summary")
    p.set_defaults(fn=lambda a: figures.plot_bitwidth_sweep(a.summary, a.out))

    p = sub.add_parser("capacity")
    p.add_argument("out")
    p.add_argument("summary")
    p.add_argument("--axis", choices=["G", "N"], default="G")
    p.set_defaults(fn=lambda a: figures.plot_capacity_sweep(a.summary, a.out, axis=a.axis))

    p = sub.add_parser("boundary")
    p.add_argument("out")
    p.add_argument("grid")
    p.set_defaults(fn=lambda a: figures.plot_decision_boundary(a.grid, a.out))

    p = sub.add_parser("running-acc")
    p.add_argument("out")
    p.add_argument("csvs", nargs="+")
    p.set_defaults(fn=lambda a: figures.plot_running_accuracy(a.csvs, a.out))

    args = parser.parse_args(argv)
    try:
        out, _ = args.fn(args)
    except (FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
