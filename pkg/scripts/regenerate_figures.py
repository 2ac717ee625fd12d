"""Regenerate the CSV data (and gnuplot scripts) behind figures 1-6."""

import argparse
import os
import time

from orthorates.cli import FIGURE_ALPHAS, build_figure


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures")
    ap.add_argument("--figures", default="1,2,3,4,5,6")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for fig in (int(f) for f in args.figures.split(",")):
        t0 = time.perf_counter()
        panels = build_figure(fig, args.out, args.threads, FIGURE_ALPHAS)
        print(f"figure {fig}: {len(panels)} panels, {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
