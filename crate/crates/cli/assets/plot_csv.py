#!/usr/bin/env python3
"""Line plot of two columns of a CSV written by `acmtm`.

    python plot_csv.py alpha_sweep.csv alpha asj --out asj.png
    python plot_csv.py alpha_selection.csv alpha frequency --group proposal --where coordinate=1
"""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    p = argparse.ArgumentParser()
    p.add_argument("csv")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--group", help="draw one line per value of this column")
    p.add_argument("--where", action="append", default=[], help="column=value filter, repeatable")
    p.add_argument("--logx", action="store_true")
    p.add_argument("--out", default="plot.png")
    args = p.parse_args()

    df = pd.read_csv(args.csv)
    for cond in args.where:
        col, val = cond.split("=", 1)
        df = df[df[col].astype(str) == val]
    df = df.groupby(([args.group] if args.group else []) + [args.x], as_index=False)[args.y].mean()

    fig, ax = plt.subplots()
    if args.group:
        for key, part in df.groupby(args.group):
            ax.plot(part[args.x], part[args.y], marker="o", label=f"{args.group}={key}")
        ax.legend(fontsize="small")
    else:
        ax.plot(df[args.x], df[args.y], marker="o")
    if args.logx:
        ax.set_xscale("log")
    ax.set_xlabel(args.x)
    ax.set_ylabel(args.y)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
