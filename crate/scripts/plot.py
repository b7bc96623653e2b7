#!/usr/bin/env python3
"""Figures from rotabouss CSV outputs.

    plot.py growth    scan.csv            -o growth.png   # critical --scan
    plot.py bifurcation reduce.csv [sim.csv ...] -o bif.png
    plot.py series    sim.csv             -o series.png   # simulate
    plot.py spectrum  spectrum.csv        -o spec.png
"""

import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def rayleigh_of(csv):
    """Rayleigh number recorded in the manifest next to a simulate CSV."""
    m = json.loads(Path(csv).with_suffix(".manifest.json").read_text())
    return m["command"]["simulate"]["params"]["rayleigh"]


def growth(args):
    d = pd.read_csv(args.csv[0])
    fig, ax = plt.subplots()
    ax.plot(d["R"], d["re_beta_max"], "-", label="Re beta")
    if (d["im_beta_at_max"] != 0).any():
        ax.plot(d["R"], np.abs(d["im_beta_at_max"]), "--", label="|Im beta|")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("R")
    ax.set_ylabel("leading eigenvalue")
    ax.legend()
    return fig


def bifurcation(args):
    d = pd.read_csv(args.csv[0])
    fig, ax = plt.subplots()
    r = d["R"].to_numpy()
    rad = np.nan_to_num(d["radius_pred"].to_numpy(), nan=0.0)
    ax.plot(r, rad, "-", label="reduced model")
    for sim in args.csv[1:]:
        s = pd.read_csv(sim)
        amp = np.hypot(s["re_wmode"].iloc[-1], s["im_wmode"].iloc[-1])
        ax.plot([rayleigh_of(sim)], [amp], "o", color="C1")
    ax.set_xlabel("R")
    ax.set_ylabel("mode amplitude")
    ax.legend()
    return fig


def series(args):
    d = pd.read_csv(args.csv[0])
    fig, (a, b) = plt.subplots(2, 1, sharex=True)
    a.semilogy(d["t"], d["ke"], label="kinetic")
    a.semilogy(d["t"], d["te"], label="thermal")
    a.legend()
    b.plot(d["t"], d["re_wmode"], label="X")
    b.plot(d["t"], d["im_wmode"], label="Y")
    b.set_xlabel("t")
    b.legend()
    return fig


def spectrum(args):
    d = pd.read_csv(args.csv[0])
    fig, ax = plt.subplots()
    for cls, g in d.groupby("class"):
        ax.plot(g["re_beta"], g["im_beta"], ".", label=cls)
    ax.axvline(0.0, color="k", lw=0.5)
    ax.set_xlabel("Re beta")
    ax.set_ylabel("Im beta")
    ax.legend()
    return fig


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("kind", choices=["growth", "bifurcation", "series", "spectrum"])
    p.add_argument("csv", nargs="+")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args()
    fig = {"growth": growth, "bifurcation": bifurcation, "series": series, "spectrum": spectrum}[args.kind](args)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
