"""Plot secrecy rate against blocklength from sweep CSVs.

Usage: python scripts/plot_sweep.py OUT_DIR [--save plot.png]
"""

import argparse
import glob
import os

import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("dir", help="directory written by `polarsec sweep --out`")
    ap.add_argument("--save", help="write the figure here instead of showing it")
    args = ap.parse_args()

    files = sorted(glob.glob(os.path.join(args.dir, "sweep_*.csv")))
    if not files:
        raise SystemExit(f"no sweep_*.csv files in {args.dir}")

    fig, axes = plt.subplots(1, len(files), figsize=(6 * len(files), 4.5), squeeze=False)
    for ax, path in zip(axes[0], files):
        df = pd.read_csv(path)
        ok = df[df["R_s"].notna()]
        for (family, variant), g in ok.groupby(["family", "variant"]):
            g = g.sort_values("n")
            style = "-o" if variant == "bound2" else "--s"
            ax.plot(g["n"], g["R_s"], style, label=f"{family} {variant}")
        bounds = df.drop_duplicates("n").sort_values("n")
        ax.plot(bounds["n"], bounds["upper2nd"], "k:", label="upper (2nd order)")
        ax.plot(bounds["n"], bounds["lower2nd"], "k-.", label="lower (2nd order)")
        ax.axhline(bounds["cs"].iloc[0], color="grey", lw=0.8, label="C_s")
        ax.set_xscale("log", base=2)
        ax.set_xlabel("n")
        ax.set_ylabel("R_s")
        ax.set_title(f"p_b={df['p_b'].iloc[0]}, p_e={df['p_e'].iloc[0]}")
        ax.legend(fontsize=7)
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
