#!/usr/bin/env python3
"""
Plots of a bound sweep (results/bounds.csv): Delsarte and triple bounds
against n, and the gap between them.
"""

import argparse
from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).parent.parent))

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def load_sweep(csv_path: Path) -> pd.DataFrame:
    if not csv_path.exists():
        print(f"Sweep table not found: {csv_path}")
        return pd.DataFrame()
    return pd.read_csv(csv_path)


def plot_bounds(df: pd.DataFrame, output_dir: Path):
    """Both bounds on a log scale, one panel per d."""
    for d, part in df.groupby("d"):
        plt.figure(figsize=(10, 6))
        plt.semilogy(part["n"], part["delsarte"], marker="o", linewidth=2, color="blue", label="Delsarte LP")
        plt.semilogy(part["n"], part["triple"], marker="s", linewidth=2, color="green", label="triple SDP")
        plt.xlabel("n", fontsize=12)
        plt.ylabel("upper bound on A(n, d)", fontsize=12)
        plt.title(f"Upper bounds on A(n, {d})", fontsize=14, fontweight="bold")
        plt.grid(True, alpha=0.3)
        plt.legend()
        plt.tight_layout()
        out = output_dir / f"bounds_d{d}.png"
        plt.savefig(out, dpi=150)
        plt.close()
        print(f"Saved: {out}")


def plot_gap(df: pd.DataFrame, output_dir: Path):
    """Relative improvement of the triple bound over Delsarte."""
    rel = (df["delsarte"] - df["triple"]) / df["delsarte"]
    labels = [f"({n},{d})" for n, d in zip(df["n"], df["d"])]

    plt.figure(figsize=(10, 6))
    bars = plt.bar(labels, 100 * rel, color="red", alpha=0.7)
    plt.ylabel("improvement (%)", fontsize=12)
    plt.xlabel("(n, d)", fontsize=12)
    plt.title("Triple bound vs Delsarte bound", fontsize=14, fontweight="bold")
    plt.grid(True, alpha=0.3, axis="y")

    for bar, value in zip(bars, rel):
        if np.isfinite(value):
            plt.text(
                bar.get_x() + bar.get_width() / 2,
                bar.get_height(),
                f"{100 * value:.1f}",
                ha="center",
                va="bottom",
                fontsize=9,
            )

    plt.tight_layout()
    plt.savefig(output_dir / "gap.png", dpi=150)
    plt.close()
    print(f"Saved: {output_dir / 'gap.png'}")


def main():
    parser = argparse.ArgumentParser(description="Generate plots from a bound sweep.")
    parser.add_argument("--csv", type=Path, default=Path("results/bounds.csv"))
    parser.add_argument("--output", type=Path, default=Path("results/plots"))
    args = parser.parse_args()

    args.output.mkdir(parents=True, exist_ok=True)

    df = load_sweep(args.csv)
    if df.empty:
        print("No rows found. Run scripts/run_sweep.py first.")
        return

    print(f"Generating plots from {len(df)} instances...\n")
    plot_bounds(df, args.output)
    plot_gap(df, args.output)
    print(f"\nAll plots saved to {args.output}")


if __name__ == "__main__":
    main()
