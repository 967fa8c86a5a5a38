#!/usr/bin/env python3
"""Run the GA benchmark suite and plot best/mean convergence per problem."""

import argparse
from pathlib import Path

import numpy as np

from recsim.ga import BENCHMARK_NAMES, GaConfig, benchmark_suite, evolve


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--out", default="bench_plots")
    args = parser.parse_args()
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in BENCHMARK_NAMES:
        prob = benchmark_suite(name)
        fig, ax = plt.subplots(figsize=(6, 4))
        finals = []
        for seed in range(args.seeds):
            res = evolve(prob.fn, GaConfig(bounds=prob.bounds(), seed=seed))
            finals.append(res.best.fitness)
            ax.semilogy(np.maximum(res.best_history, 1e-18), color="tab:blue",
                        alpha=0.5, lw=1)
            ax.semilogy(res.mean_history, color="tab:orange", alpha=0.35, lw=1)
        ax.set_title(f"{name}: mean final {np.mean(finals):.2e} "
                     f"over {args.seeds} seeds")
        ax.set_xlabel("generation")
        ax.set_ylabel("fitness (best blue, population mean orange)")
        fig.tight_layout()
        fig.savefig(out / f"{name}.png", dpi=120)
        plt.close(fig)
        print(f"{name:10s} mean final {np.mean(finals):.3e} -> {out / (name + '.png')}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
