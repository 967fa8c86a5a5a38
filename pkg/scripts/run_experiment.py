#!/usr/bin/env python3
"""Full desk-scale study on one synthetic community.

Generates a two-day seven-node scenario, trains the fuzzy manager on the half
day before the test day, evaluates auto-consumption / offline / online modes,
runs the two-stage direct benchmark, and prints the comparison table.
"""

import argparse
import json
import time
from pathlib import Path

import numpy as np

from recsim import hems
from recsim.cli import main as recsim_cli, save_fis
from recsim.core import SLOTS_PER_DAY
from recsim.forecasting import SeriesForecaster
from recsim.fuzzy import fis_gene_bounds
from recsim.ga import GaConfig
from recsim.scenario import load_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--nodes", type=int, default=7)
    parser.add_argument("--repeats", type=int, default=10)
    parser.add_argument("--out", default="experiment")
    args = parser.parse_args()

    out = Path(args.out)
    recsim_cli(["synth-data", "--days", "2", "--nodes", str(args.nodes),
                "--seed", str(args.seed), "--out", str(out / "data")])
    sc = load_scenario(out / "data" / "scenario.json")
    horizon = sc.horizon_start

    gen_w, load_w = sc.window_arrays(horizon - 48, 48)
    print(f"training: {args.repeats} repeats x 50 generations on the half day "
          f"before the test day")
    t0 = time.perf_counter()
    trained = hems.train_fis(sc.rec, gen_w, load_w,
                             GaConfig(bounds=tuple(fis_gene_bounds(sc.l_tr)),
                                      seed=args.seed),
                             repeats=args.repeats, l_tr=sc.l_tr)
    t_train = time.perf_counter() - t0
    save_fis(out / "fis_model.json", trained.best_model, trained.best_genome)
    print(f"  mean fitness {trained.mean_fitness:.2f} EUR "
          f"(sd {trained.std_fitness:.3f}), wall {t_train / 60:.1f} min")
    print("  rule set:")
    for line in trained.best_model.describe().split("\n"):
        print(f"    {line}")

    auto = hems.run(hems.AUTO_CONSUMPTION, sc.rec, sc.gen, sc.load,
                    horizon, sc.horizon_slots)
    offline = hems.run(hems.OFFLINE, sc.rec, sc.gen, sc.load, horizon,
                       sc.horizon_slots, fis=trained.best_model)
    online = hems.run(hems.ONLINE, sc.rec, sc.gen, sc.load, horizon,
                      sc.horizon_slots, fis=trained.best_model,
                      forecaster=SeriesForecaster(sc.gen, sc.load, horizon))
    gen_d, load_d = sc.window_arrays(horizon, sc.horizon_slots)
    bench = hems.benchmark_optimize(
        sc.rec, gen_d, load_d,
        GaConfig(bounds=tuple(((0.0, 1.0),) * (sc.horizon_slots * sc.rec.n)),
                 seed=args.seed),
        warm_starts=[offline.alphas()])

    def pct(a, b):
        return (a - b) / abs(b) * 100.0

    rows = [
        ("auto-consumption", auto.objective_eur, ""),
        ("offline (perfect foresight)", offline.objective_eur,
         f"eps vs benchmark {pct(offline.objective_eur, bench.objective_eur):+.2f}%"),
        ("online (persistence forecast)", online.objective_eur,
         f"savings vs auto {pct(online.objective_eur, auto.objective_eur):+.2f}%"),
        ("direct benchmark", bench.objective_eur,
         f"{bench.sweeps} refinement sweeps"),
    ]
    print("\ntest-day objectives (EUR, lower is better):")
    for name, value, note in rows:
        print(f"  {name:32s} {value:10.2f}   {note}")

    summary = {
        "seed": args.seed,
        "train_minutes": t_train / 60.0,
        "train_mean_fitness_eur": trained.mean_fitness,
        "train_std_fitness_eur": trained.std_fitness,
        "auto_eur": auto.objective_eur,
        "offline_eur": offline.objective_eur,
        "online_eur": online.objective_eur,
        "benchmark_eur": bench.objective_eur,
        "online_savings_pct": pct(online.objective_eur, auto.objective_eur),
        "offline_eps_pct": pct(offline.objective_eur, bench.objective_eur),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2,
                                                 sort_keys=True) + "\n")
    print(f"\nwrote {out / 'summary.json'} and {out / 'fis_model.json'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
