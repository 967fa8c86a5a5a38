"""Command-line surface: data synthesis, training, simulation, reporting."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional

from . import hems, report
from .core import SLOTS_PER_DAY
from .forecasting import FileForecaster, SeriesForecaster
from .fuzzy import FisGenome, FisModel, decode, fis_gene_bounds
from .ga import BENCHMARK_NAMES, GaConfig, benchmark_suite, evolve
from .hems import AUTO_CONSUMPTION, OFFLINE, ONLINE
from .scenario import Scenario, ScenarioError, load_scenario, resolved_config
from .synth import generate_nodes, write_profile_csv

MODE_ALIASES = {"auto": AUTO_CONSUMPTION, "offline": OFFLINE, "online": ONLINE}


def save_fis(path: str | Path, model: FisModel, genome: Optional[FisGenome] = None,
             training: Optional[dict] = None) -> None:
    doc = {"model": model.to_dict(), "rules_text": model.describe()}
    if genome is not None:
        doc["genome"] = list(genome.genes)
        doc["l_tr"] = genome.l_tr
    if training is not None:
        doc["training"] = training
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_fis(path: str | Path) -> FisModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "genome" in doc:
        return decode(FisGenome(tuple(doc["genome"]), doc.get("l_tr", 0.2)))
    return FisModel.from_dict(doc["model"])


def _build_forecaster(sc: Scenario, scenario_path: Path, override: Optional[str]):
    choice = override or sc.forecaster
    if choice is None:
        raise ScenarioError("online mode needs a forecaster: set 'forecaster' in "
                            "the scenario or pass --forecaster")
    if choice.startswith("file:"):
        # scenario-declared paths are scenario-relative; CLI overrides are
        # resolved from the working directory
        base = Path() if override else scenario_path.parent
        return FileForecaster(base / choice[5:])
    if choice not in ("persistence", "seasonal_naive"):
        raise ScenarioError(f"unknown forecaster {choice!r}")
    return SeriesForecaster(sc.gen, sc.load, sc.horizon_start, method=choice)


def cmd_synth_data(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    nodes = generate_nodes(args.days, args.nodes, args.seed)
    doc_nodes = []
    for n in nodes:
        gen_csv = f"{n.node_id}_generation.csv"
        load_csv = f"{n.node_id}_load.csv"
        write_profile_csv(out / gen_csv, n.gen_kw, consumption_positive=False)
        write_profile_csv(out / load_csv, n.load_kw, consumption_positive=True)
        doc_nodes.append({
            "node_id": n.node_id,
            "generation_csv": gen_csv,
            "load_csv": load_csv,
            "pv_peak_kw": n.pv_peak_kwp,
            "pv_install_cost_eur": n.pv_install_cost_eur,
        })
    doc = {
        "name": f"synthetic-{args.days}d-{args.nodes}n-seed{args.seed}",
        "seed": args.seed,
        "horizon_slots": SLOTS_PER_DAY,
        "forecaster": "persistence",
        "nodes": doc_nodes,
    }
    if args.shuffle_pv:
        doc["shuffle_pv"] = True
    with open(out / "scenario.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(out / "scenario.json")
    return 0


def cmd_simulate(args) -> int:
    scenario_path = Path(args.scenario)
    sc = load_scenario(scenario_path)
    if args.print_config:
        print(json.dumps(resolved_config(sc), indent=2, sort_keys=True))
        return 0
    mode = MODE_ALIASES[args.mode or sc.mode or "auto"]
    fis = None
    forecaster = None
    if mode != AUTO_CONSUMPTION:
        if not args.fis:
            raise ScenarioError(f"{mode} mode needs --fis <model.json>")
        fis = load_fis(args.fis)
    if mode == ONLINE:
        forecaster = _build_forecaster(sc, scenario_path, args.forecaster)
    sim = hems.run(mode, sc.rec, sc.gen, sc.load, sc.horizon_start,
                   sc.horizon_slots, fis=fis, forecaster=forecaster)
    auto_objective = None
    if mode != AUTO_CONSUMPTION:
        auto = hems.run(AUTO_CONSUMPTION, sc.rec, sc.gen, sc.load,
                        sc.horizon_start, sc.horizon_slots)
        auto_objective = auto.objective_eur
    out_dir = Path(args.out) if args.out else Path("runs") / mode
    report.write_run(out_dir, sim, sc.rec, auto_objective,
                     include_timing=args.timing)
    print(json.dumps(report.summary_dict(sim, auto_objective,
                                         include_timing=args.timing),
                     indent=2, sort_keys=True))
    return 0


def cmd_train(args) -> int:
    sc = load_scenario(Path(args.scenario))
    train_slots = args.train_slots
    start = args.train_start if args.train_start is not None \
        else sc.horizon_start - train_slots
    if start < 0:
        raise ScenarioError(f"training window needs {train_slots} slots before "
                            f"the horizon; scenario only has {sc.horizon_start}")
    gen_w, load_w = sc.window_arrays(start, train_slots)
    seed = args.seed if args.seed is not None else sc.seed
    ga_cfg = GaConfig(bounds=tuple(fis_gene_bounds(sc.l_tr)), seed=seed,
                      population_size=args.population,
                      max_generations=args.generations)
    t0 = time.perf_counter()
    result = hems.train_fis(sc.rec, gen_w, load_w, ga_cfg,
                            repeats=args.repeats, l_tr=sc.l_tr)
    elapsed = time.perf_counter() - t0
    stats = {
        "train_window_start": start,
        "train_window_slots": train_slots,
        "repeats": args.repeats,
        "seed": seed,
        "final_fitness": [float(f) for f in result.final_fitness],
        "mean_fitness_eur": result.mean_fitness,
        "std_fitness_eur": result.std_fitness,
        "best_fitness_eur": result.best_fitness,
    }
    if args.timing:
        stats["wall_time_s"] = elapsed
    save_fis(args.out, result.best_model, result.best_genome, training=stats)
    print(json.dumps(stats, indent=2, sort_keys=True))
    return 0


def cmd_benchmark_ga(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary_path = out / "benchmark_ga.csv"
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write("benchmark,seed,final_fitness\n")
        for name in BENCHMARK_NAMES:
            prob = benchmark_suite(name)
            for seed in range(args.seeds):
                cfg = GaConfig(bounds=prob.bounds(), seed=seed)
                res = evolve(prob.fn, cfg)
                fh.write(f"{name},{seed},{res.best.fitness!r}\n")
                hist = out / f"history_{name}_seed{seed}.csv"
                with open(hist, "w", encoding="utf-8") as hh:
                    hh.write("generation,best_fitness,mean_fitness\n")
                    for g, (b, m) in enumerate(zip(res.best_history,
                                                   res.mean_history)):
                        hh.write(f"{g},{b!r},{m!r}\n")
    print(summary_path)
    return 0


def cmd_report(args) -> int:
    if args.format == "json":
        print(json.dumps(report.read_summary(args.run), indent=2, sort_keys=True))
    else:
        print(",".join(report.CSV_HEADER))
        with open(Path(args.run) / report.RESULTS_CSV, encoding="utf-8") as fh:
            next(fh)
            sys.stdout.write(fh.read())
    return 0


def cmd_show_fis(args) -> int:
    model = load_fis(args.fis)
    print(model.describe())
    d = model.to_dict()
    print("\ninput terms (a, b, c, d):")
    for label, nodes in d["input_terms"].items():
        print(f"  {label:9s} {nodes}")
    print("output terms (a, b, c, d):")
    for label, nodes in d["output_terms"].items():
        print(f"  {label:9s} {nodes}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recsim",
        description="Renewable energy community simulator and optimizer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-data", help="generate a synthetic community scenario")
    p.add_argument("--days", type=int, default=2)
    p.add_argument("--nodes", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--shuffle-pv", action="store_true",
                   help="seeded shuffle of the PV-to-node assignment")
    p.set_defaults(func=cmd_synth_data)

    p = sub.add_parser("simulate", help="simulate a scenario horizon")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mode", choices=sorted(MODE_ALIASES))
    p.add_argument("--fis", help="trained model JSON (offline/online modes)")
    p.add_argument("--forecaster",
                   help="override the scenario forecaster: persistence, "
                        "seasonal_naive or file:<forecast.csv>")
    p.add_argument("--out", help="run artifact directory")
    p.add_argument("--print-config", action="store_true",
                   help="echo the fully resolved configuration and exit")
    p.add_argument("--timing", action="store_true",
                   help="include wall time in the summary (breaks byte-for-byte "
                        "reproducibility)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train the fuzzy manager on a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--out", default="fis_model.json")
    p.add_argument("--train-start", type=int, default=None,
                   help="window start slot (default: the half day before the horizon)")
    p.add_argument("--train-slots", type=int, default=48)
    p.add_argument("--population", type=int, default=100)
    p.add_argument("--generations", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("benchmark-ga", help="run the GA benchmark suite")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--out", default="bench")
    p.set_defaults(func=cmd_benchmark_ga)

    p = sub.add_parser("report", help="re-emit a stored run artifact")
    p.add_argument("--run", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("show-fis", help="print a model's rules and abscissas")
    p.add_argument("--fis", required=True)
    p.set_defaults(func=cmd_show_fis)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
