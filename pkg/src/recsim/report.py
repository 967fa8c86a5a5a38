"""Run artifacts: per-slot CSV and summary JSON, written and read back.

Floats are serialized with repr so parsing them back gives bit-identical
values; the community rows' objective column re-sums to the summary
objective exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional

from .core import RecConfig
from .hems import SimulationRun

RESULTS_CSV = "results.csv"
SUMMARY_JSON = "run.json"

CSV_HEADER = (
    "kind", "slot", "node_id", "p_gen_kw", "p_load_kw", "p_gl_star_kw",
    "p_gl_s_kw", "p_gl_n_kw", "soe_before", "soe_after", "alpha", "wear_eur",
    "e_sha_kwh", "i_sha_eur", "i_ret_eur", "i_sel_eur", "h_ess_eur",
    "h_pur_eur", "h_ins_eur", "objective_eur",
)

PR3_NOTE = ("pr3 sale price is a configured default (no legislated value); "
            "override it in the scenario tariff section")


def run_rows(run: SimulationRun) -> list[list[str]]:
    rows = []
    for r in run.results:
        for n in r.nodes:
            rows.append(["node", str(r.slot), n.node_id, repr(n.p_gen_kw),
                         repr(n.p_load_kw), repr(n.p_gl_star_kw),
                         repr(n.p_gl_s_kw), repr(n.p_gl_n_kw),
                         repr(n.soe_before), repr(n.soe_after), repr(n.alpha),
                         repr(n.wear_eur), "", "", "", "", "", "", "", ""])
        rows.append(["community", str(r.slot), "", "", "", "", "", "", "", "",
                     "", "", repr(r.e_sha_kwh), repr(r.i_sha_eur),
                     repr(r.i_ret_eur), repr(r.i_sel_eur), repr(r.h_ess_eur),
                     repr(r.h_pur_eur), repr(r.h_ins_eur),
                     repr(r.objective_eur)])
    return rows


def summary_dict(run: SimulationRun, auto_objective: Optional[float] = None,
                 include_timing: bool = False) -> dict:
    summary = {
        "mode": run.mode,
        "horizon_start": run.horizon_start,
        "horizon_slots": run.horizon,
        "objective_eur": run.objective_eur,
        "initial_soes": run.initial_soes,
        "final_soes": run.final_soes,
        "fis_decisions": run.fis_decisions,
        "notes": [PR3_NOTE],
    }
    if auto_objective is not None:
        summary["auto_objective_eur"] = auto_objective
        if auto_objective != 0:
            summary["savings_vs_auto_pct"] = \
                (run.objective_eur - auto_objective) / abs(auto_objective) * 100.0
    if include_timing:
        summary["wall_time_s"] = run.wall_time_s
    return summary


def write_run(out_dir: str | Path, run: SimulationRun, rec: RecConfig,
              auto_objective: Optional[float] = None,
              include_timing: bool = False) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / RESULTS_CSV, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for row in run_rows(run):
            fh.write(",".join(row) + "\n")
    with open(out / SUMMARY_JSON, "w", encoding="utf-8") as fh:
        json.dump(summary_dict(run, auto_objective, include_timing), fh,
                  indent=2, sort_keys=True)
        fh.write("\n")
    return out


def read_summary(run_dir: str | Path) -> dict:
    with open(Path(run_dir) / SUMMARY_JSON, encoding="utf-8") as fh:
        return json.load(fh)


def read_results_csv(run_dir: str | Path) -> list[dict]:
    with open(Path(run_dir) / RESULTS_CSV, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{run_dir}: unexpected results schema")
        return list(reader)


def resummed_objective(run_dir: str | Path) -> float:
    """Left-to-right sum of the community rows, for the exact round-trip check."""
    total = 0.0
    for row in read_results_csv(run_dir):
        if row["kind"] == "community":
            total += float(row["objective_eur"])
    return total
