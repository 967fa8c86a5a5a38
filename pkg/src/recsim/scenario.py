"""Scenario documents: profile CSV ingestion and community configuration.

A scenario is a JSON document naming one generation and one load CSV per
node plus overrides for the battery and tariff constants. Every constant has
a documented default (Italian residential legislation and a market battery
datasheet); overriding them is how other jurisdictions are modeled. Unknown
keys are rejected with their path so typos cannot silently fall back to
defaults.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Optional

import numpy as np

from .core import DT_HOURS, SLOTS_PER_DAY, NodeConfig, PowerProfile, RecConfig
from .ess import EssParams
from .fuzzy import DEFAULT_L_TR
from .tariff import TariffConfig, compute_u_pv

SLOT_SPACING = timedelta(minutes=15)

TARIFF_SOURCES = {
    "tp_rec": "REC premium tariff, 110 EUR/MWh normalized to EUR/kWh (GSE)",
    "tras_e": "transmission component, 7.61 EUR/MWh normalized (ARERA)",
    "btau_max": "max distribution component, 0.61 EUR/MWh normalized (ARERA)",
    "pr3": "sale price placeholder; configured default, no legislated value",
    "u_pur": "residential unit purchase price, 6 kW contract (ARERA portal)",
    "u_pur_fixed": "fixed purchase charge per node per 15-minute slot",
    "vat": "Italian VAT on energy purchases",
}

ESS_SOURCES = {
    "q_kwh": "5 kWh residential battery datasheet",
    "eta": "battery efficiency, datasheet",
    "p_s_max_kw": "battery peak power, datasheet",
    "soe_min": "state-of-energy floor protecting battery health",
    "soe_max": "state-of-energy ceiling protecting battery health",
    "acc_a": "cycle-life curve scale, lithium-ion literature",
    "acc_b": "cycle-life curve exponent, lithium-ion literature",
    "u_ess_eur": "battery installation price, market quote",
    "soe_update_mode": "efficiency applied to the energy increment by default",
}


class ScenarioError(ValueError):
    pass


def load_profile_csv(path: str | Path, kind: str, node_id: str = "") -> PowerProfile:
    """Read the meter schema `timestamp_iso8601,power_kw` into a profile.

    Timestamps must advance in exact 15-minute steps. Load files store
    consumption as positive numbers and are negated into the internal
    convention here.
    """
    path = Path(path)
    powers: list[float] = []
    prev: Optional[datetime] = None
    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "timestamp_iso8601,power_kw":
            raise ScenarioError(f"{path}:1: expected header "
                                f"'timestamp_iso8601,power_kw', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                ts_s, p_s = line.split(",")
                ts = datetime.fromisoformat(ts_s)
                p = float(p_s)
            except ValueError as exc:
                raise ScenarioError(f"{path}:{lineno}: {exc}") from exc
            if ts.utcoffset() is None:
                raise ScenarioError(f"{path}:{lineno}: timestamp {ts_s} lacks an offset")
            if prev is not None:
                gap = ts - prev
                if gap == timedelta(0):
                    raise ScenarioError(f"{path}:{lineno}: duplicate timestamp {ts_s}")
                if gap != SLOT_SPACING:
                    raise ScenarioError(f"{path}:{lineno}: {ts_s} is {gap} after the "
                                        f"previous row; expected 15 minutes")
            prev = ts
            if kind == "generation" and p < 0:
                raise ScenarioError(f"{path}:{lineno}: negative generation {p}")
            powers.append(-p if kind == "load" else p)
    if not powers:
        raise ScenarioError(f"{path}: no samples")
    return PowerProfile(node_id or path.stem, kind, tuple(powers))


@dataclass(frozen=True)
class ScenarioNode:
    node_id: str
    generation_csv: str
    load_csv: str
    pv_peak_kw: float
    pv_install_cost_eur: float
    initial_soe: float = 0.5


@dataclass
class Scenario:
    """Fully resolved scenario: config plus loaded profiles."""

    name: str
    rec: RecConfig
    gen: dict[str, tuple[float, ...]]
    load: dict[str, tuple[float, ...]]
    horizon_slots: int
    horizon_start: int
    seed: int
    forecaster: Optional[str]  # "persistence" | "seasonal_naive" | "file:<path>"
    l_tr: float
    mode: Optional[str] = None
    u_pv_source: str = ""

    @property
    def slots_total(self) -> int:
        return len(next(iter(self.gen.values())))

    def window_arrays(self, start: int, slots: int) -> tuple[np.ndarray, np.ndarray]:
        """(slots, nodes) actual power arrays for a window."""
        if start < 0 or start + slots > self.slots_total:
            raise ScenarioError(f"window [{start}, {start + slots}) outside data "
                                f"span of {self.slots_total} slots")
        gen = np.array([[self.gen[n.node_id][start + k] for n in self.rec.nodes]
                        for k in range(slots)])
        load = np.array([[self.load[n.node_id][start + k] for n in self.rec.nodes]
                         for k in range(slots)])
        return gen, load


def _apply_overrides(cls, base, overrides: dict, path: str):
    fields = {f.name for f in dataclasses.fields(cls)}
    unknown = set(overrides) - fields
    if unknown:
        raise ScenarioError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        return dataclasses.replace(base, **overrides)
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


_TOP_KEYS = {"name", "nodes", "tariff", "ess", "u_pv", "horizon_slots", "seed",
             "forecaster", "shuffle_pv", "l_tr", "mode"}
_NODE_KEYS = {"node_id", "generation_csv", "load_csv", "pv_peak_kw",
              "pv_install_cost_eur", "initial_soe", "ess"}


def load_scenario(path: str | Path) -> Scenario:
    """Parse, validate and fully resolve a scenario document."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: invalid JSON: {exc}") from exc
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ScenarioError(f"{path}: unknown keys {sorted(unknown)}")
    if "nodes" not in doc or not doc["nodes"]:
        raise ScenarioError(f"{path}: 'nodes' must list at least one node")

    tariff = _apply_overrides(TariffConfig, TariffConfig(),
                              doc.get("tariff", {}), f"{path}:tariff")
    base_ess = _apply_overrides(EssParams, EssParams(),
                                doc.get("ess", {}), f"{path}:ess")
    seed = int(doc.get("seed", 0))
    l_tr = float(doc.get("l_tr", DEFAULT_L_TR))

    entries = []
    for i, nd in enumerate(doc["nodes"]):
        unknown = set(nd) - _NODE_KEYS
        if unknown:
            raise ScenarioError(f"{path}:nodes[{i}]: unknown keys {sorted(unknown)}")
        for req in ("node_id", "generation_csv", "load_csv", "pv_peak_kw",
                    "pv_install_cost_eur"):
            if req not in nd:
                raise ScenarioError(f"{path}:nodes[{i}]: missing {req!r}")
        node_ess = _apply_overrides(EssParams, base_ess, nd.get("ess", {}),
                                    f"{path}:nodes[{i}].ess")
        entries.append((ScenarioNode(nd["node_id"], nd["generation_csv"],
                                     nd["load_csv"], float(nd["pv_peak_kw"]),
                                     float(nd["pv_install_cost_eur"]),
                                     float(nd.get("initial_soe", 0.5))),
                        node_ess))

    gen_csvs = [e.generation_csv for e, _ in entries]
    if doc.get("shuffle_pv", False):
        rng = np.random.default_rng(seed)
        gen_csvs = [gen_csvs[i] for i in rng.permutation(len(gen_csvs))]

    gen: dict[str, tuple[float, ...]] = {}
    load: dict[str, tuple[float, ...]] = {}
    for (entry, _), gen_csv in zip(entries, gen_csvs):
        gen_path = path.parent / gen_csv
        load_path = path.parent / entry.load_csv
        gen[entry.node_id] = load_profile_csv(gen_path, "generation", entry.node_id).powers_kw
        load[entry.node_id] = load_profile_csv(load_path, "load", entry.node_id).powers_kw

    lengths = {len(v) for v in gen.values()} | {len(v) for v in load.values()}
    if len(lengths) != 1:
        raise ScenarioError(f"{path}: profiles have differing lengths {sorted(lengths)}")
    total = lengths.pop()

    if doc.get("u_pv") is not None:
        u_pv = float(doc["u_pv"])
        if u_pv < 0:
            raise ScenarioError(f"{path}:u_pv: must be non-negative")
        u_pv_source = "explicit override"
    else:
        days = total / SLOTS_PER_DAY
        annual = [sum(gen[e.node_id]) * DT_HOURS / days * 365.0 for e, _ in entries]
        u_pv = compute_u_pv([e.pv_install_cost_eur for e, _ in entries], annual)
        u_pv_source = ("computed: mean over nodes of installation cost / "
                       "annualized generation from the supplied profiles")

    nodes = tuple(NodeConfig(e.node_id, node_ess, e.pv_peak_kw,
                             e.pv_install_cost_eur, u_pv, e.initial_soe)
                  for e, node_ess in entries)
    horizon = int(doc.get("horizon_slots", SLOTS_PER_DAY))
    if not (0 < horizon <= total):
        raise ScenarioError(f"{path}:horizon_slots: {horizon} outside (0, {total}]")
    forecaster = doc.get("forecaster")
    if isinstance(forecaster, dict):
        if set(forecaster) != {"file"}:
            raise ScenarioError(f"{path}:forecaster: object form must be {{'file': path}}")
        forecaster = f"file:{forecaster['file']}"
    elif forecaster is not None and forecaster not in ("persistence", "seasonal_naive"):
        raise ScenarioError(f"{path}:forecaster: unknown choice {forecaster!r}")
    mode = doc.get("mode")
    if mode is not None and mode not in ("auto", "offline", "online"):
        raise ScenarioError(f"{path}:mode: unknown mode {mode!r}")

    return Scenario(
        name=str(doc.get("name", path.stem)),
        rec=RecConfig(nodes, tariff),
        gen=gen, load=load,
        horizon_slots=horizon,
        horizon_start=total - horizon,
        seed=seed,
        forecaster=forecaster,
        l_tr=l_tr,
        mode=mode,
        u_pv_source=u_pv_source,
    )


def resolved_config(sc: Scenario) -> dict:
    """Every numeric a run will use, with the provenance of its default."""
    tariff = {name: {"value": getattr(sc.rec.tariff, name), "source": src}
              for name, src in TARIFF_SOURCES.items()}
    nodes = []
    for n in sc.rec.nodes:
        ess = {name: {"value": getattr(n.ess, name), "source": src}
               for name, src in ESS_SOURCES.items()}
        nodes.append({
            "node_id": n.node_id,
            "pv_peak_kw": n.pv_peak_kw,
            "pv_install_cost_eur": n.pv_install_cost_eur,
            "initial_soe": n.initial_soe,
            "u_pv": {"value": n.u_pv, "source": sc.u_pv_source},
            "ess": ess,
        })
    return {
        "name": sc.name,
        "tariff": tariff,
        "nodes": nodes,
        "horizon_slots": sc.horizon_slots,
        "horizon_start": sc.horizon_start,
        "slot_hours": DT_HOURS,
        "seed": sc.seed,
        "forecaster": sc.forecaster,
        "l_tr": {"value": sc.l_tr,
                 "source": "inner-triangle base length; five terms tile [0,1]"},
    }
