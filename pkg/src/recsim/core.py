"""Shared domain vocabulary: timeslots, power profiles, node and community config.

Sign convention used everywhere: power injected into the node bus is positive,
so generation samples are >= 0 kW and load samples are stored as <= 0 kW.
Slots are 15 minutes (0.25 h), 96 per day.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ess import EssParams
from .tariff import TariffConfig

DT_HOURS = 0.25
SLOTS_PER_DAY = 96

KW_TOL = 1e-9
EUR_TOL = 1e-9


def energy_of(power_kw: float, dt_hours: float = DT_HOURS) -> float:
    """Energy in kWh exchanged at `power_kw` over one slot of `dt_hours`."""
    if dt_hours <= 0:
        raise ValueError(f"dt_hours must be positive, got {dt_hours}")
    return power_kw * dt_hours


def net_power(p_gen_kw: float, p_load_kw: float) -> float:
    """Net node power: positive = surplus, negative = deficit."""
    return p_gen_kw + p_load_kw


@dataclass(frozen=True)
class PowerProfile:
    """Ordered 15-minute power series for one node, generation or load."""

    node_id: str
    kind: str  # "generation" | "load"
    powers_kw: tuple[float, ...]
    start_slot: int = 0

    def __post_init__(self):
        if self.kind not in ("generation", "load"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        for i, p in enumerate(self.powers_kw):
            if p != p or p in (float("inf"), float("-inf")):
                raise ValueError(f"non-finite power at sample {i}")
            if self.kind == "generation" and p < 0:
                raise ValueError(f"negative generation {p} kW at sample {i}")
            if self.kind == "load" and p > 0:
                raise ValueError(f"positive load {p} kW at sample {i} (loads are stored <= 0)")

    def __len__(self) -> int:
        return len(self.powers_kw)

    def power_at(self, slot: int) -> float:
        idx = slot - self.start_slot
        if idx < 0 or idx >= len(self.powers_kw):
            raise IndexError(f"slot {slot} outside profile [{self.start_slot}, "
                             f"{self.start_slot + len(self.powers_kw) - 1}] for {self.node_id}")
        return self.powers_kw[idx]


@dataclass(frozen=True)
class NodeConfig:
    node_id: str
    ess: EssParams
    pv_peak_kw: float
    pv_install_cost_eur: float
    u_pv: float  # EUR per generated kWh, amortizes the PV installation
    initial_soe: float = 0.5

    def __post_init__(self):
        if self.pv_install_cost_eur <= 0:
            raise ValueError("pv_install_cost_eur must be positive")
        if self.u_pv < 0:
            raise ValueError("u_pv must be non-negative")
        if not (self.ess.soe_min <= self.initial_soe <= self.ess.soe_max):
            raise ValueError(f"initial_soe {self.initial_soe} outside "
                             f"[{self.ess.soe_min}, {self.ess.soe_max}]")


@dataclass(frozen=True)
class RecConfig:
    """One community: its nodes plus the legislation constants."""

    nodes: tuple[NodeConfig, ...]
    tariff: TariffConfig

    def __post_init__(self):
        if len(self.nodes) < 1:
            raise ValueError("a community needs at least one node")
        ids = [n.node_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids")

    @property
    def n(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class NodeSlotResult:
    node_id: str
    p_gen_kw: float
    p_load_kw: float
    p_gl_star_kw: float
    p_gl_s_kw: float
    p_gl_n_kw: float
    soe_before: float
    soe_after: float
    alpha: float
    wear_eur: float


@dataclass(frozen=True)
class TimeslotResult:
    """Flows, SoE and money for one simulated slot across the community."""

    slot: int
    nodes: tuple[NodeSlotResult, ...]
    i_sha_eur: float
    i_ret_eur: float
    i_sel_eur: float
    h_ess_eur: float
    h_pur_eur: float
    h_ins_eur: float
    e_sha_kwh: float = 0.0

    @property
    def revenue_eur(self) -> float:
        return self.i_sha_eur + self.i_ret_eur + self.i_sel_eur

    @property
    def cost_eur(self) -> float:
        return self.h_ess_eur + self.h_pur_eur + self.h_ins_eur

    @property
    def objective_eur(self) -> float:
        """Slot contribution to the run objective: costs minus revenues."""
        return self.cost_eur - self.revenue_eur
