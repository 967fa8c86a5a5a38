"""Legislation-parametrized settlement of one community timeslot.

Defaults follow the Italian residential framework: a premium tariff paid on
shared energy, a small return of transmission/distribution components, a fixed
sale price, and a two-part purchase price with VAT. The incentive tariffs are
published in EUR/MWh (110, 7.61, 0.61); they are stored here normalized to
EUR/kWh so every price in the config shares one unit. Override any field to
model another jurisdiction.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TariffConfig:
    tp_rec: float = 0.110        # EUR/kWh premium on shared energy (110 EUR/MWh)
    tras_e: float = 0.00761      # EUR/kWh transmission component (7.61 EUR/MWh)
    btau_max: float = 0.00061    # EUR/kWh max distribution component (0.61 EUR/MWh)
    pr3: float = 0.10            # EUR/kWh sale price; placeholder, not legislation
    u_pur: float = 0.212         # EUR/kWh purchase unit price
    u_pur_fixed: float = 0.003   # EUR per node per slot, both directions
    vat: float = 0.10

    def __post_init__(self):
        for name in ("tp_rec", "tras_e", "btau_max", "pr3", "u_pur", "u_pur_fixed"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not (0 <= self.vat < 1):
            raise ValueError(f"vat must be in [0, 1), got {self.vat}")

    @property
    def cu_afm(self) -> float:
        """Unit return of tariff components, EUR/kWh."""
        return self.tras_e + self.btau_max


@dataclass(frozen=True)
class CashFlow:
    """Money moved in one slot, revenues and costs kept apart (all >= 0)."""

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
    def net_cost_eur(self) -> float:
        return self.cost_eur - self.revenue_eur


def shared_energy(e_gen_kwh: float, e_dra_kwh: float) -> float:
    """Incentivized shared energy: min of generated and drawn energy."""
    if e_gen_kwh < 0 or e_dra_kwh < 0:
        raise ValueError("energies must be non-negative")
    return min(e_gen_kwh, e_dra_kwh)


def drawn_energy(p_load_kw: float, p_gl_s_kw: float, dt_hours: float) -> float:
    """Energy drawn by one node in kWh: consumption plus any energy being stored."""
    return (abs(p_load_kw) + max(p_gl_s_kw, 0.0)) * dt_hours


def incentive_shared(e_sha_kwh: float, cfg: TariffConfig) -> float:
    return cfg.tp_rec * e_sha_kwh


def incentive_return(e_sha_kwh: float, cfg: TariffConfig) -> float:
    return cfg.cu_afm * e_sha_kwh


def revenue_sale(p_gl_n_kw: float, dt_hours: float, cfg: TariffConfig) -> float:
    """Revenue from energy sold to the grid; purchase slots earn nothing."""
    if p_gl_n_kw > 0:
        return cfg.pr3 * dt_hours * p_gl_n_kw
    return 0.0


def cost_purchase(p_gl_n_kw: float, dt_hours: float, cfg: TariffConfig) -> float:
    """Two-part purchase cost with VAT; the fixed part applies every slot."""
    if p_gl_n_kw < 0:
        return (cfg.u_pur * (-p_gl_n_kw) * dt_hours + cfg.u_pur_fixed) * (1.0 + cfg.vat)
    return cfg.u_pur_fixed * (1.0 + cfg.vat)


def cost_installation(p_gen_kw: float, dt_hours: float, u_pv: float) -> float:
    """PV installation amortization charged per generated kWh."""
    if u_pv < 0:
        raise ValueError("u_pv must be non-negative")
    return u_pv * abs(p_gen_kw) * dt_hours


def compute_u_pv(install_costs_eur: list[float], annual_generation_kwh: list[float]) -> float:
    """Average, across nodes, of installation cost over yearly generated energy."""
    if len(install_costs_eur) != len(annual_generation_kwh) or not install_costs_eur:
        raise ValueError("need one installation cost and one annual generation per node")
    ratios = []
    for cost, gen in zip(install_costs_eur, annual_generation_kwh):
        if gen <= 0:
            raise ValueError(f"annual generation must be positive, got {gen}")
        ratios.append(cost / gen)
    return sum(ratios) / len(ratios)


def settle_slot(p_gen_kw: list[float], p_load_kw: list[float],
                p_gl_s_kw: list[float], p_gl_n_kw: list[float],
                wear_eur: list[float], u_pv: list[float],
                dt_hours: float, cfg: TariffConfig) -> CashFlow:
    """Monetize one slot of community operation.

    Shared energy is a community quantity: generation and drawn energy are
    summed across nodes before taking the min. Purchase, sale, wear and
    installation terms are per node and summed.
    """
    n = len(p_gen_kw)
    if not all(len(v) == n for v in (p_load_kw, p_gl_s_kw, p_gl_n_kw, wear_eur, u_pv)):
        raise ValueError("per-node inputs must have equal length")
    e_gen = sum(p * dt_hours for p in p_gen_kw)
    e_dra = sum(drawn_energy(pl, ps, dt_hours) for pl, ps in zip(p_load_kw, p_gl_s_kw))
    e_sha = shared_energy(e_gen, e_dra)
    i_sel = sum(revenue_sale(pn, dt_hours, cfg) for pn in p_gl_n_kw)
    h_pur = sum(cost_purchase(pn, dt_hours, cfg) for pn in p_gl_n_kw)
    h_ins = sum(cost_installation(pg, dt_hours, u) for pg, u in zip(p_gen_kw, u_pv))
    return CashFlow(
        i_sha_eur=incentive_shared(e_sha, cfg),
        i_ret_eur=incentive_return(e_sha, cfg),
        i_sel_eur=i_sel,
        h_ess_eur=sum(wear_eur),
        h_pur_eur=h_pur,
        h_ins_eur=h_ins,
        e_sha_kwh=e_sha,
    )


def hourly_shared_incentives(e_gen_kwh: list[float], e_dra_kwh: list[float],
                             cfg: TariffConfig, period: int = 4) -> tuple[float, float]:
    """Variant: shared energy aggregated per `period` slots (4 = hourly).

    The simulator's native settlement is per slot; this recomputes the two
    shared-energy incentives under the hourly reading of the legislation for
    reporting and comparison.
    """
    if len(e_gen_kwh) != len(e_dra_kwh):
        raise ValueError("series lengths differ")
    i_sha = 0.0
    i_ret = 0.0
    for start in range(0, len(e_gen_kwh), period):
        e_sha = shared_energy(sum(e_gen_kwh[start:start + period]),
                              sum(e_dra_kwh[start:start + period]))
        i_sha += incentive_shared(e_sha, cfg)
        i_ret += incentive_return(e_sha, cfg)
    return i_sha, i_ret
