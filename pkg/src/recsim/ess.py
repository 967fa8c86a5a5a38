"""Battery state dynamics and the depth-of-discharge wear-cost model.

State of energy (SoE) is a fraction of the capacity Q. Dispatch keeps SoE in
[soe_min, soe_max]; the update here raises if a caller ever pushes it out,
because that always means a dispatch bug, not a battery condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SOE_TOL = 1e-9

DELTA_EFFICIENCY = "delta-efficiency"
PAPER_LITERAL = "paper-literal"


@dataclass(frozen=True)
class EssParams:
    """Battery constants for one node.

    Defaults describe a 5 kWh residential lithium-ion pack: 5000 EUR installed,
    98% efficiency, 7 kW symmetric power limit, cycle-life curve ACC = a/DoD^b
    with a = 694 cycles and b = 0.795.
    """

    q_kwh: float = 5.0
    eta: float = 0.98
    p_s_max_kw: float = 7.0
    soe_min: float = 0.15
    soe_max: float = 0.95
    acc_a: float = 694.0
    acc_b: float = 0.795
    u_ess_eur: float = 5000.0
    soe_update_mode: str = DELTA_EFFICIENCY

    def __post_init__(self):
        if not (0 < self.eta <= 1):
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if not (0 <= self.soe_min < self.soe_max <= 1):
            raise ValueError(f"need 0 <= soe_min < soe_max <= 1, got "
                             f"[{self.soe_min}, {self.soe_max}]")
        if self.q_kwh <= 0 or self.p_s_max_kw <= 0:
            raise ValueError("q_kwh and p_s_max_kw must be positive")
        if self.acc_a <= 0 or self.acc_b <= 0:
            raise ValueError("acc_a and acc_b must be positive")
        if self.u_ess_eur < 0:
            raise ValueError("u_ess_eur must be non-negative")
        if self.soe_update_mode not in (DELTA_EFFICIENCY, PAPER_LITERAL):
            raise ValueError(f"unknown soe_update_mode {self.soe_update_mode!r}")


def remaining_capacity(soe: float, params: EssParams) -> float:
    """Energy headroom left before the battery is full, in kWh."""
    return params.q_kwh * (params.soe_max - soe)


def remaining_energy(soe: float, params: EssParams) -> float:
    """Energy available above the protection floor, in kWh."""
    return params.q_kwh * (soe - params.soe_min)


def soe_update(soe: float, p_gl_s_kw: float, dt_hours: float, params: EssParams) -> float:
    """Advance SoE by one slot of battery flow (positive = charging).

    In delta-efficiency mode the efficiency applies to the transferred energy
    only; in paper-literal mode it scales the whole updated state, which drifts
    even at zero power (kept for reproduction studies).
    """
    if abs(p_gl_s_kw) > params.p_s_max_kw + SOE_TOL:
        raise ValueError(f"|p_gl_s| = {abs(p_gl_s_kw)} exceeds p_s_max = {params.p_s_max_kw}")
    delta = p_gl_s_kw * dt_hours / params.q_kwh
    if params.soe_update_mode == DELTA_EFFICIENCY:
        if p_gl_s_kw > 0:
            new = soe + params.eta * delta
        elif p_gl_s_kw < 0:
            new = soe + delta / params.eta
        else:
            new = soe
    else:
        if p_gl_s_kw > 0:
            new = (soe + delta) * params.eta
        else:
            new = (soe - abs(delta)) / params.eta
    if new < params.soe_min - SOE_TOL or new > params.soe_max + SOE_TOL:
        raise ValueError(f"SoE update left bounds: {soe} -> {new} with "
                         f"p_gl_s = {p_gl_s_kw} kW (dispatch bug)")
    return new


def wear_cost_density(soe: float, params: EssParams) -> float:
    """Average wear cost at a given SoE, in EUR per kWh moved.

    Diverges as SoE -> 1 when acc_b < 1; soe_max < 1 keeps dispatch away from
    the singularity, so anything at or above it is rejected.
    """
    if soe >= params.soe_max + SOE_TOL:
        raise ValueError(f"SoE {soe} at or above soe_max {params.soe_max}")
    return (params.u_ess_eur / (2.0 * params.q_kwh * params.eta)) * \
        (params.acc_b * (1.0 - soe) ** (params.acc_b - 1.0)) / params.acc_a


def wear_cost(soe_k: float, soe_k1: float, p_gl_s_kw: float, dt_hours: float,
              params: EssParams) -> float:
    """Wear cost of one slot's battery flow, trapezoidal in the SoE endpoints."""
    if p_gl_s_kw == 0.0:
        return 0.0
    w0 = wear_cost_density(soe_k, params)
    w1 = wear_cost_density(soe_k1, params)
    return (dt_hours / 2.0) * (w0 + w1) * abs(p_gl_s_kw)


def acc_cycles(dod: float, params: EssParams) -> float:
    """Achievable cycle count at a given depth of discharge (diagnostic only)."""
    if dod <= 0:
        raise ValueError(f"DoD must be positive, got {dod}")
    if dod > 1:
        raise ValueError(f"DoD must be <= 1, got {dod}")
    return params.acc_a / math.pow(dod, params.acc_b)
