"""Per-node self-consumption dispatcher.

Splits a node's net power between its battery and the grid given the decision
fraction alpha. The battery charges only on local surplus and there is no
grid<->battery channel, so the two flows always rebuild the net power exactly:
p_gl_star = p_gl_s + p_gl_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ess import EssParams, remaining_capacity, remaining_energy, soe_update


@dataclass(frozen=True)
class Dispatch:
    """One node's slot flows: p_gl_s positive = charging, p_gl_n positive = selling."""

    p_gl_s_kw: float
    p_gl_n_kw: float


def dispatch_kernel(p_star: float, soe: float, alpha: float, dt: float,
                    q: float, eta: float, soe_min: float, soe_max: float,
                    p_s_max: float) -> tuple[float, float]:
    """Clamp-form dispatch on plain floats (hot path; no validation).

    Headroom rates include eta so the subsequent delta-efficiency SoE update
    can never exit [soe_min, soe_max].
    """
    if p_star > 0.0:
        headroom = q * (soe_max - soe) / (eta * dt)
        p_s = alpha * p_star
        if headroom < p_s:
            p_s = headroom
        if p_s_max < p_s:
            p_s = p_s_max
        return p_s, p_star - p_s
    if p_star < 0.0:
        reserve = q * (soe - soe_min) * eta / dt
        mag = alpha * (-p_star)
        if reserve < mag:
            mag = reserve
        if p_s_max < mag:
            mag = p_s_max
        return -mag, p_star + mag
    return 0.0, 0.0


def dispatch(p_gl_star_kw: float, soe: float, alpha: float, dt_hours: float,
             params: EssParams) -> Dispatch:
    """Dispatch one node for one slot.

    alpha steers how much of the surplus (deficit) engages the battery; the
    realized battery flow is further clamped by the energy headroom and the
    battery power limit, whichever binds first.
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if not (math.isfinite(p_gl_star_kw) and math.isfinite(soe)):
        raise ValueError("non-finite dispatch input")
    if not (params.soe_min - 1e-12 <= soe <= params.soe_max + 1e-12):
        raise ValueError(f"SoE {soe} outside [{params.soe_min}, {params.soe_max}]")
    p_s, p_n = dispatch_kernel(p_gl_star_kw, soe, alpha, dt_hours,
                               params.q_kwh, params.eta, params.soe_min,
                               params.soe_max, params.p_s_max_kw)
    return Dispatch(p_s, p_n)


def local_pass(soes: list[float], net_powers_kw: list[float], dt_hours: float,
               params_per_node: list[EssParams]) -> list[tuple[Dispatch, float]]:
    """Self-consumption pass: every node dispatches with alpha = 1.

    Returns each node's flows and the SoE it would reach, which is what the
    community-level manager consumes as its input state.
    """
    if not (len(soes) == len(net_powers_kw) == len(params_per_node)):
        raise ValueError("one SoE, net power and parameter set per node")
    out = []
    for soe, p_star, params in zip(soes, net_powers_kw, params_per_node):
        d = dispatch(p_star, soe, 1.0, dt_hours, params)
        out.append((d, soe_update(soe, d.p_gl_s_kw, dt_hours, params)))
    return out
