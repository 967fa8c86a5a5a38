"""Vectorized window simulation used as the GA fitness hot path.

Evaluates a whole population against one training window in numpy, carrying a
(population, nodes) state-of-energy matrix through the slots. Mirrors the
scalar simulator's arithmetic exactly (same formulas, same clamp order); a
property test pins the two paths together, so change both or neither.
"""

from __future__ import annotations

import numpy as np

from .core import RecConfig
from .fuzzy import (DEFAULT_RESOLUTION, FisGenome, decode, membership_grid)


class _WindowArrays:
    """Per-node constants and per-slot exogenous terms for one window."""

    def __init__(self, rec: RecConfig, gen: np.ndarray, load: np.ndarray,
                 dt: float):
        if gen.shape != load.shape or gen.ndim != 2 or gen.shape[1] != rec.n:
            raise ValueError(f"gen/load must be (slots, {rec.n}) arrays")
        self.rec = rec
        self.gen = gen
        self.load = load
        self.dt = dt
        self.slots = gen.shape[0]
        ess = [n.ess for n in rec.nodes]
        self.q = np.array([e.q_kwh for e in ess])
        self.eta = np.array([e.eta for e in ess])
        self.soe_min = np.array([e.soe_min for e in ess])
        self.soe_max = np.array([e.soe_max for e in ess])
        self.p_max = np.array([e.p_s_max_kw for e in ess])
        # wear density = dens_coef * (1 - soe)^(acc_b - 1)
        self.dens_coef = np.array([e.u_ess_eur * e.acc_b / (2.0 * e.q_kwh * e.eta * e.acc_a)
                                   for e in ess])
        self.acc_bm1 = np.array([e.acc_b - 1.0 for e in ess])
        self.u_pv = np.array([n.u_pv for n in rec.nodes])
        self.initial_soes = np.array([n.initial_soe for n in rec.nodes])
        self.p_star = gen + load
        self.load_abs = -load
        t = rec.tariff
        self.h_ins_slot = (self.u_pv * gen * dt).sum(axis=1)
        self.e_gen_slot = gen.sum(axis=1) * dt
        self.fixed_pur = rec.n * t.u_pur_fixed * (1.0 + t.vat)

    def dispatch(self, p_star: np.ndarray, soe: np.ndarray,
                 alpha: np.ndarray | float) -> np.ndarray:
        """Battery flow for (pop, nodes) states; clamp order matches the kernel."""
        charge_head = self.q * (self.soe_max - soe) / (self.eta * self.dt)
        reserve = self.q * (soe - self.soe_min) * self.eta / self.dt
        p_charge = np.minimum(np.minimum(alpha * p_star, charge_head), self.p_max)
        p_dis = -np.minimum(np.minimum(alpha * (-p_star), reserve), self.p_max)
        return np.where(p_star > 0, p_charge, np.where(p_star < 0, p_dis, 0.0))

    def soe_next(self, soe: np.ndarray, p_s: np.ndarray) -> np.ndarray:
        delta = p_s * self.dt / self.q
        return soe + np.where(p_s > 0, self.eta * delta,
                              np.where(p_s < 0, delta / self.eta, 0.0))

    def density(self, soe: np.ndarray) -> np.ndarray:
        return self.dens_coef * (1.0 - soe) ** self.acc_bm1

    def settle_objective(self, k: int, p_s: np.ndarray, p_n: np.ndarray,
                         wear: np.ndarray) -> np.ndarray:
        """Slot objective (cost - revenue) per population row."""
        t = self.rec.tariff
        e_dra = (self.load_abs[k] + np.maximum(p_s, 0.0)).sum(axis=-1) * self.dt
        e_sha = np.minimum(self.e_gen_slot[k], e_dra)
        revenue = (t.tp_rec + t.cu_afm) * e_sha \
            + t.pr3 * self.dt * np.maximum(p_n, 0.0).sum(axis=-1)
        h_pur = t.u_pur * self.dt * np.maximum(-p_n, 0.0).sum(axis=-1) * (1.0 + t.vat) \
            + self.fixed_pur
        cost = wear.sum(axis=-1) + h_pur + self.h_ins_slot[k]
        return cost - revenue


class FisWindowEvaluator:
    """Population fitness: objective of simulating the window under each genome."""

    def __init__(self, rec: RecConfig, gen: np.ndarray, load: np.ndarray,
                 dt: float, l_tr: float, resolution: int = DEFAULT_RESOLUTION):
        self.w = _WindowArrays(rec, gen, load, dt)
        self.l_tr = l_tr
        self.resolution = resolution

    def __call__(self, pop: np.ndarray) -> np.ndarray:
        w = self.w
        models = [decode(FisGenome(tuple(genes), self.l_tr)) for genes in pop]
        grid = models[0].consequent_samples(self.resolution)[0]
        mf = np.stack([m.consequent_samples(self.resolution)[1] for m in models])
        in_nodes = np.stack([[t.nodes() for t in m.input_terms] for m in models])
        weights = np.stack([m.weights for m in models])
        g = len(models)
        soe = np.tile(w.initial_soes, (g, 1))
        objective = np.zeros(g)
        for k in range(w.slots):
            p_star = w.p_star[k]
            p_s_local = w.dispatch(p_star, soe, 1.0)
            soe_proj = w.soe_next(soe, p_s_local)
            # memberships of each projected SoE in each genome's input terms
            mus = membership_grid(soe_proj[:, None, :], in_nodes[:, :, None, :])
            strengths = mus * weights[:, :, None]
            # max over rules of the clipped consequents, without materializing
            # the (pop, rules, nodes, grid) tensor
            agg = np.zeros((len(models), soe.shape[1], grid.shape[0]))
            for r in range(strengths.shape[1]):
                np.maximum(agg, np.minimum(strengths[:, r, :, None],
                                           mf[:, r, None, :]), out=agg)
            den = agg.sum(axis=-1)
            alpha = np.where(den > 0, (agg @ grid) / np.where(den > 0, den, 1.0), 0.5)
            p_s = w.dispatch(p_star, soe, alpha)
            soe_new = w.soe_next(soe, p_s)
            wear = np.where(p_s != 0.0,
                            (w.dt / 2.0) * (w.density(soe) + w.density(soe_new))
                            * np.abs(p_s), 0.0)
            objective += w.settle_objective(k, p_s, p_star - p_s, wear)
            soe = soe_new
        return objective


class AlphaWindowEvaluator:
    """Population fitness for raw decision matrices (slots x nodes, flattened)."""

    def __init__(self, rec: RecConfig, gen: np.ndarray, load: np.ndarray, dt: float):
        self.w = _WindowArrays(rec, gen, load, dt)

    def __call__(self, pop: np.ndarray) -> np.ndarray:
        w = self.w
        g = pop.shape[0]
        alphas = pop.reshape(g, w.slots, w.rec.n)
        soe = np.tile(w.initial_soes, (g, 1))
        objective = np.zeros(g)
        for k in range(w.slots):
            p_star = w.p_star[k]
            p_s = w.dispatch(p_star, soe, alphas[:, k, :])
            soe_new = w.soe_next(soe, p_s)
            wear = np.where(p_s != 0.0,
                            (w.dt / 2.0) * (w.density(soe) + w.density(soe_new))
                            * np.abs(p_s), 0.0)
            objective += w.settle_objective(k, p_s, p_star - p_s, wear)
            soe = soe_new
        return objective
