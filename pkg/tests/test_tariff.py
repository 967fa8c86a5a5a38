import pytest
from hypothesis import given, strategies as st
from pytest import approx

from recsim.tariff import (CashFlow, TariffConfig, compute_u_pv,
                           cost_installation, cost_purchase, drawn_energy,
                           hourly_shared_incentives, incentive_return,
                           incentive_shared, revenue_sale, settle_slot,
                           shared_energy)

CFG = TariffConfig()
DT = 0.25


def test_defaults_are_normalized_legislation_values():
    assert CFG.tp_rec == approx(0.110)
    assert CFG.tras_e == approx(0.00761)
    assert CFG.btau_max == approx(0.00061)
    assert CFG.u_pur == approx(0.212)
    assert CFG.u_pur_fixed == approx(0.003)
    assert CFG.vat == approx(0.10)
    assert CFG.cu_afm == approx(0.00822)


@pytest.mark.parametrize("gen, dra, expected", [
    (1.0, 0.7, 0.7),
    (0.0, 5.0, 0.0),
    (0.4, 0.4, 0.4),
])
def test_shared_energy(gen, dra, expected):
    assert shared_energy(gen, dra) == approx(expected)


def test_shared_energy_rejects_negative():
    with pytest.raises(ValueError):
        shared_energy(-0.1, 0.5)


@pytest.mark.parametrize("load, p_s, expected", [
    (-2.0, 0.0, 0.5),
    (-2.0, 1.0, 0.75),
    (-2.0, -1.0, 0.5),   # discharge does not count as drawn
])
def test_drawn_energy(load, p_s, expected):
    assert drawn_energy(load, p_s, DT) == approx(expected)


def test_incentives():
    assert incentive_shared(0.7, CFG) == approx(0.077)
    assert incentive_shared(0.0, CFG) == 0.0
    assert incentive_shared(1.4, CFG) == approx(2 * incentive_shared(0.7, CFG))
    assert incentive_return(1.0, CFG) == approx(0.00822)
    assert incentive_return(1.0, CFG) < incentive_shared(1.0, CFG)


def test_revenue_sale():
    assert revenue_sale(2.0, DT, CFG) == approx(0.05)
    assert revenue_sale(-2.0, DT, CFG) == 0.0
    assert revenue_sale(0.0, DT, CFG) == 0.0


def test_cost_purchase():
    assert cost_purchase(-2.0, DT, CFG) == approx(0.1199)
    assert cost_purchase(3.0, DT, CFG) == approx(0.0033)
    no_vat = TariffConfig(vat=0.0)
    assert cost_purchase(-2.0, DT, CFG) == approx(1.1 * cost_purchase(-2.0, DT, no_vat))


def test_cost_installation():
    assert cost_installation(0.0, DT, 0.12) == 0.0
    assert cost_installation(3.0, DT, 0.12) == approx(0.09)
    assert cost_installation(6.0, DT, 0.12) == approx(2 * 0.09)


def test_compute_u_pv():
    assert compute_u_pv([6000.0], [6000.0]) == approx(1.0)
    assert compute_u_pv([800.0, 1200.0], [1000.0, 1000.0]) == approx(1.0)
    with pytest.raises(ValueError):
        compute_u_pv([6000.0], [0.0])
    with pytest.raises(ValueError):
        compute_u_pv([6000.0], [1.0, 2.0])


def test_settle_slot_zero_flows_only_fixed_charges():
    cf = settle_slot([0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                     [0.0, 0.0], [0.1, 0.1], DT, CFG)
    assert cf.i_sha_eur == 0.0 and cf.i_ret_eur == 0.0 and cf.i_sel_eur == 0.0
    assert cf.h_ess_eur == 0.0 and cf.h_ins_eur == 0.0
    assert cf.h_pur_eur == approx(2 * 0.003 * 1.1)


def test_settle_slot_two_node_overlap():
    # node 0: 3 kW gen, -1 kW load, stores 1 kW, sells 1 kW
    # node 1: no gen, -2 kW load, buys 2 kW
    cf = settle_slot([3.0, 0.0], [-1.0, -2.0], [1.0, 0.0], [1.0, -2.0],
                     [0.05, 0.0], [0.5, 0.5], DT, CFG)
    e_gen = 3.0 * DT
    e_dra = (1.0 + 1.0) * DT + 2.0 * DT
    e_sha = min(e_gen, e_dra)
    assert cf.e_sha_kwh == approx(e_sha)
    assert cf.i_sha_eur == approx(0.110 * e_sha)
    assert cf.i_ret_eur == approx(0.00822 * e_sha)
    assert cf.i_sel_eur == approx(0.10 * DT * 1.0)
    assert cf.h_pur_eur == approx((0.212 * 2.0 * DT + 0.003) * 1.1 + 0.003 * 1.1)
    assert cf.h_ins_eur == approx(0.5 * 3.0 * DT)
    assert cf.h_ess_eur == approx(0.05)
    assert cf.i_sha_eur > 0 and cf.i_ret_eur > 0


def test_settle_slot_variable_parts_scale_linearly():
    base = settle_slot([2.0], [-1.0], [0.5], [0.5], [0.02], [0.3], DT, CFG)
    double = settle_slot([4.0], [-2.0], [1.0], [1.0], [0.04], [0.3], DT, CFG)
    fixed = 0.003 * 1.1
    assert double.i_sha_eur == approx(2 * base.i_sha_eur)
    assert double.i_sel_eur == approx(2 * base.i_sel_eur)
    assert double.h_ins_eur == approx(2 * base.h_ins_eur)
    assert double.h_pur_eur - fixed == approx(2 * (base.h_pur_eur - fixed))


def test_net_cost_monotone_in_prices():
    flows = dict(p_gen_kw=[2.0, 0.0], p_load_kw=[-1.0, -2.0],
                 p_gl_s_kw=[0.5, 0.0], p_gl_n_kw=[0.5, -2.0],
                 wear_eur=[0.02, 0.0], u_pv=[0.3, 0.3], dt_hours=DT)
    base = settle_slot(cfg=CFG, **flows).net_cost_eur
    assert settle_slot(cfg=TariffConfig(tp_rec=0.2), **flows).net_cost_eur < base
    assert settle_slot(cfg=TariffConfig(pr3=0.2), **flows).net_cost_eur < base
    assert settle_slot(cfg=TariffConfig(u_pur=0.3), **flows).net_cost_eur > base


def test_zero_tariffs_leave_wear_only():
    cfg = TariffConfig(tp_rec=0, tras_e=0, btau_max=0, pr3=0, u_pur=0,
                       u_pur_fixed=0, vat=0)
    cf = settle_slot([2.0], [-1.0], [0.5], [0.5], [0.02], [0.0], DT, cfg)
    assert cf.net_cost_eur == approx(0.02)


@given(st.floats(0, 5), st.floats(0, 5))
def test_shared_energy_bounded_by_both(a, b):
    s = shared_energy(a, b)
    assert s <= a and s <= b


def test_cashflow_decomposition():
    cf = CashFlow(1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    assert cf.revenue_eur == approx(6.0)
    assert cf.cost_eur == approx(15.0)
    assert cf.net_cost_eur == approx(9.0)


def test_hourly_shared_incentives():
    e_gen = [1.0, 0.0, 1.0, 0.0]
    e_dra = [0.0, 1.0, 0.0, 1.0]
    # per-slot sharing sees no overlap; hourly aggregation shares 2 kWh
    i_sha, i_ret = hourly_shared_incentives(e_gen, e_dra, CFG, period=4)
    assert i_sha == approx(0.110 * 2.0)
    assert i_ret == approx(0.00822 * 2.0)
    per_slot = sum(incentive_shared(shared_energy(g, d), CFG)
                   for g, d in zip(e_gen, e_dra))
    assert per_slot == 0.0


def test_tariff_validation():
    with pytest.raises(ValueError):
        TariffConfig(vat=1.0)
    with pytest.raises(ValueError):
        TariffConfig(tp_rec=-0.1)
