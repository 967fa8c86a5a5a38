import math

import pytest
from hypothesis import given, strategies as st
from pytest import approx

from recsim.ess import (DELTA_EFFICIENCY, PAPER_LITERAL, EssParams, acc_cycles,
                        remaining_capacity, remaining_energy, soe_update,
                        wear_cost, wear_cost_density)

DEFAULTS = EssParams()


def test_defaults_match_datasheet():
    assert DEFAULTS.q_kwh == 5.0
    assert DEFAULTS.eta == 0.98
    assert DEFAULTS.p_s_max_kw == 7.0
    assert DEFAULTS.u_ess_eur == 5000.0
    assert (DEFAULTS.soe_min, DEFAULTS.soe_max) == (0.15, 0.95)
    assert (DEFAULTS.acc_a, DEFAULTS.acc_b) == (694.0, 0.795)


@pytest.mark.parametrize("soe, expected", [
    (0.95, 0.0),
    (0.50, 2.25),
    (0.15, 4.0),
])
def test_remaining_capacity(soe, expected):
    assert remaining_capacity(soe, DEFAULTS) == approx(expected)


@pytest.mark.parametrize("soe, expected", [
    (0.15, 0.0),
    (0.50, 1.75),
    (0.95, 4.0),
])
def test_remaining_energy(soe, expected):
    assert remaining_energy(soe, DEFAULTS) == approx(expected)


def test_soe_update_zero_flow_identity():
    assert soe_update(0.5, 0.0, 0.25, DEFAULTS) == 0.5


def test_soe_update_charge():
    # 0.5 + 0.98 * (3 * 0.25) / 5
    assert soe_update(0.5, 3.0, 0.25, DEFAULTS) == approx(0.647)


def test_soe_update_discharge():
    # 0.5 - (2 * 0.25) / (5 * 0.98)
    assert soe_update(0.5, -2.0, 0.25, DEFAULTS) == approx(0.3979591836734694)


def test_soe_update_paper_literal_scales_whole_state():
    params = EssParams(soe_update_mode=PAPER_LITERAL)
    assert soe_update(0.5, 3.0, 0.25, params) == approx((0.5 + 0.15) * 0.98)
    assert soe_update(0.5, -2.0, 0.25, params) == approx((0.5 - 0.1) / 0.98)


def test_soe_update_rejects_bound_escape():
    with pytest.raises(ValueError):
        soe_update(0.94, 3.0, 0.25, DEFAULTS)
    with pytest.raises(ValueError):
        soe_update(0.16, -3.0, 0.25, DEFAULTS)


def test_soe_update_rejects_over_power():
    with pytest.raises(ValueError):
        soe_update(0.5, 7.5, 0.25, DEFAULTS)


@given(st.floats(0.2, 0.9), st.floats(0.01, 1.0))
def test_soe_update_inverse_consistent_at_unit_efficiency(soe, p):
    params = EssParams(eta=1.0)
    up = soe_update(soe, p, 0.05, params)
    back = soe_update(up, -p, 0.05, params)
    assert back == approx(soe, abs=1e-12)


@pytest.mark.parametrize("soe, expected", [
    (0.0, 0.5844556842910075),
    (0.5, 0.6736940875912316),
])
def test_wear_cost_density_values(soe, expected):
    # u_ess/(2*Q*eta) * b*(1-soe)^(b-1)/a with Table defaults
    assert wear_cost_density(soe, DEFAULTS) == approx(expected, rel=1e-12)


def test_wear_cost_density_monotone_increasing():
    assert wear_cost_density(0.9, DEFAULTS) > wear_cost_density(0.5, DEFAULTS) \
        > wear_cost_density(0.1, DEFAULTS)


def test_wear_cost_density_guards_singularity():
    with pytest.raises(ValueError):
        wear_cost_density(0.96, DEFAULTS)


def test_wear_cost_zero_flow():
    assert wear_cost(0.5, 0.5, 0.0, 0.25, DEFAULTS) == 0.0


def test_wear_cost_trapezoid_value():
    got = wear_cost(0.5, 0.598, 2.0, 0.25, DEFAULTS)
    assert got == approx(0.3445502448618949, rel=1e-12)
    # midpoint-rule cross-check: within 2%
    mid = 0.25 * wear_cost_density(0.549, DEFAULTS) * 2.0
    assert got == approx(mid, rel=0.02)


def test_wear_cost_sign_symmetric():
    charge = wear_cost(0.5, 0.598, 2.0, 0.25, DEFAULTS)
    discharge = wear_cost(0.5, 0.598, -2.0, 0.25, DEFAULTS)
    assert charge == discharge


@given(st.floats(1.0, 3.0))
def test_wear_cost_homogeneous_in_price(scale):
    base = wear_cost(0.4, 0.5, 2.0, 0.25, DEFAULTS)
    scaled = wear_cost(0.4, 0.5, 2.0, 0.25, EssParams(u_ess_eur=5000.0 * scale))
    assert scaled == approx(base * scale, rel=1e-12)


@pytest.mark.parametrize("dod, expected", [
    (1.0, 694.0),
    (0.5, 1204.1436977670703),
])
def test_acc_cycles(dod, expected):
    assert acc_cycles(dod, DEFAULTS) == approx(expected, rel=1e-9)


def test_acc_cycles_monotone_and_guarded():
    assert acc_cycles(0.25, DEFAULTS) > acc_cycles(0.5, DEFAULTS) > acc_cycles(1.0, DEFAULTS)
    with pytest.raises(ValueError):
        acc_cycles(0.0, DEFAULTS)
    with pytest.raises(ValueError):
        acc_cycles(1.5, DEFAULTS)


def test_params_validation():
    with pytest.raises(ValueError):
        EssParams(eta=0.0)
    with pytest.raises(ValueError):
        EssParams(soe_min=0.9, soe_max=0.2)
    with pytest.raises(ValueError):
        EssParams(soe_update_mode="other")
    assert EssParams().soe_update_mode == DELTA_EFFICIENCY


def test_density_independent_formula_spot_check():
    # independent arithmetic, term by term
    u, q, eta, a, b = 5000.0, 5.0, 0.98, 694.0, 0.795
    soe = 0.37
    expected = (u / (2 * q * eta)) * (b * math.pow(1 - soe, b - 1) / a)
    assert wear_cost_density(soe, DEFAULTS) == approx(expected, rel=1e-14)
