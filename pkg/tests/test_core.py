import pytest
from pytest import approx

from recsim.core import (NodeConfig, PowerProfile, RecConfig, energy_of,
                         net_power)
from recsim.ess import EssParams
from recsim.tariff import TariffConfig


@pytest.mark.parametrize("power, dt, expected", [
    (4.0, 0.25, 1.0),
    (0.0, 0.25, 0.0),
    (-2.0, 0.25, -0.5),
])
def test_energy_of(power, dt, expected):
    assert energy_of(power, dt) == approx(expected)


def test_energy_of_rejects_nonpositive_dt():
    with pytest.raises(ValueError):
        energy_of(1.0, 0.0)


@pytest.mark.parametrize("gen, load, expected", [
    (3.0, -1.0, 2.0),
    (0.0, -0.5, -0.5),
    (0.6, -0.6, 0.0),
])
def test_net_power(gen, load, expected):
    assert net_power(gen, load) == approx(expected)


def test_profile_sign_convention():
    PowerProfile("n1", "generation", (0.0, 1.5))
    PowerProfile("n1", "load", (0.0, -1.5))
    with pytest.raises(ValueError):
        PowerProfile("n1", "generation", (-0.1,))
    with pytest.raises(ValueError):
        PowerProfile("n1", "load", (0.1,))
    with pytest.raises(ValueError):
        PowerProfile("n1", "pv", (0.1,))


def test_profile_slot_indexing():
    p = PowerProfile("n1", "generation", (1.0, 2.0, 3.0), start_slot=10)
    assert p.power_at(11) == 2.0
    with pytest.raises(IndexError):
        p.power_at(13)
    with pytest.raises(IndexError):
        p.power_at(9)


def test_node_config_validation():
    ess = EssParams()
    NodeConfig("n1", ess, 3.0, 6000.0, 1.0, initial_soe=0.5)
    with pytest.raises(ValueError):
        NodeConfig("n1", ess, 3.0, 6000.0, 1.0, initial_soe=0.05)
    with pytest.raises(ValueError):
        NodeConfig("n1", ess, 3.0, 0.0, 1.0)


def test_rec_config_rejects_duplicate_ids():
    ess = EssParams()
    node = NodeConfig("n1", ess, 3.0, 6000.0, 1.0)
    with pytest.raises(ValueError):
        RecConfig((node, node), TariffConfig())
    assert RecConfig((node,), TariffConfig()).n == 1
