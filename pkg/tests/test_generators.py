"""Instance generators: named families and the seeded random family."""

import pytest

from leximinflow.core import validate_instance
from leximinflow.generators import (
    burst_demand_instance,
    random_instance,
    si_bound_instance,
    si_misreport_instance,
)
from leximinflow.rational import ONE, Rational


def test_squeeze_family_shape():
    inst = si_bound_instance(2)
    assert inst.agents == ("a1", "a2")
    assert inst.objects == ("b1", "b2")
    assert all(inst.endowment[a] == ONE for a in inst.agents)
    assert inst.supply == {"b1": Rational(2), "b2": Rational(2)}
    assert inst.demand == {
        ("a1", "b1"): ONE,
        ("a1", "b2"): ONE,
        ("a2", "b1"): Rational(2),
    }
    with pytest.raises(ValueError):
        si_bound_instance(1)


def test_misreport_family_shape():
    inst = si_misreport_instance()
    assert inst.agents == ("a1", "a2", "a3")
    assert inst.supply == {"b1": Rational(6), "b2": Rational(6)}
    assert inst.demand == {
        ("a1", "b1"): Rational(3),
        ("a1", "b2"): ONE,
        ("a2", "b2"): Rational(3),
        ("a3", "b2"): Rational(3),
    }


def test_burst_family_shape():
    inst = burst_demand_instance(3)
    assert inst.agents == ("a1", "a2", "a3")
    assert inst.objects == ("b1", "b2", "b3")
    assert inst.supply == {b: Rational(3) for b in inst.objects}
    assert inst.demand_between("a1", "b1") == Rational(3)
    assert inst.demand_between("a1", "b2") == Rational(0)
    for a in ("a2", "a3"):
        for b in inst.objects:
            assert inst.demand_between(a, b) == Rational(2)
    with pytest.raises(ValueError):
        burst_demand_instance(1)


def test_random_family_is_deterministic():
    one = random_instance(41)
    two = random_instance(41)
    assert one.agents == two.agents
    assert one.endowment == two.endowment
    assert one.supply == two.supply
    assert one.demand == two.demand


def test_random_family_respects_bounds():
    for seed in range(100):
        inst = random_instance(seed)
        assert 1 <= len(inst.agents) <= 8
        assert 1 <= len(inst.objects) <= 6
        assert validate_instance(inst) == []
        values = list(inst.endowment.values()) + list(inst.supply.values())
        values += list(inst.demand.values())
        for v in values:
            assert v.denominator <= 8
            assert v.numerator <= 12


def test_random_family_shared_endowment_mode():
    for seed in range(30):
        inst = random_instance(seed, equal_endowments=True)
        assert len(set(inst.endowment.values())) == 1


def test_random_family_explicit_sizes():
    inst = random_instance(0, num_agents=3, num_objects=2, density=1.0)
    assert len(inst.agents) == 3
    assert len(inst.objects) == 2
    assert len(inst.demand) == 6  # full density keeps every pair
    with pytest.raises(ValueError):
        random_instance(0, num_agents=0)
    with pytest.raises(ValueError):
        random_instance(0, density=1.5)
