import math

import pytest

import poalab


def test_cost_functions():
    unit = poalab.CostFunction.unit()
    assert unit.eval(0) == 0.0
    assert unit.eval(5) == 1.0
    root = poalab.CostFunction.monomial(0.5)
    assert root.eval(4) == pytest.approx(2.0)
    assert root.share(4) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        poalab.CostFunction.monomial(-1.0)


def test_instance_round_trip():
    inst = poalab.Instance(poalab.CostFunction.unit(), 3, [(1, 3), (2, 4)])
    again = poalab.Instance.from_json(inst.to_json())
    assert again.horizon == 3
    assert [(j.release, j.deadline) for j in again.jobs] == [(1, 3), (2, 4)]


def test_two_job_unit_poa():
    family = poalab.gen_two_job_unit()
    assert poalab.mechanism_poa(family.instance) == 2.0
    report = poalab.poa_exact(family.instance)
    assert report["base_poa"] == 2.0
    assert report["mech_poa"] == 2.0
    assert report["opt_cost"] == 1.0


def test_valley_equilibrium():
    family = poalab.gen_valley(2, 0.5)
    assert poalab.is_nash(family.instance, family.canonical_ne).is_equilibrium
    assert poalab.total_cost(family.instance, family.canonical_ne) == pytest.approx(
        2 * (1 + math.sqrt(2))
    )
    opt = poalab.solve_optimal(family.instance)
    assert opt.exact
    assert opt.cost == pytest.approx(math.sqrt(6))


def test_quadratic_numbers():
    family = poalab.gen_quadratic()
    assert poalab.total_cost(family.instance, family.canonical_ne) == 706.0
    flow = poalab.opt_flow_convex(family.instance)
    assert flow.cost == 352.0


def test_mechanism_support():
    family = poalab.gen_freeloader(16, 0.5)
    profile = poalab.MechProfile(family.canonical_ne, family.canonical_payments)
    assert poalab.is_mechanism_nash(family.instance, profile).is_equilibrium
    assert poalab.deviation_cap(family.instance, family.canonical_ne, 0) is None
    cap = poalab.deviation_cap(family.instance, family.canonical_ne, 4)
    assert cap == pytest.approx(math.sqrt(5) - 2)


def test_dynamics():
    inst = poalab.gen_random(5, 5, poalab.CostFunction.monomial(0.5), seed=7)
    start = poalab.Assignment([j.release for j in inst.jobs])
    result = poalab.run_brd(inst, start, poalab.BrdOrder.Random, seed=3)
    assert poalab.is_nash(inst, result.assignment).is_equilibrium
