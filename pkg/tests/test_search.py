import copy

import pytest

from decaykit.backends import backend_for
from decaykit.presentations import Presentation, load_presentation
from decaykit.search import (
    SearchOutcome,
    TraceError,
    check_assignment,
    cone_search,
    enumerate_ball,
    replay_trace,
    torsion_scan,
)
from decaykit.words import Word

from conftest import PRESENTATIONS


def instance(name, radius):
    pres, hint = load_presentation(str(PRESENTATIONS / name))
    backend = backend_for(pres, hint)
    return enumerate_ball(pres, radius, backend), backend


def test_ball_sizes():
    inst, _ = instance("z2.json", 2)
    assert len(inst) == 12
    inst, _ = instance("cyclic_3.json", 3)
    assert [str(w) for w in inst.elements] == ["a", "a^-1"]


def test_ball_invariants():
    inst, backend = instance("z2_star_z3.json", 2)
    assert all(not backend.is_identity(w) for w in inst.elements)
    for i, j in enumerate(inst.inverse):
        assert inst.inverse[j] == i
        assert backend.is_identity(inst.elements[i] * inst.elements[j])
    for (i, j), k in inst.products.items():
        assert backend.equal(inst.elements[i] * inst.elements[j], inst.elements[k])


@pytest.mark.parametrize("name,order", [("cyclic_3.json", 3), ("cyclic_2.json", 2), ("z2_star_z3.json", 2)])
def test_torsion(name, order):
    inst, backend = instance(name, 3)
    g, d = torsion_scan(inst, backend, 6)
    assert str(g) == "a" and d == order


def test_no_torsion_in_z2():
    inst, backend = instance("z2.json", 3)
    assert torsion_scan(inst, backend, 6) is None


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("radius", [2, 3])
def test_cyclic_contradiction_and_replay(n, radius):
    inst, backend = instance(f"cyclic_{n}.json", radius)
    result = cone_search(inst)
    assert result.outcome is SearchOutcome.CONTRADICTION
    assert replay_trace(inst, result.trace, backend)


@pytest.mark.parametrize("radius", [2, 3, 4])
def test_free_product_contradiction_is_monotone(radius):
    inst, backend = instance("z2_star_z3.json", radius)
    result = cone_search(inst)
    assert result.outcome is SearchOutcome.CONTRADICTION
    assert replay_trace(inst, result.trace, backend)


@pytest.mark.parametrize("name,radius", [("z2.json", 4), ("klein_bottle.json", 4), ("trefoil.json", 3)])
def test_assignments_and_reversal(name, radius):
    inst, _ = instance(name, radius)
    result = cone_search(inst)
    assert result.outcome is SearchOutcome.ASSIGNMENT
    assert check_assignment(inst, result.signs)
    assert check_assignment(inst, [-s for s in result.signs])


def test_tampered_trace_rejected():
    inst, backend = instance("z2_star_z3.json", 2)
    trace = cone_search(inst).trace
    bad = copy.deepcopy(trace)
    bad["cases"] = bad["cases"][:1]
    with pytest.raises(TraceError):
        replay_trace(inst, bad, backend)
    bad = copy.deepcopy(trace)

    def first_conflict(node):
        for case in node["cases"]:
            if "conflict" in case:
                return case
            found = first_conflict(case["then"])
            if found:
                return found
        return None

    case = first_conflict(bad)
    case["conflict"]["value"] = -case["conflict"]["value"]
    with pytest.raises(TraceError):
        replay_trace(inst, bad, backend)


def test_budget_exhaustion_reports_no_obstruction():
    inst, _ = instance("z2.json", 3)
    result = cone_search(inst, budget=1)
    assert result.outcome is SearchOutcome.NO_OBSTRUCTION


def test_heuristic_backend_never_claims_assignment():
    pres = Presentation.from_strings("ab", ["a b a b^-1 a^-1 b^-1"])
    backend = backend_for(pres, "rewriting")
    inst = enumerate_ball(pres, 2, backend)
    result = cone_search(inst)
    if not backend.exact:
        assert result.outcome is not SearchOutcome.ASSIGNMENT


def test_radius_one_sees_only_small_torsion():
    for n in (2, 3):
        inst, _ = instance(f"cyclic_{n}.json", 1)
        assert cone_search(inst).outcome is SearchOutcome.CONTRADICTION
    inst, _ = instance("cyclic_5.json", 1)
    assert cone_search(inst).outcome is SearchOutcome.ASSIGNMENT
