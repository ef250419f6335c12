from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings

import published as pub
from oracles import brute_mcp, brute_pareto, mcp_instances
from morphsynth.errors import CapExceededError, InfeasibleError, ValidationError
from morphsynth.mcp import (McpInstance, McpItem, derive_mcp_instance, solve_mcp_exact,
                            solve_mcp_greedy, solve_mcp_multicriteria, truncated)


def test_derivation(gsm):
    inst = derive_mcp_instance(gsm, 15)
    assert inst.group_ids == ("M", "L", "V", "U", "T")
    items = {it.id: it for g in inst.groups for it in g}
    assert items["M5"].weight == Fraction(24, 5)  # 11 - 6.2
    assert all(items[f"L{i}"].weight == 1 for i in range(1, 5))
    assert items["U4"].profit == 3


def test_printed_priorities(gsm):
    # The knapsack table lists U4 with priority 3; the U estimates list it with
    # priority 1, and the printed ratio 0.39 = 3/8 also needs c = 3.
    diff = [da for da, r, *_ in pub.KNAPSACK if gsm.alternative(da).priority != r]
    assert diff == ["U4"]


def test_truncated():
    assert truncated(Fraction(2, 3)) == Fraction(66, 100)
    assert truncated(Fraction(5, 12)) == Fraction(41, 100)
    assert truncated(Fraction(3)) == 3


def test_published_greedy(gsm):
    for b, expected in pub.KNAPSACK_GREEDY.items():
        sol = solve_mcp_greedy(derive_mcp_instance(gsm, b))
        assert list(sol.selection) == expected
        assert sol.weight <= b


def test_ratio_greedy(gsm):
    # the ratio start plus swap repair: matches at b=15, not at b=14
    at15 = solve_mcp_greedy(derive_mcp_instance(gsm, 15), "ratio")
    assert list(at15.selection) == pub.KNAPSACK_GREEDY[15]
    at14 = solve_mcp_greedy(derive_mcp_instance(gsm, 14), "ratio")
    assert list(at14.selection) == ["M3", "L1", "V6", "U1", "T4"]
    assert (at14.profit, at14.weight) == (10, 13)
    with pytest.raises(ValidationError):
        solve_mcp_greedy(derive_mcp_instance(gsm, 14), "random")


def test_exact_on_gsm(gsm):
    s14 = solve_mcp_exact(derive_mcp_instance(gsm, 14))
    s15 = solve_mcp_exact(derive_mcp_instance(gsm, 15))
    assert (list(s14.selection), s14.profit, s14.weight) == (["M3", "L1", "V6", "U1", "T4"], 10, 13)
    assert (list(s15.selection), s15.profit, s15.weight) == (["M3", "L1", "V1", "U1", "T1"], 11, 15)


def test_infeasible_and_cap(gsm):
    with pytest.raises(InfeasibleError):
        solve_mcp_exact(derive_mcp_instance(gsm, 3))
    with pytest.raises(InfeasibleError):
        solve_mcp_greedy(derive_mcp_instance(gsm, 3))
    with pytest.raises(CapExceededError):
        solve_mcp_exact(derive_mcp_instance(gsm, 15), cap=10)


def test_instance_validation():
    with pytest.raises(ValidationError):
        McpInstance((), 1)
    with pytest.raises(ValidationError):
        McpInstance(((McpItem("a", 1, Fraction(-1)),),), 1)


def _brute_front(inst):
    sels = []
    for combo in product(*inst.groups):
        if sum(it.weight for it in combo) <= inst.budget:
            sels.append(tuple(sum(x) for x in zip(*(it.profit for it in combo))))
    return {sels[i] for i in brute_pareto(sels, max)}


def test_gsm_frontier(gsm):
    inst = derive_mcp_instance(gsm, 15, profit_vector=True)
    front = solve_mcp_multicriteria(inst)
    assert {s.profit for s in front} == _brute_front(inst)
    assert all(s.weight <= 15 for s in front)
    assert [s.profit for s in front] == sorted((s.profit for s in front), reverse=True)


@settings(max_examples=40, deadline=None)
@given(mcp_instances(max_groups=3, max_items=4, vector=True))
def test_frontier_matches_brute_force(inst):
    expected = _brute_front(inst)
    if not expected:
        with pytest.raises(InfeasibleError):
            solve_mcp_multicriteria(inst)
        return
    front = solve_mcp_multicriteria(inst)
    assert {s.profit for s in front} == expected
    assert len(front) == len(expected)
    for s in front:
        chosen = [inst.item(i) for i in s.selection]
        assert tuple(sum(x) for x in zip(*(it.profit for it in chosen))) == s.profit


@settings(max_examples=40, deadline=None)
@given(mcp_instances())
def test_greedy_is_feasible(inst):
    best, _ = brute_mcp(inst)
    if best is None:
        return
    sol = solve_mcp_greedy(inst)
    assert sol.weight <= inst.budget
    assert sol.profit <= best
