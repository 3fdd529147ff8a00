import itertools
import random

import pytest
from hypothesis import given, settings

from rationalcsp.csp import (
    BinaryConstraint,
    Instance,
    StructureError,
    brute_force_solutions,
    count_solutions_exact,
    is_consistent,
    queens,
    solve_exhaustive,
)

from conftest import instances, neq2, random_instance


def test_is_consistent_examples():
    inst = neq2()
    assert is_consistent(inst, {0: 0, 1: 1})
    assert not is_consistent(inst, {0: 0, 1: 0})
    assert is_consistent(inst, {0: 0})


@pytest.mark.parametrize("bad", [{2: 0}, {0: 2}, {-1: 0}])
def test_is_consistent_rejects_bad_indices(bad):
    with pytest.raises(StructureError):
        is_consistent(neq2(), bad)


def test_solve_exhaustive_examples():
    assert solve_exhaustive(neq2()) == {0: 0, 1: 1}
    assert solve_exhaustive(Instance([3, 2, 4])) == {0: 0, 1: 0, 2: 0}


def test_three_queens_has_no_solution():
    inst = queens(3)
    # brute force over all 27 placements
    assert not any(
        is_consistent(inst, dict(enumerate(p))) for p in itertools.product(range(3), repeat=3)
    )
    assert solve_exhaustive(inst) is None


def test_count_examples():
    assert count_solutions_exact(neq2()) == 2
    assert count_solutions_exact(Instance([3, 4])) == 12


def test_four_queens_count_matches_enumeration():
    inst = queens(4)
    brute = sum(is_consistent(inst, dict(enumerate(p))) for p in itertools.product(range(4), repeat=4))
    assert brute == 2
    assert count_solutions_exact(inst) == 2


def test_constraint_queried_from_both_ends():
    c = BinaryConstraint((3, 1), ((True, False, True), (False, False, True)))
    for a in range(2):
        for b in range(3):
            assert c.allows(3, a, b) == c.allows(1, b, a) == c.allowed[a][b]
    assert [bin(m) for m in c.supports(3)] == ["0b101", "0b100"]
    assert c.supports(1) == (0b01, 0b00, 0b11)


def test_instance_validation():
    with pytest.raises(StructureError):
        Instance([2, 0])
    with pytest.raises(StructureError):
        BinaryConstraint((1, 1), ((True,),))
    c = BinaryConstraint((0, 1), ((True, True),))
    with pytest.raises(StructureError):
        Instance([1, 2], [c, BinaryConstraint((1, 0), ((True,), (True,)))])
    with pytest.raises(StructureError):
        Instance([2, 2], [c])
    with pytest.raises(StructureError):
        Instance([1, 2], [BinaryConstraint((0, 5), ((True, True),))])


def test_restricted_instance_cuts_domain():
    inst = random_instance(random.Random(3), max_vars=4, max_dom=3, density=1.0)
    for var in range(inst.num_variables):
        for value in range(len(inst.domains[var])):
            sub = inst.restricted(var, value)
            expected = sum(1 for s in brute_force_solutions(inst) if s[var] == value)
            assert count_solutions_exact(sub) == expected


@settings(max_examples=150, deadline=None)
@given(instances())
def test_solver_and_counter_agree(inst):
    sols = list(brute_force_solutions(inst))
    assert count_solutions_exact(inst) == len(sols)
    first = solve_exhaustive(inst)
    assert (first is not None) == (len(sols) > 0)
    if sols:
        # lexicographic first
        assert first == min(sols, key=lambda s: [s[v] for v in range(inst.num_variables)])


@settings(max_examples=100, deadline=None)
@given(instances(max_vars=4, max_dom=3))
def test_consistency_matches_solution_membership(inst):
    sols = {tuple(s[v] for v in range(inst.num_variables)) for s in brute_force_solutions(inst)}
    for combo in itertools.product(*(range(len(d)) for d in inst.domains)):
        assert is_consistent(inst, dict(enumerate(combo))) == (combo in sols)
