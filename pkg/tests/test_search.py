import random

import pytest
from hypothesis import given, settings

from rationalcsp.csp import BinaryConstraint, Instance, is_consistent, queens, solve_exhaustive
from rationalcsp.generators import RBParams, generate_model_rb
from rationalcsp.search import RunConfig, StatsRecord, search, variable_order

from conftest import instances, random_instance

CONFIGS = [
    RunConfig("lex"),
    RunConfig("mc"),
    RunConfig("sc"),
    RunConfig("vsc", gamma=0.0),
    RunConfig("vsc", gamma=1e-3),
    RunConfig("vsc", gamma=1e6),
    RunConfig("rand-sc", seed=3),
]


def test_unsatisfiable_tiny():
    inst = Instance([1, 1], [BinaryConstraint.from_predicate(0, 1, 1, 1, lambda a, b: a != b)])
    for cfg in CONFIGS:
        sol, stats = search(inst, cfg)
        assert sol is None
        assert not stats.solved and not stats.timed_out
        assert stats.backtracks >= 0


def test_satisfiable_tiny():
    for cfg in CONFIGS:
        sol, stats = search(queens(6), cfg)
        assert stats.solved
        assert is_consistent(queens(6), sol)


def test_backtracks_counted_on_unsat_after_branching():
    # X in {0,1}; Y, Z in {0,1} all different: arc consistent at the root, no solution
    cons = [BinaryConstraint.from_predicate(i, j, 2, 2, lambda a, b: a != b) for i, j in ((0, 1), (0, 2), (1, 2))]
    inst = Instance([2, 2, 2], cons)
    sol, stats = search(inst, RunConfig("lex"))
    assert sol is None
    # both values of the first variable wipe out under propagation
    assert stats.backtracks == 2
    assert stats.nodes == 2


def test_variable_order_by_degree():
    cons = [BinaryConstraint.from_predicate(i, 3, 2, 2, lambda a, b: True) for i in range(3)]
    cons.append(BinaryConstraint.from_predicate(1, 2, 2, 2, lambda a, b: True))
    inst = Instance([2, 2, 2, 2], cons)
    assert variable_order(inst) == [3, 1, 2, 0]


def test_empty_instance():
    sol, stats = search(Instance([]), RunConfig("lex"))
    assert sol == {} and stats.solved


def test_oracle_equivalence_many_instances():
    rng = random.Random(2024)
    for _ in range(200):
        inst = random_instance(rng, max_vars=6, max_dom=4)
        expect = solve_exhaustive(inst) is not None
        for cfg in CONFIGS:
            sol, stats = search(inst, cfg)
            assert stats.solved == expect == (sol is not None)
            if sol is not None:
                assert is_consistent(inst, sol)


@settings(max_examples=100, deadline=None)
@given(instances(max_vars=6, max_dom=4))
def test_heuristics_agree_on_verdict(inst):
    verdicts = {search(inst, cfg)[1].solved for cfg in CONFIGS}
    assert len(verdicts) == 1


def test_deterministic_counters():
    inst = generate_model_rb(RBParams(20, 6, 60, 14, seed=1))
    for cfg in CONFIGS:
        a = search(inst, cfg)[1]
        b = search(inst, cfg)[1]
        for name in ("backtracks", "nodes", "constraint_checks", "sc_estimations", "ordering_calls", "solved"):
            assert getattr(a, name) == getattr(b, name)


def test_stats_invariants():
    inst = generate_model_rb(RBParams(20, 6, 60, 14, seed=2))
    for cfg in CONFIGS:
        _, st = search(inst, cfg)
        assert 0 <= st.heuristic_time <= st.search_time
        assert st.residual_time >= 0
        assert min(st.backtracks, st.nodes, st.constraint_checks, st.sc_estimations) >= 0
        if cfg.heuristic in ("lex", "mc"):
            assert st.sc_estimations == 0


def test_sc_and_vsc_gamma_zero_identical():
    inst = generate_model_rb(RBParams(20, 6, 60, 14, seed=3))
    ta, tb = [], []
    a = search(inst, RunConfig("sc"), trace=ta)[1]
    b = search(inst, RunConfig("vsc", gamma=0.0), trace=tb)[1]
    assert ta == tb
    assert (a.backtracks, a.sc_estimations) == (b.backtracks, b.sc_estimations)


def test_huge_gamma_behaves_like_lex():
    inst = generate_model_rb(RBParams(20, 6, 60, 14, seed=4))
    ta, tb = [], []
    a = search(inst, RunConfig("lex"), trace=ta)[1]
    b = search(inst, RunConfig("vsc", gamma=1e6), trace=tb)[1]
    assert ta == tb and b.sc_estimations == 0 and a.backtracks == b.backtracks


def test_ordering_computed_once_per_node():
    inst = generate_model_rb(RBParams(15, 5, 40, 10, seed=0))
    calls = []

    def orderer(store, var, N):
        calls.append(var)
        return store.values(var), None, 0

    sol, st = search(inst, RunConfig("lex"), orderer=orderer)
    assert st.ordering_calls == len(calls)
    # one call per node entered, never repeated while trying sibling values
    assert st.ordering_calls <= st.nodes + 1


def test_timeout_and_node_limit():
    inst = queens(9)
    _, st = search(inst, RunConfig("lex", timeout=0.0))
    assert st.timed_out and not st.solved
    _, st = search(queens(12), RunConfig("lex", node_limit=3))
    assert st.timed_out and not st.solved
    _, st = search(queens(12), RunConfig("lex", node_limit=1000))
    assert st.solved and not st.timed_out


def test_rand_sc_budget_is_respected():
    inst = generate_model_rb(RBParams(20, 6, 60, 14, seed=5))
    _, st = search(inst, RunConfig("rand-sc", rand_rate=1.0, rand_budget=7))
    assert st.sc_estimations <= 7
    _, full = search(inst, RunConfig("rand-sc", rand_rate=1.0))
    assert full.sc_estimations == full.value_slots


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig("bogus")
    with pytest.raises(ValueError):
        RunConfig(gamma=-1)
    with pytest.raises(ValueError):
        RunConfig(repeat=0)
    with pytest.raises(ValueError):
        RunConfig(stop="all")
    assert RunConfig("vsc", gamma=1e-3).label == "vsc@0.001"
    assert StatsRecord(heuristic="vsc", gamma=0.0).config == "vsc@0"
