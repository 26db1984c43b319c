import pytest
from hypothesis import given, settings, strategies as st

from dynobs.automata import (EPS, FAULT, Alphabet, Plant, Run, classify_k_faulty, enumerate_runs,
                             epsilon_complete, masked_product, project, sync_product, trace_of_run)
from dynobs.errors import InputError, PreconditionError
from dynobs.observer import observe_run, static_observer

from conftest import make_b, make_fig2


def test_project_drops_silent_and_unwatched():
    assert project(["a", EPS, "b", FAULT, "a"], {"a"}) == ("a", "a")
    assert project([], {"a"}) == ()


def test_project_rejects_foreign_symbols():
    with pytest.raises(InputError):
        project(["z"], {"a"}, Alphabet(("a", "b")))


@given(st.lists(st.sampled_from(["a", "b", EPS, FAULT]), max_size=12))
def test_project_idempotent(word):
    once = project(word, {"a"})
    assert project(once, {"a"}) == once


def test_alphabet_rejects_reserved_and_duplicates():
    with pytest.raises(InputError):
        Alphabet(("a", EPS))
    with pytest.raises(InputError):
        Alphabet(("a", "a"))


def test_powerset_order():
    sets = Alphabet(("a", "b")).powerset()
    assert sets == [frozenset(), frozenset("a"), frozenset("b"), frozenset("ab")]


def test_k_faulty_examples():
    r = Run(0, ((FAULT, 1), ("a", 2), ("b", 3)))
    assert classify_k_faulty(r, 2)
    assert classify_k_faulty(r, 0)
    assert not classify_k_faulty(r, 3)
    assert not classify_k_faulty(Run(0, (("a", 1),)), 0)


def test_k_faulty_chain_on_b():
    for run in enumerate_runs(make_b(), 6):
        for k in range(6):
            if classify_k_faulty(run, k + 1):
                assert classify_k_faulty(run, k)


def test_epsilon_completion():
    p = Plant.build(["x", "y"], "x", ["a"], [("x", "a", "y")])
    c = epsilon_complete(p)
    assert (1, EPS, 1) in c.transitions
    assert not c.deadlocks()
    assert epsilon_complete(c) is c


def test_b_needs_no_completion():
    b = make_b()
    assert epsilon_complete(b) is b


def test_enumerate_runs_cap():
    with pytest.raises(PreconditionError):
        enumerate_runs(make_b(), 50)


def test_sync_product_shared_events():
    p1 = Plant.build(["0", "1"], "0", ["a"], [("0", "a", "1"), ("1", EPS, "1")])
    p2 = Plant.build(["0", "1"], "0", ["a", "b"], [("0", "b", "1"), ("1", "a", "0")])
    prod = sync_product(p1, p2)
    names = {prod.states[s] + l + prod.states[d] for s, l, d in prod.transitions}
    # a synchronizes, b and ε interleave
    assert "(0,0)b(0,1)" in names
    assert "(0,1)a(1,0)" in names
    assert "(1,0)b(1,1)" in names
    assert all(l != "a" or s != 0 for s, l, d in prod.transitions)


def test_masked_product_golden(plant_b, fig2):
    prod = masked_product(plant_b, fig2)
    edges = {(prod.states[s], l, prod.states[d]) for s, l, d in prod.transitions}
    assert edges == {
        ("(s0,0)", FAULT, "(s1,0)"), ("(s0,0)", EPS, "(s4,0)"),
        ("(s1,0)", "a", "(s2,1)"), ("(s2,1)", "b", "(s3,2)"), ("(s3,2)", EPS, "(s3,2)"),
        ("(s4,0)", "a", "(s5,1)"), ("(s5,1)", EPS, "(s5,1)"),
    }


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_masked_product_trace_correspondence(seed):
    import random
    from dynobs.generate import random_observer, random_plant
    rng = random.Random(seed)
    plant = random_plant(rng, max_states=4, max_events=2)
    obs = random_observer(rng, plant.alphabet, max_states=3)
    prod = masked_product(plant, obs)
    events = set(plant.alphabet.events)
    want = {(observe_run(plant, obs, r), classify_k_faulty(r, 1)) for r in enumerate_runs(plant, 5)}
    got = {(tuple(a for a in trace_of_run(r) if a in events), classify_k_faulty(r, 1))
           for r in enumerate_runs(prod, 5)}
    assert want == got


def test_static_masked_product_keeps_labels(plant_b):
    obs = static_observer(plant_b.alphabet)
    prod = masked_product(plant_b, obs)
    assert sorted(l for _, l, _ in prod.transitions) == sorted(l for _, l, _ in plant_b.transitions)
