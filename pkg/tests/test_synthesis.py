import random

import pytest

from dynobs.automata import Plant
from dynobs.diagnosis import check_dynamic, check_static
from dynobs.errors import ResourceError
from dynobs.generate import random_observer, random_plant
from dynobs.observer import static_observer, validate_observer
from dynobs.synthesis import (SELECTORS, build_game, build_knowledge_game, extract_observer,
                              most_permissive_observer, mpo_membership, observer_to_strategy,
                              solve_safety)

from conftest import make_b, make_fig2

A, B_, AB = frozenset("a"), frozenset("b"), frozenset("ab")


def test_b_k2_allowed_sets():
    mpo = most_permissive_observer(make_b(), 2)
    assert A in mpo.allowed[0] and AB in mpo.allowed[0]
    assert B_ not in mpo.allowed[0] and frozenset() not in mpo.allowed[0]
    after_a = mpo.successors(0, A)["a"]
    assert B_ in mpo.allowed[after_a]


def test_b_k0_has_no_observer():
    assert most_permissive_observer(make_b(), 0) is None


def test_b_k1_full_observation_suffices():
    # watching everything already diagnoses B with delay 1
    assert check_static(make_b(), AB, 1).diagnosable
    mpo = most_permissive_observer(make_b(), 1)
    assert mpo is not None and mpo.allowed[0] == (AB,)


def test_fig2_is_a_member():
    mpo = most_permissive_observer(make_b(), 2)
    assert mpo_membership(mpo, make_fig2()) == (True, None)
    assert mpo_membership(mpo, static_observer(make_b().alphabet))[0]


def test_non_member_history():
    mpo = most_permissive_observer(make_b(), 2)
    ok, history = mpo_membership(mpo, static_observer(make_b().alphabet, {"a"}))
    assert not ok
    assert history == [A, "a", A]


def test_selectors_on_b():
    mpo = most_permissive_observer(make_b(), 2)
    small = extract_observer(mpo, "smallest")
    assert small.watch[0] == A and small.watch[small.step(0, "a")] == B_
    large = extract_observer(mpo, "largest")
    assert all(w == AB for w in large.watch[:1])
    for name in SELECTORS:
        obs = extract_observer(mpo, name)
        assert validate_observer(obs) == []
        assert check_dynamic(make_b(), obs, 2).diagnosable


def test_fault_free_plant_allows_everything():
    p = Plant.build(["x"], "x", ["a", "b"], [("x", "a", "x"), ("x", "b", "x")])
    mpo = most_permissive_observer(p, 0)
    assert set(mpo.allowed[0]) == set(p.alphabet.powerset())


def test_cap():
    with pytest.raises(ResourceError):
        most_permissive_observer(make_b(), 2, cap=1)


def test_game_shape():
    arena = build_game(make_b(), 2)
    kg = build_knowledge_game(arena)
    winning, allowed = solve_safety(kg)
    assert winning[0]
    # bad states are never expanded
    assert all(not arena.is_bad(t[:3]) for t in arena.silent)


def test_observer_strategy_follows_history():
    arena = build_game(make_b(), 2)
    strat = observer_to_strategy(make_fig2(), arena)
    assert strat([]) == A
    assert strat([A, "_eps", "a"]) == B_


def test_random_soundness_and_membership():
    rng = random.Random(21)
    done = 0
    while done < 40:
        plant = random_plant(rng, max_states=4, max_events=2)
        k = rng.randint(0, 2)
        mpo = most_permissive_observer(plant, k)
        assert (mpo is not None) == check_static(plant, plant.alphabet.events, k).diagnosable
        if mpo is None:
            continue
        done += 1
        assert frozenset(plant.alphabet.events) in mpo.allowed[0]
        for name in SELECTORS:
            assert check_dynamic(plant, extract_observer(mpo, name), k).diagnosable
        for _ in range(10):
            obs = random_observer(rng, plant.alphabet)
            assert mpo_membership(mpo, obs)[0] == check_dynamic(plant, obs, k).diagnosable
