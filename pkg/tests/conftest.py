import pytest

from dynobs.automata import EPS, FAULT, Plant
from dynobs.observer import Observer


def make_b():
    return Plant.build(
        ["s0", "s1", "s2", "s3", "s4", "s5"], "s0", ["a", "b"],
        [("s0", FAULT, "s1"), ("s1", "a", "s2"), ("s2", "b", "s3"), ("s3", EPS, "s3"),
         ("s0", "b", "s4"), ("s4", "a", "s5"), ("s5", EPS, "s5")],
        "B")


def make_fig2():
    return Observer.build(
        ["0", "1", "2"], "0", ["a", "b"], [("0", "a", "1"), ("1", "b", "2")],
        {"0": ["a"], "1": ["b"], "2": []}, "fig2")


@pytest.fixture
def plant_b():
    return make_b()


@pytest.fixture
def fig2():
    return make_fig2()
