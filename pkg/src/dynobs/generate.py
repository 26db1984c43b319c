"""Seeded random instances for property tests and the self-check command."""
from __future__ import annotations

import random

from .automata import EPS, FAULT, Alphabet, Plant
from .cost import WeightedAutomaton
from .meanpayoff import WeightedGraphGame
from .observer import Observer

EVENTS = ("a", "b", "c", "d")


def random_plant(rng: random.Random, max_states=6, max_events=3, density=1.6,
                 fault_prob=0.2, eps_prob=0.15, name="R") -> Plant:
    n = rng.randint(1, max_states)
    alphabet = Alphabet(EVENTS[:rng.randint(1, max_events)])
    labels = list(alphabet.events)
    trans = set()
    for q in range(n):
        for _ in range(max(1, round(rng.random() * 2 * density))):
            r = rng.random()
            if r < fault_prob:
                label = FAULT
            elif r < fault_prob + eps_prob:
                label = EPS
            else:
                label = rng.choice(labels)
            trans.add((q, label, rng.randrange(n)))
    # connect every state so most of the plant is reachable
    for q in range(1, n):
        if rng.random() < 0.7:
            trans.add((rng.randrange(q), rng.choice(labels + [FAULT]), q))
    return Plant(tuple(f"q{i}" for i in range(n)), 0, alphabet, tuple(trans), name)


def random_observer(rng: random.Random, alphabet: Alphabet, max_states=4, name="O") -> Observer:
    n = rng.randint(1, max_states)
    watch, trans = [], []
    for s in range(n):
        X = frozenset(e for e in alphabet if rng.random() < 0.5)
        watch.append(X)
        for e in alphabet.ordered(X):
            trans.append((s, e, rng.randrange(n)))
    return Observer(tuple(f"o{i}" for i in range(n)), 0, alphabet, tuple(trans), tuple(watch), name)


def random_weighted_automaton(rng: random.Random, max_states=8, max_weight=5) -> WeightedAutomaton:
    n = rng.randint(1, max_states)
    alphabet = Alphabet(("a", "b"))
    trans = set()
    for q in range(n):
        trans.add((q, rng.choice("ab"), rng.randrange(n)))
        for _ in range(rng.randint(0, 2)):
            trans.add((q, rng.choice("ab"), rng.randrange(n)))
    plant = Plant(tuple(f"q{i}" for i in range(n)), 0, alphabet, tuple(trans), "W")
    return WeightedAutomaton(plant, tuple(rng.randint(0, max_weight) for _ in range(n)))


def random_game(rng: random.Random, max_vertices=10, max_weight=4, max_pairs=4096) -> WeightedGraphGame:
    """Bipartite game with every vertex reachable from the Player 1 source.

    Retries until the number of positional strategy pairs is at most
    ``max_pairs`` so that brute force stays cheap.
    """
    while True:
        n = rng.randint(2, max_vertices)
        # grow a tree from the source; each vertex hangs off a vertex of the other player
        owner, edges = [1], set()
        for v in range(1, n):
            parent = rng.randrange(v)
            owner.append(3 - owner[parent])
            edges.add((parent, v))
        verts = list(range(n))
        for v in verts:
            other = [u for u in verts if owner[u] != owner[v]]
            while not any(e[0] == v for e in edges) or rng.random() < 0.4:
                edges.add((v, rng.choice(other)))
                if rng.random() < 0.5:
                    break
        index = {v: i for i, v in enumerate(sorted(verts))}
        weighted = tuple(sorted((index[u], index[v], rng.randint(-max_weight, max_weight))
                                for u, v in edges))
        game = WeightedGraphGame(tuple(f"v{i}" for i in range(len(verts))),
                                 tuple(owner[v] for v in sorted(verts)), weighted, 0, "RG")
        pairs = 1
        for out in game.out_edges():
            pairs *= len(out)
        if pairs <= max_pairs and not game.validate():
            return game
