"""Diagnosability of a plant under static and dynamic observation.

The check runs on a twin product: a left copy of the plant that may fault
and counts its own steps after the first fault, and a right copy that never
faults.  Watched events move both copies jointly; every other step moves one
copy alone.  A reachable twin state whose counter has reached ``k`` pairs a
``k``-faulty run with a fault-free run that has the same observation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .automata import (EPS, FAULT, Lasso, Plant, Run, check_same_alphabet, epsilon_complete,
                       masked_product)
from .graphs import bfs_path, strongly_connected_components
from .observer import Observer

LEFT, RIGHT, JOINT = "L", "R", "J"


@dataclass(frozen=True)
class Verdict:
    diagnosable: bool
    k: int
    min_k: int | None
    # (faulty, fault-free) lassos with identical observations
    counterexample: tuple[Lasso, Lasso] | None = None
    completed: bool = False
    stats: dict = field(default_factory=dict, compare=False)


def _bump(j, label, k):
    if j < 0:
        return 0 if label == FAULT else -1
    return j + 1 if k is None or j + 1 < k else k


def _twin_moves(plant: Plant, sub, k, state):
    """Successors of a twin state ``(q1, j, q2)`` in canonical order.

    With ``k=None`` the counter is a bare fault flag in ``{-1, 0}``.
    """
    q1, j, q2 = state
    for label, d in plant.succ[q1]:
        if label not in sub:
            nj = _bump(j, label, k)
            if k is None:
                nj = min(nj, 0)
            yield (LEFT, label, d, None), (d, nj, q2)
    for label, d in plant.succ[q2]:
        if label not in sub and label != FAULT:
            yield (RIGHT, label, None, d), (q1, j, d)
    for label, d1 in plant.succ[q1]:
        if label in sub:
            for d2 in plant.step(q2, label):
                nj = _bump(j, label, k)
                if k is None:
                    nj = min(nj, 0)
                yield (JOINT, label, d1, d2), (d1, nj, d2)


def _split(moves, q0):
    """Turn twin moves into (left steps, right steps)."""
    left, right = [], []
    for kind, label, d1, d2 in moves:
        if kind in (LEFT, JOINT):
            left.append((label, d1))
        if kind in (RIGHT, JOINT):
            right.append((label, d2))
    return tuple(left), tuple(right)


def _bad_path(plant, sub, k):
    """Shortest twin path to a state with counter ``k``, or ``None``."""
    init = (plant.initial, -1, plant.initial)
    if k == 0:
        goal_test = lambda s: s[1] == 0  # noqa: E731
    else:
        goal_test = lambda s: s[1] == k  # noqa: E731
    parent = {init: None}
    frontier = [init]
    while frontier:
        nxt = []
        for s in frontier:
            for move, t in _twin_moves(plant, sub, k, s):
                if t in parent:
                    continue
                parent[t] = (s, move)
                if goal_test(t):
                    path = []
                    while parent[t] is not None:
                        t, m = parent[t]
                        path.append(m)
                    return path[::-1], len(parent)
                nxt.append(t)
        frontier = nxt
    return None, len(parent)


def _flag_graph(plant, sub):
    init = (plant.initial, -1, plant.initial)
    order, index, edges = [init], {init: 0}, []
    i = 0
    while i < len(order):
        s = order[i]
        out = []
        for move, t in _twin_moves(plant, sub, None, s):
            if t not in index:
                index[t] = len(order)
                order.append(t)
            out.append((move, index[t]))
        edges.append(out)
        i += 1
    return order, index, edges


def _unbounded_witness(plant, sub):
    """Lasso pair showing non-diagnosability for every ``k``, else ``None``.

    Such a pair exists iff the flagged twin graph has a reachable cycle, after
    the fault, that contains a step of the left copy.
    """
    order, index, edges = _flag_graph(plant, sub)
    n = len(order)
    comp = strongly_connected_components(n, [[t for _, t in out] for out in edges])
    pivot = None
    for u in range(n):
        if order[u][1] < 0:
            continue
        for move, v in edges[u]:
            if comp[u] == comp[v] and move[0] in (LEFT, JOINT):
                pivot = (u, move, v)
                break
        if pivot:
            break
    if pivot is None:
        return None, n
    u, move, v = pivot
    succ = lambda x: edges[x]  # noqa: E731
    stem = bfs_path(0, u, succ)
    back = bfs_path(v, u, succ, allowed=lambda y: comp[y] == comp[u])
    cycle = [move] + back
    sl, sr = _split(stem, plant.initial)
    cl, cr = _split(cycle, plant.initial)
    faulty = Lasso(Run(plant.initial, sl), cl)
    healthy = Lasso(Run(plant.initial, sr), cr)
    return (faulty, healthy), n


def _min_k(plant, sub):
    witness, n_flag = _unbounded_witness(plant, sub)
    if witness is not None:
        return None, witness, n_flag
    lo, hi = 0, n_flag
    while lo < hi:
        mid = (lo + hi) // 2
        if _bad_path(plant, sub, mid)[0] is None:
            hi = mid
        else:
            lo = mid + 1
    return lo, None, n_flag


def _static(plant: Plant, sub: frozenset, k: int):
    if k < 0:
        raise ValueError("k must be non-negative")
    path, explored = _bad_path(plant, sub, k)
    min_k, witness, n_flag = _min_k(plant, sub)
    stats = {"twin_states_k": explored, "twin_states_flag": n_flag}
    if path is None:
        return min_k, None, stats
    if witness is None:
        left, right = _split(path, plant.initial)
        witness = (Lasso(Run(plant.initial, left)), Lasso(Run(plant.initial, right)))
    return min_k, witness, stats


def check_static(plant: Plant, sub: Iterable[str], k: int) -> Verdict:
    """Is ``plant`` diagnosable within ``k`` steps when watching ``sub`` forever?"""
    sub = plant.alphabet.subset(sub)
    completed = epsilon_complete(plant)
    min_k, witness, stats = _static(completed, sub, k)
    return Verdict(witness is None, k, min_k, witness, completed is not plant, stats)


def _lift_steps(plant: Plant, obs: Observer, pairs, start, steps):
    """Map product steps back to plant steps (hidden labels are recovered)."""
    out = []
    q, s = pairs[start]
    for label, d in steps:
        q2, s2 = pairs[d]
        if label == EPS:
            if q2 in plant.step(q, EPS):
                orig = EPS
            else:
                orig = next(a for a in plant.alphabet
                            if a not in obs.watch[s] and q2 in plant.step(q, a))
        else:
            orig = label
        out.append((orig, q2))
        q, s = q2, s2
    return tuple(out)


def _lift_lasso(plant, obs, pairs, lasso: Lasso) -> Lasso:
    stem = Run(pairs[lasso.stem.start][0],
               _lift_steps(plant, obs, pairs, lasso.stem.start, lasso.stem.steps))
    cycle = _lift_steps(plant, obs, pairs, lasso.stem.end, lasso.cycle)
    return Lasso(stem, cycle)


def check_dynamic(plant: Plant, obs: Observer, k: int) -> Verdict:
    """Is ``plant`` diagnosable within ``k`` steps under the dynamic observer ``obs``?

    Reduces to the static check with full observation on the masked product;
    counterexamples are mapped back to runs of ``plant``.
    """
    check_same_alphabet(plant, obs)
    completed = epsilon_complete(plant)
    product, pairs = masked_product(completed, obs, with_pairs=True)
    min_k, witness, stats = _static(product, frozenset(plant.alphabet.events), k)
    stats["product_states"] = len(product.states)
    if witness is not None:
        witness = tuple(_lift_lasso(completed, obs, pairs, x) for x in witness)
    return Verdict(witness is None, k, min_k, witness, completed is not plant, stats)


def min_k_static(plant: Plant, sub: Iterable[str]) -> int | None:
    sub = plant.alphabet.subset(sub)
    return _min_k(epsilon_complete(plant), sub)[0]


def min_k_dynamic(plant: Plant, obs: Observer) -> int | None:
    check_same_alphabet(plant, obs)
    product = masked_product(epsilon_complete(plant), obs)
    return _min_k(product, frozenset(plant.alphabet.events))[0]
