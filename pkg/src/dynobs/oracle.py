"""Brute-force reference procedures used to cross-check the real algorithms.

None of these share code with the algorithms they check: they simulate the
plant and observer directly, enumerate runs, cycles or strategies, and are
only meant for small instances.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from .automata import EPS, FAULT, Plant, epsilon_complete


def _silent(plant, obs, q, s):
    """Steps producing no observation: plant label, target, observer target."""
    for label, d in plant.succ[q]:
        if label in (EPS, FAULT):
            yield label, d, s
        elif label not in obs.watch[s]:
            yield label, d, s


def _close_faulty(plant, obs, k, configs):
    seen = set(configs)
    stack = list(configs)
    while stack:
        q, s, j = stack.pop()
        for label, d, s2 in _silent(plant, obs, q, s):
            if j >= 0:
                nj = min(j + 1, k)
            else:
                nj = 0 if label == FAULT else -1
            c = (d, s2, nj)
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return frozenset(seen)


def _close_healthy(plant, obs, configs):
    seen = set(configs)
    stack = list(configs)
    while stack:
        q, s = stack.pop()
        for label, d, s2 in _silent(plant, obs, q, s):
            if label != FAULT and (d, s2) not in seen:
                seen.add((d, s2))
                stack.append((d, s2))
    return frozenset(seen)


def diagnosable_by_observation(plant: Plant, obs, k: int) -> bool:
    """Exact search over observation words.

    Tracks, for each observation word, the configurations every run producing
    it can reach, with the post-fault step count saturating at ``k``.  The
    plant is not ``k``-diagnosable iff some word is produced both by a
    ``k``-faulty run and by a fault-free run.
    """
    plant = epsilon_complete(plant)
    left = _close_faulty(plant, obs, k, [(plant.initial, obs.initial, -1)])
    right = _close_healthy(plant, obs, [(plant.initial, obs.initial)])
    start = (left, right)
    seen = {start}
    stack = [start]
    while stack:
        left, right = stack.pop()
        if any(j == k for _, _, j in left):
            return False
        for a in plant.alphabet:
            nl = []
            for q, s, j in left:
                if a in obs.watch[s]:
                    nj = -1 if j < 0 else min(j + 1, k)
                    nl += [(d, obs.step(s, a), nj) for d in plant.step(q, a)]
            nr = []
            for q, s in right:
                if a in obs.watch[s]:
                    nr += [(d, obs.step(s, a)) for d in plant.step(q, a)]
            if not nl or not nr:
                continue
            nxt = (_close_faulty(plant, obs, k, nl), _close_healthy(plant, obs, nr))
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def _observation(obs, labels):
    s, out = obs.initial, []
    for a in labels:
        if a in (EPS, FAULT):
            continue
        if a in obs.watch[s]:
            out.append(a)
        s = obs.step(s, a)
    return tuple(out)


def violating_pair(plant: Plant, obs, k: int, max_len: int):
    """A ``k``-faulty run and a fault-free run of length ``<= max_len`` with the
    same observation, found by plain enumeration, or ``None``."""
    plant = epsilon_complete(plant)
    faulty, healthy = {}, {}

    def walk(q, labels):
        word = _observation(obs, labels)
        if FAULT in labels:
            if len(labels) - labels.index(FAULT) - 1 >= k:
                faulty.setdefault(word, labels)
        else:
            healthy.setdefault(word, labels)
        if len(labels) < max_len:
            for label, d in plant.succ[q]:
                walk(d, labels + (label,))

    walk(plant.initial, ())
    for word in sorted(faulty):
        if word in healthy:
            return faulty[word], healthy[word]
    return None


def simple_cycles(n, succ):
    """Every simple cycle as a vertex list starting at its least vertex."""
    out = []
    for start in range(n):
        stack = [(start, [start])]
        while stack:
            v, path = stack.pop()
            for w in succ[v]:
                if w == start:
                    out.append(path)
                elif w > start and w not in path:
                    stack.append((w, path + [w]))
    return out


def max_cycle_mean_bruteforce(n, succ, weight, source):
    """Best mean state weight over simple cycles reachable from ``source``."""
    reach, stack = {source}, [source]
    while stack:
        v = stack.pop()
        for w in succ[v]:
            if w not in reach:
                reach.add(w)
                stack.append(w)
    best = None
    for cyc in simple_cycles(n, succ):
        if cyc[0] in reach:
            m = Fraction(sum(weight[v] for v in cyc), len(cyc))
            best = m if best is None or m > best else best
    return best


def play_mean(game, choice, start):
    """Mean edge weight on the cycle reached when every vertex follows ``choice``."""
    pos, order = {}, []
    v = start
    while v not in pos:
        pos[v] = len(order)
        order.append(v)
        v = game.edges[choice[v]][1]
    cyc = order[pos[v]:]
    return Fraction(sum(game.edges[choice[u]][2] for u in cyc), len(cyc))


def game_value_bruteforce(game, start=None):
    """max over Player 1 positional strategies of min over Player 2 ones."""
    start = game.source if start is None else start
    out = game.out_edges()
    p1 = [v for v in range(len(game.vertices)) if game.owner[v] == 1]
    p2 = [v for v in range(len(game.vertices)) if game.owner[v] == 2]
    best = None
    for c1 in itertools.product(*(out[v] for v in p1)):
        worst = None
        for c2 in itertools.product(*(out[v] for v in p2)):
            choice = dict(zip(p1, c1))
            choice.update(zip(p2, c2))
            m = play_mean(game, choice, start)
            worst = m if worst is None or m < worst else worst
        best = worst if best is None or worst > best else best
    return best


def strategy_pairs(game) -> int:
    total = 1
    for edges in game.out_edges():
        total *= len(edges)
    return total
