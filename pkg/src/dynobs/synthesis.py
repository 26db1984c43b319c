"""Observer synthesis as a safety game with partial information.

Player 1 (the observer) picks a watch-set ``X``; Player 2 (the plant) then
moves a faulty left copy and a fault-free right copy, silently for events
outside ``X`` and jointly for an event in ``X``, which hands the turn back.
Player 2 wins by driving the left copy ``k`` steps past a fault.

Player 1 only sees the joint events, so the game is solved on knowledge
states: sets of ``(q1, j, q2)`` triples consistent with the observations so
far.  The greatest fixpoint of the safety operator yields, for every winning
knowledge state, the family of all watch-sets that keep the play winning.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Callable

from .automata import EPS, FAULT, Alphabet, Plant, check_same_alphabet, epsilon_complete
from .errors import InputError, ResourceError
from .observer import Observer

DEFAULT_CAP = 1 << 20


def default_cap() -> int:
    return int(os.environ.get("DYNOBS_CAP", DEFAULT_CAP))


def _bump(j, label, k):
    if j < 0:
        return 0 if label == FAULT else -1
    return min(j + 1, k)


@dataclass
class GameArena:
    plant: Plant
    k: int
    initial: tuple
    p1_states: list
    p2_states: list
    # p2 state -> list of (label, p2 state) for silent moves
    silent: dict
    # p2 state -> list of (event, p1 state) for visible moves
    visible: dict

    def is_bad(self, state) -> bool:
        return state[1] == self.k

    def choices(self):
        return self.plant.alphabet.powerset()


def _silent_moves(plant, k, state):
    q1, j, q2, X = state
    for label, d in plant.succ[q1]:
        if label not in X:
            yield label, (d, _bump(j, label, k), q2, X)
    for label, d in plant.succ[q2]:
        # moves of the fault-free copy do not advance the post-fault counter
        if label not in X and label != FAULT:
            yield label, (q1, j, d, X)


def _visible_moves(plant, k, state):
    q1, j, q2, X = state
    for label, d1 in plant.succ[q1]:
        if label in X:
            for d2 in plant.step(q2, label):
                yield label, (d1, _bump(j, label, k), d2)


def build_game(plant: Plant, k: int) -> GameArena:
    """Reachable part of the safety game; bad states are left unexpanded."""
    if k < 0:
        raise ValueError("k must be non-negative")
    plant = epsilon_complete(plant)
    choices = plant.alphabet.powerset()
    init = (plant.initial, -1, plant.initial)
    p1, p2 = [init], []
    seen1, seen2 = {init}, set()
    silent, visible = {}, {}
    queue = deque([init])
    while queue:
        s = queue.popleft()
        if s[1] == k:
            continue
        for X in choices:
            start = s + (X,)
            if start in seen2:
                continue
            seen2.add(start)
            p2.append(start)
            stack = [start]
            while stack:
                t = stack.pop()
                if t[1] == k:
                    continue
                silent[t] = list(_silent_moves(plant, k, t))
                visible[t] = list(_visible_moves(plant, k, t))
                for _, u in silent[t]:
                    if u not in seen2:
                        seen2.add(u)
                        p2.append(u)
                        stack.append(u)
                for _, u in visible[t]:
                    if u not in seen1:
                        seen1.add(u)
                        p1.append(u)
                        queue.append(u)
    return GameArena(plant, k, init, p1, p2, silent, visible)


@dataclass
class KnowledgeArena:
    arena: GameArena
    nodes: list  # frozensets of p1 triples
    # node -> {X: (losing, {event: successor node})}
    edges: list

    @property
    def alphabet(self) -> Alphabet:
        return self.arena.plant.alphabet


def _closure(arena: GameArena, knowledge, X):
    start = [t + (X,) for t in knowledge]
    seen = set(start)
    stack = list(start)
    while stack:
        t = stack.pop()
        if t[1] == arena.k:
            return seen, True
        for _, u in arena.silent.get(t, ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen, False


def build_knowledge_game(arena: GameArena, cap: int | None = None) -> KnowledgeArena:
    """Subset construction over what Player 1 can know from its observations."""
    cap = default_cap() if cap is None else cap
    alphabet = arena.plant.alphabet
    choices = alphabet.powerset()
    k0 = frozenset([arena.initial])
    nodes, index, edges = [k0], {k0: 0}, []
    i = 0
    while i < len(nodes):
        K = nodes[i]
        out = {}
        for X in choices:
            closure, losing = _closure(arena, K, X)
            succ = {}
            if not losing:
                images = {}
                for t in closure:
                    for label, u in arena.visible.get(t, ()):
                        images.setdefault(label, set()).add(u)
                for label in alphabet.ordered(images):
                    nxt = frozenset(images[label])
                    if nxt not in index:
                        index[nxt] = len(nodes)
                        nodes.append(nxt)
                        if len(nodes) > cap:
                            raise ResourceError("knowledge game", cap)
                    succ[label] = index[nxt]
            out[X] = (losing, succ)
        edges.append(out)
        i += 1
    return KnowledgeArena(arena, nodes, edges)


def solve_safety(kg: KnowledgeArena):
    """Greatest fixpoint.  Returns ``(winning, allowed)``.

    ``allowed[i]`` lists, in canonical order, every watch-set that is not
    immediately losing at node ``i`` and whose observable successors are all
    winning; node ``i`` is winning iff that list is nonempty.
    """
    n = len(kg.nodes)
    winning = [True] * n
    preds = [set() for _ in range(n)]
    for i, out in enumerate(kg.edges):
        for losing, succ in out.values():
            for j in succ.values():
                preds[j].add(i)

    def allowed_at(i):
        return [X for X, (losing, succ) in kg.edges[i].items()
                if not losing and all(winning[j] for j in succ.values())]

    queue = deque(range(n))
    queued = [True] * n
    while queue:
        i = queue.popleft()
        queued[i] = False
        if winning[i] and not allowed_at(i):
            winning[i] = False
            for p in preds[i]:
                if winning[p] and not queued[p]:
                    queued[p] = True
                    queue.append(p)
    key = kg.alphabet.set_key
    allowed = [sorted(allowed_at(i), key=key) if winning[i] else [] for i in range(n)]
    return winning, allowed


@dataclass(frozen=True)
class MostPermissiveObserver:
    """Alternating choice/wait automaton over winning knowledge states.

    Even node ``i`` offers every watch-set in ``allowed[i]``; the odd node
    ``(i, X)`` waits for an event of ``X`` and moves to ``succ[(i, X, a)]``.
    Events of ``X`` the plant cannot produce jointly have no successor.
    """

    alphabet: Alphabet
    k: int
    knowledge: tuple
    allowed: tuple
    succ: dict
    plant_name: str = "A"
    initial: int = 0

    def odd_nodes(self):
        return [(i, X) for i, xs in enumerate(self.allowed) for X in xs]

    def successors(self, i, X):
        return {a: self.succ[(i, X, a)] for a in self.alphabet.ordered(X) if (i, X, a) in self.succ}


def most_permissive_observer(plant: Plant, k: int, cap: int | None = None):
    """The most permissive observer for ``(plant, k)``, or ``None`` when no observer exists."""
    arena = build_game(plant, k)
    kg = build_knowledge_game(arena, cap)
    winning, allowed = solve_safety(kg)
    if not winning[0]:
        return None
    order, index = [0], {0: 0}
    i = 0
    while i < len(order):
        node = order[i]
        for X in allowed[node]:
            for label, j in kg.edges[node][X][1].items():
                if j not in index:
                    index[j] = len(order)
                    order.append(j)
        i += 1
    succ = {}
    for node in order:
        for X in allowed[node]:
            for label, j in kg.edges[node][X][1].items():
                succ[(index[node], X, label)] = index[j]
    return MostPermissiveObserver(
        plant.alphabet, k,
        tuple(kg.nodes[n] for n in order),
        tuple(tuple(allowed[n]) for n in order),
        succ, plant.name)


def mpo_membership(mpo: MostPermissiveObserver, obs: Observer):
    """Does every choice of ``obs`` lie inside ``mpo``?

    Returns ``(True, None)`` or ``(False, history)`` where ``history`` is the
    shortest annotated observation history ending in a disallowed watch-set.
    """
    if set(mpo.alphabet.events) != set(obs.alphabet.events):
        raise InputError("observer and most permissive observer have different alphabets")
    start = (obs.initial, mpo.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        s, node = queue.popleft()
        X = obs.watch[s]
        if X not in mpo.allowed[node]:
            history = [X]
            cur = (s, node)
            while parent[cur] is not None:
                prev, a = parent[cur]
                history = [obs.watch[prev[0]], a] + history
                cur = prev
            return False, history
        for a, nxt in mpo.successors(node, X).items():
            t = (obs.step(s, a), nxt)
            if t not in parent:
                parent[t] = ((s, node), a)
                queue.append(t)
    return True, None


def _lex_least(alphabet):
    return lambda xs: min(xs, key=lambda X: sorted(alphabet.index(e) for e in X))


SELECTORS = {
    "lex": lambda alphabet: _lex_least(alphabet),
    "smallest": lambda alphabet: lambda xs: min(xs, key=alphabet.set_key),
    "largest": lambda alphabet: lambda xs: min(
        xs, key=lambda X: (-len(X), alphabet.set_key(X)[1])),
}


def extract_observer(mpo: MostPermissiveObserver, selector="smallest", name=None) -> Observer:
    """Fold one choice per knowledge node into a finite observer.

    ``selector`` is a built-in name (``lex``, ``smallest``, ``largest``) or a
    callable ``(node, allowed) -> watch-set``.  Watched events without a
    successor in ``mpo`` cannot be matched by a fault-free run, so the
    observer simply stays put on them.
    """
    if isinstance(selector, str):
        if selector not in SELECTORS:
            raise InputError(f"unknown selector {selector}; expected one of {sorted(SELECTORS)}")
        pick = SELECTORS[selector](mpo.alphabet)
        choose = lambda node, xs: pick(xs)  # noqa: E731
    else:
        choose = selector
    order, index, watch, trans = [mpo.initial], {mpo.initial: 0}, [], []
    i = 0
    while i < len(order):
        node = order[i]
        X = frozenset(choose(node, mpo.allowed[node]))
        if X not in mpo.allowed[node]:
            raise InputError(f"selector picked {sorted(X)} which is not allowed at node {node}")
        watch.append(X)
        nxt = mpo.successors(node, X)
        for a in mpo.alphabet.ordered(X):
            if a in nxt:
                j = nxt[a]
                if j not in index:
                    index[j] = len(order)
                    order.append(j)
                trans.append((i, a, index[j]))
            else:
                trans.append((i, a, i))
        i += 1
    states = tuple(f"n{node}" for node in order)
    label = name or f"{mpo.plant_name}_k{mpo.k}_{selector if isinstance(selector, str) else 'custom'}"
    return Observer(states, 0, mpo.alphabet, tuple(trans), tuple(watch), label)


def observer_to_strategy(obs: Observer, arena: GameArena) -> Callable:
    """Trace-based strategy induced by ``obs``.

    The returned function maps a play history, given as its sequence of move
    labels (watch-sets for Player 1, ``EPS`` for silent Player 2 moves and the
    event for visible ones),
    to the watch-set ``obs`` selects after the history's observable events.
    """
    check_same_alphabet(arena.plant, obs)
    events = set(arena.plant.alphabet.events)

    def strategy(history):
        word = [m for m in history if isinstance(m, str) and m in events]
        return obs.watch_after(word)

    return strategy


__all__ = [
    "GameArena", "KnowledgeArena", "MostPermissiveObserver", "build_game",
    "build_knowledge_game", "solve_safety", "most_permissive_observer", "mpo_membership",
    "extract_observer", "observer_to_strategy", "SELECTORS", "EPS",
]
