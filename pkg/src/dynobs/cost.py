"""Observer cost and cost-optimal observer synthesis.

The cost of an observer is the worst long-run average size of the watch-set
it keeps active, over all runs of the plant.  It is the maximum mean cycle
of the plant/observer product weighted by watch-set size.  Minimizing it over
the most permissive observer is a mean-payoff game.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .automata import EPS, FAULT, U, Plant, check_same_alphabet, epsilon_complete
from .errors import InputError, PreconditionError
from .meanpayoff import WeightedGraphGame, max_mean_cycle, solve_game
from .observer import Observer
from .synthesis import MostPermissiveObserver, extract_observer, most_permissive_observer

Weight = Callable[[frozenset], int]


def size_weight(watch: frozenset) -> int:
    return len(watch)


@dataclass(frozen=True)
class WeightedAutomaton:
    """A plant-shaped automaton with a non-negative integer weight per state."""

    automaton: Plant
    weight: tuple[int, ...]

    def __post_init__(self):
        weight = tuple(self.weight)
        object.__setattr__(self, "weight", weight)
        if len(weight) != len(self.automaton.states):
            raise InputError("weights must be given for every state")
        if any(not isinstance(w, int) or w < 0 for w in weight):
            raise InputError("weights must be non-negative integers")
        dead = self.automaton.deadlocks()
        if dead:
            raise InputError(f"state {self.automaton.states[dead[0]]} has no outgoing transition")


@dataclass(frozen=True)
class KarpResult:
    value: Fraction
    # cycle as plant steps (label, target), starting and ending at ``start``
    start: int
    cycle: tuple


def karp_max_mean(wa: WeightedAutomaton) -> KarpResult:
    """Maximum mean state weight over cycles reachable from the initial state."""
    a = wa.automaton
    edges = [(src, dst, wa.weight[src]) for src, _, dst in a.transitions]
    best = max_mean_cycle(len(a.states), edges, source=a.initial)
    if best is None:
        raise PreconditionError("no cycle is reachable")
    value, idx = best
    steps = tuple((a.transitions[i][1], a.transitions[i][2]) for i in idx)
    return KarpResult(value, a.transitions[idx[0]][0], steps)


def word_cost(obs: Observer, word, weight: Weight = size_weight) -> Fraction:
    obs.alphabet.subset(word)
    s = obs.initial
    total = weight(obs.watch[s])
    for a in word:
        s = obs.step(s, a)
        total += weight(obs.watch[s])
    return Fraction(total, len(word) + 1)


def run_cost(plant: Plant, obs: Observer, run, weight: Weight = size_weight) -> Fraction:
    """Average watch-set weight over the run's positions; silent steps count too."""
    s = obs.initial
    total = weight(obs.watch[s])
    for label, _ in run.steps:
        if label not in (EPS, FAULT, U):
            s = obs.step(s, label)
        total += weight(obs.watch[s])
    return Fraction(total, len(run) + 1)


def plus(plant: Plant) -> Plant:
    """ε-complete the plant and make its silent steps a visible tick ``U``."""
    plant = epsilon_complete(plant)
    trans = tuple((q, U if l in (EPS, FAULT) else l, d) for q, l, d in plant.transitions)
    return Plant(plant.states, plant.initial, plant.alphabet, trans, plant.name + "+")


def cost_automaton(plant: Plant, obs: Observer, weight: Weight = size_weight):
    """The weighted product of the ticked plant with the observer (ticks loop)."""
    check_same_alphabet(plant, obs)
    p = plus(plant)
    start = (p.initial, obs.initial)
    order, index, trans = [start], {start: 0}, []
    queue = deque([start])
    while queue:
        q, s = x = queue.popleft()
        for label, d in p.succ[q]:
            y = (d, s if label == U else obs.step(s, label))
            if y not in index:
                index[y] = len(order)
                order.append(y)
                queue.append(y)
            trans.append((index[x], label, index[y]))
    names = tuple(f"({p.states[q]},{obs.states[s]})" for q, s in order)
    prod = Plant(names, 0, p.alphabet, tuple(trans), f"{p.name}x{obs.name}+")
    return WeightedAutomaton(prod, tuple(weight(obs.watch[s]) for _, s in order)), order


def observer_cost(plant: Plant, obs: Observer, weight: Weight = size_weight) -> Fraction:
    wa, _ = cost_automaton(plant, obs, weight)
    return karp_max_mean(wa).value


@dataclass
class CostGame:
    game: WeightedGraphGame
    mpo: MostPermissiveObserver
    # choice vertex id -> (mpo node, {X: edge index})
    choice_edges: dict


def build_cost_game(plant: Plant, mpo: MostPermissiveObserver, weight: Weight = size_weight) -> CostGame:
    """Product of the ticked plant with the most permissive observer.

    Player 2 (minimizer) picks watch-sets, Player 1 (maximizer) moves the plant.
    Choice edges weigh ``weight(X)`` and plant edges 0.  A plant step the
    observer cannot follow leads to a fresh vertex whose only choice is the
    current ``X`` again.  A fresh Player 1 entry vertex serves as source.
    """
    if mpo is None:
        raise PreconditionError("no observer exists, so there is no cost game")
    check_same_alphabet(plant, mpo)
    p = plus(plant)
    entry = ("entry",)
    first = ("even", p.initial, mpo.initial)
    vertices, index, owner = [entry, first], {entry: 0, first: 1}, [1, 2]
    edges, choice_edges = [(0, 1, 0)], {}
    queue = deque([first])

    def vid(v):
        if v not in index:
            index[v] = len(vertices)
            vertices.append(v)
            owner.append(1 if v[0] == "odd" else 2)
            queue.append(v)
        return index[v]

    while queue:
        v = queue.popleft()
        u = index[v]
        if v[0] == "even":
            _, q, node = v
            out = {}
            choice_edges[u] = (node, out)
            for X in mpo.allowed[node]:
                out[X] = len(edges)
                edges.append((u, vid(("odd", q, node, X)), weight(X)))
        elif v[0] == "wait":
            _, q, node, X = v
            edges.append((u, vid(("odd", q, node, X)), weight(X)))
        else:
            _, q, node, X = v
            nxt = mpo.successors(node, X)
            for label, d in p.succ[q]:
                if label in nxt:
                    target = ("even", d, nxt[label])
                else:
                    target = ("wait", d, node, X)
                edges.append((u, vid(target), 0))
    names = tuple(_vertex_name(p, v) for v in vertices)
    game = WeightedGraphGame(names, tuple(owner), tuple(edges), 0, f"{plant.name}_k{mpo.k}_cost")
    return CostGame(game, mpo, choice_edges)


def _vertex_name(p, v):
    if v[0] == "entry":
        return "entry"
    if v[0] == "even":
        return f"({p.states[v[1]]},n{v[2]})"
    tag = "" if v[0] == "odd" else "w"
    watch = ",".join(sorted(v[3])) or "-"
    return f"({p.states[v[1]]},n{v[2]}{tag},{{{watch}}})"


@dataclass(frozen=True)
class OptimalObserver:
    cost: Fraction
    observer: Observer
    # cost when the observer may also see the plant state; a lower bound
    game_cost: Fraction
    # True when folding to one choice per knowledge node lost nothing
    certified: bool
    choices: dict


def _restricted_value(cg: CostGame, fixed: dict):
    keep = {v: out[fixed[node]] for v, (node, out) in cg.choice_edges.items() if node in fixed}
    return solve_game(cg.game.restrict(keep)).values[cg.game.source]


def optimal_cost_observer(plant: Plant, k: int, cap: int | None = None,
                          weight: Weight = size_weight) -> OptimalObserver | None:
    """Cheapest observer for ``k``-diagnosis, or ``None`` when none exists.

    The game lets the observer see the plant state, which an observer cannot.
    Its optimal strategy is therefore folded to one watch-set per knowledge
    node: nodes are fixed one at a time in breadth-first order, each to the
    first allowed watch-set that keeps the game value as low as possible.
    """
    mpo = most_permissive_observer(plant, k, cap)
    if mpo is None:
        return None
    cg = build_cost_game(plant, mpo, weight)
    free = solve_game(cg.game).values[cg.game.source]
    fixed = {}
    for node in range(len(mpo.allowed)):
        best = None
        for X in mpo.allowed[node]:
            trial = dict(fixed)
            trial[node] = X
            value = _restricted_value(cg, trial)
            if best is None or value < best[0]:
                best = (value, X)
        fixed[node] = best[1]
    value = _restricted_value(cg, fixed)
    obs = extract_observer(mpo, lambda node, xs: fixed[node], name=f"{plant.name}_k{k}_opt")
    return OptimalObserver(2 * value, obs, 2 * free, value == free, fixed)


def bounded_cost_observer(plant: Plant, k: int, budget, cap: int | None = None,
                          weight: Weight = size_weight) -> Observer | None:
    budget = Fraction(budget)
    if budget < 0:
        raise InputError("budget must be non-negative")
    best = optimal_cost_observer(plant, k, cap, weight)
    if best is None or best.cost > budget:
        return None
    return best.observer
