"""Finite automata with unobservable and fault events.

States and events are named by strings at the API boundary and stored as
dense integer indices internally.  Transition labels are observable event
names or one of the reserved markers ``EPS``, ``FAULT`` and ``U``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InputError, PreconditionError

EPS = "_eps"
FAULT = "_fault"
# unobservable steps relabeled as a visible tick when computing costs
U = "_u"
RESERVED = (EPS, FAULT, U)

DEFAULT_RUN_CAP = 12


@dataclass(frozen=True)
class Alphabet:
    events: tuple[str, ...]

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        if len(set(events)) != len(events):
            raise InputError(f"duplicate event in alphabet {events}")
        for e in events:
            if e in RESERVED:
                raise InputError(f"reserved token {e} cannot be an observable event")
            if not e or any(c.isspace() for c in e):
                raise InputError(f"bad event name {e!r}")

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)

    def __contains__(self, e):
        return e in self._index

    @cached_property
    def _index(self):
        return {e: i for i, e in enumerate(self.events)}

    def index(self, e):
        return self._index[e]

    def subset(self, events: Iterable[str]) -> frozenset:
        sub = frozenset(events)
        bad = sorted(sub - set(self.events))
        if bad:
            raise InputError(f"events {bad} are not in the alphabet {list(self.events)}")
        return sub

    def ordered(self, events: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(events, key=self._index.__getitem__))

    def set_key(self, events: Iterable[str]):
        """Sort key for watch-sets: by size, then lexicographically by event index."""
        idx = sorted(self._index[e] for e in events)
        return (len(idx), idx)

    def powerset(self) -> list[frozenset]:
        n = len(self.events)
        out = [frozenset(self.events[i] for i in range(n) if m >> i & 1) for m in range(1 << n)]
        out.sort(key=self.set_key)
        return out

    def label_key(self, label):
        if label in self._index:
            return (0, self._index[label])
        return (1, RESERVED.index(label))


@dataclass(frozen=True)
class Plant:
    """Relational automaton over observable events plus ``EPS``/``FAULT``/``U``."""

    states: tuple[str, ...]
    initial: int
    alphabet: Alphabet
    transitions: tuple[tuple[int, str, int], ...]
    name: str = "A"

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        if len(set(states)) != len(states):
            raise InputError("duplicate state name")
        if not 0 <= self.initial < len(states):
            raise InputError("initial state is not declared")
        alpha = self.alphabet
        norm = set()
        for src, label, dst in self.transitions:
            if not (0 <= src < len(states) and 0 <= dst < len(states)):
                raise InputError(f"transition ({src}, {label}, {dst}) uses an undeclared state")
            if label not in alpha and label not in RESERVED:
                raise InputError(f"transition label {label} is not in the alphabet")
            norm.add((src, label, dst))
        ordered = tuple(sorted(norm, key=lambda t: (t[0], alpha.label_key(t[1]), t[2])))
        object.__setattr__(self, "transitions", ordered)

    @classmethod
    def build(cls, states, initial, alphabet, transitions, name="A") -> "Plant":
        """Build from names: ``transitions`` is an iterable of ``(src, label, dst)`` names."""
        states = tuple(states)
        idx = {s: i for i, s in enumerate(states)}
        if initial not in idx:
            raise InputError(f"initial state {initial} is not declared")
        trans = []
        for src, label, dst in transitions:
            if src not in idx or dst not in idx:
                raise InputError(f"transition {src} {label} {dst} uses an undeclared state")
            trans.append((idx[src], label, idx[dst]))
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        return cls(states, idx[initial], alphabet, tuple(trans), name)

    @cached_property
    def succ(self) -> tuple[tuple[tuple[str, int], ...], ...]:
        out = [[] for _ in self.states]
        for src, label, dst in self.transitions:
            out[src].append((label, dst))
        return tuple(tuple(x) for x in out)

    @cached_property
    def index(self):
        return {s: i for i, s in enumerate(self.states)}

    def step(self, q: int, label: str) -> tuple[int, ...]:
        return tuple(d for l, d in self.succ[q] if l == label)

    def has_fault(self) -> bool:
        return any(l == FAULT for _, l, _ in self.transitions)

    def deadlocks(self) -> list[int]:
        return [q for q in range(len(self.states)) if not self.succ[q]]

    def reachable(self) -> list[int]:
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            q = queue.popleft()
            for _, d in self.succ[q]:
                if d not in seen:
                    seen.add(d)
                    queue.append(d)
        return sorted(seen)

    def labels_used(self) -> set[str]:
        return {l for _, l, _ in self.transitions}


@dataclass(frozen=True)
class Run:
    """A finite run: a start state and a sequence of ``(label, target)`` steps."""

    start: int
    steps: tuple[tuple[str, int], ...] = ()

    def __len__(self):
        return len(self.steps)

    @property
    def end(self) -> int:
        return self.steps[-1][1] if self.steps else self.start

    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.steps)

    def states(self) -> tuple[int, ...]:
        return (self.start,) + tuple(d for _, d in self.steps)

    def prefix(self, i: int) -> "Run":
        return Run(self.start, self.steps[:i])

    def extend(self, steps) -> "Run":
        return Run(self.start, self.steps + tuple(steps))

    def is_run_of(self, plant: Plant) -> bool:
        q = self.start
        for label, d in self.steps:
            if d not in plant.step(q, label):
                return False
            q = d
        return True


@dataclass(frozen=True)
class Lasso:
    """Finite certificate of an infinite run: ``stem`` then ``cycle`` repeated.

    The cycle starts and ends at ``stem.end``; an empty cycle denotes the
    finite run ``stem`` itself.
    """

    stem: Run
    cycle: tuple[tuple[str, int], ...] = field(default=())

    def unroll(self, times: int) -> Run:
        return self.stem.extend(self.cycle * times)

    def is_lasso_of(self, plant: Plant) -> bool:
        if not self.stem.is_run_of(plant):
            return False
        if not self.cycle:
            return True
        if self.cycle[-1][1] != self.stem.end:
            return False
        return Run(self.stem.end, self.cycle).is_run_of(plant)


def project(word: Sequence[str], sub: Iterable[str], alphabet: Alphabet | None = None) -> tuple[str, ...]:
    """Erase every symbol of ``word`` outside ``sub``; ``EPS``/``FAULT`` always go."""
    sub = frozenset(sub)
    if alphabet is not None:
        alphabet.subset(sub)
        for a in word:
            if a not in alphabet and a not in (EPS, FAULT):
                raise InputError(f"symbol {a} is not in the alphabet")
    return tuple(a for a in word if a in sub and a not in (EPS, FAULT))


def trace_of_run(run: Run) -> tuple[str, ...]:
    return tuple(l for l, _ in run.steps if l != EPS)


def epsilon_complete(plant: Plant) -> Plant:
    """Add an ``EPS`` self-loop on every deadlock state."""
    dead = plant.deadlocks()
    if not dead:
        return plant
    extra = tuple((q, EPS, q) for q in dead)
    return Plant(plant.states, plant.initial, plant.alphabet, plant.transitions + extra, plant.name)


def classify_k_faulty(run: Run, k: int) -> bool:
    n = len(run)
    for i, (label, _) in enumerate(run.steps, start=1):
        if label == FAULT:
            return n - i >= k
    return False


def _product_alphabet(a1: Alphabet, a2: Alphabet) -> Alphabet:
    return Alphabet(a1.events + tuple(e for e in a2.events if e not in a1))


def _explore(initial, expand, cap=None):
    """Canonical BFS; ``expand(state)`` yields ``(label, successor)`` pairs."""
    order = [initial]
    index = {initial: 0}
    edges = []
    queue = deque([initial])
    while queue:
        x = queue.popleft()
        for label, y in expand(x):
            if y not in index:
                index[y] = len(order)
                order.append(y)
                queue.append(y)
                if cap is not None and len(order) > cap:
                    return None
            edges.append((index[x], label, index[y]))
    return order, edges


def sync_product(a1: Plant, a2: Plant) -> Plant:
    """Synchronous product: shared labels move jointly, the rest interleave.

    ``EPS`` and ``FAULT`` never synchronize.  ``U`` synchronizes when both
    operands use it.  Only the part reachable from the joint initial state is
    built.
    """
    def sync_labels(p):
        return set(p.alphabet.events) | ({U} & p.labels_used())

    l1, l2 = sync_labels(a1), sync_labels(a2)
    shared = l1 & l2

    def expand(x):
        q1, q2 = x
        for label, d1 in a1.succ[q1]:
            if label in shared:
                for d2 in a2.step(q2, label):
                    yield label, (d1, d2)
            else:
                yield label, (d1, q2)
        for label, d2 in a2.succ[q2]:
            if label not in shared:
                yield label, (q1, d2)

    order, edges = _explore((a1.initial, a2.initial), expand)
    names = tuple(f"({a1.states[p]},{a2.states[q]})" for p, q in order)
    return Plant(names, 0, _product_alphabet(a1.alphabet, a2.alphabet), tuple(edges),
                 f"{a1.name}x{a2.name}")


def masked_product(plant: Plant, obs, with_pairs: bool = False):
    """Product of a plant with an observer, hiding steps the observer does not watch.

    An observable step ``a`` from ``(q, s)`` moves the observer to
    ``obs.step(s, a)`` and keeps label ``a`` when ``a`` is watched in ``s``;
    otherwise it becomes ``EPS``.  ``EPS``/``FAULT`` steps leave the observer
    where it is.  With ``with_pairs`` the list of ``(q, s)`` index pairs, one
    per product state, is returned alongside.
    """
    check_same_alphabet(plant, obs)

    def expand(x):
        q, s = x
        watched = obs.watch[s]
        for label, d in plant.succ[q]:
            if label in (EPS, FAULT, U):
                yield label, (d, s)
            else:
                yield (label if label in watched else EPS), (d, obs.step(s, label))

    order, edges = _explore((plant.initial, obs.initial), expand)
    names = tuple(f"({plant.states[q]},{obs.states[s]})" for q, s in order)
    product = Plant(names, 0, plant.alphabet, tuple(edges), f"{plant.name}*{obs.name}")
    return (product, order) if with_pairs else product


def check_same_alphabet(plant: Plant, obs) -> None:
    if set(plant.alphabet.events) != set(obs.alphabet.events):
        raise InputError(
            f"observer alphabet {list(obs.alphabet.events)} differs from plant alphabet "
            f"{list(plant.alphabet.events)}")


def enumerate_runs(plant: Plant, max_len: int, cap: int = DEFAULT_RUN_CAP) -> list[Run]:
    """All runs of length at most ``max_len`` from the initial state (oracle use only)."""
    if max_len > cap:
        raise PreconditionError(f"max_len {max_len} exceeds the enumeration cap {cap}")
    out = []

    def walk(q, steps):
        out.append(Run(plant.initial, steps))
        if len(steps) == max_len:
            return
        for label, d in plant.succ[q]:
            walk(d, steps + ((label, d),))

    walk(plant.initial, ())
    return out
