"""Dynamic observers: deterministic automata that choose what to watch."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .automata import EPS, FAULT, Alphabet, Plant, Run, project, trace_of_run
from .errors import InputError, PreconditionError


@dataclass(frozen=True)
class Observer:
    """Labeled automaton ``(S, s0, alphabet, step, watch)``.

    ``transitions`` lists only explicit moves.  A missing ``(s, a)`` pair with
    ``a`` unwatched in ``s`` is an implicit self-loop; a missing watched pair
    is a validation error.
    """

    states: tuple[str, ...]
    initial: int
    alphabet: Alphabet
    transitions: tuple[tuple[int, str, int], ...]
    watch: tuple[frozenset, ...]
    name: str = "Obs"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "watch", tuple(frozenset(w) for w in self.watch))
        n = len(self.states)
        if len(set(self.states)) != n:
            raise InputError("duplicate observer state")
        if not 0 <= self.initial < n:
            raise InputError("initial observer state is not declared")
        if len(self.watch) != n:
            raise InputError("every observer state needs a watch-set")
        for s, a, t in self.transitions:
            if not (0 <= s < n and 0 <= t < n):
                raise InputError(f"observer transition ({s}, {a}, {t}) uses an undeclared state")
            if a not in self.alphabet:
                raise InputError(f"observer transition label {a} is not in the alphabet")
        key = self.alphabet.label_key
        # unwatched self-loops are implicit; dropping them makes equality semantic
        explicit = {(s, a, t) for s, a, t in self.transitions if s != t or a in self.watch[s]}
        trans = tuple(sorted(explicit, key=lambda t: (t[0], key(t[1]), t[2])))
        object.__setattr__(self, "transitions", trans)

    @classmethod
    def build(cls, states, initial, alphabet, transitions, watch, name="Obs") -> "Observer":
        """Build from names; ``watch`` maps state name to an iterable of events."""
        states = tuple(states)
        idx = {s: i for i, s in enumerate(states)}
        if initial not in idx:
            raise InputError(f"initial state {initial} is not declared")
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        trans = []
        for s, a, t in transitions:
            if s not in idx or t not in idx:
                raise InputError(f"observer transition {s} {a} {t} uses an undeclared state")
            trans.append((idx[s], a, idx[t]))
        for s in watch:
            if s not in idx:
                raise InputError(f"watch-set given for undeclared state {s}")
        labels = tuple(frozenset(watch.get(s, ())) for s in states)
        return cls(states, idx[initial], alphabet, tuple(trans), labels, name)

    @cached_property
    def _table(self):
        table = {}
        for s, a, t in self.transitions:
            table.setdefault((s, a), []).append(t)
        return table

    def targets(self, s: int, a: str) -> list[int]:
        explicit = self._table.get((s, a))
        if explicit is not None:
            return explicit
        return [] if a in self.watch[s] else [s]

    def step(self, s: int, a: str) -> int:
        ts = self.targets(s, a)
        if len(ts) != 1:
            raise PreconditionError(f"observer has no unique move from {self.states[s]} on {a}")
        return ts[0]

    def run(self, w: Sequence[str], s: int | None = None) -> int:
        s = self.initial if s is None else s
        for a in w:
            s = self.step(s, a)
        return s

    def watch_after(self, w: Sequence[str]) -> frozenset:
        return self.watch[self.run(w)]


def validate_observer(obs: Observer) -> list[str]:
    """Every violation of totality, determinism and stutter closure; empty means valid."""
    report = []
    alpha = set(obs.alphabet.events)
    for s, name in enumerate(obs.states):
        extra = obs.watch[s] - alpha
        if extra:
            report.append(f"watch-set of {name} has events outside the alphabet: {sorted(extra)}")
        for a in obs.alphabet:
            ts = obs.targets(s, a)
            if len(ts) > 1:
                report.append(f"nondeterminism: {name} --{a}--> {sorted(obs.states[t] for t in ts)}")
            if a in obs.watch[s]:
                if not ts:
                    report.append(f"missing transition: {name} --{a}--> ?")
            elif any(t != s for t in ts):
                report.append(f"stutter violation: {a} is unwatched in {name} but moves the observer")
    return report


def static_observer(alphabet: Alphabet | Iterable[str], sub: Iterable[str] = None, name=None) -> Observer:
    """Single-state observer watching ``sub`` forever (all of the alphabet by default)."""
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(tuple(alphabet))
    sub = alphabet.subset(alphabet.events if sub is None else sub)
    trans = tuple((0, a, 0) for a in alphabet.ordered(sub))
    label = name or "static_" + ("_".join(alphabet.ordered(sub)) or "none")
    return Observer(("0",), 0, alphabet, trans, (sub,), label)


def observe_word(obs: Observer, w: Sequence[str]) -> tuple[str, ...]:
    """Transducer semantics: emit watched symbols, skip the rest."""
    out = []
    s = obs.initial
    for a in w:
        if a not in obs.alphabet:
            raise InputError(f"symbol {a} is not in the observer alphabet")
        if a in obs.watch[s]:
            out.append(a)
            s = obs.step(s, a)
    return tuple(out)


def observe_run(plant: Plant, obs: Observer, run: Run) -> tuple[str, ...]:
    return observe_word(obs, project(trace_of_run(run), plant.alphabet.events))


def annotated_history(obs: Observer, w: Sequence[str]) -> list:
    """Interleave watch-sets and observed events: ``[L(s0), a0, L(s1), a1, ...]``."""
    s = obs.initial
    out = [obs.watch[s]]
    for i, a in enumerate(w):
        if a not in obs.watch[s]:
            raise PreconditionError(
                f"{a} at position {i} is not watched in {obs.states[s]}; not an observation")
        s = obs.step(s, a)
        out += [a, obs.watch[s]]
    return out


def format_history(history) -> str:
    parts = []
    for i, x in enumerate(history):
        parts.append("{" + ",".join(sorted(x)) + "}" if i % 2 == 0 else x)
    return ".".join(parts)


__all__ = [
    "Observer", "validate_observer", "static_observer", "observe_word", "observe_run",
    "annotated_history", "format_history", "EPS", "FAULT",
]
