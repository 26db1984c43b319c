"""Line-oriented model files, canonical serialization and DOT export.

A file starts with ``format 1`` followed by one section header naming the
kind: ``plant``, ``observer``, ``mpo`` or ``game``.  Blank lines and ``#``
comments are ignored.  Within a section, directives may come in any order;
serialization always writes them in one canonical order, so that
``serialize(parse(text)) == text`` for canonical text.
"""
from __future__ import annotations

from .automata import EPS, FAULT, U, Alphabet, Plant
from .errors import InputError
from .meanpayoff import WeightedGraphGame
from .observer import Observer
from .synthesis import MostPermissiveObserver

FORMAT = "1"
KINDS = ("plant", "observer", "mpo", "game")
DIRECTIVES = {
    "plant": {"alphabet", "states", "initial", "trans"},
    "observer": {"alphabet", "states", "initial", "trans", "watch"},
    "mpo": {"alphabet", "k", "nodes", "initial", "know", "allow", "next"},
    "game": {"vertex", "edge", "source"},
}
SINGLE = {"alphabet", "states", "initial", "k", "nodes", "source"}


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _set_token(tok, alphabet, no):
    if tok == "-":
        return frozenset()
    events = tok.split(",")
    for e in events:
        if e not in alphabet:
            raise InputError(f"event {e} is not in the alphabet", no)
    return frozenset(events)


def _fmt_set(alphabet, X):
    return ",".join(alphabet.ordered(X)) or "-"


def parse_model(text: str):
    """Parse a model file into a ``Plant``, ``Observer``, mpo or game."""
    kind, name, header_line = None, None, None
    seen_format = False
    body = {}
    for no, toks in _lines(text):
        head = toks[0]
        if head == "format":
            if seen_format:
                raise InputError("duplicate format line", no)
            if len(toks) != 2 or toks[1] != FORMAT:
                raise InputError(f"unsupported format {' '.join(toks[1:])}", no)
            seen_format = True
            continue
        if head in KINDS:
            if kind is not None:
                raise InputError("only one model per file", no)
            if len(toks) != 2:
                raise InputError(f"expected '{head} NAME'", no)
            kind, name, header_line = head, toks[1], no
            continue
        if kind is None:
            raise InputError(f"directive {head} before the section header", no)
        if head not in DIRECTIVES[kind]:
            raise InputError(f"unknown directive {head} in a {kind} section", no)
        if head in SINGLE and head in body:
            raise InputError(f"duplicate {head}", no)
        body.setdefault(head, []).append((no, toks[1:]))
    if not seen_format:
        raise InputError("missing 'format 1' line", 1)
    if kind is None:
        raise InputError("no section header", 1)
    return {"plant": _plant, "observer": _observer, "mpo": _mpo, "game": _game}[kind](
        name, body, header_line)


def _one(body, key, header_line):
    if key not in body:
        raise InputError(f"missing {key}", header_line)
    return body[key][0]


def _alphabet(body, header_line):
    no, toks = _one(body, "alphabet", header_line)
    for e in toks:
        if e.startswith("_"):
            raise InputError(f"reserved token {e} cannot be an observable event", no)
    try:
        return Alphabet(tuple(toks))
    except InputError as exc:
        raise InputError(str(exc), no) from None


def _states(body, header_line):
    no, toks = _one(body, "states", header_line)
    if len(set(toks)) != len(toks):
        raise InputError("duplicate state", no)
    return tuple(toks)


def _initial(body, index, header_line):
    no, toks = _one(body, "initial", header_line)
    if len(toks) != 1 or toks[0] not in index:
        raise InputError(f"initial state {' '.join(toks)} is not declared", no)
    return index[toks[0]]


def _transitions(body, index, alphabet, allow_silent):
    trans = []
    for no, toks in body.get("trans", ()):
        if len(toks) != 3:
            raise InputError("expected 'trans SRC LABEL DST'", no)
        src, label, dst = toks
        for s in (src, dst):
            if s not in index:
                raise InputError(f"state {s} is not declared", no)
        if label in (EPS, FAULT):
            if not allow_silent:
                raise InputError(f"reserved token {label} is not allowed in an observer", no)
        elif label.startswith("_"):
            raise InputError(f"unknown reserved token {label}", no)
        elif label not in alphabet:
            raise InputError(f"event {label} is not in the alphabet", no)
        trans.append((index[src], label, index[dst]))
    return tuple(trans)


def _plant(name, body, header_line):
    alphabet = _alphabet(body, header_line)
    states = _states(body, header_line)
    index = {s: i for i, s in enumerate(states)}
    initial = _initial(body, index, header_line)
    return Plant(states, initial, alphabet, _transitions(body, index, alphabet, True), name)


def _observer(name, body, header_line):
    alphabet = _alphabet(body, header_line)
    states = _states(body, header_line)
    index = {s: i for i, s in enumerate(states)}
    initial = _initial(body, index, header_line)
    trans = _transitions(body, index, alphabet, False)
    watch = [None] * len(states)
    for no, toks in body.get("watch", ()):
        if not toks or toks[0] not in index:
            raise InputError("watch needs a declared state", no)
        s = index[toks[0]]
        if watch[s] is not None:
            raise InputError(f"duplicate watch for {toks[0]}", no)
        for e in toks[1:]:
            if e not in alphabet:
                raise InputError(f"event {e} is not in the alphabet", no)
        watch[s] = frozenset(toks[1:])
    watch = tuple(w or frozenset() for w in watch)
    return Observer(states, initial, alphabet, trans, watch, name)


def _int(tok, no, what):
    try:
        return int(tok)
    except ValueError:
        raise InputError(f"{what} must be an integer, got {tok}", no) from None


def _mpo(name, body, header_line):
    alphabet = _alphabet(body, header_line)
    no, toks = _one(body, "k", header_line)
    k = _int(toks[0], no, "k")
    no, toks = _one(body, "nodes", header_line)
    n = _int(toks[0], no, "nodes")

    def node(tok, no):
        i = _int(tok, no, "node")
        if not 0 <= i < n:
            raise InputError(f"node {i} is out of range", no)
        return i

    no, toks = _one(body, "initial", header_line)
    initial = node(toks[0], no)
    knowledge = [frozenset()] * n
    for no, toks in body.get("know", ()):
        triples = []
        for t in toks[1:]:
            parts = t.split(":")
            if len(parts) != 3:
                raise InputError(f"expected Q1:J:Q2, got {t}", no)
            triples.append(tuple(_int(p, no, "knowledge entry") for p in parts))
        knowledge[node(toks[0], no)] = frozenset(triples)
    allowed = [[] for _ in range(n)]
    for no, toks in body.get("allow", ()):
        if len(toks) != 2:
            raise InputError("expected 'allow NODE SET'", no)
        allowed[node(toks[0], no)].append(_set_token(toks[1], alphabet, no))
    succ = {}
    for no, toks in body.get("next", ()):
        if len(toks) != 4:
            raise InputError("expected 'next NODE SET EVENT NODE'", no)
        i, X = node(toks[0], no), _set_token(toks[1], alphabet, no)
        if X not in allowed[i]:
            raise InputError(f"watch-set {toks[1]} is not allowed at node {i}", no)
        if toks[2] not in X:
            raise InputError(f"event {toks[2]} is not in the watch-set", no)
        succ[(i, X, toks[2])] = node(toks[3], no)
    allowed = tuple(tuple(sorted(xs, key=alphabet.set_key)) for xs in allowed)
    return MostPermissiveObserver(alphabet, k, tuple(knowledge), allowed, succ, name, initial)


def _game(name, body, header_line):
    names, owner, index = [], [], {}
    for no, toks in body.get("vertex", ()):
        if len(toks) != 2 or toks[1] not in ("1", "2"):
            raise InputError("expected 'vertex NAME 1|2'", no)
        if toks[0] in index:
            raise InputError(f"duplicate vertex {toks[0]}", no)
        index[toks[0]] = len(names)
        names.append(toks[0])
        owner.append(int(toks[1]))
    edges = []
    for no, toks in body.get("edge", ()):
        if len(toks) != 3:
            raise InputError("expected 'edge SRC DST WEIGHT'", no)
        for v in toks[:2]:
            if v not in index:
                raise InputError(f"vertex {v} is not declared", no)
        edges.append((index[toks[0]], index[toks[1]], _int(toks[2], no, "weight")))
    no, toks = _one(body, "source", header_line)
    if len(toks) != 1 or toks[0] not in index:
        raise InputError("source must be a declared vertex", no)
    game = WeightedGraphGame(tuple(names), tuple(owner), tuple(sorted(set(edges))),
                             index[toks[0]], name)
    problems = game.validate()
    if problems:
        raise InputError(problems[0], header_line)
    return game


def serialize(model) -> str:
    if isinstance(model, Plant):
        return _ser_plant(model)
    if isinstance(model, Observer):
        return _ser_observer(model)
    if isinstance(model, MostPermissiveObserver):
        return _ser_mpo(model)
    if isinstance(model, WeightedGraphGame):
        return _ser_game(model)
    raise TypeError(f"cannot serialize {type(model).__name__}")


def _header(kind, name, alphabet=None):
    out = [f"format {FORMAT}", f"{kind} {name}"]
    if alphabet is not None:
        out.append(" ".join(["alphabet", *alphabet.events]).rstrip())
    return out


def _ser_plant(p: Plant):
    if U in p.labels_used():
        raise InputError("ticked plants are internal and cannot be serialized")
    out = _header("plant", p.name, p.alphabet)
    out.append(" ".join(["states", *p.states]))
    out.append(f"initial {p.states[p.initial]}")
    out += [f"trans {p.states[s]} {l} {p.states[d]}" for s, l, d in p.transitions]
    return "\n".join(out) + "\n"


def _ser_observer(o: Observer):
    out = _header("observer", o.name, o.alphabet)
    out.append(" ".join(["states", *o.states]))
    out.append(f"initial {o.states[o.initial]}")
    for s, a, t in o.transitions:
        # unwatched self-loops are implicit
        if s == t and a not in o.watch[s]:
            continue
        out.append(f"trans {o.states[s]} {a} {o.states[t]}")
    for s, name in enumerate(o.states):
        out.append(" ".join(["watch", name, *o.alphabet.ordered(o.watch[s])]))
    return "\n".join(out) + "\n"


def _ser_mpo(m: MostPermissiveObserver):
    out = _header("mpo", m.plant_name, m.alphabet)
    out += [f"k {m.k}", f"nodes {len(m.allowed)}", f"initial {m.initial}"]
    for i, K in enumerate(m.knowledge):
        out.append(" ".join(["know", str(i), *(f"{a}:{j}:{b}" for a, j, b in sorted(K))]))
    for i, xs in enumerate(m.allowed):
        out += [f"allow {i} {_fmt_set(m.alphabet, X)}" for X in xs]
    for i, xs in enumerate(m.allowed):
        for X in xs:
            for a, j in m.successors(i, X).items():
                out.append(f"next {i} {_fmt_set(m.alphabet, X)} {a} {j}")
    return "\n".join(out) + "\n"


def _ser_game(g: WeightedGraphGame):
    out = _header("game", g.name)
    out += [f"vertex {v} {o}" for v, o in zip(g.vertices, g.owner)]
    out += [f"edge {g.vertices[u]} {g.vertices[v]} {w}" for u, v, w in sorted(g.edges)]
    out.append(f"source {g.vertices[g.source]}")
    return "\n".join(out) + "\n"


def _dot_label(label):
    return {EPS: "ε", FAULT: "f", U: "u"}.get(label, label)


def _dot_set(alphabet, X):
    return "{" + ",".join(alphabet.ordered(X)) + "}"


def _q(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(model) -> str:
    """Deterministic Graphviz text for any model kind."""
    out = [f"digraph {_q(getattr(model, 'name', getattr(model, 'plant_name', 'M')))} {{",
           "  rankdir=LR;"]
    if isinstance(model, (Plant, Observer)):
        out.append(f"  __init [shape=point]; __init -> {_q(model.states[model.initial])};")
        for i, s in enumerate(model.states):
            if isinstance(model, Observer):
                X = _dot_set(model.alphabet, model.watch[i])
                out.append(f"  {_q(s)} [shape=circle, xlabel={_q(X)}];")
            else:
                out.append(f"  {_q(s)} [shape=circle];")
        for s, l, d in model.transitions:
            if isinstance(model, Observer) and s == d and l not in model.watch[s]:
                continue
            out.append(f"  {_q(model.states[s])} -> {_q(model.states[d])} [label={_q(_dot_label(l))}];")
    elif isinstance(model, MostPermissiveObserver):
        out.append(f"  __init [shape=point]; __init -> {_q(f'n{model.initial}')};")
        for i, xs in enumerate(model.allowed):
            out.append(f"  {_q(f'n{i}')} [shape=box];")
            for X in xs:
                odd = f"n{i}/{_fmt_set(model.alphabet, X)}"
                out.append(f"  {_q(odd)} [shape=ellipse];")
                out.append(f"  {_q(f'n{i}')} -> {_q(odd)} [label={_q(_dot_set(model.alphabet, X))}];")
                for a, j in model.successors(i, X).items():
                    out.append(f"  {_q(odd)} -> {_q(f'n{j}')} [label={_q(a)}];")
    elif isinstance(model, WeightedGraphGame):
        out.append(f"  __init [shape=point]; __init -> {_q(model.vertices[model.source])};")
        for v, o in zip(model.vertices, model.owner):
            out.append(f"  {_q(v)} [shape={'box' if o == 1 else 'ellipse'}];")
        for u, v, w in sorted(model.edges):
            out.append(f"  {_q(model.vertices[u])} -> {_q(model.vertices[v])} [label={_q(w)}];")
    else:
        raise TypeError(f"cannot export {type(model).__name__}")
    out.append("}")
    return "\n".join(out) + "\n"
