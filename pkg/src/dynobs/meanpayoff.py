"""Maximum mean-weight cycles and mean-payoff graph games, in exact arithmetic."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import strongly_connected_components


def _karp(vertices, edges, source):
    """Karp's algorithm on the subgraph ``vertices`` from ``source``.

    ``edges`` are ``(u, v, w, tag)`` with both endpoints in ``vertices``.
    Returns ``(value, cycle_tags)`` for the maximum mean cycle reachable from
    ``source``, or ``None`` when no cycle is reachable.
    """
    local = {v: i for i, v in enumerate(vertices)}
    m = len(vertices)
    dist = [[None] * m for _ in range(m + 1)]
    parent = [[None] * m for _ in range(m + 1)]
    dist[0][local[source]] = 0
    es = [(local[u], local[v], w, tag) for u, v, w, tag in edges]
    for step in range(1, m + 1):
        prev, cur, par = dist[step - 1], dist[step], parent[step]
        for u, v, w, tag in es:
            if prev[u] is None:
                continue
            cand = prev[u] + w
            if cur[v] is None or cand > cur[v]:
                cur[v] = cand
                par[v] = (u, tag)
    best, best_v = None, None
    for v in range(m):
        if dist[m][v] is None:
            continue
        worst = min(Fraction(dist[m][v] - dist[step][v], m - step)
                    for step in range(m) if dist[step][v] is not None)
        if best is None or worst > best:
            best, best_v = worst, v
    if best is None:
        return None
    # the m-edge walk to best_v contains only maximum mean cycles
    walk = [best_v]
    tags = []
    v = best_v
    for step in range(m, 0, -1):
        u, tag = parent[step][v]
        walk.append(u)
        tags.append(tag)
        v = u
    walk.reverse()
    tags.reverse()
    seen = {}
    for pos, v in enumerate(walk):
        if v in seen:
            cycle = tags[seen[v]:pos]
            break
        seen[v] = pos
    return best, cycle


def max_mean_cycle(n, edges, source=None):
    """Best cycle mean over cycles reachable from ``source`` (all cycles if ``None``).

    ``edges`` are ``(u, v, w)`` triples.  Returns ``(value, cycle)`` with
    ``cycle`` a list of edge indices, or ``None`` if there is no cycle.
    """
    succ = [[] for _ in range(n)]
    for i, (u, v, w) in enumerate(edges):
        succ[u].append(v)
    if source is not None:
        seen, stack = {source}, [source]
        while stack:
            u = stack.pop()
            for v in succ[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        keep = seen
    else:
        keep = set(range(n))
    values = _per_component(n, edges, keep, maximize=True)
    best = None
    for value, cycle in values.values():
        if best is None or value > best[0]:
            best = (value, cycle)
    return best


def _per_component(n, edges, keep, maximize):
    succ = [[] for _ in range(n)]
    for u, v, w in edges:
        if u in keep and v in keep:
            succ[u].append(v)
    comp = strongly_connected_components(n, succ)
    inner = {}
    for i, (u, v, w) in enumerate(edges):
        if u in keep and v in keep and comp[u] == comp[v]:
            inner.setdefault(comp[u], []).append((u, v, w if maximize else -w, i))
    out = {}
    for c, es in inner.items():
        vertices = sorted({u for u, _, _, _ in es} | {v for _, v, _, _ in es})
        value, cycle = _karp(vertices, es, es[0][0])
        out[c] = (value if maximize else -value, cycle)
    return out


def reachable_cycle_values(n, edges, maximize=True):
    """For every vertex, the best cycle mean among cycles reachable from it.

    This is the value of a one-player mean-payoff game on the graph.  Entries
    are ``None`` for vertices that reach no cycle.
    """
    succ = [[] for _ in range(n)]
    for u, v, w in edges:
        succ[u].append(v)
    comp = strongly_connected_components(n, succ)
    per = _per_component(n, edges, set(range(n)), maximize)
    ncomp = max(comp) + 1 if n else 0
    csucc = [set() for _ in range(ncomp)]
    for u, v, w in edges:
        if comp[u] != comp[v]:
            csucc[comp[u]].add(comp[v])
    better = max if maximize else min
    cval = [None] * ncomp
    # Tarjan numbers sinks first, so successors are already final
    for c in range(ncomp):
        cands = [cval[d] for d in csucc[c] if cval[d] is not None]
        if c in per:
            cands.append(per[c][0])
        cval[c] = better(cands) if cands else None
    return [cval[comp[v]] for v in range(n)]


@dataclass(frozen=True)
class WeightedGraphGame:
    """Bipartite game: ``owner[v]`` is 1 (maximizer) or 2 (minimizer)."""

    vertices: tuple
    owner: tuple
    edges: tuple  # (u, v, weight)
    source: int = 0
    name: str = "G"

    @property
    def max_weight(self) -> int:
        return max((abs(w) for _, _, w in self.edges), default=0)

    def out_edges(self):
        out = [[] for _ in self.vertices]
        for i, (u, v, w) in enumerate(self.edges):
            out[u].append(i)
        return out

    def validate(self) -> list[str]:
        problems = []
        n = len(self.vertices)
        if not 0 <= self.source < n or self.owner[self.source] != 1:
            problems.append("source must be a Player-1 vertex")
        for u, v, w in self.edges:
            if self.owner[u] == self.owner[v]:
                problems.append(f"edge {self.vertices[u]}->{self.vertices[v]} does not alternate")
            if not isinstance(w, int):
                problems.append(f"edge {self.vertices[u]}->{self.vertices[v]} has non-integer weight")
        out = self.out_edges()
        for v in range(n):
            if not out[v]:
                problems.append(f"vertex {self.vertices[v]} has no outgoing edge")
        seen, stack = {self.source}, [self.source]
        while stack:
            u = stack.pop()
            for i in out[u]:
                v = self.edges[i][1]
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != n:
            problems.append(f"{n - len(seen)} vertices are unreachable from the source")
        return problems

    def restrict(self, choice: dict) -> "WeightedGraphGame":
        """Keep only edge ``choice[v]`` (an edge index) at each vertex in ``choice``."""
        keep = [i for i, (u, v, w) in enumerate(self.edges) if u not in choice or choice[u] == i]
        return WeightedGraphGame(self.vertices, self.owner, tuple(self.edges[i] for i in keep),
                                 self.source, self.name)


@dataclass
class GameSolution:
    values: list
    # vertex -> chosen edge index, for the owner of each vertex
    strategy: dict
    iterations: int
    certified: bool
    stats: dict = field(default_factory=dict)


def _lower(game, strategy):
    """Per vertex, what Player 1 secures by playing ``strategy`` against anything."""
    edges = [e for i, e in enumerate(game.edges) if game.owner[e[0]] == 2 or strategy[e[0]] == i]
    return reachable_cycle_values(len(game.vertices), edges, maximize=False)


def _upper(game, strategy):
    edges = [e for i, e in enumerate(game.edges) if game.owner[e[0]] == 1 or strategy[e[0]] == i]
    return reachable_cycle_values(len(game.vertices), edges, maximize=True)


def _round(total, t, n):
    """The unique rational with denominator at most ``n`` within 1/(2n(n-1)) of total/t."""
    x = Fraction(total, t)
    cand = x.limit_denominator(n)
    radius = Fraction(1, 2 * n * (n - 1)) if n > 1 else Fraction(1, 2)
    return cand if abs(cand - x) < radius else None


def _iterate(game: WeightedGraphGame, certify=True):
    """Integer value iteration with early exit once greedy strategies certify.

    After ``t`` steps each vertex's greedy edge choices form positional
    strategies.  Player 1's strategy secures at least the minimum reachable
    cycle mean of the graph it induces and Player 2's at most the maximum;
    both are exact.  Greedy choices can cycle with a short period, so a
    window of consecutive steps is examined at every checkpoint.  If the
    bounds never meet, iteration stops at ``4 n^3 W`` steps and ``ν_t/t`` is
    rounded.  Returns ``(values, strategy or None, steps)``.
    """
    n = len(game.vertices)
    out = game.out_edges()
    edges = game.edges
    p1 = [v for v in range(n) if game.owner[v] == 1]
    p2 = [v for v in range(n) if game.owner[v] == 2]
    bound = 4 * n ** 3 * max(game.max_weight, 1)
    window = max(n, 8)
    lowers, uppers = {}, {}
    val = [0] * n
    t = 0
    checkpoint = 2 * n
    while True:
        new = [0] * n
        strategy = {}
        for v in range(n):
            best, arg = None, None
            maxi = game.owner[v] == 1
            for i in out[v]:
                _, u, w = edges[i]
                c = w + val[u]
                if best is None or (c > best if maxi else c < best):
                    best, arg = c, i
            new[v] = best
            strategy[v] = arg
        val = new
        t += 1
        if t >= bound:
            return [_round(x, t, n) for x in val], None, t
        if not certify or t < checkpoint:
            continue
        s1 = tuple(strategy[v] for v in p1)
        s2 = tuple(strategy[v] for v in p2)
        if s1 not in lowers:
            lowers[s1] = tuple(_lower(game, strategy))
        if s2 not in uppers:
            uppers[s2] = tuple(_upper(game, strategy))
        if len(lowers) + len(uppers) == 2 or t == checkpoint + window - 1:
            # greedy choices can be suboptimal forever; derive strategies from a guess
            guess = [Fraction(x, t).limit_denominator(n) for x in val]
            for player, cache, evaluate in ((1, lowers, _lower), (2, uppers, _upper)):
                chosen = dict(strategy)
                chosen.update(_energy_strategy(game, guess, player))
                key = tuple(chosen[v] for v in (p1 if player == 1 else p2))
                if key not in cache:
                    cache[key] = tuple(evaluate(game, chosen))
        for a, lo in lowers.items():
            for b, up in uppers.items():
                if lo == up:
                    chosen = dict(zip(p1, a))
                    chosen.update(zip(p2, b))
                    return list(lo), chosen, t
        if t >= checkpoint + window:
            checkpoint *= 2
            lowers, uppers = {}, {}


def _energy_strategy(game, values, player):
    """Positional strategy for ``player`` that holds each vertex to ``values``.

    Inside each class of equal value ``p/q`` the player must keep the running
    sum of ``q*w - p`` (negated for Player 2) bounded below.  That is an
    energy game, solved by lifting minimal credits to a fixpoint.  The
    opponent leaving the class counts as a win.  When ``values`` is wrong the
    result is merely some strategy; callers evaluate it exactly.
    """
    n = len(game.vertices)
    out = game.out_edges()
    sign = 1 if player == 1 else -1

    def gain(i):
        u, _, w = game.edges[i]
        c = values[u]
        return sign * (c.denominator * w - c.numerator)

    allowed = []
    for v in range(n):
        same = [i for i in out[v] if values[game.edges[i][1]] == values[v]]
        allowed.append(same if game.owner[v] == player else out[v])
    top = n * max((abs(gain(i)) for i in range(len(game.edges))), default=0) + 1
    credit = [0] * n
    preds = [[] for _ in range(n)]
    for i, (u, v, _) in enumerate(game.edges):
        preds[v].append(u)

    def need(v):
        costs = []
        for i in allowed[v]:
            u = game.edges[i][1]
            if values[u] != values[v]:
                costs.append(0)
            elif credit[u] is None:
                costs.append(None)
            else:
                c = max(0, credit[u] - gain(i))
                costs.append(None if c > top else c)
        if not costs:
            return None
        if game.owner[v] == player:
            finite = [c for c in costs if c is not None]
            return min(finite) if finite else None
        return None if None in costs else max(costs)

    queue = deque(range(n))
    queued = [True] * n
    while queue:
        v = queue.popleft()
        queued[v] = False
        if credit[v] is None:
            continue
        c = need(v)
        if c != credit[v] and (c is None or c > credit[v]):
            credit[v] = c
            for u in preds[v]:
                if not queued[u]:
                    queued[u] = True
                    queue.append(u)
    choice = {}
    for v in range(n):
        if game.owner[v] != player:
            continue
        best = None
        for i in allowed[v] or out[v]:
            u = game.edges[i][1]
            if values[u] != values[v]:
                c = 0
            elif credit[u] is None:
                c = top + 1
            else:
                c = max(0, credit[u] - gain(i))
            if best is None or c < best[0]:
                best = (c, i)
        choice[v] = best[1]
    return choice


def solve_game(game: WeightedGraphGame) -> GameSolution:
    """Values and optimal positional strategies of a mean-payoff game."""
    values, strategy, t = _iterate(game)
    certified = strategy is not None
    if not certified:
        strategy = _prune_strategy(game, values)
    return GameSolution(values, strategy, t, certified)


def _prune_strategy(game, values):
    """Fix one value-preserving edge per vertex, re-evaluating after each choice."""
    choice = {}
    out = game.out_edges()
    for v in range(len(game.vertices)):
        for i in out[v]:
            trial = dict(choice)
            trial[v] = i
            if _iterate(game.restrict(trial), certify=False)[0] == values:
                choice = trial
                break
    return choice


def zp_value(game: WeightedGraphGame) -> list:
    return solve_game(game).values


def zp_optimal_strategies(game: WeightedGraphGame):
    """Positional optimal strategies ``(player1, player2)`` as vertex -> edge index."""
    sol = solve_game(game)
    s1 = {v: i for v, i in sol.strategy.items() if game.owner[v] == 1}
    s2 = {v: i for v, i in sol.strategy.items() if game.owner[v] == 2}
    return s1, s2
