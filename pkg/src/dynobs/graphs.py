from collections import deque


def strongly_connected_components(n, succ):
    """Tarjan's algorithm, iterative.  ``succ[v]`` is an iterable of vertex ids.

    Returns ``comp`` with ``comp[v]`` the component id of ``v``; ids come out in
    reverse topological order (sinks first).
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def bfs_path(start, goal, succ, allowed=None):
    """Shortest list of edge tags from ``start`` to ``goal``.

    ``succ(v)`` yields ``(tag, w)`` pairs; ``allowed(w)`` restricts visited vertices.
    Returns ``None`` when ``goal`` is unreachable.
    """
    if start == goal:
        return []
    parent = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for tag, w in succ(v):
            if w in parent or (allowed is not None and not allowed(w)):
                continue
            parent[w] = (v, tag)
            if w == goal:
                path = []
                while parent[w] is not None:
                    v, tag = parent[w]
                    path.append(tag)
                    w = v
                return path[::-1]
            queue.append(w)
    return None
