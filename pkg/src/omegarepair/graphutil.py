"""Deterministic graph utilities: SCC decomposition, reachability, and
lowest-id breadth-first search, all over plain successor maps.

Successor maps are ``dict vertex -> iterable of successors``; vertices must be
mutually comparable so tie-breaks ("lowest id") are well defined.
"""

from __future__ import annotations


def tarjan_scc(vertices, succ):
    """Strongly connected components, iterative Tarjan.

    Returns a list of components (each a frozenset) in reverse topological
    order (a component precedes the components it reaches), plus a map
    vertex -> component index.
    """
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    comp_of = {}
    counter = [0]

    for root in sorted(vertices):
        if root in index:
            continue
        work = [(root, iter(sorted(succ.get(root, ()))))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(succ.get(w, ())))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                comp_of.update({w: len(comps) for w in comp})
                comps.append(frozenset(comp))
    return comps, comp_of


def reachable_from(sources, succ):
    """All vertices reachable from ``sources`` (inclusive)."""
    seen = set(sources)
    frontier = list(sources)
    while frontier:
        v = frontier.pop()
        for w in succ.get(v, ()):
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return seen


def reaches(targets, vertices, succ):
    """All vertices from which some target is reachable (inclusive)."""
    pred = {v: [] for v in vertices}
    for v in vertices:
        for w in succ.get(v, ()):
            if w in pred:
                pred[w].append(v)
    seen = set(t for t in targets if t in pred)
    frontier = list(seen)
    while frontier:
        v = frontier.pop()
        for u in pred[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return seen


def bfs_path(source, targets, succ):
    """Shortest path from source to the nearest target, as a vertex list.

    Deterministic: the BFS expands successors in sorted order, so among
    equal-length paths the lexicographically least (by vertex id) is found.
    Returns None if no target is reachable.  A source already in ``targets``
    yields the single-vertex path.
    """
    targets = set(targets)
    if source in targets:
        return [source]
    parent = {source: None}
    frontier = [source]
    while frontier:
        nxt = []
        for v in frontier:
            for w in sorted(succ.get(v, ())):
                if w in parent:
                    continue
                parent[w] = v
                if w in targets:
                    path = [w]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                nxt.append(w)
        frontier = nxt
    return None


def shortest_cycle_through(v, succ):
    """Shortest cycle through ``v`` as a vertex list [v, ..., last] with an
    implicit closing edge last -> v; None if no such cycle (self-loop gives
    [v])."""
    if v in succ.get(v, ()):
        return [v]
    best = None
    for w in sorted(succ.get(v, ())):
        back = bfs_path(w, {v}, succ)
        if back is None:
            continue
        cand = [v] + back[:-1]
        if best is None or len(cand) < len(best):
            best = cand
    return best
