"""Independent brute-force HM oracle for single-valued data: the fewest
observations to delete so the revealed strict relation of the rest is
acyclic (equivalently, rationalisable by some linear order)."""

import itertools


def acyclic(edges):
    graph = {}
    for a, b in edges:
        graph.setdefault(a, set()).add(b)
    state = {}

    def visit(v):
        state[v] = 1
        for w in graph.get(v, ()):
            if state.get(w) == 1 or (w not in state and not visit(w)):
                return False
        state[v] = 2
        return True

    return all(visit(v) for v in list(graph) if v not in state)


def min_deletions(observations):
    """``observations``: list of (menu set, chosen item)."""
    n = len(observations)
    for k in range(n + 1):
        for drop in itertools.combinations(range(n), k):
            kept = [o for i, o in enumerate(observations) if i not in drop]
            edges = [(c, x) for menu, c in kept for x in menu if x != c]
            if acyclic(edges):
                return k
    raise AssertionError("unreachable")
