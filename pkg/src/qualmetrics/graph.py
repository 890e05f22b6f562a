"""Directed graphs and Tarjan's strongly connected components."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable


@dataclass(frozen=True)
class DependencyGraph:
    """Nodes plus directed edges; ``edges`` keeps multiplicity."""

    nodes: tuple = ()
    edges: Counter = field(default_factory=Counter, compare=False)

    @classmethod
    def build(cls, nodes: Iterable[Hashable], edges: Iterable[tuple]) -> "DependencyGraph":
        edge_counts = Counter(edges)
        all_nodes = set(nodes)
        for a, b in edge_counts:
            all_nodes.update((a, b))
        return cls(tuple(sorted(all_nodes)), edge_counts)

    def successors(self) -> dict:
        succ = {n: [] for n in self.nodes}
        for a, b in sorted(self.edges):
            succ[a].append(b)
        return succ

    def components(self) -> list[list]:
        return strongly_connected_components(self.nodes, self.edges)

    def cycles(self) -> list[list]:
        """Components that make the graph cyclic: size >= 2, or one node with a self edge."""
        return [
            comp
            for comp in self.components()
            if len(comp) > 1 or (comp[0], comp[0]) in self.edges
        ]


def strongly_connected_components(nodes, edges) -> list[list]:
    """Tarjan's algorithm, iterative so deep graphs do not hit the recursion limit.

    Each component comes back sorted, and the list of components is sorted by
    first member, so the output is independent of traversal order.
    """
    succ = {n: [] for n in nodes}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
        succ.setdefault(b, [])

    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    result: list[list] = []
    counter = 0

    for root in sorted(succ):
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
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
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                result.append(sorted(comp))
    result.sort(key=lambda c: c[0])
    return result
