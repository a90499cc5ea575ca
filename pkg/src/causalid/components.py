"""C-component decomposition, c-forest recognition and hedge witnesses.

A c-component of a node set is a connected component of the bidirected part
of the induced subgraph.  A c-forest over nodes ``B`` is a subgraph that is a
single c-component in which every observed node has at most one directed
child; its root set is the set of child-free nodes.  A hedge witness for a
target root set ``L`` inside an available set ``A`` is an ``L``-rooted
c-forest over some ``B`` with ``L`` strictly inside ``B`` whose bidirected
edges form a spanning tree of ``B`` and connect ``L``; its existence
certifies that Q[L] cannot be computed from Q[A].

The witness search enumerates candidate node sets exhaustively, so it is a
diagnostic explainer for small regions, not the decision path (the
identification engine decides).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from . import _opcount
from .graphs import CausalGraph, GraphError, UnknownNodeError, ancestors, induced

__all__ = [
    "c_components",
    "is_single_c_component",
    "root_set",
    "CForest",
    "is_c_forest",
    "HedgeWitness",
    "HedgeSearchLimitError",
    "find_hedge",
]


def _subset(g: CausalGraph, x: Iterable[str]) -> frozenset[str]:
    xs = frozenset(x)
    if not xs <= g.observed:
        raise UnknownNodeError(xs - g.observed)
    return xs


def c_components(g: CausalGraph, x: Iterable[str]) -> tuple[frozenset[str], ...]:
    """Partition ``x`` into maximal bidirected-connected components.

    Only bidirected edges with both endpoints in ``x`` count.  Components
    are returned sorted by their least node name.
    """
    xs = _subset(g, x)
    _opcount.bump("c_components")
    unseen = set(xs)
    comps: list[frozenset[str]] = []
    for start in sorted(xs):
        if start not in unseen:
            continue
        comp = {start}
        unseen.discard(start)
        stack = [start]
        while stack:
            for nb in g.siblings_of(stack.pop()):
                if nb in unseen:
                    unseen.discard(nb)
                    comp.add(nb)
                    stack.append(nb)
        comps.append(frozenset(comp))
    return tuple(comps)


def is_single_c_component(g: CausalGraph, x: Iterable[str]) -> bool:
    """True iff ``x`` has exactly one c-component (the empty set counts)."""
    return len(c_components(g, x)) <= 1


def root_set(g: CausalGraph, nodes: Iterable[str]) -> frozenset[str]:
    """Members of ``nodes`` with no directed child inside ``nodes``."""
    ns = _subset(g, nodes)
    return frozenset(v for v in ns if not (g.children_of(v) & ns))


@dataclass(frozen=True)
class CForest:
    """An induced subgraph certified to be a rooted c-forest.

    ``roots`` is the maximal child-free subset of ``nodes`` within the
    induced subgraph; construction via :meth:`of_induced` checks that
    ``nodes`` is a single c-component and that no node has two directed
    children inside it.
    """

    graph: CausalGraph
    nodes: frozenset[str]
    roots: frozenset[str]

    @classmethod
    def of_induced(cls, g: CausalGraph, nodes: Iterable[str]) -> "CForest":
        ns = _subset(g, nodes)
        if not is_single_c_component(g, ns):
            raise GraphError("not a c-forest: nodes are not a single c-component")
        for v in ns:
            if len(g.children_of(v) & ns) > 1:
                raise GraphError(f"not a c-forest: {v} has more than one child inside")
        return cls(graph=g, nodes=ns, roots=root_set(g, ns))


def is_c_forest(g: CausalGraph, nodes: Iterable[str]) -> bool:
    try:
        CForest.of_induced(g, nodes)
    except GraphError:
        return False
    return True


class HedgeSearchLimitError(GraphError):
    """The exhaustive witness search region exceeds the configured limit."""


@dataclass(frozen=True)
class HedgeWitness:
    """Certificate that Q[roots] is not computable from Q over the host set.

    ``inner`` is the full node set B of the forest (roots included,
    ``roots`` strictly inside B); ``tree`` lists the bidirected edges chosen
    as the spanning tree over B.
    """

    roots: frozenset[str]
    inner: frozenset[str]
    tree: tuple[tuple[str, str], ...]

    def verify(self, g: CausalGraph, a: Iterable[str] | None = None) -> bool:
        """Re-check every witness condition from scratch against ``g``."""
        b = self.inner
        if not (self.roots < b and b <= g.observed):
            return False
        if a is not None and not b <= frozenset(a):
            return False
        edges = set(self.tree)
        if len(edges) != len(b) - 1 or edges - set(g.bidirected):
            return False
        if any(u not in b or v not in b for u, v in edges):
            return False
        if not _spans(b, edges):
            return False
        inner_tree = {(u, v) for u, v in edges if u in self.roots and v in self.roots}
        if not _spans(self.roots, inner_tree):
            return False
        # A directed choice with exactly one child per non-root node exists
        # iff each such node keeps at least one child inside b.
        gb = induced(g, b)
        for v in b - self.roots:
            if not gb.children_of(v):
                return False
        return all(not (g.children_of(r) & b) or True for r in self.roots)


def _spans(nodes: frozenset[str], edges: set[tuple[str, str]]) -> bool:
    if not nodes:
        return False
    if len(nodes) == 1:
        return not edges
    adj: dict[str, set[str]] = {v: set() for v in nodes}
    for u, v in edges:
        if u in adj and v in adj:
            adj[u].add(v)
            adj[v].add(u)
    start = min(nodes)
    seen = {start}
    stack = [start]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return seen == nodes


def _spanning_tree(
    nodes: frozenset[str],
    edges: Iterable[tuple[str, str]],
    first: frozenset[str],
) -> tuple[tuple[str, str], ...]:
    # Kruskal over a deterministic edge order; edges internal to `first`
    # come first so the tree restricted to `first` stays connected.
    rank = {v: v for v in nodes}

    def find(v):
        while rank[v] != v:
            rank[v] = rank[rank[v]]
            v = rank[v]
        return v

    ordered = sorted(edges, key=lambda e: (not (e[0] in first and e[1] in first), e))
    tree = []
    for u, v in ordered:
        ru, rv = find(u), find(v)
        if ru != rv:
            rank[ru] = rv
            tree.append((u, v))
    return tuple(sorted(tree))


def find_hedge(
    g: CausalGraph,
    a: Iterable[str],
    l: Iterable[str],
    *,
    max_region: int = 12,
    budget: int | None = None,
) -> HedgeWitness | None:
    """Search exhaustively for a hedge witness for Q[l] within Q[a].

    ``l`` must be a nonempty single c-component contained in ``a``.  Returns
    the witness over the smallest (then lexicographically least) node set,
    or None when no witness exists.  Candidates are pruned to
    bidirected-connected supersets of ``l`` among the ancestors of ``l``
    within ``a``: any valid forest set must reach ``l`` along chosen child
    edges and be spanned by bidirected edges.

    Raises :class:`HedgeSearchLimitError` when the candidate region exceeds
    ``max_region`` extra nodes, or when ``budget`` candidate sets were
    examined without finishing.
    """
    ls = _subset(g, l)
    as_ = _subset(g, a)
    if not ls or not ls <= as_:
        raise GraphError("roots must be a nonempty subset of the available set")
    if not is_single_c_component(g, ls):
        raise GraphError("roots must be a single c-component")
    _opcount.bump("find_hedge")

    ga = induced(g, as_)
    region = ancestors(ga, ls)
    extra = sorted(region - ls)
    if len(extra) > max_region:
        raise HedgeSearchLimitError(
            f"witness search region has {len(extra)} candidate nodes (limit {max_region})"
        )

    examined = 0
    for size in range(1, len(extra) + 1):
        for combo in combinations(extra, size):
            examined += 1
            if budget is not None and examined > budget:
                raise HedgeSearchLimitError(f"witness search budget {budget} exhausted")
            b = ls | frozenset(combo)
            gb = induced(ga, b)
            if any(not gb.children_of(v) for v in combo):
                continue
            if not _spans(b, set(gb.bidirected)):
                continue
            tree = _spanning_tree(b, gb.bidirected, ls)
            return HedgeWitness(roots=ls, inner=b, tree=tree)
    return None
