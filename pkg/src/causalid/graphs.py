"""Semi-Markovian causal graphs and the primitives every algorithm consumes.

A :class:`CausalGraph` is an acyclic directed mixed graph (ADMG) over named
observed variables: directed edges encode causal mechanisms, bidirected edges
encode an unobserved common cause of the two endpoints.  A
:class:`RawLatentGraph` is the explicit dual form — a DAG whose latent nodes
are parentless — and :func:`latent_project` maps it onto an ADMG.

Graphs are immutable after construction and safe to share across threads.
All orderings exposed here (topological order, sorted node lists) break ties
lexicographically so downstream outputs are reproducible byte for byte.
"""

from __future__ import annotations

import heapq
import re
from itertools import combinations
from typing import Iterable, Mapping

from . import _opcount

__all__ = [
    "GraphError",
    "CycleError",
    "UnknownNodeError",
    "CausalGraph",
    "RawLatentGraph",
    "latent_project",
    "ancestors",
    "descendants",
    "parents",
    "children",
    "induced",
    "edge_subgraph",
    "topological_order",
]

NODE_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class GraphError(ValueError):
    """Invalid graph structure or graph arguments."""


class CycleError(GraphError):
    def __init__(self, cycle: Iterable[str]):
        self.cycle = list(cycle)
        super().__init__("directed cycle: " + " -> ".join(self.cycle + self.cycle[:1]))


class UnknownNodeError(GraphError):
    def __init__(self, names: Iterable[str]):
        self.names = sorted(names)
        super().__init__("unknown node(s): " + ", ".join(self.names))


def _valid_name(name: object) -> str:
    if not isinstance(name, str) or not NODE_NAME.match(name):
        raise GraphError(f"invalid node name: {name!r}")
    return name


def _toposort(
    nodes: Iterable[str],
    parents_map: Mapping[str, frozenset[str]],
    children_map: Mapping[str, frozenset[str]],
) -> tuple[str, ...]:
    # Kahn's algorithm with a heap so ties break lexicographically.
    indeg = {v: len(parents_map[v]) for v in nodes}
    ready = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for c in sorted(children_map[v]):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != len(indeg):
        remaining = {v for v, d in indeg.items() if d > 0} - set(order)
        raise CycleError(_find_cycle(remaining, parents_map))
    return tuple(order)


def _find_cycle(remaining: set[str], parents_map: Mapping[str, frozenset[str]]) -> list[str]:
    # Every remaining node keeps a parent among `remaining`; walking parent
    # pointers must revisit a node, closing one concrete cycle.
    node = min(remaining)
    seen: dict[str, int] = {}
    path: list[str] = []
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = min(p for p in parents_map[node] if p in remaining)
    cycle = path[seen[node]:]
    cycle.reverse()  # parent-walk order is against the arrows
    return cycle


class CausalGraph:
    """Acyclic directed mixed graph over observed variables.

    Parameters
    ----------
    observed:
        Node names (letters, digits, underscore; starting with a letter).
    directed:
        Ordered pairs ``(a, b)`` meaning ``a -> b``.
    bidirected:
        Unordered pairs ``{a, b}`` meaning ``a <-> b``; stored sorted.

    Raises ``GraphError`` on self-loops, unknown endpoints or invalid names
    and ``CycleError`` (with one offending cycle) if the directed part is
    cyclic.
    """

    __slots__ = ("observed", "directed", "bidirected", "_pa", "_ch", "_sib", "_topo", "_hash")

    def __init__(
        self,
        observed: Iterable[str],
        directed: Iterable[tuple[str, str]] = (),
        bidirected: Iterable[tuple[str, str]] = (),
    ):
        obs = frozenset(_valid_name(v) for v in observed)
        pa: dict[str, set[str]] = {v: set() for v in obs}
        ch: dict[str, set[str]] = {v: set() for v in obs}
        sib: dict[str, set[str]] = {v: set() for v in obs}

        dir_edges = set()
        for a, b in directed:
            if a not in obs or b not in obs:
                raise UnknownNodeError({a, b} - obs)
            if a == b:
                raise GraphError(f"self-loop on {a}")
            dir_edges.add((a, b))
            pa[b].add(a)
            ch[a].add(b)

        bi_edges = set()
        for pair in bidirected:
            a, b = pair
            if a not in obs or b not in obs:
                raise UnknownNodeError({a, b} - obs)
            if a == b:
                raise GraphError(f"bidirected self-loop on {a}")
            bi_edges.add((min(a, b), max(a, b)))
            sib[a].add(b)
            sib[b].add(a)

        self.observed = obs
        self.directed = frozenset(dir_edges)
        self.bidirected = frozenset(bi_edges)
        self._pa = {v: frozenset(s) for v, s in pa.items()}
        self._ch = {v: frozenset(s) for v, s in ch.items()}
        self._sib = {v: frozenset(s) for v, s in sib.items()}
        self._topo = _toposort(obs, self._pa, self._ch)
        self._hash = hash((self.observed, self.directed, self.bidirected))

    def parents_of(self, v: str) -> frozenset[str]:
        try:
            return self._pa[v]
        except KeyError:
            raise UnknownNodeError([v]) from None

    def children_of(self, v: str) -> frozenset[str]:
        try:
            return self._ch[v]
        except KeyError:
            raise UnknownNodeError([v]) from None

    def siblings_of(self, v: str) -> frozenset[str]:
        """Nodes joined to ``v`` by a bidirected edge."""
        try:
            return self._sib[v]
        except KeyError:
            raise UnknownNodeError([v]) from None

    def sorted_nodes(self) -> list[str]:
        return sorted(self.observed)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return (
            self.observed == other.observed
            and self.directed == other.directed
            and self.bidirected == other.bidirected
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return (
            f"CausalGraph({len(self.observed)} nodes, "
            f"{len(self.directed)} directed, {len(self.bidirected)} bidirected)"
        )


class RawLatentGraph:
    """DAG with explicit latent nodes; latents must be parentless.

    The paper's semi-Markovian form restricts latents to exactly two
    children; here any parentless latent is accepted and projected to a
    bidirected clique over its children (see :func:`latent_project`).
    """

    __slots__ = ("observed", "latent", "directed", "_pa", "_ch")

    def __init__(
        self,
        observed: Iterable[str],
        latent: Iterable[str],
        directed: Iterable[tuple[str, str]] = (),
    ):
        obs = frozenset(_valid_name(v) for v in observed)
        lat = frozenset(_valid_name(v) for v in latent)
        overlap = obs & lat
        if overlap:
            raise GraphError("observed and latent overlap: " + ", ".join(sorted(overlap)))
        nodes = obs | lat
        pa: dict[str, set[str]] = {v: set() for v in nodes}
        ch: dict[str, set[str]] = {v: set() for v in nodes}
        dir_edges = set()
        for a, b in directed:
            if a not in nodes or b not in nodes:
                raise UnknownNodeError({a, b} - nodes)
            if a == b:
                raise GraphError(f"self-loop on {a}")
            dir_edges.add((a, b))
            pa[b].add(a)
            ch[a].add(b)
        for u in lat:
            if pa[u]:
                raise GraphError(f"latent {u} has a parent: " + ", ".join(sorted(pa[u])))
        self.observed = obs
        self.latent = lat
        self.directed = frozenset(dir_edges)
        self._pa = {v: frozenset(s) for v, s in pa.items()}
        self._ch = {v: frozenset(s) for v, s in ch.items()}
        _toposort(nodes, self._pa, self._ch)  # rejects cycles

    def parents_of(self, v: str) -> frozenset[str]:
        try:
            return self._pa[v]
        except KeyError:
            raise UnknownNodeError([v]) from None

    def children_of(self, v: str) -> frozenset[str]:
        try:
            return self._ch[v]
        except KeyError:
            raise UnknownNodeError([v]) from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RawLatentGraph):
            return NotImplemented
        return (
            self.observed == other.observed
            and self.latent == other.latent
            and self.directed == other.directed
        )

    def __hash__(self) -> int:
        return hash((self.observed, self.latent, self.directed))

    def __repr__(self) -> str:
        return (
            f"RawLatentGraph({len(self.observed)} observed, "
            f"{len(self.latent)} latent, {len(self.directed)} directed)"
        )


def latent_project(g: RawLatentGraph) -> CausalGraph:
    """Project a latent DAG onto its bidirected (dual) form.

    Observed-to-observed directed edges are preserved.  Every latent with
    children ``C`` contributes a bidirected edge for each unordered pair in
    ``C``; latents with fewer than two children vanish.
    """
    directed = {(a, b) for a, b in g.directed if a in g.observed and b in g.observed}
    bidirected = set()
    for u in sorted(g.latent):
        for a, b in combinations(sorted(g.children_of(u)), 2):
            bidirected.add((a, b))
    return CausalGraph(g.observed, directed, bidirected)


def _known(g: CausalGraph, x: Iterable[str]) -> frozenset[str]:
    xs = frozenset(x)
    if not xs <= g.observed:
        raise UnknownNodeError(xs - g.observed)
    return xs


def ancestors(g: CausalGraph, x: Iterable[str]) -> frozenset[str]:
    """Reflexive-transitive closure of ``x`` along directed edges, upward.

    Bidirected edges are ignored; ``ancestors(g, x) >= x`` always holds.
    """
    xs = _known(g, x)
    _opcount.bump("ancestors")
    out = set(xs)
    stack = list(xs)
    while stack:
        for p in g.parents_of(stack.pop()):
            if p not in out:
                out.add(p)
                stack.append(p)
    return frozenset(out)


def descendants(g: CausalGraph, x: Iterable[str]) -> frozenset[str]:
    """Reflexive-transitive closure of ``x`` along directed edges, downward."""
    xs = _known(g, x)
    _opcount.bump("descendants")
    out = set(xs)
    stack = list(xs)
    while stack:
        for c in g.children_of(stack.pop()):
            if c not in out:
                out.add(c)
                stack.append(c)
    return frozenset(out)


def parents(g: CausalGraph, x: Iterable[str]) -> frozenset[str]:
    """``x`` together with every direct parent of a member of ``x``."""
    xs = _known(g, x)
    out = set(xs)
    for v in xs:
        out |= g.parents_of(v)
    return frozenset(out)


def children(g: CausalGraph, x: Iterable[str]) -> frozenset[str]:
    """``x`` together with every direct child of a member of ``x``."""
    xs = _known(g, x)
    out = set(xs)
    for v in xs:
        out |= g.children_of(v)
    return frozenset(out)


def induced(g: CausalGraph, x: Iterable[str]) -> CausalGraph:
    """Subgraph over ``x``: keeps edges with both endpoints in ``x``."""
    xs = _known(g, x)
    _opcount.bump("induced")
    return CausalGraph(
        xs,
        ((a, b) for a, b in g.directed if a in xs and b in xs),
        ((a, b) for a, b in g.bidirected if a in xs and b in xs),
    )


def edge_subgraph(g: CausalGraph, over: Iterable[str], under: Iterable[str]) -> CausalGraph:
    """Delete arrows entering ``over`` and arrows leaving ``under``.

    A bidirected edge stands for a latent cause pointing into both
    endpoints, so it counts as incoming: it is removed when either endpoint
    is in ``over``, and kept at ``under`` nodes (it is not an outgoing
    arrow).  All nodes are preserved.
    """
    ov = _known(g, over)
    un = _known(g, under)
    _opcount.bump("edge_subgraph")
    return CausalGraph(
        g.observed,
        ((a, b) for a, b in g.directed if b not in ov and a not in un),
        ((a, b) for a, b in g.bidirected if a not in ov and b not in ov),
    )


def topological_order(g: CausalGraph) -> tuple[str, ...]:
    """Deterministic topological order (lexicographic tie-breaking)."""
    _opcount.bump("topological_order")
    return g._topo
