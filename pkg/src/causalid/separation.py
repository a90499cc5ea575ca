"""d-separation and the applicability predicates of the three do-calculus rules.

Blocking is defined path-wise: a path is blocked by ``Z`` when it contains a
chain or fork whose middle node is in ``Z``, or a collider none of whose
descendants (the collider included) is in ``Z``.  Enumerating paths is
exponential, so :func:`d_separated` runs the equivalent reachability scan
(Bayes-ball style) instead; the test suite validates it against literal path
enumeration.

Bidirected edges are interpreted by canonical expansion: each one is replaced
by a fresh latent fork before the definition is applied.  Latents are never
conditioned on.

The rule predicates take the conditioning context ``x``/``w`` explicitly and
never union ``x`` into the separating set themselves: callers such as the
maximal-move computation condition on ``x`` deliberately.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping

from . import _opcount
from .graphs import CausalGraph, GraphError, UnknownNodeError, ancestors, edge_subgraph

__all__ = [
    "d_separated",
    "dag_d_separated",
    "rule1_holds",
    "rule2_holds",
    "rule3_holds",
]


def dag_d_separated(
    parents: Mapping[Hashable, Iterable[Hashable]],
    children: Mapping[Hashable, Iterable[Hashable]],
    x: Iterable[Hashable],
    y: Iterable[Hashable],
    z: Iterable[Hashable],
) -> bool:
    """d-separation on a plain DAG given adjacency maps.

    Reachability formulation: a trail state is (node, direction), where
    "up" means the trail may continue against or along arrows (as after
    leaving a source or a tail-to-tail node) and "down" means it arrived
    through an arrowhead, so it may only pass on to children, or turn back
    up at an opened collider (one with a descendant in ``z``).
    """
    xs, ys, zs = set(x), set(y), set(z)
    anc_z = set(zs)
    stack = list(zs)
    while stack:
        for p in parents[stack.pop()]:
            if p not in anc_z:
                anc_z.add(p)
                stack.append(p)

    visited: set[tuple[Hashable, bool]] = set()
    queue: list[tuple[Hashable, bool]] = [(s, True) for s in xs]  # True = "up"
    while queue:
        node, up = queue.pop()
        if (node, up) in visited:
            continue
        visited.add((node, up))
        if node in ys:
            return False
        if up:
            if node not in zs:
                queue.extend((p, True) for p in parents[node])
                queue.extend((c, False) for c in children[node])
        else:
            if node not in zs:
                queue.extend((c, False) for c in children[node])
            if node in anc_z:
                queue.extend((p, True) for p in parents[node])
    return True


def _expanded(g: CausalGraph):
    # Each bidirected edge becomes a parentless fork node keyed by a tuple,
    # which cannot collide with observed string names.
    parents: dict[Hashable, set[Hashable]] = {v: set(g.parents_of(v)) for v in g.observed}
    children: dict[Hashable, set[Hashable]] = {v: set(g.children_of(v)) for v in g.observed}
    for a, b in g.bidirected:
        u = ("<->", a, b)
        parents[u] = set()
        children[u] = {a, b}
        parents[a].add(u)
        parents[b].add(u)
    return parents, children


def _disjoint(*sets: frozenset[str]) -> None:
    for i, s in enumerate(sets):
        for t in sets[i + 1:]:
            if s & t:
                raise GraphError("sets overlap on: " + ", ".join(sorted(s & t)))


def _subset(g: CausalGraph, x: Iterable[str]) -> frozenset[str]:
    xs = frozenset(x)
    if not xs <= g.observed:
        raise UnknownNodeError(xs - g.observed)
    return xs


def d_separated(
    g: CausalGraph,
    x: Iterable[str],
    y: Iterable[str],
    z: Iterable[str] = (),
) -> bool:
    """True iff every path between ``x`` and ``y`` is blocked by ``z``.

    ``x``, ``y``, ``z`` must be pairwise disjoint observed sets with ``x``
    and ``y`` nonempty.  Symmetric in ``x`` and ``y``.
    """
    xs, ys, zs = _subset(g, x), _subset(g, y), _subset(g, z)
    _disjoint(xs, ys, zs)
    if not xs or not ys:
        raise GraphError("d-separation requires nonempty x and y")
    _opcount.bump("d_separated")
    parents, children = _expanded(g)
    return dag_d_separated(parents, children, xs, ys, zs)


def _rule_sets(g, x, y, z, w):
    xs, ys, zs, ws = _subset(g, x), _subset(g, y), _subset(g, z), _subset(g, w)
    _disjoint(xs, ys, zs, ws)
    return xs, ys, zs, ws


def rule1_holds(g: CausalGraph, x, y, z, w) -> bool:
    """Insertion/deletion of observations: P_x(y|z,w) = P_x(y|w).

    Holds iff (z d-sep y | x,w) in the graph with arrows into ``x`` removed.
    Vacuously true when ``z`` or ``y`` is empty.
    """
    xs, ys, zs, ws = _rule_sets(g, x, y, z, w)
    if not zs or not ys:
        return True
    return d_separated(edge_subgraph(g, xs, ()), zs, ys, xs | ws)


def rule2_holds(g: CausalGraph, x, y, z, w) -> bool:
    """Action/observation exchange: P_{x,z}(y|w) = P_x(y|z,w).

    Holds iff (z d-sep y | x,w) in the graph with arrows into ``x`` and
    arrows out of ``z`` removed.
    """
    xs, ys, zs, ws = _rule_sets(g, x, y, z, w)
    if not zs or not ys:
        return True
    return d_separated(edge_subgraph(g, xs, zs), zs, ys, xs | ws)


def rule3_holds(g: CausalGraph, x, y, z, w) -> bool:
    """Insertion/deletion of actions: P_{x,z}(y|w) = P_x(y|w).

    Holds iff (z d-sep y | x,w) in the graph with arrows into ``x`` and into
    z_w removed, where z_w is the part of ``z`` that is not an ancestor of
    ``w`` once arrows into ``x`` are gone.
    """
    xs, ys, zs, ws = _rule_sets(g, x, y, z, w)
    if not zs or not ys:
        return True
    if ws:
        zw = zs - ancestors(edge_subgraph(g, xs, ()), ws)
    else:
        zw = zs
    return d_separated(edge_subgraph(g, xs | zw, ()), zs, ys, xs | ws)
