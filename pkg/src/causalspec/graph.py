"""Directed acyclic graph core: structure queries and d-separation.

The graph is name-based and immutable after construction.  Node order and
edge order follow the declaration order of the source document, and every
traversal iterates neighbours in that order, so all outputs are
deterministic across runs and machines.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from .dsl import ModelDocument
from .errors import CycleError, PathLimitError, UnknownNodeError

Edge = tuple[str, str]

DEFAULT_PATH_LIMIT = 10_000


class Dag:
    """Immutable DAG with observability flags and optional node roles."""

    def __init__(
        self,
        nodes: Iterable[str],
        edges: Iterable[Edge],
        observed: Iterable[str] | None = None,
        roles: dict[str, str] | None = None,
    ):
        self.nodes: tuple[str, ...] = tuple(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            dupes = sorted({n for n in self.nodes if self.nodes.count(n) > 1})
            raise ValueError(f"duplicate node names: {', '.join(dupes)}")
        index = {n: i for i, n in enumerate(self.nodes)}
        self.edges: tuple[Edge, ...] = tuple((s, t) for s, t in edges)
        seen: set[Edge] = set()
        for s, t in self.edges:
            if s not in index:
                raise UnknownNodeError(s)
            if t not in index:
                raise UnknownNodeError(t)
            if s == t:
                raise CycleError([s, s])
            if (s, t) in seen:
                raise ValueError(f"duplicate edge {s} -> {t}")
            seen.add((s, t))
        self.observed: frozenset[str] = (
            frozenset(self.nodes) if observed is None else frozenset(observed)
        )
        for n in self.observed:
            if n not in index:
                raise UnknownNodeError(n)
        self.roles: dict[str, str] = dict(roles or {})
        for n in self.roles:
            if n not in index:
                raise UnknownNodeError(n)

        self._index = index
        self._parents: dict[str, tuple[str, ...]] = {n: () for n in self.nodes}
        self._children: dict[str, tuple[str, ...]] = {n: () for n in self.nodes}
        par: dict[str, list[str]] = {n: [] for n in self.nodes}
        chi: dict[str, list[str]] = {n: [] for n in self.nodes}
        for s, t in self.edges:
            par[t].append(s)
            chi[s].append(t)
        for n in self.nodes:
            self._parents[n] = tuple(par[n])
            self._children[n] = tuple(chi[n])
        self._topo = self._toposort()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_document(cls, doc: ModelDocument) -> "Dag":
        return cls(
            doc.node_names(),
            [(e.src, e.dst) for e in doc.edges],
            observed=[n.name for n in doc.nodes if n.kind == "observed"],
            roles={n.name: n.role for n in doc.nodes if n.role != "covariate"},
        )

    def _toposort(self) -> tuple[str, ...]:
        indeg = {n: len(self._parents[n]) for n in self.nodes}
        ready = [n for n in self.nodes if indeg[n] == 0]
        order: list[str] = []
        while ready:
            # declaration order keeps the result stable
            ready.sort(key=self._index.__getitem__)
            n = ready.pop(0)
            order.append(n)
            for c in self._children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(order) != len(self.nodes):
            raise CycleError(self._find_cycle())
        return tuple(order)

    def _find_cycle(self) -> list[str]:
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {n: WHITE for n in self.nodes}
        stack: list[str] = []

        def visit(n: str) -> list[str] | None:
            color[n] = GRAY
            stack.append(n)
            for c in self._children[n]:
                if color[c] == GRAY:
                    i = stack.index(c)
                    return stack[i:] + [c]
                if color[c] == WHITE:
                    found = visit(c)
                    if found:
                        return found
            stack.pop()
            color[n] = BLACK
            return None

        for n in self.nodes:
            if color[n] == WHITE:
                found = visit(n)
                if found:
                    return found
        raise AssertionError("no cycle found in cyclic graph")

    # -- basic queries ----------------------------------------------------

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def _check(self, name: str) -> str:
        if name not in self._index:
            raise UnknownNodeError(name)
        return name

    def parents(self, name: str) -> set[str]:
        return set(self._parents[self._check(name)])

    def children(self, name: str) -> set[str]:
        return set(self._children[self._check(name)])

    def parent_list(self, name: str) -> tuple[str, ...]:
        """Parents in edge-declaration order (stable for simulation)."""
        return self._parents[self._check(name)]

    def ancestors(self, name: str) -> set[str]:
        """All strict ancestors (excludes the node itself)."""
        out: set[str] = set()
        queue = deque(self._parents[self._check(name)])
        while queue:
            n = queue.popleft()
            if n in out:
                continue
            out.add(n)
            queue.extend(self._parents[n])
        return out

    def descendants(self, name: str) -> set[str]:
        """All strict descendants (excludes the node itself)."""
        out: set[str] = set()
        queue = deque(self._children[self._check(name)])
        while queue:
            n = queue.popleft()
            if n in out:
                continue
            out.add(n)
            queue.extend(self._children[n])
        return out

    def ancestors_of_set(self, names: Iterable[str]) -> set[str]:
        """Union of the given nodes and all their ancestors."""
        out: set[str] = set()
        queue = deque(self._check(n) for n in names)
        while queue:
            n = queue.popleft()
            if n in out:
                continue
            out.add(n)
            queue.extend(self._parents[n])
        return out

    def topological_order(self) -> tuple[str, ...]:
        return self._topo

    def roots(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if not self._parents[n])

    def has_edge(self, src: str, dst: str) -> bool:
        return (src, dst) in self._edge_set()

    def _edge_set(self) -> frozenset[Edge]:
        cached = getattr(self, "_edge_set_cache", None)
        if cached is None:
            cached = frozenset(self.edges)
            self._edge_set_cache = cached
        return cached

    def role_of(self, name: str) -> str:
        return self.roles.get(self._check(name), "covariate")

    def exposure(self) -> str | None:
        for n in self.nodes:
            if self.roles.get(n) == "exposure":
                return n
        return None

    def outcome(self) -> str | None:
        for n in self.nodes:
            if self.roles.get(n) == "outcome":
                return n
        return None

    # -- mutilation -------------------------------------------------------

    def without_incoming(self, names: Iterable[str]) -> "Dag":
        cut = {self._check(n) for n in names}
        return Dag(
            self.nodes,
            [e for e in self.edges if e[1] not in cut],
            observed=self.observed,
            roles=self.roles,
        )

    def without_outgoing(self, names: Iterable[str]) -> "Dag":
        cut = {self._check(n) for n in names}
        return Dag(
            self.nodes,
            [e for e in self.edges if e[0] not in cut],
            observed=self.observed,
            roles=self.roles,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and self.observed == other.observed
            and self.roles == other.roles
        )

    def __repr__(self) -> str:
        return f"Dag(nodes={len(self.nodes)}, edges={len(self.edges)})"


# ---------------------------------------------------------------------------
# d-separation (active-trail reachability, a.k.a. Bayes ball)
# ---------------------------------------------------------------------------


def reachable(dag: Dag, sources: Iterable[str] | str, given: Iterable[str] = ()) -> set[str]:
    """Nodes connected to ``sources`` by at least one active trail given ``given``.

    The result excludes the sources themselves and any conditioned nodes.
    """
    if isinstance(sources, str):
        sources = [sources]
    src = [dag._check(s) for s in sources]
    z = {dag._check(g) for g in given}
    # a collider opens iff it or one of its descendants is conditioned on,
    # i.e. iff it is an ancestor (inclusive) of the conditioning set
    opens = dag.ancestors_of_set(z) if z else set()

    UP, DOWN = 0, 1  # UP: arrived from a child; DOWN: arrived from a parent
    visited: set[tuple[str, int]] = set()
    out: set[str] = set()
    queue: deque[tuple[str, int]] = deque((s, UP) for s in src)
    while queue:
        node, direction = queue.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node not in z:
            out.add(node)
        if direction == UP and node not in z:
            for p in dag._parents[node]:
                queue.append((p, UP))
            for c in dag._children[node]:
                queue.append((c, DOWN))
        elif direction == DOWN:
            if node not in z:
                for c in dag._children[node]:
                    queue.append((c, DOWN))
            if node in opens:
                for p in dag._parents[node]:
                    queue.append((p, UP))
    return out - set(src)


def d_separated(
    dag: Dag,
    x: Iterable[str] | str,
    y: Iterable[str] | str,
    given: Iterable[str] = (),
) -> bool:
    """True iff every trail between ``x`` and ``y`` is blocked by ``given``.

    ``x``, ``y`` and ``given`` must be pairwise disjoint.
    """
    xs = {x} if isinstance(x, str) else set(x)
    ys = {y} if isinstance(y, str) else set(y)
    zs = set(given)
    for n in xs | ys | zs:
        dag._check(n)
    if xs & ys or xs & zs or ys & zs:
        overlap = sorted((xs & ys) | (xs & zs) | (ys & zs))
        raise ValueError(f"d-separation query sets must be disjoint, shared: {overlap}")
    if not xs or not ys:
        raise ValueError("d-separation query needs non-empty x and y")
    return not (reachable(dag, xs, zs) & ys)


# ---------------------------------------------------------------------------
# Path enumeration
# ---------------------------------------------------------------------------


def simple_paths(
    dag: Dag, src: str, dst: str, limit: int = DEFAULT_PATH_LIMIT
) -> list[tuple[str, ...]]:
    """All simple paths from ``src`` to ``dst`` in the undirected skeleton.

    Paths are returned as node tuples, sorted lexicographically by node
    sequence.  Raises PathLimitError if more than ``limit`` paths exist.
    """
    dag._check(src)
    dag._check(dst)
    neighbours: dict[str, list[str]] = {n: [] for n in dag.nodes}
    for s, t in dag.edges:
        neighbours[s].append(t)
        neighbours[t].append(s)
    order = {n: i for i, n in enumerate(dag.nodes)}
    for n in dag.nodes:
        neighbours[n].sort(key=order.__getitem__)

    out: list[tuple[str, ...]] = []
    path = [src]
    on_path = {src}

    def walk(node: str) -> None:
        if node == dst:
            if len(out) >= limit:
                raise PathLimitError(limit)
            out.append(tuple(path))
            return
        for nxt in neighbours[node]:
            if nxt in on_path:
                continue
            path.append(nxt)
            on_path.add(nxt)
            walk(nxt)
            path.pop()
            on_path.remove(nxt)

    if src != dst:
        walk(src)
    out.sort()
    return out


def path_arrows(dag: Dag, path: Sequence[str]) -> tuple[str, ...]:
    """Direction glyph for each step: '->' if the edge follows the arrow."""
    edge_set = dag._edge_set()
    arrows = []
    for a, b in zip(path, path[1:]):
        if (a, b) in edge_set:
            arrows.append("->")
        elif (b, a) in edge_set:
            arrows.append("<-")
        else:
            raise ValueError(f"no edge between {a!r} and {b!r}")
    return tuple(arrows)


def colliders_on_path(dag: Dag, path: Sequence[str]) -> set[str]:
    """Inner nodes where both adjacent path edges point inward."""
    arrows = path_arrows(dag, path)
    out = set()
    for i in range(1, len(path) - 1):
        if arrows[i - 1] == "->" and arrows[i] == "<-":
            out.add(path[i])
    return out


def path_is_active(dag: Dag, path: Sequence[str], given: Iterable[str] = ()) -> bool:
    """Trail activity for a single path under conditioning set ``given``.

    A path is active iff no non-collider inner node is conditioned on and
    every collider has itself or a descendant in the conditioning set.
    """
    z = set(given)
    colliders = colliders_on_path(dag, path)
    for node in path[1:-1]:
        if node in colliders:
            if node not in z and not (dag.descendants(node) & z):
                return False
        else:
            if node in z:
                return False
    return True


def is_directed_path(dag: Dag, path: Sequence[str]) -> bool:
    """True iff every step follows the arrow direction (a causal path)."""
    return all(a == "->" for a in path_arrows(dag, path))


def d_separated_by_paths(
    dag: Dag,
    x: str,
    y: str,
    given: Iterable[str] = (),
    limit: int = DEFAULT_PATH_LIMIT,
) -> bool:
    """Slow reference check: enumerate all paths and test each one.

    Exists as an independent cross-check of :func:`d_separated`; the two
    must always agree.
    """
    return not any(
        path_is_active(dag, p, given) for p in simple_paths(dag, x, y, limit)
    )
