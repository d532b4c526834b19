"""Conditional-independence statements implied by the graph.

Two generators live here: the pairwise local Markov basis (each node
against its nondescendants given its parents) and the exhaustive minimal
separating sets over a node scope.  Both only ever assert independence;
a pair that cannot be separated is simply absent from the output, never
reported as "dependent".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from . import graph as g
from .graph import Dag

LOCAL_MARKOV = "local_markov"
MINIMAL_SEPARATOR = "minimal_separator"
USER_ASSERTED = "user_asserted"

_PROVENANCES = (LOCAL_MARKOV, MINIMAL_SEPARATOR, USER_ASSERTED)


@dataclass(frozen=True)
class CiStatement:
    """One conditional-independence claim, canonically ordered.

    ``x`` sorts before ``y`` and ``given`` is a sorted tuple, so equal
    claims from different construction routes compare equal.
    """

    x: str
    y: str
    given: tuple[str, ...] = ()
    provenance: str = USER_ASSERTED

    def __post_init__(self):
        if self.x == self.y:
            raise ValueError(f"statement needs two distinct nodes, got {self.x!r} twice")
        if self.x in self.given or self.y in self.given:
            raise ValueError("conditioning set must not contain the tested pair")
        if self.provenance not in _PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.x > self.y:
            lo, hi = self.y, self.x
            object.__setattr__(self, "x", lo)
            object.__setattr__(self, "y", hi)
        object.__setattr__(self, "given", tuple(sorted(self.given)))

    def pair(self) -> tuple[str, str]:
        return (self.x, self.y)

    def render(self) -> str:
        if not self.given:
            return f"{self.x} ⊥ {self.y}"
        return f"{self.x} ⊥ {self.y} | {{{', '.join(self.given)}}}"

    def sort_key(self) -> tuple:
        return (self.x, self.y, len(self.given), self.given)


def make_statement(x: str, y: str, given: Iterable[str] = (), provenance: str = USER_ASSERTED) -> CiStatement:
    xs, ys = (x, y) if x < y else (y, x)
    return CiStatement(xs, ys, tuple(sorted(given)), provenance)


def verify(dag: Dag, statement: CiStatement) -> bool:
    """True iff the graph entails the statement (pure d-separation)."""
    return g.d_separated(dag, statement.x, statement.y, statement.given)


def local_markov_basis(dag: Dag) -> list[CiStatement]:
    """Pairwise expansion of "each node ⊥ its nondescendants | its parents".

    One statement per (node, nondescendant) pair where the nondescendant is
    not already a parent.  Duplicate claims arising from symmetric pairs
    are deduplicated via canonical ordering.
    """
    out: dict[tuple[str, str, tuple[str, ...]], CiStatement] = {}
    for x in dag.nodes:
        parents = set(dag.parent_list(x))
        nondesc = set(dag.nodes) - dag.descendants(x) - {x}
        for y in sorted(nondesc - parents):
            st = make_statement(x, y, sorted(parents), LOCAL_MARKOV)
            out[(st.x, st.y, st.given)] = st
    return sorted(out.values(), key=CiStatement.sort_key)


def implied_independencies(
    dag: Dag,
    scope: Iterable[str] | None = None,
    max_given: int | None = None,
) -> list[CiStatement]:
    """Every minimal separating set between nonadjacent scope pairs.

    A conditioning set is reported when it separates the pair and no
    proper subset does.  Sets are drawn from the scope only, capped at
    ``max_given`` members (unlimited when None).  Output is sorted by
    pair, then set size, then lexicographically.
    """
    names = list(dag.nodes if scope is None else scope)
    for n in names:
        dag._check(n)
    if len(names) < 2:
        raise ValueError("scope must contain at least two nodes")
    if len(set(names)) != len(names):
        raise ValueError("scope contains duplicate names")

    order = {n: i for i, n in enumerate(dag.nodes)}
    names.sort(key=order.__getitem__)
    out: list[CiStatement] = []
    for x, y in itertools.combinations(names, 2):
        if dag.has_edge(x, y) or dag.has_edge(y, x):
            continue
        rest = [n for n in names if n not in (x, y)]
        cap = len(rest) if max_given is None else min(max_given, len(rest))
        found: list[set[str]] = []
        for size in range(cap + 1):
            for combo in itertools.combinations(rest, size):
                chosen = set(combo)
                # skipping supersets of kept separators yields exactly the
                # minimal ones when enumerating by increasing size
                if any(prev <= chosen for prev in found):
                    continue
                if g.d_separated(dag, x, y, chosen):
                    found.append(chosen)
                    out.append(make_statement(x, y, combo, MINIMAL_SEPARATOR))
    out.sort(key=CiStatement.sort_key)
    return out


def observable_independencies(
    dag: Dag, max_given: int | None = None
) -> list[CiStatement]:
    """Minimal implied independencies restricted to observed variables."""
    return implied_independencies(dag, sorted(dag.observed, key=dag.nodes.index), max_given)
