"""Exposure/outcome analyses: path classification, adjustment, instruments.

Everything here is purely graphical.  The functions take a Dag whose roles
mark one exposure and one outcome (or take the names explicitly) and return
frozen report dataclasses.  Paths are always listed in lexicographic order
of their node sequences, so reports are stable across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from . import graph as g
from .errors import RoleError
from .graph import Dag

PATH_CAUSAL = "causal"
PATH_BIASING = "biasing"
PATH_BLOCKED = "blocked"

ROLE_CHAIN = "chain"
ROLE_FORK = "fork"
ROLE_COLLIDER = "collider"


@dataclass(frozen=True)
class PathReport:
    """One simple path with per-inner-node roles and its unconditioned class.

    ``kind`` records the empty-conditioning-set classification: ``causal``
    for directed paths, ``biasing`` for open non-directed paths, and
    ``blocked`` for paths that a collider already closes.
    """

    nodes: tuple[str, ...]
    arrows: tuple[str, ...]
    inner_roles: tuple[str, ...]
    directed: bool
    kind: str

    def __post_init__(self):
        if len(self.inner_roles) != max(len(self.nodes) - 2, 0):
            raise ValueError("one inner role per inner node required")

    @property
    def colliders(self) -> tuple[str, ...]:
        return tuple(
            n for n, r in zip(self.nodes[1:-1], self.inner_roles) if r == ROLE_COLLIDER
        )

    @property
    def blockers(self) -> tuple[str, ...]:
        """Inner non-colliders: conditioning on any of them blocks this path."""
        return tuple(
            n for n, r in zip(self.nodes[1:-1], self.inner_roles) if r != ROLE_COLLIDER
        )

    def status(self, dag: Dag, given: Iterable[str] = ()) -> str:
        return "open" if g.path_is_active(dag, self.nodes, given) else "blocked"

    def render(self) -> str:
        parts = [self.nodes[0]]
        for arrow, node in zip(self.arrows, self.nodes[1:]):
            parts.append(arrow)
            parts.append(node)
        return " ".join(parts)


def _inner_roles(arrows: tuple[str, ...]) -> tuple[str, ...]:
    roles = []
    for left, right in zip(arrows, arrows[1:]):
        if left == "->" and right == "<-":
            roles.append(ROLE_COLLIDER)
        elif left == "<-" and right == "->":
            roles.append(ROLE_FORK)
        else:
            roles.append(ROLE_CHAIN)
    return tuple(roles)


def _report(dag: Dag, path: tuple[str, ...]) -> PathReport:
    arrows = g.path_arrows(dag, path)
    roles = _inner_roles(arrows)
    directed = all(a == "->" for a in arrows)
    if directed:
        kind = PATH_CAUSAL
    elif g.path_is_active(dag, path, ()):
        kind = PATH_BIASING
    else:
        kind = PATH_BLOCKED
    return PathReport(path, arrows, roles, directed, kind)


def enumerate_paths(
    dag: Dag, x: str, y: str, limit: int = g.DEFAULT_PATH_LIMIT
) -> list[PathReport]:
    """Every simple path between two nodes, with inner-node roles."""
    return [_report(dag, p) for p in g.simple_paths(dag, x, y, limit)]


@dataclass(frozen=True)
class PathAnalysis:
    exposure: str
    outcome: str
    reports: tuple[PathReport, ...]

    def of_kind(self, kind: str) -> tuple[PathReport, ...]:
        return tuple(r for r in self.reports if r.kind == kind)

    @property
    def causal(self) -> tuple[PathReport, ...]:
        return self.of_kind(PATH_CAUSAL)

    @property
    def biasing(self) -> tuple[PathReport, ...]:
        return self.of_kind(PATH_BIASING)

    @property
    def blocked(self) -> tuple[PathReport, ...]:
        return self.of_kind(PATH_BLOCKED)

    def counts(self) -> dict[str, int]:
        return {
            PATH_CAUSAL: len(self.causal),
            PATH_BIASING: len(self.biasing),
            PATH_BLOCKED: len(self.blocked),
        }


@dataclass(frozen=True)
class AdjustmentSet:
    members: tuple[str, ...]
    minimal: bool = True

    def render(self) -> str:
        return "{" + ", ".join(self.members) + "}"


@dataclass(frozen=True)
class ObservabilityGap:
    """A biasing path that no observed covariate can legally block.

    ``latent_blockers`` lists the latent nodes that would do the job if a
    sensor were added for them; an empty tuple means the path has no valid
    single-node blocker at all.
    """

    path: tuple[str, ...]
    rendered: str
    latent_blockers: tuple[str, ...]


def _resolve_pair(dag: Dag, exposure: str | None, outcome: str | None) -> tuple[str, str]:
    x = exposure or dag.exposure()
    y = outcome or dag.outcome()
    if x is None:
        raise RoleError("no exposure node declared and none given")
    if y is None:
        raise RoleError("no outcome node declared and none given")
    dag._check(x)
    dag._check(y)
    if x == y:
        raise RoleError("exposure and outcome must differ")
    return x, y


def classify_exposure_paths(
    dag: Dag,
    exposure: str | None = None,
    outcome: str | None = None,
    limit: int = g.DEFAULT_PATH_LIMIT,
) -> PathAnalysis:
    """Classify every simple exposure-outcome path.

    causal   -- every step follows the arrows (a directed path)
    biasing  -- non-causal but active with an empty conditioning set
    blocked  -- non-causal and already inactive (contains a collider)
    """
    x, y = _resolve_pair(dag, exposure, outcome)
    return PathAnalysis(x, y, tuple(enumerate_paths(dag, x, y, limit)))


def _candidate_pool(
    dag: Dag, x: str, y: str, candidates: Iterable[str] | None
) -> list[str]:
    if candidates is None:
        pool = [n for n in dag.nodes if n in dag.observed and n not in (x, y)]
    else:
        pool = []
        order = {n: i for i, n in enumerate(dag.nodes)}
        for n in candidates:
            dag._check(n)
            if n in (x, y):
                raise ValueError(f"candidate set must exclude exposure/outcome, got {n!r}")
            pool.append(n)
        pool.sort(key=order.__getitem__)
    return pool


def backdoor_sets(
    dag: Dag,
    exposure: str | None = None,
    outcome: str | None = None,
    candidates: Iterable[str] | None = None,
    max_size: int | None = None,
) -> list[AdjustmentSet]:
    """All minimal candidate subsets satisfying the back-door criterion.

    A set qualifies when it contains no descendant of the exposure and
    blocks every path that enters the exposure through its back door
    (equivalently: separates exposure and outcome once the exposure's
    outgoing edges are removed).  Candidates default to the observed
    nodes.  Results are sorted smallest first, then lexicographically.
    """
    x, y = _resolve_pair(dag, exposure, outcome)
    pool = [n for n in _candidate_pool(dag, x, y, candidates) if n not in dag.descendants(x)]
    back = dag.without_outgoing([x])
    top = len(pool) if max_size is None else min(max_size, len(pool))
    found: list[tuple[str, ...]] = []
    for size in range(top + 1):
        for combo in itertools.combinations(pool, size):
            chosen = set(combo)
            if any(set(prev) <= chosen for prev in found):
                continue  # a subset already qualifies; not minimal
            if g.d_separated(back, x, y, chosen):
                found.append(tuple(sorted(combo)))
    found.sort(key=lambda s: (len(s), s))
    return [AdjustmentSet(members, True) for members in found]


def minimal_backdoor_set(
    dag: Dag,
    exposure: str | None = None,
    outcome: str | None = None,
    candidates: Iterable[str] | None = None,
) -> tuple[str, ...] | None:
    """Smallest minimal back-door set, or None when no set qualifies."""
    sets = backdoor_sets(dag, exposure, outcome, candidates)
    return sets[0].members if sets else None


def find_instruments(
    dag: Dag,
    exposure: str | None = None,
    outcome: str | None = None,
    candidates: Iterable[str] | None = None,
) -> set[str]:
    """Candidates usable to instrument the exposure-outcome effect.

    A candidate qualifies when it is d-connected to the exposure, is not a
    descendant of the exposure, and is d-separated from the outcome once
    the exposure's outgoing edges are removed (all with an empty
    conditioning set): its only route to the outcome runs through the
    exposure.
    """
    x, y = _resolve_pair(dag, exposure, outcome)
    pool = _candidate_pool(dag, x, y, candidates)
    cut = dag.without_outgoing([x])
    ex_desc = dag.descendants(x)
    out = set()
    for n in pool:
        if n in ex_desc:
            continue
        if g.d_separated(dag, n, x, ()):
            continue
        if not g.d_separated(cut, n, y, ()):
            continue
        out.add(n)
    return out


def observability_gap_reports(
    dag: Dag,
    exposure: str | None = None,
    outcome: str | None = None,
    limit: int = g.DEFAULT_PATH_LIMIT,
) -> list[ObservabilityGap]:
    """Biasing paths that the observed vocabulary cannot block.

    A path's valid blockers are its inner non-collider nodes that are not
    descendants of the exposure (conditioning on an exposure descendant is
    off-limits for adjustment).  When no valid blocker is observed, the
    path is reported with the latent nodes that would close it.
    """
    x, y = _resolve_pair(dag, exposure, outcome)
    ex_desc = dag.descendants(x)
    gaps = []
    for report in classify_exposure_paths(dag, x, y, limit).biasing:
        valid = [n for n in report.blockers if n not in ex_desc]
        if any(n in dag.observed for n in valid):
            continue
        gaps.append(
            ObservabilityGap(
                path=report.nodes,
                rendered=report.render(),
                latent_blockers=tuple(n for n in valid if n not in dag.observed),
            )
        )
    return gaps


def observability_gaps(
    dag: Dag,
    exposure: str | None = None,
    outcome: str | None = None,
    limit: int = g.DEFAULT_PATH_LIMIT,
) -> set[str]:
    """Latent variables whose observation would close otherwise unblockable paths."""
    out: set[str] = set()
    for gap in observability_gap_reports(dag, exposure, outcome, limit):
        out.update(gap.latent_blockers)
    return out
