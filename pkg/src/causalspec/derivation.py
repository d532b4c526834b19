"""Derive requirement artifacts, test-case specs, and monitor specs.

The rules turn graph findings into reviewable engineering statements:

R1  latent common cause on an open spurious path -> data coverage of the
    confounder acting without the exposure event
R2  observed common cause on an open spurious path -> data stratified over
    that variable's values
R3  sensor disturbance inputs -> data containing each channel's own noise
R4  model input set: observed sensors on directed exposure-outcome paths
    plus observed outcome parents that close spurious channels
R5  inputs linked to the exposure only through non-causal channels -> the
    model must not decide from such an input alone
R6  spurious path with no observed blocker -> demand observability

Text comes from fixed templates with variable slots so that output diffs
cleanly; the binding contract is (rule, evidence nodes), not the prose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from . import analysis, graph as g, implications
from .analysis import PathReport
from .dsl import ModelDocument
from .errors import RoleError
from .graph import Dag
from .implications import CiStatement

Evidence = Union[PathReport, CiStatement]


@dataclass(frozen=True)
class RequirementArtifact:
    id: str
    kind: str  # data | model | test_case
    rule: str  # R1..R6, T1 (outcome invariance), T2 (pairwise association)
    text: str
    evidence: tuple[Evidence, ...]
    traces: tuple[str, ...] = ()
    commentary: str = ""

    def __post_init__(self):
        if not self.evidence:
            raise ValueError(f"artifact {self.id}: evidence must be non-empty")


@dataclass(frozen=True)
class MonitorSpec:
    """Runtime check: the pair must stay uncorrelated while deployed."""

    statement: CiStatement
    window: int = 500
    threshold: float = 0.2
    consecutive: int = 3
    statistic: str = "pearson"  # or "spearman"

    def __post_init__(self):
        if self.window < 30:
            raise ValueError("monitor window must be at least 30 samples")
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("monitor threshold must lie in (0, 1)")
        if self.consecutive < 1:
            raise ValueError("monitor needs a positive consecutive-window count")
        if self.statistic not in ("pearson", "spearman"):
            raise ValueError(f"unknown statistic {self.statistic!r}")


# ---------------------------------------------------------------------------
# trace bookkeeping
# ---------------------------------------------------------------------------


def _trace_maps(doc: ModelDocument) -> tuple[dict[str, tuple[str, ...]], dict[tuple[str, str], tuple[str, ...]]]:
    nodes = {n.name: n.traces for n in doc.nodes}
    edges = {(e.src, e.dst): e.traces for e in doc.edges}
    return nodes, edges


def _evidence_traces(doc: ModelDocument | None, evidence: Iterable[Evidence]) -> tuple[str, ...]:
    if doc is None:
        return ()
    node_traces, edge_traces = _trace_maps(doc)
    found: set[str] = set()
    for ev in evidence:
        if isinstance(ev, PathReport):
            for n in ev.nodes:
                found.update(node_traces.get(n, ()))
            for a, b in zip(ev.nodes, ev.nodes[1:]):
                found.update(edge_traces.get((a, b), ()))
                found.update(edge_traces.get((b, a), ()))
        else:
            for n in (ev.x, ev.y, *ev.given):
                found.update(node_traces.get(n, ()))
    return tuple(sorted(found))


def _fork_node(report: PathReport) -> str | None:
    """The single node on an open spurious path with both arrows leaving it."""
    for i in range(1, len(report.nodes) - 1):
        if report.arrows[i - 1] == "<-" and report.arrows[i] == "->":
            return report.nodes[i]
    return None


# ---------------------------------------------------------------------------
# R1..R6
# ---------------------------------------------------------------------------


def derive_requirements(
    dag: Dag,
    doc: ModelDocument | None = None,
    exposure: str | None = None,
    outcome: str | None = None,
) -> list[RequirementArtifact]:
    """Apply R1..R6 and return data artifacts (RQ-D*) then model artifacts (RQ-M*)."""
    x, y = analysis._resolve_pair(dag, exposure, outcome)
    paths = analysis.classify_exposure_paths(dag, x, y)
    ex_desc = dag.descendants(x)
    outcome_parents = dag.parents(y)

    data: list[tuple[str, str, tuple[Evidence, ...], str]] = []  # rule, text, evidence, commentary

    # R1 / R2: one artifact per open spurious path, keyed on its fork node;
    # coverage demands (latent fork) come before stratification demands
    coverage: list[tuple[str, str, tuple[Evidence, ...], str]] = []
    stratify: list[tuple[str, str, tuple[Evidence, ...], str]] = []
    for report in paths.biasing:
        fork = _fork_node(report)
        if fork is None:
            continue  # pure reverse-causal path; nothing to collect data on
        fork_idx = report.nodes.index(fork)
        if fork not in dag.observed:
            tail = report.nodes[fork_idx + 1 :]
            sensors = [n for n in tail if n in dag.observed]
            sensor = sensors[0] if sensors else y
            text = f"Provide training cases where {fork} influences {sensor} and no {x} occurs."
            coverage.append(("R1", text, (report,), ""))
        else:
            text = f"Provide recordings of {x} occurring under several distinct values of {fork}."
            stratify.append(("R2", text, (report,), ""))
    data.extend(coverage)
    data.extend(stratify)

    # R3: disturbances feeding observed sensors, aggregated into one artifact
    if doc is not None:
        noise_edges = sorted(
            (e.src, e.dst)
            for e in doc.edges
            if doc.node(e.src).role == "disturbance" and e.dst in dag.observed
        )
        noise_reports = [
            PathReport((src, dst), ("->",), (), True, analysis.PATH_CAUSAL)
            for src, dst in noise_edges
        ]
        if noise_reports:
            pairs = ", ".join(f"{r.nodes[0]} -> {r.nodes[1]}" for r in noise_reports)
            text = f"Training data shall include the measurement noise each sensor produces on its own ({pairs})."
            data.append(("R3", text, tuple(noise_reports), ""))

    # R6: spurious paths with no observed valid blocker
    for gap in analysis.observability_gap_reports(dag, x, y):
        matching = [r for r in paths.biasing if r.nodes == gap.path]
        needs = ", ".join(gap.latent_blockers) if gap.latent_blockers else "a new variable"
        text = f"Provide a way to observe {needs}; the spurious channel {gap.rendered} cannot be closed with the current sensors."
        data.append(("R6", text, tuple(matching), ""))

    # model inputs: observed nodes inside directed paths, plus observed
    # outcome parents that block a spurious path
    causal_inner: list[str] = []
    for report in paths.causal:
        for n in report.nodes[1:-1]:
            if n in dag.observed and n not in causal_inner:
                causal_inner.append(n)
    blockers: list[str] = []
    blocker_evidence: list[PathReport] = []
    for report in paths.biasing:
        for n in report.blockers:
            if n in dag.observed and n not in ex_desc and n in outcome_parents:
                if n not in blockers:
                    blockers.append(n)
                blocker_evidence.append(report)
    inputs = sorted(set(causal_inner) | set(blockers))

    model: list[tuple[str, str, tuple[Evidence, ...], str]] = []

    # R5 before R4 so prohibition artifacts precede the input-set artifact
    for s in inputs:
        if s in ex_desc or x in dag.descendants(s):
            continue  # a directed route exists; the association is causal
        through = tuple(r for r in paths.biasing if s in r.nodes)
        if not through:
            continue
        text = f"The model shall not decide {x} from {s} alone; every open channel between {s} and {x} is non-causal."
        commentary = (
            f"An input like {s} only matters when causes reaching {y} through it must be "
            f"told apart from causes that do not; otherwise it can be dropped."
        )
        model.append(("R5", text, through, commentary))

    if inputs:
        evidence: tuple[Evidence, ...] = tuple(paths.causal) + tuple(
            dict.fromkeys(blocker_evidence)
        )
        text = (
            f"The model shall accept {', '.join(inputs)} as inputs: the observed sensors on "
            f"directed {x}-to-{y} paths plus the outcome-side covariates that close spurious channels."
        )
        model.append(("R4", text, evidence, ""))

    artifacts: list[RequirementArtifact] = []
    for i, (rule, text, evidence, commentary) in enumerate(data, start=1):
        artifacts.append(
            RequirementArtifact(
                f"RQ-D{i}", "data", rule, text, evidence, _evidence_traces(doc, evidence), commentary
            )
        )
    for i, (rule, text, evidence, commentary) in enumerate(model, start=1):
        artifacts.append(
            RequirementArtifact(
                f"RQ-M{i}", "model", rule, text, evidence, _evidence_traces(doc, evidence), commentary
            )
        )
    return artifacts


def controllable_nodes(dag: Dag, doc: ModelDocument | None = None) -> set[str]:
    """Nodes a test bench can force: roots by default, DSL flag overrides."""
    ctrl = set(dag.roots())
    if doc is not None:
        for n in doc.nodes:
            if n.controllable is True:
                ctrl.add(n.name)
            elif n.controllable is False:
                ctrl.discard(n.name)
    return ctrl


def derive_test_cases(
    dag: Dag,
    exposure: str | None = None,
    outcome: str | None = None,
    doc: ModelDocument | None = None,
    max_given: int | None = None,
) -> list[RequirementArtifact]:
    """Test specs from observed-scope implied independencies.

    A statement becomes a test when its pair contains a controllable
    variable.  If the pair contains the outcome, the test varies the
    controllable member and asserts the outcome's conditional behaviour is
    unchanged; otherwise it asserts no association between the pair.
    """
    x, y = analysis._resolve_pair(dag, exposure, outcome)
    if len(dag.observed) < 2:
        return []
    ctrl = controllable_nodes(dag, doc)
    out: list[RequirementArtifact] = []
    idx = 1
    for st in implications.observable_independencies(dag, max_given):
        movable = [n for n in (st.x, st.y) if n in ctrl and n != y]
        if not movable:
            continue
        c = movable[0]
        other = st.y if st.x == c else st.x
        if other == y:
            held = ", ".join(st.given) if st.given else "the model's inputs"
            text = (
                f"Force {c} to several distinct levels while keeping the acquisition of "
                f"{held} unchanged; the behaviour of {y} must stay the same at every level."
            )
            rule = "T1"
        else:
            text = f"Collect {other} while forcing {c} across its range; {other} and {c} must show no association."
            rule = "T2"
        out.append(
            RequirementArtifact(
                f"TC-{idx}", "test_case", rule, text, (st,), _evidence_traces(doc, (st,))
            )
        )
        idx += 1
    return out


def derive_monitors(
    dag: Dag,
    window: int = 500,
    threshold: float = 0.2,
    consecutive: int = 3,
    include_stratified: bool = True,
    max_given: int | None = None,
) -> list[MonitorSpec]:
    """Monitors for implied independencies checkable on the runtime stream.

    Marginal statements (empty conditioning set) are always monitorable;
    statements with one observed conditioner become stratified monitors
    when ``include_stratified`` is set.  Larger conditioning sets are left
    to offline testing.
    """
    if len(dag.observed) < 2:
        return []
    out = []
    for st in implications.observable_independencies(dag, max_given):
        if len(st.given) == 0 or (include_stratified and len(st.given) == 1):
            out.append(MonitorSpec(st, window, threshold, consecutive))
    return out
