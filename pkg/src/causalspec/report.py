"""Rendering: DOT export, JSON report objects, and markdown summaries.

The CLI and the HTTP service both funnel through these builders so that
identical queries on identical models produce byte-identical JSON.
"""

from __future__ import annotations

import json
from typing import Any

from . import analysis, citest, derivation, implications
from .analysis import AdjustmentSet, ObservabilityGap, PathReport
from .citest import CiTestResult
from .derivation import MonitorSpec, RequirementArtifact
from .dsl import ModelDocument
from .graph import Dag
from .implications import CiStatement

_EDGE_PALETTE = (
    "#1b7837",
    "#2166ac",
    "#d6604d",
    "#762a83",
    "#b35806",
    "#00796b",
    "#c51b7d",
    "#4d4d4d",
)


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(doc: ModelDocument) -> str:
    """Graphviz rendering: latent nodes gray, observed white, edges colored
    by mechanism tag."""
    lines = [
        f"digraph {_dot_quote(doc.name)} {{",
        "  rankdir=LR;",
        "  node [shape=ellipse, style=filled];",
    ]
    for n in doc.nodes:
        fill = "gray85" if n.kind == "latent" else "white"
        attrs = [f'fillcolor="{fill}"']
        if n.label:
            attrs.append(f"tooltip={_dot_quote(n.label)}")
        if n.role in ("exposure", "outcome"):
            attrs.append("penwidth=2")
        lines.append(f'  {_dot_quote(n.name)} [{", ".join(attrs)}];')
    tags: dict[str, str] = {}
    for e in doc.edges:
        attrs = []
        if e.mechanism_tag:
            if e.mechanism_tag not in tags:
                tags[e.mechanism_tag] = _EDGE_PALETTE[len(tags) % len(_EDGE_PALETTE)]
            attrs.append(f'color="{tags[e.mechanism_tag]}"')
            attrs.append(f"label={_dot_quote(e.mechanism_tag)}")
        suffix = f' [{", ".join(attrs)}]' if attrs else ""
        lines.append(f"  {_dot_quote(e.src)} -> {_dot_quote(e.dst)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON object builders
# ---------------------------------------------------------------------------


def path_obj(r: PathReport) -> dict:
    return {
        "nodes": list(r.nodes),
        "arrows": list(r.arrows),
        "inner_roles": list(r.inner_roles),
        "directed": r.directed,
        "kind": r.kind,
        "colliders": list(r.colliders),
        "blockers": list(r.blockers),
        "rendered": r.render(),
    }


def ci_obj(st: CiStatement) -> dict:
    return {
        "x": st.x,
        "y": st.y,
        "given": list(st.given),
        "provenance": st.provenance,
        "rendered": st.render(),
    }


def adjustment_obj(s: AdjustmentSet) -> dict:
    return {"members": list(s.members), "minimal": s.minimal}


def gap_obj(gap: ObservabilityGap) -> dict:
    return {
        "path": list(gap.path),
        "rendered": gap.rendered,
        "latent_blockers": list(gap.latent_blockers),
    }


def artifact_obj(a: RequirementArtifact) -> dict:
    evidence = []
    for ev in a.evidence:
        if isinstance(ev, PathReport):
            evidence.append({"type": "path", **path_obj(ev)})
        else:
            evidence.append({"type": "ci", **ci_obj(ev)})
    return {
        "id": a.id,
        "kind": a.kind,
        "rule": a.rule,
        "text": a.text,
        "evidence": evidence,
        "traces": list(a.traces),
        "commentary": a.commentary,
    }


def monitor_obj(spec: MonitorSpec, monitor_id: str) -> dict:
    return {
        "id": monitor_id,
        "statement": ci_obj(spec.statement),
        "window": spec.window,
        "threshold": spec.threshold,
        "consecutive": spec.consecutive,
        "statistic": spec.statistic,
    }


def citest_obj(r: CiTestResult) -> dict:
    return {
        "statement": ci_obj(r.statement),
        "statistic": r.statistic,
        "p_value": r.p_value,
        "rejected": r.rejected,
        "method": r.method,
        "alpha": r.alpha,
        "n": r.n,
    }


def runtime_scope(dag: Dag) -> list[str]:
    """Observed variables plus the exposure: where implications get checked."""
    scope = [n for n in dag.nodes if n in dag.observed]
    x = dag.exposure()
    if x is not None and x not in scope:
        scope.append(x)
        scope.sort(key=dag.nodes.index)
    return scope


def analysis_report(doc: ModelDocument, max_given: int | None = None) -> dict:
    """Full workflow output for one model, JSON-ready."""
    dag = Dag.from_document(doc)
    x = dag.exposure()
    y = dag.outcome()
    report: dict[str, Any] = {
        "model": doc.name,
        "validation": {
            "acyclic": True,
            "summary": doc.summary(),
            "exposure": x,
            "outcome": y,
            "observability_gaps": [],
        },
        "paths": None,
        "adjustment": None,
        "implications": [],
        "requirements": [],
        "test_cases": [],
        "monitors": [],
    }
    if x is None or y is None:
        return report

    paths = analysis.classify_exposure_paths(dag, x, y)
    gaps = analysis.observability_gap_reports(dag, x, y)
    report["validation"]["observability_gaps"] = [gap_obj(g) for g in gaps]
    report["paths"] = {
        "exposure": x,
        "outcome": y,
        "causal": [path_obj(r) for r in paths.causal],
        "biasing": [path_obj(r) for r in paths.biasing],
        "blocked": [path_obj(r) for r in paths.blocked],
        "counts": paths.counts(),
    }
    sets = analysis.backdoor_sets(dag, x, y)
    report["adjustment"] = {
        "candidates": "observed",
        "minimal_sets": [adjustment_obj(s) for s in sets],
    }
    scope = runtime_scope(dag)
    if len(scope) >= 2:
        report["implications"] = [
            ci_obj(st) for st in implications.implied_independencies(dag, scope, max_given)
        ]
    report["requirements"] = [
        artifact_obj(a) for a in derivation.derive_requirements(dag, doc, x, y)
    ]
    report["test_cases"] = [
        artifact_obj(a) for a in derivation.derive_test_cases(dag, x, y, doc)
    ]
    report["monitors"] = [
        monitor_obj(spec, f"MON-{i + 1}")
        for i, spec in enumerate(derivation.derive_monitors(dag))
    ]
    return report


# ---------------------------------------------------------------------------
# Markdown
# ---------------------------------------------------------------------------


def requirements_markdown(
    artifacts: list[RequirementArtifact],
    test_cases: list[RequirementArtifact] | None = None,
    monitors: list[MonitorSpec] | None = None,
) -> str:
    lines = ["# Derived requirements", ""]
    for a in artifacts:
        lines.append(f"## {a.id} ({a.kind}, rule {a.rule})")
        lines.append("")
        lines.append(a.text)
        if a.commentary:
            lines.append("")
            lines.append(f"*{a.commentary}*")
        lines.append("")
        for ev in a.evidence:
            rendered = ev.render()
            lines.append(f"- evidence: {rendered}")
        if a.traces:
            lines.append(f"- traces: {', '.join(a.traces)}")
        lines.append("")
    if test_cases:
        lines.append("# Test cases")
        lines.append("")
        for a in test_cases:
            lines.append(f"## {a.id} (rule {a.rule})")
            lines.append("")
            lines.append(a.text)
            lines.append("")
            for ev in a.evidence:
                lines.append(f"- evidence: {ev.render()}")
            lines.append("")
    if monitors:
        lines.append("# Runtime monitors")
        lines.append("")
        for i, m in enumerate(monitors):
            lines.append(
                f"- MON-{i + 1}: {m.statement.render()} "
                f"(window {m.window}, |corr| > {m.threshold:g}, {m.consecutive} consecutive)"
            )
        lines.append("")
    return "\n".join(lines)


def validation_lines(results: list[CiTestResult]) -> list[str]:
    lines = [r.render() for r in results]
    bad = citest.violation_count(results)
    lines.append(f"{len(results)} statements tested, {bad} rejected")
    return lines
