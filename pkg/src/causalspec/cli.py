"""Command-line entry point for the causal-spec toolkit.

Exit codes: 0 on success, 1 on analysis findings that fail a strict gate
(cycles, observability gaps, rejected statements, alarms), 2 on usage or
parse errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import analysis, citest as citest_mod, derivation, dsl, implications as impl_mod
from . import monitor as monitor_mod, report, scm as scm_mod
from .errors import CausalSpecError, CycleError, ParseError
from .graph import Dag, d_separated


def _fail_usage(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _load_document(path: str) -> dsl.ModelDocument:
    p = Path(path)
    if not p.exists():
        _fail_usage(f"no such file: {path}")
    try:
        return dsl.load(p.read_text(encoding="utf-8"))
    except ParseError as exc:
        _fail_usage(f"{path}: {exc}")
    raise AssertionError("unreachable")


def _build_dag(doc: dsl.ModelDocument) -> Dag:
    try:
        return Dag.from_document(doc)
    except CycleError as exc:
        click.echo(str(exc))
        sys.exit(1)


def _split(value: str | None) -> list[str]:
    if not value:
        return []
    return [v.strip() for v in value.split(",") if v.strip()]


@click.group()
def main() -> None:
    """Turn a declared causal model into verifiable requirement artifacts."""


@main.command()
@click.argument("model", type=click.Path())
@click.option("--strict", is_flag=True, help="Exit 1 when observability gaps exist.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
def validate(model: str, strict: bool, as_json: bool) -> None:
    """Parse a model, check acyclicity, and report structure findings."""
    doc = _load_document(model)
    dag = _build_dag(doc)
    x, y = dag.exposure(), dag.outcome()
    gaps = []
    if x is not None and y is not None:
        gaps = analysis.observability_gap_reports(dag, x, y)
    summary = doc.summary()
    if as_json:
        obj = {
            "model": doc.name,
            "acyclic": True,
            "summary": summary,
            "exposure": x,
            "outcome": y,
            "observability_gaps": [report.gap_obj(g) for g in gaps],
        }
        click.echo(report.canonical_json(obj), nl=False)
    else:
        click.echo(f"model {doc.name}: ok")
        click.echo(
            f"nodes: {summary['nodes']} ({summary['raw_nodes']} raw), "
            f"edges: {summary['edges']} ({summary['raw_edges']} raw)"
        )
        click.echo(f"exposure: {x or '-'}, outcome: {y or '-'}")
        for gap in gaps:
            needs = ", ".join(gap.latent_blockers) or "none available"
            click.echo(f"observability gap: {gap.rendered} (latent blockers: {needs})")
        if not gaps:
            click.echo("observability gaps: none")
    if strict and gaps:
        sys.exit(1)


@main.command()
@click.argument("model", type=click.Path())
@click.option("--max-given", type=int, default=None, help="Cap on conditioning-set size.")
@click.option("--json", "as_json", is_flag=True)
def analyze(model: str, max_given: int | None, as_json: bool) -> None:
    """Full workflow: paths, adjustment, implications, requirements, monitors."""
    doc = _load_document(model)
    _build_dag(doc)
    obj = report.analysis_report(doc, max_given)
    if as_json:
        click.echo(report.canonical_json(obj), nl=False)
        return
    click.echo(f"model {obj['model']}")
    if obj["paths"] is None:
        click.echo("no exposure/outcome roles declared; nothing to analyze")
        return
    counts = obj["paths"]["counts"]
    click.echo(
        f"paths: {counts['causal']} causal, {counts['biasing']} biasing, "
        f"{counts['blocked']} blocked"
    )
    for kind in ("causal", "biasing", "blocked"):
        for p in obj["paths"][kind]:
            click.echo(f"  [{kind}] {p['rendered']}")
    sets = obj["adjustment"]["minimal_sets"]
    if sets:
        for s in sets:
            click.echo(f"adjustment set: {{{', '.join(s['members'])}}}")
    else:
        click.echo("adjustment set: none over observed candidates")
    for gap in obj["validation"]["observability_gaps"]:
        click.echo(f"observability gap: {gap['rendered']}")
    click.echo("implied independencies:")
    for st in obj["implications"]:
        click.echo(f"  {st['rendered']}")
    click.echo("requirements:")
    for a in obj["requirements"] + obj["test_cases"]:
        click.echo(f"  {a['id']} [{a['rule']}] {a['text']}")
    for m in obj["monitors"]:
        click.echo(
            f"  {m['id']} monitor {m['statement']['rendered']} "
            f"(window {m['window']}, threshold {m['threshold']:g})"
        )


@main.command()
@click.argument("model", type=click.Path())
@click.argument("x")
@click.argument("y")
@click.option("--given", default="", help="Comma-separated conditioning set.")
def dsep(model: str, x: str, y: str, given: str) -> None:
    """Answer one d-separation query."""
    doc = _load_document(model)
    dag = _build_dag(doc)
    try:
        sep = d_separated(dag, x, y, _split(given))
    except (CausalSpecError, ValueError) as exc:
        _fail_usage(str(exc))
        return
    click.echo(f"d-separated: {'true' if sep else 'false'}")


@main.command()
@click.argument("model", type=click.Path())
@click.argument("x")
@click.argument("y")
@click.option("--json", "as_json", is_flag=True)
def paths(model: str, x: str, y: str, as_json: bool) -> None:
    """List every simple path between two nodes with its classification."""
    doc = _load_document(model)
    dag = _build_dag(doc)
    try:
        reports = analysis.enumerate_paths(dag, x, y)
    except CausalSpecError as exc:
        _fail_usage(str(exc))
        return
    if as_json:
        click.echo(report.canonical_json([report.path_obj(r) for r in reports]), nl=False)
        return
    for r in reports:
        click.echo(f"[{r.kind}] {r.render()}")
    if not reports:
        click.echo("no paths")


@main.command()
@click.argument("model", type=click.Path())
@click.option("--exposure", default=None)
@click.option("--outcome", default=None)
@click.option("--candidates", default=None, help="Comma-separated candidate pool.")
@click.option("--json", "as_json", is_flag=True)
def adjust(model: str, exposure: str | None, outcome: str | None, candidates: str | None, as_json: bool) -> None:
    """Minimal back-door adjustment sets over observed (or given) candidates."""
    doc = _load_document(model)
    dag = _build_dag(doc)
    try:
        sets = analysis.backdoor_sets(dag, exposure, outcome, _split(candidates) or None)
    except (CausalSpecError, ValueError) as exc:
        _fail_usage(str(exc))
        return
    if as_json:
        click.echo(report.canonical_json([report.adjustment_obj(s) for s in sets]), nl=False)
        return
    if not sets:
        click.echo("no valid adjustment set")
    for s in sets:
        click.echo(s.render())


@main.command()
@click.argument("model", type=click.Path())
@click.option("--scope", default=None, help="Comma-separated scope (default: observed + exposure).")
@click.option("--max-given", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
def implications(model: str, scope: str | None, max_given: int | None, as_json: bool) -> None:
    """Minimal implied conditional-independence statements."""
    doc = _load_document(model)
    dag = _build_dag(doc)
    names = _split(scope) or report.runtime_scope(dag)
    try:
        stmts = impl_mod.implied_independencies(dag, names, max_given)
    except (CausalSpecError, ValueError) as exc:
        _fail_usage(str(exc))
        return
    if as_json:
        click.echo(report.canonical_json([report.ci_obj(s) for s in stmts]), nl=False)
        return
    for s in stmts:
        click.echo(s.render())


@main.command()
@click.argument("model", type=click.Path())
@click.option("--exposure", default=None)
@click.option("--outcome", default=None)
@click.option("--json", "as_json", is_flag=True)
def requirements(model: str, exposure: str | None, outcome: str | None, as_json: bool) -> None:
    """Derive data/model requirements, test cases, and monitor specs."""
    doc = _load_document(model)
    dag = _build_dag(doc)
    try:
        artifacts = derivation.derive_requirements(dag, doc, exposure, outcome)
        tests = derivation.derive_test_cases(dag, exposure, outcome, doc)
        monitors = derivation.derive_monitors(dag)
    except CausalSpecError as exc:
        _fail_usage(str(exc))
        return
    if as_json:
        obj = {
            "requirements": [report.artifact_obj(a) for a in artifacts],
            "test_cases": [report.artifact_obj(a) for a in tests],
            "monitors": [report.monitor_obj(m, f"MON-{i + 1}") for i, m in enumerate(monitors)],
        }
        click.echo(report.canonical_json(obj), nl=False)
        return
    click.echo(report.requirements_markdown(artifacts, tests, monitors), nl=False)


@main.command()
@click.argument("model", type=click.Path())
@click.option("-n", "--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None, help="CSV file (default stdout).")
def simulate(model: str, samples: int, seed: int, output: str | None) -> None:
    """Sample a dataset from the model's structural-equation blocks."""
    doc = _load_document(model)
    _build_dag(doc)
    try:
        spec = scm_mod.from_document(doc)
        data = scm_mod.sample(spec, samples, seed)
    except CausalSpecError as exc:
        _fail_usage(str(exc))
        return
    text = scm_mod.to_csv(data)
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"wrote {samples} samples to {output}", err=True)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("model", type=click.Path())
@click.argument("data", type=click.Path())
@click.option("--x", "x", default=None, help="Test a single pair instead of all implications.")
@click.option("--y", "y", default=None)
@click.option("--given", default="")
@click.option("--alpha", type=float, default=0.01, show_default=True)
@click.option("--method", type=click.Choice(["auto", "fisher_z", "g_test"]), default="auto")
@click.option("--scope", default=None, help="Comma-separated scope for implied statements.")
@click.option("--strict", is_flag=True, help="Exit 1 when any statement is rejected.")
@click.option("--json", "as_json", is_flag=True)
def citest(model, data, x, y, given, alpha, method, scope, strict, as_json) -> None:
    """Test implied independencies (or one statement) against a CSV dataset."""
    doc = _load_document(model)
    dag = _build_dag(doc)
    p = Path(data)
    if not p.exists():
        _fail_usage(f"no such file: {data}")
    try:
        dataset = scm_mod.from_csv(p.read_text(encoding="utf-8"))
    except ValueError as exc:
        _fail_usage(f"{data}: {exc}")
        return
    try:
        if x or y:
            if not (x and y):
                _fail_usage("--x and --y must be given together")
            st = impl_mod.make_statement(x, y, _split(given))
            results = [citest_mod.ci_test(dataset, st, alpha, method)]
        else:
            names = _split(scope) or None
            results = citest_mod.validate_model(dag, dataset, names, alpha, method=method)
    except CausalSpecError as exc:
        _fail_usage(str(exc))
        return
    if as_json:
        click.echo(report.canonical_json([report.citest_obj(r) for r in results]), nl=False)
    else:
        for line in report.validation_lines(results):
            click.echo(line)
    if strict and citest_mod.violation_count(results):
        sys.exit(1)


@main.command()
@click.argument("model", type=click.Path())
@click.argument("stream", type=click.Path(), required=False)
@click.option("--window", type=int, default=500, show_default=True)
@click.option("--threshold", type=float, default=0.2, show_default=True)
@click.option("--consecutive", type=int, default=3, show_default=True)
@click.option("--spearman", is_flag=True, help="Rank correlation instead of Pearson.")
@click.option("--strict", is_flag=True, help="Exit 1 when any alarm fires.")
def monitor(model, stream, window, threshold, consecutive, spearman, strict) -> None:
    """Run the model's derived monitors over a CSV stream (file or stdin).

    Alarms are written to stdout as newline-delimited JSON.
    """
    doc = _load_document(model)
    dag = _build_dag(doc)
    stat = "spearman" if spearman else "pearson"
    specs = [
        derivation.MonitorSpec(m.statement, window, threshold, consecutive, stat)
        for m in derivation.derive_monitors(dag)
    ]
    if not specs:
        click.echo("no monitorable implications", err=True)
        return
    if stream:
        p = Path(stream)
        if not p.exists():
            _fail_usage(f"no such file: {stream}")
        text = p.read_text(encoding="utf-8")
    else:
        text = sys.stdin.read()
    try:
        dataset = scm_mod.from_csv(text)
    except ValueError as exc:
        _fail_usage(f"stream: {exc}")
        return
    try:
        result = monitor_mod.run_stream(specs, monitor_mod.dataset_samples(dataset))
    except CausalSpecError as exc:
        _fail_usage(str(exc))
        return
    for alarm in result.alarms:
        click.echo(
            json.dumps(
                {
                    "monitor": alarm.monitor_id,
                    "window": alarm.window_index,
                    "statistic": alarm.statistic,
                    "threshold": alarm.threshold,
                    "message": alarm.message,
                },
                sort_keys=True,
            )
        )
    click.echo(
        f"{result.samples} samples, {len(result.windows)} windows, {len(result.alarms)} alarms",
        err=True,
    )
    if strict and result.alarms:
        sys.exit(1)


@main.command()
@click.argument("model", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["dot", "json"]), default="dot", show_default=True)
def export(model: str, fmt: str) -> None:
    """Export the model as Graphviz DOT or canonical JSON."""
    doc = _load_document(model)
    _build_dag(doc)
    if fmt == "dot":
        click.echo(report.to_dot(doc), nl=False)
    else:
        click.echo(dsl.to_json(doc), nl=False)


@main.command()
@click.option("--port", type=int, default=8321, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--model-dir",
    type=click.Path(file_okay=False),
    default=".",
    show_default=True,
    help="Directory holding one .cdag file per model.",
)
def serve(port: int, host: str, model_dir: str) -> None:
    """Run the local HTTP analysis service (loopback by default)."""
    import uvicorn

    from .service import create_app

    if host not in ("127.0.0.1", "localhost", "::1"):
        click.echo(
            f"warning: binding to {host} exposes the service beyond this machine; "
            "it has no authentication",
            err=True,
        )
    app = create_app(Path(model_dir))
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
