"""Parser and serializers for the ``.cdag`` causal-model description language.

A document declares named assumptions (the prior-knowledge record), nodes
with observability and role attributes, directed edges, and optional
structural-equation blocks used by the simulator.  The concrete syntax is
line-oriented and brace-delimited::

    model "motor" {
      assume PK2 "Mechanical faults of the fan can reduce the available airflow."
      node MechFault { kind: latent, traces: [PK2] }
      node Q { kind: latent, traces: [PK2], label: "Max. possible airflow" }
      edge MechFault -> Q { traces: [PK2], mechanism: "airflow" }
      disturbance U_T -> T_s { traces: [PK5] }   # latent noise node + edge
      scm Q { type: linear_gaussian, intercept: 0.0, weights: {MechFault: -1.5}, sd: 0.5 }
    }

Unknown attribute keys are rejected (strict mode): model files are contracts
and a typo must surface, not silently vanish.  JSON is the machine
interchange format; both formats round-trip to an equal document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import ParseError

NODE_KINDS = ("observed", "latent")
NODE_ROLES = ("exposure", "outcome", "covariate", "disturbance")

_KEYWORDS = frozenset({"model", "assume", "node", "edge", "disturbance", "scm"})


@dataclass(frozen=True)
class Assumption:
    tag: str
    text: str


@dataclass(frozen=True)
class NodeDecl:
    name: str
    kind: str = "observed"
    role: str = "covariate"
    traces: tuple[str, ...] = ()
    label: str | None = None
    controllable: bool | None = None


@dataclass(frozen=True)
class EdgeDecl:
    src: str
    dst: str
    traces: tuple[str, ...] = ()
    mechanism_tag: str | None = None


@dataclass(frozen=True)
class LinearGaussian:
    """value = intercept + sum(weights[p] * parent p) + Normal(0, noise_sd).

    Weights are stored sorted by parent name so documents compare equal
    regardless of the order a source file listed them in.
    """

    weights: tuple[tuple[str, float], ...] = ()
    intercept: float = 0.0
    noise_sd: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(sorted((str(k), float(v)) for k, v in self.weights)))


@dataclass(frozen=True)
class LogisticBinary:
    """value ~ Bernoulli(sigmoid(intercept + sum(weights[p] * parent p)))."""

    weights: tuple[tuple[str, float], ...] = ()
    intercept: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(sorted((str(k), float(v)) for k, v in self.weights)))


@dataclass(frozen=True)
class TableCpd:
    """Categorical node with an explicit conditional probability table.

    ``table`` has one row per combination of parent levels, in row-major
    order over ``given`` (leftmost parent varies slowest); each row holds a
    probability per entry of ``levels`` and must sum to 1 within 1e-9.
    """

    given: tuple[str, ...] = ()
    levels: tuple[int, ...] = (0, 1)
    table: tuple[tuple[float, ...], ...] = ((0.5, 0.5),)


Mechanism = Union[LinearGaussian, LogisticBinary, TableCpd]


@dataclass(frozen=True)
class ModelDocument:
    name: str
    assumptions: tuple[Assumption, ...] = ()
    nodes: tuple[NodeDecl, ...] = ()
    edges: tuple[EdgeDecl, ...] = ()
    mechanisms: tuple[tuple[str, Mechanism], ...] = ()

    def __post_init__(self):
        # mechanism order carries no meaning; store it sorted by node name
        # so documents built from maps compare equal
        object.__setattr__(self, "mechanisms", tuple(sorted(self.mechanisms, key=lambda kv: kv[0])))

    def node(self, name: str) -> NodeDecl:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def node_names(self) -> list[str]:
        return [n.name for n in self.nodes]

    def assumption_tags(self) -> list[str]:
        return [a.tag for a in self.assumptions]

    def exposure(self) -> str | None:
        for n in self.nodes:
            if n.role == "exposure":
                return n.name
        return None

    def outcome(self) -> str | None:
        for n in self.nodes:
            if n.role == "outcome":
                return n.name
        return None

    def mechanism_map(self) -> dict[str, Mechanism]:
        return dict(self.mechanisms)

    def summary(self) -> dict[str, int]:
        """Statement-level counts matching the fixture file's grouping.

        Disturbance nodes sharing a display label collapse into one entry
        (the figure convention draws the noise family once), and their
        edges are not counted among the structural edges.
        """
        core = [n for n in self.nodes if n.role != "disturbance"]
        disturbances = [n for n in self.nodes if n.role == "disturbance"]
        groups = {(n.label or n.name) for n in disturbances}
        dist_names = {n.name for n in disturbances}
        core_edges = [e for e in self.edges if e.src not in dist_names]
        return {
            "nodes": len(core) + len(groups),
            "edges": len(core_edges),
            "raw_nodes": len(self.nodes),
            "raw_edges": len(self.edges),
        }


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_PUNCT = {"{", "}", "[", "]", ":", ","}


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | string | number | punct | arrow | eof
    value: str
    line: int
    column: int


def _tokenize(source: str) -> Iterator[_Token]:
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "-" and i + 1 < n and source[i + 1] == ">":
            yield _Token("arrow", "->", start_line, start_col)
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            yield _Token("punct", ch, start_line, start_col)
            i += 1
            col += 1
            continue
        if ch == '"':
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n or source[i] == "\n":
                    raise ParseError("unterminated string", start_line, start_col)
                c = source[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise ParseError("unterminated escape", line, col)
                    esc = source[i + 1]
                    buf.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    i += 2
                    col += 2
                    continue
                buf.append(c)
                i += 1
                col += 1
            yield _Token("string", "".join(buf), start_line, start_col)
            continue
        if ch.isdigit() or (ch in "+-" and i + 1 < n and (source[i + 1].isdigit() or source[i + 1] == ".")) or ch == ".":
            j = i
            if source[j] in "+-":
                j += 1
            while j < n and (source[j].isdigit() or source[j] in ".eE" or (source[j] in "+-" and source[j - 1] in "eE")):
                j += 1
            text = source[i:j]
            try:
                float(text)
            except ValueError:
                raise ParseError(f"malformed number {text!r}", start_line, start_col) from None
            yield _Token("number", text, start_line, start_col)
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            yield _Token("ident", source[i:j], start_line, start_col)
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", start_line, start_col)
    yield _Token("eof", "", line, col)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, source: str):
        self.tokens = list(_tokenize(source))
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, found {tok.value or tok.kind!r}", tok.line, tok.column)
        return tok

    def parse_document(self) -> ModelDocument:
        self.expect("ident", "model")
        name_tok = self.next()
        if name_tok.kind not in ("string", "ident"):
            raise ParseError("expected model name", name_tok.line, name_tok.column)
        self.expect("punct", "{")

        assumptions: list[Assumption] = []
        nodes: list[NodeDecl] = []
        edges: list[EdgeDecl] = []
        mechs: list[tuple[str, Mechanism]] = []
        decl_pos: dict[str, _Token] = {}

        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.value == "}":
                self.next()
                break
            if tok.kind != "ident":
                raise ParseError(f"expected declaration, found {tok.value or tok.kind!r}", tok.line, tok.column)
            if tok.value == "assume":
                self.next()
                tag = self.expect("ident")
                text = self.expect("string")
                if any(a.tag == tag.value for a in assumptions):
                    raise ParseError(f"duplicate assumption tag {tag.value!r}", tag.line, tag.column)
                assumptions.append(Assumption(tag.value, text.value))
            elif tok.value == "node":
                self.next()
                name = self._ident_token()
                attrs = self._attrs({"kind", "role", "traces", "label", "controllable"})
                if name.value in decl_pos:
                    raise ParseError(f"duplicate node {name.value!r}", name.line, name.column)
                decl_pos[name.value] = name
                nodes.append(self._node_decl(name, attrs))
            elif tok.value == "disturbance":
                self.next()
                name = self._ident_token()
                self.expect("arrow")
                target = self._ident_token()
                attrs = self._attrs({"traces", "label"})
                if name.value in decl_pos:
                    raise ParseError(f"duplicate node {name.value!r}", name.line, name.column)
                decl_pos[name.value] = name
                traces = self._trace_list(attrs)
                label = self._opt_str(attrs, "label")
                nodes.append(NodeDecl(name.value, kind="latent", role="disturbance", traces=traces, label=label))
                if target.value == name.value:
                    raise ParseError(f"self-loop edge on {name.value!r}", target.line, target.column)
                edges.append(EdgeDecl(name.value, target.value, traces=traces))
            elif tok.value == "edge":
                self.next()
                src = self._ident_token()
                self.expect("arrow")
                dst = self._ident_token()
                attrs = self._attrs({"traces", "mechanism"})
                if src.value == dst.value:
                    raise ParseError(f"self-loop edge on {src.value!r}", src.line, src.column)
                edges.append(
                    EdgeDecl(
                        src.value,
                        dst.value,
                        traces=self._trace_list(attrs),
                        mechanism_tag=self._opt_str(attrs, "mechanism"),
                    )
                )
            elif tok.value == "scm":
                self.next()
                name = self._ident_token()
                attrs = self._attrs({"type", "intercept", "weights", "sd", "given", "levels", "table"})
                if any(m[0] == name.value for m in mechs):
                    raise ParseError(f"duplicate scm block for {name.value!r}", name.line, name.column)
                mechs.append((name.value, self._mechanism(name, attrs)))
            else:
                raise ParseError(f"unknown declaration {tok.value!r}", tok.line, tok.column)

        self.expect("eof")
        doc = ModelDocument(name_tok.value, tuple(assumptions), tuple(nodes), tuple(edges), tuple(mechs))
        _validate(doc, decl_pos)
        return doc

    def _ident_token(self) -> _Token:
        tok = self.next()
        if tok.kind != "ident" or tok.value in _KEYWORDS:
            raise ParseError(f"expected identifier, found {tok.value or tok.kind!r}", tok.line, tok.column)
        return tok

    def _attrs(self, allowed: set[str]) -> dict[str, tuple[str, object]]:
        """Parse an optional ``{key: value, ...}`` block into tagged values."""
        tok = self.peek()
        if not (tok.kind == "punct" and tok.value == "{"):
            return {}
        self.next()
        out: dict[str, tuple[str, object]] = {}
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.value == "}":
                self.next()
                break
            key = self.next()
            if key.kind != "ident":
                raise ParseError(f"expected attribute key, found {key.value or key.kind!r}", key.line, key.column)
            if key.value not in allowed:
                raise ParseError(f"unknown attribute {key.value!r}", key.line, key.column)
            if key.value in out:
                raise ParseError(f"duplicate attribute {key.value!r}", key.line, key.column)
            self.expect("punct", ":")
            out[key.value] = self._value()
            tok = self.peek()
            if tok.kind == "punct" and tok.value == ",":
                self.next()
        return out

    def _value(self) -> tuple[str, object]:
        tok = self.peek()
        if tok.kind == "string":
            self.next()
            return ("string", tok.value)
        if tok.kind == "number":
            self.next()
            return ("number", float(tok.value))
        if tok.kind == "ident":
            self.next()
            if tok.value in ("true", "false"):
                return ("bool", tok.value == "true")
            return ("ident", tok.value)
        if tok.kind == "punct" and tok.value == "[":
            self.next()
            items: list[tuple[str, object]] = []
            while True:
                tok = self.peek()
                if tok.kind == "punct" and tok.value == "]":
                    self.next()
                    break
                items.append(self._value())
                tok = self.peek()
                if tok.kind == "punct" and tok.value == ",":
                    self.next()
            return ("list", items)
        if tok.kind == "punct" and tok.value == "{":
            self.next()
            entries: list[tuple[str, tuple[str, object]]] = []
            while True:
                tok = self.peek()
                if tok.kind == "punct" and tok.value == "}":
                    self.next()
                    break
                key = self.next()
                if key.kind != "ident":
                    raise ParseError(f"expected map key, found {key.value or key.kind!r}", key.line, key.column)
                self.expect("punct", ":")
                entries.append((key.value, self._value()))
                tok = self.peek()
                if tok.kind == "punct" and tok.value == ",":
                    self.next()
            return ("map", entries)
        raise ParseError(f"expected value, found {tok.value or tok.kind!r}", tok.line, tok.column)

    def _node_decl(self, name: _Token, attrs: dict[str, tuple[str, object]]) -> NodeDecl:
        kind = "observed"
        role = "covariate"
        if "kind" in attrs:
            tag, v = attrs["kind"]
            if tag != "ident" or v not in NODE_KINDS:
                raise ParseError(f"node {name.value!r}: kind must be one of {NODE_KINDS}", name.line, name.column)
            kind = str(v)
        if "role" in attrs:
            tag, v = attrs["role"]
            if tag != "ident" or v not in NODE_ROLES:
                raise ParseError(f"node {name.value!r}: role must be one of {NODE_ROLES}", name.line, name.column)
            role = str(v)
        controllable = None
        if "controllable" in attrs:
            tag, v = attrs["controllable"]
            if tag != "bool":
                raise ParseError(f"node {name.value!r}: controllable must be true/false", name.line, name.column)
            controllable = bool(v)
        if role == "disturbance" and kind == "observed":
            raise ParseError(f"node {name.value!r}: disturbance nodes are latent", name.line, name.column)
        return NodeDecl(
            name.value,
            kind=kind,
            role=role,
            traces=self._trace_list(attrs),
            label=self._opt_str(attrs, "label"),
            controllable=controllable,
        )

    def _trace_list(self, attrs: dict[str, tuple[str, object]]) -> tuple[str, ...]:
        if "traces" not in attrs:
            return ()
        tag, v = attrs["traces"]
        if tag != "list" or not all(t == "ident" for t, _ in v):  # type: ignore[union-attr]
            raise ParseError("traces must be a list of assumption tags")
        return tuple(str(x) for _, x in v)  # type: ignore[union-attr]

    def _opt_str(self, attrs: dict[str, tuple[str, object]], key: str) -> str | None:
        if key not in attrs:
            return None
        tag, v = attrs[key]
        if tag != "string":
            raise ParseError(f"{key} must be a quoted string")
        return str(v)

    def _weights(self, attrs: dict[str, tuple[str, object]]) -> tuple[tuple[str, float], ...]:
        if "weights" not in attrs:
            return ()
        tag, v = attrs["weights"]
        if tag != "map":
            raise ParseError("weights must be a {parent: number} map")
        out = []
        for key, (vt, vv) in v:  # type: ignore[union-attr]
            if vt != "number":
                raise ParseError(f"weight for {key!r} must be a number")
            out.append((key, float(vv)))
        return tuple(out)

    def _num(self, attrs: dict[str, tuple[str, object]], key: str, default: float) -> float:
        if key not in attrs:
            return default
        tag, v = attrs[key]
        if tag != "number":
            raise ParseError(f"{key} must be a number")
        return float(v)

    def _mechanism(self, name: _Token, attrs: dict[str, tuple[str, object]]) -> Mechanism:
        if "type" not in attrs:
            raise ParseError(f"scm {name.value!r}: missing type", name.line, name.column)
        tag, mtype = attrs["type"]
        if tag != "ident":
            raise ParseError(f"scm {name.value!r}: type must be an identifier", name.line, name.column)
        if mtype == "linear_gaussian":
            sd = self._num(attrs, "sd", 1.0)
            if sd <= 0:
                raise ParseError(f"scm {name.value!r}: sd must be positive", name.line, name.column)
            return LinearGaussian(self._weights(attrs), self._num(attrs, "intercept", 0.0), sd)
        if mtype == "logistic":
            return LogisticBinary(self._weights(attrs), self._num(attrs, "intercept", 0.0))
        if mtype == "cpd":
            given = ()
            if "given" in attrs:
                t, v = attrs["given"]
                if t != "list" or not all(it == "ident" for it, _ in v):  # type: ignore[union-attr]
                    raise ParseError(f"scm {name.value!r}: given must be a list of node names", name.line, name.column)
                given = tuple(str(x) for _, x in v)  # type: ignore[union-attr]
            levels: tuple[int, ...] = (0, 1)
            if "levels" in attrs:
                t, v = attrs["levels"]
                if t != "list" or not all(it == "number" for it, _ in v):  # type: ignore[union-attr]
                    raise ParseError(f"scm {name.value!r}: levels must be a list of integers", name.line, name.column)
                levels = tuple(int(x) for _, x in v)  # type: ignore[union-attr]
            if "table" not in attrs:
                raise ParseError(f"scm {name.value!r}: cpd requires a table", name.line, name.column)
            t, v = attrs["table"]
            if t != "list":
                raise ParseError(f"scm {name.value!r}: table must be a list of rows", name.line, name.column)
            rows = []
            for rt, rv in v:  # type: ignore[union-attr]
                if rt != "list" or not all(it == "number" for it, _ in rv):
                    raise ParseError(f"scm {name.value!r}: table rows must be number lists", name.line, name.column)
                rows.append(tuple(float(x) for _, x in rv))
            return TableCpd(given, levels, tuple(rows))
        raise ParseError(f"scm {name.value!r}: unknown mechanism type {mtype!r}", name.line, name.column)


def _validate(doc: ModelDocument, decl_pos: dict[str, _Token] | None = None) -> None:
    pos = decl_pos or {}

    def where(name: str) -> tuple[int, int]:
        tok = pos.get(name)
        return (tok.line, tok.column) if tok else (0, 0)

    names = set()
    for n in doc.nodes:
        if n.name in names:
            raise ParseError(f"duplicate node {n.name!r}", *where(n.name))
        names.add(n.name)
        if n.kind not in NODE_KINDS:
            raise ParseError(f"node {n.name!r}: invalid kind {n.kind!r}", *where(n.name))
        if n.role not in NODE_ROLES:
            raise ParseError(f"node {n.name!r}: invalid role {n.role!r}", *where(n.name))

    tags = set()
    for a in doc.assumptions:
        if a.tag in tags:
            raise ParseError(f"duplicate assumption tag {a.tag!r}")
        tags.add(a.tag)

    for role in ("exposure", "outcome"):
        holders = [n.name for n in doc.nodes if n.role == role]
        if len(holders) > 1:
            raise ParseError(f"multiple {role} nodes: {', '.join(holders)}", *where(holders[1]))

    for e in doc.edges:
        if e.src == e.dst:
            raise ParseError(f"self-loop edge on {e.src!r}", *where(e.src))
        for endpoint in (e.src, e.dst):
            if endpoint not in names:
                raise ParseError(f"unknown edge endpoint {endpoint!r}")

    for n in doc.nodes:
        for t in n.traces:
            if t not in tags:
                raise ParseError(f"node {n.name!r}: unresolved trace tag {t!r}", *where(n.name))
    for e in doc.edges:
        for t in e.traces:
            if t not in tags:
                raise ParseError(f"edge {e.src}->{e.dst}: unresolved trace tag {t!r}")

    parents: dict[str, set[str]] = {n.name: set() for n in doc.nodes}
    for e in doc.edges:
        parents[e.dst].add(e.src)

    seen_mech = set()
    for node, mech in doc.mechanisms:
        if node not in names:
            raise ParseError(f"scm block for unknown node {node!r}")
        if node in seen_mech:
            raise ParseError(f"duplicate scm block for {node!r}")
        seen_mech.add(node)
        if isinstance(mech, (LinearGaussian, LogisticBinary)):
            keys = {k for k, _ in mech.weights}
            if keys != parents[node]:
                raise ParseError(
                    f"scm {node!r}: weight keys {sorted(keys)} do not match parents {sorted(parents[node])}"
                )
            if isinstance(mech, LinearGaussian) and mech.noise_sd <= 0:
                raise ParseError(f"scm {node!r}: sd must be positive")
        else:
            if set(mech.given) != parents[node]:
                raise ParseError(
                    f"scm {node!r}: given {sorted(mech.given)} does not match parents {sorted(parents[node])}"
                )
            for row in mech.table:
                if len(row) != len(mech.levels):
                    raise ParseError(f"scm {node!r}: row width {len(row)} != {len(mech.levels)} levels")
                if abs(sum(row) - 1.0) > 1e-9:
                    raise ParseError(f"scm {node!r}: cpd row does not sum to 1")
                if any(p < 0 for p in row):
                    raise ParseError(f"scm {node!r}: negative probability")


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def parse(source: str) -> ModelDocument:
    """Parse DSL text into a validated ModelDocument."""
    return _Parser(source).parse_document()


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _mech_to_dsl(node: str, mech: Mechanism) -> str:
    if isinstance(mech, LinearGaussian):
        parts = ["type: linear_gaussian", f"intercept: {mech.intercept!r}"]
        if mech.weights:
            ws = ", ".join(f"{k}: {v!r}" for k, v in mech.weights)
            parts.append("weights: {" + ws + "}")
        parts.append(f"sd: {mech.noise_sd!r}")
    elif isinstance(mech, LogisticBinary):
        parts = ["type: logistic", f"intercept: {mech.intercept!r}"]
        if mech.weights:
            ws = ", ".join(f"{k}: {v!r}" for k, v in mech.weights)
            parts.append("weights: {" + ws + "}")
    else:
        parts = ["type: cpd"]
        if mech.given:
            parts.append("given: [" + ", ".join(mech.given) + "]")
        parts.append("levels: [" + ", ".join(str(x) for x in mech.levels) + "]")
        rows = ", ".join("[" + ", ".join(f"{p!r}" for p in row) + "]" for row in mech.table)
        parts.append("table: [" + rows + "]")
    return f"  scm {node} {{ " + ", ".join(parts) + " }"


def to_dsl(doc: ModelDocument) -> str:
    """Render a document back to canonical DSL text (declaration order kept)."""
    lines = [f"model {_quote(doc.name)} {{"]
    for a in doc.assumptions:
        lines.append(f"  assume {a.tag} {_quote(a.text)}")
    if doc.assumptions:
        lines.append("")
    for n in doc.nodes:
        attrs = [f"kind: {n.kind}"]
        if n.role != "covariate":
            attrs.append(f"role: {n.role}")
        if n.traces:
            attrs.append("traces: [" + ", ".join(n.traces) + "]")
        if n.label is not None:
            attrs.append(f"label: {_quote(n.label)}")
        if n.controllable is not None:
            attrs.append(f"controllable: {'true' if n.controllable else 'false'}")
        lines.append(f"  node {n.name} {{ " + ", ".join(attrs) + " }")
    if doc.nodes:
        lines.append("")
    for e in doc.edges:
        attrs = []
        if e.traces:
            attrs.append("traces: [" + ", ".join(e.traces) + "]")
        if e.mechanism_tag is not None:
            attrs.append(f"mechanism: {_quote(e.mechanism_tag)}")
        suffix = " { " + ", ".join(attrs) + " }" if attrs else ""
        lines.append(f"  edge {e.src} -> {e.dst}{suffix}")
    if doc.mechanisms:
        lines.append("")
        for node, mech in doc.mechanisms:
            lines.append(_mech_to_dsl(node, mech))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _mech_to_obj(mech: Mechanism) -> dict:
    if isinstance(mech, LinearGaussian):
        return {
            "type": "linear_gaussian",
            "intercept": mech.intercept,
            "weights": {k: v for k, v in mech.weights},
            "sd": mech.noise_sd,
        }
    if isinstance(mech, LogisticBinary):
        return {
            "type": "logistic",
            "intercept": mech.intercept,
            "weights": {k: v for k, v in mech.weights},
        }
    return {
        "type": "cpd",
        "given": list(mech.given),
        "levels": list(mech.levels),
        "table": [list(row) for row in mech.table],
    }


def _mech_from_obj(obj: dict) -> Mechanism:
    mtype = obj.get("type")
    if mtype == "linear_gaussian":
        return LinearGaussian(
            tuple((k, float(v)) for k, v in obj.get("weights", {}).items()),
            float(obj.get("intercept", 0.0)),
            float(obj.get("sd", 1.0)),
        )
    if mtype == "logistic":
        return LogisticBinary(
            tuple((k, float(v)) for k, v in obj.get("weights", {}).items()),
            float(obj.get("intercept", 0.0)),
        )
    if mtype == "cpd":
        return TableCpd(
            tuple(obj.get("given", [])),
            tuple(int(x) for x in obj.get("levels", [0, 1])),
            tuple(tuple(float(p) for p in row) for row in obj.get("table", [])),
        )
    raise ParseError(f"unknown mechanism type {mtype!r}")


def to_json(doc: ModelDocument, indent: int = 2) -> str:
    """Render a document as canonical JSON (machine interchange format)."""
    obj = {
        "name": doc.name,
        "assumptions": [{"tag": a.tag, "text": a.text} for a in doc.assumptions],
        "nodes": [
            {
                "name": n.name,
                "kind": n.kind,
                "role": n.role,
                "traces": list(n.traces),
                "label": n.label,
                "controllable": n.controllable,
            }
            for n in doc.nodes
        ],
        "edges": [
            {"from": e.src, "to": e.dst, "traces": list(e.traces), "mechanism": e.mechanism_tag}
            for e in doc.edges
        ],
        "scm": {node: _mech_to_obj(m) for node, m in doc.mechanisms},
    }
    return json.dumps(obj, indent=indent, sort_keys=True) + "\n"


_JSON_KEYS = {
    "model": {"name", "assumptions", "nodes", "edges", "scm"},
    "assumption": {"tag", "text"},
    "node": {"name", "kind", "role", "traces", "label", "controllable"},
    "edge": {"from", "to", "traces", "mechanism"},
    "mechanism": {"type", "intercept", "weights", "sd", "given", "levels", "table"},
}


def _check_keys(obj: dict, what: str) -> None:
    extra = set(obj) - _JSON_KEYS[what]
    if extra:
        raise ParseError(f"unknown {what} key {sorted(extra)[0]!r}")


def parse_json(text: str) -> ModelDocument:
    """Parse the JSON interchange form, applying the same validation as parse()."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(obj, dict) or "name" not in obj:
        raise ParseError("JSON model must be an object with a 'name' field")
    _check_keys(obj, "model")
    for a in obj.get("assumptions", []):
        _check_keys(a, "assumption")
    for n in obj.get("nodes", []):
        _check_keys(n, "node")
    for e in obj.get("edges", []):
        _check_keys(e, "edge")
    for m in obj.get("scm", {}).values():
        _check_keys(m, "mechanism")
    try:
        doc = ModelDocument(
            str(obj["name"]),
            tuple(Assumption(a["tag"], a["text"]) for a in obj.get("assumptions", [])),
            tuple(
                NodeDecl(
                    n["name"],
                    kind=n.get("kind", "observed"),
                    role=n.get("role", "covariate"),
                    traces=tuple(n.get("traces", [])),
                    label=n.get("label"),
                    controllable=n.get("controllable"),
                )
                for n in obj.get("nodes", [])
            ),
            tuple(
                EdgeDecl(
                    e["from"],
                    e["to"],
                    traces=tuple(e.get("traces", [])),
                    mechanism_tag=e.get("mechanism"),
                )
                for e in obj.get("edges", [])
            ),
            tuple((node, _mech_from_obj(m)) for node, m in obj.get("scm", {}).items()),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed JSON model: {exc}") from None
    _validate(doc)
    return doc


def serialize(doc: ModelDocument, fmt: str = "dsl") -> str:
    """Serialize to ``dsl`` or ``json``; parse(serialize(doc)) == doc."""
    if fmt == "dsl":
        return to_dsl(doc)
    if fmt == "json":
        return to_json(doc)
    raise ValueError(f"unknown format {fmt!r}")


def load(text: str) -> ModelDocument:
    """Parse either DSL or JSON, sniffing the format."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_json(text)
    return parse(text)
