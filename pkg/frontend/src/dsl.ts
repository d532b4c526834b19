/**
 * Serialize an edited document to `.cdag` text.
 *
 * The output matches the canonical form the Python toolchain emits: same
 * attribute order, same quoting rules, weights sorted by parent name. The
 * studio commits DSL text (not JSON) so the file the server stores is the
 * file a reviewer reads.
 */

import { DocumentJson, Mechanism } from "./types.js";

function quote(s: string): string {
  return '"' + s.replace(/\\/g, "\\\\").replace(/"/g, '\\"').replace(/\n/g, "\\n") + '"';
}

/** Shortest round-trip decimal, but keep a `.0` so integers read as floats. */
function num(v: number): string {
  const text = String(v);
  return /[.eE]/.test(text) ? text : `${text}.0`;
}

function weightsAttr(weights: Record<string, number>): string | null {
  const names = Object.keys(weights).sort();
  if (names.length === 0) {
    return null;
  }
  return "weights: {" + names.map((k) => `${k}: ${num(weights[k]!)}`).join(", ") + "}";
}

function mechanismLine(node: string, mech: Mechanism): string {
  const parts: string[] = [];
  if (mech.type === "linear_gaussian") {
    parts.push("type: linear_gaussian", `intercept: ${num(mech.intercept)}`);
    const w = weightsAttr(mech.weights);
    if (w) parts.push(w);
    parts.push(`sd: ${num(mech.sd)}`);
  } else if (mech.type === "logistic") {
    parts.push("type: logistic", `intercept: ${num(mech.intercept)}`);
    const w = weightsAttr(mech.weights);
    if (w) parts.push(w);
  } else {
    parts.push("type: cpd");
    if (mech.given.length > 0) {
      parts.push("given: [" + mech.given.join(", ") + "]");
    }
    parts.push("levels: [" + mech.levels.map(String).join(", ") + "]");
    const rows = mech.table.map((row) => "[" + row.map(num).join(", ") + "]").join(", ");
    parts.push("table: [" + rows + "]");
  }
  return `  scm ${node} { ${parts.join(", ")} }`;
}

export function serializeDocument(doc: DocumentJson): string {
  const lines = [`model ${quote(doc.name)} {`];
  for (const a of doc.assumptions) {
    lines.push(`  assume ${a.tag} ${quote(a.text)}`);
  }
  if (doc.assumptions.length > 0) {
    lines.push("");
  }
  for (const n of doc.nodes) {
    const attrs = [`kind: ${n.kind}`];
    if (n.role !== "covariate") {
      attrs.push(`role: ${n.role}`);
    }
    if (n.traces.length > 0) {
      attrs.push("traces: [" + n.traces.join(", ") + "]");
    }
    if (n.label !== null) {
      attrs.push(`label: ${quote(n.label)}`);
    }
    if (n.controllable !== null) {
      attrs.push(`controllable: ${n.controllable}`);
    }
    lines.push(`  node ${n.name} { ${attrs.join(", ")} }`);
  }
  if (doc.nodes.length > 0) {
    lines.push("");
  }
  for (const e of doc.edges) {
    const attrs: string[] = [];
    if (e.traces.length > 0) {
      attrs.push("traces: [" + e.traces.join(", ") + "]");
    }
    if (e.mechanism !== null) {
      attrs.push(`mechanism: ${quote(e.mechanism)}`);
    }
    const suffix = attrs.length > 0 ? ` { ${attrs.join(", ")} }` : "";
    lines.push(`  edge ${e.from} -> ${e.to}${suffix}`);
  }
  const scmNodes = Object.keys(doc.scm).sort();
  if (scmNodes.length > 0) {
    lines.push("");
    for (const node of scmNodes) {
      lines.push(mechanismLine(node, doc.scm[node]!));
    }
  }
  lines.push("}");
  return lines.join("\n") + "\n";
}
