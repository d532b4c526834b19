/**
 * Client-side working copy of one model.
 *
 * CanvasModel owns the document being edited, the layout coordinates
 * (presentation only, never committed into the document), the dirty flag,
 * and the content hash of the server version the edits are based on. All
 * structural validation beyond trivial well-formedness (duplicate names,
 * self-loops, dangling references) is the server's job: committing sends
 * the serialized document through the real parser, and cycles come back
 * as a diagnostic with a witness.
 */

import { DocumentJson, EdgeDecl, NodeDecl } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export type Layout = Record<string, Point>;

export class EditError extends Error {}

const NAME_RE = /^[A-Za-z_][A-Za-z0-9_]*$/;
const KEYWORDS = new Set(["model", "assume", "node", "edge", "disturbance", "scm"]);

export function emptyDocument(name: string): DocumentJson {
  return { name, assumptions: [], nodes: [], edges: [], scm: {} };
}

export class CanvasModel {
  doc: DocumentJson;
  layout: Layout;
  dirty = false;
  /** hash of the last server version seen; null before first commit */
  serverHash: string | null;

  constructor(doc: DocumentJson, serverHash: string | null = null, layout: Layout = {}) {
    this.doc = doc;
    this.serverHash = serverHash;
    this.layout = layout;
  }

  node(name: string): NodeDecl {
    const found = this.doc.nodes.find((n) => n.name === name);
    if (!found) {
      throw new EditError(`no node named ${name}`);
    }
    return found;
  }

  hasNode(name: string): boolean {
    return this.doc.nodes.some((n) => n.name === name);
  }

  private touch(): void {
    this.dirty = true;
  }

  addNode(name: string, partial: Partial<Omit<NodeDecl, "name">> = {}): void {
    if (!NAME_RE.test(name) || KEYWORDS.has(name)) {
      throw new EditError(`invalid node name: ${name}`);
    }
    if (this.hasNode(name)) {
      throw new EditError(`node ${name} already exists`);
    }
    this.doc.nodes.push({
      name,
      kind: partial.kind ?? "observed",
      role: partial.role ?? "covariate",
      traces: partial.traces ?? [],
      label: partial.label ?? null,
      controllable: partial.controllable ?? null,
    });
    this.touch();
  }

  /** Rename everywhere the old name can appear: edges, scm keys, weights, cpd given. */
  renameNode(from: string, to: string): void {
    if (!NAME_RE.test(to) || KEYWORDS.has(to)) {
      throw new EditError(`invalid node name: ${to}`);
    }
    if (from !== to && this.hasNode(to)) {
      throw new EditError(`node ${to} already exists`);
    }
    const node = this.node(from);
    node.name = to;
    for (const e of this.doc.edges) {
      if (e.from === from) e.from = to;
      if (e.to === from) e.to = to;
    }
    const scm: DocumentJson["scm"] = {};
    for (const [owner, mech] of Object.entries(this.doc.scm)) {
      const renamed = owner === from ? to : owner;
      if ("weights" in mech && from in mech.weights) {
        const weights: Record<string, number> = {};
        for (const [k, v] of Object.entries(mech.weights)) {
          weights[k === from ? to : k] = v;
        }
        scm[renamed] = { ...mech, weights };
      } else if ("given" in mech && mech.given.includes(from)) {
        scm[renamed] = { ...mech, given: mech.given.map((g) => (g === from ? to : g)) };
      } else {
        scm[renamed] = mech;
      }
    }
    this.doc.scm = scm;
    if (this.layout[from]) {
      this.layout[to] = this.layout[from];
      delete this.layout[from];
    }
    this.touch();
  }

  /**
   * Drop a node together with its incident edges and mechanism. Mechanisms
   * of former children lose the corresponding weight/given entry so the
   * document still satisfies the parser's weights-match-parents rule.
   */
  deleteNode(name: string): void {
    this.node(name);
    this.doc.nodes = this.doc.nodes.filter((n) => n.name !== name);
    const orphaned = this.doc.edges.filter((e) => e.from === name).map((e) => e.to);
    this.doc.edges = this.doc.edges.filter((e) => e.from !== name && e.to !== name);
    delete this.doc.scm[name];
    for (const child of orphaned) {
      const mech = this.doc.scm[child];
      if (!mech) continue;
      if ("weights" in mech && name in mech.weights) {
        const weights = { ...mech.weights };
        delete weights[name];
        this.doc.scm[child] = { ...mech, weights };
      } else if ("given" in mech && mech.given.includes(name)) {
        this.doc.scm[child] = { ...mech, given: mech.given.filter((g) => g !== name) };
      }
    }
    delete this.layout[name];
    this.touch();
  }

  setKind(name: string, kind: NodeDecl["kind"]): void {
    this.node(name).kind = kind;
    this.touch();
  }

  toggleObservability(name: string): void {
    const node = this.node(name);
    if (node.role === "disturbance") {
      throw new EditError("disturbance nodes stay latent");
    }
    node.kind = node.kind === "observed" ? "latent" : "observed";
    this.touch();
  }

  setRole(name: string, role: NodeDecl["role"]): void {
    if (role === "exposure" || role === "outcome") {
      const holder = this.doc.nodes.find((n) => n.role === role && n.name !== name);
      if (holder) {
        throw new EditError(`${holder.name} is already the ${role}`);
      }
    }
    const node = this.node(name);
    node.role = role;
    if (role === "disturbance") {
      node.kind = "latent";
    }
    this.touch();
  }

  setTraces(name: string, traces: string[]): void {
    const known = new Set(this.doc.assumptions.map((a) => a.tag));
    const missing = traces.find((t) => !known.has(t));
    if (missing) {
      throw new EditError(`unknown assumption tag: ${missing}`);
    }
    this.node(name).traces = [...traces];
    this.touch();
  }

  /**
   * Append an edge. Only local well-formedness is checked here; whether
   * the edge closes a cycle is decided by the server on commit. The
   * target's mechanism is kept consistent with its new parent list: a
   * weighted mechanism gains the parent at weight zero, while a table
   * mechanism is dropped because its rows are indexed by the old parents.
   */
  addEdge(from: string, to: string, edge: Partial<Omit<EdgeDecl, "from" | "to">> = {}): void {
    this.node(from);
    this.node(to);
    if (from === to) {
      throw new EditError("self-loops are not allowed");
    }
    if (this.doc.edges.some((e) => e.from === from && e.to === to)) {
      throw new EditError(`edge ${from} -> ${to} already exists`);
    }
    this.doc.edges.push({
      from,
      to,
      traces: edge.traces ?? [],
      mechanism: edge.mechanism ?? null,
    });
    const mech = this.doc.scm[to];
    if (mech) {
      if ("weights" in mech) {
        this.doc.scm[to] = { ...mech, weights: { ...mech.weights, [from]: 0 } };
      } else {
        delete this.doc.scm[to];
      }
    }
    this.touch();
  }

  deleteEdge(from: string, to: string): void {
    const before = this.doc.edges.length;
    this.doc.edges = this.doc.edges.filter((e) => !(e.from === from && e.to === to));
    if (this.doc.edges.length === before) {
      throw new EditError(`no edge ${from} -> ${to}`);
    }
    const mech = this.doc.scm[to];
    if (mech) {
      if ("weights" in mech && from in mech.weights) {
        const weights = { ...mech.weights };
        delete weights[from];
        this.doc.scm[to] = { ...mech, weights };
      } else if ("given" in mech && mech.given.includes(from)) {
        this.doc.scm[to] = { ...mech, given: mech.given.filter((g) => g !== from) };
      }
    }
    this.touch();
  }

  addAssumption(tag: string, text: string): void {
    if (this.doc.assumptions.some((a) => a.tag === tag)) {
      throw new EditError(`assumption ${tag} already exists`);
    }
    this.doc.assumptions.push({ tag, text });
    this.touch();
  }

  moveNode(name: string, point: Point): void {
    this.node(name);
    this.layout[name] = point;
    // layout is presentation-only: moving things never dirties the document
  }

  markCommitted(hash: string): void {
    this.serverHash = hash;
    this.dirty = false;
  }
}
