/**
 * Pure view-model construction: document plus analysis results in, scene
 * description out. The DOM layer only draws what this module decides, and
 * nothing here computes separations or paths itself; highlights always
 * come from service responses.
 */

import { AnalyzeReport, DocumentJson, PathInfo, Statement } from "./types.js";

export interface SceneNode {
  id: string;
  /** text shown inside the node */
  caption: string;
  /** gray background marks variables not observable at runtime */
  shaded: boolean;
  role: string;
  /** raw node names behind this scene node (>1 for a collapsed noise family) */
  members: string[];
  /** outlined as part of the selected implication's conditioning set */
  conditioning: boolean;
  /** emphasized as an endpoint of the selected implication */
  endpoint: boolean;
  /** latent variable a gap report says would close an open biasing path */
  gapBlocker: boolean;
}

export interface SceneEdge {
  id: string;
  from: string;
  to: string;
  mechanism: string | null;
  /** index into the path palette, null when no highlighted path uses the edge */
  pathColor: number | null;
  /** set when the edge lies on a biasing path no observed set can block */
  onGapPath: boolean;
}

export interface Scene {
  nodes: SceneNode[];
  edges: SceneEdge[];
}

export interface Selection {
  implication?: Statement;
  /** kinds to highlight, in palette order: causal paths first */
  paths?: PathInfo[];
}

/**
 * Disturbance nodes sharing a label collapse into one scene node, the
 * same convention the fixture's diagram uses; everything else maps one
 * to one. Grouping is display-only and leaves the document untouched.
 */
export function groupNodes(doc: DocumentJson): Map<string, string> {
  const byMember = new Map<string, string>();
  for (const n of doc.nodes) {
    if (n.role === "disturbance") {
      byMember.set(n.name, n.label ?? n.name);
    } else {
      byMember.set(n.name, n.name);
    }
  }
  return byMember;
}

function edgeKey(from: string, to: string): string {
  return `${from}->${to}`;
}

export function buildScene(
  doc: DocumentJson,
  report: AnalyzeReport | null = null,
  selection: Selection = {}
): Scene {
  const groups = groupNodes(doc);

  const conditioning = new Set(selection.implication?.given ?? []);
  const endpoints = new Set(
    selection.implication ? [selection.implication.x, selection.implication.y] : []
  );
  const gapBlockers = new Set<string>();
  const gapEdges = new Set<string>();
  for (const gap of report?.validation.observability_gaps ?? []) {
    for (const b of gap.latent_blockers) {
      gapBlockers.add(b);
    }
    for (let i = 0; i + 1 < gap.path.length; i++) {
      // gap paths are undirected; mark both orientations
      gapEdges.add(edgeKey(gap.path[i]!, gap.path[i + 1]!));
      gapEdges.add(edgeKey(gap.path[i + 1]!, gap.path[i]!));
    }
  }

  const nodes: SceneNode[] = [];
  const seen = new Map<string, SceneNode>();
  for (const n of doc.nodes) {
    const id = groups.get(n.name)!;
    const existing = seen.get(id);
    if (existing) {
      existing.members.push(n.name);
      existing.shaded = existing.shaded && n.kind === "latent";
      continue;
    }
    const scene: SceneNode = {
      id,
      caption: n.role === "disturbance" ? id : (n.label ?? n.name),
      shaded: n.kind === "latent",
      role: n.role,
      members: [n.name],
      conditioning: conditioning.has(n.name),
      endpoint: endpoints.has(n.name),
      gapBlocker: gapBlockers.has(n.name),
    };
    seen.set(id, scene);
    nodes.push(scene);
  }

  const colorByEdge = new Map<string, number>();
  (selection.paths ?? []).forEach((path, index) => {
    for (let i = 0; i + 1 < path.nodes.length; i++) {
      const a = path.nodes[i]!;
      const b = path.nodes[i + 1]!;
      // path arrows may run against the edge direction; color whichever exists
      colorByEdge.set(edgeKey(a, b), index);
      colorByEdge.set(edgeKey(b, a), index);
    }
  });

  const edges: SceneEdge[] = [];
  const seenEdges = new Set<string>();
  for (const e of doc.edges) {
    const from = groups.get(e.from) ?? e.from;
    const to = groups.get(e.to) ?? e.to;
    const id = edgeKey(from, to);
    if (seenEdges.has(id)) {
      continue;
    }
    seenEdges.add(id);
    edges.push({
      id,
      from,
      to,
      mechanism: e.mechanism,
      pathColor: colorByEdge.get(edgeKey(e.from, e.to)) ?? null,
      onGapPath: gapEdges.has(edgeKey(e.from, e.to)),
    });
  }

  return { nodes, edges };
}

/** Fill colors used by the DOM layer; index 0 is the first causal path. */
export const PATH_PALETTE = ["#1b7837", "#2166ac", "#8c510a", "#c51b7d", "#542788"];

/** Paths to highlight for the standard "show mechanisms" toggle. */
export function mechanismPaths(report: AnalyzeReport): PathInfo[] {
  return report.paths ? [...report.paths.causal] : [];
}

/** Scene edges as plain pairs, the form the layout pass wants. */
export function sceneEdgePairs(scene: Scene): Array<[string, string]> {
  return scene.edges.map((e) => [e.from, e.to]);
}
