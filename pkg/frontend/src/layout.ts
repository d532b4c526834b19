/**
 * Node placement and its persistence.
 *
 * Placement is computed by layering: each node sits one column right of
 * its deepest parent, root nodes in column zero, declaration order within
 * a column. Dragged positions override the computed ones and are saved in
 * a sidecar keyed by model name, so the `.cdag` document itself never
 * carries coordinates.
 */

import { Layout, Point } from "./model.js";
import { SceneNode } from "./render.js";

const COLUMN_GAP = 190;
const ROW_GAP = 110;
const MARGIN = 70;

/**
 * Column index per rendered node. Tolerates cycles in work-in-progress
 * graphs by placing any node left over after the layering passes one
 * column past everything placed so far.
 */
export function layerNodes(nodes: string[], edges: Array<[string, string]>): Map<string, number> {
  const parents = new Map<string, string[]>(nodes.map((n) => [n, []]));
  for (const [from, to] of edges) {
    parents.get(to)?.push(from);
  }
  const depth = new Map<string, number>();
  let placed = true;
  while (placed) {
    placed = false;
    for (const n of nodes) {
      if (depth.has(n)) continue;
      const ps = parents.get(n) ?? [];
      if (ps.every((p) => depth.has(p))) {
        depth.set(n, ps.length === 0 ? 0 : Math.max(...ps.map((p) => depth.get(p)!)) + 1);
        placed = true;
      }
    }
  }
  const overflow = 1 + Math.max(0, ...depth.values());
  for (const n of nodes) {
    if (!depth.has(n)) {
      depth.set(n, overflow);
    }
  }
  return depth;
}

export function autoLayout(nodes: string[], edges: Array<[string, string]>): Layout {
  const depth = layerNodes(nodes, edges);
  const perColumn = new Map<number, number>();
  const layout: Layout = {};
  for (const n of nodes) {
    const col = depth.get(n)!;
    const row = perColumn.get(col) ?? 0;
    perColumn.set(col, row + 1);
    layout[n] = { x: MARGIN + col * COLUMN_GAP, y: MARGIN + row * ROW_GAP };
  }
  return layout;
}

/** Computed positions for every scene node, manual overrides winning. */
export function placeScene(nodes: SceneNode[], edges: Array<[string, string]>, manual: Layout): Layout {
  const computed = autoLayout(nodes.map((n) => n.id), edges);
  const layout: Layout = {};
  for (const n of nodes) {
    layout[n.id] = manual[n.id] ?? computed[n.id] ?? { x: MARGIN, y: MARGIN };
  }
  return layout;
}

export interface LayoutStore {
  load(model: string): Layout | null;
  save(model: string, layout: Layout): void;
}

/** Test double and SSR fallback. */
export class MemoryLayoutStore implements LayoutStore {
  private readonly held = new Map<string, Layout>();

  load(model: string): Layout | null {
    return this.held.get(model) ?? null;
  }

  save(model: string, layout: Layout): void {
    this.held.set(model, structuredClone(layout));
  }
}

/** Browser sidecar: one localStorage entry per model. */
export class BrowserLayoutStore implements LayoutStore {
  private key(model: string): string {
    return `dag-studio.layout.${model}`;
  }

  load(model: string): Layout | null {
    const raw = localStorage.getItem(this.key(model));
    if (raw === null) {
      return null;
    }
    try {
      return JSON.parse(raw) as Layout;
    } catch {
      return null;
    }
  }

  save(model: string, layout: Layout): void {
    localStorage.setItem(this.key(model), JSON.stringify(layout));
  }
}

export function isValidPoint(p: unknown): p is Point {
  return (
    typeof p === "object" &&
    p !== null &&
    typeof (p as Point).x === "number" &&
    typeof (p as Point).y === "number"
  );
}
