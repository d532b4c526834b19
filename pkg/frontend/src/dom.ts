/**
 * Browser wiring: draws the scene as SVG, renders the side panels, and
 * routes edit gestures through CanvasModel and commits through the
 * service client. Presentation only; every analytical fact on screen
 * originates from a service response.
 */

import { ApiError, StaleModelError, StudioClient } from "./api.js";
import { BrowserLayoutStore, LayoutStore, placeScene } from "./layout.js";
import { CanvasModel } from "./model.js";
import { buildScene, PATH_PALETTE, Scene, sceneEdgePairs, Selection } from "./render.js";
import { serializeDocument } from "./dsl.js";
import { AnalyzeReport, Diagnostic, Statement } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_W = 130;
const NODE_H = 44;

interface StudioOptions {
  client: StudioClient;
  root: HTMLElement;
  layouts?: LayoutStore;
}

export class StudioApp {
  private readonly client: StudioClient;
  private readonly root: HTMLElement;
  private readonly layouts: LayoutStore;

  private modelName: string | null = null;
  private model: CanvasModel | null = null;
  private report: AnalyzeReport | null = null;
  private selection: Selection = {};
  private pendingEdgeFrom: string | null = null;

  private canvas!: SVGSVGElement;
  private banner!: HTMLElement;
  private panels!: HTMLElement;
  private picker!: HTMLSelectElement;

  constructor(opts: StudioOptions) {
    this.client = opts.client;
    this.root = opts.root;
    this.layouts = opts.layouts ?? new BrowserLayoutStore();
    this.mount();
  }

  private mount(): void {
    this.root.innerHTML = "";
    const bar = el("div", "toolbar");
    this.picker = document.createElement("select");
    this.picker.addEventListener("change", () => void this.loadModel(this.picker.value));
    bar.append(this.picker);
    bar.append(
      button("Add node", () => this.promptAddNode()),
      button("Add edge", () => this.startEdge()),
      button("Commit", () => void this.commit()),
      button("Reload", () => void this.reload())
    );
    this.banner = el("div", "banner hidden");
    this.canvas = document.createElementNS(SVG_NS, "svg");
    this.canvas.setAttribute("class", "canvas");
    this.panels = el("div", "panels");
    const main = el("div", "main");
    main.append(this.canvas, this.panels);
    this.root.append(bar, this.banner, main);
    void this.refreshList();
  }

  private async refreshList(): Promise<void> {
    const list = await this.client.listModels();
    this.picker.innerHTML = "";
    for (const m of list.models) {
      const opt = document.createElement("option");
      opt.value = m.name;
      opt.textContent = m.name;
      this.picker.append(opt);
    }
    const first = list.models[0];
    if (!this.modelName && first) {
      await this.loadModel(first.name);
    }
  }

  async loadModel(name: string): Promise<void> {
    const envelope = await this.client.getModel(name);
    this.modelName = name;
    this.model = new CanvasModel(envelope.document, envelope.hash, this.layouts.load(name) ?? {});
    this.selection = {};
    this.clearBanner();
    await this.refreshReport();
  }

  private async refreshReport(): Promise<void> {
    if (!this.modelName) return;
    this.report = this.model?.dirty ? null : await this.client.analyze(this.modelName);
    this.draw();
  }

  async reload(): Promise<void> {
    if (this.modelName) {
      await this.loadModel(this.modelName);
    }
  }

  /** Serialize, send, and either adopt the new hash or surface the refusal. */
  async commit(): Promise<void> {
    if (!this.model || !this.modelName) return;
    try {
      const res = await this.client.putModel(
        this.modelName,
        serializeDocument(this.model.doc),
        this.model.serverHash
      );
      this.model.markCommitted(res.hash);
      this.clearBanner();
      await this.refreshReport();
    } catch (err) {
      if (err instanceof StaleModelError) {
        this.showBanner(
          "Someone else committed this model since you loaded it. Reload to pick up their version.",
          "stale"
        );
      } else if (err instanceof ApiError) {
        this.showDiagnostic(err.diagnostic);
      } else {
        throw err;
      }
    }
  }

  private showDiagnostic(d: Diagnostic): void {
    const where = d.line ? ` (line ${d.line}, column ${d.column ?? 0})` : "";
    const witness = d.witness ? ` (cycle: ${d.witness.join(" -> ")})` : "";
    this.showBanner(`Commit blocked: ${d.message}${where}${witness}`, "error");
    if (d.witness) {
      for (const name of d.witness) {
        this.canvas
          .querySelectorAll(`[data-node="${name}"] rect`)
          .forEach((r) => r.classList.add("cycle-member"));
      }
    }
  }

  private showBanner(text: string, kind: string): void {
    this.banner.textContent = text;
    this.banner.className = `banner ${kind}`;
  }

  private clearBanner(): void {
    this.banner.className = "banner hidden";
  }

  private promptAddNode(): void {
    if (!this.model) return;
    const name = window.prompt("Node name:");
    if (!name) return;
    this.model.addNode(name);
    this.draw();
  }

  private startEdge(): void {
    this.pendingEdgeFrom = null;
    this.showBanner("Edge mode: click the source node, then the target node.", "info");
  }

  private nodeClicked(member: string): void {
    if (!this.model) return;
    if (this.banner.className.includes("info")) {
      if (this.pendingEdgeFrom === null) {
        this.pendingEdgeFrom = member;
        return;
      }
      this.model.addEdge(this.pendingEdgeFrom, member);
      this.pendingEdgeFrom = null;
      this.clearBanner();
      this.draw();
      return;
    }
    this.model.toggleObservability(member);
    this.draw();
  }

  selectImplication(st: Statement): void {
    this.selection = { implication: st };
    this.draw();
  }

  private draw(): void {
    if (!this.model) return;
    const scene = buildScene(this.model.doc, this.report, this.selection);
    const layout = placeScene(scene.nodes, sceneEdgePairs(scene), this.model.layout);
    this.drawScene(scene, layout);
    this.drawPanels();
    if (this.modelName) {
      this.layouts.save(this.modelName, this.model.layout);
    }
  }

  private drawScene(scene: Scene, layout: Record<string, { x: number; y: number }>): void {
    this.canvas.innerHTML =
      '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
      'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>';
    let maxX = 0;
    let maxY = 0;
    for (const e of scene.edges) {
      const a = layout[e.from]!;
      const b = layout[e.to]!;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x + NODE_W / 2));
      line.setAttribute("y1", String(a.y + NODE_H / 2));
      line.setAttribute("x2", String(b.x + NODE_W / 2));
      line.setAttribute("y2", String(b.y + NODE_H / 2));
      line.setAttribute("marker-end", "url(#arrow)");
      line.setAttribute(
        "class",
        ["edge", e.onGapPath ? "gap" : "", e.pathColor !== null ? "onpath" : ""].join(" ").trim()
      );
      if (e.pathColor !== null) {
        line.setAttribute("stroke", PATH_PALETTE[e.pathColor % PATH_PALETTE.length]!);
      }
      this.canvas.append(line);
    }
    for (const n of scene.nodes) {
      const p = layout[n.id]!;
      maxX = Math.max(maxX, p.x + NODE_W);
      maxY = Math.max(maxY, p.y + NODE_H);
      const g = document.createElementNS(SVG_NS, "g");
      g.setAttribute("data-node", n.id);
      g.setAttribute("transform", `translate(${p.x},${p.y})`);
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("width", String(NODE_W));
      rect.setAttribute("height", String(NODE_H));
      rect.setAttribute("rx", "8");
      rect.setAttribute(
        "class",
        [
          "node",
          n.shaded ? "latent" : "observed",
          n.conditioning ? "conditioning" : "",
          n.endpoint ? "endpoint" : "",
          n.gapBlocker ? "gap-blocker" : "",
          n.role,
        ]
          .join(" ")
          .trim()
      );
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(NODE_W / 2));
      text.setAttribute("y", String(NODE_H / 2 + 4));
      text.setAttribute("text-anchor", "middle");
      text.textContent = n.id;
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = n.caption;
      g.append(rect, text, title);
      g.addEventListener("click", () => this.nodeClicked(n.members[0]!));
      this.canvas.append(g);
    }
    this.canvas.setAttribute("viewBox", `0 0 ${maxX + 70} ${maxY + 70}`);
  }

  private drawPanels(): void {
    this.panels.innerHTML = "";
    if (this.model?.dirty) {
      this.panels.append(
        el("p", "hint", "Uncommitted edits. Commit to refresh the analysis panels.")
      );
      return;
    }
    if (!this.report) return;
    const v = this.report.validation;
    this.panels.append(
      el(
        "p",
        "summary",
        `${v.summary.nodes} nodes (${v.summary.raw_nodes} raw), ` +
          `${v.summary.edges} edges, exposure ${v.exposure ?? "none"}, outcome ${v.outcome ?? "none"}`
      )
    );

    if (this.report.paths) {
      const h = el("h3", "", "Paths");
      const ul = el("ul", "paths");
      const all = [...this.report.paths.causal, ...this.report.paths.biasing];
      for (const p of this.report.paths.causal) {
        const li = el("li", "causal", p.rendered);
        li.addEventListener("click", () => {
          this.selection = { paths: [p] };
          this.draw();
        });
        ul.append(li);
      }
      for (const p of this.report.paths.biasing) {
        const li = el("li", "biasing", p.rendered);
        li.addEventListener("click", () => {
          this.selection = { paths: [p] };
          this.draw();
        });
        ul.append(li);
      }
      void all;
      this.panels.append(h, ul);
    }

    const h2 = el("h3", "", "Implied independencies");
    const ul2 = el("ul", "implications");
    for (const st of this.report.implications) {
      const li = el("li", "", st.rendered);
      li.addEventListener("click", () => this.selectImplication(st));
      const check = button("verify", async (ev) => {
        ev.stopPropagation();
        const res = await this.client.dsep(this.modelName!, st.x, st.y, st.given);
        li.classList.add(res.separated ? "holds" : "broken");
      });
      li.append(check);
      ul2.append(li);
    }
    this.panels.append(h2, ul2);

    const h3 = el("h3", "", "Requirements");
    const ul3 = el("ul", "requirements");
    for (const r of this.report.requirements) {
      ul3.append(el("li", "", `${r.id} (${r.rule}): ${r.text}`));
    }
    this.panels.append(h3, ul3);

    for (const gap of v.observability_gaps) {
      this.panels.append(
        el("p", "gap-note", `Unclosable biasing path: ${gap.rendered} ` +
          `(would need: ${gap.latent_blockers.join(", ") || "nothing observable"})`)
      );
    }
  }
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function button(label: string, onClick: (ev: MouseEvent) => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.addEventListener("click", onClick);
  return b;
}
