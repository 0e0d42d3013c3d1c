/** SVG rendering of the session graph: node radius scales with interest,
 *  edge width with tightness; overlays mark the solver's group, the manual
 *  pick, and RSVP statuses. */

import type { GraphBody } from "./api.js";
import { forceLayout, type LayoutPoint } from "./layout.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface GraphViewOptions {
  width?: number;
  height?: number;
  onNodeClick?: (label: string) => void;
}

export class GraphView {
  private svg: SVGSVGElement;
  private positions = new Map<string, LayoutPoint>();
  private nodeEls = new Map<string, SVGCircleElement>();
  private labelEls = new Map<string, SVGTextElement>();
  readonly width: number;
  readonly height: number;

  constructor(
    private doc: Document,
    container: HTMLElement,
    private options: GraphViewOptions = {},
  ) {
    this.width = options.width ?? 760;
    this.height = options.height ?? 520;
    this.svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `0 0 ${this.width} ${this.height}`);
    this.svg.setAttribute("class", "graph-canvas");
    container.appendChild(this.svg);
  }

  render(graph: GraphBody): void {
    while (this.svg.firstChild) {
      this.svg.removeChild(this.svg.firstChild);
    }
    this.nodeEls.clear();
    this.labelEls.clear();
    this.positions = forceLayout({
      labels: graph.nodes.map((n) => n.label),
      edges: graph.edges,
      width: this.width,
      height: this.height,
    });

    const maxTau = Math.max(0.0001, ...graph.edges.map((e) => Math.abs(e.tau)));
    for (const edge of graph.edges) {
      const a = this.positions.get(edge.source);
      const b = this.positions.get(edge.target);
      if (!a || !b) continue;
      const line = this.doc.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.setAttribute("stroke-width", String(0.6 + 3.4 * Math.abs(edge.tau) / maxTau));
      line.setAttribute("class", edge.tau < 0 ? "edge edge-negative" : "edge");
      line.setAttribute("data-edge", `${edge.source}--${edge.target}`);
      this.svg.appendChild(line);
    }

    const etas = graph.nodes.map((n) => n.eta);
    const lo = Math.min(...etas);
    const span = Math.max(1e-9, Math.max(...etas) - lo);
    for (const node of graph.nodes) {
      const pos = this.positions.get(node.label)!;
      const circle = this.doc.createElementNS(SVG_NS, "circle") as SVGCircleElement;
      circle.setAttribute("cx", String(pos.x));
      circle.setAttribute("cy", String(pos.y));
      circle.setAttribute("r", String(7 + 9 * ((node.eta - lo) / span)));
      circle.setAttribute("class", "node");
      circle.setAttribute("data-node", node.label);
      circle.addEventListener("click", () => this.options.onNodeClick?.(node.label));
      this.svg.appendChild(circle);
      this.nodeEls.set(node.label, circle);

      const text = this.doc.createElementNS(SVG_NS, "text") as SVGTextElement;
      text.setAttribute("x", String(pos.x + 10));
      text.setAttribute("y", String(pos.y - 8));
      text.setAttribute("class", "node-label");
      text.textContent = node.label;
      this.svg.appendChild(text);
      this.labelEls.set(node.label, text);
    }
  }

  /** Repaint membership/pick/rsvp classes without moving the layout. */
  setOverlay(opts: {
    solution?: string[];
    manualPick?: string[];
    rsvp?: Record<string, string>;
    recentlyAdded?: string[];
  }): void {
    const inSolution = new Set(opts.solution ?? []);
    const picked = new Set(opts.manualPick ?? []);
    const added = new Set(opts.recentlyAdded ?? []);
    for (const [label, el] of this.nodeEls) {
      const classes = ["node"];
      if (inSolution.has(label)) classes.push("node-solution");
      if (picked.has(label)) classes.push("node-picked");
      if (added.has(label)) classes.push("node-entering");
      const status = opts.rsvp?.[label];
      if (status === "confirmed") classes.push("node-confirmed");
      if (status === "declined") classes.push("node-declined");
      el.setAttribute("class", classes.join(" "));
    }
  }

  nodeElement(label: string): SVGCircleElement | undefined {
    return this.nodeEls.get(label);
  }
}
