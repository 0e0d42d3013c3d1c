/** Organizer app: load a graph, solve, inspect the recommendation, compare a
 *  manual pick, record RSVP responses, replan, undo.
 *
 *  Every willingness/connectivity figure shown is the verbatim string of a
 *  number served by the planning service; the client never computes scores.
 */

import { ApiError, PlannerClient, type SessionState, type SolutionBody } from "./api.js";
import { GraphView } from "./graphview.js";
import * as st from "./state.js";

export interface AppConfig {
  k: number;
  budget: number;
  seed: number;
  algorithm: string;
}

const DEFAULT_CONFIG: AppConfig = { k: 5, budget: 2000, seed: 5, algorithm: "cbas-nd" };

export class App {
  state: st.PlannerViewState = st.initialState();
  client: PlannerClient;
  view: GraphView | null = null;
  session: SessionState | null = null;
  private pendingConfig: AppConfig = { ...DEFAULT_CONFIG };
  private upload: { edges: string; scores?: string } | null = null;
  private els: Record<string, HTMLElement> = {};
  private busy = false;

  constructor(
    private doc: Document,
    private root: HTMLElement,
    baseUrl: string,
  ) {
    this.client = new PlannerClient(baseUrl);
    this.buildDom();
  }

  // -- DOM scaffolding -------------------------------------------------------

  private buildDom(): void {
    this.root.innerHTML = `
      <div class="banner hidden" data-testid="banner">
        <span data-testid="banner-text"></span>
        <button data-testid="banner-dismiss">dismiss</button>
      </div>
      <section class="controls">
        <label>graph file <input type="file" data-testid="file-input" accept=".edges,.txt"></label>
        <label>k <input type="number" data-testid="k-input" value="${DEFAULT_CONFIG.k}" min="1"></label>
        <label>budget <input type="number" data-testid="budget-input" value="${DEFAULT_CONFIG.budget}" min="1"></label>
        <label>seed <input type="number" data-testid="seed-input" value="${DEFAULT_CONFIG.seed}"></label>
        <label>solver
          <select data-testid="algo-select">
            <option>cbas-nd</option><option>cbas</option><option>cbas-nd-g</option>
            <option>rgreedy</option><option>dgreedy</option><option>brute</option>
          </select>
        </label>
        <button data-testid="solve-btn" disabled>solve</button>
        <button data-testid="mode-btn" disabled>manual mode</button>
        <button data-testid="replan-btn" disabled>replan</button>
        <button data-testid="undo-btn" disabled>undo</button>
      </section>
      <section class="readouts">
        <div>solver group: <span data-testid="solution-members">-</span>
             willingness <span data-testid="solution-willingness">-</span>
             <span data-testid="solution-connected"></span></div>
        <div>manual pick: <span data-testid="pick-members">-</span>
             willingness <span data-testid="pick-willingness">-</span>
             <span data-testid="pick-badge"></span>
             <button data-testid="clear-pick-btn">clear</button></div>
        <div data-testid="replan-delta"></div>
      </section>
      <section class="graph" data-testid="graph-root"></section>
      <section class="why" data-testid="why-panel"></section>
      <section class="rsvp" data-testid="rsvp-panel"></section>
    `;
    const byId = (id: string) =>
      this.root.querySelector(`[data-testid="${id}"]`) as HTMLElement;
    for (const id of [
      "banner", "banner-text", "banner-dismiss", "file-input", "k-input",
      "budget-input", "seed-input", "algo-select", "solve-btn", "mode-btn",
      "replan-btn", "undo-btn", "solution-members", "solution-willingness",
      "solution-connected", "pick-members", "pick-willingness", "pick-badge",
      "clear-pick-btn", "replan-delta", "graph-root", "why-panel", "rsvp-panel",
    ]) {
      this.els[id] = byId(id);
    }
    this.els["solve-btn"].addEventListener("click", () => void this.solve());
    this.els["mode-btn"].addEventListener("click", () => this.toggleMode());
    this.els["replan-btn"].addEventListener("click", () => void this.replan());
    this.els["undo-btn"].addEventListener("click", () => this.undo());
    this.els["clear-pick-btn"].addEventListener("click", () => void this.clearPick());
    this.els["banner-dismiss"].addEventListener("click", () => {
      this.state = st.dismissBanner(this.state);
      this.renderBanner();
    });
    const fileInput = this.els["file-input"] as HTMLInputElement;
    fileInput.addEventListener("change", () => {
      const file = fileInput.files?.[0];
      if (file) {
        void file.text().then((text) => this.loadEdgeText(text));
      }
    });
  }

  // -- session management ------------------------------------------------------

  private readConfig(): AppConfig {
    return {
      k: Number((this.els["k-input"] as HTMLInputElement).value),
      budget: Number((this.els["budget-input"] as HTMLInputElement).value),
      seed: Number((this.els["seed-input"] as HTMLInputElement).value),
      algorithm: (this.els["algo-select"] as HTMLSelectElement).value,
    };
  }

  async loadEdgeText(edges: string, scores?: string): Promise<void> {
    this.upload = { edges, scores };
    await this.openSession();
  }

  /** Create (or, after a solve, fork) a session with the current controls. */
  async openSession(): Promise<void> {
    if (!this.upload) {
      this.fail("load a graph file first");
      return;
    }
    this.pendingConfig = this.readConfig();
    try {
      const created = await this.client.createSession({
        edges: this.upload.edges,
        scores: this.upload.scores,
        config: {
          k: this.pendingConfig.k,
          budget: this.pendingConfig.budget,
          seed: this.pendingConfig.seed,
          algorithm: this.pendingConfig.algorithm,
        },
      });
      this.session = await this.client.getSession(created.id);
      this.state = st.startSession(this.state, created.id, this.pendingConfig.k);
      this.els["graph-root"].innerHTML = "";
      this.view = new GraphView(this.doc, this.els["graph-root"], {
        onNodeClick: (label) => void this.onNodeClick(label),
      });
      this.view.render(this.session.graph);
      (this.els["solve-btn"] as HTMLButtonElement).disabled = false;
      (this.els["mode-btn"] as HTMLButtonElement).disabled = false;
      this.renderAll();
    } catch (err) {
      this.fail(errMessage(err));
    }
  }

  /** Parameter edits after a solve fork a fresh session on the same upload. */
  private async maybeFork(): Promise<void> {
    const cfg = this.readConfig();
    const changed = JSON.stringify(cfg) !== JSON.stringify(this.pendingConfig);
    if (changed && this.state.solved) {
      await this.openSession();
    } else if (changed) {
      this.pendingConfig = cfg;
      this.state = { ...this.state, k: cfg.k };
    }
  }

  // -- actions ---------------------------------------------------------------

  async solve(): Promise<void> {
    if (!this.state.sessionId || this.busy) return;
    await this.maybeFork();
    if (!this.state.sessionId) return;
    this.busy = true;
    try {
      const before = this.state.solution;
      const solution = await this.client.solve(this.state.sessionId);
      this.state = st.applySolution(this.state, solution);
      this.showDiff(before, solution);
    } catch (err) {
      this.fail(errMessage(err));
    } finally {
      this.busy = false;
      this.renderAll();
    }
  }

  async onNodeClick(label: string): Promise<void> {
    if (this.state.mode !== "manual") return;
    this.state = st.togglePick(this.state, label);
    this.renderAll();
    await this.evaluatePick();
  }

  async evaluatePick(): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const readout = await this.client.evaluate(
        this.state.sessionId, this.state.manualPick);
      this.state = st.setManualReadout(this.state, readout);
    } catch (err) {
      this.fail(errMessage(err));
    }
    this.renderAll();
  }

  async clearPick(): Promise<void> {
    this.state = st.clearPick(this.state);
    this.renderAll();
    await this.evaluatePick();
  }

  toggleMode(): void {
    this.state = st.setMode(this.state, this.state.mode === "auto" ? "manual" : "auto");
    this.els["mode-btn"].textContent =
      this.state.mode === "manual" ? "auto mode" : "manual mode";
    this.renderAll();
  }

  async rsvp(node: string, status: string): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const resp = await this.client.rsvp(this.state.sessionId, node, status);
      this.state = { ...this.state, rsvp: resp.rsvp };
    } catch (err) {
      this.fail(errMessage(err));
    }
    this.renderAll();
  }

  async replan(): Promise<void> {
    if (!this.state.sessionId || this.busy) return;
    if (!st.anyDeclines(this.state)) {
      this.fail("no declines recorded; nothing to replan");
      return;
    }
    this.busy = true;
    try {
      const before = this.state.solution;
      const solution = await this.client.replan(this.state.sessionId);
      this.state = st.applySolution(this.state, solution);
      this.showDiff(before, solution);
    } catch (err) {
      // failed replans leave the previous overlay untouched
      this.fail(errMessage(err));
    } finally {
      this.busy = false;
      this.renderAll();
    }
  }

  undo(): void {
    this.state = st.undoSolution(this.state);
    this.renderAll();
  }

  private fail(message: string): void {
    this.state = st.showBanner(this.state, message);
    this.renderBanner();
  }

  /** The delta readout shows both served values verbatim, never arithmetic. */
  private showDiff(before: SolutionBody | null, after: SolutionBody): void {
    const diff = st.membershipDiff(before, after);
    const parts: string[] = [];
    if (before) {
      parts.push(`willingness ${String(before.willingness)} → ${String(after.willingness)}`);
    }
    if (diff.added.length) parts.push(`joined: ${diff.added.join(", ")}`);
    if (diff.removed.length) parts.push(`left: ${diff.removed.join(", ")}`);
    this.els["replan-delta"].textContent = parts.join("  |  ");
    this.view?.setOverlay({
      solution: after.members,
      manualPick: this.state.manualPick,
      rsvp: this.state.rsvp,
      recentlyAdded: diff.added,
    });
  }

  // -- rendering ----------------------------------------------------------------

  private renderBanner(): void {
    const banner = this.els["banner"];
    if (this.state.banner) {
      banner.classList.remove("hidden");
      this.els["banner-text"].textContent = this.state.banner;
    } else {
      banner.classList.add("hidden");
      this.els["banner-text"].textContent = "";
    }
  }

  renderAll(): void {
    this.renderBanner();
    const sol = this.state.solution;
    this.els["solution-members"].textContent = sol ? sol.members.join(", ") : "-";
    this.els["solution-willingness"].textContent =
      sol ? String(sol.willingness) : "-";
    this.els["solution-connected"].textContent =
      sol ? (sol.connected ? "connected" : "disconnected") : "";

    const readout = this.state.manualReadout;
    this.els["pick-members"].textContent =
      this.state.manualPick.length ? this.state.manualPick.join(", ") : "-";
    this.els["pick-willingness"].textContent =
      readout ? String(readout.willingness) : "-";
    this.els["pick-badge"].textContent =
      readout && this.state.manualPick.length
        ? (readout.connected ? "connected" : "disconnected")
        : "";

    (this.els["replan-btn"] as HTMLButtonElement).disabled =
      !st.anyDeclines(this.state);
    (this.els["undo-btn"] as HTMLButtonElement).disabled =
      this.state.history.length === 0;

    this.renderWhy();
    this.renderRsvp();
    this.view?.setOverlay({
      solution: sol?.members ?? [],
      manualPick: this.state.manualPick,
      rsvp: this.state.rsvp,
    });
  }

  private renderWhy(): void {
    const panel = this.els["why-panel"];
    const sol = this.state.solution;
    if (!sol) {
      panel.innerHTML = "";
      return;
    }
    const rows = sol.members.map((m) =>
      `<tr><td>${m}</td><td data-eta="${m}">${String(sol.eta_contributions[m])}</td></tr>`).join("");
    const edges = sol.edge_contributions.map((e) =>
      `<li>${e.source} → ${e.target}: <span data-tau="${e.source}-${e.target}">${String(e.tau)}</span></li>`).join("");
    panel.innerHTML = `
      <h3>why this group</h3>
      <table><thead><tr><th>member</th><th>interest</th></tr></thead>
      <tbody>${rows}</tbody></table>
      <ul class="edge-list">${edges}</ul>`;
  }

  private renderRsvp(): void {
    const panel = this.els["rsvp-panel"];
    const sol = this.state.solution;
    if (!sol) {
      panel.innerHTML = "";
      return;
    }
    panel.innerHTML = "<h3>RSVP</h3>";
    for (const member of sol.members) {
      const row = this.doc.createElement("div");
      row.setAttribute("data-rsvp-row", member);
      const name = this.doc.createElement("span");
      name.textContent = `${member}: `;
      row.appendChild(name);
      const select = this.doc.createElement("select");
      select.setAttribute("data-rsvp", member);
      for (const status of ["pending", "confirmed", "declined"]) {
        const opt = this.doc.createElement("option");
        opt.value = status;
        opt.textContent = status;
        if ((this.state.rsvp[member] ?? "pending") === status) {
          opt.selected = true;
        }
        select.appendChild(opt);
      }
      select.addEventListener("change", () => void this.rsvp(member, select.value));
      row.appendChild(select);
      panel.appendChild(row);
    }
  }

  // test hooks
  text(id: string): string {
    return this.els[id]?.textContent ?? "";
  }
}

function errMessage(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}
