/** Planner view state and its pure transitions.
 *
 *  Invariants: the manual pick never exceeds k; the overlay always reflects
 *  the last server response; every replan result is pushed onto a history
 *  stack so the action is reversible client-side.
 */

import type { EvaluateBody, SolutionBody } from "./api.js";

export type SelectionMode = "auto" | "manual";

export interface PlannerViewState {
  sessionId: string | null;
  k: number;
  mode: SelectionMode;
  manualPick: string[];
  rsvp: Record<string, string>;
  solution: SolutionBody | null;
  manualReadout: EvaluateBody | null;
  history: SolutionBody[];
  banner: string | null;
  solved: boolean;
}

export function initialState(): PlannerViewState {
  return {
    sessionId: null,
    k: 0,
    mode: "auto",
    manualPick: [],
    rsvp: {},
    solution: null,
    manualReadout: null,
    history: [],
    banner: null,
    solved: false,
  };
}

export function startSession(state: PlannerViewState, sessionId: string, k: number): PlannerViewState {
  return { ...initialState(), sessionId, k };
}

/** Toggle a node in the manual pick; refuses to grow past k. */
export function togglePick(state: PlannerViewState, label: string): PlannerViewState {
  const picked = state.manualPick.includes(label);
  if (!picked && state.manualPick.length >= state.k) {
    return { ...state, banner: `pick limited to ${state.k} nodes` };
  }
  const manualPick = picked
    ? state.manualPick.filter((v) => v !== label)
    : [...state.manualPick, label];
  return { ...state, manualPick, manualReadout: null };
}

export function clearPick(state: PlannerViewState): PlannerViewState {
  return { ...state, manualPick: [], manualReadout: null };
}

export function setMode(state: PlannerViewState, mode: SelectionMode): PlannerViewState {
  return { ...state, mode };
}

export function applySolution(state: PlannerViewState, solution: SolutionBody): PlannerViewState {
  const history = state.solution ? [...state.history, state.solution] : state.history;
  const rsvp: Record<string, string> = {};
  for (const member of solution.members) {
    rsvp[member] = state.rsvp[member] ?? "pending";
  }
  return { ...state, solution, rsvp, history, solved: true, banner: null };
}

/** Restore the previous solution overlay (client-side undo of a replan). */
export function undoSolution(state: PlannerViewState): PlannerViewState {
  if (state.history.length === 0) {
    return { ...state, banner: "nothing to undo" };
  }
  const history = state.history.slice(0, -1);
  const solution = state.history[state.history.length - 1];
  const rsvp: Record<string, string> = {};
  for (const member of solution.members) {
    rsvp[member] = state.rsvp[member] ?? "pending";
  }
  return { ...state, solution, rsvp, history };
}

export function setRsvp(state: PlannerViewState, node: string, status: string): PlannerViewState {
  if (!state.solution || !state.solution.members.includes(node)) {
    return { ...state, banner: `${node} is not in the current group` };
  }
  return { ...state, rsvp: { ...state.rsvp, [node]: status } };
}

export function anyDeclines(state: PlannerViewState): boolean {
  return Object.values(state.rsvp).includes("declined");
}

export function setManualReadout(state: PlannerViewState, readout: EvaluateBody): PlannerViewState {
  return { ...state, manualReadout: readout };
}

export function showBanner(state: PlannerViewState, message: string): PlannerViewState {
  return { ...state, banner: message };
}

export function dismissBanner(state: PlannerViewState): PlannerViewState {
  return { ...state, banner: null };
}

/** Members entering/leaving between two overlays, for the replan animation. */
export function membershipDiff(
  before: SolutionBody | null,
  after: SolutionBody,
): { added: string[]; removed: string[] } {
  const old = new Set(before?.members ?? []);
  const next = new Set(after.members);
  return {
    added: after.members.filter((v) => !old.has(v)),
    removed: [...old].filter((v) => !next.has(v)),
  };
}
