// The five screens as a pure state machine. Transitions take a state and
// return a new one; nothing here touches the DOM or the network, so every
// rule (draft cap, submit gating, error routing) is unit-testable.

import { ApiError, SessionView, SubmitResult, VoteRef, IdeaEntry } from "./api.js";

export const GRID_COLUMNS = 3;
export const GRID_ROWS = 3;
export const DRAFT_MAX_CHARS = 500;

export type Screen =
  | "login"
  | "initial-entry"
  | "stimulus"
  | "done"
  | "terminated";

export type UiState = {
  screen: Screen;
  view: SessionView | null;
  checks: boolean[][]; // [column][row], only over real cells
  drafts: string[]; // one per column / entry slot
  pending: boolean; // a request is in flight; submit is disabled
  banner: string | null; // retryable error message, if any
  ideaCount: number | null; // server's n after our submit
};

export function initialState(): UiState {
  return {
    screen: "login",
    view: null,
    checks: [],
    drafts: ["", "", ""],
    pending: false,
    banner: null,
    ideaCount: null,
  };
}

export function beginSession(state: UiState, view: SessionView): UiState {
  return {
    ...state,
    screen: view.phase === "initial" ? "initial-entry" : "stimulus",
    view,
    checks: view.grid.map((column) => column.cells.map(() => false)),
    drafts: Array(Math.max(view.entry_slots, view.grid.length, 1)).fill(""),
    pending: false,
    banner: null,
  };
}

export function loginFailed(state: UiState, error: unknown): UiState {
  if (error instanceof ApiError && error.status === 409) {
    return { ...state, screen: "terminated", pending: false, banner: null };
  }
  return { ...state, pending: false, banner: describe(error) };
}

export function toggleCheck(state: UiState, column: number, row: number): UiState {
  const checks = state.checks.map((col) => [...col]);
  if (checks[column] === undefined || checks[column][row] === undefined) {
    return state; // empty cell: nothing to toggle
  }
  checks[column][row] = !checks[column][row];
  return { ...state, checks };
}

export function setDraft(state: UiState, column: number, text: string): UiState {
  if (column < 0 || column >= state.drafts.length) return state;
  const drafts = [...state.drafts];
  drafts[column] = text.slice(0, DRAFT_MAX_CHARS);
  return { ...state, drafts };
}

export function canSubmit(state: UiState): boolean {
  if (state.pending) return false;
  if (state.screen === "initial-entry") {
    // initial participants suggest exactly three ideas
    return state.drafts.every((d) => d.trim().length > 0);
  }
  return state.screen === "stimulus";
}

export function isEmptySubmission(state: UiState): boolean {
  const anyCheck = state.checks.some((col) => col.some(Boolean));
  const anyDraft = state.drafts.some((d) => d.trim().length > 0);
  return !anyCheck && !anyDraft;
}

export function submissionPayload(state: UiState): {
  votes: VoteRef[];
  ideas: IdeaEntry[];
} {
  const votes: VoteRef[] = [];
  state.checks.forEach((col, c) =>
    col.forEach((checked, r) => {
      if (checked) votes.push({ column: c, row: r });
    }),
  );
  const ideas: IdeaEntry[] = [];
  state.drafts.forEach((text, c) => {
    if (text.trim().length > 0) ideas.push({ column: c, text });
  });
  return { votes, ideas };
}

export function submitSucceeded(state: UiState, result: SubmitResult): UiState {
  return {
    ...state,
    screen: "done",
    pending: false,
    banner: null,
    ideaCount: result.n,
  };
}

export function submitFailed(state: UiState, error: unknown): UiState {
  if (error instanceof ApiError && error.status === 409) {
    if (error.code === "already_submitted") {
      // the commit landed earlier (double click, refresh): show done
      return { ...state, screen: "done", pending: false, banner: null };
    }
    return { ...state, screen: "terminated", pending: false, banner: null };
  }
  if (error instanceof ApiError && error.status === 404) {
    // session expired server-side; start over
    return {
      ...initialState(),
      banner: "The session expired. Please log in again.",
    };
  }
  return { ...state, pending: false, banner: describe(error) };
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return `${error.message} — please try again`;
  }
  return `unexpected error: ${error}`;
}
