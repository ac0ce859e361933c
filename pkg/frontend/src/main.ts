// Controller: owns the state, talks to the API, re-renders on every
// transition, and keeps exactly one request in flight. The session view is
// parked in sessionStorage so an accidental refresh can resume the open
// session (or reset cleanly); drafts and checkboxes are deliberately not
// persisted.

import { IdeationApi, SessionView } from "./api.js";
import { Handlers, render } from "./render.js";
import {
  UiState,
  beginSession,
  canSubmit,
  initialState,
  isEmptySubmission,
  loginFailed,
  setDraft,
  submissionPayload,
  submitFailed,
  submitSucceeded,
  toggleCheck,
} from "./state.js";

const STORAGE_KEY = "ecbw.session";

export type ControllerOptions = {
  api: IdeationApi;
  root: HTMLElement;
  storage?: Storage;
  // warn-before-empty-logout hook; defaults to window.confirm
  confirmEmpty?: (message: string) => boolean;
};

export type Controller = {
  state: () => UiState;
  login: (participantNo: number) => Promise<void>;
  submit: () => Promise<void>;
  reset: () => void;
};

export function createController(options: ControllerOptions): Controller {
  const { api, root } = options;
  const storage = options.storage ?? null;
  const confirmEmpty =
    options.confirmEmpty ??
    ((message: string) =>
      typeof window !== "undefined" && "confirm" in window
        ? window.confirm(message)
        : true);

  let state = restore();

  const handlers: Handlers = {
    onLogin: (participantNo) => void login(participantNo),
    onToggle: (column, row) => update(toggleCheck(state, column, row)),
    onDraft: (column, text) => update(setDraft(state, column, text), false),
    onSubmit: () => void submit(),
    onReset: () => reset(),
  };

  function update(next: UiState, repaint = true): void {
    state = next;
    if (repaint) render(root, state, handlers);
  }

  function restore(): UiState {
    const stored = storage?.getItem(STORAGE_KEY);
    if (stored) {
      try {
        return beginSession(initialState(), JSON.parse(stored) as SessionView);
      } catch {
        storage?.removeItem(STORAGE_KEY);
      }
    }
    return initialState();
  }

  async function login(participantNo: number): Promise<void> {
    if (state.pending) return;
    update({ ...state, pending: true, banner: null });
    try {
      const view = await api.login(participantNo);
      storage?.setItem(STORAGE_KEY, JSON.stringify(view));
      update(beginSession(state, view));
    } catch (err) {
      update(loginFailed(state, err));
    }
  }

  async function submit(): Promise<void> {
    const view = state.view;
    if (!view || !canSubmit(state)) return;
    if (
      state.screen === "stimulus" &&
      isEmptySubmission(state) &&
      !confirmEmpty("Log out without voting or writing anything?")
    ) {
      return;
    }
    update({ ...state, pending: true, banner: null });
    const { votes, ideas } = submissionPayload(state);
    try {
      const result = await api.submit(view.session_id, votes, ideas);
      storage?.removeItem(STORAGE_KEY);
      update(submitSucceeded(state, result));
    } catch (err) {
      const next = submitFailed(state, err);
      if (next.screen !== "stimulus" && next.screen !== "initial-entry") {
        storage?.removeItem(STORAGE_KEY);
      }
      update(next);
    }
  }

  function reset(): void {
    storage?.removeItem(STORAGE_KEY);
    update(initialState());
  }

  render(root, state, handlers);
  return { state: () => state, login, submit, reset };
}

// boot in a real browser; tests build their own controller
if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    createController({
      api: new IdeationApi(""),
      root,
      storage: window.sessionStorage,
    });
  }
}
