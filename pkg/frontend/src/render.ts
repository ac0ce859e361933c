// DOM rendering: one render(root, state, handlers) call per state change.
// The stimulus screen reproduces the worksheet layout: three columns of
// three gray stimulus cells (oldest on top, blanks stay gray without a
// checkbox), a vote checkbox under each filled cell, and a red-bordered
// entry box at the foot of every column.

import {
  DRAFT_MAX_CHARS,
  GRID_COLUMNS,
  GRID_ROWS,
  UiState,
  canSubmit,
} from "./state.js";

export type Handlers = {
  onLogin: (participantNo: number) => void;
  onToggle: (column: number, row: number) => void;
  onDraft: (column: number, text: string) => void;
  onSubmit: () => void;
  onReset: () => void;
};

export function render(root: HTMLElement, state: UiState, handlers: Handlers): void {
  root.textContent = "";
  if (state.banner) {
    const banner = el("div", "banner");
    banner.setAttribute("role", "alert");
    banner.textContent = state.banner;
    root.appendChild(banner);
  }
  switch (state.screen) {
    case "login":
      renderLogin(root, state, handlers);
      break;
    case "initial-entry":
    case "stimulus":
      renderSession(root, state, handlers);
      break;
    case "done":
      renderDone(root, state, handlers);
      break;
    case "terminated":
      renderTerminated(root);
      break;
  }
}

function renderLogin(root: HTMLElement, state: UiState, handlers: Handlers): void {
  const form = el("form", "login-form") as HTMLFormElement;
  const label = el("label") as HTMLLabelElement;
  label.htmlFor = "participant-no";
  label.textContent = "Participant number";
  const input = el("input") as HTMLInputElement;
  input.id = "participant-no";
  input.type = "number";
  input.min = "1";
  input.required = true;
  const button = el("button") as HTMLButtonElement;
  button.id = "login-button";
  button.type = "submit";
  button.textContent = "Log in";
  button.disabled = state.pending;
  form.append(label, input, button);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const participant = Number.parseInt(input.value, 10);
    if (Number.isInteger(participant) && participant > 0) {
      handlers.onLogin(participant);
    }
  });
  root.appendChild(form);
}

function renderSession(root: HTMLElement, state: UiState, handlers: Handlers): void {
  const view = state.view;
  if (!view) return;

  const topic = el("h1", "topic");
  topic.textContent = view.topic;
  const instructions = el("p", "instructions");
  instructions.textContent = view.instructions;
  root.append(topic, instructions);

  const grid = el("div", "grid");
  grid.id = "grid";
  for (let c = 0; c < GRID_COLUMNS; c++) {
    const columnView = view.grid[c];
    const column = el("div", "column");
    if (state.screen === "stimulus") {
      for (let r = 0; r < GRID_ROWS; r++) {
        column.appendChild(renderCell(state, handlers, c, r));
      }
    }
    column.appendChild(renderEntry(state, handlers, c));
    if (columnView) column.dataset.family = String(columnView.family);
    grid.appendChild(column);
  }
  root.appendChild(grid);

  const submit = el("button") as HTMLButtonElement;
  submit.id = "submit-button";
  submit.textContent =
    state.screen === "initial-entry" ? "Suggest ideas and log out" : "Log out";
  submit.disabled = !canSubmit(state);
  submit.addEventListener("click", () => handlers.onSubmit());
  root.appendChild(submit);
}

function renderCell(
  state: UiState,
  handlers: Handlers,
  c: number,
  r: number,
): HTMLElement {
  const view = state.view!;
  const cellView = view.grid[c]?.cells[r];
  const wrapper = el("div", "cell-slot");
  const box = el("div", cellView ? "cell" : "cell cell-empty");
  box.dataset.testid = `cell-${c}-${r}`;
  if (cellView) {
    box.textContent = cellView.text;
    const voteLabel = el("label", "vote") as HTMLLabelElement;
    const checkbox = el("input") as HTMLInputElement;
    checkbox.type = "checkbox";
    checkbox.dataset.testid = `vote-${c}-${r}`;
    checkbox.checked = state.checks[c]?.[r] ?? false;
    checkbox.setAttribute("aria-label", `Vote for: ${cellView.text}`);
    checkbox.addEventListener("change", () => handlers.onToggle(c, r));
    voteLabel.append(checkbox, document.createTextNode(" vote"));
    wrapper.append(box, voteLabel);
  } else {
    // empty slot: gray box, no checkbox
    wrapper.append(box);
  }
  return wrapper;
}

function renderEntry(state: UiState, handlers: Handlers, c: number): HTMLElement {
  const wrapper = el("div", "entry");
  const textarea = el("textarea") as HTMLTextAreaElement;
  textarea.dataset.testid = `entry-${c}`;
  textarea.maxLength = DRAFT_MAX_CHARS;
  textarea.placeholder = "Your idea";
  textarea.value = state.drafts[c] ?? "";
  const counter = el("div", "counter");
  counter.textContent = `${textarea.value.length}/${DRAFT_MAX_CHARS}`;
  textarea.addEventListener("input", () => {
    handlers.onDraft(c, textarea.value);
    counter.textContent = `${Math.min(textarea.value.length, DRAFT_MAX_CHARS)}/${DRAFT_MAX_CHARS}`;
  });
  wrapper.append(textarea, counter);
  return wrapper;
}

function renderDone(root: HTMLElement, state: UiState, handlers: Handlers): void {
  const message = el("p", "done");
  message.id = "done-message";
  message.textContent =
    state.ideaCount === null
      ? "Your session was already recorded. Thank you!"
      : `Thank you! The pool now holds ${state.ideaCount} ideas.`;
  const again = el("button") as HTMLButtonElement;
  again.id = "again-button";
  again.textContent = "Log in again";
  again.addEventListener("click", () => handlers.onReset());
  root.append(message, again);
}

function renderTerminated(root: HTMLElement): void {
  const message = el("p", "terminated");
  message.id = "terminated-message";
  message.textContent =
    "This ideation session has collected all the ideas it needs. Thank you!";
  root.appendChild(message);
}

function el(tag: string, className?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  return node;
}
