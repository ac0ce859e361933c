/**
 * Full round trip against the real service: seed a store file, launch the
 * Python server, and drive the rendered DOM the way a participant would —
 * log in, check the grid, tick four votes, write three ideas, log out —
 * then confirm via /api/status that the pool grew by three.
 *
 * The window URL below matches the server origin: in production the UI is
 * served same-origin by the service, so the test environment mirrors that
 * (otherwise happy-dom would enforce CORS preflights the API never needs).
 *
 * @vitest-environment happy-dom
 * @vitest-environment-options {"url": "http://127.0.0.1:18731/"}
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { IdeationApi } from "../src/api.js";
import { createController, Controller } from "../src/main.js";

const PORT = 18731;
const BASE = `http://127.0.0.1:${PORT}`;

// three families x three ideas, all fresh, authored by participants 101-103
// so participant 7 sees a full 3x3 grid
function seedEvents(): string {
  const lines: object[] = [
    {
      kind: "config",
      target_idea_count: 210,
      family_count: 3,
      correction_a: 3.0,
      correction_b: 1.5,
      correction_c: 2.0,
    },
  ];
  let id = 0;
  const parents = [0, 0, 0, 1, 2, 3, 4, 5, 6];
  const families = [1, 2, 3, 1, 2, 3, 1, 2, 3];
  const generations = [1, 1, 1, 2, 2, 2, 3, 3, 3];
  for (let i = 0; i < 9; i++) {
    id += 1;
    lines.push({
      kind: "idea",
      id,
      text: `seed idea ${id}`,
      participant: 101 + (i % 3),
      parent: parents[i],
      family: families[i],
      generation: generations[i],
    });
  }
  return lines.map((l) => JSON.stringify(l)).join("\n") + "\n";
}

async function waitFor(
  check: () => boolean,
  what: string,
  timeoutMs = 10_000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error(`timed out waiting for ${what}`);
}

async function waitForServer(timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError = "";
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/status`);
      if (response.ok) return;
      lastError = `status ${response.status}`;
    } catch (err) {
      lastError = String(err);
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error(`service did not come up on ${BASE}: ${lastError}`);
}

let server: ChildProcess;
let serverLog = "";

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "ecbw-ui-"));
  writeFileSync(join(dir, "events.jsonl"), seedEvents());
  writeFileSync(
    join(dir, "service.json"),
    JSON.stringify({
      store_path: "events.jsonl",
      strategy: "ecbw",
      topic: "How can we talk across departments every day?",
      instructions: "Vote for the ideas you like, then add your own.",
      port: PORT,
    }),
  );
  server = spawn("python3", ["-m", "ecbw", "serve", "service.json"], {
    cwd: dir,
    stdio: ["ignore", "pipe", "pipe"],
  });
  server.stdout?.on("data", (chunk) => (serverLog += chunk));
  server.stderr?.on("data", (chunk) => (serverLog += chunk));
  try {
    await waitForServer();
  } catch (err) {
    throw new Error(`${err}\nserver output:\n${serverLog}`);
  }
});

afterAll(() => {
  server?.kill();
});

describe("participant round trip", () => {
  let controller: Controller;
  let root: HTMLElement;

  it("logs in and sees nine stimulus cells and three entry boxes", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app")!;
    controller = createController({
      api: new IdeationApi(BASE),
      root,
      confirmEmpty: () => true,
    });

    const input = root.querySelector<HTMLInputElement>("#participant-no")!;
    input.value = "7";
    root
      .querySelector("form")!
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));

    await waitFor(() => controller.state().screen === "stimulus", "stimulus view");
    const filled = root.querySelectorAll(".cell:not(.cell-empty)");
    expect(filled.length).toBe(9);
    expect(root.querySelectorAll('input[type="checkbox"]').length).toBe(9);
    expect(root.querySelectorAll("textarea").length).toBe(3);
    expect(root.textContent).toContain("How can we talk across departments");
  });

  it("votes, writes three ideas, submits, and the pool grows by three", async () => {
    const before = await new IdeationApi(BASE).status();
    expect(before.n).toBe(9);

    for (const [c, r] of [
      [0, 0],
      [0, 2],
      [1, 1],
      [2, 0],
    ] as const) {
      root
        .querySelector<HTMLInputElement>(`[data-testid="vote-${c}-${r}"]`)!
        .dispatchEvent(new Event("change", { bubbles: true }));
    }
    for (const c of [0, 1, 2]) {
      const textarea = root.querySelector<HTMLTextAreaElement>(
        `[data-testid="entry-${c}"]`,
      )!;
      textarea.value = `participant seven's idea in column ${c}`;
      textarea.dispatchEvent(new Event("input", { bubbles: true }));
    }

    root.querySelector<HTMLButtonElement>("#submit-button")!.click();
    await waitFor(() => controller.state().screen === "done", "done screen");
    expect(root.querySelector("#done-message")!.textContent).toContain("12");

    const after = await new IdeationApi(BASE).status();
    expect(after.n).toBe(before.n + 3);
    expect(after.terminated).toBe(false);
  });

  it("a second login sees the grown pool and no own ideas", async () => {
    const api = new IdeationApi(BASE);
    const view = await api.login(7);
    // participant 7 wrote three ideas; none may come back as stimuli
    for (const column of view.grid) {
      for (const cell of column.cells) {
        expect(cell.text).not.toContain("participant seven");
      }
    }
    const result = await api.submit(view.session_id, [{ column: 0, row: 0 }], []);
    expect(result.n).toBe(12);
  });
});
