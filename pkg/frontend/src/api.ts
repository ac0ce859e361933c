// Typed wrappers around the three service endpoints. Every failure is
// normalized into an ApiError carrying the HTTP status and the server's
// {code, message} body so the state machine can route on it.

export type Phase = "initial" | "stimulus";

export type Cell = { idea_id: number; text: string };
export type GridColumn = { family: number; cells: Cell[] };

export type SessionView = {
  session_id: string;
  phase: Phase;
  topic: string;
  instructions: string;
  grid: GridColumn[];
  entry_slots: number;
};

export type StatusView = {
  n: number;
  N: number;
  N_f: number;
  terminated: boolean;
  strategy: string;
};

export type SubmitResult = { n: number; terminated: boolean };

export type VoteRef = { column: number; row: number };
export type IdeaEntry = { column: number; text: string };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, "network", `cannot reach the server (${err})`);
  }
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // non-JSON body: fall through with the status alone
  }
  if (!response.ok) {
    const err = (body ?? {}) as { code?: string; message?: string };
    throw new ApiError(
      response.status,
      err.code ?? "http_error",
      err.message ?? `request failed with status ${response.status}`,
    );
  }
  return body as T;
}

export class IdeationApi {
  constructor(private readonly baseUrl = "") {}

  login(participantNo: number): Promise<SessionView> {
    return request<SessionView>(`${this.baseUrl}/api/login`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ participant_no: participantNo }),
    });
  }

  submit(
    sessionId: string,
    votes: VoteRef[],
    ideas: IdeaEntry[],
  ): Promise<SubmitResult> {
    return request<SubmitResult>(`${this.baseUrl}/api/submit`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ session_id: sessionId, votes, ideas }),
    });
  }

  status(): Promise<StatusView> {
    return request<StatusView>(`${this.baseUrl}/api/status`);
  }
}
