/**
 * Typed client for the pipeline HTTP API. Every view in the app is derived
 * from these responses; the client does no domain computation.
 */

export interface CaseSummary {
  caseId: string;
  createdAt: string;
  draftReport?: string;
  scores?: Record<string, number>;
  severityGrades?: Record<string, string>;
  segmentation?: Array<{ region: string; areaFraction: number; finding: string }>;
  groundTruthLabels?: Record<string, string | boolean>;
}

export interface RefinedReport {
  reportId: string;
  caseId: string;
  text: string;
  promptDesign: string;
  backendId: string;
  rawResponse: string;
  suppressMention: boolean;
  wordCount: number;
  cached?: boolean;
}

export interface ChatTurn {
  role: "user" | "assistant" | "system";
  content: string;
}

export interface ChatSession {
  sessionId: string;
  caseId: string;
  reportId: string;
  contextHeader: string;
  createdAt: string;
  turns: ChatTurn[];
}

export type PromptDesign = "P1" | "P2" | "P3";

export class ApiError extends Error {
  constructor(
    public kind: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseError(response: Response): Promise<ApiError> {
  let kind = "error";
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && body.error) {
      kind = body.error.kind ?? kind;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  return new ApiError(kind, message, response.status);
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError("unreachable", `API unreachable: ${String(err)}`, 0);
    }
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async listCases(): Promise<CaseSummary[]> {
    const body = await this.request<{ cases: CaseSummary[] }>("/api/cases");
    return body.cases;
  }

  getCase(caseId: string): Promise<CaseSummary> {
    return this.request<CaseSummary>(`/api/cases/${encodeURIComponent(caseId)}`);
  }

  refine(
    caseId: string,
    design: PromptDesign,
    backendId: string,
    suppressMention: boolean,
  ): Promise<RefinedReport> {
    return this.post<RefinedReport>(
      `/api/cases/${encodeURIComponent(caseId)}/refine`,
      { design, backendId, suppressMention },
    );
  }

  getReport(reportId: string): Promise<RefinedReport> {
    return this.request<RefinedReport>(
      `/api/reports/${encodeURIComponent(reportId)}`,
    );
  }

  openChat(caseId: string, reportId: string): Promise<ChatSession> {
    return this.post<ChatSession>("/api/chat", { caseId, reportId });
  }

  getTranscript(sessionId: string): Promise<ChatSession> {
    return this.request<ChatSession>(
      `/api/chat/${encodeURIComponent(sessionId)}`,
    );
  }

  sendMessage(
    sessionId: string,
    question: string,
    backendId: string,
  ): Promise<ChatTurn> {
    return this.post<ChatTurn>(
      `/api/chat/${encodeURIComponent(sessionId)}/messages`,
      { question, backendId },
    );
  }
}
