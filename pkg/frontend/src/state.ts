/**
 * View models. Each panel is a small observable state machine over API
 * responses; rendering subscribes and redraws. No authoritative state lives
 * on the client: a reload rebuilds everything from GETs.
 */

import {
  ApiClient,
  ApiError,
  CaseSummary,
  ChatSession,
  ChatTurn,
  PromptDesign,
  RefinedReport,
} from "./api.js";

type Listener = () => void;

export interface Bubble {
  role: string;
  content: string;
  state: "ok" | "pending" | "failed";
}

export class Observable {
  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  protected emit(): void {
    for (const listener of this.listeners) listener();
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.kind}: ${err.message}`;
  return String(err);
}

export class CaseBrowser extends Observable {
  cases: CaseSummary[] = [];
  selected: CaseSummary | null = null;
  loading = false;
  error: string | null = null;

  constructor(private api: ApiClient) {
    super();
  }

  async load(): Promise<void> {
    this.loading = true;
    this.error = null;
    this.emit();
    try {
      this.cases = await this.api.listCases();
    } catch (err) {
      this.error = describe(err);
    } finally {
      this.loading = false;
      this.emit();
    }
  }

  async select(caseId: string): Promise<void> {
    try {
      this.selected = await this.api.getCase(caseId);
      this.error = null;
    } catch (err) {
      this.error = describe(err);
    }
    this.emit();
  }
}

export class RefinePanel extends Observable {
  design: PromptDesign = "P3";
  suppressMention = false;
  backendId: string;
  report: RefinedReport | null = null;
  pending = false;
  error: string | null = null;

  constructor(
    private api: ApiClient,
    public caseSummary: CaseSummary,
    backendId = "mock",
  ) {
    super();
    this.backendId = backendId;
  }

  setDesign(design: PromptDesign): void {
    this.design = design;
    this.emit();
  }

  setSuppress(value: boolean): void {
    this.suppressMention = value;
    this.emit();
  }

  async refine(): Promise<void> {
    if (this.pending) return;
    this.pending = true;
    this.error = null;
    this.emit();
    try {
      this.report = await this.api.refine(
        this.caseSummary.caseId,
        this.design,
        this.backendId,
        this.suppressMention,
      );
    } catch (err) {
      this.error = describe(err);
    } finally {
      this.pending = false;
      this.emit();
    }
  }
}

/**
 * Chat over one session. Exactly one turn may be in flight; a failed send
 * keeps the question visible (one bubble) with a retry affordance, and the
 * server persists nothing for failed turns, so retrying can never duplicate
 * the user message.
 */
export class ChatPanel extends Observable {
  turns: ChatTurn[] = [];
  pendingQuestion: string | null = null;
  failedQuestion: string | null = null;
  error: string | null = null;
  session: ChatSession | null = null;

  constructor(
    private api: ApiClient,
    public backendId = "mock",
  ) {
    super();
  }

  get busy(): boolean {
    return this.pendingQuestion !== null;
  }

  async open(caseId: string, reportId: string): Promise<void> {
    this.session = await this.api.openChat(caseId, reportId);
    this.turns = this.session.turns.slice();
    this.emit();
  }

  async reload(): Promise<void> {
    if (!this.session) return;
    const transcript = await this.api.getTranscript(this.session.sessionId);
    this.turns = transcript.turns.slice();
    this.emit();
  }

  /** Returns false when the send was refused (busy or blank). */
  async send(question: string): Promise<boolean> {
    if (!this.session || this.busy) return false;
    const trimmed = question.trim();
    if (!trimmed) return false;
    this.pendingQuestion = trimmed;
    this.failedQuestion = null;
    this.error = null;
    this.emit();
    try {
      const answer = await this.api.sendMessage(
        this.session.sessionId,
        trimmed,
        this.backendId,
      );
      this.turns.push({ role: "user", content: trimmed }, answer);
    } catch (err) {
      this.failedQuestion = trimmed;
      this.error = describe(err);
    } finally {
      this.pendingQuestion = null;
      this.emit();
    }
    return true;
  }

  async retry(): Promise<boolean> {
    const question = this.failedQuestion;
    if (!question) return false;
    this.failedQuestion = null;
    return this.send(question);
  }

  /** Bubbles to draw: confirmed turns plus at most one provisional user bubble. */
  bubbles(): Bubble[] {
    const out: Bubble[] = this.turns.map((t) => ({
      role: t.role,
      content: t.content,
      state: "ok",
    }));
    if (this.pendingQuestion !== null) {
      out.push({ role: "user", content: this.pendingQuestion, state: "pending" });
    } else if (this.failedQuestion !== null) {
      out.push({ role: "user", content: this.failedQuestion, state: "failed" });
    }
    return out;
  }
}
