/**
 * DOM renderers. Each render function redraws one panel's container from
 * its view model; main.ts subscribes them to state changes.
 */

import { CaseSummary, PromptDesign } from "./api.js";
import { wordDiff } from "./diff.js";
import { CaseBrowser, ChatPanel, RefinePanel } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

const GRADE_LABELS: Record<string, string> = {
  NoSign: "No sign",
  SmallPossibility: "Small possibility",
  Likely: "Likely",
  Definitely: "Definitely",
};

export function renderCaseBrowser(
  container: HTMLElement,
  browser: CaseBrowser,
  onSelect: (caseId: string) => void,
): void {
  container.replaceChildren();
  if (browser.error) {
    const banner = el("div", "error-banner", browser.error);
    const retry = el("button", "retry-button", "Retry");
    retry.addEventListener("click", () => void browser.load());
    banner.appendChild(retry);
    container.appendChild(banner);
    return;
  }
  if (browser.loading) {
    container.appendChild(el("div", "loading", "Loading cases..."));
    return;
  }
  if (browser.cases.length === 0) {
    container.appendChild(
      el("div", "empty-state", "No cases ingested yet."),
    );
    return;
  }
  const list = el("ul", "case-list");
  for (const summary of browser.cases) {
    const row = el("li", "case-row", summary.caseId);
    if (browser.selected?.caseId === summary.caseId) {
      row.classList.add("selected");
    }
    row.addEventListener("click", () => onSelect(summary.caseId));
    list.appendChild(row);
  }
  container.appendChild(list);
}

export function renderCaseSummary(
  container: HTMLElement,
  summary: CaseSummary | null,
): void {
  container.replaceChildren();
  if (!summary) {
    container.appendChild(el("div", "empty-state", "Select a case."));
    return;
  }
  container.appendChild(el("h3", "case-title", summary.caseId));
  if (summary.scores && summary.severityGrades) {
    const table = el("div", "score-table");
    for (const [key, value] of Object.entries(summary.scores)) {
      const row = el("div", "score-row");
      row.appendChild(el("span", "score-name", key));
      row.appendChild(el("span", "score-value", value.toFixed(2)));
      const grade = summary.severityGrades[key];
      if (grade) {
        const badge = el("span", `grade-badge grade-${grade}`, GRADE_LABELS[grade] ?? grade);
        row.appendChild(badge);
      }
      table.appendChild(row);
    }
    container.appendChild(table);
  }
  if (summary.draftReport) {
    container.appendChild(el("h4", undefined, "Draft report"));
    container.appendChild(el("p", "draft-report", summary.draftReport));
  }
}

export function renderRefinePanel(container: HTMLElement, panel: RefinePanel): void {
  container.replaceChildren();
  const controls = el("div", "refine-controls");
  const select = el("select", "design-select");
  for (const design of ["P1", "P2", "P3"] as PromptDesign[]) {
    const option = el("option", undefined, design);
    option.value = design;
    option.selected = panel.design === design;
    select.appendChild(option);
  }
  select.addEventListener("change", () => panel.setDesign(select.value as PromptDesign));
  controls.appendChild(select);

  const suppressLabel = el("label", "suppress-toggle");
  const suppress = el("input");
  suppress.type = "checkbox";
  suppress.checked = panel.suppressMention;
  suppress.addEventListener("change", () => panel.setSuppress(suppress.checked));
  suppressLabel.appendChild(suppress);
  suppressLabel.appendChild(document.createTextNode(" hide network mentions"));
  controls.appendChild(suppressLabel);

  const button = el("button", "refine-button", panel.pending ? "Refining..." : "Refine");
  button.disabled = panel.pending;
  button.addEventListener("click", () => void panel.refine());
  controls.appendChild(button);
  container.appendChild(controls);

  if (panel.error) {
    container.appendChild(el("div", "error-banner", panel.error));
    return;
  }
  if (!panel.report) return;

  if (panel.report.cached) {
    container.appendChild(el("span", "cached-badge", "cached"));
  }
  const pair = el("div", "report-pair");
  const draftCol = el("div", "report-column");
  draftCol.appendChild(el("h4", undefined, "Draft"));
  draftCol.appendChild(el("p", "draft-text", panel.caseSummary.draftReport ?? ""));
  const refinedCol = el("div", "report-column");
  refinedCol.appendChild(el("h4", undefined, "Refined"));
  const refined = el("p", "refined-text", panel.report.text);
  refinedCol.appendChild(refined);

  const diffCol = el("div", "report-column diff-view");
  diffCol.appendChild(el("h4", undefined, "Diff"));
  const diffBody = el("p", "diff-text");
  for (const op of wordDiff(panel.caseSummary.draftReport ?? "", panel.report.text)) {
    const span = el("span", `diff-${op.kind}`, op.text);
    diffBody.appendChild(span);
    diffBody.appendChild(document.createTextNode(" "));
  }
  diffCol.appendChild(diffBody);

  pair.appendChild(draftCol);
  pair.appendChild(refinedCol);
  pair.appendChild(diffCol);
  container.appendChild(pair);
}

export function renderChatPanel(container: HTMLElement, panel: ChatPanel): void {
  container.replaceChildren();
  if (!panel.session) {
    container.appendChild(
      el("div", "empty-state", "Refine a report to start chatting."),
    );
    return;
  }
  const transcript = el("div", "chat-transcript");
  for (const bubble of panel.bubbles()) {
    const node = el("div", `chat-bubble ${bubble.role} ${bubble.state}`, bubble.content);
    if (bubble.state === "pending") {
      node.appendChild(el("span", "pending-indicator", " ..."));
    }
    if (bubble.state === "failed") {
      const retry = el("button", "retry-button", "Retry");
      retry.addEventListener("click", () => void panel.retry());
      node.appendChild(retry);
    }
    transcript.appendChild(node);
  }
  container.appendChild(transcript);

  const form = el("div", "chat-form");
  const input = el("input", "chat-input");
  input.type = "text";
  input.placeholder = "Ask about this exam...";
  input.disabled = panel.busy;
  const send = el("button", "send-button", "Send");
  send.disabled = panel.busy;
  const submit = () => {
    void panel.send(input.value);
    input.value = "";
  };
  send.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") submit();
  });
  form.appendChild(input);
  form.appendChild(send);
  container.appendChild(form);
}
