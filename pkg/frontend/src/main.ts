import { ApiClient } from "./api.js";
import { CaseBrowser, ChatPanel, RefinePanel } from "./state.js";
import {
  renderCaseBrowser,
  renderCaseSummary,
  renderChatPanel,
  renderRefinePanel,
} from "./ui.js";

const api = new ApiClient("");
const browser = new CaseBrowser(api);
let refinePanel: RefinePanel | null = null;
let chatPanel: ChatPanel | null = null;

const browserEl = document.getElementById("case-browser")!;
const summaryEl = document.getElementById("case-summary")!;
const refineEl = document.getElementById("refine-panel")!;
const chatEl = document.getElementById("chat-panel")!;

function redraw(): void {
  renderCaseBrowser(browserEl, browser, (caseId) => void selectCase(caseId));
  renderCaseSummary(summaryEl, browser.selected);
  if (refinePanel) {
    renderRefinePanel(refineEl, refinePanel);
  } else {
    refineEl.replaceChildren();
  }
  if (chatPanel) {
    renderChatPanel(chatEl, chatPanel);
  } else {
    chatEl.replaceChildren();
  }
}

async function selectCase(caseId: string): Promise<void> {
  await browser.select(caseId);
  if (!browser.selected) return;
  refinePanel = new RefinePanel(api, browser.selected);
  chatPanel = new ChatPanel(api);
  refinePanel.subscribe(() => {
    redraw();
    // A fresh report grounds a fresh session.
    const report = refinePanel?.report;
    if (report && chatPanel && chatPanel.session?.reportId !== report.reportId) {
      void chatPanel.open(report.caseId, report.reportId).catch(() => undefined);
    }
  });
  chatPanel.subscribe(redraw);
  redraw();
}

browser.subscribe(redraw);
void browser.load();
