import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { CaseBrowser } from "../src/state.js";
import { renderCaseBrowser, renderCaseSummary } from "../src/ui.js";
import { MockServer } from "./mockServer.js";

function seedThree(server: MockServer): void {
  for (const id of ["case-a", "case-b", "case-c"]) {
    server.seedCase({
      caseId: id,
      createdAt: "2026-01-01T00:00:00+00:00",
      draftReport: `Draft for ${id}.`,
      scores: { cardiomegaly: 0.9, edema: 0.1 },
      severityGrades: { cardiomegaly: "Definitely", edema: "NoSign" },
    });
  }
}

describe("case browser", () => {
  let server: MockServer;
  let browser: CaseBrowser;
  let container: HTMLElement;

  beforeEach(() => {
    server = new MockServer();
    browser = new CaseBrowser(new ApiClient("", server.fetch));
    container = document.createElement("div");
    document.body.replaceChildren(container);
  });

  it("renders one row per ingested case", async () => {
    seedThree(server);
    await browser.load();
    renderCaseBrowser(container, browser, () => undefined);
    const rows = container.querySelectorAll(".case-row");
    expect(rows).toHaveLength(3);
    expect(rows[0]!.textContent).toBe("case-a");
  });

  it("shows the empty state for an empty store", async () => {
    await browser.load();
    renderCaseBrowser(container, browser, () => undefined);
    expect(container.querySelector(".empty-state")).not.toBeNull();
    expect(container.querySelectorAll(".case-row")).toHaveLength(0);
  });

  it("shows an error banner with retry when the server is down", async () => {
    server.down = true;
    await browser.load();
    renderCaseBrowser(container, browser, () => undefined);
    const banner = container.querySelector(".error-banner");
    expect(banner).not.toBeNull();
    expect(banner!.textContent).toContain("unreachable");
    expect(container.querySelector(".retry-button")).not.toBeNull();
  });

  it("recovers after retry once the server is back", async () => {
    server.down = true;
    await browser.load();
    expect(browser.error).not.toBeNull();
    server.down = false;
    seedThree(server);
    await browser.load();
    renderCaseBrowser(container, browser, () => undefined);
    expect(browser.error).toBeNull();
    expect(container.querySelectorAll(".case-row")).toHaveLength(3);
  });

  it("selecting a case loads its detail with grade badges", async () => {
    seedThree(server);
    await browser.load();
    await browser.select("case-b");
    expect(browser.selected?.caseId).toBe("case-b");
    const detail = document.createElement("div");
    renderCaseSummary(detail, browser.selected);
    const badges = [...detail.querySelectorAll(".grade-badge")].map(
      (b) => b.textContent,
    );
    expect(badges).toContain("Definitely");
    expect(badges).toContain("No sign");
  });
});
