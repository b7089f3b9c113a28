import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import {
  App,
  CompactDoc,
  DetailedDoc,
  EMPTY_FILTERS,
  GateReport,
  POLL_INTERVAL_MS,
  ResultEntry,
  StatusDoc,
  detailedQuery,
  filterSummary,
  percentText,
  progressLabel,
  renderCompact,
  renderDetailed,
  renderRejection,
  renderWarnings,
} from "../src/app";

const here = dirname(fileURLToPath(import.meta.url));
const pageHtml = readFileSync(join(here, "..", "public", "index.html"), "utf-8");

/** Mount the real page body so tests exercise the shipped markup. */
function mountPage(): void {
  const body = pageHtml.match(/<body>([\s\S]*)<\/body>/)![1];
  document.body.innerHTML = body.replace(/<script[\s\S]*?<\/script>/g, "");
}

function entry(rank: number, over: Partial<ResultEntry> = {}): ResultEntry {
  return {
    rank,
    original_rank: rank,
    class_index: rank - 1,
    rendition_id: `gloss_${rank}`,
    gloss: `SIGN${rank}`,
    probability: rank === 1 ? 0.61 : 0.05,
    confidence: rank === 1 ? "probably" : "unlikely",
    movement: "repeated",
    hands: "one",
    location: "torso",
    handshape: rank % 2 === 1 ? "flat-b" : null,
    example_media: `synth:class=${rank - 1},seed=9`,
    ...over,
  };
}

const compactDoc: CompactDoc = {
  view: "compact",
  primary: entry(1),
  grid: [2, 3, 4, 5, 6, 7].map((r) => entry(r)),
};

const detailedDoc: DetailedDoc = {
  view: "detailed",
  entries: Array.from({ length: 10 }, (_, i) => entry(i + 1)),
};

const rejectReport: GateReport = {
  verdict: "reject",
  summary: "Submission rejected: the upload ended before the clip finished.",
  issues: [
    {
      code: "incomplete_upload",
      severity: "error",
      message: "The upload ended before the clip finished.",
      suggestion: "Record the sign again and wait for the upload to complete.",
    },
  ],
  suggestions: [
    "Record the sign again and wait for the upload to complete.",
    "Check your network connection before re-submitting.",
  ],
};

const warnReport: GateReport = {
  verdict: "proceed_with_warnings",
  summary: "Submission accepted with 1 warning.",
  issues: [
    {
      code: "hands_not_visible",
      severity: "warning",
      message: "Your hands are not clearly visible.",
      suggestion: "Keep both hands inside the frame.",
    },
  ],
  suggestions: ["Keep both hands inside the frame."],
};

function jsonResponse(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Scripted service: routes by URL, pops status docs off a queue. */
class MockApi {
  calls: string[] = [];
  lastForm: FormData | null = null;
  statusQueue: StatusDoc[] = [];
  compact: CompactDoc = compactDoc;
  detailed: DetailedDoc = detailedDoc;

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    this.calls.push(`${init?.method ?? "GET"} ${url}`);
    if (url === "/api/v1/vocabulary") {
      return jsonResponse({ count: 2, entries: [entry(1), entry(2)] });
    }
    if (url === "/api/v1/submissions") {
      this.lastForm = init?.body as FormData;
      return jsonResponse({ id: "s1", state: "received" }, 202);
    }
    if (url.includes("/status")) {
      const doc = this.statusQueue.length > 1 ? this.statusQueue.shift()! : this.statusQueue[0];
      return jsonResponse(doc);
    }
    if (url.includes("view=compact")) return jsonResponse(this.compact);
    if (url.includes("view=detailed")) return jsonResponse(this.detailed);
    throw new Error(`unexpected request ${url}`);
  };

  statusCalls(): number {
    return this.calls.filter((c) => c.includes("/status")).length;
  }
}

function predicting(progress: number, elapsed: number, total: number): StatusDoc {
  return {
    id: "s1",
    state: "predicting",
    progress,
    eta_s: total - elapsed,
    elapsed_s: elapsed,
    predicted_total_s: total,
  };
}

function terminal(state: string, report?: GateReport): StatusDoc {
  return {
    id: "s1",
    state,
    progress: state === "done" ? 1.0 : 0.0,
    eta_s: 0,
    elapsed_s: 3.3,
    predicted_total_s: 3.2,
    report,
  };
}

async function flush(): Promise<void> {
  for (let i = 0; i < 8; i++) await Promise.resolve();
}

async function makeApp(api: MockApi): Promise<App> {
  mountPage();
  const app = new App(document, api.fetch);
  await flush(); // vocabulary load
  const input = document.getElementById("file-input") as HTMLInputElement;
  Object.defineProperty(input, "files", {
    value: [new File(["POSE v1"], "clip.pose")],
    configurable: true,
  });
  return app;
}

describe("formatting", () => {
  it("renders elapsed/total with one decimal each", () => {
    expect(progressLabel(1.23, 3.456)).toBe("1.2/3.5s");
    expect(progressLabel(0, 10)).toBe("0.0/10.0s");
  });

  it("formats percentages to one decimal", () => {
    expect(percentText(0.61)).toBe("61.0%");
    expect(percentText(1)).toBe("100.0%");
  });

  it("summarizes empty filters as None", () => {
    expect(filterSummary(EMPTY_FILTERS)).toBe("Applied filter: None");
  });

  it("names active filters", () => {
    expect(filterSummary({ ...EMPTY_FILTERS, hands: "one" })).toBe(
      "Applied filter: hands=one",
    );
    expect(
      filterSummary({ ...EMPTY_FILTERS, hands: "two", location: "torso" }),
    ).toBe("Applied filter: location=torso, hands=two");
  });

  it("builds detailed queries from non-empty filters only", () => {
    expect(detailedQuery(EMPTY_FILTERS)).toBe("view=detailed");
    const q = detailedQuery({ ...EMPTY_FILTERS, hands: "one" });
    expect(q).toContain("view=detailed");
    expect(q).toContain("hands=one");
    expect(q).not.toContain("location");
  });
});

describe("result rendering", () => {
  beforeEach(mountPage);

  function resultsRoot(): HTMLElement {
    return document.getElementById("results-area")!;
  }

  it("compact view shows one primary card plus a grid of six", () => {
    renderCompact(resultsRoot(), compactDoc, false);
    expect(document.querySelectorAll(".card.primary")).toHaveLength(1);
    expect(document.querySelectorAll(".grid .card")).toHaveLength(6);
    expect(resultsRoot().textContent).toContain("SIGN1");
    expect(resultsRoot().textContent).toContain("probably");
  });

  it("keeps raw probabilities out of the DOM when the toggle is off", () => {
    renderCompact(resultsRoot(), compactDoc, false);
    const html = resultsRoot().innerHTML;
    expect(html).not.toContain("%");
    expect(html).not.toContain("0.61");
    expect(html).not.toContain("61");
  });

  it("shows percentages when the toggle is on", () => {
    renderCompact(resultsRoot(), compactDoc, true);
    expect(resultsRoot().textContent).toContain("61.0%");
  });

  it("detailed view renders every entry with the filter summary", () => {
    renderDetailed(resultsRoot(), detailedDoc, false, EMPTY_FILTERS);
    expect(document.querySelectorAll(".grid .card")).toHaveLength(10);
    expect(resultsRoot().textContent).toContain("Applied filter: None");
  });

  it("detailed view explains an empty filter result", () => {
    renderDetailed(
      resultsRoot(),
      { view: "detailed", entries: [] },
      false,
      { ...EMPTY_FILTERS, hands: "two" },
    );
    expect(resultsRoot().textContent).toContain("No entries match the filter.");
    expect(resultsRoot().textContent).toContain("Applied filter: hands=two");
  });

  it("rejection renders a red box with one bullet per suggestion", () => {
    const messages = document.getElementById("message-area")!;
    renderRejection(messages, rejectReport);
    const box = messages.querySelector(".error-box")!;
    expect(box).toBeTruthy();
    expect(box.textContent).toContain("Submission rejected");
    expect(box.querySelectorAll("li")).toHaveLength(2);
  });

  it("warnings render a yellow box listing warning messages", () => {
    const messages = document.getElementById("message-area")!;
    renderWarnings(messages, warnReport);
    const box = messages.querySelector(".warning-box")!;
    expect(box).toBeTruthy();
    expect(box.querySelectorAll("li")).toHaveLength(1);
    expect(box.textContent).toContain("hands are not clearly visible");
  });
});

describe("submission flow", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it("polls at 2Hz or faster", () => {
    expect(POLL_INTERVAL_MS).toBeLessThanOrEqual(500);
  });

  it("uploads with trim bounds and walks to done", async () => {
    const api = new MockApi();
    api.statusQueue = [
      predicting(0.375, 1.2, 3.2),
      terminal("done", {
        verdict: "proceed",
        summary: "Submission looks good.",
        issues: [],
        suggestions: [],
      }),
    ];
    const app = await makeApp(api);
    (document.getElementById("trim-start") as HTMLInputElement).value = "1.0";
    (document.getElementById("trim-end") as HTMLInputElement).value = "2.0";

    await app.submit();
    expect(api.calls).toContain("POST /api/v1/submissions");
    expect(api.lastForm!.get("trim_start_s")).toBe("1.0");
    expect(api.lastForm!.get("trim_end_s")).toBe("2.0");
    expect(app.polling).toBe(true);

    await app.tick();
    const bar = document.getElementById("progress-bar")!;
    // the DOM carries the status endpoint's progress value verbatim
    expect(bar.dataset.progress).toBe("0.375");
    expect(bar.style.width).toBe("37.5%");
    expect(document.getElementById("progress-text")!.textContent).toBe("1.2/3.2s");

    await app.tick();
    await flush();
    expect(app.polling).toBe(false);
    expect(document.getElementById("progress-bar")!.dataset.progress).toBe("1");
    expect(document.querySelectorAll(".card.primary")).toHaveLength(1);
    expect(document.querySelectorAll(".grid .card")).toHaveLength(6);
    expect((document.getElementById("more-results") as HTMLButtonElement).hidden).toBe(false);
    expect(document.querySelector(".error-box")).toBeNull();
    expect(document.querySelector(".warning-box")).toBeNull();
  });

  it("keeps percentages out of the DOM until toggled on", async () => {
    const api = new MockApi();
    api.statusQueue = [terminal("done")];
    const app = await makeApp(api);
    await app.submit();
    await app.tick();
    await flush();

    const results = document.getElementById("results-area")!;
    expect((document.getElementById("show-percent") as HTMLInputElement).checked).toBe(false);
    expect(results.innerHTML).not.toContain("%");

    const toggle = document.getElementById("show-percent") as HTMLInputElement;
    toggle.checked = true;
    toggle.dispatchEvent(new Event("change"));
    expect(results.textContent).toContain("61.0%");

    toggle.checked = false;
    toggle.dispatchEvent(new Event("change"));
    expect(results.innerHTML).not.toContain("%");
  });

  it("fetches the detailed view with the hands filter applied", async () => {
    const api = new MockApi();
    api.statusQueue = [terminal("done")];
    const app = await makeApp(api);
    await app.submit();
    await app.tick();
    await flush();

    await app.showDetailed();
    expect(document.querySelectorAll(".grid .card")).toHaveLength(10);
    expect((document.getElementById("filter-bar") as HTMLElement).hidden).toBe(false);

    const hands = document.getElementById("filter-hands") as HTMLSelectElement;
    hands.value = "one";
    await app.showDetailed();
    const detailedCalls = api.calls.filter((c) => c.includes("view=detailed"));
    expect(detailedCalls.at(-1)).toContain("hands=one");
    expect(document.getElementById("results-area")!.textContent).toContain(
      "Applied filter: hands=one",
    );
  });

  it("shows a red box with bulleted advice when the gate rejects", async () => {
    const api = new MockApi();
    api.statusQueue = [terminal("rejected", rejectReport)];
    const app = await makeApp(api);
    await app.submit();
    await app.tick();
    await flush();

    expect(app.polling).toBe(false);
    const box = document.querySelector(".error-box")!;
    expect(box).toBeTruthy();
    expect(box.querySelectorAll("li")).toHaveLength(2);
    expect(document.querySelectorAll(".card")).toHaveLength(0);
  });

  it("shows a yellow warning box when the clip passes with warnings", async () => {
    const api = new MockApi();
    api.statusQueue = [terminal("done", warnReport)];
    const app = await makeApp(api);
    await app.submit();
    await app.tick();
    await flush();

    expect(document.querySelector(".warning-box")).toBeTruthy();
    expect(document.querySelectorAll(".card.primary")).toHaveLength(1);
  });

  it("clear cancels the poll loop and empties the page", async () => {
    const api = new MockApi();
    api.statusQueue = [predicting(0.2, 0.5, 2.5)];
    const app = await makeApp(api);
    await app.submit();

    await vi.advanceTimersByTimeAsync(POLL_INTERVAL_MS * 3);
    const before = api.statusCalls();
    expect(before).toBeGreaterThanOrEqual(2);

    app.clear();
    expect(app.polling).toBe(false);
    await vi.advanceTimersByTimeAsync(POLL_INTERVAL_MS * 5);
    expect(api.statusCalls()).toBe(before);
    expect(document.getElementById("results-area")!.textContent).toBe("");
    expect((document.getElementById("progress-wrap") as HTMLElement).hidden).toBe(true);
  });
});
