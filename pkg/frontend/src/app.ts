/* Browser client for the sign dictionary service.
 *
 * Single module, no framework: the service serves this file at /app.js.
 * Everything DOM-producing is exported so tests can drive it headless.
 */

export const POLL_INTERVAL_MS = 400; // poll at least twice a second

export interface StatusDoc {
  id: string;
  state: string;
  progress: number;
  eta_s: number | null;
  elapsed_s: number;
  predicted_total_s: number | null;
  report?: GateReport;
  error?: string;
}

export interface GateIssue {
  code: string;
  severity: string;
  message: string;
  suggestion: string;
}

export interface GateReport {
  verdict: string;
  summary: string;
  issues: GateIssue[];
  suggestions: string[];
}

export interface ResultEntry {
  rank: number;
  original_rank: number;
  class_index: number;
  rendition_id: string;
  gloss: string;
  probability: number;
  confidence: string;
  movement: string;
  hands: string;
  location: string;
  handshape: string | null;
  example_media: string;
}

export interface CompactDoc {
  view: "compact";
  primary: ResultEntry;
  grid: ResultEntry[];
}

export interface DetailedDoc {
  view: "detailed";
  entries: ResultEntry[];
}

export type Filters = {
  handshape: string;
  location: string;
  movement: string;
  hands: string;
};

export const EMPTY_FILTERS: Filters = {
  handshape: "",
  location: "",
  movement: "",
  hands: "",
};

// ---------------------------------------------------------------------------
// pure formatting helpers
// ---------------------------------------------------------------------------

/** "elapsed/total" with one decimal each, e.g. "1.2/3.5s". */
export function progressLabel(elapsedS: number, totalS: number): string {
  return `${elapsedS.toFixed(1)}/${totalS.toFixed(1)}s`;
}

export function percentText(probability: number): string {
  return `${(probability * 100).toFixed(1)}%`;
}

export function filterSummary(filters: Filters): string {
  const active = (Object.entries(filters) as [string, string][]).filter(
    ([, v]) => v !== "",
  );
  if (active.length === 0) return "Applied filter: None";
  return "Applied filter: " + active.map(([k, v]) => `${k}=${v}`).join(", ");
}

export function detailedQuery(filters: Filters): string {
  const params = new URLSearchParams({ view: "detailed" });
  for (const [key, value] of Object.entries(filters)) {
    if (value !== "") params.set(key, value);
  }
  return params.toString();
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** One result card. Raw probability enters the DOM only when showPercent. */
export function resultCard(
  doc: Document,
  entry: ResultEntry,
  showPercent: boolean,
  primary = false,
): HTMLElement {
  const card = el(doc, "div", primary ? "card primary" : "card");
  card.dataset.rank = String(entry.rank);
  card.dataset.rendition = entry.rendition_id;
  card.appendChild(el(doc, "div", "card-gloss", entry.gloss));
  card.appendChild(el(doc, "div", "card-confidence", entry.confidence));
  if (showPercent) {
    card.appendChild(el(doc, "div", "card-percent", percentText(entry.probability)));
  }
  const traits = [entry.movement, entry.hands, entry.location, entry.handshape]
    .filter((t): t is string => t !== null && t !== "")
    .join(" / ");
  card.appendChild(el(doc, "div", "card-traits", traits));
  return card;
}

export function renderCompact(
  root: HTMLElement,
  payload: CompactDoc,
  showPercent: boolean,
): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  root.appendChild(el(doc, "h2", undefined, "Best match"));
  root.appendChild(resultCard(doc, payload.primary, showPercent, true));
  const grid = el(doc, "div", "grid");
  for (const entry of payload.grid) {
    grid.appendChild(resultCard(doc, entry, showPercent));
  }
  root.appendChild(el(doc, "h3", undefined, "Other possibilities"));
  root.appendChild(grid);
}

export function renderDetailed(
  root: HTMLElement,
  payload: DetailedDoc,
  showPercent: boolean,
  filters: Filters,
): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  root.appendChild(el(doc, "h2", undefined, "All results"));
  root.appendChild(el(doc, "p", "applied-filter", filterSummary(filters)));
  if (payload.entries.length === 0) {
    root.appendChild(el(doc, "p", "no-matches", "No entries match the filter."));
    return;
  }
  const grid = el(doc, "div", "grid detailed");
  for (const entry of payload.entries) {
    grid.appendChild(resultCard(doc, entry, showPercent));
  }
  root.appendChild(grid);
}

/** Red box: what went wrong plus one bullet per suggestion. */
export function renderRejection(root: HTMLElement, report: GateReport): void {
  const doc = root.ownerDocument;
  const box = el(doc, "div", "error-box");
  box.appendChild(el(doc, "p", "box-summary", report.summary));
  const list = el(doc, "ul");
  for (const tip of report.suggestions) {
    list.appendChild(el(doc, "li", undefined, tip));
  }
  box.appendChild(list);
  root.appendChild(box);
}

/** Yellow box for accepted-with-warnings submissions. */
export function renderWarnings(root: HTMLElement, report: GateReport): void {
  const doc = root.ownerDocument;
  const box = el(doc, "div", "warning-box");
  box.appendChild(el(doc, "p", "box-summary", report.summary));
  const list = el(doc, "ul");
  for (const issue of report.issues) {
    if (issue.severity === "warning") {
      list.appendChild(el(doc, "li", undefined, issue.message));
    }
  }
  box.appendChild(list);
  root.appendChild(box);
}

export function renderFailure(root: HTMLElement, message: string): void {
  const doc = root.ownerDocument;
  const box = el(doc, "div", "error-box");
  box.appendChild(el(doc, "p", "box-summary", message));
  root.appendChild(box);
}

// ---------------------------------------------------------------------------
// application wiring
// ---------------------------------------------------------------------------

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

interface Elements {
  form: HTMLFormElement;
  file: HTMLInputElement;
  trimStart: HTMLInputElement;
  trimEnd: HTMLInputElement;
  clearBtn: HTMLButtonElement;
  progressWrap: HTMLElement;
  progressBar: HTMLElement;
  progressText: HTMLElement;
  messages: HTMLElement;
  results: HTMLElement;
  moreBtn: HTMLButtonElement;
  backBtn: HTMLButtonElement;
  filterBar: HTMLElement;
  filterSelects: Record<keyof Filters, HTMLSelectElement>;
  showPercent: HTMLInputElement;
}

function grab(doc: Document): Elements {
  const byId = <T extends HTMLElement>(id: string): T => {
    const node = doc.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node as T;
  };
  return {
    form: byId<HTMLFormElement>("upload-form"),
    file: byId<HTMLInputElement>("file-input"),
    trimStart: byId<HTMLInputElement>("trim-start"),
    trimEnd: byId<HTMLInputElement>("trim-end"),
    clearBtn: byId<HTMLButtonElement>("clear-btn"),
    progressWrap: byId("progress-wrap"),
    progressBar: byId("progress-bar"),
    progressText: byId("progress-text"),
    messages: byId("message-area"),
    results: byId("results-area"),
    moreBtn: byId<HTMLButtonElement>("more-results"),
    backBtn: byId<HTMLButtonElement>("back-to-compact"),
    filterBar: byId("filter-bar"),
    filterSelects: {
      handshape: byId<HTMLSelectElement>("filter-handshape"),
      location: byId<HTMLSelectElement>("filter-location"),
      movement: byId<HTMLSelectElement>("filter-movement"),
      hands: byId<HTMLSelectElement>("filter-hands"),
    },
    showPercent: byId<HTMLInputElement>("show-percent"),
  };
}

export class App {
  private els: Elements;
  private fetchFn: FetchLike;
  private doc: Document;
  private timer: ReturnType<typeof setInterval> | null = null;
  private inflight = false;
  private submissionId: string | null = null;
  private lastCompact: CompactDoc | null = null;
  private lastDetailed: DetailedDoc | null = null;
  private lastReport: GateReport | null = null;
  private mode: "compact" | "detailed" = "compact";

  constructor(doc: Document, fetchFn?: FetchLike) {
    this.doc = doc;
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
    this.els = grab(doc);
    this.els.form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submit();
    });
    this.els.clearBtn.addEventListener("click", () => this.clear());
    this.els.moreBtn.addEventListener("click", () => void this.showDetailed());
    this.els.backBtn.addEventListener("click", () => this.showCompact());
    this.els.showPercent.addEventListener("change", () => this.rerender());
    for (const select of Object.values(this.els.filterSelects)) {
      select.addEventListener("change", () => void this.showDetailed());
    }
    this.populateFilters();
  }

  /** Pull dropdown choices from the live vocabulary. */
  private async populateFilters(): Promise<void> {
    try {
      const resp = await this.fetchFn("/api/v1/vocabulary");
      if (!resp.ok) return;
      const doc = (await resp.json()) as { entries: ResultEntry[] };
      const distinct: Record<keyof Filters, Set<string>> = {
        handshape: new Set(),
        location: new Set(),
        movement: new Set(),
        hands: new Set(),
      };
      for (const entry of doc.entries) {
        if (entry.handshape) distinct.handshape.add(entry.handshape);
        distinct.location.add(entry.location);
        distinct.movement.add(entry.movement);
        distinct.hands.add(entry.hands);
      }
      for (const key of Object.keys(distinct) as (keyof Filters)[]) {
        const select = this.els.filterSelects[key];
        for (const value of [...distinct[key]].sort()) {
          const option = this.doc.createElement("option");
          option.value = value;
          option.textContent = value;
          select.appendChild(option);
        }
      }
    } catch {
      // vocabulary is a convenience; filters still accept typed values
    }
  }

  filters(): Filters {
    return {
      handshape: this.els.filterSelects.handshape.value,
      location: this.els.filterSelects.location.value,
      movement: this.els.filterSelects.movement.value,
      hands: this.els.filterSelects.hands.value,
    };
  }

  async submit(): Promise<void> {
    const files = this.els.file.files;
    if (!files || files.length === 0) {
      this.els.messages.textContent = "";
      renderFailure(this.els.messages, "Choose a recording first.");
      return;
    }
    this.clear();
    const body = new FormData();
    body.append("file", files[0]);
    if (this.els.trimStart.value !== "") {
      body.append("trim_start_s", this.els.trimStart.value);
    }
    if (this.els.trimEnd.value !== "") {
      body.append("trim_end_s", this.els.trimEnd.value);
    }
    const resp = await this.fetchFn("/api/v1/submissions", { method: "POST", body });
    if (!resp.ok) {
      const detail = await resp.json().catch(() => ({ detail: resp.statusText }));
      renderFailure(this.els.messages, `Upload failed: ${detail.detail}`);
      return;
    }
    const doc = (await resp.json()) as { id: string };
    this.submissionId = doc.id;
    this.els.progressWrap.hidden = false;
    this.els.progressText.textContent = "checking…";
    this.timer = setInterval(() => void this.tick(), POLL_INTERVAL_MS);
  }

  /** One poll of the status endpoint; exported for deterministic tests. */
  async tick(): Promise<void> {
    if (this.inflight || this.submissionId === null) return;
    this.inflight = true;
    try {
      const resp = await this.fetchFn(
        `/api/v1/submissions/${this.submissionId}/status`,
      );
      if (!resp.ok) return;
      const doc = (await resp.json()) as StatusDoc;
      this.applyStatus(doc);
    } finally {
      this.inflight = false;
    }
  }

  private applyStatus(doc: StatusDoc): void {
    // the bar carries the endpoint's progress value verbatim
    this.els.progressBar.style.width = `${doc.progress * 100}%`;
    this.els.progressBar.dataset.progress = String(doc.progress);
    if (doc.state === "predicting" && doc.predicted_total_s !== null) {
      this.els.progressText.textContent = progressLabel(
        doc.elapsed_s,
        doc.predicted_total_s,
      );
    }
    if (doc.state === "done" || doc.state === "rejected" || doc.state === "failed") {
      this.stopPolling();
      if (doc.state === "done" && doc.predicted_total_s !== null) {
        this.els.progressText.textContent = progressLabel(
          doc.elapsed_s,
          doc.predicted_total_s,
        );
      }
      this.lastReport = doc.report ?? null;
      if (doc.state === "rejected" && doc.report) {
        this.els.progressWrap.hidden = true;
        renderRejection(this.els.messages, doc.report);
      } else if (doc.state === "failed") {
        this.els.progressWrap.hidden = true;
        renderFailure(this.els.messages, doc.error ?? "Processing failed.");
      } else if (doc.state === "done") {
        if (doc.report && doc.report.verdict === "proceed_with_warnings") {
          renderWarnings(this.els.messages, doc.report);
        }
        void this.showCompactFresh();
      }
    }
  }

  private async showCompactFresh(): Promise<void> {
    if (this.submissionId === null) return;
    const resp = await this.fetchFn(
      `/api/v1/submissions/${this.submissionId}/results?view=compact`,
    );
    if (!resp.ok) return;
    this.lastCompact = (await resp.json()) as CompactDoc;
    this.showCompact();
  }

  showCompact(): void {
    if (!this.lastCompact) return;
    this.mode = "compact";
    renderCompact(this.els.results, this.lastCompact, this.els.showPercent.checked);
    this.els.moreBtn.hidden = false;
    this.els.backBtn.hidden = true;
    this.els.filterBar.hidden = true;
  }

  async showDetailed(): Promise<void> {
    if (this.submissionId === null) return;
    const query = detailedQuery(this.filters());
    const resp = await this.fetchFn(
      `/api/v1/submissions/${this.submissionId}/results?${query}`,
    );
    if (!resp.ok) return;
    this.lastDetailed = (await resp.json()) as DetailedDoc;
    this.mode = "detailed";
    renderDetailed(
      this.els.results,
      this.lastDetailed,
      this.els.showPercent.checked,
      this.filters(),
    );
    this.els.moreBtn.hidden = true;
    this.els.backBtn.hidden = false;
    this.els.filterBar.hidden = false;
  }

  private rerender(): void {
    if (this.mode === "detailed" && this.lastDetailed) {
      renderDetailed(
        this.els.results,
        this.lastDetailed,
        this.els.showPercent.checked,
        this.filters(),
      );
    } else if (this.lastCompact) {
      renderCompact(this.els.results, this.lastCompact, this.els.showPercent.checked);
    }
  }

  private stopPolling(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** Cancel polling and drop all submission state from the page. */
  clear(): void {
    this.stopPolling();
    this.submissionId = null;
    this.lastCompact = null;
    this.lastDetailed = null;
    this.lastReport = null;
    this.mode = "compact";
    this.els.messages.textContent = "";
    this.els.results.textContent = "";
    this.els.progressWrap.hidden = true;
    this.els.progressBar.style.width = "0%";
    delete this.els.progressBar.dataset.progress;
    this.els.progressText.textContent = "";
    this.els.moreBtn.hidden = true;
    this.els.backBtn.hidden = true;
    this.els.filterBar.hidden = true;
  }

  get polling(): boolean {
    return this.timer !== null;
  }

  get report(): GateReport | null {
    return this.lastReport;
  }
}

export function startApp(doc: Document): App {
  return new App(doc);
}

declare global {
  interface Window {
    signdictApp?: App;
  }
}

if (typeof document !== "undefined" && document.getElementById("upload-form")) {
  window.signdictApp = startApp(document);
}
