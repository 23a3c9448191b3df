/** DOM rendering for the grid and the suggestion panel.
 *
 * Suggestions render in server order with their raw scores; bars are a
 * visual aid scaled against the top score, the numbers stay untouched.
 */

import type { ApiClient } from "./api.js";
import type { GridStore } from "./state.js";
import type { EvidenceEntry, Suggestion, TableRecord } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document, tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderGrid(doc: Document, store: GridStore): HTMLElement {
  const record = store.getState().table.record;
  const selected = store.getState().selected;
  const table = el(doc, "table", "grid");
  const head = el(doc, "tr");
  for (const heading of record.headings) {
    head.appendChild(el(doc, "th", "grid-heading", heading));
  }
  table.appendChild(head);
  record.rows.forEach((row, r) => {
    const tr = el(doc, "tr");
    row.forEach((cell, c) => {
      const td = el(doc, "td", "grid-cell", cell.text);
      td.dataset.row = String(r);
      td.dataset.col = String(c);
      if (selected && selected.row === r && selected.col === c) {
        td.classList.add("selected");
      }
      if (store.isVerifiedEmpty({ row: r, col: c })) {
        td.classList.add("verified-empty");
        td.title = "verified empty";
      }
      td.addEventListener("click", () => {
        void store.selectCell(r, c);
      });
      tr.appendChild(td);
    });
    table.appendChild(tr);
  });
  return table;
}

function renderEvidence(doc: Document, entries: EvidenceEntry[],
                        onViewSource: (tableId: string) => void): HTMLElement {
  const details = el(doc, "details", "evidence");
  details.appendChild(el(doc, "summary", "evidence-summary",
    `${entries.length} evidence ${entries.length === 1 ? "entry" : "entries"}`));
  const list = el(doc, "ul", "evidence-list");
  for (const entry of entries) {
    const li = el(doc, "li", `evidence-${entry.kind}`);
    if (entry.kind === "tc") {
      li.textContent = `table "${entry.pageTitle}" column '${entry.heading}'`;
      const view = el(doc, "button", "view-source", "view source");
      view.addEventListener("click", (ev) => {
        ev.preventDefault();
        onViewSource(entry.tableId);
      });
      li.appendChild(view);
    } else {
      li.textContent = `KB ${entry.predicate} (${entry.label})`;
    }
    list.appendChild(li);
  }
  details.appendChild(list);
  return details;
}

function renderSuggestion(doc: Document, s: Suggestion, index: number, topScore: number,
                          store: GridStore,
                          onViewSource: (tableId: string) => void): HTMLElement {
  const li = el(doc, "li", s.isEmpty ? "suggestion empty-suggestion" : "suggestion");
  li.dataset.rank = String(s.rank);
  li.dataset.canonical = s.canonical;
  const label = s.isEmpty ? "(leave empty)" : (s.display || s.canonical);
  li.appendChild(el(doc, "span", "suggestion-label", label));
  li.appendChild(el(doc, "span", "suggestion-score", s.score.toFixed(4)));
  const bar = el(doc, "span", "score-bar");
  const width = topScore > 0 ? Math.max(0, Math.min(1, s.score / topScore)) : 0;
  bar.style.width = `${(width * 100).toFixed(1)}%`;
  li.appendChild(bar);
  const accept = el(doc, "button", "accept", s.isEmpty ? "confirm empty" : "accept");
  accept.addEventListener("click", () => store.acceptSuggestion(index));
  li.appendChild(accept);
  if (!s.isEmpty && s.evidence.length > 0) {
    li.appendChild(renderEvidence(doc, s.evidence, onViewSource));
  }
  return li;
}

function renderPanel(doc: Document, store: GridStore,
                     onViewSource: (tableId: string) => void): HTMLElement {
  const panelState = store.getState().panel;
  const panel = el(doc, "div", "panel");
  panel.dataset.state = panelState.kind;
  if (panelState.kind === "idle") {
    panel.appendChild(el(doc, "p", "hint", "Click a cell to get suggestions."));
    return panel;
  }
  if (panelState.kind === "loading") {
    panel.appendChild(el(doc, "p", "loading", "Fetching suggestions…"));
    return panel;
  }
  if (panelState.kind === "error") {
    const banner = el(doc, "div", "error-banner",
      `Request failed (${panelState.code}). The grid is unchanged.`);
    const retry = el(doc, "button", "retry", "retry");
    retry.addEventListener("click", () => void store.retry());
    banner.appendChild(retry);
    panel.appendChild(banner);
    return panel;
  }
  const { response, existing } = panelState;
  if (existing.trim() !== "") {
    // Verification flow: the cell already has a value.
    panel.appendChild(el(doc, "p", "existing-value",
      `Current value: ${existing}`));
  }
  const list = el(doc, "ol", "suggestions");
  const top = response.suggestions.length > 0
    ? Math.max(...response.suggestions.map((s) => s.score)) : 0;
  response.suggestions.forEach((s, i) => {
    list.appendChild(renderSuggestion(doc, s, i, top, store, onViewSource));
  });
  panel.appendChild(list);
  const markEmpty = el(doc, "button", "mark-empty", "leave cell empty");
  markEmpty.addEventListener("click", () => store.markEmpty());
  panel.appendChild(markEmpty);
  return panel;
}

function renderSourceViewer(doc: Document, record: TableRecord): HTMLElement {
  const overlay = el(doc, "div", "source-viewer");
  overlay.appendChild(el(doc, "h3", "source-title",
    `${record.pageTitle ?? record.id} — ${record.caption ?? ""}`));
  const table = el(doc, "table", "source-table");
  const head = el(doc, "tr");
  for (const heading of record.headings) head.appendChild(el(doc, "th", "", heading));
  table.appendChild(head);
  for (const row of record.rows) {
    const tr = el(doc, "tr");
    for (const cell of row) tr.appendChild(el(doc, "td", "", cell.text));
    table.appendChild(tr);
  }
  overlay.appendChild(table);
  const close = el(doc, "button", "close-viewer", "close");
  close.addEventListener("click", () => overlay.remove());
  overlay.appendChild(close);
  return overlay;
}

export function mount(root: HTMLElement, store: GridStore, client: ApiClient): () => void {
  const doc = root.ownerDocument;

  const onViewSource = (tableId: string) => {
    void client.table(tableId).then((record) => {
      root.querySelector(".source-viewer")?.remove();
      root.appendChild(renderSourceViewer(doc, record));
    });
  };

  const draw = () => {
    const viewer = root.querySelector(".source-viewer");
    root.replaceChildren();
    root.appendChild(renderGrid(doc, store));
    root.appendChild(renderPanel(doc, store, onViewSource));
    if (viewer) root.appendChild(viewer);
  };

  const unsubscribe = store.subscribe(draw);
  draw();
  return unsubscribe;
}
