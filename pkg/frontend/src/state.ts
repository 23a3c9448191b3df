/** Grid state machine: selection, suggestion panel, accepted-value log.
 *
 * One suggest request is in flight per selected cell; responses arriving
 * after the selection changed are discarded.  The panel always shows the
 * server's suggestions in server order.
 */

import { ApiClient, ApiError } from "./api.js";
import { exportTable, importTable, type LoadedTable } from "./tableio.js";
import type { Suggestion, SuggestResponse } from "./types.js";

export interface CellRef {
  row: number;
  col: number;
}

export type PanelState =
  | { kind: "idle" }
  | { kind: "loading"; cell: CellRef }
  | { kind: "results"; cell: CellRef; response: SuggestResponse; existing: string }
  | { kind: "error"; cell: CellRef; message: string; code: string };

export interface LogEntry {
  action: "accept" | "mark-empty";
  cell: CellRef;
  display: string;
  canonical: string;
  at: number;
}

export interface GridState {
  table: LoadedTable;
  selected: CellRef | null;
  panel: PanelState;
  log: LogEntry[];
  verifiedEmpty: string[]; // "row:col" keys
}

type Listener = (state: GridState) => void;

const cellKey = (c: CellRef) => `${c.row}:${c.col}`;

export class GridStore {
  private state: GridState;
  private listeners: Listener[] = [];
  private requestSeq = 0;
  /** Responses dropped because the selection moved on; exposed for tests. */
  discardedResponses = 0;

  constructor(private readonly client: ApiClient, tableText: string,
              readonly k: number = 8, private readonly now: () => number = Date.now) {
    this.state = {
      table: importTable(tableText),
      selected: null,
      panel: { kind: "idle" },
      log: [],
      verifiedEmpty: [],
    };
  }

  getState(): GridState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(patch: Partial<GridState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  exportText(): string {
    return exportTable(this.state.table);
  }

  cellText(cell: CellRef): string {
    return this.state.table.record.rows[cell.row]?.[cell.col]?.text ?? "";
  }

  /** Click handler: select the cell and fetch suggestions for it. */
  async selectCell(row: number, col: number): Promise<void> {
    const record = this.state.table.record;
    if (row < 0 || row >= record.rows.length || col < 0 || col >= record.headings.length) {
      throw new Error(`cell ${row}:${col} outside the table`);
    }
    const cell = { row, col };
    const panel = this.state.panel;
    if (panel.kind === "loading" && cellKey(panel.cell) === cellKey(cell)) {
      return; // already in flight for this cell
    }
    const seq = ++this.requestSeq;
    this.emit({ selected: cell, panel: { kind: "loading", cell } });
    let response: SuggestResponse;
    try {
      response = await this.client.suggest({
        table: record,
        row,
        column: col,
        k: this.k,
      });
    } catch (err) {
      if (seq !== this.requestSeq) {
        this.discardedResponses += 1;
        return;
      }
      const code = err instanceof ApiError ? err.code : "unknown_error";
      this.emit({ panel: { kind: "error", cell, message: String(err), code } });
      return;
    }
    if (seq !== this.requestSeq) {
      this.discardedResponses += 1; // stale: the user moved on
      return;
    }
    this.emit({
      panel: { kind: "results", cell, response, existing: this.cellText(cell) },
    });
  }

  retry(): Promise<void> {
    const panel = this.state.panel;
    if (panel.kind !== "error") return Promise.resolve();
    return this.selectCell(panel.cell.row, panel.cell.col);
  }

  deselect(): void {
    this.requestSeq += 1; // orphan any in-flight request
    this.emit({ selected: null, panel: { kind: "idle" } });
  }

  panelSuggestions(): Suggestion[] {
    const panel = this.state.panel;
    return panel.kind === "results" ? panel.response.suggestions : [];
  }

  private setCell(cell: CellRef, text: string): void {
    const record = this.state.table.record;
    const rows = record.rows.map((r, i) =>
      i === cell.row ? r.map((c, j) => (j === cell.col ? { ...c, text } : c)) : r);
    if (text !== "") {
      delete rows[cell.row]![cell.col]!.entity;
    }
    this.emit({
      table: { ...this.state.table, record: { ...record, rows }, dirty: true },
    });
  }

  /** Accept the i-th (0-based) suggestion from the open results panel. */
  acceptSuggestion(index: number): void {
    const panel = this.state.panel;
    if (panel.kind !== "results") throw new Error("no results to accept");
    const suggestion = panel.response.suggestions[index];
    if (!suggestion) throw new Error(`no suggestion at index ${index}`);
    if (suggestion.isEmpty) {
      this.markEmpty();
      return;
    }
    this.setCell(panel.cell, suggestion.display || suggestion.canonical);
    this.emit({
      selected: null,
      panel: { kind: "idle" },
      verifiedEmpty: this.state.verifiedEmpty.filter((k) => k !== cellKey(panel.cell)),
      log: [...this.state.log, {
        action: "accept",
        cell: panel.cell,
        display: suggestion.display,
        canonical: suggestion.canonical,
        at: this.now(),
      }],
    });
  }

  /** Clear the selected cell and flag it as verified-empty. */
  markEmpty(): void {
    const panel = this.state.panel;
    if (panel.kind !== "results" && panel.kind !== "error") {
      throw new Error("mark-empty needs an open panel");
    }
    this.setCell(panel.cell, "");
    this.emit({
      selected: null,
      panel: { kind: "idle" },
      verifiedEmpty: [...new Set([...this.state.verifiedEmpty, cellKey(panel.cell)])],
      log: [...this.state.log, {
        action: "mark-empty",
        cell: panel.cell,
        display: "",
        canonical: "EMPTY",
        at: this.now(),
      }],
    });
  }

  isVerifiedEmpty(cell: CellRef): boolean {
    return this.state.verifiedEmpty.includes(cellKey(cell));
  }
}
