/** Import/export of grid tables in the corpus record schema.
 *
 * The importer keeps the source text so exporting an unmodified table is
 * byte-identical to what was loaded.
 */

import type { TableRecord } from "./types.js";

export interface LoadedTable {
  record: TableRecord;
  sourceText: string;
  dirty: boolean;
}

export function validateRecord(record: TableRecord): void {
  if (!record.id) throw new Error("table record needs an id");
  if (!Array.isArray(record.headings) || record.headings.length === 0) {
    throw new Error("table record needs at least one heading");
  }
  if (!Array.isArray(record.rows)) throw new Error("table record needs rows");
  for (const row of record.rows) {
    if (row.length !== record.headings.length) {
      throw new Error("every row must match the heading count");
    }
  }
}

export function importTable(text: string): LoadedTable {
  const record = JSON.parse(text) as TableRecord;
  validateRecord(record);
  return { record, sourceText: text, dirty: false };
}

export function exportTable(table: LoadedTable): string {
  if (!table.dirty) return table.sourceText;
  return JSON.stringify(table.record);
}

export function cloneRecord(record: TableRecord): TableRecord {
  return JSON.parse(JSON.stringify(record)) as TableRecord;
}
