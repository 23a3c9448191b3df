import { describe, expect, it } from "vitest";

import { exportTable, importTable } from "../src/tableio.js";

const TEXT = '{"id": "t9",  "pageTitle": "odd  spacing",\n "headings": ["a", "b"], "rows": [[{"text": "x", "entity": "E1"}, {"text": "y"}]]}';

describe("table import/export", () => {
  it("round-trips an unmodified table byte-identically", () => {
    const table = importTable(TEXT);
    expect(exportTable(table)).toBe(TEXT);
  });

  it("serializes canonically once modified", () => {
    const table = importTable(TEXT);
    table.record.rows[0]![1]!.text = "changed";
    table.dirty = true;
    const out = exportTable(table);
    expect(out).not.toBe(TEXT);
    expect(JSON.parse(out).rows[0][1].text).toBe("changed");
  });

  it("rejects malformed records", () => {
    expect(() => importTable('{"id": "x", "headings": [], "rows": []}')).toThrow();
    expect(() => importTable('{"headings": ["a"], "rows": []}')).toThrow();
    expect(() => importTable(
      '{"id": "x", "headings": ["a", "b"], "rows": [[{"text": "only one"}]]}',
    )).toThrow(/heading count/);
  });
});
