import { describe, expect, it } from "vitest";
import { numericColumn, parseTable, requiredColumn, SchemaError } from "../dist/csv.js";

const SAMPLE = [
  "# manifest-digest: abc123",
  "# command: fockfusion reproduce fig6",
  "n,success",
  "1,0.5",
  "2,0.375",
  "",
].join("\n");

describe("parseTable", () => {
  it("splits comments, header, and rows", () => {
    const t = parseTable(SAMPLE);
    expect(t.comments).toEqual(["manifest-digest: abc123", "command: fockfusion reproduce fig6"]);
    expect(t.columns).toEqual(["n", "success"]);
    expect(t.rows).toEqual([
      ["1", "0.5"],
      ["2", "0.375"],
    ]);
  });

  it("rejects empty input", () => {
    expect(() => parseTable("")).toThrow(SchemaError);
  });

  it("rejects comment-only input", () => {
    expect(() => parseTable("# just a note\n")).toThrow(/no header/);
  });

  it("rejects a header with no data rows", () => {
    expect(() => parseTable("n,success\n")).toThrow(/no data rows/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseTable("a,b\n1,2,3\n")).toThrow(/ragged/);
  });

  it("rejects unnamed header cells", () => {
    expect(() => parseTable("a,,c\n1,2,3\n")).toThrow(/unnamed/);
  });
});

describe("numericColumn", () => {
  const table = parseTable("d,rate\n2,0.5\n3,\n4,0.1\n");

  it("parses numbers and maps blanks to null", () => {
    expect(numericColumn(table, "rate")).toEqual([0.5, null, 0.1]);
  });

  it("rejects a missing column by name", () => {
    expect(() => numericColumn(table, "stderr")).toThrow(/"stderr"/);
  });

  it("rejects non-numeric cells", () => {
    const bad = parseTable("d,rate\n2,fast\n");
    expect(() => numericColumn(bad, "rate")).toThrow(/not a number/);
  });

  it("requiredColumn rejects blanks", () => {
    expect(() => requiredColumn(table, "rate")).toThrow(/blank/);
    expect(requiredColumn(table, "d")).toEqual([2, 3, 4]);
  });
});
