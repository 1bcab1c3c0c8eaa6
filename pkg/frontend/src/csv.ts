import Papa from "papaparse";

/** Raised for anything that makes the input unusable as figure data. */
export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: string[][];
  /** `# ...` lines from the file head, comment marker stripped. */
  comments: string[];
}

/** Parse CSV text produced by the simulator: `#` comment lines, then a header row. */
export function parseTable(text: string): Table {
  const comments: string[] = [];
  for (const line of text.split("\n")) {
    if (!line.startsWith("#")) break;
    comments.push(line.replace(/^#\s?/, ""));
  }

  const parsed = Papa.parse<string[]>(text, {
    delimiter: ",",
    comments: "#",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0]!;
    throw new SchemaError(`CSV parse error at row ${e.row}: ${e.message}`);
  }

  const grid = parsed.data;
  if (grid.length === 0) {
    throw new SchemaError("CSV has no header row");
  }
  const columns = grid[0]!;
  if (columns.some((c) => c.trim() === "")) {
    throw new SchemaError("CSV header has an unnamed column");
  }
  const rows = grid.slice(1);
  if (rows.length === 0) {
    throw new SchemaError("CSV has a header but no data rows");
  }
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new SchemaError(
        `ragged CSV: expected ${columns.length} cells, got ${row.length}`,
      );
    }
  }
  return { columns, rows, comments };
}

/**
 * Numeric view of one column. Blank cells become null (the simulator leaves
 * a cell empty when the quantity is undefined for that row); anything else
 * that does not parse as a finite number is a schema error.
 */
export function numericColumn(table: Table, name: string): Array<number | null> {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column ${JSON.stringify(name)}`);
  }
  return table.rows.map((row, r) => {
    const cell = row[idx]!;
    if (cell.trim() === "") return null;
    const value = Number(cell);
    if (!Number.isFinite(value)) {
      throw new SchemaError(
        `column ${JSON.stringify(name)} row ${r + 1}: not a number: ${JSON.stringify(cell)}`,
      );
    }
    return value;
  });
}

/** Same as numericColumn but blanks are also schema errors. */
export function requiredColumn(table: Table, name: string): number[] {
  return numericColumn(table, name).map((v, r) => {
    if (v === null) {
      throw new SchemaError(`column ${JSON.stringify(name)} row ${r + 1}: blank cell`);
    }
    return v;
  });
}
