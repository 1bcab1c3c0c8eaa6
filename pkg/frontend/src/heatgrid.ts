import { requiredColumn, SchemaError, type Table } from "./csv.js";
import type { GridFigure } from "./figures.js";
import { fmt } from "./scales.js";
import { px, tag, textEl } from "./svg.js";

const CELL = 24;
const PANEL_GAP_X = 96;
const PANEL_GAP_Y = 72;
const ORIGIN_X = 72;
const ORIGIN_Y = 56;

const RAMP_LO = [20, 50, 90] as const;
const RAMP_HI = [242, 166, 90] as const;

function rampColor(t: number): string {
  const ch = (i: 0 | 1 | 2) => Math.round(RAMP_LO[i] + (RAMP_HI[i] - RAMP_LO[i]) * t);
  const hex = (v: number) => v.toString(16).padStart(2, "0");
  return `#${hex(ch(0))}${hex(ch(1))}${hex(ch(2))}`;
}

function uniqueInOrder<T>(items: T[]): T[] {
  const seen = new Set<T>();
  const out: T[] = [];
  for (const it of items) {
    if (!seen.has(it)) {
      seen.add(it);
      out.push(it);
    }
  }
  return out;
}

function stringColumn(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column ${JSON.stringify(name)}`);
  }
  return table.rows.map((row) => row[idx]!);
}

/** Render a heat-panel grid figure (one panel per category and value column). */
export function renderGrid(table: Table, spec: GridFigure): string {
  const categories = uniqueInOrder(stringColumn(table, spec.categoryColumn));
  const cols = requiredColumn(table, spec.colColumn);
  const rows = requiredColumn(table, spec.rowColumn);
  const valueCols = spec.valueColumns.map((name) => requiredColumn(table, name));

  const colVals = uniqueInOrder([...cols].sort((a, b) => a - b));
  const rowVals = uniqueInOrder([...rows].sort((a, b) => a - b));
  const colIndex = new Map(colVals.map((v, i) => [v, i]));
  const rowIndex = new Map(rowVals.map((v, i) => [v, i]));
  const catColumn = stringColumn(table, spec.categoryColumn);

  const panelW = CELL * colVals.length;
  const panelH = CELL * rowVals.length;
  const width = ORIGIN_X + categories.length * (panelW + PANEL_GAP_X);
  const height = ORIGIN_Y + spec.valueColumns.length * (panelH + PANEL_GAP_Y) + 8;

  const body: string[] = [
    tag("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    textEl({ x: ORIGIN_X, y: 28, "font-size": 14, "font-weight": "bold", fill: "#111" }, spec.title),
  ];

  spec.valueColumns.forEach((quantity, qi) => {
    const values = valueCols[qi]!;
    let vMin = Math.min(...values);
    let vMax = Math.max(...values);
    if (vMin === vMax) {
      vMin -= 0.5;
      vMax += 0.5;
    }
    const py = ORIGIN_Y + qi * (panelH + PANEL_GAP_Y);

    categories.forEach((cat, ci) => {
      const pxLeft = ORIGIN_X + ci * (panelW + PANEL_GAP_X);
      const cells: string[] = [];
      for (let r = 0; r < table.rows.length; r++) {
        if (catColumn[r] !== cat) continue;
        const i = colIndex.get(cols[r]!)!;
        const j = rowIndex.get(rows[r]!)!;
        const v = values[r]!;
        const t = (v - vMin) / (vMax - vMin);
        const cy = panelH - CELL * (j + 1); // row value grows upward
        cells.push(
          tag(
            "rect",
            {
              x: CELL * i,
              y: cy,
              width: CELL,
              height: CELL,
              fill: rampColor(t),
              stroke: "#ffffff",
              "stroke-width": 0.5,
            },
            [
              `<title>${spec.colColumn}=${fmt(cols[r]!)} ${spec.rowColumn}=${fmt(rows[r]!)}: ${fmt(v)}</title>`,
            ],
          ),
        );
      }
      // tick labels on both panel edges
      colVals.forEach((v, i) => {
        cells.push(
          textEl(
            {
              x: CELL * i + CELL / 2,
              y: panelH + 14,
              "text-anchor": "middle",
              "font-size": 10,
              fill: "#333",
            },
            fmt(v),
          ),
        );
      });
      rowVals.forEach((v, j) => {
        cells.push(
          textEl(
            {
              x: -6,
              y: panelH - CELL * j - CELL / 2 + 3.5,
              "text-anchor": "end",
              "font-size": 10,
              fill: "#333",
            },
            fmt(v),
          ),
        );
      });
      cells.push(
        textEl(
          { x: panelW / 2, y: -10, "text-anchor": "middle", "font-size": 12, fill: "#111" },
          `${quantity} (${cat})`,
        ),
      );
      cells.push(
        textEl(
          { x: panelW / 2, y: panelH + 30, "text-anchor": "middle", "font-size": 10, fill: "#333" },
          spec.colColumn,
        ),
      );
      body.push(
        tag(
          "g",
          {
            class: "panel",
            "data-quantity": quantity,
            "data-category": cat,
            transform: `translate(${px(pxLeft)},${px(py)})`,
          },
          cells,
        ),
      );
    });

    // shared color key for this quantity row
    const keyX = ORIGIN_X;
    const keyY = py + panelH + 44;
    body.push(
      tag("g", { class: "colorkey", "data-quantity": quantity }, [
        tag("rect", { x: keyX, y: keyY, width: 12, height: 12, fill: rampColor(0) }),
        textEl({ x: keyX + 16, y: keyY + 10, "font-size": 10, fill: "#333" }, fmt(vMin)),
        tag("rect", { x: keyX + 80, y: keyY, width: 12, height: 12, fill: rampColor(1) }),
        textEl({ x: keyX + 96, y: keyY + 10, "font-size": 10, fill: "#333" }, fmt(vMax)),
      ]),
    );
  });

  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" data-figure="${spec.id}">\n` +
    body.join("\n") +
    "\n</svg>\n"
  );
}
