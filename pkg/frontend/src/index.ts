export { parseTable, numericColumn, requiredColumn, SchemaError } from "./csv.js";
export type { Table } from "./csv.js";
export { FIGURES, FIGURE_IDS } from "./figures.js";
export type { FigureSpec, LineFigure, GridFigure } from "./figures.js";
export { renderLines, WIDTH, HEIGHT, PALETTE } from "./render.js";
export { renderGrid } from "./heatgrid.js";
export { makeScale, plottable, fmt } from "./scales.js";
export type { AxisScale, Mapper } from "./scales.js";

import { SchemaError } from "./csv.js";
import { parseTable } from "./csv.js";
import { FIGURES } from "./figures.js";
import { renderGrid } from "./heatgrid.js";
import { renderLines } from "./render.js";

/** Render CSV text for a known figure id to SVG text. */
export function renderFigure(figureId: string, csvText: string): string {
  const spec = FIGURES[figureId];
  if (spec === undefined) {
    throw new SchemaError(`unknown figure ${JSON.stringify(figureId)}`);
  }
  const table = parseTable(csvText);
  return spec.kind === "lines" ? renderLines(table, spec) : renderGrid(table, spec);
}
