import { numericColumn, requiredColumn, SchemaError, type Table } from "./csv.js";
import type { LineFigure } from "./figures.js";
import { fmt, makeScale, plottable, type Mapper } from "./scales.js";
import { px, tag, textEl } from "./svg.js";

export const WIDTH = 760;
export const HEIGHT = 500;
const MARGIN = { left: 68, right: 16, top: 44, bottom: 52 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

interface Series {
  name: string;
  kind: "values" | "stderr";
  values: Array<number | null>;
  /** For stderr series: the column the bars attach to. */
  base?: Array<number | null>;
  color: string;
}

function collectSeries(table: Table, spec: LineFigure): Series[] {
  for (const name of spec.required) {
    if (!table.columns.includes(name)) {
      throw new SchemaError(`${spec.id} CSV is missing column ${JSON.stringify(name)}`);
    }
  }
  const names = table.columns.filter((c) => c !== spec.xColumn);
  const series: Series[] = [];
  let colorIdx = 0;
  const colorOf = new Map<string, string>();
  for (const name of names) {
    const values = numericColumn(table, name);
    const baseName = name.endsWith("_stderr") ? name.slice(0, -"_stderr".length) : null;
    if (baseName !== null && table.columns.includes(baseName)) {
      series.push({
        name,
        kind: "stderr",
        values,
        base: numericColumn(table, baseName),
        color: "", // filled below from the base series
      });
    } else {
      const color = PALETTE[colorIdx % PALETTE.length]!;
      colorIdx += 1;
      colorOf.set(name, color);
      series.push({ name, kind: "values", values, color });
    }
  }
  for (const s of series) {
    if (s.kind === "stderr") {
      s.color = colorOf.get(s.name.slice(0, -"_stderr".length)) ?? PALETTE[0]!;
    }
  }
  return series;
}

function axisX(scale: Mapper, label: string): string {
  const parts: string[] = [];
  parts.push(tag("line", { x1: 0, y1: PLOT_H, x2: PLOT_W, y2: PLOT_H, stroke: "#333" }));
  for (const t of scale.ticks) {
    const x = scale.map(t);
    parts.push(tag("line", { x1: x, y1: PLOT_H, x2: x, y2: PLOT_H + 5, stroke: "#333" }));
    parts.push(
      textEl(
        { x, y: PLOT_H + 18, "text-anchor": "middle", "font-size": 11, fill: "#333" },
        fmt(t),
      ),
    );
  }
  parts.push(
    textEl(
      {
        x: PLOT_W / 2,
        y: PLOT_H + 38,
        "text-anchor": "middle",
        "font-size": 12,
        fill: "#111",
      },
      label,
    ),
  );
  return tag("g", { class: "axis x", "data-scale": scale.kind }, parts);
}

function axisY(scale: Mapper, label: string): string {
  const parts: string[] = [];
  parts.push(tag("line", { x1: 0, y1: 0, x2: 0, y2: PLOT_H, stroke: "#333" }));
  for (const t of scale.ticks) {
    const y = scale.map(t);
    parts.push(tag("line", { x1: 0, y1: y, x2: PLOT_W, y2: y, stroke: "#eee" }));
    parts.push(tag("line", { x1: -5, y1: y, x2: 0, y2: y, stroke: "#333" }));
    parts.push(
      textEl(
        { x: -8, y: y + 3.5, "text-anchor": "end", "font-size": 11, fill: "#333" },
        fmt(t),
      ),
    );
  }
  parts.push(
    textEl(
      {
        x: -44,
        y: PLOT_H / 2,
        transform: `rotate(-90 -44 ${px(PLOT_H / 2)})`,
        "text-anchor": "middle",
        "font-size": 12,
        fill: "#111",
      },
      label,
    ),
  );
  return tag("g", { class: "axis y", "data-scale": scale.kind }, parts);
}

function valuesMarkup(s: Series, x: number[], sx: Mapper, sy: Mapper): string {
  const steps: string[] = [];
  const markers: string[] = [];
  let pen = false;
  for (let i = 0; i < x.length; i++) {
    const v = s.values[i]!;
    if (!plottable(x[i]!, sx.kind) || !plottable(v, sy.kind)) {
      pen = false; // break the line, never bridge a gap
      continue;
    }
    const cx = sx.map(x[i]!);
    const cy = sy.map(v);
    steps.push(`${pen ? "L" : "M"}${px(cx)} ${px(cy)}`);
    pen = true;
    markers.push(tag("circle", { cx, cy, r: 2.5, fill: s.color }));
  }
  const children: string[] = [];
  if (steps.length > 0) {
    children.push(
      tag("path", { d: steps.join(""), fill: "none", stroke: s.color, "stroke-width": 1.5 }),
    );
  }
  children.push(...markers);
  return tag("g", { class: "series", "data-name": s.name, "data-kind": "values" }, children);
}

function stderrMarkup(s: Series, x: number[], sx: Mapper, sy: Mapper): string {
  const children: string[] = [];
  const floor = sy.domain[0];
  for (let i = 0; i < x.length; i++) {
    const v = s.base![i]!;
    const e = s.values[i]!;
    if (e === null || !plottable(x[i]!, sx.kind) || !plottable(v, sy.kind)) continue;
    const hi = v + e;
    // on a log axis the lower whisker may cross zero; pin it to the axis floor
    const lo = plottable(v - e, sy.kind) ? Math.max(v - e, floor) : floor;
    const cx = sx.map(x[i]!);
    const yHi = sy.map(Math.min(hi, sy.domain[1]));
    const yLo = sy.map(lo);
    children.push(
      tag("line", { x1: cx, y1: yHi, x2: cx, y2: yLo, stroke: s.color, "stroke-width": 1 }),
    );
    children.push(tag("line", { x1: cx - 3, y1: yHi, x2: cx + 3, y2: yHi, stroke: s.color }));
    children.push(tag("line", { x1: cx - 3, y1: yLo, x2: cx + 3, y2: yLo, stroke: s.color }));
  }
  return tag("g", { class: "series", "data-name": s.name, "data-kind": "stderr" }, children);
}

function legend(series: Series[]): string {
  const entries = series.filter((s) => s.kind === "values");
  const rows: string[] = [];
  entries.forEach((s, i) => {
    const y = 6 + 16 * i;
    rows.push(tag("line", { x1: 0, y1: y, x2: 18, y2: y, stroke: s.color, "stroke-width": 2 }));
    rows.push(tag("circle", { cx: 9, cy: y, r: 2.5, fill: s.color }));
    rows.push(textEl({ x: 24, y: y + 3.5, "font-size": 11, fill: "#111" }, s.name));
  });
  return tag(
    "g",
    { class: "legend", transform: `translate(${px(PLOT_W - 150)},8)` },
    rows,
  );
}

/** Render a line figure to a standalone SVG string. */
export function renderLines(table: Table, spec: LineFigure): string {
  const x = requiredColumn(table, spec.xColumn);
  const series = collectSeries(table, spec);

  const xVals = x.filter((v) => plottable(v, spec.xScale));
  const yVals: number[] = [];
  for (const s of series) {
    for (let i = 0; i < x.length; i++) {
      if (!plottable(x[i]!, spec.xScale)) continue;
      if (s.kind === "values") {
        const v = s.values[i]!;
        if (plottable(v, spec.yScale)) yVals.push(v);
      } else {
        const v = s.base![i]!;
        const e = s.values[i]!;
        if (e === null || !plottable(v, spec.yScale)) continue;
        yVals.push(v + e);
        if (plottable(v - e, spec.yScale)) yVals.push(v - e);
      }
    }
  }
  if (xVals.length === 0 || yVals.length === 0) {
    throw new SchemaError(`${spec.id} CSV has no plottable data`);
  }

  const sx = makeScale(spec.xScale, xVals, [0, PLOT_W]);
  const sy = makeScale(spec.yScale, yVals, [PLOT_H, 0]);

  const body: string[] = [axisY(sy, spec.yLabel), axisX(sx, spec.xLabel)];
  for (const s of series) {
    body.push(s.kind === "values" ? valuesMarkup(s, x, sx, sy) : stderrMarkup(s, x, sx, sy));
  }
  body.push(legend(series));

  const doc: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" data-figure="${spec.id}">`,
    tag("rect", { x: 0, y: 0, width: WIDTH, height: HEIGHT, fill: "#ffffff" }),
    textEl({ x: MARGIN.left, y: 24, "font-size": 14, "font-weight": "bold", fill: "#111" }, spec.title),
    tag("g", { class: "plot", transform: `translate(${MARGIN.left},${MARGIN.top})` }, body),
    "</svg>",
  ];
  return doc.join("\n") + "\n";
}
