import type { AxisScale } from "./scales.js";

/** A figure whose non-x columns are drawn as one series each. */
export interface LineFigure {
  kind: "lines";
  id: string;
  title: string;
  xColumn: string;
  xScale: AxisScale;
  yScale: AxisScale;
  xLabel: string;
  yLabel: string;
  /** Columns the CSV must contain; extras are drawn too. */
  required: string[];
}

/** A figure drawn as heat panels keyed by a category column. */
export interface GridFigure {
  kind: "grid";
  id: string;
  title: string;
  categoryColumn: string;
  rowColumn: string;
  colColumn: string;
  valueColumns: string[];
}

export type FigureSpec = LineFigure | GridFigure;

const STRATEGY_COLUMNS = ["frugal", "balanced", "random", "modesty"].flatMap(
  (s) => [s, `${s}_stderr`],
);
const SOURCE_COLUMNS = [1, 2, 3, 4].flatMap((x) => [`x${x}`, `x${x}_stderr`]);

export const FIGURES: Record<string, FigureSpec> = {
  fig2: {
    kind: "lines",
    id: "fig2",
    title: "Heralded preparation probability from a thermal pair source",
    xColumn: "nbar",
    xScale: "linear",
    yScale: "log",
    xLabel: "mean photon number",
    yLabel: "preparation probability",
    required: ["p_d2", "p_d4", "p_d6", "p_d8", "p_d10"],
  },
  fig4: {
    kind: "grid",
    id: "fig4",
    title: "Optimal beamsplitter settings per input pair",
    categoryColumn: "objective",
    rowColumn: "n",
    colColumn: "m",
    valueColumns: ["eta_opt", "p_opt"],
  },
  fig6: {
    kind: "lines",
    id: "fig6",
    title: "Success probability of fusing two equal states",
    xColumn: "n",
    xScale: "linear",
    yScale: "linear",
    xLabel: "photons per input",
    yLabel: "success probability",
    required: ["success"],
  },
  fig7: {
    kind: "lines",
    id: "fig7",
    title: "Preparation rate with and without recycling",
    xColumn: "d",
    xScale: "linear",
    yScale: "log",
    xLabel: "target photon number",
    yLabel: "rate",
    required: [
      "recycled",
      "recycled_stderr",
      "nonrecycled",
      "nonrecycled_stderr",
      "single_shot",
      "spdc",
    ],
  },
  fig8: {
    kind: "lines",
    id: "fig8",
    title: "Preparation rate by pairing strategy",
    xColumn: "d",
    xScale: "log",
    yScale: "log",
    xLabel: "target photon number",
    yLabel: "rate",
    required: STRATEGY_COLUMNS,
  },
  fig9: {
    kind: "lines",
    id: "fig9",
    title: "Preparation rate by source multiplicity",
    xColumn: "d",
    xScale: "log",
    yScale: "log",
    xLabel: "target photon number",
    yLabel: "rate",
    required: SOURCE_COLUMNS,
  },
};

export const FIGURE_IDS = Object.keys(FIGURES);
