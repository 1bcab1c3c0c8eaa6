import { scaleLinear, scaleLog } from "d3-scale";

export type AxisScale = "linear" | "log";

export interface Mapper {
  kind: AxisScale;
  /** Data value to pixel offset within the plot box. */
  map(v: number): number;
  ticks: number[];
  domain: [number, number];
}

/** True when a value can be placed on the axis at all. */
export function plottable(v: number | null, kind: AxisScale): v is number {
  if (v === null || !Number.isFinite(v)) return false;
  return kind === "linear" || v > 0;
}

/** Compact deterministic number label: shortest round-trip of an 8-digit round. */
export function fmt(v: number): string {
  if (v === 0) return "0";
  return String(Number(v.toPrecision(8)));
}

export function makeScale(
  kind: AxisScale,
  values: number[],
  range: [number, number],
): Mapper {
  if (values.length === 0) {
    throw new Error("no plottable values for axis");
  }
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    // degenerate extent: pad so the single value sits mid-axis
    if (kind === "log") {
      lo /= 10;
      hi *= 10;
    } else {
      lo -= 1;
      hi += 1;
    }
  }
  const scale =
    kind === "log"
      ? scaleLog().domain([lo, hi]).range(range).nice()
      : scaleLinear().domain([lo, hi]).range(range).nice();
  const [d0, d1] = scale.domain() as [number, number];
  let ticks = scale.ticks(8);
  if (kind === "log" && ticks.length > 10) {
    ticks = ticks.filter((t) => {
      const m = t / Math.pow(10, Math.floor(Math.log10(t)));
      return Math.abs(m - 1) < 1e-9;
    });
  }
  return { kind, map: (v) => scale(v), ticks, domain: [d0, d1] };
}
