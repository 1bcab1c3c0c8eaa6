import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { renderFigure } from "../dist/index.js";

const FIXTURE = join(dirname(fileURLToPath(import.meta.url)), "fixtures", "fig4.csv");
const text = readFileSync(FIXTURE, "utf8");

describe("heat-grid figure", () => {
  it("draws one panel per objective and value column", () => {
    const svg = renderFigure("fig4", text);
    const panels = [...svg.matchAll(/data-quantity="([^"]+)" data-category="([^"]+)"/g)].map(
      (m) => `${m[1]}/${m[2]}`,
    );
    expect(panels).toEqual([
      "eta_opt/recycled-grow",
      "eta_opt/nonrecycled-zero-loss",
      "p_opt/recycled-grow",
      "p_opt/nonrecycled-zero-loss",
    ]);
  });

  it("draws every table row as a titled cell", () => {
    const svg = renderFigure("fig4", text);
    const titles = svg.match(/<title>m=/g) ?? [];
    const dataRows = text.split("\n").filter((l) => l && !l.startsWith("#")).length - 1;
    // each row appears once per value column
    expect(titles.length).toBe(2 * dataRows);
  });

  it("colors the extremes with the ramp endpoints", () => {
    const svg = renderFigure("fig4", text);
    expect(svg).toContain('fill="#14325a"');
    expect(svg).toContain('fill="#f2a65a"');
  });

  it("annotates each quantity with its min and max", () => {
    const svg = renderFigure("fig4", text);
    const keys = [...svg.matchAll(/<g class="colorkey" data-quantity="([^"]+)">/g)].map(
      (m) => m[1],
    );
    expect(keys).toEqual(["eta_opt", "p_opt"]);
  });

  it("rejects a CSV missing the category column", () => {
    const broken = text.replace("objective,", "goal,");
    expect(() => renderFigure("fig4", broken)).toThrow(/"objective"/);
  });

  it("rejects non-numeric grid coordinates", () => {
    const broken = ["objective,m,n,eta_opt,p_opt", "recycled-grow,one,1,0.7,0.5", ""].join("\n");
    expect(() => renderFigure("fig4", broken)).toThrow(/not a number/);
  });

  it("renders identical bytes on repeated runs", () => {
    expect(renderFigure("fig4", text)).toBe(renderFigure("fig4", text));
  });
});
