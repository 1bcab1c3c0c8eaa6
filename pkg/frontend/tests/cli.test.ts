import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

const HERE = dirname(fileURLToPath(import.meta.url));
const CLI = join(HERE, "..", "dist", "cli.js");
const FIXTURES = join(HERE, "fixtures");

interface Result {
  status: number;
  stdout: string;
  stderr: string;
}

function run(args: string[]): Result {
  try {
    const stdout = execFileSync("node", [CLI, ...args], { encoding: "utf8" });
    return { status: 0, stdout, stderr: "" };
  } catch (err) {
    const e = err as { status: number; stdout: string; stderr: string };
    return { status: e.status, stdout: String(e.stdout), stderr: String(e.stderr) };
  }
}

describe("plot CLI", () => {
  const tmp = mkdtempSync(join(tmpdir(), "plots-"));

  it("renders a figure and prints the output path", () => {
    const out = join(tmp, "fig8.svg");
    const res = run(["--input", join(FIXTURES, "fig8.csv"), "--figure", "fig8", "--output", out]);
    expect(res.status).toBe(0);
    expect(res.stdout.trim()).toBe(out);
    const svg = readFileSync(out, "utf8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg).toContain('data-figure="fig8"');
  });

  it("writes byte-identical files across repeated runs", () => {
    const a = join(tmp, "a.svg");
    const b = join(tmp, "b.svg");
    for (const out of [a, b]) {
      const res = run([
        "--input",
        join(FIXTURES, "fig7.csv"),
        "--figure",
        "fig7",
        "--output",
        out,
      ]);
      expect(res.status).toBe(0);
    }
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });

  it("fails on an empty CSV", () => {
    const empty = join(tmp, "empty.csv");
    writeFileSync(empty, "");
    const res = run(["--input", empty, "--figure", "fig6", "--output", join(tmp, "x.svg")]);
    expect(res.status).toBe(2);
    expect(res.stderr).toContain("error:");
  });

  it("fails on a schema mismatch with the missing column named", () => {
    const bad = join(tmp, "bad.csv");
    writeFileSync(bad, "n,winrate\n1,0.5\n");
    const res = run(["--input", bad, "--figure", "fig6", "--output", join(tmp, "x.svg")]);
    expect(res.status).toBe(2);
    expect(res.stderr).toContain('"success"');
  });

  it("fails on a missing input file", () => {
    const res = run([
      "--input",
      join(tmp, "nope.csv"),
      "--figure",
      "fig6",
      "--output",
      join(tmp, "x.svg"),
    ]);
    expect(res.status).toBe(2);
    expect(res.stderr).toContain("no such file");
  });

  it("rejects an unknown figure id at argument parsing", () => {
    const res = run([
      "--input",
      join(FIXTURES, "fig6.csv"),
      "--figure",
      "fig1",
      "--output",
      join(tmp, "x.svg"),
    ]);
    expect(res.status).not.toBe(0);
  });

  it("rejects unknown flags", () => {
    const res = run(["--input", "x", "--figure", "fig6", "--output", "y", "--smooth"]);
    expect(res.status).not.toBe(0);
  });
});
