#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaError } from "./csv.js";
import { FIGURE_IDS } from "./figures.js";
import { renderFigure } from "./index.js";

const argv = yargs(hideBin(process.argv))
  .scriptName("fockfusion-plots")
  .usage("$0 --input <csv> --figure <id> --output <svg>")
  .option("input", { type: "string", demandOption: true, describe: "figure data CSV" })
  .option("figure", {
    type: "string",
    demandOption: true,
    choices: FIGURE_IDS,
    describe: "which figure the CSV holds",
  })
  .option("output", { type: "string", demandOption: true, describe: "SVG file to write" })
  .strict()
  .version(false)
  .parseSync();

try {
  const text = readFileSync(argv.input, "utf8");
  const svg = renderFigure(argv.figure, text);
  writeFileSync(argv.output, svg);
  console.log(argv.output);
} catch (err) {
  if (err instanceof SchemaError) {
    console.error(`error: ${err.message}`);
    process.exit(2);
  }
  if (err instanceof Error && "code" in err && err.code === "ENOENT") {
    console.error(`error: no such file: ${argv.input}`);
    process.exit(2);
  }
  throw err;
}
