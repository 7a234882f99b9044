#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { parseCsv, SchemaError } from "./csv.js";
import { FIGURE_KINDS, renderFigure, type FigureKind } from "./figure.js";

export function run(argv: string[]): number {
  const args = yargs(argv)
    .command("plot", "render a campaign CSV as an SVG figure")
    .option("kind", {
      type: "string",
      choices: FIGURE_KINDS,
      demandOption: true,
      describe: "figure kind",
    })
    .option("in", {
      type: "string",
      demandOption: true,
      describe: "input CSV (an *_agg.csv, or *_cdf.csv for rank-cdf)",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("dump", {
      type: "string",
      describe: "also write the plotted rows back out as CSV",
    })
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    const text = readFileSync(args.in!, "utf-8");
    const figure = renderFigure(args.kind as FigureKind, parseCsv(text));
    for (const warning of figure.warnings) {
      process.stderr.write(`warning: ${warning}\n`);
    }
    writeFileSync(args.out!, figure.svg);
    if (args.dump) {
      writeFileSync(args.dump, figure.dump);
    }
    return 0;
  } catch (err) {
    const prefix = err instanceof SchemaError ? "schema error" : "error";
    process.stderr.write(`${prefix}: ${(err as Error).message}\n`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(run(hideBin(process.argv)));
}
