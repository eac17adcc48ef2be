#!/usr/bin/env node
/**
 * plots <figure-kind> --in <csv> --out <path.svg>
 *
 * Figure kinds:
 *   relative-misses       grouped bars of misses normalized to base
 *   contiguity-histogram  size-band chunk counts from a `scan` CSV
 *   cpi-breakdown         stacked per-event translation cycles
 *
 * Output is SVG.  Nothing is written when the input fails validation.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { buildContiguityHistogram } from "./contiguityHistogram.js";
import { buildCpiBreakdown } from "./cpiBreakdown.js";
import { buildRelativeMissesChart } from "./relativeMisses.js";

export const FIGURE_KINDS = [
  "relative-misses",
  "contiguity-histogram",
  "cpi-breakdown",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export function renderFigure(kind: FigureKind, csvText: string): string {
  switch (kind) {
    case "relative-misses":
      return buildRelativeMissesChart(csvText).svg;
    case "contiguity-histogram":
      return buildContiguityHistogram(csvText).svg;
    case "cpi-breakdown":
      return buildCpiBreakdown(csvText).svg;
  }
}

interface Args {
  kind: FigureKind;
  input: string;
  output: string;
}

export function parseArgs(argv: string[]): Args {
  const [kind, ...rest] = argv;
  if (!kind || !(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new Error(
      `usage: plots <${FIGURE_KINDS.join("|")}> --in <csv> --out <svg>`,
    );
  }
  let input: string | undefined;
  let output: string | undefined;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) throw new Error(`missing value for ${flag}`);
    if (flag === "--in") input = value;
    else if (flag === "--out") output = value;
    else throw new Error(`unknown flag ${flag}`);
  }
  if (!input || !output) throw new Error("both --in and --out are required");
  if (!output.endsWith(".svg")) {
    throw new Error("only SVG output is supported; use an .svg path");
  }
  return { kind: kind as FigureKind, input, output };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const svg = renderFigure(args.kind, readFileSync(args.input, "utf8"));
    writeFileSync(args.output, svg + "\n");
    console.log(`wrote ${args.output}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
