#!/usr/bin/env node
/** plotgen <figure-id> --manifest <path> --out <file> [--bin-width W] [--no-normalize] */

import { writeFileSync } from "node:fs";

import { FIGURES, renderFigure, StyleOptions } from "./figures.js";

function usage(): string {
  return (
    "usage: plotgen <figure-id> --manifest <path> --out <file> " +
    "[--bin-width W] [--no-normalize]\n" +
    `figure ids: ${Object.keys(FIGURES).join(", ")}`
  );
}

export function main(argv: string[]): number {
  const args = [...argv];
  if (args.includes("--help") || args.length === 0) {
    console.log(usage());
    return 0;
  }
  const figureId = args.shift()!;
  let manifest = "";
  let out = "";
  const style: StyleOptions = {};
  while (args.length > 0) {
    const flag = args.shift()!;
    switch (flag) {
      case "--manifest":
        manifest = args.shift() ?? "";
        break;
      case "--out":
        out = args.shift() ?? "";
        break;
      case "--bin-width":
        style.binWidth = Number(args.shift());
        break;
      case "--no-normalize":
        style.normalize = false;
        break;
      default:
        console.error(`unknown option ${flag}\n${usage()}`);
        return 2;
    }
  }
  if (!manifest || !out) {
    console.error(usage());
    return 2;
  }
  try {
    writeFileSync(out, renderFigure(figureId, manifest, style), "utf-8");
  } catch (err) {
    console.error(`plotgen: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
  console.log(out);
  return 0;
}

process.exit(main(process.argv.slice(2)));
