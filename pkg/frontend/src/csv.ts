/** Strict reader for the simulator's CSV files: one header row naming the
 * columns (units in brackets), comma-separated numeric cells, '.' decimals.
 */

import { readFileSync } from "node:fs";

export interface Table {
  /** Header names with any "[unit]" suffix stripped. */
  columns: string[];
  /** Column-major numeric data; non-numeric cells become NaN. */
  data: number[][];
  rows: number;
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length < 1) {
    throw new Error("empty CSV");
  }
  const columns = lines[0].split(",").map((h) => h.replace(/\s*\[.*\]\s*$/, "").trim());
  const data: number[][] = columns.map(() => []);
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new Error(`row ${i} has ${cells.length} cells, expected ${columns.length}`);
    }
    for (let c = 0; c < columns.length; c++) {
      data[c].push(Number(cells[c]));
    }
  }
  return { columns, data, rows: lines.length - 1 };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"));
}

export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(`column ${name} not found (have: ${table.columns.join(", ")})`);
  }
  return table.data[idx];
}
