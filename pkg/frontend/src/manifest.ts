/** Loading and querying a run manifest (manifest.json + data files). */

import { existsSync, readFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { readCsv, Table } from "./csv.js";

export interface ManifestFile {
  path: string;
  sha256: string;
}

export interface Manifest {
  scenario: string;
  params: Record<string, unknown>;
  seed: number;
  versions: Record<string, string>;
  files: ManifestFile[];
  /** Directory holding the data files. */
  root: string;
}

export function loadManifest(path: string): Manifest {
  if (!existsSync(path)) {
    throw new Error(`manifest not found: ${path}`);
  }
  const raw = JSON.parse(readFileSync(path, "utf-8"));
  for (const key of ["scenario", "params", "files"]) {
    if (!(key in raw)) {
      throw new Error(`manifest is missing the '${key}' key`);
    }
  }
  return { ...raw, root: dirname(path) } as Manifest;
}

/** All data-file names matching a pattern, in manifest order. */
export function matchFiles(manifest: Manifest, pattern: RegExp): string[] {
  return manifest.files.map((f) => f.path).filter((p) => pattern.test(p));
}

export function readTable(manifest: Manifest, name: string): Table {
  return readCsv(join(manifest.root, name));
}

/** JSON sidecar of a data file ({} when absent). */
export function sidecar(manifest: Manifest, name: string): Record<string, unknown> {
  const path = join(manifest.root, name + ".json");
  if (!existsSync(path)) {
    return {};
  }
  return JSON.parse(readFileSync(path, "utf-8"));
}

/** Require the manifest to provide at least one of each named file family. */
export function requireFiles(
  manifest: Manifest,
  families: Record<string, RegExp>,
): Record<string, string[]> {
  const found: Record<string, string[]> = {};
  const missing: string[] = [];
  for (const [label, pattern] of Object.entries(families)) {
    const names = matchFiles(manifest, pattern);
    if (names.length === 0) {
      missing.push(`${label} (expected files matching ${pattern})`);
    }
    found[label] = names;
  }
  if (missing.length > 0) {
    throw new Error(
      `manifest for '${manifest.scenario}' is missing required inputs:\n  ` +
        missing.join("\n  "),
    );
  }
  return found;
}

/** Numeric value buried in the manifest params, with a fallback. */
export function param(manifest: Manifest, key: string, fallback?: number): number {
  const value = manifest.params[key];
  if (typeof value === "number") {
    return value;
  }
  if (fallback !== undefined) {
    return fallback;
  }
  throw new Error(`manifest params lack numeric '${key}'`);
}
