import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { FIGURES, renderFigure } from "../src/figures.js";
import { GOLDENS, qvdpTwoManifest, spinTwoManifest, sweepManifest } from "./fixtures.js";

describe("golden manifests", () => {
  for (const figureId of Object.keys(FIGURES)) {
    it(`renders ${figureId} without error`, () => {
      const manifest = GOLDENS[figureId]();
      const svg = renderFigure(figureId, manifest);
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
      expect(svg.length).toBeGreaterThan(500);
    });
  }

  it("is deterministic: identical inputs, identical bytes", () => {
    const manifest = GOLDENS.fig6();
    expect(renderFigure("fig6", manifest)).toBe(renderFigure("fig6", manifest));
  });

  it("renders the Arnold-tongue variants from sweep manifests", () => {
    for (const figureId of ["fig4", "fig8", "fig11"]) {
      const svg = renderFigure(figureId, sweepManifest());
      expect(svg).toContain("<rect");  // grayscale cells
      expect(svg).toContain("stroke-dasharray");  // V = |delta| guide
    }
  });
});

describe("error reporting", () => {
  it("rejects unknown figure ids", () => {
    expect(() => renderFigure("fig99", GOLDENS.fig1())).toThrow(/unknown figure id/);
  });

  it("names missing inputs explicitly", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotgen-empty-"));
    const manifest = join(dir, "manifest.json");
    writeFileSync(manifest, JSON.stringify({
      scenario: "qvdp-lc", params: {}, seed: 0, versions: {}, files: [],
    }));
    expect(() => renderFigure("fig6", manifest)).toThrow(/missing required inputs[\s\S]*Husimi/);
  });

  it("rejects manifests without the required keys", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotgen-bad-"));
    const manifest = join(dir, "manifest.json");
    writeFileSync(manifest, JSON.stringify({ scenario: "x" }));
    expect(() => renderFigure("fig1", manifest)).toThrow(/missing the 'params'/);
  });
});

describe("captioned transforms", () => {
  it("fig9 bin-averages the measured spectra to width spec_delta/10", () => {
    const manifest = qvdpTwoManifest();
    const svg = renderFigure("fig9", manifest);
    // raw grids have 81 points spaced 0.125; delta/10 = 0.5 -> 4 points per
    // bin -> 20 scatter markers per measured spectrum, 4 spectra in total
    const circles = (svg.match(/<circle /g) ?? []).length;
    expect(circles).toBe(4 * 20);
  });

  it("fig9 honors an explicit bin width", () => {
    const svg = renderFigure("fig9", qvdpTwoManifest(), { binWidth: 1.0 });
    const circles = (svg.match(/<circle /g) ?? []).length;
    expect(circles).toBe(4 * 10);
  });

  it("fig12 max-normalizes every spectrum", () => {
    const svg = renderFigure("fig12", spinTwoManifest());
    // all four normalized curves must reach the same maximal height (the
    // smallest pixel y among their points), despite different raw scales
    const polylines = [...svg.matchAll(/<polyline points="([^"]+)"/g)].map((m) => m[1]);
    const curveTops = polylines
      .filter((p) => p.split(" ").length > 50)  // the spectra, not the frame
      .map((pts) => Math.min(...pts.split(" ").map((xy) => Number(xy.split(",")[1]))));
    expect(curveTops.length).toBe(4);
    for (const top of curveTops) {
      expect(Math.abs(top - curveTops[0])).toBeLessThan(1e-6);
    }
  });
});
