import { describe, expect, it } from "vitest";

import { parseCsv } from "../src/csv.js";
import { dataExtent, gray, mollweide } from "../src/svg.js";

describe("mollweide", () => {
  it("keeps lines of constant theta horizontal", () => {
    for (const theta of [0.4, Math.PI / 2, 2.2]) {
      const ys = [0.5, 2.0, 4.0, 6.0].map((phi) => mollweide(theta, phi).y);
      for (const y of ys) {
        expect(y).toBeCloseTo(ys[0], 10);
      }
    }
  });

  it("maps the equator to y = 0 and the poles to the top and bottom", () => {
    expect(mollweide(Math.PI / 2, 1.0).y).toBeCloseTo(0, 10);
    expect(mollweide(0, 0).y).toBeCloseTo(Math.SQRT2, 10);
    expect(mollweide(Math.PI, 0).y).toBeCloseTo(-Math.SQRT2, 10);
  });

  it("increases x with phi", () => {
    const xs = [1.0, 2.0, 3.0, 5.0].map((phi) => mollweide(Math.PI / 2, phi).x);
    for (let i = 1; i < xs.length; i++) {
      expect(xs[i]).toBeGreaterThan(xs[i - 1]);
    }
    expect(mollweide(Math.PI / 2, Math.PI).x).toBeCloseTo(0, 10);
  });

  it("stays inside the 2 sqrt2 x sqrt2 ellipse", () => {
    for (const theta of [0.1, 1.0, 2.0, 3.0]) {
      for (const phi of [0.01, 1.5, 4.0, 6.2]) {
        const { x, y } = mollweide(theta, phi);
        expect((x / (2 * Math.SQRT2)) ** 2 + (y / Math.SQRT2) ** 2).toBeLessThanOrEqual(1 + 1e-9);
      }
    }
  });
});

describe("gray", () => {
  it("maps zero to white and the maximum to black", () => {
    expect(gray(0, 2)).toBe("rgb(255,255,255)");
    expect(gray(2, 2)).toBe("rgb(0,0,0)");
  });
});

describe("dataExtent", () => {
  it("pads degenerate ranges", () => {
    const e = dataExtent([1, 1], [2, 2]);
    expect(e.xMax).toBeGreaterThan(e.xMin);
    expect(e.yMax).toBeGreaterThan(e.yMin);
  });
});

describe("parseCsv", () => {
  it("strips unit suffixes and parses columns", () => {
    const t = parseCsv("t [1/kappa],re_alpha\n0.0,1.5\n0.1,2.5\n");
    expect(t.columns).toEqual(["t", "re_alpha"]);
    expect(t.data[1]).toEqual([1.5, 2.5]);
    expect(t.rows).toBe(2);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(/row 1/);
  });
});
