/** Display transforms applied at render time (never physics). */

export interface Series {
  x: number[];
  y: number[];
}

/** Average consecutive frequency bins of the given width; the output grid
 * holds bin centers, trailing points that do not fill a bin are dropped.
 */
export function binAverage(series: Series, width: number): Series {
  if (width <= 0) {
    throw new Error("bin width must be positive");
  }
  if (series.x.length < 2) {
    return series;
  }
  const step = series.x[1] - series.x[0];
  const per = Math.max(1, Math.round(width / step));
  const n = Math.floor(series.x.length / per) * per;
  const x: number[] = [];
  const y: number[] = [];
  for (let i = 0; i < n; i += per) {
    let sx = 0;
    let sy = 0;
    for (let j = 0; j < per; j++) {
      sx += series.x[i + j];
      sy += series.y[i + j];
    }
    x.push(sx / per);
    y.push(sy / per);
  }
  return { x, y };
}

/** Scale values so the maximum equals 1 (flat zero data stays zero). */
export function maxNormalize(values: number[]): number[] {
  const vMax = Math.max(...values.filter(Number.isFinite));
  if (!(vMax > 0)) {
    return [...values];
  }
  return values.map((v) => v / vMax);
}
