/** Minimal SVG scene builder: panels with axes, polylines, scatter points,
 * grayscale heatmaps, and Mollweide-projected sphere heatmaps.  Output is a
 * deterministic string: identical inputs give identical bytes.
 */

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export interface Extent {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function dataExtent(xs: number[], ys: number[], pad = 0.05): Extent {
  const finite = (v: number[]) => v.filter(Number.isFinite);
  const fx = finite(xs);
  const fy = finite(ys);
  let xMin = Math.min(...fx);
  let xMax = Math.max(...fx);
  let yMin = Math.min(...fy);
  let yMax = Math.max(...fy);
  if (xMin === xMax) {
    xMin -= 1;
    xMax += 1;
  }
  if (yMin === yMax) {
    yMin -= 1;
    yMax += 1;
  }
  const dx = (xMax - xMin) * pad;
  const dy = (yMax - yMin) * pad;
  return { xMin: xMin - dx, xMax: xMax + dx, yMin: yMin - dy, yMax: yMax + dy };
}

export function mergeExtents(a: Extent, b: Extent): Extent {
  return {
    xMin: Math.min(a.xMin, b.xMin),
    xMax: Math.max(a.xMax, b.xMax),
    yMin: Math.min(a.yMin, b.yMin),
    yMax: Math.max(a.yMax, b.yMax),
  };
}

/** Grayscale colormap: 0 -> white, 1 -> black. */
export function gray(value: number, vMax: number): string {
  const t = vMax > 0 ? Math.min(Math.max(value / vMax, 0), 1) : 0;
  const level = Math.round(255 * (1 - t));
  return `rgb(${level},${level},${level})`;
}

/** Mollweide projection of colatitude theta in [0, pi], azimuth phi in
 * [0, 2 pi) onto an ellipse of semi-axes (2 sqrt2 R, sqrt2 R).  Lines of
 * constant theta are horizontal; theta = 0 maps to the top edge.
 */
export function mollweide(theta: number, phi: number, radius = 1.0): { x: number; y: number } {
  const lat = Math.PI / 2 - theta;
  const lon = phi - Math.PI; // center the map on phi = pi
  let aux = lat;
  // solve 2 aux + sin(2 aux) = pi sin(lat) by Newton iteration
  if (Math.abs(Math.abs(lat) - Math.PI / 2) > 1e-12) {
    for (let i = 0; i < 30; i++) {
      const f = 2 * aux + Math.sin(2 * aux) - Math.PI * Math.sin(lat);
      const df = 2 + 2 * Math.cos(2 * aux);
      if (Math.abs(df) < 1e-14) break;
      const next = aux - f / df;
      if (Math.abs(next - aux) < 1e-13) {
        aux = next;
        break;
      }
      aux = next;
    }
  }
  return {
    x: radius * ((2 * Math.SQRT2) / Math.PI) * lon * Math.cos(aux),
    y: radius * Math.SQRT2 * Math.sin(aux),
  };
}

export class Panel {
  parts: string[] = [];

  constructor(
    public x0: number,
    public y0: number,
    public width: number,
    public height: number,
    public extent: Extent,
    public title = "",
  ) {}

  px(x: number): number {
    return this.x0 + ((x - this.extent.xMin) / (this.extent.xMax - this.extent.xMin)) * this.width;
  }

  py(y: number): number {
    return this.y0 + this.height -
      ((y - this.extent.yMin) / (this.extent.yMax - this.extent.yMin)) * this.height;
  }

  frame(xLabel = "", yLabel = ""): void {
    const { x0, y0, width, height } = this;
    this.parts.push(
      `<rect x="${fmt(x0)}" y="${fmt(y0)}" width="${fmt(width)}" height="${fmt(height)}" ` +
        `fill="none" stroke="black" stroke-width="1"/>`,
    );
    for (const frac of [0, 0.5, 1]) {
      const xv = this.extent.xMin + frac * (this.extent.xMax - this.extent.xMin);
      const yv = this.extent.yMin + frac * (this.extent.yMax - this.extent.yMin);
      const tx = this.px(xv);
      const ty = this.py(yv);
      this.parts.push(
        `<line x1="${fmt(tx)}" y1="${fmt(y0 + height)}" x2="${fmt(tx)}" y2="${fmt(y0 + height + 4)}" stroke="black"/>`,
        `<text x="${fmt(tx)}" y="${fmt(y0 + height + 15)}" ${FONT} font-size="9" text-anchor="middle">${xv.toPrecision(3)}</text>`,
        `<line x1="${fmt(x0 - 4)}" y1="${fmt(ty)}" x2="${fmt(x0)}" y2="${fmt(ty)}" stroke="black"/>`,
        `<text x="${fmt(x0 - 6)}" y="${fmt(ty + 3)}" ${FONT} font-size="9" text-anchor="end">${yv.toPrecision(3)}</text>`,
      );
    }
    if (xLabel) {
      this.parts.push(
        `<text x="${fmt(x0 + width / 2)}" y="${fmt(y0 + height + 28)}" ${FONT} font-size="11" text-anchor="middle">${xLabel}</text>`,
      );
    }
    if (yLabel) {
      const cx = x0 - 32;
      const cy = y0 + height / 2;
      this.parts.push(
        `<text x="${fmt(cx)}" y="${fmt(cy)}" ${FONT} font-size="11" text-anchor="middle" ` +
          `transform="rotate(-90 ${fmt(cx)} ${fmt(cy)})">${yLabel}</text>`,
      );
    }
    if (this.title) {
      this.parts.push(
        `<text x="${fmt(x0 + width / 2)}" y="${fmt(y0 - 6)}" ${FONT} font-size="11" text-anchor="middle">${this.title}</text>`,
      );
    }
  }

  polyline(xs: number[], ys: number[], stroke: string, width = 1.2, dash = ""): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
        pts.push(`${fmt(this.px(xs[i]))},${fmt(this.py(ys[i]))}`);
      }
    }
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`,
    );
  }

  scatter(xs: number[], ys: number[], fill: string, r = 2): void {
    for (let i = 0; i < xs.length; i++) {
      if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
        this.parts.push(
          `<circle cx="${fmt(this.px(xs[i]))}" cy="${fmt(this.py(ys[i]))}" r="${r}" fill="${fill}"/>`,
        );
      }
    }
  }

  /** Heatmap from cell-edge rectangles (long-format left/right edges). */
  heatmapCells(
    xl: number[], xr: number[], yl: number[], yr: number[], values: number[],
  ): void {
    const vMax = Math.max(...values.filter(Number.isFinite), 0);
    for (let i = 0; i < values.length; i++) {
      const x = this.px(xl[i]);
      const y = this.py(yr[i]);
      const w = this.px(xr[i]) - x;
      const h = this.py(yl[i]) - y;
      this.parts.push(
        `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
          `fill="${gray(values[i], vMax)}" stroke="none"/>`,
      );
    }
  }

  /** Heatmap from point-sampled values on a product grid (x, y, value rows). */
  heatmapGrid(xs: number[], ys: number[], values: number[]): void {
    const ux = uniqueSorted(xs);
    const uy = uniqueSorted(ys);
    const dx = ux.length > 1 ? ux[1] - ux[0] : 1;
    const dy = uy.length > 1 ? uy[1] - uy[0] : 1;
    const vMax = Math.max(...values.filter(Number.isFinite), 0);
    for (let i = 0; i < values.length; i++) {
      const x = this.px(xs[i] - dx / 2);
      const y = this.py(ys[i] + dy / 2);
      const w = this.px(xs[i] + dx / 2) - x;
      const h = this.py(ys[i] - dy / 2) - y;
      this.parts.push(
        `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
          `fill="${gray(values[i], vMax)}" stroke="none"/>`,
      );
    }
  }

  /** Mollweide heatmap of (theta, phi, value) samples on a product grid. */
  mollweideGrid(thetas: number[], phis: number[], values: number[]): void {
    const ut = uniqueSorted(thetas);
    const up = uniqueSorted(phis);
    const dt = ut.length > 1 ? ut[1] - ut[0] : Math.PI / 8;
    const dp = up.length > 1 ? up[1] - up[0] : Math.PI / 8;
    const vMax = Math.max(...values.filter(Number.isFinite), 0);
    // draw the ellipse outline first
    const cx = (this.extent.xMin + this.extent.xMax) / 2;
    const cy = (this.extent.yMin + this.extent.yMax) / 2;
    const rx = this.px(cx + 2 * Math.SQRT2) - this.px(cx);
    const ry = this.py(cy) - this.py(cy + Math.SQRT2);
    this.parts.push(
      `<ellipse cx="${fmt(this.px(cx))}" cy="${fmt(this.py(cy))}" rx="${fmt(rx)}" ry="${fmt(ry)}" ` +
        `fill="white" stroke="black" stroke-width="1"/>`,
    );
    for (let i = 0; i < values.length; i++) {
      const t0 = Math.max(thetas[i] - dt / 2, 0);
      const t1 = Math.min(thetas[i] + dt / 2, Math.PI);
      const p0 = phis[i] - dp / 2;
      const p1 = phis[i] + dp / 2;
      const corners = [
        mollweide(t0, p0), mollweide(t0, p1), mollweide(t1, p1), mollweide(t1, p0),
      ];
      const pts = corners
        .map((c) => `${fmt(this.px(c.x))},${fmt(this.py(c.y))}`)
        .join(" ");
      this.parts.push(
        `<polygon points="${pts}" fill="${gray(values[i], vMax)}" stroke="none"/>`,
      );
    }
  }
}

export function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

export class Scene {
  panels: Panel[] = [];

  constructor(public width: number, public height: number, public title = "") {}

  panel(
    col: number, row: number, nCols: number, nRows: number, extent: Extent, title = "",
  ): Panel {
    const marginX = 52;
    const marginY = 40;
    const gapX = 26;
    const gapY = 46;
    const w = (this.width - 2 * marginX - (nCols - 1) * gapX) / nCols;
    const h = (this.height - 2 * marginY - (nRows - 1) * gapY) / nRows;
    const p = new Panel(
      marginX + col * (w + gapX),
      marginY + row * (h + gapY),
      w,
      h,
      extent,
      title,
    );
    this.panels.push(p);
    return p;
  }

  render(): string {
    const body = this.panels.flatMap((p) => p.parts).join("\n");
    const titleTag = this.title
      ? `<text x="${fmt(this.width / 2)}" y="16" ${FONT} font-size="13" text-anchor="middle">${this.title}</text>\n`
      : "";
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      titleTag + body + "\n</svg>\n"
    );
  }
}
