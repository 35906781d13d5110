/** Figure layouts: map one run manifest onto an SVG scene.
 *
 * Every figure reads only the manifest's CSV files (physics lives in the
 * simulator).  Figures whose panels come from different scenario runs
 * (the Arnold-tongue grayscales vs the line panels) render whichever
 * panel families the given manifest provides and fail only when none of
 * them is present, naming the missing inputs.
 */

import { column, Table } from "./csv.js";
import {
  loadManifest,
  Manifest,
  matchFiles,
  param,
  readTable,
  requireFiles,
  sidecar,
} from "./manifest.js";
import { dataExtent, mollweide, Panel, Scene } from "./svg.js";
import { binAverage, maxNormalize } from "./transforms.js";

export interface StyleOptions {
  /** Frequency-bin width for scatter spectra (default: spec_delta / 10). */
  binWidth?: number;
  /** Max-normalize spectra where the layout calls for it. */
  normalize?: boolean;
}

const BLUES = ["#9ecae9", "#74a9cf", "#4292c6", "#2171b5", "#08519c", "#083582"];
const LINES = ["#08519c", "#c7302a", "#2e9938", "#7049a3", "#c97b12", "#4eacac"];

function lineColor(i: number): string {
  return LINES[i % LINES.length];
}

function groupByTrajectory(table: Table, xName: string, yName: string): Array<{ x: number[]; y: number[] }> {
  const ids = column(table, "trajectory");
  const xs = column(table, xName);
  const ys = column(table, yName);
  const groups = new Map<number, { x: number[]; y: number[] }>();
  for (let i = 0; i < ids.length; i++) {
    let g = groups.get(ids[i]);
    if (!g) {
      g = { x: [], y: [] };
      groups.set(ids[i], g);
    }
    g.x.push(xs[i]);
    g.y.push(ys[i]);
  }
  return [...groups.entries()].sort((a, b) => a[0] - b[0]).map(([, g]) => g);
}

function snapshotFiles(manifest: Manifest, prefix: string): Array<{ name: string; t: number }> {
  const names = matchFiles(manifest, new RegExp(`^${prefix}_t[^.]*\\.csv$`));
  return names
    .map((name) => ({ name, t: Number(sidecar(manifest, name).t ?? NaN) }))
    .sort((a, b) => a.t - b.t);
}

function couplingFiles(manifest: Manifest, prefix: string): Array<{ name: string; v: number }> {
  const names = matchFiles(manifest, new RegExp(`^${prefix}_V[^.]*\\.csv$`));
  return names
    .map((name) => ({ name, v: Number(sidecar(manifest, name).coupling ?? NaN) }))
    .sort((a, b) => a.v - b.v);
}

function histCenters(table: Table): { x: number[]; y: number[] } {
  const left = column(table, "bin_left");
  const right = column(table, "bin_right");
  const density = column(table, "density");
  return { x: left.map((l, i) => 0.5 * (l + right[i])), y: density };
}

// --- classical figures ------------------------------------------------------

function fig1(manifest: Manifest): Scene {
  requireFiles(manifest, { trajectories: /^noiseless_trajectories\.csv$/ });
  const table = readTable(manifest, "noiseless_trajectories.csv");
  const groups = groupByTrajectory(table, "t", "re_alpha");
  const ims = groupByTrajectory(table, "t", "im_alpha");
  const scene = new Scene(420, 420, "limit-cycle trajectories");
  const all = groups.flatMap((g, i) => [g.y, ims[i].y]).flat();
  const lim = Math.max(...all.map(Math.abs)) * 1.1;
  const panel = scene.panel(0, 0, 1, 1, { xMin: -lim, xMax: lim, yMin: -lim, yMax: lim });
  panel.frame("x", "p");
  // attractor circle, radius taken from the tail of the first trajectory
  const g0 = groups[0];
  const i0 = ims[0];
  const rAttr = Math.hypot(g0.y[g0.y.length - 1], i0.y[i0.y.length - 1]);
  const circle: { x: number[]; y: number[] } = { x: [], y: [] };
  for (let k = 0; k <= 256; k++) {
    const a = (2 * Math.PI * k) / 256;
    circle.x.push(rAttr * Math.cos(a));
    circle.y.push(rAttr * Math.sin(a));
  }
  panel.polyline(circle.x, circle.y, "#c7302a", 2);
  groups.forEach((g, i) => panel.polyline(g.y, ims[i].y, BLUES[i % BLUES.length], 1.2));
  return scene;
}

function fig2(manifest: Manifest): Scene {
  requireFiles(manifest, {
    trajectories: /^trajectories\.csv$/,
    mean: /^mean_x\.csv$/,
  });
  const trajs = readTable(manifest, "trajectories.csv");
  const mean = readTable(manifest, "mean_x.csv");
  const groups = groupByTrajectory(trajs, "t", "re_alpha");
  const t = column(mean, "t");
  const scene = new Scene(680, 360, "noisy trajectories and ensemble mean");
  const ys = groups.flatMap((g) => g.y);
  const ext = dataExtent(t, ys);
  const panel = scene.panel(0, 0, 1, 1, ext);
  panel.frame("t", "x");
  groups.forEach((g, i) =>
    panel.polyline(g.x, g.y, i === 0 ? "#2171b5" : "#b8d4ea", i === 0 ? 1.6 : 1),
  );
  panel.polyline(t, column(mean, "noiseless_re_alpha"), "#c7302a", 1.6);
  panel.polyline(t, column(mean, "mean_re_alpha"), "black", 2);
  return scene;
}

function fig3(manifest: Manifest): Scene {
  requireFiles(manifest, {
    planes: /^pxp_t[^.]*\.csv$/,
    phases: /^phase_hist_t[^.]*\.csv$/,
  });
  const planes = snapshotFiles(manifest, "pxp");
  const phases = snapshotFiles(manifest, "phase_hist");
  const n = planes.length;
  const scene = new Scene(230 * n + 90, 520, "P(x,p) and P(phi) snapshots");
  for (let i = 0; i < n; i++) {
    const table = readTable(manifest, planes[i].name);
    const xl = column(table, "x_left");
    const xr = column(table, "x_right");
    const pl = column(table, "p_left");
    const pr = column(table, "p_right");
    const ext = {
      xMin: Math.min(...xl), xMax: Math.max(...xr),
      yMin: Math.min(...pl), yMax: Math.max(...pr),
    };
    const top = scene.panel(i, 0, n, 2, ext, `t = ${planes[i].t}`);
    top.heatmapCells(xl, xr, pl, pr, column(table, "mass"));
    top.frame("x", i === 0 ? "p" : "");
  }
  const dists = phases.map((f) => histCenters(readTable(manifest, f.name)));
  const yMax = Math.max(...dists.flatMap((d) => d.y)) * 1.1;
  for (let i = 0; i < phases.length; i++) {
    const bottom = scene.panel(i, 1, n, 2, {
      xMin: 0, xMax: 2 * Math.PI, yMin: 0, yMax,
    });
    bottom.frame("phi", i === 0 ? "P(phi)" : "");
    bottom.polyline(dists[i].x, dists[i].y, "#2171b5", 1.6);
  }
  return scene;
}

function renderSweepPanel(scene: Scene, manifest: Manifest, col: number, nCols: number): void {
  const table = readTable(manifest, "sweep.csv");
  const deltas = column(table, "delta");
  const vs = column(table, "coupling");
  const values = column(table, "max_value");
  const ext = dataExtent(deltas, vs, 0.0);
  const panel = scene.panel(col, 0, nCols, 1, ext, "max of the phase-difference distribution");
  panel.heatmapGrid(deltas, vs, values);
  // synchronization-transition guide V = |delta|
  const dMax = Math.max(...deltas.map(Math.abs));
  panel.polyline([0, dMax], [0, dMax], "#2171b5", 1.5, "6,4");
  panel.frame("delta", "V");
}

function renderPhaseHistPanels(
  scene: Scene, manifest: Manifest, col: number, nCols: number,
  lineFamily: string, scatterFamily: string | null,
): void {
  const lines = couplingFiles(manifest, lineFamily);
  const panels: Array<{ x: number[]; y: number[]; v: number }> = lines.map((f) => ({
    ...(lineFamily.startsWith("qphase")
      ? (() => {
          const t = readTable(manifest, f.name);
          return { x: column(t, "phi"), y: column(t, "Q") };
        })()
      : histCenters(readTable(manifest, f.name))),
    v: f.v,
  }));
  const yMax = Math.max(...panels.flatMap((p) => p.y)) * 1.15;
  const panel = scene.panel(col, 0, nCols, 1, {
    xMin: 0, xMax: 2 * Math.PI, yMin: 0, yMax,
  }, "phase-difference distribution");
  panel.frame("phi_AB", "P");
  panels.forEach((p, i) => panel.polyline(p.x, p.y, lineColor(i), 1.6));
  if (scatterFamily) {
    const scatters = couplingFiles(manifest, scatterFamily);
    scatters.forEach((f, i) => {
      const pts = histCenters(readTable(manifest, f.name));
      panel.scatter(pts.x, pts.y, lineColor(i), 2.2);
    });
  }
}

function fig4(manifest: Manifest): Scene {
  const hasSweep = matchFiles(manifest, /^sweep\.csv$/).length > 0;
  const hasHists = matchFiles(manifest, /^phase_hist_V[^.]*\.csv$/).length > 0;
  if (!hasSweep && !hasHists) {
    requireFiles(manifest, {
      "sweep grayscale": /^sweep\.csv$/,
      "phase histograms": /^phase_hist_V[^.]*\.csv$/,
    });
  }
  const nCols = Number(hasSweep) + Number(hasHists);
  const scene = new Scene(440 * nCols, 380, "classical phase locking");
  let col = 0;
  if (hasSweep) {
    renderSweepPanel(scene, manifest, col++, nCols);
  }
  if (hasHists) {
    renderPhaseHistPanels(scene, manifest, col, nCols, "phase_hist", null);
  }
  return scene;
}

function fig5(manifest: Manifest): Scene {
  requireFiles(manifest, {
    "observed frequencies": /^observed_frequency\.csv$/,
    spectra: /^spectrum_V[^.]*_(A|B)\.csv$/,
  });
  const scene = new Scene(880, 380, "classical frequency entrainment");
  const freq = readTable(manifest, "observed_frequency.csv");
  const deltas = column(freq, "delta");
  const seriesNames = freq.columns.filter((c) => c !== "delta");
  const yTop = Math.max(...seriesNames.flatMap((c) => column(freq, c)));
  const left = scene.panel(0, 0, 2, 1, dataExtent(deltas, [0, yTop]), "observed frequency difference");
  left.frame("delta", "d(phi_AB)/dt");
  left.polyline(deltas, deltas, "#999999", 1, "4,4");
  seriesNames.forEach((name, i) =>
    left.polyline(deltas, column(freq, name), name.startsWith("analytic") ? "black" : lineColor(i), 1.6),
  );

  const specs = matchFiles(manifest, /^spectrum_V[^.]*_(A|B)\.csv$/).sort();
  const series = specs.map((name) => {
    const t = readTable(manifest, name);
    return { name, x: column(t, "omega"), y: column(t, "value") };
  });
  const normed = series.map((s) => ({ ...s, y: maxNormalize(s.y) }));
  const right = scene.panel(1, 0, 2, 1, dataExtent(normed[0].x, [0, 1.05], 0.0), "spectra (max-normalized)");
  right.frame("omega", "S");
  normed.forEach((s, i) =>
    right.polyline(s.x, s.y, lineColor(Math.floor(i / 2)), 1.4, s.name.endsWith("_B.csv") ? "5,3" : ""),
  );
  return scene;
}

// --- quantum vdP figures ----------------------------------------------------

function husimiPanel(scene: Scene, manifest: Manifest, name: string, col: number,
                     nCols: number, nRows: number, title: string, yLabel: string): Panel {
  const table = readTable(manifest, name);
  const xs = column(table, "x");
  const ps = column(table, "p");
  const ext = {
    xMin: Math.min(...xs), xMax: Math.max(...xs),
    yMin: Math.min(...ps), yMax: Math.max(...ps),
  };
  const panel = scene.panel(col, 0, nCols, nRows, ext, title);
  panel.heatmapGrid(xs, ps, column(table, "Q"));
  panel.frame("x", yLabel);
  return panel;
}

function fig6(manifest: Manifest): Scene {
  requireFiles(manifest, {
    "Husimi snapshots": /^husimi_t[^.]*\.csv$/,
    "phase distributions": /^phase_dist_t[^.]*\.csv$/,
  });
  const surfaces = snapshotFiles(manifest, "husimi");
  const phases = snapshotFiles(manifest, "phase_dist");
  const n = surfaces.length;
  const scene = new Scene(230 * n + 90, 520, "Husimi-Q evolution");
  surfaces.forEach((f, i) =>
    husimiPanel(scene, manifest, f.name, i, n, 2, `t = ${f.t}`, i === 0 ? "p" : ""),
  );
  const dists = phases.map((f) => {
    const t = readTable(manifest, f.name);
    return { x: column(t, "phi"), y: column(t, "Q") };
  });
  const yMax = Math.max(...dists.flatMap((d) => d.y)) * 1.1;
  phases.forEach((f, i) => {
    const panel = scene.panel(i, 1, n, 2, { xMin: 0, xMax: 2 * Math.PI, yMin: 0, yMax });
    panel.frame("phi", i === 0 ? "Q(phi)" : "");
    panel.polyline(dists[i].x, dists[i].y, "#2171b5", 1.6);
  });
  return scene;
}

function fig7(manifest: Manifest): Scene {
  requireFiles(manifest, {
    "steady-state Husimi": /^husimi_ss\.csv$/,
    trajectories: /^trajectories\.csv$/,
    "ensemble mean": /^mean_vs_me\.csv$/,
  });
  const scene = new Scene(900, 400, "limit cycle under heterodyne detection");
  const left = husimiPanel(scene, manifest, "husimi_ss.csv", 0, 2, 1, "steady state + one trajectory", "p");
  const trajs = readTable(manifest, "trajectories.csv");
  const xm = groupByTrajectory(trajs, "t", "x_m");
  const pm = groupByTrajectory(trajs, "t", "p_m");
  left.polyline(xm[0].y, pm[0].y, "#2171b5", 1.0);

  const mean = readTable(manifest, "mean_vs_me.csv");
  const t = column(mean, "t");
  const ys = xm.flatMap((g) => g.y);
  const right = scene.panel(1, 0, 2, 1, dataExtent(t, ys), "conditional amplitudes");
  right.frame("t", "x_m");
  xm.forEach((g, i) => right.polyline(g.x, g.y, i === 0 ? "#2171b5" : "#b8d4ea", i === 0 ? 1.5 : 0.9));
  right.polyline(t, column(mean, "mean_x_m"), "black", 2);
  right.polyline(t, column(mean, "me_x"), "#777777", 1.6, "6,4");
  return scene;
}

function fig8(manifest: Manifest): Scene {
  const hasSweep = matchFiles(manifest, /^sweep\.csv$/).length > 0;
  const hasLines = matchFiles(manifest, /^qphase_V[^.]*\.csv$/).length > 0;
  if (!hasSweep && !hasLines) {
    requireFiles(manifest, {
      "sweep grayscale": /^sweep\.csv$/,
      "phase distributions": /^qphase_V[^.]*\.csv$/,
    });
  }
  const nCols = Number(hasSweep) + Number(hasLines);
  const scene = new Scene(440 * nCols, 380, "quantum phase locking");
  let col = 0;
  if (hasSweep) {
    renderSweepPanel(scene, manifest, col++, nCols);
  }
  if (hasLines) {
    const hasScatter = matchFiles(manifest, /^measured_phase_V[^.]*\.csv$/).length > 0;
    renderPhaseHistPanels(scene, manifest, col, nCols, "qphase",
                          hasScatter ? "measured_phase" : null);
  }
  return scene;
}

function fig9(manifest: Manifest, style: StyleOptions): Scene {
  requireFiles(manifest, { spectra: /^spectrum_V[^.]*_(A|B)\.csv$/ });
  const lines = matchFiles(manifest, /^spectrum_V[^.]*_(A|B)\.csv$/).sort();
  const scatters = matchFiles(manifest, /^measured_spectrum_V[^.]*_(A|B)\.csv$/).sort();
  const binWidth = style.binWidth ?? param(manifest, "spec_delta", 5.0) / 10.0;
  const series = lines.map((name) => {
    const t = readTable(manifest, name);
    return { name, x: column(t, "omega"), y: column(t, "value") };
  });
  const ext = dataExtent(series[0].x, [0, Math.max(...series.flatMap((s) => s.y)) * 1.1], 0.0);
  const scene = new Scene(620, 420, "spectra: regression theorem vs heterodyne current");
  const panel = scene.panel(0, 0, 1, 1, ext);
  panel.frame("omega", "S");
  series.forEach((s, i) =>
    panel.polyline(s.x, s.y, lineColor(Math.floor(i / 2)), 1.4, s.name.endsWith("_B.csv") ? "5,3" : ""),
  );
  scatters.forEach((name, i) => {
    const t = readTable(manifest, name);
    // detector floor of 1 subtracted after bin averaging of width delta/10
    const avg = binAverage({ x: column(t, "omega"), y: column(t, "value") }, binWidth);
    panel.scatter(avg.x, avg.y.map((v) => v - 1.0), lineColor(Math.floor(i / 2)), 2.2);
  });
  return scene;
}

// --- spin figures -----------------------------------------------------------

function mollweidePanel(scene: Scene, manifest: Manifest, name: string, col: number,
                        nCols: number, nRows: number, row: number, title: string): Panel {
  const table = readTable(manifest, name);
  const lim = 2 * Math.SQRT2 * 1.05;
  const panel = scene.panel(col, row, nCols, nRows, {
    xMin: -lim, xMax: lim, yMin: -lim / 2, yMax: lim / 2,
  }, title);
  panel.mollweideGrid(column(table, "theta"), column(table, "phi"), column(table, "Q"));
  return panel;
}

function fig10(manifest: Manifest): Scene {
  const hasEvolution = matchFiles(manifest, /^mollweide_t[^.]*\.csv$/).length > 0;
  if (hasEvolution) {
    requireFiles(manifest, {
      "Mollweide snapshots": /^mollweide_t[^.]*\.csv$/,
      "phase distributions": /^phase_dist_t[^.]*\.csv$/,
    });
    const surfaces = snapshotFiles(manifest, "mollweide");
    const phases = snapshotFiles(manifest, "phase_dist");
    const n = surfaces.length;
    const scene = new Scene(250 * n + 90, 460, "spin Husimi-Q evolution (Mollweide)");
    surfaces.forEach((f, i) =>
      mollweidePanel(scene, manifest, f.name, i, n, 2, 0, `t = ${f.t}`),
    );
    const dists = phases.map((f) => {
      const t = readTable(manifest, f.name);
      return { x: column(t, "phi"), y: column(t, "Q") };
    });
    const yMax = Math.max(...dists.flatMap((d) => d.y)) * 1.15;
    phases.forEach((f, i) => {
      const panel = scene.panel(i, 1, n, 2, { xMin: 0, xMax: 2 * Math.PI, yMin: 0, yMax });
      panel.frame("phi", i === 0 ? "Q(phi)" : "");
      panel.polyline(dists[i].x, dists[i].y, "#2171b5", 1.6);
    });
    return scene;
  }
  // measurement variant: steady-state sphere plus conditional trajectories
  requireFiles(manifest, {
    "steady-state Husimi": /^husimi_ss\.csv$/,
    trajectories: /^trajectories\.csv$/,
    "ensemble mean": /^mean_vs_me\.csv$/,
  });
  const scene = new Scene(950, 400, "spin limit cycle under heterodyne detection");
  const sphere = mollweidePanel(scene, manifest, "husimi_ss.csv", 0, 2, 1, 0, "steady state + one trajectory");
  const blochNames = matchFiles(manifest, /^bloch_path\.csv$/);
  if (blochNames.length > 0) {
    const path = readTable(manifest, blochNames[0]);
    const thetas = column(path, "theta_m");
    const phis = column(path, "phi_m");
    const pts = thetas.map((th, i) => mollweide(th, phis[i]));
    sphere.scatter(pts.map((p) => p.x), pts.map((p) => p.y), "#2171b5", 1.2);
  }
  const trajs = readTable(manifest, "trajectories.csv");
  const sx = groupByTrajectory(trajs, "t", "sx_m");
  const mean = readTable(manifest, "mean_vs_me.csv");
  const t = column(mean, "t");
  const right = scene.panel(1, 0, 2, 1, dataExtent(t, sx.flatMap((g) => g.y)), "conditional <sx>");
  right.frame("t", "sx_m");
  sx.forEach((g, i) => right.polyline(g.x, g.y, i === 0 ? "#2171b5" : "#b8d4ea", i === 0 ? 1.5 : 0.9));
  right.polyline(t, column(mean, "mean_sx_m"), "black", 2);
  right.polyline(t, column(mean, "me_sx"), "#777777", 1.6, "6,4");
  return scene;
}

function fig11(manifest: Manifest): Scene {
  const hasSweep = matchFiles(manifest, /^sweep\.csv$/).length > 0;
  const hasLines = matchFiles(manifest, /^qphase_V[^.]*\.csv$/).length > 0;
  if (!hasSweep && !hasLines) {
    requireFiles(manifest, {
      "sweep grayscale": /^sweep\.csv$/,
      "phase distributions": /^qphase_V[^.]*\.csv$/,
    });
  }
  const nCols = Number(hasSweep) + Number(hasLines);
  const scene = new Scene(440 * nCols, 380, "spin phase locking");
  let col = 0;
  if (hasSweep) {
    renderSweepPanel(scene, manifest, col++, nCols);
  }
  if (hasLines) {
    const hasScatter = matchFiles(manifest, /^measured_phase_V[^.]*\.csv$/).length > 0;
    renderPhaseHistPanels(scene, manifest, col, nCols, "qphase",
                          hasScatter ? "measured_phase" : null);
  }
  return scene;
}

function fig12(manifest: Manifest, style: StyleOptions): Scene {
  requireFiles(manifest, { spectra: /^spectrum_V[^.]*_(A|B)\.csv$/ });
  const names = matchFiles(manifest, /^spectrum_V[^.]*_(A|B)\.csv$/).sort();
  const normalize = style.normalize ?? true;
  const series = names.map((name) => {
    const t = readTable(manifest, name);
    const y = column(t, "value");
    return { name, x: column(t, "omega"), y: normalize ? maxNormalize(y) : y };
  });
  const yMax = Math.max(...series.flatMap((s) => s.y)) * 1.08;
  const scene = new Scene(620, 420, "spin spectra (normalized to maximum)");
  const panel = scene.panel(0, 0, 1, 1, dataExtent(series[0].x, [0, yMax], 0.0));
  panel.frame("omega", "S / max S");
  series.forEach((s, i) =>
    panel.polyline(s.x, s.y, lineColor(Math.floor(i / 2)), 1.4, s.name.endsWith("_B.csv") ? "5,3" : ""),
  );
  return scene;
}

export const FIGURES: Record<string, (m: Manifest, style: StyleOptions) => Scene> = {
  fig1, fig2, fig3, fig4, fig5, fig6, fig7, fig8, fig9, fig10, fig11, fig12,
};

export function renderFigure(
  figureId: string, manifestPath: string, style: StyleOptions = {},
): string {
  const fn = FIGURES[figureId];
  if (!fn) {
    throw new Error(`unknown figure id '${figureId}'; valid: ${Object.keys(FIGURES).join(", ")}`);
  }
  const manifest = loadManifest(manifestPath);
  return fn(manifest, style).render();
}
