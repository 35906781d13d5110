/** Golden-manifest fixtures: tiny synthetic runs in the simulator's exact
 * file formats, written into a temp directory per test.
 */

import { createHash } from "node:crypto";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

type Row = Array<number | string>;

function csv(header: string[], rows: Row[]): string {
  return [header.join(","), ...rows.map((r) => r.join(","))].join("\n") + "\n";
}

class RunDir {
  files = new Map<string, string>();

  constructor(public root: string, public scenario: string,
              public params: Record<string, unknown> = {}) {}

  add(name: string, content: string, sidecarPayload?: Record<string, unknown>): void {
    writeFileSync(join(this.root, name), content, "utf-8");
    this.files.set(name, content);
    if (sidecarPayload) {
      const text = JSON.stringify(sidecarPayload, null, 2) + "\n";
      writeFileSync(join(this.root, name + ".json"), text, "utf-8");
      this.files.set(name + ".json", text);
    }
  }

  finish(): string {
    const manifest = {
      scenario: this.scenario,
      params: this.params,
      seed: 1,
      versions: { lcsync: "0.1.0" },
      files: [...this.files.entries()].map(([path, content]) => ({
        path,
        sha256: createHash("sha256").update(content).digest("hex"),
      })),
    };
    const path = join(this.root, "manifest.json");
    writeFileSync(path, JSON.stringify(manifest, null, 2) + "\n", "utf-8");
    return path;
  }
}

function newRun(scenario: string, params: Record<string, unknown> = {}): RunDir {
  return new RunDir(mkdtempSync(join(tmpdir(), `plotgen-${scenario}-`)), scenario, params);
}

const TAU = 2 * Math.PI;

function phaseGrid(n: number): number[] {
  return Array.from({ length: n }, (_, i) => (TAU * i) / n);
}

function trajectoryRows(nTraj: number, nT: number, cols: (k: number, t: number) => number[]): Row[] {
  const rows: Row[] = [];
  for (let k = 0; k < nTraj; k++) {
    for (let i = 0; i < nT; i++) {
      const t = i * 0.1;
      rows.push([k, t, ...cols(k, t)]);
    }
  }
  return rows;
}

function histRows(n: number, density: (c: number) => number): Row[] {
  const rows: Row[] = [];
  for (let i = 0; i < n; i++) {
    const l = (TAU * i) / n;
    const r = (TAU * (i + 1)) / n;
    const d = density((l + r) / 2);
    rows.push([l, r, (d * TAU) / n, d]);
  }
  return rows;
}

const HIST_HEADER = ["bin_left [rad]", "bin_right [rad]", "mass", "density [1/rad]"];

function planeRows(n: number, lim: number, f: (x: number, p: number) => number): Row[] {
  const rows: Row[] = [];
  const edges = Array.from({ length: n + 1 }, (_, i) => -lim + (2 * lim * i) / n);
  let total = 0;
  const masses: number[] = [];
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const m = f((edges[i] + edges[i + 1]) / 2, (edges[j] + edges[j + 1]) / 2);
      masses.push(m);
      total += m;
    }
  }
  let k = 0;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const m = masses[k++] / total;
      const area = (edges[1] - edges[0]) ** 2;
      rows.push([edges[i], edges[i + 1], edges[j], edges[j + 1], m, m / area]);
    }
  }
  return rows;
}

function surfaceRows(xs: number[], ps: number[], f: (x: number, p: number) => number): Row[] {
  const rows: Row[] = [];
  for (const x of xs) {
    for (const p of ps) {
      rows.push([x, p, f(x, p)]);
    }
  }
  return rows;
}

function linspace(a: number, b: number, n: number): number[] {
  return Array.from({ length: n }, (_, i) => a + ((b - a) * i) / (n - 1));
}

function spectrumCsv(center: number): string {
  const omegas = linspace(-5, 5, 81);
  return csv(["omega [rad/time]", "value"],
             omegas.map((w) => [w, 1.0 / (1 + (w - center) ** 2)]));
}

export function classicalLcManifest(): string {
  const run = newRun("classical-lc", { kappa1: 1, kappa2: 1 });
  run.add("noiseless_trajectories.csv",
          csv(["trajectory", "t [1/kappa1]", "re_alpha", "im_alpha"],
              trajectoryRows(3, 40, (k, t) => [
                (0.5 + 0.4 * k) * Math.cos(2 * t), (0.5 + 0.4 * k) * Math.sin(2 * t),
              ])));
  run.add("trajectories.csv",
          csv(["trajectory", "t [1/kappa1]", "re_alpha", "im_alpha"],
              trajectoryRows(4, 40, (k, t) => [
                Math.cos(2 * t + k), Math.sin(2 * t + k),
              ])));
  run.add("mean_x.csv",
          csv(["t [1/kappa1]", "mean_re_alpha", "noiseless_re_alpha"],
              linspace(0, 4, 41).map((t) => [t, Math.exp(-t) * Math.cos(2 * t), Math.cos(2 * t)])));
  for (const [tag, t] of [["0", 0], ["2", 2]] as const) {
    run.add(`pxp_t${tag}.csv`,
            csv(["x_left", "x_right", "p_left", "p_right", "mass", "density"],
                planeRows(9, 2, (x, p) => Math.exp(-((x - 1) ** 2 + p ** 2) / (0.1 + t)))),
            { t });
    run.add(`phase_hist_t${tag}.csv`,
            csv(HIST_HEADER, histRows(16, (c) => (1 + Math.cos(c - t)) / TAU)), { t });
  }
  return run.finish();
}

export function classicalTwoManifest(): string {
  const run = newRun("classical-two", { delta: 1 });
  for (const v of [0, 2]) {
    run.add(`phase_hist_V${v}.csv`,
            csv(HIST_HEADER, histRows(16, (c) => (1 + v * Math.exp(Math.cos(c)) / 5) / TAU)),
            { coupling: v });
  }
  run.add("observed_frequency.csv",
          csv(["delta", "analytic_noiseless", "observed_sigma2_0.05"],
              linspace(0, 2, 9).map((d) => [d, Math.sqrt(Math.max(d * d - 1, 0)), 0.8 * d])));
  for (const v of [0, 2]) {
    run.add(`spectrum_V${v}_A.csv`, spectrumCsv(0.5 - 0.2 * v), { coupling: v, oscillator: "A" });
    run.add(`spectrum_V${v}_B.csv`, spectrumCsv(-0.5 + 0.2 * v), { coupling: v, oscillator: "B" });
  }
  return run.finish();
}

export function sweepManifest(scenario = "sweep-classical"): string {
  const run = newRun(scenario, {});
  const rows: Row[] = [];
  for (const d of linspace(0.2, 1, 5)) {
    for (const v of linspace(0, 2, 5)) {
      rows.push([d, v, 0.16 + 0.1 * (v / d), ""]);
    }
  }
  run.add("sweep.csv", csv(["delta", "coupling", "max_value [1/rad]", "error"], rows));
  return run.finish();
}

export function qvdpLcManifest(): string {
  const run = newRun("qvdp-lc", { kappa: 1 });
  const xs = linspace(-3, 3, 13);
  for (const [tag, t] of [["0", 0], ["1", 1]] as const) {
    run.add(`husimi_t${tag}.csv`,
            csv(["x", "p", "Q"],
                surfaceRows(xs, xs, (x, p) => Math.exp(-((x - 2 + t) ** 2 + p * p)))),
            { t });
    run.add(`phase_dist_t${tag}.csv`,
            csv(["phi [rad]", "Q [1/rad]"],
                phaseGrid(24).map((c) => [c, (1 + Math.cos(c) / (1 + t)) / TAU])),
            { t });
  }
  return run.finish();
}

export function qvdpTrajManifest(): string {
  const run = newRun("qvdp-traj", { kappa: 1 });
  const xs = linspace(-3, 3, 13);
  run.add("husimi_ss.csv",
          csv(["x", "p", "Q"],
              surfaceRows(xs, xs, (x, p) => Math.exp(-((Math.hypot(x, p) - 2) ** 2)))));
  run.add("trajectories.csv",
          csv(["trajectory", "t [1/kappa]", "x_m", "p_m"],
              trajectoryRows(3, 30, (k, t) => [
                2 * Math.cos(4 * t + k), 2 * Math.sin(4 * t + k),
              ])));
  run.add("mean_vs_me.csv",
          csv(["t [1/kappa]", "mean_x_m", "me_x"],
              linspace(0, 3, 31).map((t) => [
                t, 2 * Math.exp(-t) * Math.cos(4 * t) + 0.05,
                2 * Math.exp(-t) * Math.cos(4 * t),
              ])));
  return run.finish();
}

export function qvdpTwoManifest(): string {
  const run = newRun("qvdp-two", { spec_delta: 5.0 });
  for (const v of [0, 5]) {
    run.add(`qphase_V${v}.csv`,
            csv(["phi [rad]", "Q [1/rad]"],
                phaseGrid(24).map((c) => [c, (1 + 0.1 * v * Math.cos(c)) / TAU])),
            { coupling: v });
    run.add(`measured_phase_V${v}.csv`,
            csv(HIST_HEADER, histRows(12, (c) => (1 + 0.1 * v * Math.cos(c)) / TAU)),
            { coupling: v });
    run.add(`spectrum_V${v}_A.csv`, spectrumCsv(2.5 - 0.3 * v), { coupling: v });
    run.add(`spectrum_V${v}_B.csv`, spectrumCsv(-2.5 + 0.3 * v), { coupling: v });
    run.add(`measured_spectrum_V${v}_A.csv`, spectrumCsv(2.5 - 0.3 * v), { coupling: v });
    run.add(`measured_spectrum_V${v}_B.csv`, spectrumCsv(-2.5 + 0.3 * v), { coupling: v });
  }
  return run.finish();
}

export function spinLcManifest(): string {
  const run = newRun("spin-lc", { gamma_minus: 1 });
  const thetas = linspace(0, Math.PI, 9);
  const phis = linspace(0, TAU, 17);
  for (const [tag, t] of [["0", 0], ["1", 1]] as const) {
    const rows: Row[] = [];
    for (const th of thetas) {
      for (const ph of phis) {
        rows.push([th, ph, Math.exp(Math.sin(th) * Math.cos(ph - t)) / 20]);
      }
    }
    run.add(`mollweide_t${tag}.csv`, csv(["theta [rad]", "phi [rad]", "Q"], rows), { t });
    run.add(`phase_dist_t${tag}.csv`,
            csv(["phi [rad]", "Q [1/rad]"],
                phaseGrid(24).map((c) => [c, (1 + Math.cos(c - t) / (1 + t)) / TAU])),
            { t });
  }
  return run.finish();
}

export function spinTrajManifest(): string {
  const run = newRun("spin-traj", { gamma_minus: 1 });
  const rows: Row[] = [];
  for (const th of linspace(0, Math.PI, 9)) {
    for (const ph of linspace(0, TAU, 17)) {
      rows.push([th, ph, Math.exp(-((th - 2) ** 2)) / 15]);
    }
  }
  run.add("husimi_ss.csv", csv(["theta [rad]", "phi [rad]", "Q"], rows));
  run.add("trajectories.csv",
          csv(["trajectory", "t [1/gamma_minus]", "sx_m", "sz_m"],
              trajectoryRows(3, 30, (k, t) => [
                0.8 * Math.cos(2 * t + k), -0.3 + 0.1 * Math.sin(t + k),
              ])));
  run.add("mean_vs_me.csv",
          csv(["t [1/gamma_minus]", "mean_sx_m", "me_sx"],
              linspace(0, 3, 31).map((t) => [
                t, Math.exp(-0.75 * t) * Math.cos(2 * t) + 0.02,
                Math.exp(-0.75 * t) * Math.cos(2 * t),
              ])));
  run.add("bloch_path.csv",
          csv(["t [1/gamma_minus]", "theta_m [rad]", "phi_m [rad]"],
              linspace(0, 3, 31).map((t) => [t, 1.9 + 0.1 * Math.sin(t), (2 * t) % TAU])));
  return run.finish();
}

export function spinTwoManifest(): string {
  const run = newRun("spin-two", { spec_delta: 5.0 });
  for (const v of [0, 5]) {
    run.add(`qphase_V${v}.csv`,
            csv(["phi [rad]", "Q [1/rad]"],
                phaseGrid(24).map((c) => [c, (1 - 0.05 * v * Math.cos(c)) / TAU])),
            { coupling: v });
    run.add(`measured_phase_V${v}.csv`,
            csv(HIST_HEADER, histRows(12, (c) => (1 - 0.05 * v * Math.cos(c)) / TAU)),
            { coupling: v });
    run.add(`spectrum_V${v}_A.csv`, spectrumCsv(2.5 - 0.4 * v), { coupling: v });
    run.add(`spectrum_V${v}_B.csv`, spectrumCsv(-2.5 + 0.4 * v), { coupling: v });
  }
  return run.finish();
}

/** Golden manifest per figure id. */
export const GOLDENS: Record<string, () => string> = {
  fig1: classicalLcManifest,
  fig2: classicalLcManifest,
  fig3: classicalLcManifest,
  fig4: classicalTwoManifest,
  fig5: classicalTwoManifest,
  fig6: qvdpLcManifest,
  fig7: qvdpTrajManifest,
  fig8: qvdpTwoManifest,
  fig9: qvdpTwoManifest,
  fig10: spinLcManifest,
  fig11: spinTwoManifest,
  fig12: spinTwoManifest,
};
