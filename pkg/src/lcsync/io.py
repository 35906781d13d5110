"""CSV/JSON serialization and run manifests.

CSV files are comma-separated UTF-8 with a header row naming columns
(units in brackets where meaningful) and '.' as the decimal separator.
Floats are written with repr-roundtrip precision so that re-running a
scenario with the same seed yields byte-identical files.  Every data
file gets a JSON sidecar with parameters and tolerances; a run directory
is summarized by ``manifest.json`` listing files with SHA-256 hashes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .records import HistogramDist, SpectrumSeries, TrajectoryRecord

__all__ = [
    "write_csv",
    "write_json",
    "sha256_file",
    "ManifestBuilder",
    "trajectory_csv",
    "histogram_csv",
    "spectrum_csv",
    "phase_distribution_csv",
    "qsurface_csv",
    "series_csv",
]


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> Path:
    path = Path(path)
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise ValueError("columns must share a length")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(_fmt(c[i]) for c in columns) + "\n")
    return path


def write_json(path: Path, payload: dict) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


class ManifestBuilder:
    """Single writer collecting a scenario run's files and metadata."""

    def __init__(self, out_dir: Path, scenario: str, params: dict, seed: int, versions: dict):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.scenario = scenario
        self.params = params
        self.seed = seed
        self.versions = versions
        self.files: list[Path] = []

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def add(self, path: Path) -> Path:
        self.files.append(Path(path))
        return Path(path)

    def add_csv(self, name: str, header: list[str], columns: list[np.ndarray],
                sidecar: dict | None = None) -> Path:
        p = self.add(write_csv(self.path(name), header, columns))
        if sidecar is not None:
            self.add(write_json(self.path(name + ".json"), sidecar))
        return p

    def write(self) -> Path:
        manifest = {
            "scenario": self.scenario,
            "params": self.params,
            "seed": self.seed,
            "versions": self.versions,
            "files": [
                {
                    "path": str(p.relative_to(self.out_dir)),
                    "sha256": sha256_file(p),
                }
                for p in sorted(self.files)
            ],
        }
        return write_json(self.out_dir / "manifest.json", manifest)


# --- column builders for the shared record types ---------------------------


def trajectory_csv(records: list[TrajectoryRecord], time_unit: str = "") -> tuple[list[str], list[np.ndarray]]:
    """Long-format columns: one row per (trajectory, time sample)."""
    u = f" [{time_unit}]" if time_unit else ""
    rec0 = records[0]
    streams, times = [], []
    cols: list[list[float]] = [[], []] if rec0.kind == "amplitude" else [[], []]
    for rec in records:
        streams.append(np.full(len(rec.times), rec.stream))
        times.append(rec.times)
        if rec.kind == "amplitude":
            cols[0].append(rec.values.real)
            cols[1].append(rec.values.imag)
        else:
            cols[0].append(rec.values[:, 0])
            cols[1].append(rec.values[:, 1])
    names = (
        ["trajectory", f"t{u}", "re_alpha", "im_alpha"]
        if rec0.kind == "amplitude"
        else ["trajectory", f"t{u}", "phi_a [rad]", "phi_b [rad]"]
    )
    data = [np.concatenate(streams), np.concatenate(times)] + [np.concatenate(c) for c in cols]
    return names, data


def histogram_csv(hist: HistogramDist) -> tuple[list[str], list[np.ndarray]]:
    if len(hist.bin_edges) == 1:
        e = hist.bin_edges[0]
        return (
            ["bin_left [rad]", "bin_right [rad]", "mass", "density [1/rad]"],
            [e[:-1], e[1:], hist.masses, hist.densities],
        )
    ex, ep = hist.bin_edges
    nx, npbins = len(ex) - 1, len(ep) - 1
    xl = np.repeat(ex[:-1], npbins)
    xr = np.repeat(ex[1:], npbins)
    pl = np.tile(ep[:-1], nx)
    pr = np.tile(ep[1:], nx)
    return (
        ["x_left", "x_right", "p_left", "p_right", "mass", "density"],
        [xl, xr, pl, pr, hist.masses.reshape(-1), hist.densities.reshape(-1)],
    )


def spectrum_csv(series: SpectrumSeries, unit: str = "") -> tuple[list[str], list[np.ndarray]]:
    u = f" [{unit}]" if unit else ""
    return [f"omega{u}", "value"], [series.omegas, series.values]


def phase_distribution_csv(dist) -> tuple[list[str], list[np.ndarray]]:
    return ["phi [rad]", "Q [1/rad]"], [dist.grid.phis, dist.values]


def qsurface_csv(surface) -> tuple[list[str], list[np.ndarray]]:
    c0, c1 = surface.coords
    g0 = np.repeat(c0, len(c1))
    g1 = np.tile(c1, len(c0))
    names = ["x", "p", "Q"] if surface.kind == "boson-xy" else ["theta [rad]", "phi [rad]", "Q"]
    return names, [g0, g1, surface.values.reshape(-1)]


def series_csv(times: np.ndarray, values: dict[str, np.ndarray], time_unit: str = "") -> tuple[list[str], list[np.ndarray]]:
    u = f" [{time_unit}]" if time_unit else ""
    names = [f"t{u}"] + list(values.keys())
    return names, [times] + [np.asarray(v) for v in values.values()]


def heterodyne_record_csv(record, time_unit: str = "") -> tuple[list[str], list[np.ndarray]]:
    """Raw heterodyne record: conditional expectations and currents per channel."""
    from .heterodyne import heterodyne_current

    u = f" [{time_unit}]" if time_unit else ""
    currents = heterodyne_current(record)
    names = [f"t{u}"]
    cols = [record.times]
    for j, label in enumerate(record.channel_labels):
        tag = label or str(j)
        names += [f"re_expect_{tag}", f"im_expect_{tag}",
                  f"re_current_{tag}", f"im_current_{tag}"]
        cols += [record.cond_expectations[j].real, record.cond_expectations[j].imag,
                 currents[j].real, currents[j].imag]
    return names, cols
