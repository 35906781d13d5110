"""Shared result containers: trajectories, histograms, and spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TrajectoryRecord", "HistogramDist", "SpectrumSeries", "bin_averaged"]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TrajectoryRecord:
    """One sampled stochastic trajectory.

    ``values`` is either a complex array of amplitudes alpha(t) (kind
    ``"amplitude"``) or a float array of shape (N, 2) holding the two
    unwrapped phases (kind ``"phase-pair"``).  ``seed`` is the master
    seed and ``stream`` the per-trajectory stream index; together they
    reproduce the trajectory exactly.
    """

    seed: int
    stream: int
    dt: float
    times: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in ("amplitude", "phase-pair"):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        object.__setattr__(self, "times", _frozen(self.times))
        object.__setattr__(self, "values", _frozen(self.values))
        steps = np.diff(self.times)
        if len(steps) and not np.allclose(steps, self.dt, rtol=1e-9, atol=1e-12):
            raise ValueError("times must be uniformly spaced by dt")


@dataclass(frozen=True)
class HistogramDist:
    """Normalized binned distribution over phase, phase difference, or the plane.

    ``masses`` sum to 1; densities follow by dividing by the bin measure.
    1-D domains use a single edge array, the xy-plane uses two.
    """

    bin_edges: tuple[np.ndarray, ...]
    masses: np.ndarray
    domain: str
    n_samples: int
    n_skipped: int = 0

    def __post_init__(self):
        if self.domain not in ("phase", "phase-difference", "xy-plane"):
            raise ValueError(f"unknown histogram domain {self.domain!r}")
        object.__setattr__(self, "bin_edges", tuple(_frozen(e) for e in self.bin_edges))
        object.__setattr__(self, "masses", _frozen(self.masses))
        total = float(self.masses.sum())
        if self.n_samples > 0 and abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses sum to {total}, expected 1")

    @property
    def densities(self) -> np.ndarray:
        """Masses divided by the bin measure (probability density)."""
        if len(self.bin_edges) == 1:
            widths = np.diff(self.bin_edges[0])
            return self.masses / widths
        wx = np.diff(self.bin_edges[0])[:, None]
        wp = np.diff(self.bin_edges[1])[None, :]
        return self.masses / (wx * wp)

    @property
    def centers(self) -> tuple[np.ndarray, ...]:
        return tuple(0.5 * (e[1:] + e[:-1]) for e in self.bin_edges)


@dataclass(frozen=True)
class SpectrumSeries:
    """Real spectral values on a uniform frequency grid (rad/time).

    ``method`` records how the estimate was produced:
    ``"fft-of-correlation"`` for transforms of two-time correlations
    (trajectory-averaged or regression-based) and
    ``"current-periodogram"`` for heterodyne-current estimates.
    """

    omegas: np.ndarray
    values: np.ndarray
    method: str
    source: str = ""

    def __post_init__(self):
        if self.method not in ("fft-of-correlation", "current-periodogram"):
            raise ValueError(f"unknown spectrum method {self.method!r}")
        object.__setattr__(self, "omegas", _frozen(np.asarray(self.omegas, dtype=float)))
        object.__setattr__(self, "values", _frozen(np.asarray(self.values, dtype=float)))
        if self.omegas.shape != self.values.shape:
            raise ValueError("omega grid and values must have matching shape")
        d = np.diff(self.omegas)
        if len(d) and not np.allclose(d, d[0], rtol=1e-9, atol=1e-12):
            raise ValueError("omega grid must be uniform")

    def peak_omega(self) -> float:
        return float(self.omegas[int(np.argmax(self.values))])


def bin_averaged(series: SpectrumSeries, width: float) -> SpectrumSeries:
    """Average a spectrum in consecutive frequency bins of the given width.

    The output grid holds the bin centers; trailing points that do not
    fill a whole bin are dropped.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    step = float(series.omegas[1] - series.omegas[0])
    per = max(1, int(round(width / step)))
    n = (len(series.omegas) // per) * per
    omegas = series.omegas[:n].reshape(-1, per).mean(axis=1)
    values = series.values[:n].reshape(-1, per).mean(axis=1)
    return SpectrumSeries(omegas, values, series.method, series.source)
