"""Husimi-Q surfaces and phase(-difference) distributions for bosons and spins.

Projections use the phase convention phi = -arg(alpha) for bosonic
modes; the spin azimuth follows the spin-coherent-state constructor in
:mod:`lcsync.linalg`.  Closed-form Fourier evaluation is the runtime
path; the quadrature routines exist as independent cross-checks and are
deliberately built on generic numerical integration.

For states on a truncated Fock space the coherent projections use the
exact (untruncated) coefficients e^{-|alpha|^2/2} alpha^n / sqrt(n!);
for a state supported inside the truncation this is the exact Husimi
function, without the renormalization a truncated state constructor
needs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.integrate
from scipy.special import gammaln

from .linalg import TruncationWarning

__all__ = [
    "PhaseGrid",
    "PhaseDistribution",
    "QSurface",
    "husimi_q_boson",
    "phase_dist_boson",
    "phase_diff_dist_boson",
    "husimi_q_spin",
    "phase_dist_spin",
    "phase_diff_dist_spins",
    "phase_dist_boson_quadrature",
    "phase_dist_spin_quadrature",
    "phase_diff_dist_spins_quadrature",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform grid of n_phi points on [0, 2 pi)."""

    n_phi: int

    def __post_init__(self):
        if self.n_phi < 8:
            raise ValueError("n_phi must be >= 8")

    @property
    def phis(self) -> np.ndarray:
        return np.arange(self.n_phi) * (TWO_PI / self.n_phi)


@dataclass(frozen=True)
class PhaseDistribution:
    """Probability density over a phase grid; integrates to 1."""

    grid: PhaseGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def integral(self) -> float:
        return float(self.values.sum() * TWO_PI / self.grid.n_phi)

    def peak_phi(self) -> float:
        return float(self.grid.phis[int(np.argmax(self.values))])


@dataclass(frozen=True)
class QSurface:
    """Husimi-Q values on a product grid.

    ``kind`` is "boson-xy" (coords = (x, p), values[i, j] at alpha =
    x[i] + i p[j]) or "spin-sphere" (coords = (theta, phi), values[i, j]
    at (theta_i, phi_j)).
    """

    coords: tuple[np.ndarray, np.ndarray]
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in ("boson-xy", "spin-sphere"):
            raise ValueError(f"unknown QSurface kind {self.kind!r}")
        v = np.ascontiguousarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def integral(self) -> float:
        """Discrete integral with the natural measure (dx dp or sin(theta) dtheta dphi)."""
        c0, c1 = self.coords
        if self.kind == "boson-xy":
            return float(np.trapezoid(np.trapezoid(self.values, c1, axis=1), c0))
        weighted = self.values * np.sin(c0)[:, None]
        return float(np.trapezoid(np.trapezoid(weighted, c1, axis=1), c0))


def _coherent_projection(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Matrix C[n, k] = <n|alpha_k> with exact coefficients, no renormalization."""
    alphas = np.asarray(alphas, dtype=complex).reshape(-1)
    ns = np.arange(dim)[:, None]
    mag = np.abs(alphas)[None, :]
    with np.errstate(divide="ignore"):
        log_mag = np.where(mag > 0, ns * np.log(np.where(mag > 0, mag, 1.0)), 0.0)
    log_amp = log_mag - 0.5 * gammaln(ns + 1.0) - 0.5 * mag**2
    phases = np.exp(1j * ns * np.angle(alphas)[None, :])
    amps = np.exp(log_amp) * phases
    amps[1:, mag[0] == 0] = 0.0
    amps[0, mag[0] == 0] = 1.0
    return amps


def husimi_q_boson(rho: np.ndarray, xs: np.ndarray, ps: np.ndarray) -> QSurface:
    """Q(alpha) = <alpha|rho|alpha> / pi on the grid alpha = x + i p.

    Warns when the grid reaches beyond 0.8 sqrt(n_max), where the
    truncated representation is no longer trustworthy.
    """
    dim = rho.shape[0]
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    alpha = xs[:, None] + 1j * ps[None, :]
    r_max = float(np.max(np.abs(alpha)))
    if r_max > 0.8 * np.sqrt(dim - 1):
        warnings.warn(
            f"grid radius {r_max:.3g} exceeds 0.8 sqrt(n_max) = "
            f"{0.8 * np.sqrt(dim - 1):.3g}; edge values are truncation-limited",
            TruncationWarning,
            stacklevel=2,
        )
    c = _coherent_projection(alpha.reshape(-1), dim)
    q = np.real(np.einsum("nk,nm,mk->k", c.conj(), rho, c)) / np.pi
    return QSurface((xs, ps), q.reshape(alpha.shape), "boson-xy")


def _radial_weights(dim: int) -> np.ndarray:
    """W[n, m] = Gamma((n+m)/2 + 1) / (2 pi sqrt(n! m!)), in log space."""
    ns = np.arange(dim)
    n, m = np.meshgrid(ns, ns, indexing="ij")
    logw = gammaln(0.5 * (n + m) + 1.0) - 0.5 * (gammaln(n + 1.0) + gammaln(m + 1.0))
    return np.exp(logw) / TWO_PI


def phase_dist_boson(rho: np.ndarray, grid: PhaseGrid) -> PhaseDistribution:
    """Radially integrated Husimi phase distribution, evaluated in closed form.

    Q(phi) = sum_{n,m} rho_{nm} e^{i(n-m)phi} Gamma((n+m)/2 + 1)
             / (2 pi sqrt(n! m!)),
    the exact radial integral of <r e^{-i phi}|rho|r e^{-i phi}> / pi.
    """
    dim = rho.shape[0]
    weighted = np.asarray(rho) * _radial_weights(dim)
    ks = np.arange(-(dim - 1), dim)
    coeffs = np.array([np.trace(weighted, offset=-k) for k in ks])
    values = np.real(np.exp(1j * np.outer(grid.phis, ks)) @ coeffs)
    resid = np.max(np.abs(np.imag(np.exp(1j * np.outer(grid.phis, ks)) @ coeffs)))
    if resid > 1e-10:
        raise AssertionError(f"phase distribution imaginary residue {resid:.2e}")
    return PhaseDistribution(grid, values)


def phase_diff_dist_boson(
    rho: np.ndarray, dims: tuple[int, int], grid: PhaseGrid
) -> PhaseDistribution:
    """Distribution of phi_AB = phi_A - phi_B for a two-mode state.

    Applies the single-mode radial reduction per mode and integrates out
    the total phase, which restricts the double Fourier sum to index
    pairs with n_A - m_A = -(n_B - m_B):

    Q(phi_AB) = sum_k e^{i k phi_AB} C_k,
    C_k = (1/2 pi) sum rho[(n_A n_B),(m_A m_B)] G_A(n_A, m_A) G_B(n_B, m_B)
    with G(n, m) = Gamma((n+m)/2 + 1)/sqrt(n! m!).
    """
    d_a, d_b = dims
    shaped = np.asarray(rho).reshape(d_a, d_b, d_a, d_b).transpose(0, 2, 1, 3)
    # shaped[n_a, m_a, n_b, m_b], weighted per mode
    g_a = TWO_PI * _radial_weights(d_a)
    g_b = TWO_PI * _radial_weights(d_b)
    weighted = shaped * g_a[:, :, None, None] * g_b[None, None, :, :]
    ks = np.arange(-(d_a - 1), d_a)
    coeffs = np.zeros(len(ks), dtype=complex)
    for i, k in enumerate(ks):
        if abs(k) >= d_b:
            continue
        inner = np.trace(weighted, offset=-k, axis1=0, axis2=1)  # over n_a - m_a = k
        coeffs[i] = np.trace(inner, offset=k) / TWO_PI  # over n_b - m_b = -k
    values = np.real(np.exp(1j * np.outer(grid.phis, ks)) @ coeffs)
    return PhaseDistribution(grid, values)


def husimi_q_spin(rho: np.ndarray, thetas: np.ndarray, phis: np.ndarray) -> QSurface:
    """Q(theta, phi) = <theta, phi|rho|theta, phi> / (2 pi) for one spin-1/2."""
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    th = thetas[:, None]
    ph = phis[None, :]
    # components of |theta, phi>: (sin(theta/2) e^{i phi/2}, cos(theta/2) e^{-i phi/2})
    c0 = np.sin(th / 2.0) * np.exp(0.5j * ph)
    c1 = np.cos(th / 2.0) * np.exp(-0.5j * ph)
    q = (
        rho[0, 0] * np.abs(c0) ** 2
        + rho[1, 1] * np.abs(c1) ** 2
        + 2.0 * np.real(rho[0, 1] * np.conj(c0) * c1)
    ).real / TWO_PI
    return QSurface((thetas, phis), q, "spin-sphere")


def phase_dist_spin(rho: np.ndarray, grid: PhaseGrid) -> PhaseDistribution:
    """Azimuthal phase distribution of a spin-1/2.

    Integrating sin(theta) Q(theta, phi) over theta gives the closed form
    1/(2 pi) + (1/4) Re[<sigma^+> e^{-i phi}]  with <sigma^+> = rho_{01}.
    """
    s_plus = complex(rho[0, 1])
    values = 1.0 / TWO_PI + 0.25 * np.real(s_plus * np.exp(-1j * grid.phis))
    return PhaseDistribution(grid, values)


def phase_diff_dist_spins(rho: np.ndarray, grid: PhaseGrid) -> PhaseDistribution:
    """Distribution of phi_AB = phi_A - phi_B for two spins-1/2.

    Projecting on products of spin-coherent states and integrating out
    both polar angles and the total phase leaves

        Q(phi_AB) = 1/(2 pi) + (pi/16) Re[<sigma^+_A sigma^-_B> e^{-i phi_AB}],

    the two-spin analog of the single-spin closed form (same e^{-i phi}
    convention; cross-checked against the 4-D quadrature oracle).  The
    deviation from flat is bounded by pi/32 since |<s+_A s-_B>| <= 1/2.
    """
    shaped = np.asarray(rho).reshape(2, 2, 2, 2)
    # <s+_A s-_B> = <0_A 1_B| rho |1_A 0_B>
    g = complex(shaped[0, 1, 1, 0])
    values = 1.0 / TWO_PI + (np.pi / 16.0) * np.real(g * np.exp(-1j * grid.phis))
    return PhaseDistribution(grid, values)


# --- quadrature oracles ---------------------------------------------------


def phase_dist_boson_quadrature(
    rho: np.ndarray, grid: PhaseGrid, *, r_max: float | None = None
) -> PhaseDistribution:
    """Adaptive radial quadrature of r Q(r e^{-i phi}); validation path.

    The default integrates to infinity; a finite ``r_max`` (for example
    2 sqrt(n_max)) trades the Gaussian tail, which carries up to ~1e-5
    of the highest Fock components, for speed.
    """
    dim = rho.shape[0]
    upper = np.inf if r_max is None else r_max
    values = np.empty(grid.n_phi)
    for i, phi in enumerate(grid.phis):
        def integrand(r, phi=phi):
            c = _coherent_projection(np.array([r * np.exp(-1j * phi)]), dim)[:, 0]
            return r * np.real(c.conj() @ (rho @ c)) / np.pi

        values[i], _ = scipy.integrate.quad(integrand, 0.0, upper, limit=200)
    return PhaseDistribution(grid, values)


def _polar_nodes(n_theta: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights for integrals sin(theta) f(theta) d theta.

    Quadrature runs directly in theta on [0, pi] with sin(theta) folded
    into the weights; the integrands here are analytic in theta, so the
    error decays exponentially with n_theta.
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_theta)
    thetas = 0.5 * np.pi * (nodes + 1.0)
    return thetas, 0.5 * np.pi * weights * np.sin(thetas)


def phase_dist_spin_quadrature(
    rho: np.ndarray, grid: PhaseGrid, *, n_theta: int = 48
) -> PhaseDistribution:
    """Gauss-Legendre integration of sin(theta) Q(theta, phi) over theta."""
    thetas, weights = _polar_nodes(n_theta)
    surf = husimi_q_spin(rho, thetas, grid.phis)
    values = weights @ surf.values
    return PhaseDistribution(grid, values)


def phase_diff_dist_spins_quadrature(
    rho: np.ndarray, grid: PhaseGrid, *, n_theta: int = 32, n_phi_int: int = 64
) -> PhaseDistribution:
    """Product Gauss-Legendre x trapezoid quadrature of the 4-D projection.

    Integrates Q4(theta_A, phi_AB + phi_B, theta_B, phi_B) over both
    polar angles (Gauss-Legendre in theta with the sin(theta) measure)
    and the total phase (periodic trapezoid in phi_B, exact for the
    low-degree trigonometric integrand).
    """
    thetas, weights = _polar_nodes(n_theta)
    phi_b = np.arange(n_phi_int) * (TWO_PI / n_phi_int)
    rho4 = np.asarray(rho).reshape(2, 2, 2, 2)  # indices (i, j), (k, l)

    def kets(theta_grid, phi_grid):
        # components stacked as [2, n_theta, n_phi]
        th = theta_grid[:, None]
        ph = phi_grid[None, :]
        return np.stack(
            [
                np.sin(th / 2.0) * np.exp(0.5j * ph) * np.ones_like(ph),
                np.cos(th / 2.0) * np.exp(-0.5j * ph) * np.ones_like(th),
            ]
        )

    kb = kets(thetas, phi_b)
    mb = np.einsum("jcb,lcb->jlcb", kb.conj(), kb)
    values = np.empty(grid.n_phi)
    for i, phi_ab in enumerate(grid.phis):
        ka = kets(thetas, phi_ab + phi_b)
        ma = np.einsum("iab,kab->ikab", ka.conj(), ka)
        q4 = np.real(np.einsum("ikab,jlcb,ijkl->acb", ma, mb, rho4))
        values[i] = np.einsum("a,c,acb->", weights, weights, q4) * (
            TWO_PI / n_phi_int
        ) / (4.0 * np.pi**2)
    return PhaseDistribution(grid, values)
