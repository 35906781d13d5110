"""Dense complex operators and states on truncated bosonic and spin Hilbert spaces.

Conventions used throughout the package:

* Fock basis index n is the occupation number, index 0 is the vacuum.
* For spins, index 0 is the ground state |0> and index 1 the excited
  state |1>, so sigma^+ = |1><0| and sigma^z = |1><1| - |0><0|.
* All operators are plain ``numpy`` complex arrays.  Constructors return
  read-only arrays; copy before mutating.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.special import gammainc, gammaln

__all__ = [
    "TruncationWarning",
    "fock_operators",
    "pauli_operators",
    "identity",
    "tensor",
    "coherent_ket",
    "spin_coherent_ket",
    "ket_to_dm",
    "expect",
    "assert_density",
    "trace_distance",
    "reduced_populations",
]

#: Tail probability beyond the truncation level above which constructors
#: and steady-state checks warn.
TRUNCATION_TAIL_TOL = 1e-6


class TruncationWarning(UserWarning):
    """A truncated Hilbert space visibly clips the represented state."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def fock_operators(n_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ladder and number operators on the truncated Fock space {0, ..., n_max}.

    Returns ``(a, a_dag, n)`` with a|n> = sqrt(n)|n-1>.  The commutator
    [a, a_dag] equals the identity except on the top level, where the
    truncation necessarily breaks it.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1, no dynamics is possible on a single level")
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)
    a_dag = a.conj().T.copy()
    n = a_dag @ a
    return _readonly(a), _readonly(a_dag), _readonly(n)


def pauli_operators() -> tuple[np.ndarray, ...]:
    """Pauli and spin ladder operators ``(sx, sy, sz, sp, sm)`` as 2x2 arrays."""
    sp = np.zeros((2, 2), dtype=complex)
    sp[1, 0] = 1.0  # |1><0|
    sm = sp.conj().T.copy()
    sx = sp + sm
    sy = -1j * (sp - sm)
    sz = np.diag([-1.0 + 0j, 1.0 + 0j])
    return tuple(_readonly(m) for m in (sx, sy, sz, sp, sm))


def identity(dim: int) -> np.ndarray:
    return _readonly(np.eye(dim, dtype=complex))


def tensor(a: np.ndarray, b: np.ndarray, *rest: np.ndarray) -> np.ndarray:
    """Kronecker product of two or more operators (or kets)."""
    out = np.kron(a, b)
    for m in rest:
        out = np.kron(out, m)
    return _readonly(out)


def coherent_ket(alpha: complex, n_max: int) -> np.ndarray:
    """Coherent state |alpha> truncated at n_max and renormalized.

    Amplitudes are proportional to alpha^n / sqrt(n!), evaluated in log
    space so large n_max does not overflow.  Warns with
    :class:`TruncationWarning` when the untruncated occupation weight
    beyond n_max exceeds ``TRUNCATION_TAIL_TOL``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    alpha = complex(alpha)
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    dim = n_max + 1
    if alpha == 0:
        ket = np.zeros(dim, dtype=complex)
        ket[0] = 1.0
        return _readonly(ket)
    ns = np.arange(dim)
    log_mag = ns * np.log(abs(alpha)) - 0.5 * gammaln(ns + 1.0)
    phase = ns * np.angle(alpha)
    amps = np.exp(log_mag - log_mag.max()) * np.exp(1j * phase)
    amps /= np.linalg.norm(amps)
    # Weight of the untruncated state beyond n_max: Poisson(|alpha|^2) tail.
    tail = float(gammainc(n_max + 1.0, abs(alpha) ** 2))
    if tail > TRUNCATION_TAIL_TOL:
        warnings.warn(
            f"coherent state |alpha|^2={abs(alpha)**2:.3g} loses weight {tail:.2e} "
            f"beyond n_max={n_max}",
            TruncationWarning,
            stacklevel=2,
        )
    return _readonly(amps)


def spin_coherent_ket(theta: float, phi: float) -> np.ndarray:
    """Spin-1/2 coherent state exp(-i phi sz/2) exp(-i theta sy/2) |1>.

    theta in [0, pi] sets the population difference, <sz> = cos(theta);
    phi is the azimuthal phase.
    """
    if not 0.0 <= theta <= np.pi:
        raise ValueError("theta must lie in [0, pi]")
    ket = np.array(
        [
            np.sin(theta / 2.0) * np.exp(0.5j * phi),
            np.cos(theta / 2.0) * np.exp(-0.5j * phi),
        ],
        dtype=complex,
    )
    return _readonly(ket)


def ket_to_dm(ket: np.ndarray) -> np.ndarray:
    """Density operator |psi><psi| of a (normalized) ket."""
    return _readonly(np.outer(ket, ket.conj()))


def expect(op: np.ndarray, state: np.ndarray) -> complex:
    """<op> for a density operator (2-D) or ket (1-D) ``state``."""
    if state.ndim == 1:
        return complex(state.conj() @ (op @ state))
    return complex(np.einsum("ij,ji->", op, state))


def assert_density(
    rho: np.ndarray,
    *,
    trace_tol: float = 1e-9,
    herm_tol: float = 1e-9,
    eig_floor: float = -1e-8,
    context: str = "",
) -> None:
    """Raise ``ValueError`` unless ``rho`` is a valid density operator.

    Checks unit trace, Hermiticity, and positivity down to ``eig_floor``
    (a small negative slack for floating-point roundoff).
    """
    where = f" ({context})" if context else ""
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace {tr} deviates from 1 beyond {trace_tol}{where}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"Hermiticity defect {herm:.3e} beyond {herm_tol}{where}")
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if evals[0] < eig_floor:
        raise ValueError(f"negative eigenvalue {evals[0]:.3e} below {eig_floor}{where}")


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace distance (1/2)||rho - sigma||_1 for Hermitian arguments."""
    diff = rho - sigma
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def reduced_populations(rho: np.ndarray, dims: tuple[int, ...], mode: int) -> np.ndarray:
    """Diagonal of the reduced density operator of one tensor factor."""
    if int(np.prod(dims)) != rho.shape[0]:
        raise ValueError("dims inconsistent with rho")
    n_modes = len(dims)
    shaped = rho.reshape(*dims, *dims)
    subs_row = [chr(ord("a") + i) for i in range(n_modes)]
    subs_col = subs_row.copy()
    subs_col[mode] = chr(ord("a") + n_modes)
    spec = "".join(subs_row) + "".join(subs_col) + "->" + subs_row[mode] + subs_col[mode]
    reduced = np.einsum(spec, shaped)
    return np.real(np.diagonal(reduced)).copy()
