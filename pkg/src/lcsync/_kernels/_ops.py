"""Sparse packing of a Lindblad generator for the propagation kernels.

The generator dL/dt = -i[H, rho] + sum_k rate_k D[L_k] rho is applied as

    L(rho) = G rho + rho G^dag + sum_k J_k rho J_k^dag,

with J_k = sqrt(rate_k) L_k and the non-Hermitian drift
G = -iH - (1/2) sum_k J_k^dag J_k.  All operators in scope (ladder
operators, Pauli matrices, their tensor embeddings, and short sums of
those) are extremely sparse, so G and the J_k are stored in CSR form and
applied in O(nnz * dim) instead of O(dim^3).
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

__all__ = ["PackedCsr", "KernelOps", "pack_csr"]


class PackedCsr:
    """CSR arrays of one complex matrix, dtypes fixed for the compiled kernel."""

    __slots__ = ("data", "indices", "indptr", "dim", "nnz")

    def __init__(self, matrix: np.ndarray):
        m = sp.csr_matrix(np.asarray(matrix, dtype=complex))
        m.eliminate_zeros()
        m.sort_indices()
        self.data = np.ascontiguousarray(m.data, dtype=complex)
        self.indices = np.ascontiguousarray(m.indices, dtype=np.int32)
        self.indptr = np.ascontiguousarray(m.indptr, dtype=np.int32)
        self.dim = matrix.shape[0]
        self.nnz = int(m.nnz)

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.data, self.indices, self.indptr), shape=(self.dim, self.dim)
        )


def pack_csr(matrix: np.ndarray) -> PackedCsr:
    return PackedCsr(matrix)


class KernelOps:
    """Prepared form of (H, jumps) shared by both kernel backends."""

    def __init__(self, hamiltonian: np.ndarray, jumps):
        d = hamiltonian.shape[0]
        drift = -1j * np.asarray(hamiltonian, dtype=complex)
        scaled = []
        for op, rate in jumps:
            if rate < 0:
                raise ValueError("jump rates must be nonnegative")
            if rate == 0:
                continue
            j = np.sqrt(rate) * np.asarray(op, dtype=complex)
            drift -= 0.5 * (j.conj().T @ j)
            scaled.append(j)
        self.dim = d
        self.drift = PackedCsr(drift)
        self.jumps = [PackedCsr(j) for j in scaled]
        # Concatenated jump arrays for the compiled backend.
        if scaled:
            self.jump_data = np.concatenate([p.data for p in self.jumps])
            self.jump_indices = np.concatenate([p.indices for p in self.jumps])
            offsets = np.cumsum([0] + [p.nnz for p in self.jumps])
            self.jump_indptr = np.stack(
                [p.indptr + np.int32(offsets[k]) for k, p in enumerate(self.jumps)]
            ).astype(np.int32)
        else:
            self.jump_data = np.zeros(0, dtype=complex)
            self.jump_indices = np.zeros(0, dtype=np.int32)
            self.jump_indptr = np.zeros((0, d + 1), dtype=np.int32)
