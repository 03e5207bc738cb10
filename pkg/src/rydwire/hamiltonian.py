"""Spin-configuration encoding and the Rydberg Ising Hamiltonian.

Configurations are N-bit words, MSB first in atom order (wire atoms, then
vertices); bit 1 is the Rydberg state.  The decimal label of a configuration
is its word value plus one, so the all-ground state is |1>.

H = sum_i (Omega/2 sx_i - Delta/2 sz_i) + sum_(i,j) U_ij n_i n_j with hbar=1.
The configuration-independent +Delta*N/2 constant is dropped everywhere, so
the diagonal reads E(c) = -Delta * n_exc(c) + sum of couplings over excited
pairs.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .graphs import Graph, WiredGraph
from .layout import Layout, pairwise_couplings

MAX_DENSE_ATOMS = 14


def encode(bits: Sequence[int]) -> int:
    """1-based decimal label of a configuration given MSB-first bits."""
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0/1, got {b}")
        value = (value << 1) | b
    return value + 1


def decode(index: int, n_atoms: int) -> tuple[int, ...]:
    """Inverse of :func:`encode`."""
    if not 1 <= index <= 2**n_atoms:
        raise ValueError(f"index {index} out of range for {n_atoms} atoms")
    value = index - 1
    return tuple((value >> (n_atoms - 1 - k)) & 1 for k in range(n_atoms))


def bitstring(index: int, n_atoms: int) -> str:
    return "".join(str(b) for b in decode(index, n_atoms))


def excitation_counts(n_atoms: int) -> np.ndarray:
    """Number of excited atoms for every configuration value 0..2^N-1."""
    return np.bitwise_count(np.arange(2**n_atoms, dtype=np.uint32)).astype(np.int64)


@dataclass(frozen=True)
class UniformCoupling:
    """One interaction strength on the edges of a (wired) graph."""

    u: float
    edges: tuple[tuple[int, int], ...]
    n_atoms: int


@dataclass(frozen=True, eq=False)
class PairwiseCoupling:
    """Full 1/r^6 coupling matrix; every atom pair interacts."""

    matrix: np.ndarray

    @property
    def n_atoms(self) -> int:
        return self.matrix.shape[0]


Coupling = UniformCoupling | PairwiseCoupling


def uniform_coupling(graph: Graph | WiredGraph, u: float) -> UniformCoupling:
    if isinstance(graph, WiredGraph):
        return UniformCoupling(u, tuple(graph.sorted_edges()), graph.num_atoms)
    return UniformCoupling(u, tuple(graph.sorted_edges()), graph.num_vertices)


def physical_coupling(layout: Layout, c6: float) -> PairwiseCoupling:
    return PairwiseCoupling(pairwise_couplings(layout, c6))


@dataclass(frozen=True, eq=False)
class HamiltonianParams:
    omega: float
    delta: float
    coupling: Coupling

    @property
    def n_atoms(self) -> int:
        return self.coupling.n_atoms


def _bit_masks(n_atoms: int) -> list[np.ndarray]:
    values = np.arange(2**n_atoms, dtype=np.uint32)
    return [((values >> (n_atoms - 1 - k)) & 1).astype(bool) for k in range(n_atoms)]


def pair_energies(coupling: Coupling) -> np.ndarray:
    """Interaction energy of every configuration (the U n_i n_j part)."""
    n = coupling.n_atoms
    bits = _bit_masks(n)
    if isinstance(coupling, UniformCoupling):
        # integer pair count times u: configurations related by a graph
        # automorphism get bit-identical energies
        pairs = np.zeros(2**n, dtype=np.int64)
        for i, j in coupling.edges:
            pairs += bits[i] & bits[j]
        return coupling.u * pairs
    out = np.zeros(2**n, dtype=np.float64)
    m = coupling.matrix
    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j] != 0.0:
                out[bits[i] & bits[j]] += m[i, j]
    return out


def diagonal_energies(params: HamiltonianParams) -> np.ndarray:
    return pair_energies(params.coupling) - params.delta * excitation_counts(params.n_atoms)


def classical_energy(bits: Sequence[int], params: HamiltonianParams) -> float:
    """Diagonal (Omega=0) energy of one configuration."""
    bits = tuple(bits)
    if len(bits) != params.n_atoms:
        raise ValueError(f"{len(bits)} bits for {params.n_atoms} atoms")
    k = sum(bits)
    c = params.coupling
    if isinstance(c, UniformCoupling):
        inter = c.u * sum(1 for i, j in c.edges if bits[i] and bits[j])
    else:
        n = len(bits)
        inter = sum(
            c.matrix[i, j]
            for i in range(n)
            for j in range(i + 1, n)
            if bits[i] and bits[j]
        )
    return -params.delta * k + inter


def flip_sum(state: np.ndarray, n_atoms: int) -> np.ndarray:
    """sum_i sigma_x,i applied to a state: add the single-bit-flip neighbors."""
    psi = state.reshape((2,) * n_atoms)
    out = np.zeros_like(psi)
    for axis in range(n_atoms):
        out += np.flip(psi, axis)
    return out.reshape(-1)


def _apply_numpy(diag: np.ndarray, half_omega: float, n_atoms: int, state: np.ndarray) -> np.ndarray:
    out = diag * state
    if half_omega != 0.0:
        out = out + half_omega * flip_sum(state, n_atoms)
    return out


try:  # optional single-pass kernel; the numpy path is the reference
    import os as _os

    # the TBB layer is unusable on this image; workqueue is fine for 2 threads
    _os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    import numba as _numba

    @_numba.njit(parallel=True, cache=True)
    def _apply_kernel(diag, half_omega, n_atoms, state, out):  # pragma: no cover
        dim = state.shape[0]
        for i in _numba.prange(dim):
            acc = diag[i] * state[i]
            for b in range(n_atoms):
                acc += half_omega * state[i ^ (1 << b)]
            out[i] = acc

    def apply_operator(diag: np.ndarray, half_omega: float, n_atoms: int, state: np.ndarray) -> np.ndarray:
        """(diag + half_omega * sum_i sx_i) @ state, one pass over the basis."""
        if half_omega == 0.0:
            return diag * state
        st = np.ascontiguousarray(state)
        out = np.empty_like(st)
        _apply_kernel(np.ascontiguousarray(diag), float(half_omega), n_atoms, st, out)
        return out

except ImportError:  # pragma: no cover
    def apply_operator(diag: np.ndarray, half_omega: float, n_atoms: int, state: np.ndarray) -> np.ndarray:
        """(diag + half_omega * sum_i sx_i) @ state."""
        return _apply_numpy(diag, half_omega, n_atoms, state)


def apply_hamiltonian(
    state: np.ndarray,
    params: HamiltonianParams,
    diag: np.ndarray | None = None,
) -> np.ndarray:
    """H |psi> without materializing the matrix; O(N 2^N).

    ``diag`` may carry precomputed diagonal energies to amortize repeated
    applications at fixed parameters.
    """
    n = params.n_atoms
    if state.shape != (2**n,):
        raise ValueError(f"state dimension {state.shape} does not match {n} atoms")
    if diag is None:
        diag = diagonal_energies(params)
    return apply_operator(diag, params.omega / 2.0, n, state)


def build_dense(params: HamiltonianParams) -> np.ndarray:
    """Dense real-symmetric matrix of the same operator (small-N oracle)."""
    n = params.n_atoms
    if n > MAX_DENSE_ATOMS:
        raise ValueError(f"dense matrix limited to {MAX_DENSE_ATOMS} atoms, got {n}")
    dim = 2**n
    h = np.diag(diagonal_energies(params)).astype(np.float64)
    half = params.omega / 2.0
    if half != 0.0:
        values = np.arange(dim)
        for k in range(n):
            flipped = values ^ (1 << (n - 1 - k))
            h[values, flipped] += half
    return h


def basis_state(index: int, n_atoms: int) -> np.ndarray:
    """Unit vector on one configuration (1-based decimal label)."""
    if not 1 <= index <= 2**n_atoms:
        raise ValueError(f"index {index} out of range for {n_atoms} atoms")
    psi = np.zeros(2**n_atoms, dtype=np.complex128)
    psi[index - 1] = 1.0
    return psi


def all_ground_state(n_atoms: int) -> np.ndarray:
    """|1> = every atom in the ground state (the PM-down product state)."""
    return basis_state(1, n_atoms)


def check_normalized(state: np.ndarray, tol: float = 1e-8) -> None:
    nrm = np.linalg.norm(state)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state norm {nrm} deviates from 1 beyond {tol}")


_MAGIC = b"RWSV"


def save_state(path: str | Path, state: np.ndarray) -> None:
    """Checkpoint format: magic, little-endian uint64 N, 2^N complex doubles."""
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"state length {dim} is not a power of two")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<Q", n))
        fh.write(np.ascontiguousarray(state, dtype="<c16").tobytes())


def load_state(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path} is not a state checkpoint")
        (n,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.shape[0] != 2**n:
        raise ValueError(f"truncated state file {path}")
    return data.astype(np.complex128)
