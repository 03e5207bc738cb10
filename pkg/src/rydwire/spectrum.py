"""Classical phase diagrams, MIS enumeration, reference states, ground states.

Configuration sets are reported as sorted tuples of 1-based decimal labels in
the package encoding.  All brute-force scans are exact; phase boundaries come
from energy comparisons between excitation sectors, so they are exact
rationals in units of the interaction strength.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from io import StringIO

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh, ArpackNoConvergence

from .graphs import Graph, WiredGraph, platonic_graph, wire_platonic
from .hamiltonian import (
    HamiltonianParams,
    apply_operator,
    diagonal_energies,
    encode,
    excitation_counts,
)

MAX_BRUTE_FORCE_ATOMS = 24
MAX_EIGSH_ATOMS = 20


class EigensolverError(RuntimeError):
    """Raised when the iterative eigensolver fails to reach tolerance."""


def _atom_count(graph: Graph | WiredGraph) -> int:
    return graph.num_atoms if isinstance(graph, WiredGraph) else graph.num_vertices


def _edge_list(graph: Graph | WiredGraph) -> list[tuple[int, int]]:
    return graph.sorted_edges()


def _pair_counts(graph: Graph | WiredGraph) -> np.ndarray:
    """Number of excited adjacent pairs for every configuration."""
    n = _atom_count(graph)
    if n > MAX_BRUTE_FORCE_ATOMS:
        raise ValueError(f"brute force limited to {MAX_BRUTE_FORCE_ATOMS} atoms, got {n}")
    values = np.arange(2**n, dtype=np.uint32)
    pairs = np.zeros(2**n, dtype=np.int64)
    for i, j in _edge_list(graph):
        pairs += ((values >> (n - 1 - i)) & (values >> (n - 1 - j)) & 1).astype(np.int64)
    return pairs


def classical_ground_configs(
    graph: Graph | WiredGraph, delta: float, u: float
) -> tuple[int, ...]:
    """Exact argmin set of the diagonal energy, all ties included."""
    n = _atom_count(graph)
    energies = u * _pair_counts(graph) - delta * excitation_counts(n)
    lowest = energies.min()
    return tuple(int(v) + 1 for v in np.flatnonzero(energies == lowest))


@dataclass(frozen=True)
class PhaseRegion:
    """Open detuning interval (in units of U) with a fixed classical ground set."""

    delta_lo_over_u: float
    delta_hi_over_u: float
    excitation_count: int
    config_indices: tuple[int, ...]


def _sector_minima(graph: Graph | WiredGraph) -> dict[int, tuple[int, np.ndarray]]:
    """Per excitation count: (min adjacent-pair count, achieving config values)."""
    n = _atom_count(graph)
    pairs = _pair_counts(graph)
    counts = excitation_counts(n)
    out = {}
    for k in range(n + 1):
        sel = np.flatnonzero(counts == k)
        p = pairs[sel]
        pmin = int(p.min())
        out[k] = (pmin, sel[p == pmin])
    return out


def phase_diagram(graph: Graph | WiredGraph, u: float = 1.0) -> list[PhaseRegion]:
    """Lower envelope of the sector energies E_k(Delta) = -Delta k + U p_k.

    Regions cover the whole detuning axis; the outermost intervals are
    unbounded (the paramagnetic phases).  Sectors that never strictly win
    (ties only at isolated boundary points) do not appear.
    """
    sect = _sector_minima(graph)
    ks = sorted(sect)
    regions: list[PhaseRegion] = []
    k = ks[0]  # zero excitations wins at Delta -> -inf
    lo = -math.inf
    while True:
        # earliest crossing with a steeper sector; prefer the steepest on ties
        best_x, best_k = math.inf, None
        for k2 in ks:
            if k2 <= k:
                continue
            x = (sect[k2][0] - sect[k][0]) / (k2 - k)
            if x < best_x - 1e-12 or (abs(x - best_x) <= 1e-12 and (best_k is None or k2 > best_k)):
                best_x, best_k = x, k2
        hi = best_x if best_k is not None else math.inf
        regions.append(
            PhaseRegion(
                delta_lo_over_u=lo,
                delta_hi_over_u=hi,
                excitation_count=k,
                config_indices=tuple(int(v) + 1 for v in sect[k][1]),
            )
        )
        if best_k is None:
            return regions
        k, lo = best_k, best_x


def phase_boundaries(regions: list[PhaseRegion]) -> list[float]:
    return [r.delta_hi_over_u for r in regions[:-1]]


def phase_diagram_json(regions: list[PhaseRegion]) -> str:
    doc = [
        {
            "delta_lo_over_U": None if math.isinf(r.delta_lo_over_u) else r.delta_lo_over_u,
            "delta_hi_over_U": None if math.isinf(r.delta_hi_over_u) else r.delta_hi_over_u,
            "excitation_count": r.excitation_count,
            "configs": list(r.config_indices),
        }
        for r in regions
    ]
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def phase_diagram_csv(regions: list[PhaseRegion]) -> str:
    buf = StringIO()
    buf.write("delta_lo_over_U,delta_hi_over_U,excitation_count,num_configs\n")
    for r in regions:
        lo = "" if math.isinf(r.delta_lo_over_u) else f"{r.delta_lo_over_u:g}"
        hi = "" if math.isinf(r.delta_hi_over_u) else f"{r.delta_hi_over_u:g}"
        buf.write(f"{lo},{hi},{r.excitation_count},{len(r.config_indices)}\n")
    return buf.getvalue()


def mis_set(graph: Graph | WiredGraph) -> tuple[int, ...]:
    """All maximum independent sets, by exhaustive enumeration."""
    n = _atom_count(graph)
    pairs = _pair_counts(graph)
    counts = excitation_counts(n)
    independent = pairs == 0
    best = counts[independent].max()
    sel = np.flatnonzero(independent & (counts == best))
    return tuple(int(v) + 1 for v in sel)


def mis_size(graph: Graph | WiredGraph) -> int:
    n = _atom_count(graph)
    return int(excitation_counts(n)[mis_set(graph)[0] - 1])


_REFERENCE_NAMES = ("tetrahedron", "cube", "octahedron")


def reference_state(name: str, wired: bool = False) -> np.ndarray:
    """Exact MIS-phase ground states of the Platonic graphs and their wired forms."""
    if name not in _REFERENCE_NAMES:
        raise ValueError(f"unknown reference {name!r}; choose from {_REFERENCE_NAMES}")

    if not wired:
        if name == "tetrahedron":
            terms = {(1, 0, 0, 0): 0.5, (0, 1, 0, 0): 0.5, (0, 0, 1, 0): 0.5, (0, 0, 0, 1): 0.5}
        elif name == "cube":
            amp = 1.0 / math.sqrt(2.0)
            terms = {(0, 1, 0, 1, 0, 1, 0, 1): amp, (1, 0, 1, 0, 1, 0, 1, 0): amp}
        else:
            amp = 1.0 / math.sqrt(3.0)
            terms = {
                (1, 0, 0, 1, 0, 0): amp,
                (0, 1, 0, 0, 1, 0): amp,
                (0, 0, 1, 0, 0, 1): amp,
            }
    elif name == "tetrahedron":
        a = math.sqrt(3.0 / 32.0)
        c = math.sqrt(5.0 / 32.0)
        terms = {
            (1, 0, 0, 0, 0, 1): a,
            (1, 0, 0, 0, 1, 0): a,
            (0, 1, 0, 1, 0, 0): a,
            (0, 1, 1, 0, 0, 0): a,
            (0, 0, 0, 1, 0, 1): c,
            (0, 0, 0, 1, 1, 0): c,
            (0, 0, 1, 0, 0, 1): c,
            (0, 0, 1, 0, 1, 0): c,
        }
    elif name == "cube":
        amp = 1.0 / math.sqrt(2.0)
        terms = {
            (0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0): amp,
            (1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1): amp,
        }
    else:
        a = math.sqrt(20.0 / 243.0)
        b = math.sqrt(41.0 / 243.0)
        free = {(0, 1, 0, 1): a, (1, 0, 1, 0): a, (1, 0, 0, 1): b}
        lines = [
            ((1, 0, 1, 0), (0, 1, 0, 1), None, (0, 0, 1, 0, 0, 1)),
            (None, (1, 0, 1, 0), (0, 1, 0, 1), (0, 1, 0, 0, 1, 0)),
            ((0, 1, 0, 1), None, (1, 0, 1, 0), (1, 0, 0, 1, 0, 0)),
        ]
        terms = {}
        for w1, w2, w3, verts in lines:
            for pattern, amp in free.items():
                parts = [w1 or pattern, w2 or pattern, w3 or pattern]
                bits = parts[0] + parts[1] + parts[2] + verts
                terms[bits] = amp

    n_atoms = len(next(iter(terms)))
    psi = np.zeros(2**n_atoms, dtype=np.complex128)
    for bits, amp in terms.items():
        psi[encode(bits) - 1] = amp
    return psi


def reference_graph(name: str, wired: bool = False) -> Graph | WiredGraph:
    return wire_platonic(name) if wired else platonic_graph(name)


def ground_state(
    params: HamiltonianParams,
    tol: float = 1e-8,
    ncv: int | None = None,
    maxiter: int | None = None,
) -> tuple[float, np.ndarray]:
    """Lowest eigenpair by implicitly-restarted Lanczos on the matrix-free operator.

    Deterministic: the iteration always starts from the uniform positive
    vector, so degenerate and quasi-degenerate cases are reproducible (and a
    start vector symmetric under the graph's automorphisms keeps the iterate
    in the symmetric sector).
    """
    n = params.n_atoms
    if n > MAX_EIGSH_ATOMS:
        raise ValueError(f"iterative eigensolver limited to {MAX_EIGSH_ATOMS} atoms")
    dim = 2**n
    diag = diagonal_energies(params)
    half = params.omega / 2.0

    def matvec(x):
        return apply_operator(diag, half, n, x)

    op = LinearOperator((dim, dim), matvec=matvec, dtype=np.float64)
    v0 = np.full(dim, 1.0 / math.sqrt(dim))
    try:
        vals, vecs = eigsh(
            op, k=1, which="SA", v0=v0, tol=tol * 1e-2,
            ncv=ncv, maxiter=maxiter,
        )
    except ArpackNoConvergence as exc:
        raise EigensolverError(f"Lanczos did not converge: {exc}") from exc
    energy = float(vals[0])
    vec = vecs[:, 0]
    residual = np.linalg.norm(matvec(vec) - energy * vec)
    scale = max(1.0, abs(energy))
    if residual > tol * scale:
        raise EigensolverError(
            f"residual {residual:.2e} above tolerance {tol * scale:.2e}"
        )
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    return energy, vec.astype(np.complex128)
