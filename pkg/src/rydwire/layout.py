"""Atom coordinates, physical parameters, and pairwise van der Waals couplings.

Unit conventions used throughout the package: lengths in micrometers, times in
microseconds, and every frequency-like quantity stored as an angular frequency
in rad/us.  A quantity quoted as "x MHz" in lab terms enters as 2*pi*x, so
phase = energy * time directly (hbar = 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from io import StringIO

import numpy as np

from .graphs import WiredGraph, Graph, UnsupportedGraphError, wire_platonic

TWO_PI = 2.0 * math.pi

# calibration anchors: d = 8.0 um spacing, blockade distance 10.55 um at
# Omega0 = 2pi * 0.74 MHz; C6 follows from the blockade condition
D_SPACING_UM = 8.0
BLOCKADE_UM = 10.55
OMEGA0 = TWO_PI * 0.74


class DegenerateGeometryError(ValueError):
    """Raised when requested edge lengths admit no planar placement."""


class SingularCouplingError(ValueError):
    """Raised when coincident atoms make a 1/r^6 coupling undefined."""


def interaction_strength(dist_um: float, c6: float) -> float:
    """Van der Waals interaction C6 / d^6 at separation ``dist_um``."""
    if dist_um <= 0:
        raise ValueError(f"distance must be positive, got {dist_um}")
    return c6 / dist_um**6


def blockade_radius(c6: float, omega: float) -> float:
    """Distance where the interaction equals the Rabi coupling, (C6/Omega)^(1/6)."""
    if c6 <= 0 or omega <= 0:
        raise ValueError("c6 and omega must be positive")
    return (c6 / omega) ** (1.0 / 6.0)


def calibrate_c6(d_r_um: float, omega: float) -> float:
    """C6 fixed by a measured blockade radius: C6 = Omega * d_R^6."""
    if d_r_um <= 0 or omega <= 0:
        raise ValueError("d_r and omega must be positive")
    return omega * d_r_um**6


def effective_rabi(omega_red: float, omega_blue: float, delta_m: float) -> float:
    """Two-photon effective Rabi frequency, Omega_red * Omega_blue / (2 * Delta_m)."""
    if delta_m == 0:
        raise ValueError("intermediate detuning must be nonzero")
    return omega_red * omega_blue / (2.0 * delta_m)


C6_DEFAULT = calibrate_c6(BLOCKADE_UM, OMEGA0)


@dataclass(frozen=True)
class PhysicalParams:
    """Interaction coefficient, peak Rabi frequency, and lattice spacing."""

    c6: float = C6_DEFAULT
    omega0: float = OMEGA0
    d_um: float = D_SPACING_UM

    def __post_init__(self):
        if self.c6 <= 0 or self.omega0 <= 0 or self.d_um <= 0:
            raise ValueError("physical parameters must be positive")
        if self.d_um >= self.blockade_um:
            raise ValueError(
                f"spacing {self.d_um} um is outside the blockade radius {self.blockade_um:.2f} um"
            )

    @property
    def blockade_um(self) -> float:
        return blockade_radius(self.c6, self.omega0)

    @property
    def u_nearest(self) -> float:
        """Interaction at the nearest-neighbor spacing."""
        return interaction_strength(self.d_um, self.c6)


@dataclass(frozen=True)
class Layout:
    """2D atom coordinates (um) indexed in the wired graph's atom order."""

    positions: tuple[tuple[float, float], ...]
    graph: WiredGraph

    def __post_init__(self):
        if len(self.positions) != self.graph.num_atoms:
            raise ValueError(
                f"{len(self.positions)} positions for {self.graph.num_atoms} atoms"
            )

    @property
    def num_atoms(self) -> int:
        return len(self.positions)

    def distance(self, i: int, j: int) -> float:
        (xi, yi), (xj, yj) = self.positions[i], self.positions[j]
        return math.hypot(xi - xj, yi - yj)

    def edge_lengths(self) -> dict[tuple[int, int], float]:
        return {e: self.distance(*e) for e in self.graph.sorted_edges()}

    def to_csv(self) -> str:
        buf = StringIO()
        buf.write("atom_id,role,x_um,y_um\n")
        n_wire = self.graph.num_wire_atoms
        for i, (x, y) in enumerate(self.positions):
            role = "wire" if i < n_wire else "vertex"
            label = self.graph.atom_labels[i] if self.graph.atom_labels else str(i)
            buf.write(f"{label},{role},{x:.1f},{y:.1f}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        n_wire = self.graph.num_wire_atoms
        doc = {
            "graph": self.graph.base.name,
            "atoms": [
                {
                    "id": i,
                    "label": self.graph.atom_labels[i] if self.graph.atom_labels else str(i),
                    "role": "wire" if i < n_wire else "vertex",
                    "x_um": round(x, 1),
                    "y_um": round(y, 1),
                }
                for i, (x, y) in enumerate(self.positions)
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# experimental coordinates; wire atoms listed in chain order (the order is
# pinned by the published decimal configuration labels, not by the +/- signs
# of the printed table)
_TABLE1 = {
    "tetrahedron": {
        "wires": [[(-4.0, 0.0), (4.0, 0.0)]],
        "vertices": [(-10.9, 4.0), (-10.9, -4.0), (10.9, -4.0), (10.9, 4.0)],
    },
    "cube": {
        "wires": [
            [(4.0, 15.3), (-4.0, 15.3)],     # chain 5 -> 6
            [(-15.3, 4.0), (-15.3, -4.0)],   # chain 6 -> 7
            [(-4.0, -15.3), (4.0, -15.3)],   # chain 7 -> 8
            [(15.3, -4.0), (15.3, 4.0)],     # chain 8 -> 5
        ],
        "vertices": [
            (-4.0, 4.0), (-4.0, -4.0), (4.0, -4.0), (4.0, 4.0),
            (9.7, 9.7), (-9.7, 9.7), (-9.7, -9.7), (9.7, -9.7),
        ],
    },
    "octahedron": {
        "wires": [
            [(-6.9, 13.8), (-14.9, 13.8), (-18.9, 6.9), (-14.9, 0.0)],  # chain 1 -> 3
            [(-8.0, -12.0), (-4.0, -18.9), (4.0, -18.9), (8.0, -12.0)],  # chain 3 -> 5
            [(14.9, 0.0), (18.9, 6.9), (14.9, 13.8), (6.9, 13.8)],       # chain 5 -> 1
        ],
        "vertices": [
            (0.0, 9.8), (-4.0, 2.9), (-8.0, -4.0),
            (0.0, -4.0), (8.0, -4.0), (4.0, 2.9),
        ],
    },
}


def table1_layout(name: str) -> Layout:
    """The experimental atom positions for a wired Platonic graph."""
    if name not in _TABLE1:
        raise UnsupportedGraphError(f"no tabulated layout for {name!r}")
    data = _TABLE1[name]
    positions = [p for wire in data["wires"] for p in wire] + list(data["vertices"])
    return Layout(tuple(positions), wire_platonic(name))


def k4_family_layout(d_um: float, d_ratio: float) -> Layout:
    """The tetrahedron-wire family with wire-edge length d' = d_ratio * d.

    Wire atoms sit at (+/- d'/2, 0); vertices are placed so all five
    wire-involved edges have length d' and the two dimer edges length d.
    """
    if d_um <= 0 or d_ratio <= 0:
        raise ValueError("d and d_ratio must be positive")
    dp = d_ratio * d_um
    disc = dp**2 - d_um**2 / 4.0
    if disc < 0:
        raise DegenerateGeometryError(
            f"d'={dp:.3f} shorter than d/2={d_um / 2:.3f}: vertex placement undefined"
        )
    s = math.sqrt(disc)
    x = dp / 2.0 + s
    positions = (
        (-dp / 2.0, 0.0),
        (dp / 2.0, 0.0),
        (-x, d_um / 2.0),
        (-x, -d_um / 2.0),
        (x, -d_um / 2.0),
        (x, d_um / 2.0),
    )
    return Layout(positions, wire_platonic("tetrahedron"))


def layout_from_json(text: str, graph: WiredGraph) -> Layout:
    """Rebuild a layout from its JSON document, for a known wired graph."""
    doc = json.loads(text)
    atoms = sorted(doc["atoms"], key=lambda a: a["id"])
    return Layout(tuple((a["x_um"], a["y_um"]) for a in atoms), graph)


def derive_adjacency(layout: Layout, cutoff_um: float) -> Graph:
    """Unit-disk graph over the layout's atoms: edge iff distance <= cutoff."""
    if cutoff_um <= 0:
        raise ValueError("cutoff must be positive")
    n = layout.num_atoms
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if layout.distance(i, j) <= cutoff_um
    ]
    return Graph(n, edges, name=f"{layout.graph.base.name}-disk")


def pairwise_couplings(layout: Layout, c6: float) -> np.ndarray:
    """Symmetric matrix of C6/r^6 couplings for every atom pair (diagonal zero)."""
    pos = np.asarray(layout.positions)
    diff = pos[:, None, :] - pos[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    n = layout.num_atoms
    off = ~np.eye(n, dtype=bool)
    if np.any(r2[off] == 0.0):
        raise SingularCouplingError("coincident atoms in layout")
    u = np.zeros_like(r2)
    u[off] = c6 / r2[off] ** 3
    return u
