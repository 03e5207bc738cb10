"""Platonic graphs and their quantum-wired planar counterparts.

Vertex numbering follows the experimental layout tables: vertex ``k`` of the
base graph (1-based label ``k+1`` in printed form) is atom ``n_wire_atoms + k``
of the wired graph, and wire atoms come first, wire by wire, in chain order.
That ordering is part of the public contract because the decimal labels of
spin configurations depend on it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

PLATONIC_NAMES = ("tetrahedron", "cube", "octahedron")


class UnsupportedGraphError(ValueError):
    """Raised for graph names outside the supported Platonic set."""


def _normalize_edges(edges: Iterable[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    out = set()
    for i, j in edges:
        if i == j:
            raise ValueError(f"self-loop on vertex {i}")
        out.add((min(i, j), max(i, j)))
    return frozenset(out)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with 0-based vertex indices."""

    num_vertices: int
    edges: frozenset[tuple[int, int]]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "edges", _normalize_edges(self.edges))
        for i, j in self.edges:
            if not (0 <= i < self.num_vertices and 0 <= j < self.num_vertices):
                raise ValueError(f"edge ({i},{j}) endpoint out of range")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def facets(self) -> int:
        """Facet count from Euler's polyhedron formula, f = 2 - |V| + |E|."""
        return 2 - self.num_vertices + self.num_edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class Wire:
    """Chain of auxiliary atoms substituted for base-graph edges.

    ``atoms`` are atom indices of the wired graph, in chain order; the chain
    has even length.  ``terminals`` gives the base vertices attached to the
    first and last chain atom respectively (each end may attach to several
    vertices, as for the tetrahedron wire).
    """

    atoms: tuple[int, ...]
    terminals: tuple[tuple[int, ...], tuple[int, ...]]
    replaced_edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if len(self.atoms) < 2 or len(self.atoms) % 2 != 0:
            raise ValueError("wire length must be even and >= 2")
        object.__setattr__(self, "replaced_edges", _normalize_edges(self.replaced_edges))

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class WiredGraph:
    """A base graph plus the quantum wires that replace some of its edges.

    Atom order: all wire atoms first (wire by wire, chain order), then base
    vertices in index order.  ``all_edges`` is over atom indices.
    """

    base: Graph
    wires: tuple[Wire, ...]
    all_edges: frozenset[tuple[int, int]]
    atom_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "all_edges", _normalize_edges(self.all_edges))
        seen: set[int] = set()
        for w in self.wires:
            overlap = seen.intersection(w.atoms)
            if overlap:
                raise ValueError(f"atoms {overlap} appear in two wires")
            seen.update(w.atoms)

    @property
    def num_wire_atoms(self) -> int:
        return sum(len(w) for w in self.wires)

    @property
    def num_atoms(self) -> int:
        return self.num_wire_atoms + self.base.num_vertices

    @property
    def num_edges(self) -> int:
        return len(self.all_edges)

    def vertex_atom(self, v: int) -> int:
        """Atom index of base vertex ``v``."""
        return self.num_wire_atoms + v

    def vertex_of_atom(self, a: int) -> int | None:
        """Base vertex index for atom ``a``, or None for a wire atom."""
        k = a - self.num_wire_atoms
        return k if k >= 0 else None

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.all_edges)


def _k4() -> Graph:
    return Graph(4, combinations(range(4), 2), name="tetrahedron")


def _q3() -> Graph:
    inner = [(0, 1), (1, 2), (2, 3), (0, 3)]
    outer = [(4, 5), (5, 6), (6, 7), (4, 7)]
    spokes = [(0, 5), (1, 6), (2, 7), (3, 4)]
    return Graph(8, inner + outer + spokes, name="cube")


def _k222() -> Graph:
    # complete tripartite with antipodal (non-adjacent) pairs (0,3), (1,4), (2,5)
    anti = {(0, 3), (1, 4), (2, 5)}
    edges = [e for e in combinations(range(6), 2) if e not in anti]
    return Graph(6, edges, name="octahedron")


def platonic_graph(name: str) -> Graph:
    """The tetrahedron (K4), cube (Q3) or octahedron (K222) graph."""
    if name == "tetrahedron":
        return _k4()
    if name == "cube":
        return _q3()
    if name == "octahedron":
        return _k222()
    raise UnsupportedGraphError(f"unsupported graph {name!r}; choose from {PLATONIC_NAMES}")


def _wire_labels(wire_index: int, length: int, single: bool) -> list[str]:
    stem = "W" if single else f"W{wire_index + 1}"
    return [f"{stem}.{k + 1}" for k in range(length)]


def wire_platonic(name: str) -> WiredGraph:
    """The quantum-wired planar version of a Platonic graph.

    tetrahedron: one 2-atom wire (a near vertices 1,2; b near 3,4) replacing
    the four long edges, keeping (1,2) and (3,4).
    cube: four 2-atom wires replacing the outer-ring edges, chains running
    5->6, 6->7, 7->8, 8->5 (1-based labels).
    octahedron: three 4-atom wires replacing the stretched triangle edges,
    chains running 1->3, 3->5, 5->1.
    """
    base = platonic_graph(name)

    if name == "tetrahedron":
        wire = Wire(
            atoms=(0, 1),
            terminals=((0, 1), (2, 3)),
            replaced_edges=frozenset({(0, 2), (0, 3), (1, 2), (1, 3)}),
        )
        wires = (wire,)
        labels = _wire_labels(0, 2, single=True)
    elif name == "cube":
        # each wire replaces one outer edge; head terminal listed first
        chain_ends = [(4, 5), (5, 6), (6, 7), (7, 4)]
        wires = tuple(
            Wire(
                atoms=(2 * k, 2 * k + 1),
                terminals=((u,), (v,)),
                replaced_edges=frozenset({(min(u, v), max(u, v))}),
            )
            for k, (u, v) in enumerate(chain_ends)
        )
        labels = [s for k in range(4) for s in _wire_labels(k, 2, single=False)]
    elif name == "octahedron":
        chain_ends = [(0, 2), (2, 4), (4, 0)]
        wires = tuple(
            Wire(
                atoms=tuple(range(4 * k, 4 * k + 4)),
                terminals=((u,), (v,)),
                replaced_edges=frozenset({(min(u, v), max(u, v))}),
            )
            for k, (u, v) in enumerate(chain_ends)
        )
        labels = [s for k in range(3) for s in _wire_labels(k, 4, single=False)]
    else:
        raise UnsupportedGraphError(f"unsupported graph {name!r}; choose from {PLATONIC_NAMES}")

    n_wire = sum(len(w) for w in wires)
    replaced = frozenset().union(*(w.replaced_edges for w in wires))
    edges: set[tuple[int, int]] = set()
    for i, j in base.edges - replaced:
        edges.add((n_wire + i, n_wire + j))
    for w in wires:
        head, tail = w.atoms[0], w.atoms[-1]
        for v in w.terminals[0]:
            edges.add((min(head, n_wire + v), max(head, n_wire + v)))
        for v in w.terminals[1]:
            edges.add((min(tail, n_wire + v), max(tail, n_wire + v)))
        for a, b in zip(w.atoms, w.atoms[1:]):
            edges.add((a, b))

    labels += [str(v + 1) for v in range(base.num_vertices)]
    return WiredGraph(base=base, wires=wires, all_edges=frozenset(edges), atom_labels=tuple(labels))


def strip_wires(wg: WiredGraph) -> Graph:
    """Recover the base graph: drop wire atoms, restore the replaced edges."""
    n_wire = wg.num_wire_atoms
    kept = {
        (i - n_wire, j - n_wire)
        for i, j in wg.all_edges
        if i >= n_wire and j >= n_wire
    }
    for w in wg.wires:
        kept.update(w.replaced_edges)
    return Graph(wg.base.num_vertices, kept, name=wg.base.name)


@dataclass(frozen=True)
class ScalingRecord:
    """An (N, N') point for the atom-number scaling report."""

    n: int
    n_prime: int
    label: str = ""

    def __post_init__(self):
        if self.n < 1 or self.n_prime < self.n:
            raise ValueError(f"invalid scaling point ({self.n}, {self.n_prime})")


def scaling_point(n: int, n_prime: int, label: str = "") -> ScalingRecord:
    return ScalingRecord(n, n_prime, label)


def builtin_scaling_points() -> list[ScalingRecord]:
    """(N, N') for the three constructed graphs, as built.

    The octahedron is also reported with the published N'=22 (the built
    layout has 18 atoms; both values are kept side by side).
    """
    pts = []
    for name in PLATONIC_NAMES:
        wg = wire_platonic(name)
        pts.append(ScalingRecord(wg.base.num_vertices, wg.num_atoms, name))
    pts.append(ScalingRecord(6, 22, "octahedron(reported)"))
    return pts


def graph_from_json(text: str) -> Graph | WiredGraph:
    """Inverse of :func:`graph_to_json`."""
    doc = json.loads(text)
    edges = [tuple(e) for e in doc["edges"]]
    if not doc.get("wires"):
        return Graph(doc["vertices"], edges, name=doc.get("name", ""))
    wires = tuple(
        Wire(
            atoms=tuple(w["atoms"]),
            terminals=tuple(tuple(t) for t in w["terminals"]),
            replaced_edges=frozenset(tuple(e) for e in w["replaced_edges"]),
        )
        for w in doc["wires"]
    )
    n_wire = sum(len(w) for w in wires)
    base_edges = {
        (i - n_wire, j - n_wire) for i, j in edges if i >= n_wire and j >= n_wire
    }
    for w in wires:
        base_edges.update(w.replaced_edges)
    base = Graph(doc["vertices"] - n_wire, base_edges, name=doc.get("name", ""))
    return WiredGraph(
        base=base,
        wires=wires,
        all_edges=frozenset(edges),
        atom_labels=tuple(doc.get("atom_labels", ())),
    )


def graph_to_json(obj: Graph | WiredGraph) -> str:
    """Serialize a graph to the canonical JSON document (sorted edge lists)."""
    if isinstance(obj, Graph):
        doc = {
            "name": obj.name,
            "vertices": obj.num_vertices,
            "edges": [list(e) for e in obj.sorted_edges()],
            "wires": [],
        }
    else:
        doc = {
            "name": obj.base.name,
            "vertices": obj.num_atoms,
            "edges": [list(e) for e in obj.sorted_edges()],
            "wires": [
                {
                    "atoms": list(w.atoms),
                    "terminals": [list(t) for t in w.terminals],
                    "replaced_edges": [list(e) for e in sorted(w.replaced_edges)],
                }
                for w in obj.wires
            ],
            "atom_labels": list(obj.atom_labels),
        }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
