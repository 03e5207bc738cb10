"""Measurement sampling, readout errors, AF-wire post-selection, scaling formulas.

Post-selection keeps only shots whose every wire is in an antiferromagnetic
configuration (maximum number of non-adjacent excitations on the wire chain:
{01, 10} for two atoms, {0101, 1010, 1001} for four), then marginalizes the
wire bits away, leaving a distribution over base-vertex configurations.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from io import StringIO
from typing import Sequence

import numpy as np

from .graphs import Graph, WiredGraph
from .hamiltonian import bitstring
from .spectrum import mis_set


class EmptyPostselectionError(RuntimeError):
    """No shot survived the AF-wire condition; carries the raw counts."""

    def __init__(self, message: str, raw_counts: dict[int, int] | None = None):
        super().__init__(message)
        self.raw_counts = raw_counts or {}


class UnboundedShotsError(ValueError):
    """The separation criterion cannot be met at any shot count."""


@dataclass(frozen=True)
class ShotSet:
    """Measurement outcomes as an (M, N) bit array plus provenance."""

    shots: np.ndarray
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.shots, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("shots must be a 2D (M, N) array")
        object.__setattr__(self, "shots", arr)

    @property
    def n_shots(self) -> int:
        return self.shots.shape[0]

    @property
    def n_atoms(self) -> int:
        return self.shots.shape[1]

    def values(self) -> np.ndarray:
        """0-based configuration values of every shot."""
        n = self.n_atoms
        weights = 1 << (n - 1 - np.arange(n, dtype=np.int64))
        return self.shots.astype(np.int64) @ weights

    def to_csv(self) -> str:
        buf = StringIO()
        buf.write("shot_index,bitstring\n")
        for i, row in enumerate(self.shots):
            buf.write(f"{i},{''.join(str(int(b)) for b in row)}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class Distribution:
    """Sparse probabilities over configurations (1-based decimal labels).

    ``total_count`` is the number of events behind the distribution (None for
    exact amplitude-level results); ``kept_fraction`` records the surviving
    weight when the distribution came out of a post-selection.
    """

    n_atoms: int
    probabilities: dict[int, float]
    total_count: int | None = None
    counts: dict[int, int] | None = None
    kept_fraction: float | None = None

    def __post_init__(self):
        total = sum(self.probabilities.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, not 1")

    def probability(self, index: int) -> float:
        return self.probabilities.get(index, 0.0)

    def stderr(self, index: int) -> float:
        if not self.total_count:
            return 0.0
        p = self.probability(index)
        return math.sqrt(p * (1.0 - p) / self.total_count)

    def to_json(self) -> str:
        rows = []
        for index in sorted(self.probabilities):
            p = self.probabilities[index]
            rows.append(
                {
                    "index": index,
                    "bitstring": bitstring(index, self.n_atoms),
                    "probability": p,
                    "stderr": self.stderr(index),
                    "count": self.counts.get(index) if self.counts else None,
                }
            )
        doc = {
            "n_atoms": self.n_atoms,
            "total_count": self.total_count,
            "kept_fraction": self.kept_fraction,
            "entries": rows,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def distribution_from_values(
    values: np.ndarray, n_atoms: int, kept_fraction: float | None = None
) -> Distribution:
    """Empirical distribution of 0-based configuration values."""
    if values.size == 0:
        raise ValueError("no events")
    uniq, cnt = np.unique(values, return_counts=True)
    total = int(values.size)
    probs = {int(v) + 1: int(c) / total for v, c in zip(uniq, cnt)}
    counts = {int(v) + 1: int(c) for v, c in zip(uniq, cnt)}
    return Distribution(
        n_atoms=n_atoms,
        probabilities=probs,
        total_count=total,
        counts=counts,
        kept_fraction=kept_fraction,
    )


def distribution_from_shots(shots: ShotSet) -> Distribution:
    return distribution_from_values(shots.values(), shots.n_atoms)


def _probabilities_of(state_or_density: np.ndarray) -> np.ndarray:
    if state_or_density.ndim == 1:
        return np.abs(state_or_density) ** 2
    if state_or_density.ndim == 2:
        return np.real(np.diag(state_or_density)).copy()
    raise ValueError("expected a state vector or density matrix")


def _state_digest(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()[:16]


def sample_shots(state_or_density: np.ndarray, m: int, seed: int) -> ShotSet:
    """M Born-rule samples of the diagonal distribution; reproducible by seed."""
    if m < 1:
        raise ValueError("need at least one shot")
    probs = _probabilities_of(state_or_density)
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"input not normalized (diagonal weight {total})")
    n = probs.shape[0].bit_length() - 1
    cdf = np.cumsum(probs / total)
    u = np.random.default_rng(seed).random(m)
    values = np.searchsorted(cdf, u, side="right").clip(0, probs.shape[0] - 1)
    shifts = n - 1 - np.arange(n)
    bits = ((values[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    return ShotSet(
        bits,
        source={"seed": seed, "n_shots": m, "state": _state_digest(state_or_density)},
    )


def apply_detection_errors(shots: ShotSet, p01: float, p10: float, seed: int) -> ShotSet:
    """Independent per-atom readout flips: 0->1 w.p. p01, 1->0 w.p. p10."""
    for p in (p01, p10):
        if not 0.0 <= p <= 1.0:
            raise ValueError("flip probabilities must be in [0, 1]")
    bits = shots.shots
    r = np.random.default_rng(seed).random(bits.shape)
    flip = np.where(bits == 0, r < p01, r < p10)
    out = np.where(flip, 1 - bits, bits).astype(np.uint8)
    source = dict(shots.source)
    source.update({"detect_p01": p01, "detect_p10": p10, "detect_seed": seed})
    return ShotSet(out, source=source)


def af_condition(wire_bits: Sequence[int], wire_length: int) -> bool:
    """True iff the chain holds length/2 excitations with no adjacent pair."""
    if wire_length % 2 != 0 or wire_length < 2:
        raise ValueError(f"wire length must be even and >= 2, got {wire_length}")
    bits = tuple(wire_bits)
    if len(bits) != wire_length:
        raise ValueError(f"{len(bits)} bits for wire of length {wire_length}")
    if sum(bits) != wire_length // 2:
        return False
    return all(not (a and b) for a, b in zip(bits, bits[1:]))


def _af_shot_mask(shots: np.ndarray, wg: WiredGraph) -> np.ndarray:
    keep = np.ones(shots.shape[0], dtype=bool)
    for w in wg.wires:
        sub = shots[:, list(w.atoms)]
        full = sub.sum(axis=1) == len(w) // 2
        adjacent = (sub[:, :-1] & sub[:, 1:]).any(axis=1)
        keep &= full & ~adjacent
    return keep


def _af_config_mask(wg: WiredGraph) -> np.ndarray:
    """AF-wire mask over all 2^N' configuration values."""
    n = wg.num_atoms
    values = np.arange(2**n, dtype=np.int64)
    keep = np.ones(values.shape, dtype=bool)
    for w in wg.wires:
        bits = [(values >> (n - 1 - a)) & 1 for a in w.atoms]
        total = sum(bits)
        keep &= total == len(w) // 2
        for a, b in zip(bits, bits[1:]):
            keep &= (a & b) == 0
    return keep


def postselect_af(
    data: ShotSet | Distribution, wg: WiredGraph
) -> Distribution:
    """Impose the AF condition on every wire, marginalize wires, renormalize."""
    n_vertices = wg.base.num_vertices
    if isinstance(data, ShotSet):
        if data.n_atoms != wg.num_atoms:
            raise ValueError(f"{data.n_atoms}-atom shots for {wg.num_atoms}-atom graph")
        keep = _af_shot_mask(data.shots, wg)
        if not keep.any():
            raise EmptyPostselectionError(
                "no shot satisfied the AF-wire condition",
                raw_counts=distribution_from_shots(data).counts,
            )
        base_bits = data.shots[keep][:, wg.num_wire_atoms:]
        weights = 1 << (n_vertices - 1 - np.arange(n_vertices, dtype=np.int64))
        values = base_bits.astype(np.int64) @ weights
        return distribution_from_values(
            values, n_vertices, kept_fraction=keep.sum() / data.n_shots
        )

    if data.n_atoms != wg.num_atoms:
        raise ValueError(f"{data.n_atoms}-atom distribution for {wg.num_atoms}-atom graph")
    base_probs: dict[int, float] = {}
    for index, p in data.probabilities.items():
        bits = np.array([(index - 1 >> (wg.num_atoms - 1 - a)) & 1 for a in range(wg.num_atoms)])
        if all(
            af_condition(bits[list(w.atoms)], len(w)) for w in wg.wires
        ):
            base_index = ((index - 1) & ((1 << n_vertices) - 1)) + 1
            base_probs[base_index] = base_probs.get(base_index, 0.0) + p
    kept = sum(base_probs.values())
    if kept == 0.0:
        raise EmptyPostselectionError(
            "no probability weight satisfied the AF-wire condition",
            raw_counts=data.counts,
        )
    kept_events = round(kept * data.total_count) if data.total_count else None
    return Distribution(
        n_atoms=n_vertices,
        probabilities={i: p / kept for i, p in base_probs.items()},
        total_count=kept_events,
        kept_fraction=kept,
    )


def project_wires_af(state_or_density: np.ndarray, wg: WiredGraph) -> Distribution:
    """Exact (shot-free) post-selected distribution over base-vertex configs."""
    probs = _probabilities_of(state_or_density)
    n = wg.num_atoms
    if probs.shape[0] != 2**n:
        raise ValueError(f"state dimension {probs.shape[0]} does not match {n} atoms")
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"input not normalized (weight {total})")
    mask = _af_config_mask(wg)
    n_vertices = wg.base.num_vertices
    values = np.arange(2**n, dtype=np.int64)
    base_values = values[mask] & ((1 << n_vertices) - 1)
    marginal = np.bincount(base_values, weights=probs[mask], minlength=2**n_vertices)
    kept = marginal.sum()
    if kept <= 0.0:
        raise EmptyPostselectionError("state has no AF-wire weight")
    marginal /= kept
    nonzero = np.flatnonzero(marginal > 0.0)
    return Distribution(
        n_atoms=n_vertices,
        probabilities={int(v) + 1: float(marginal[v]) for v in nonzero},
        total_count=None,
        kept_fraction=float(kept),
    )


def mis_probability(dist: Distribution, graph: Graph | WiredGraph) -> tuple[float, float]:
    """Summed probability of the maximum independent sets, with counting error."""
    p = sum(dist.probability(i) for i in mis_set(graph))
    if dist.total_count:
        err = math.sqrt(p * (1.0 - p) / dist.total_count)
    else:
        err = 0.0
    return p, err


def survival(t_s: float, t0_s: float) -> float:
    """Single-atom survival probability exp(-t/t0) over the rearrangement time."""
    if t0_s <= 0:
        raise ValueError("trap lifetime must be positive")
    return math.exp(-t_s / t0_s)


def rearrangement_probability(p_single: float, n_prime: int) -> float:
    """Probability that all N' atoms survive rearrangement: p^N'."""
    if not 0.0 <= p_single <= 1.0:
        raise ValueError("survival probability must be in [0, 1]")
    return p_single**n_prime


def required_shots(p01: float, p10: float, n_prime: int, p_g: float) -> float:
    """Shots needed to resolve the ground peak from single-flip ghosts.

    Solves |P_g' - P_others| = sqrt(P_g'(1-P_g')/M) with
    P_g' = (1-p01)^(N'/2) (1-p10)^(N'/2) P_g and
    P_others = p01 (1-p01)^(N'/2-1) (1-p10)^(N'/2) P_g.
    """
    for p in (p01, p10):
        if not 0.0 <= p < 1.0:
            raise ValueError("flip probabilities must be in [0, 1)")
    if not 0.0 < p_g <= 1.0:
        raise ValueError("ground-state probability must be in (0, 1]")
    half = n_prime / 2.0
    keep = (1.0 - p01) ** half * (1.0 - p10) ** half
    p_g_prime = keep * p_g
    p_others = p01 * (1.0 - p01) ** (half - 1.0) * (1.0 - p10) ** half * p_g
    gap = p_g_prime - p_others
    if gap == 0.0:
        raise UnboundedShotsError("ghost peak equals ground peak; no M separates them")
    return p_g_prime * (1.0 - p_g_prime) / gap**2
