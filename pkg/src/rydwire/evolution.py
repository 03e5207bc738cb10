"""Quasi-adiabatic sweeps and time evolution with optional dephasing noise.

The drive follows the three-stage piecewise-linear protocol: Rabi ramp-up at
fixed negative detuning, detuning ramp at full Rabi drive, Rabi ramp-down at
the final detuning.  Pure states are propagated with short-step Lanczos
exponentials of the midpoint Hamiltonian; density operators integrate the
dephasing Lindbladian with fixed-step RK4; trajectories unravel the same
generator with diagonal jump operators.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .graphs import UnsupportedGraphError
from .layout import TWO_PI, OMEGA0
from .hamiltonian import (
    Coupling,
    apply_operator,
    check_normalized,
    excitation_counts,
    pair_energies,
)

MAX_DENSITY_ATOMS = 10
_DENSE_STEP_DIM = 256  # trajectories use per-step dense propagators below this

DETECT_P01 = 0.12
DETECT_P10 = 0.09
# the reported simulations mention laser phase noise without a rate; this
# default magnitude is a tunable placeholder, not a published value
DEFAULT_DEPHASING = TWO_PI * 0.05


@dataclass(frozen=True)
class SweepSchedule:
    """Three-stage (Omega, Delta) ramp; times in us, frequencies angular."""

    t1: float
    t2: float
    tf: float
    omega0: float
    delta_i: float
    delta_f: float

    def __post_init__(self):
        if not 0 < self.t1 < self.t2 < self.tf:
            raise ValueError(f"need 0 < t1 < t2 < tf, got {self.t1}, {self.t2}, {self.tf}")

    def to_json(self) -> str:
        doc = {
            "t1_us": self.t1,
            "t2_us": self.t2,
            "tf_us": self.tf,
            "omega0_mhz": self.omega0 / TWO_PI,
            "delta_i_mhz": self.delta_i / TWO_PI,
            "delta_f_mhz": self.delta_f / TWO_PI,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "SweepSchedule":
        doc = json.loads(text)
        return SweepSchedule(
            t1=doc["t1_us"],
            t2=doc["t2_us"],
            tf=doc["tf_us"],
            omega0=TWO_PI * doc["omega0_mhz"],
            delta_i=TWO_PI * doc["delta_i_mhz"],
            delta_f=TWO_PI * doc["delta_f_mhz"],
        )


def schedule_value(s: SweepSchedule, t: float) -> tuple[float, float]:
    """(Omega, Delta) at time t; exact piecewise-linear interpolation."""
    if not 0.0 <= t <= s.tf:
        raise ValueError(f"t={t} outside [0, {s.tf}]")
    if t <= s.t1:
        return s.omega0 * t / s.t1, s.delta_i
    if t <= s.t2:
        frac = (t - s.t1) / (s.t2 - s.t1)
        return s.omega0, s.delta_i + (s.delta_f - s.delta_i) * frac
    return s.omega0 * (s.tf - t) / (s.tf - s.t2), s.delta_f


def default_schedule(graph_name: str) -> SweepSchedule:
    """The experimental sweep: tf=4 us, t1=tf/10, t2=tf-t1, Delta -3 -> Delta_f."""
    if graph_name == "tetrahedron":
        delta_f = TWO_PI * 2.0
    elif graph_name in ("cube", "octahedron"):
        delta_f = TWO_PI * 3.0
    else:
        raise UnsupportedGraphError(f"no default schedule for {graph_name!r}")
    return SweepSchedule(
        t1=0.4, t2=3.6, tf=4.0,
        omega0=OMEGA0, delta_i=-TWO_PI * 3.0, delta_f=delta_f,
    )


@dataclass(frozen=True)
class NoiseModel:
    """Dephasing rate (collective unless per_atom) plus readout flip rates."""

    dephasing_rate: float = 0.0
    per_atom: bool = False
    detect_p01: float = 0.0
    detect_p10: float = 0.0

    def __post_init__(self):
        if self.dephasing_rate < 0:
            raise ValueError("dephasing rate must be nonnegative")
        for p in (self.detect_p01, self.detect_p10):
            if not 0.0 <= p <= 1.0:
                raise ValueError("detection probabilities must be in [0, 1]")


NOISELESS = NoiseModel()


def default_noise(dephasing_rate: float = DEFAULT_DEPHASING) -> NoiseModel:
    return NoiseModel(
        dephasing_rate=dephasing_rate,
        per_atom=False,
        detect_p01=DETECT_P01,
        detect_p10=DETECT_P10,
    )


def _expm_lanczos(
    diag: np.ndarray,
    half_omega: float,
    n_atoms: int,
    v: np.ndarray,
    dt: float,
    tol: float = 1e-12,
    m_max: int = 24,
) -> np.ndarray:
    """exp(-i dt H) v for the Hermitian H = diag + half_omega * sum_i sx_i."""

    def matvec(x):
        return apply_operator(diag, half_omega, n_atoms, x)

    beta0 = np.linalg.norm(v)
    basis = [v / beta0]
    alphas: list[float] = []
    betas: list[float] = []
    y_prev = None
    m_max = min(m_max, v.shape[0])
    for j in range(m_max):
        w = matvec(basis[j])
        a = np.vdot(basis[j], w).real
        alphas.append(a)
        w = w - a * basis[j]
        if j > 0:
            w = w - betas[j - 1] * basis[j - 1]
        b = np.linalg.norm(w)
        # convergence: the e1-column of exp(-i dt T) has stabilized
        if b < 1e-14 * max(1.0, abs(a)) or j == m_max - 1:
            break
        if j >= 3 and j % 2 == 1:
            ev, uv = eigh_tridiagonal(np.array(alphas), np.array(betas))
            y = uv @ (np.exp(-1j * dt * ev) * uv[0, :])
            if y_prev is not None:
                pad = np.zeros(len(y), dtype=complex)
                pad[: len(y_prev)] = y_prev
                if np.linalg.norm(y - pad) <= tol:
                    break
            y_prev = y
        betas.append(b)
        basis.append(w / b)
    ev, uv = eigh_tridiagonal(np.array(alphas), np.array(betas))
    y = uv @ (np.exp(-1j * dt * ev) * uv[0, :])
    out = np.zeros_like(v)
    for coeff, vec in zip(y, basis):
        out += coeff * vec
    return beta0 * out


def evolve_pure(
    initial: np.ndarray,
    schedule: SweepSchedule,
    coupling: Coupling,
    dt_us: float = 1e-3,
    krylov_tol: float = 1e-12,
) -> np.ndarray:
    """Integrate i d|psi>/dt = H(t)|psi> across the full sweep.

    Fixed steps with the Hamiltonian sampled at each step's midpoint; each
    step is a Lanczos matrix exponential, so the propagation is unitary up to
    roundoff.
    """
    check_normalized(initial)
    n = coupling.n_atoms
    if initial.shape != (2**n,):
        raise ValueError(f"state dimension {initial.shape} does not match {n} atoms")
    n_steps = max(1, math.ceil(schedule.tf / dt_us))
    dt = schedule.tf / n_steps
    pairs = pair_energies(coupling)
    counts = excitation_counts(n)
    psi = initial.astype(np.complex128)
    for step in range(n_steps):
        omega, delta = schedule_value(schedule, (step + 0.5) * dt)
        diag = pairs - delta * counts
        if omega == 0.0:
            psi = np.exp(-1j * dt * diag) * psi
        else:
            psi = _expm_lanczos(diag, omega / 2.0, n, psi, dt, tol=krylov_tol)
    return psi


def _dephasing_matrix(n_atoms: int, noise: NoiseModel) -> np.ndarray | None:
    """Elementwise dissipator weights W: d(rho_ij)/dt += W_ij rho_ij.

    Diagonal jump operators give W_ij = -gamma/2 (k_i - k_j)^2 for the
    collective mode and -gamma/2 Hamming(i, j) for per-atom dephasing.
    """
    if noise.dephasing_rate == 0.0:
        return None
    g = noise.dephasing_rate
    if noise.per_atom:
        values = np.arange(2**n_atoms, dtype=np.uint32)
        ham = np.bitwise_count(values[:, None] ^ values[None, :]).astype(np.float64)
        return -0.5 * g * ham
    k = excitation_counts(n_atoms).astype(np.float64)
    return -0.5 * g * (k[:, None] - k[None, :]) ** 2


def _flip_rows(rho: np.ndarray, n_atoms: int) -> np.ndarray:
    t = rho.reshape((2,) * n_atoms + (-1,))
    out = np.zeros_like(t)
    for axis in range(n_atoms):
        out += np.flip(t, axis)
    return out.reshape(rho.shape)


def _flip_cols(rho: np.ndarray, n_atoms: int) -> np.ndarray:
    t = rho.reshape((-1,) + (2,) * n_atoms)
    out = np.zeros_like(t)
    for axis in range(n_atoms):
        out += np.flip(t, axis + 1)
    return out.reshape(rho.shape)


def evolve_density(
    initial: np.ndarray,
    schedule: SweepSchedule,
    noise: NoiseModel,
    coupling: Coupling,
    dt_us: float = 1e-3,
) -> np.ndarray:
    """Integrate the Lindblad master equation; returns the final density operator.

    ``initial`` may be a state vector or a density matrix.  The dissipator
    uses L = sqrt(gamma) * sum_i n_i (collective) or per-atom sqrt(gamma) n_i.
    """
    n = coupling.n_atoms
    if n > MAX_DENSITY_ATOMS:
        raise ValueError(f"density evolution limited to {MAX_DENSITY_ATOMS} atoms")
    dim = 2**n
    if initial.ndim == 1:
        check_normalized(initial)
        rho = np.outer(initial, initial.conj()).astype(np.complex128)
    else:
        rho = initial.astype(np.complex128)
    if rho.shape != (dim, dim):
        raise ValueError(f"density shape {rho.shape} does not match {n} atoms")

    pairs = pair_energies(coupling)
    counts = excitation_counts(n)
    w = _dephasing_matrix(n, noise)

    def rhs(t, r):
        omega, delta = schedule_value(schedule, min(t, schedule.tf))
        diag = pairs - delta * counts
        out = -1j * (diag[:, None] * r - r * diag[None, :])
        if omega != 0.0:
            out += (-1j * omega / 2.0) * (_flip_rows(r, n) - _flip_cols(r, n))
        if w is not None:
            out += w * r
        return out

    n_steps = max(1, math.ceil(schedule.tf / dt_us))
    dt = schedule.tf / n_steps
    for step in range(n_steps):
        t = step * dt
        k1 = rhs(t, rho)
        k2 = rhs(t + dt / 2.0, rho + (dt / 2.0) * k1)
        k3 = rhs(t + dt / 2.0, rho + (dt / 2.0) * k2)
        k4 = rhs(t + dt, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho


def populations(state_or_density: np.ndarray) -> np.ndarray:
    if state_or_density.ndim == 1:
        return np.abs(state_or_density) ** 2
    return np.real(np.diag(state_or_density)).copy()


def evolve_trajectories(
    initial: np.ndarray,
    schedule: SweepSchedule,
    noise: NoiseModel,
    coupling: Coupling,
    n_traj: int,
    seed: int,
    dt_us: float = 1e-3,
) -> np.ndarray:
    """Jump unraveling of the dephasing Lindbladian; returns (n_traj, 2^N) states.

    Each step Strang-splits the no-jump evolution into half decay, unitary
    midpoint step, half decay, then draws a jump with the accumulated norm
    loss.  Random numbers come from streams keyed on (seed, step), so the
    ensemble is reproducible bit for bit for a given (seed, n_traj).
    """
    if n_traj < 1:
        raise ValueError("need at least one trajectory")
    check_normalized(initial)
    n = coupling.n_atoms
    dim = 2**n
    if initial.shape != (dim,):
        raise ValueError(f"state dimension {initial.shape} does not match {n} atoms")

    pairs = pair_energies(coupling)
    counts = excitation_counts(n).astype(np.float64)
    gamma = noise.dephasing_rate
    # diagonal of sum_k L_k^dag L_k
    decay_diag = gamma * (counts if noise.per_atom else counts**2)
    bit_masks = None
    if noise.per_atom:
        values = np.arange(dim, dtype=np.uint32)
        bit_masks = [((values >> (n - 1 - a)) & 1).astype(np.float64) for a in range(n)]

    n_steps = max(1, math.ceil(schedule.tf / dt_us))
    dt = schedule.tf / n_steps
    half_decay = np.exp(-(dt / 4.0) * decay_diag)
    states = np.tile(initial.astype(np.complex128), (n_traj, 1))

    use_dense = dim <= _DENSE_STEP_DIM
    flip_targets = np.arange(dim)[None, :] ^ (1 << (n - 1 - np.arange(n)))[:, None]

    for step in range(n_steps):
        omega, delta = schedule_value(schedule, (step + 0.5) * dt)
        diag = pairs - delta * counts
        states *= half_decay[None, :]
        if omega == 0.0:
            states *= np.exp(-1j * dt * diag)[None, :]
        elif use_dense:
            h = np.diag(diag)
            for row in flip_targets:
                h[np.arange(dim), row] += omega / 2.0
            ev, uv = np.linalg.eigh(h)
            prop = (uv * np.exp(-1j * dt * ev)) @ uv.conj().T
            states = states @ prop.T
        else:
            for j in range(n_traj):
                states[j] = _expm_lanczos(diag, omega / 2.0, n, states[j], dt)
        states *= half_decay[None, :]

        if gamma > 0.0:
            rng = np.random.default_rng([seed, step])
            draws = rng.random((n_traj, 2))
            norms_sq = np.einsum("ij,ij->i", states.real, states.real) + np.einsum(
                "ij,ij->i", states.imag, states.imag
            )
            jumping = np.flatnonzero(draws[:, 0] < 1.0 - norms_sq)
            for j in jumping:
                psi = states[j]
                if noise.per_atom:
                    weights = np.array(
                        [np.sum(np.abs(psi) ** 2 * m) for m in bit_masks]
                    )
                    total = weights.sum()
                    if total == 0.0:
                        continue  # no excitation to dephase; jump is a no-op
                    atom = int(np.searchsorted(np.cumsum(weights / total), draws[j, 1]))
                    psi = psi * bit_masks[min(atom, n - 1)]
                else:
                    psi = psi * counts
                nrm = np.linalg.norm(psi)
                if nrm == 0.0:
                    continue
                states[j] = psi / nrm
            surviving = np.ones(n_traj, dtype=bool)
            surviving[jumping] = False
            states[surviving] /= np.sqrt(norms_sq[surviving])[:, None]
        else:
            norms = np.linalg.norm(states, axis=1)
            states /= norms[:, None]
    return states


def trajectory_populations(ensemble: np.ndarray) -> np.ndarray:
    """Ensemble-averaged configuration probabilities."""
    return np.mean(np.abs(ensemble) ** 2, axis=0)
