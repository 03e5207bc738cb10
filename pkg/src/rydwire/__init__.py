"""Rydberg-atom quantum-wire simulations of Ising spins on Platonic graphs."""

from .graphs import (
    Graph,
    ScalingRecord,
    UnsupportedGraphError,
    Wire,
    WiredGraph,
    platonic_graph,
    scaling_point,
    strip_wires,
    wire_platonic,
)
from .layout import (
    C6_DEFAULT,
    OMEGA0,
    PhysicalParams,
    Layout,
    blockade_radius,
    calibrate_c6,
    derive_adjacency,
    effective_rabi,
    interaction_strength,
    k4_family_layout,
    pairwise_couplings,
    table1_layout,
)
from .hamiltonian import (
    HamiltonianParams,
    PairwiseCoupling,
    UniformCoupling,
    apply_hamiltonian,
    build_dense,
    classical_energy,
    decode,
    encode,
    physical_coupling,
    uniform_coupling,
)
from .spectrum import (
    PhaseRegion,
    classical_ground_configs,
    ground_state,
    mis_set,
    phase_diagram,
    reference_state,
)
from .evolution import (
    NoiseModel,
    SweepSchedule,
    default_schedule,
    evolve_density,
    evolve_pure,
    evolve_trajectories,
    schedule_value,
)
from .measure import (
    Distribution,
    ShotSet,
    af_condition,
    apply_detection_errors,
    mis_probability,
    postselect_af,
    project_wires_af,
    rearrangement_probability,
    required_shots,
    sample_shots,
    survival,
)

__version__ = "0.1.0"
