"""Phase structure, MIS enumeration, reference states, iterative ground states."""

import math

import numpy as np
import pytest

from rydwire.graphs import platonic_graph, wire_platonic
from rydwire.hamiltonian import (
    HamiltonianParams,
    UniformCoupling,
    build_dense,
    decode,
    encode,
    uniform_coupling,
)
from rydwire.spectrum import (
    classical_ground_configs,
    ground_state,
    mis_set,
    phase_boundaries,
    phase_diagram,
    phase_diagram_csv,
    phase_diagram_json,
    reference_state,
)

# vertex-permutation generators of each base graph's automorphism group
AUTOMORPHISMS = {
    "tetrahedron": [(1, 0, 2, 3), (1, 2, 3, 0)],
    "cube": [(1, 2, 3, 0, 5, 6, 7, 4), (3, 2, 1, 0, 5, 4, 7, 6)],
    "octahedron": [(3, 1, 2, 0, 4, 5), (1, 2, 0, 4, 5, 3), (1, 0, 2, 4, 3, 5)],
}


def permute_config(index, n, perm):
    bits = decode(index, n)
    permuted = [0] * n
    for src, dst in enumerate(perm):
        permuted[dst] = bits[src]
    return encode(permuted)


def brute_force_ground(graph, delta, u):
    """Test-side oracle: explicit loop over all configurations."""
    n = graph.num_vertices
    best, configs = None, []
    for value in range(2**n):
        bits = [(value >> (n - 1 - k)) & 1 for k in range(n)]
        pairs = sum(1 for i, j in graph.edges if bits[i] and bits[j])
        e = -delta * sum(bits) + u * pairs
        if best is None or e < best - 1e-12:
            best, configs = e, [value + 1]
        elif abs(e - best) <= 1e-12:
            configs.append(value + 1)
    return tuple(sorted(configs))


def test_k4_ground_configs_by_phase():
    g = platonic_graph("tetrahedron")
    assert classical_ground_configs(g, 0.5, 1.0) == (2, 3, 5, 9)
    assert classical_ground_configs(g, -0.5, 1.0) == (1,)
    assert classical_ground_configs(g, 3.5, 1.0) == (16,)


def test_q3_ground_configs_neel():
    g = platonic_graph("cube")
    assert classical_ground_configs(g, 1.5, 1.0) == (86, 171)


def test_k222_ground_configs_mis_and_inverted():
    g = platonic_graph("octahedron")
    assert classical_ground_configs(g, 0.5, 1.0) == (10, 19, 37)
    assert classical_ground_configs(g, 2.5, 1.0) == (28, 46, 55)


@pytest.mark.parametrize("name,delta", [("tetrahedron", 0.5), ("cube", 1.5), ("octahedron", 2.5)])
def test_ground_configs_match_test_oracle(name, delta):
    g = platonic_graph(name)
    assert tuple(sorted(classical_ground_configs(g, delta, 1.0))) == brute_force_ground(g, delta, 1.0)


@pytest.mark.parametrize("name", ["tetrahedron", "cube", "octahedron"])
def test_ground_configs_automorphism_invariant(name):
    g = platonic_graph(name)
    for delta in (0.5, 1.5, 2.5):
        configs = set(classical_ground_configs(g, delta, 1.0))
        for perm in AUTOMORPHISMS[name]:
            assert {permute_config(c, g.num_vertices, perm) for c in configs} == configs


def test_phase_diagram_k4():
    regions = phase_diagram(platonic_graph("tetrahedron"))
    assert phase_boundaries(regions) == [0.0, 1.0, 2.0, 3.0]
    assert [r.excitation_count for r in regions] == [0, 1, 2, 3, 4]
    assert [len(r.config_indices) for r in regions] == [1, 4, 6, 4, 1]


def test_phase_diagram_q3():
    regions = phase_diagram(platonic_graph("cube"))
    assert phase_boundaries(regions) == [0.0, 3.0]
    assert [r.excitation_count for r in regions] == [0, 4, 8]
    assert regions[1].config_indices == (86, 171)


def test_phase_diagram_k222():
    regions = phase_diagram(platonic_graph("octahedron"))
    assert [r.excitation_count for r in regions] == [0, 2, 4, 6]
    assert regions[1].config_indices == (10, 19, 37)
    assert regions[2].config_indices == (28, 46, 55)
    # MIS / inverted-MIS tie is exactly at 2U
    assert regions[1].delta_hi_over_u == 2.0
    # exact energy comparison puts the paramagnetic onset at 4U:
    # -4d + 4 = -6d + 12 at d = 4 (the printed figure labels it 3U)
    assert phase_boundaries(regions) == [0.0, 2.0, 4.0]


def test_phase_regions_scale_with_u():
    regions = phase_diagram(platonic_graph("octahedron"), u=3.7)
    assert phase_boundaries(regions) == [0.0, 2.0, 4.0]  # boundaries are in units of U


def test_phase_ground_sets_match_interior_scan():
    g = platonic_graph("octahedron")
    for r in phase_diagram(g):
        if math.isinf(r.delta_lo_over_u) or math.isinf(r.delta_hi_over_u):
            continue
        mid = 0.5 * (r.delta_lo_over_u + r.delta_hi_over_u)
        assert tuple(sorted(classical_ground_configs(g, mid, 1.0))) == tuple(
            sorted(r.config_indices)
        )


def test_phase_diagram_serialization():
    regions = phase_diagram(platonic_graph("cube"))
    doc = phase_diagram_json(regions)
    assert '"delta_lo_over_U": null' in doc
    csv = phase_diagram_csv(regions)
    assert csv.splitlines()[0] == "delta_lo_over_U,delta_hi_over_U,excitation_count,num_configs"
    assert len(csv.splitlines()) == 1 + len(regions)


def test_mis_sets():
    assert mis_set(platonic_graph("tetrahedron")) == (2, 3, 5, 9)
    assert mis_set(platonic_graph("cube")) == (86, 171)
    assert mis_set(platonic_graph("octahedron")) == (10, 19, 37)
    assert mis_set(wire_platonic("cube")) == (26283, 39254)
    assert len(mis_set(wire_platonic("tetrahedron"))) == 8
    assert len(mis_set(wire_platonic("octahedron"))) == 9


def test_reference_states_normalized_and_supported_on_independent_sets():
    for name in ("tetrahedron", "cube", "octahedron"):
        for wired in (False, True):
            psi = reference_state(name, wired)
            assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
            graph = wire_platonic(name) if wired else platonic_graph(name)
            support = {int(v) + 1 for v in np.flatnonzero(np.abs(psi) > 0)}
            assert support <= set(mis_set(graph))


def test_reference_amplitudes_k4():
    psi = reference_state("tetrahedron")
    for index in (2, 3, 5, 9):
        assert psi[index - 1] == pytest.approx(0.5)


def test_reference_amplitudes_wired_k4():
    psi = reference_state("tetrahedron", wired=True)
    for index in (34, 35, 21, 25):  # AF-wire terms
        assert psi[index - 1] == pytest.approx(math.sqrt(3 / 32))
    for index in (6, 7, 10, 11):  # empty-wire terms
        assert psi[index - 1] == pytest.approx(math.sqrt(5 / 32))


def test_reference_wired_cube_support():
    psi = reference_state("cube", wired=True)
    support = {int(v) + 1 for v in np.flatnonzero(np.abs(psi) > 0)}
    assert support == {26283, 39254}
    assert abs(psi[26282]) == pytest.approx(1 / math.sqrt(2))


def test_reference_wired_octahedron_structure():
    psi = reference_state("octahedron", wired=True)
    a2, b2 = 20 / 243, 41 / 243
    probs = np.abs(psi) ** 2
    support = np.flatnonzero(probs > 0)
    assert len(support) == 9
    assert 3 * (2 * a2 + b2) == pytest.approx(1.0)
    values = sorted(probs[support])
    assert values[:6] == pytest.approx([a2] * 6)
    assert values[6:] == pytest.approx([b2] * 3)
    # per line (fixed vertex pattern): weight 1/3
    for verts in (9, 18, 36):
        line = [v for v in support if (v & 63) == verts]
        assert len(line) == 3
        assert probs[line].sum() == pytest.approx(1 / 3)


def test_reference_unknown_name():
    with pytest.raises(ValueError):
        reference_state("icosahedron")


def test_ground_state_single_spin():
    params = HamiltonianParams(omega=0.8, delta=0.0, coupling=UniformCoupling(1.0, (), 1))
    energy, vec = ground_state(params, tol=1e-10)
    assert energy == pytest.approx(-0.4, abs=1e-10)
    assert np.abs(vec) == pytest.approx([1 / math.sqrt(2)] * 2, abs=1e-8)
    assert np.real(vec[0] * np.conj(vec[1])) < 0


def test_ground_state_matches_dense_oracle_k4():
    g = platonic_graph("tetrahedron")
    u = 24.5
    params = HamiltonianParams(omega=4.65, delta=0.5 * u, coupling=uniform_coupling(g, u))
    energy, vec = ground_state(params, tol=1e-10)
    w, v = np.linalg.eigh(build_dense(params))
    assert energy == pytest.approx(w[0], abs=1e-8)
    assert abs(np.vdot(v[:, 0], vec)) == pytest.approx(1.0, abs=1e-8)


def test_ground_state_probabilities_track_eq3_weights():
    wg = wire_platonic("tetrahedron")
    u = 1.0
    params = HamiltonianParams(omega=1e-2 * u, delta=0.51 * u, coupling=uniform_coupling(wg, u))
    _, vec = ground_state(params, tol=1e-10)
    p = np.abs(vec) ** 2
    for index in (34, 35, 21, 25):
        assert p[index - 1] == pytest.approx(3 / 32, abs=0.01)
    for index in (6, 7, 10, 11):
        assert p[index - 1] == pytest.approx(5 / 32, abs=0.01)


def test_small_omega_ground_state_stays_on_classical_manifold():
    g = platonic_graph("octahedron")
    u = 1.0
    params = HamiltonianParams(omega=1e-2 * u, delta=0.5 * u, coupling=uniform_coupling(g, u))
    _, vec = ground_state(params, tol=1e-10)
    p = np.abs(vec) ** 2
    manifold = [i - 1 for i in classical_ground_configs(g, 0.5, u)]
    assert p[manifold].sum() > 1 - 1e-3


def test_ground_state_size_guard():
    coupling = UniformCoupling(1.0, (), 21)
    with pytest.raises(ValueError):
        ground_state(HamiltonianParams(omega=0.1, delta=0.0, coupling=coupling))
