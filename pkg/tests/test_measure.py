"""Sampling, detection errors, AF post-selection, and the scaling formulas."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydwire.graphs import platonic_graph, wire_platonic
from rydwire.hamiltonian import basis_state, decode, encode
from rydwire.measure import (
    Distribution,
    EmptyPostselectionError,
    ShotSet,
    UnboundedShotsError,
    af_condition,
    apply_detection_errors,
    distribution_from_shots,
    mis_probability,
    postselect_af,
    project_wires_af,
    rearrangement_probability,
    required_shots,
    sample_shots,
    survival,
)
from rydwire.spectrum import reference_state


def test_sample_basis_state_constant():
    shots = sample_shots(basis_state(13, 6), m=50, seed=3)
    assert shots.n_shots == 50
    values = shots.values()
    assert np.all(values == 12)


def test_sample_unnormalized_rejected():
    with pytest.raises(ValueError):
        sample_shots(np.ones(4, dtype=complex), m=10, seed=0)


def test_sample_reference_q3_half_half():
    psi = reference_state("cube")
    shots = sample_shots(psi, m=100_000, seed=9)
    dist = distribution_from_shots(shots)
    assert set(dist.probabilities) == {86, 171}
    assert dist.probability(86) == pytest.approx(0.5, abs=0.006)


def test_sample_reference_wired_octahedron_b_weight():
    psi = reference_state("octahedron", wired=True)
    shots = sample_shots(psi, m=100_000, seed=17)
    dist = distribution_from_shots(shots)
    b2 = 41 / 243
    heavy = sorted(dist.probabilities, key=dist.probability)[-3:]
    for index in heavy:
        assert dist.probability(index) == pytest.approx(b2, abs=5e-3)


def test_sampling_deterministic():
    psi = reference_state("tetrahedron", wired=True)
    a = sample_shots(psi, m=1000, seed=7).shots
    b = sample_shots(psi, m=1000, seed=7).shots
    assert np.array_equal(a, b)


def test_detection_errors_identity_and_saturation():
    shots = ShotSet(np.zeros((100, 6), dtype=np.uint8))
    same = apply_detection_errors(shots, 0.0, 0.0, seed=1)
    assert np.array_equal(same.shots, shots.shots)
    flipped = apply_detection_errors(shots, 1.0, 0.0, seed=1)
    assert np.all(flipped.shots == 1)


def test_detection_errors_survival_fraction():
    m = 20_000
    shots = ShotSet(np.zeros((m, 6), dtype=np.uint8))
    noisy = apply_detection_errors(shots, 0.12, 0.09, seed=5)
    survived = np.all(noisy.shots == 0, axis=1).mean()
    expected = (1 - 0.12) ** 6
    sigma = math.sqrt(expected * (1 - expected) / m)
    assert abs(survived - expected) <= 4 * sigma
    flip_rate = noisy.shots.mean()
    assert abs(flip_rate - 0.12) <= 4 * math.sqrt(0.12 * 0.88 / (6 * m))


def test_af_condition_tables():
    assert af_condition([0, 1], 2) and af_condition([1, 0], 2)
    assert not af_condition([0, 0], 2) and not af_condition([1, 1], 2)
    assert af_condition([0, 1, 0, 1], 4)
    assert af_condition([1, 0, 1, 0], 4)
    assert af_condition([1, 0, 0, 1], 4)
    assert not af_condition([1, 1, 0, 0], 4)
    assert not af_condition([0, 1, 1, 0], 4)
    assert not af_condition([1, 0, 0, 0], 4)
    with pytest.raises(ValueError):
        af_condition([1, 0, 1], 3)


@given(st.integers(0, 15))
def test_af_condition_length4_matches_path_mis_predicate(value):
    bits = [(value >> (3 - k)) & 1 for k in range(4)]
    independent = all(not (a and b) for a, b in zip(bits, bits[1:]))
    expected = independent and sum(bits) == 2
    assert af_condition(bits, 4) == expected


def test_project_exact_k4_reference():
    wg = wire_platonic("tetrahedron")
    dist = project_wires_af(reference_state("tetrahedron", wired=True), wg)
    assert dist.kept_fraction == pytest.approx(12 / 32)
    assert set(dist.probabilities) == {2, 3, 5, 9}
    for index in (2, 3, 5, 9):
        assert dist.probability(index) == pytest.approx(0.25)


def test_project_exact_q3_reference():
    wg = wire_platonic("cube")
    dist = project_wires_af(reference_state("cube", wired=True), wg)
    assert set(dist.probabilities) == {86, 171}
    assert dist.probability(86) == pytest.approx(0.5)


def test_project_exact_k222_reference_full_survival():
    wg = wire_platonic("octahedron")
    dist = project_wires_af(reference_state("octahedron", wired=True), wg)
    assert dist.kept_fraction == pytest.approx(1.0)
    assert set(dist.probabilities) == {10, 19, 37}
    for index in (10, 19, 37):
        assert dist.probability(index) == pytest.approx(1 / 3)


def test_project_all_ground_state_fails_af():
    wg = wire_platonic("tetrahedron")
    with pytest.raises(EmptyPostselectionError):
        project_wires_af(basis_state(1, 6), wg)


def test_postselect_shots_matches_projection():
    wg = wire_platonic("tetrahedron")
    psi = reference_state("tetrahedron", wired=True)
    shots = sample_shots(psi, m=100_000, seed=23)
    dist = postselect_af(shots, wg)
    exact = project_wires_af(psi, wg)
    tv = 0.5 * sum(
        abs(dist.probability(i) - exact.probability(i))
        for i in set(dist.probabilities) | set(exact.probabilities)
    )
    assert tv <= 0.02
    assert dist.total_count == pytest.approx(100_000 * 12 / 32, rel=0.05)


def test_postselect_distribution_input():
    wg = wire_platonic("tetrahedron")
    psi = reference_state("tetrahedron", wired=True)
    shots = sample_shots(psi, m=5000, seed=2)
    from_shots = postselect_af(shots, wg)
    from_dist = postselect_af(distribution_from_shots(shots), wg)
    for i in set(from_shots.probabilities) | set(from_dist.probabilities):
        assert from_shots.probability(i) == pytest.approx(from_dist.probability(i))
    assert from_shots.total_count == from_dist.total_count


def test_postselect_empty_error_carries_counts():
    wg = wire_platonic("tetrahedron")
    shots = ShotSet(np.zeros((10, 6), dtype=np.uint8))
    with pytest.raises(EmptyPostselectionError) as err:
        postselect_af(shots, wg)
    assert err.value.raw_counts == {1: 10}


def test_postselection_commutes_with_wired_graph_automorphism():
    # mirror symmetry of the wired tetrahedron: swap the wire ends and both dimers
    wg = wire_platonic("tetrahedron")
    atom_perm = [1, 0, 5, 4, 3, 2]   # a<->b, 1<->4, 2<->3
    base_perm = [3, 2, 1, 0]
    psi = reference_state("tetrahedron", wired=True)
    shots = sample_shots(psi, m=20_000, seed=31)
    permuted = ShotSet(shots.shots[:, np.argsort(atom_perm)])
    dist = postselect_af(shots, wg)
    dist_p = postselect_af(permuted, wg)
    for index, p in dist.probabilities.items():
        bits = decode(index, 4)
        relabeled = [0] * 4
        for src, dst in enumerate(base_perm):
            relabeled[dst] = bits[src]
        assert dist_p.probability(encode(relabeled)) == pytest.approx(p)


def test_mis_probability_cases():
    wg = wire_platonic("cube")
    exact = project_wires_af(reference_state("cube", wired=True), wg)
    p, err = mis_probability(exact, wg.base)
    assert p == pytest.approx(1.0)
    assert err == 0.0
    uniform = Distribution(6, {i: 1 / 64 for i in range(1, 65)}, total_count=640)
    p, err = mis_probability(uniform, platonic_graph("octahedron"))
    assert p == pytest.approx(3 / 64)
    assert err == pytest.approx(math.sqrt(p * (1 - p) / 640))


def test_distribution_invariants():
    with pytest.raises(ValueError):
        Distribution(4, {1: 0.5, 2: 0.4})
    d = Distribution(4, {1: 0.5, 2: 0.5}, total_count=100)
    assert d.stderr(1) == pytest.approx(0.05)
    rows = d.to_json()
    assert '"bitstring": "0000"' in rows


def test_shotset_csv():
    shots = ShotSet(np.array([[0, 1], [1, 0]], dtype=np.uint8))
    lines = shots.to_csv().splitlines()
    assert lines[0] == "shot_index,bitstring"
    assert lines[1] == "0,01" and lines[2] == "1,10"


def test_survival_and_rearrangement():
    p = survival(0.6, 16.0)
    assert p == pytest.approx(math.exp(-0.0375))
    assert 0.96 <= p <= 0.97
    assert rearrangement_probability(1.0, 50) == 1.0
    assert rearrangement_probability(0.97, 80) == pytest.approx(0.0875, abs=5e-4)
    with pytest.raises(ValueError):
        rearrangement_probability(1.5, 10)


def test_required_shots_paper_regime():
    # ground-state yield bounded by the N'-atom assembly survival
    p = survival(0.6, 16.0)
    m25 = required_shots(0.12, 0.09, 25, rearrangement_probability(p, 25))
    m80 = required_shots(0.12, 0.09, 80, rearrangement_probability(p, 80))
    assert 50 <= m25 <= 200          # about 100
    assert 1e5 <= m80 <= 4e5         # about 2e5
    assert m80 > m25


def test_required_shots_noiseless_limit():
    m = required_shots(0.0, 0.0, 10, 0.5)
    assert m == pytest.approx(0.5 * 0.5 / 0.25)  # P_others = 0, full separation
    with pytest.raises(ValueError):
        required_shots(0.12, 0.09, 10, 0.0)


def test_required_shots_unbounded():
    # p01 = 1 - p01 has no solution when the two peaks coincide; force gap 0
    with pytest.raises(UnboundedShotsError):
        required_shots(0.5, 0.0, 2, 1.0)
