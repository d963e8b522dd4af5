import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqsim.qinfo import (
    Ensemble,
    InvariantError,
    apply_channel,
    as_channel,
    as_density,
    as_distribution,
    binary_symmetric_channel,
    classical_mutual_information,
    conditional_entropy,
    conditional_mutual_information,
    embed_cq,
    fannes_bound,
    holevo_information,
    ket,
    mutual_information,
    partial_trace,
    projector,
    random_density_matrix,
    random_pure_state,
    shannon_entropy,
    tensor_power_states,
    theorem1_region,
    trace_distance,
    von_neumann_entropy,
)

from conftest import h2, loop_partial_trace


def test_validators_reject_bad_inputs():
    with pytest.raises(InvariantError):
        as_distribution([0.5, 0.6])
    with pytest.raises(InvariantError):
        as_distribution([1.2, -0.2])
    with pytest.raises(InvariantError):
        as_channel([[0.5, 0.4], [0.5, 0.5]])
    with pytest.raises(InvariantError):
        as_density(np.array([[1, 1], [0, 0]]))
    with pytest.raises(InvariantError):
        as_density(np.diag([1.5, -0.5]))
    with pytest.raises(InvariantError):
        Ensemble([0.5, 0.5], np.stack([np.eye(2) / 2]))


def test_entropies_of_simple_states():
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(1.0)
    assert shannon_entropy([1.0, 0.0]) == 0.0
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    assert von_neumann_entropy(projector([1, 1j])) == pytest.approx(0.0, abs=1e-12)


def test_partial_trace_matches_loop_oracle(rng):
    dims = [2, 3, 2]
    rho = random_density_matrix(12, rng)
    for keep in ([0], [1], [2], [0, 2], [1, 2], [0, 1]):
        np.testing.assert_allclose(partial_trace(rho, dims, keep), loop_partial_trace(rho, dims, keep), atol=1e-12)


def test_partial_trace_of_product(rng):
    a, b = random_density_matrix(2, rng), random_density_matrix(3, rng)
    np.testing.assert_allclose(partial_trace(np.kron(a, b), [2, 3], [0]), a, atol=1e-12)
    np.testing.assert_allclose(partial_trace(np.kron(a, b), [2, 3], [1]), b, atol=1e-12)


def test_bell_state_quantities():
    bell = projector((ket(0, 4) + ket(3, 4)))
    assert mutual_information(bell, [2, 2], [0], [1]) == pytest.approx(2.0)
    assert conditional_entropy(bell, [2, 2], [0], [1]) == pytest.approx(-1.0)


def test_overlapping_groups_rejected(rng):
    rho = random_density_matrix(4, rng)
    with pytest.raises(InvariantError):
        mutual_information(rho, [2, 2], [0], [0])


def test_holevo_of_reference_closed_form(ref):
    lam = (1 + 1 / np.sqrt(2)) / 2
    assert holevo_information(ref) == pytest.approx(h2(lam), abs=1e-12)
    assert holevo_information(ref) == pytest.approx(0.60088, abs=1e-5)


def test_holevo_equals_cq_mutual_information(ref):
    rho = embed_cq(ref)
    assert mutual_information(rho, [2, 2], [0], [1]) == pytest.approx(holevo_information(ref), abs=1e-12)


def test_apply_channel_induced_states_by_hand(ref, bsc):
    ext = apply_channel(ref, bsc)
    np.testing.assert_allclose(ext.q, [0.5, 0.5])
    expected0 = 0.9 * ref.states[0] + 0.1 * ref.states[1]
    np.testing.assert_allclose(ext.induced.states[0], expected0, atol=1e-12)
    np.testing.assert_allclose(ext.backward_channel(), [[0.9, 0.1], [0.1, 0.9]])


def test_theorem1_region_reference(ref, bsc):
    ext = apply_channel(ref, bsc)
    ixy = 1 - h2(0.1)
    assert classical_mutual_information(ext.joint) == pytest.approx(ixy)
    # induced states rho_y are mixtures of |0> and |+>; entropies by eigenvalues of 2x2 matrices
    iyb = h2((1 + 1 / np.sqrt(2)) / 2) - np.mean([von_neumann_entropy(s) for s in ext.induced.states])
    region = theorem1_region(ref, bsc)
    assert region.r_min == pytest.approx(ixy - iyb, abs=1e-12)
    assert region.sum_min == pytest.approx(1 - iyb, abs=1e-12)
    assert region.r_min == pytest.approx(0.20464, abs=1e-5)
    assert region.sum_min == pytest.approx(0.67364, abs=1e-5)
    assert region.contains(region.r_min, region.sum_min - region.r_min)
    assert not region.contains(region.r_min - 0.01, 1.0)


def test_identity_channel_orthogonal_states_region():
    e = Ensemble([0.3, 0.7], np.stack([projector(ket(0, 2)), projector(ket(1, 2))]))
    region = theorem1_region(e, np.eye(2))
    assert region.r_min == pytest.approx(0.0, abs=1e-12)
    assert region.sum_min == pytest.approx(0.0, abs=1e-12)


def test_zero_output_symbol_keeps_valid_ensemble(ref):
    w = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    ext = apply_channel(ref, w)
    assert ext.q[2] == 0
    assert von_neumann_entropy(ext.induced.states[2]) >= 0


def test_tensor_power_states():
    s = np.stack([projector(ket(0, 2)), projector(ket(1, 2))])
    np.testing.assert_allclose(tensor_power_states(s, [1, 0]), projector(ket(2, 4)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_fannes_bound_holds(seed, d):
    r = np.random.default_rng(seed)
    rho = random_density_matrix(d, r)
    sigma = 0.9 * rho + 0.1 * random_density_matrix(d, r)
    eps = 2 * trace_distance(rho, sigma)
    if eps <= 0.25:
        assert abs(von_neumann_entropy(rho) - von_neumann_entropy(sigma)) <= fannes_bound(eps, d) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_strong_subadditivity_random(seed):
    r = np.random.default_rng(seed)
    rho = random_density_matrix(8, r)
    assert conditional_mutual_information(rho, [2, 2, 2], [0], [1], [2]) >= -1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pure_state_duality(seed):
    r = np.random.default_rng(seed)
    rho = projector(random_pure_state(8, r))
    dims = [2, 2, 2]
    h_ab = von_neumann_entropy(partial_trace(rho, dims, [0, 1]))
    h_c = von_neumann_entropy(partial_trace(rho, dims, [2]))
    assert abs(h_ab - h_c) <= 1e-9


def test_binary_symmetric_channel_rows():
    np.testing.assert_allclose(binary_symmetric_channel(0.25).sum(axis=1), 1.0)
