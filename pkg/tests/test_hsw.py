import numpy as np
import pytest
from scipy.stats import spearmanr

from cqsim.hsw import (
    average_error,
    build_hsw,
    confusion_matrix,
    decode_distribution,
    expected_disturbance,
    measure,
    outcome_probabilities,
    pretty_good_measurement,
    typical_projector,
)
from cqsim.qinfo import Ensemble, holevo_information, ket, projector
from cqsim.typicality import GuardExceeded

ORTHO = Ensemble([0.5, 0.5], np.stack([projector(ket(0, 2)), projector(ket(1, 2))]))


def completeness_gap(code):
    total = code.povm.sum(axis=0) + code.fail
    return np.linalg.norm(total - np.eye(code.dim), ord=2)


def test_orthogonal_states_decode_perfectly(rng):
    code = build_hsw(ORTHO, 3, 0.0, rng, codewords=np.array([[0, 0, 1], [1, 0, 1], [1, 1, 1]]))
    assert average_error(code).max == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(confusion_matrix(code)[:, :3], np.eye(3), atol=1e-12)


def test_single_codeword(rng, ref):
    code = build_hsw(ref, 2, 0.0, rng)
    assert code.size == 1
    assert average_error(code).mean == pytest.approx(0.0, abs=1e-12)
    assert completeness_gap(code) <= 1e-10


def test_single_mixed_codeword_gives_identity(rng):
    e = Ensemble([1.0], np.eye(2)[None] / 2)
    code = build_hsw(e, 2, 0.0, rng)
    np.testing.assert_allclose(code.povm[0], np.eye(4), atol=1e-12)
    m = measure(code, np.eye(4) / 4, rng)
    assert m.disturbance == pytest.approx(0.0, abs=1e-12)


def test_identical_codewords_confuse_symmetrically(rng, ref):
    code = build_hsw(ref, 2, 1.0, rng, codewords=np.array([[0, 1], [0, 1]]))
    np.testing.assert_allclose(confusion_matrix(code)[:, :2], 0.5, atol=1e-12)


def test_two_state_pgm_closed_form(rng, ref):
    code = build_hsw(ref, 1, 1.0, rng, codewords=np.array([[0], [1]]))
    overlap = 1 / np.sqrt(2)
    success = 0.5 * (1 + np.sqrt(1 - overlap**2))
    np.testing.assert_allclose(np.diag(confusion_matrix(code)[:, :2]), success, atol=1e-12)
    assert average_error(code).mean == pytest.approx(2 * (1 - success), abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_povm_invariants(n, ref):
    code = build_hsw(ref, n, 0.45, np.random.default_rng(n))
    assert completeness_gap(code) <= 1e-10
    for op in list(code.povm) + [code.fail]:
        assert np.linalg.eigvalsh(op).min() >= -1e-10
    for s in range(code.size):
        assert decode_distribution(code, s).sum() == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(IndexError):
        decode_distribution(code, code.size)


def test_pgm_on_rank_deficient_family():
    states = np.stack([projector(ket(0, 3)), projector(ket(1, 3))])
    povm, fail = pretty_good_measurement(states)
    np.testing.assert_allclose(fail, projector(ket(2, 3)), atol=1e-12)
    np.testing.assert_allclose(povm.sum(axis=0) + fail, np.eye(3), atol=1e-12)


def test_projective_measurement_on_eigenstate(rng):
    code = build_hsw(ORTHO, 2, 0.0, rng, codewords=np.array([[0, 1], [1, 1]]))
    m = measure(code, code.codeword_states[0], rng)
    assert m.outcome == 0 and not m.failed
    assert m.disturbance == pytest.approx(0.0, abs=1e-12)


def test_measure_frequencies_and_disturbance_match_exact(ref):
    rng = np.random.default_rng(5)
    code = build_hsw(ref, 2, 1.0, rng)
    state = code.codeword_states[1]
    probs = outcome_probabilities(code, state)
    draws = [measure(code, state, rng) for _ in range(4000)]
    freq = np.bincount([d.outcome for d in draws], minlength=probs.size) / len(draws)
    se = np.sqrt(probs * (1 - probs) / len(draws))
    assert np.all(np.abs(freq - probs) <= 4 * se + 1e-12)
    dist = np.array([d.disturbance for d in draws])
    assert abs(dist.mean() - expected_disturbance(code, state)) <= 4 * dist.std() / np.sqrt(len(draws)) + 1e-12


def test_measure_rejects_wrong_dimension(rng, ref):
    code = build_hsw(ref, 2, 0.5, rng)
    with pytest.raises(ValueError):
        measure(code, np.eye(2) / 2, rng)


def test_disturbance_tracks_error_across_seeds(ref):
    S = holevo_information(ref) - 0.15
    errs, dis = [], []
    for s in range(20):
        code = build_hsw(ref, 4, S, np.random.default_rng(s))
        errs.append(average_error(code).mean)
        dis.append(np.mean([expected_disturbance(code, st) for st in code.codeword_states]))
    assert spearmanr(errs, dis).statistic > 0.5


def test_typical_projector_is_projector(ref):
    proj = typical_projector(ref.average_state(), 4, 0.5)
    np.testing.assert_allclose(proj @ proj, proj, atol=1e-12)
    code = build_hsw(ref, 4, 0.45, np.random.default_rng(0), typical_delta=0.5)
    assert completeness_gap(code) <= 1e-10


def test_dimension_guard(rng, ref):
    with pytest.raises(GuardExceeded):
        build_hsw(ref, 14, 0.1, rng)
