import numpy as np
import pytest

from cqsim.concentration import word_index
from cqsim.protocol import (
    Rates,
    build_simulation_code,
    default_rates,
    derandomize,
    estimate_simulation_error,
    exact_simulated_channel,
    joint_state_distance,
    naive_baseline,
    rate_constant,
    simulate_once,
    word_channel,
    word_prior,
)
from cqsim.qinfo import (
    Ensemble,
    apply_channel,
    classical_mutual_information,
    holevo_information,
    ket,
    projector,
    shannon_entropy,
    theorem1_region,
)
from cqsim.typicality import GuardExceeded

ORTHO = Ensemble([0.5, 0.5], np.stack([projector(ket(0, 2)), projector(ket(1, 2))]))
ZERO = Rates(0.0, 0.0, 0.0)


def test_default_rates_formulas(ref, bsc):
    delta = 0.02
    ext = apply_channel(ref, bsc)
    c = shannon_entropy(ext.q)  # c of q equals H(q)
    assert rate_constant(ref, bsc) == pytest.approx(c)
    ixy = classical_mutual_information(ext.joint)
    iyb = holevo_information(ext.induced)
    hyx = shannon_entropy(ext.joint) - 1.0
    r = default_rates(ref, bsc, delta)
    assert r.R == pytest.approx(ixy - iyb + 4 * c * delta)
    assert r.C == pytest.approx(hyx - c * delta)
    assert r.S == pytest.approx(iyb - c * delta)
    with pytest.raises(ValueError):
        default_rates(ref, bsc, 0.0)


def test_rates_margin_and_clamp():
    r = Rates(0.2, 0.05, 0.08).with_margin(0.1)
    assert (r.R, r.C, r.S) == pytest.approx((0.3, 0.15, 0.0))
    assert Rates(-1, 0.5, -2).clamped() == Rates(0.0, 0.5, 0.0)


def test_single_codeword_code(ref, bsc, rng):
    code = build_simulation_code(ref, bsc, 1, ZERO, rng)
    assert code.shape == (1, 1, 1)
    np.testing.assert_allclose(code.encoders, 1.0)
    out = simulate_once(code, rng)
    np.testing.assert_array_equal(out.y_tilde, code.codebook[0, 0, 0])
    np.testing.assert_array_equal(out.y_hat, code.codebook[0, 0, 0])
    sim = exact_simulated_channel(code)
    target = np.zeros(2)
    target[word_index(code.codebook[0, 0, 0], 2)[0]] = 1.0
    np.testing.assert_allclose(sim.alice, np.tile(target, (2, 1)), atol=1e-12)


def test_single_codeword_matches_q_sampling(ref, bsc):
    q = apply_channel(ref, bsc).q
    draws = [
        build_simulation_code(ref, bsc, 1, ZERO, np.random.default_rng(s)).codebook[0, 0, 0, 0]
        for s in range(400)
    ]
    assert abs(np.mean(draws) - q[1]) <= 4 * np.sqrt(q[1] * q[0] / 400)


def full_orthogonal_code(eps: float):
    """Identity-W code on orthogonal states whose single bin holds every 2-letter word once."""
    for seed in range(200):
        code = build_simulation_code(ORTHO, np.eye(2), 2, Rates(0.0, 0.0, 1.0),
                                     np.random.default_rng(seed), eps=eps)
        if sorted(word_index(code.codebook[0, 0], 2)) == [0, 1, 2, 3]:
            return code
    raise AssertionError("no permutation codebook found")


def test_side_information_determines_output():
    code = full_orthogonal_code(0.15)
    sim = exact_simulated_channel(code)
    idx = np.arange(4)
    # Bob's estimate always equals the source word
    np.testing.assert_allclose(sim.joint.sum(axis=1)[idx, idx], 1.0, atol=1e-12)
    rng = np.random.default_rng(1)
    for _ in range(200):
        out = simulate_once(code, rng)
        np.testing.assert_array_equal(out.y_hat, out.xn)


def test_perfect_case_has_vanishing_error():
    code = full_orthogonal_code(1e-9)
    sim = exact_simulated_channel(code)
    idx = np.arange(4)
    off = sim.joint.copy()
    off[:, idx, idx] = 0
    assert off.max() <= 1e-8
    rep = estimate_simulation_error(code, 0, None, joint_state=False)
    assert rep.classical <= 1e-8


def test_reference_code_builds_within_guard(ref, bsc, rng):
    rates = default_rates(ref, bsc, 0.02).with_margin(0.1)
    code = build_simulation_code(ref, bsc, 6, rates, rng)
    L, Mm, Ns = code.shape
    assert (L, Mm, Ns) == (2 ** int(np.ceil(6 * rates.C)), 2 ** int(np.ceil(6 * rates.R)),
                           2 ** int(np.ceil(6 * rates.S)))
    np.testing.assert_allclose(code.encoders.sum(axis=2), 1.0, atol=1e-10)


def test_outcome_invariants_fuzz(ref, bsc):
    rng = np.random.default_rng(9)
    code = build_simulation_code(ref, bsc, 3, default_rates(ref, bsc, 0.02).with_margin(0.1), rng)
    L, Mm, Ns = code.shape
    for _ in range(1000):
        out = simulate_once(code, rng)
        assert 0 <= out.l < L and 0 <= out.m < Mm and 0 <= out.s < Ns and 0 <= out.s_prime < Ns
        np.testing.assert_array_equal(out.y_tilde, code.decode(out.l, out.m, out.s))
        np.testing.assert_array_equal(out.y_hat, code.decode(out.l, out.m, out.s_prime))
        assert not out.failed or out.s_prime == 0
        if out.s == out.s_prime:
            np.testing.assert_array_equal(out.y_tilde, out.y_hat)
        assert np.trace(out.post_state).real == pytest.approx(1.0)
        assert 0.0 <= out.disturbance <= 1.0 + 1e-12


def test_exact_channel_is_stochastic(ref, bsc, rng):
    code = build_simulation_code(ref, bsc, 2, default_rates(ref, bsc, 0.02).with_margin(0.1), rng)
    sim = exact_simulated_channel(code)
    np.testing.assert_allclose(sim.alice.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(sim.joint.sum(axis=(1, 2)), 1.0, atol=1e-12)
    np.testing.assert_allclose(sim.joint.sum(axis=2), sim.alice, atol=1e-12)


def test_word_helpers():
    w = np.array([[0.9, 0.1], [0.2, 0.8]])
    wn = word_channel(w, 2)
    assert wn[1, 2] == pytest.approx(w[0, 1] * w[1, 0])
    np.testing.assert_allclose(word_prior(np.array([0.3, 0.7]), 2), [0.09, 0.21, 0.21, 0.49])


def test_error_far_below_region(ref, bsc):
    errs = [
        estimate_simulation_error(build_simulation_code(ref, bsc, 4, Rates(0, 0, 0.3), np.random.default_rng(s)),
                                  0, None, joint_state=False).classical
        for s in range(5)
    ]
    assert min(errs) >= 0.3


def test_region_separation(ref, bsc):
    base = default_rates(ref, bsc, 0.02).with_margin(0.1)
    low = Rates(0.5 * theorem1_region(ref, bsc).r_min, base.C, base.S)
    wins = 0
    for s in range(20):
        a = build_simulation_code(ref, bsc, 6, base, np.random.default_rng(s))
        b = build_simulation_code(ref, bsc, 6, low, np.random.default_rng(s))
        ea = estimate_simulation_error(a, 0, None, joint_state=False).classical
        eb = estimate_simulation_error(b, 0, None, joint_state=False).classical
        wins += ea < eb
    assert wins >= 18


def test_joint_state_distance_bounds(ref, bsc, rng):
    code = build_simulation_code(ref, bsc, 2, default_rates(ref, bsc, 0.02).with_margin(0.1), rng)
    rep = estimate_simulation_error(code, 50, rng)
    assert rep.exact
    assert rep.joint_state is not None
    # tracing out Bob can only shrink the distance
    assert rep.classical <= rep.joint_state + 1e-10
    assert rep.joint_state <= 2.0 + 1e-10
    big = build_simulation_code(ref, bsc, 4, ZERO, rng)
    with pytest.raises(GuardExceeded):
        joint_state_distance(big)


def test_perfect_simulation_has_zero_joint_distance(rng):
    w = np.array([[1.0, 0.0], [1.0, 0.0]])
    code = build_simulation_code(ORTHO, w, 2, ZERO, rng)
    assert joint_state_distance(code) == pytest.approx(0.0, abs=1e-12)


def test_derandomize_improves_median(ref, bsc):
    rates = default_rates(ref, bsc, 0.02).with_margin(0.1)
    single, best = [], []
    for seed in range(20):
        code, score, scores = derandomize(ref, bsc, 4, rates, 8, np.random.default_rng(seed))
        assert score == min(scores)
        single.append(scores[0])
        best.append(score)
    assert np.median(best) < np.median(single)


def test_derandomize_is_deterministic(ref, bsc):
    rates = default_rates(ref, bsc, 0.02).with_margin(0.1)
    a = derandomize(ref, bsc, 2, rates, 3, np.random.default_rng(4))
    b = derandomize(ref, bsc, 2, rates, 3, np.random.default_rng(4))
    assert a[2] == b[2]
    np.testing.assert_array_equal(a[0].codebook, b[0].codebook)


def test_naive_baseline_comparison_row(ref, bsc):
    delta = 0.1
    rep = naive_baseline(ref, bsc, 10, delta)
    ext = apply_channel(ref, bsc)
    c = rate_constant(ref, bsc)
    hyx = shannon_entropy(ext.joint) - 1.0
    assert rep.rate_gap == pytest.approx(holevo_information(ext.induced) + hyx - 4 * c * delta)
    assert 0.0 <= rep.error <= 2.0
    assert rep.rate <= 1.0


def test_exact_channel_matches_monte_carlo(ref, bsc):
    rng = np.random.default_rng(21)
    code = build_simulation_code(ref, bsc, 2, default_rates(ref, bsc, 0.02).with_margin(0.1), rng)
    sim = exact_simulated_channel(code)
    xn = np.array([0, 1])
    x = word_index(xn, 2)[0]
    trials = 3000
    counts = np.zeros(4)
    for _ in range(trials):
        counts[word_index(simulate_once(code, rng, xn=xn).y_tilde, 2)[0]] += 1
    p = sim.alice[x]
    se = np.sqrt(p * (1 - p) / trials)
    assert np.all(np.abs(counts / trials - p) <= 3 * se + 1e-9)


def test_rates_zero_outputs_follow_codebook(ref, bsc, rng):
    code = build_simulation_code(ref, bsc, 3, ZERO, rng)
    for _ in range(20):
        out = simulate_once(code, rng)
        np.testing.assert_array_equal(out.y_hat, code.codebook[0, 0, 0])
        assert out.s == out.s_prime == 0
