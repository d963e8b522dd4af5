import numpy as np
import pytest

from cqsim.qinfo import InvariantError, mutual_information, conditional_mutual_information, von_neumann_entropy, partial_trace
from cqsim.redistribution import (
    FourPartyPureState,
    RatePoint,
    bell_on_bhat_b,
    fqrs_corner,
    fqsw_corner,
    haar_state,
    outer_bound,
    product_state,
    region_report,
)


def test_norm_invariant():
    with pytest.raises(InvariantError):
        FourPartyPureState(np.ones((1, 1, 2, 2)))
    with pytest.raises(InvariantError):
        FourPartyPureState(np.ones((2, 2)) / 2)


def test_product_state_bounds():
    psi = product_state([2, 2, 2, 2])
    assert outer_bound(psi) == pytest.approx((0.0, 0.0), abs=1e-12)
    rs = fqrs_corner(psi)
    assert (rs.Q, rs.E) == pytest.approx((0.0, 0.0), abs=1e-12)


def test_bell_pair_on_bhat_b():
    psi = bell_on_bhat_b()
    assert outer_bound(psi) == pytest.approx((0.0, -1.0), abs=1e-12)
    sw = fqsw_corner(psi)
    assert (sw.Q, sw.E) == pytest.approx((0.0, -1.0), abs=1e-12)
    rep = region_report(psi)
    assert rep.a_hat_trivial and rep.fqsw_tight


def test_trivial_a_hat_makes_fqsw_tight():
    rng = np.random.default_rng(2)
    for _ in range(50):
        psi = haar_state([2, 1, 2, 3], rng)
        rep = region_report(psi)
        assert rep.fqsw_tight is True
        assert rep.fqrs_tight is None
        sw = rep.corners[0]
        rho = psi.density()
        assert sw.Q == pytest.approx(0.5 * mutual_information(rho, psi.dims, [2], [0]), abs=1e-10)


def test_trivial_b_makes_fqrs_tight():
    rng = np.random.default_rng(3)
    for _ in range(50):
        psi = haar_state([2, 3, 2, 1], rng)
        rep = region_report(psi)
        assert rep.fqrs_tight is True
        assert rep.fqsw_tight is None
        rs = rep.corners[1]
        h_bhat = von_neumann_entropy(partial_trace(psi.density(), psi.dims, [2]))
        assert rs.Q + rs.E == pytest.approx(h_bhat, abs=1e-10)


def test_random_states_contain_both_corners():
    rng = np.random.default_rng(4)
    dims = [2, 2, 2, 2]
    for _ in range(1000):
        psi = haar_state(dims, rng)
        rep = region_report(psi)
        assert rep.q_min >= -1e-9
        for corner in rep.corners:
            assert rep.contains(corner)
        rho = psi.density()
        lhs = mutual_information(rho, dims, [2], [0, 1]) - mutual_information(rho, dims, [2], [1])
        assert lhs == pytest.approx(conditional_mutual_information(rho, dims, [2], [0], [1]), abs=1e-9)


def test_contains_rejects_points_below_bound():
    rep = region_report(bell_on_bhat_b())
    assert not rep.contains(RatePoint(0.0, -1.5, "probe"))
    assert not rep.contains(RatePoint(-0.1, 2.0, "probe"))
    assert rep.contains(RatePoint(0.0, -1.0, "probe"))


def test_labels_and_generic_flags():
    rep = region_report(haar_state([2, 2, 2, 2], np.random.default_rng(5)))
    assert [c.label for c in rep.corners] == ["fqsw", "fqrs"]
    assert rep.fqsw_tight is None and rep.fqrs_tight is None
