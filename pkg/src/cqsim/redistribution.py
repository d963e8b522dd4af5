"""Rate bounds for redistributing a share of a four-party pure state.

Subsystems are ordered ``(R, A_hat, B_hat, B)``: a reference, the sender's
kept system, the transferred system and the receiver's side system.  A
trivial subsystem is a factor of dimension 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qinfo import InvariantError, conditional_entropy, conditional_mutual_information, mutual_information

R, AH, BH, B = 0, 1, 2, 3
NORM_TOL = 1e-12
BOUND_TOL = 1e-9


@dataclass(frozen=True)
class FourPartyPureState:
    """Amplitude tensor ``psi[r, a_hat, b_hat, b]`` with unit norm."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 4:
            raise InvariantError(f"amplitude tensor must have 4 axes, got {amp.ndim}")
        norm = np.linalg.norm(amp.ravel())
        if abs(norm - 1.0) > NORM_TOL:
            raise InvariantError(f"state norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_vector(cls, vec, dims) -> "FourPartyPureState":
        return cls(np.asarray(vec, dtype=complex).reshape(tuple(dims)))

    @property
    def dims(self) -> list[int]:
        return list(self.amplitudes.shape)

    def density(self) -> np.ndarray:
        v = self.amplitudes.ravel()
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class RatePoint:
    Q: float
    E: float
    label: str


@dataclass(frozen=True)
class QERegion:
    """Outer bound ``Q >= q_min``, ``Q + E >= qe_sum_min`` with the two inner corners."""

    q_min: float
    qe_sum_min: float
    corners: list[RatePoint] = field(default_factory=list)
    a_hat_trivial: bool = False
    b_trivial: bool = False
    fqsw_tight: bool | None = None
    fqrs_tight: bool | None = None

    def contains(self, point: RatePoint, tol: float = BOUND_TOL) -> bool:
        return point.Q >= self.q_min - tol and point.Q + point.E >= self.qe_sum_min - tol


def outer_bound(psi: FourPartyPureState) -> tuple[float, float]:
    """``(1/2 I(B_hat;R|A_hat), H(B_hat|B))``."""
    rho, dims = psi.density(), psi.dims
    q = 0.5 * conditional_mutual_information(rho, dims, [BH], [R], [AH])
    return q, conditional_entropy(rho, dims, [BH], [B])


def fqsw_corner(psi: FourPartyPureState) -> RatePoint:
    """``(1/2 I(B_hat;R A_hat), -1/2 I(B;B_hat))``."""
    rho, dims = psi.density(), psi.dims
    return RatePoint(
        0.5 * mutual_information(rho, dims, [BH], [R, AH]),
        -0.5 * mutual_information(rho, dims, [B], [BH]),
        "fqsw",
    )


def fqrs_corner(psi: FourPartyPureState) -> RatePoint:
    """``(1/2 I(B_hat;R B), 1/2 I(B_hat;A_hat))``."""
    rho, dims = psi.density(), psi.dims
    return RatePoint(
        0.5 * mutual_information(rho, dims, [BH], [R, B]),
        0.5 * mutual_information(rho, dims, [BH], [AH]),
        "fqrs",
    )


def _on_boundary(region_q: float, region_sum: float, p: RatePoint, tol: float) -> bool:
    return abs(p.Q - region_q) <= tol and abs(p.Q + p.E - region_sum) <= tol


def region_report(psi: FourPartyPureState, tol: float = BOUND_TOL) -> QERegion:
    """Outer bound, both corners, and tightness flags for the degenerate cases.

    When ``A_hat`` is trivial the FQSW corner should sit on both lines; when
    ``B`` is trivial the FQRS corner should.  Flags are ``None`` when the
    corresponding case does not apply.
    """
    q, qe = outer_bound(psi)
    sw, rs = fqsw_corner(psi), fqrs_corner(psi)
    a_triv, b_triv = psi.dims[AH] == 1, psi.dims[B] == 1
    return QERegion(
        q_min=q,
        qe_sum_min=qe,
        corners=[sw, rs],
        a_hat_trivial=a_triv,
        b_trivial=b_triv,
        fqsw_tight=_on_boundary(q, qe, sw, tol) if a_triv else None,
        fqrs_tight=_on_boundary(q, qe, rs, tol) if b_triv else None,
    )


def haar_state(dims, rng: np.random.Generator) -> FourPartyPureState:
    """Unitarily invariant random pure state on ``R x A_hat x B_hat x B``."""
    total = int(np.prod(dims))
    v = rng.normal(size=total) + 1j * rng.normal(size=total)
    return FourPartyPureState.from_vector(v / np.linalg.norm(v), dims)


def product_state(dims) -> FourPartyPureState:
    amp = np.zeros(tuple(dims), dtype=complex)
    amp[(0,) * 4] = 1.0
    return FourPartyPureState(amp)


def bell_on_bhat_b() -> FourPartyPureState:
    """Maximally entangled pair on ``B_hat B`` with trivial ``R`` and ``A_hat``."""
    amp = np.zeros((1, 1, 2, 2), dtype=complex)
    amp[0, 0, 0, 0] = amp[0, 0, 1, 1] = 1 / np.sqrt(2)
    return FourPartyPureState(amp)
