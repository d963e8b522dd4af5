"""Finite-dimensional classical and quantum information primitives.

States are plain numpy arrays wrapped in light validating containers.  All
entropies are in bits and every quantum entropy is routed through
:func:`partial_trace`, so multipartite quantities only need a list of local
dimensions and the indices of the subsystems to keep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PROB_TOL = 1e-12
HERM_TOL = 1e-12
PSD_TOL = 1e-10
EIG_CLAMP = 1e-12


class InvariantError(ValueError):
    """Raised when an input violates a type invariant."""


def as_distribution(p: Sequence[float] | np.ndarray, tol: float = PROB_TOL) -> np.ndarray:
    """Validate and return a probability vector as a float array."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvariantError(f"distribution must be a non-empty vector, got shape {p.shape}")
    if np.any(p < 0):
        raise InvariantError("distribution has negative entries")
    if abs(p.sum() - 1.0) > tol:
        raise InvariantError(f"distribution sums to {p.sum()!r}, not 1")
    return p


def as_channel(w: Sequence[Sequence[float]] | np.ndarray, tol: float = PROB_TOL) -> np.ndarray:
    """Validate a row-stochastic matrix ``W[x, y] = W(y|x)``."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2:
        raise InvariantError(f"channel must be a matrix, got shape {w.shape}")
    if np.any(w < 0):
        raise InvariantError("channel has negative entries")
    bad = np.abs(w.sum(axis=1) - 1.0) > tol
    if np.any(bad):
        raise InvariantError(f"channel rows {np.flatnonzero(bad).tolist()} do not sum to 1")
    return w


def check_hermitian(rho: np.ndarray, tol: float = HERM_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvariantError(f"operator must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol:
        raise InvariantError("operator is not Hermitian")
    return rho


def as_density(rho: Sequence | np.ndarray) -> np.ndarray:
    """Validate a density matrix (Hermitian, PSD, unit trace)."""
    rho = check_hermitian(rho)
    if abs(np.trace(rho).real - 1.0) > HERM_TOL:
        raise InvariantError(f"density matrix has trace {np.trace(rho).real!r}")
    if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
        raise InvariantError("density matrix is not positive semidefinite")
    return rho


@dataclass(frozen=True)
class Ensemble:
    """Classical-quantum ensemble ``{p(x), rho_x}``.

    Attributes:
        prior: probability vector over the classical alphabet.
        states: array of shape ``(|X|, d, d)`` holding one density matrix per symbol.
        labels: optional symbol names, carried as metadata only.
    """

    prior: np.ndarray
    states: np.ndarray
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        prior = as_distribution(self.prior)
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 3 or states.shape[1] != states.shape[2]:
            raise InvariantError(f"states must have shape (k, d, d), got {states.shape}")
        if states.shape[0] != prior.size:
            raise InvariantError(
                f"{states.shape[0]} states given for an alphabet of size {prior.size}"
            )
        for rho in states:
            as_density(rho)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "states", states)

    @property
    def size(self) -> int:
        return self.prior.size

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def average_state(self) -> np.ndarray:
        return np.einsum("x,xij->ij", self.prior, self.states)


@dataclass(frozen=True)
class ExtendedState:
    """The ccq state obtained by sending X of an ensemble through a channel.

    ``joint[x, y] = p(x) W(y|x)``; ``induced`` is the ensemble ``{q(y), rho_y}``
    with ``rho_y = sum_x P(x|y) rho_x``.  Output symbols with ``q(y) = 0`` carry
    the average state as a placeholder so that ``induced`` stays valid.
    """

    ensemble: Ensemble
    channel: np.ndarray
    joint: np.ndarray
    induced: Ensemble

    @property
    def q(self) -> np.ndarray:
        return self.induced.prior

    def backward_channel(self) -> np.ndarray:
        """``P[y, x] = P(x|y)``, with uniform rows where ``q(y) = 0``."""
        q = self.q
        back = np.full((q.size, self.ensemble.size), 1.0 / self.ensemble.size)
        pos = q > 0
        back[pos] = (self.joint[:, pos] / q[pos]).T
        return back


@dataclass(frozen=True)
class RegionBounds:
    """Lower-left corner data of the achievable ``(R, C)`` region."""

    r_min: float
    sum_min: float

    def contains(self, r: float, c: float, tol: float = 1e-9) -> bool:
        return r >= self.r_min - tol and r + c >= self.sum_min - tol


# ---------------------------------------------------------------------------
# entropies and partial traces


def shannon_entropy(p: Sequence[float] | np.ndarray) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def entropy_from_eigenvalues(vals: np.ndarray) -> float:
    vals = np.asarray(vals, dtype=float)
    vals = vals[vals > EIG_CLAMP]
    return float(-(vals * np.log2(vals)).sum())


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy in bits.

    Eigenvalues below ``1e-12`` are treated as zero.

    Raises:
        InvariantError: if ``rho`` is not Hermitian.
    """
    rho = check_hermitian(rho, tol=1e-10)
    return entropy_from_eigenvalues(np.linalg.eigvalsh(rho))


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduce ``rho`` on subsystems with local dimensions ``dims`` to ``keep``.

    The kept subsystems are returned in ascending index order.
    """
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    rho = np.asarray(rho)
    if rho.shape != (total, total):
        raise InvariantError(f"matrix of shape {rho.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise InvariantError(f"subsystem indices {keep} out of range for {len(dims)} parties")
    k = len(dims)
    t = rho.reshape(dims + dims)
    traced = [i for i in range(k) if i not in keep]
    # contract each traced row index with its column index
    row = list(range(k))
    col = list(range(k, 2 * k))
    for i in traced:
        col[i] = row[i]
    out_idx = [row[i] for i in keep] + [col[i] for i in keep]
    red = np.einsum(t, row + col, out_idx)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return red.reshape(d, d)


def subsystem_entropy(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> float:
    if not keep:
        return 0.0
    return von_neumann_entropy(partial_trace(rho, dims, keep))


def mutual_information(
    rho: np.ndarray, dims: Sequence[int], a: Sequence[int], b: Sequence[int]
) -> float:
    """``I(A;B) = H(A) + H(B) - H(AB)`` for subsystem index lists ``a`` and ``b``."""
    _check_disjoint(a, b)
    return (
        subsystem_entropy(rho, dims, a)
        + subsystem_entropy(rho, dims, b)
        - subsystem_entropy(rho, dims, list(a) + list(b))
    )


def conditional_mutual_information(
    rho: np.ndarray,
    dims: Sequence[int],
    a: Sequence[int],
    b: Sequence[int],
    c: Sequence[int],
) -> float:
    """``I(A;B|C) = I(A;BC) - I(A;C)``."""
    _check_disjoint(a, b, c)
    return mutual_information(rho, dims, a, list(b) + list(c)) - mutual_information(
        rho, dims, a, c
    )


def conditional_entropy(
    rho: np.ndarray, dims: Sequence[int], a: Sequence[int], b: Sequence[int]
) -> float:
    """``H(A|B) = H(AB) - H(B)``."""
    _check_disjoint(a, b)
    return subsystem_entropy(rho, dims, list(a) + list(b)) - subsystem_entropy(rho, dims, b)


def _check_disjoint(*groups: Sequence[int]) -> None:
    seen: set[int] = set()
    for g in groups:
        for i in g:
            if i in seen:
                raise InvariantError(f"subsystem {i} appears in more than one group")
            seen.add(i)


# ---------------------------------------------------------------------------
# classical-quantum states


def embed_cq(e: Ensemble) -> np.ndarray:
    """Block-diagonal ``sum_x p(x)|x><x| (x) rho_x`` with X as the first factor."""
    k, d = e.size, e.dim
    out = np.zeros((k * d, k * d), dtype=complex)
    for x in range(k):
        out[x * d : (x + 1) * d, x * d : (x + 1) * d] = e.prior[x] * e.states[x]
    return out


def holevo_information(e: Ensemble) -> float:
    """Holevo quantity ``H(sum p rho) - sum p H(rho)`` in bits."""
    avg = von_neumann_entropy(e.average_state())
    cond = sum(px * von_neumann_entropy(r) for px, r in zip(e.prior, e.states) if px > 0)
    return avg - cond


def apply_channel(e: Ensemble, w: np.ndarray) -> ExtendedState:
    """Send the classical part of ``e`` through ``W[x, y] = W(y|x)``."""
    w = as_channel(w)
    if w.shape[0] != e.size:
        raise InvariantError(f"channel has {w.shape[0]} inputs, ensemble has {e.size} symbols")
    joint = e.prior[:, None] * w
    q = joint.sum(axis=0)
    q = q / q.sum()
    weighted = np.einsum("xy,xij->yij", joint, e.states)
    states = np.empty_like(weighted)
    avg = e.average_state()
    for y in range(q.size):
        states[y] = weighted[y] / q[y] if q[y] > 0 else avg
    states = 0.5 * (states + states.conj().transpose(0, 2, 1))
    induced = Ensemble(q, states)
    return ExtendedState(e, w, joint, induced)


def classical_mutual_information(joint: np.ndarray) -> float:
    joint = np.asarray(joint, dtype=float)
    return (
        shannon_entropy(joint.sum(axis=1))
        + shannon_entropy(joint.sum(axis=0))
        - shannon_entropy(joint)
    )


def theorem1_region(e: Ensemble, w: np.ndarray) -> RegionBounds:
    """Corner of the achievable (communication, common randomness) region.

    Returns ``r_min = I(X;Y) - I(Y;B)`` and ``sum_min = H(Y|B)`` evaluated on
    the ccq state produced by :func:`apply_channel`.
    """
    ext = apply_channel(e, w)
    ixy = classical_mutual_information(ext.joint)
    iyb = holevo_information(ext.induced)
    h_y_given_b = shannon_entropy(ext.q) - iyb
    return RegionBounds(ixy - iyb, h_y_given_b)


def fannes_bound(eps: float, d: int) -> float:
    """Continuity bound ``eps log d + tau(eps)`` on the entropy difference."""
    if eps < 0 or d < 1:
        raise ValueError("need eps >= 0 and d >= 1")
    if eps == 0:
        return 0.0
    tau = -eps * np.log2(eps) if eps <= 0.25 else 0.5
    return float(eps * np.log2(d) + tau)


# ---------------------------------------------------------------------------
# state constructors


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state from the induced (Hilbert-Schmidt for full rank) measure."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def trace_norm(a: np.ndarray) -> float:
    """Schatten 1-norm of a Hermitian matrix."""
    return float(np.abs(np.linalg.eigvalsh(a)).sum())


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``0.5 * ||rho - sigma||_1``."""
    return 0.5 * trace_norm(np.asarray(rho) - np.asarray(sigma))


def tensor_power_states(states: np.ndarray, word: Sequence[int]) -> np.ndarray:
    """``rho_{w_1} (x) ... (x) rho_{w_n}`` for a word over the ensemble alphabet."""
    out = np.ones((1, 1), dtype=complex)
    for sym in word:
        out = np.kron(out, states[sym])
    return out


def reference_ensemble() -> Ensemble:
    """Uniform prior over ``{|0><0|, |+><+|}``, the running example of the test-suite."""
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    return Ensemble(np.array([0.5, 0.5]), np.stack([projector(ket(0, 2)), projector(plus)]))


def binary_symmetric_channel(flip: float) -> np.ndarray:
    return np.array([[1 - flip, flip], [flip, 1 - flip]])
