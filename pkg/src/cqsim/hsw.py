"""Random classical-quantum codes decoded with the pretty-good measurement.

Codewords are drawn i.i.d. from ``q^n``; codeword ``s`` is carried by the
product state ``rho_{F(s)_1} (x) ... (x) rho_{F(s)_n}``.  The decoder is the
square-root measurement ``Lambda_s = Sigma^{-1/2} rho_s Sigma^{-1/2}`` with
``Sigma`` the sum of all codeword states, completed by ``Lambda_fail``, the
projector onto the kernel of ``Sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .concentration import index_set_size, sample_words
from .qinfo import Ensemble, tensor_power_states, trace_distance
from .typicality import GuardExceeded, counts_typical

DIM_GUARD = 2**13
STORAGE_GUARD = 2**27
SUPPORT_TOL = 1e-12


@dataclass
class HswCode:
    """Codebook, codeword states and decoding POVM.

    ``povm`` has shape ``(N, D, D)``; ``fail`` is the completing element.
    """

    codewords: np.ndarray
    codeword_states: np.ndarray
    povm: np.ndarray
    fail: np.ndarray
    rate: float
    n: int
    _sqrt_cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.codewords.shape[0]

    @property
    def dim(self) -> int:
        return self.fail.shape[0]

    def sqrt_element(self, s: int) -> np.ndarray:
        """``sqrt(Lambda_s)``, with ``s == size`` addressing the fail element."""
        if s not in self._sqrt_cache:
            op = self.fail if s == self.size else self.povm[s]
            vals, vecs = np.linalg.eigh(op)
            vals = np.sqrt(np.clip(vals, 0.0, None))
            self._sqrt_cache[s] = (vecs * vals) @ vecs.conj().T
        return self._sqrt_cache[s]


def inverse_sqrt_on_support(sigma: np.ndarray, tol: float = SUPPORT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Sigma^{-1/2}, kernel projector)`` using the pseudo-inverse."""
    vals, vecs = np.linalg.eigh(sigma)
    cut = tol * max(vals.max(), 1.0)
    support = vals > cut
    inv = np.zeros_like(vals)
    inv[support] = 1.0 / np.sqrt(vals[support])
    g = (vecs * inv) @ vecs.conj().T
    kv = vecs[:, ~support]
    return g, kv @ kv.conj().T


def pretty_good_measurement(states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Square-root measurement for a list of (unnormalised or normalised) states.

    Returns:
        ``(povm, fail)`` with ``povm.sum(0) + fail == I`` on the full space.
    """
    states = np.asarray(states, dtype=complex)
    g, kernel = inverse_sqrt_on_support(states.sum(axis=0))
    povm = g[None, :, :] @ states @ g[None, :, :]
    povm = 0.5 * (povm + povm.conj().transpose(0, 2, 1))
    return povm, kernel


def typical_projector(avg: np.ndarray, n: int, delta: float) -> np.ndarray:
    """Projector onto the delta-typical eigen-subspace of ``avg^{(x) n}``."""
    vals, vecs = np.linalg.eigh(avg)
    vals = np.clip(vals, 0.0, None)
    d = vals.size
    idx = np.arange(d**n)
    digits = (idx[:, None] // d ** np.arange(n - 1, -1, -1)) % d
    counts = np.stack([(digits == a).sum(axis=1) for a in range(d)], axis=1)
    keep = counts_typical(counts, vals, delta)
    basis = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        basis = np.kron(basis, vecs)
    kept = basis[:, keep]
    return kept @ kept.conj().T


def build_hsw(
    induced: Ensemble,
    n: int,
    S: float,
    rng: np.random.Generator,
    codewords: np.ndarray | None = None,
    typical_delta: float | None = None,
) -> HswCode:
    """Random HSW code of ``2^ceil(nS)`` codewords with a PGM decoder.

    Args:
        induced: the ensemble ``{q(y), rho_y}`` the codewords are drawn from.
        n: block length.
        S: rate in bits per copy.
        rng: source of the codebook.
        codewords: explicit ``(N, n)`` codebook overriding the draw.
        typical_delta: when set, codeword states are first compressed onto
            the typical subspace of the average state.

    Raises:
        GuardExceeded: if ``dim^n`` or the POVM storage exceeds its guard.
    """
    dim = induced.dim**n
    if dim > DIM_GUARD:
        raise GuardExceeded(f"(dim B)^n = {dim} exceeds {DIM_GUARD}")
    if codewords is None:
        codewords = sample_words(induced.prior, n, index_set_size(n, S), rng)
    codewords = np.asarray(codewords, dtype=int)
    if codewords.shape[0] * dim * dim > STORAGE_GUARD:
        raise GuardExceeded("POVM storage exceeds guard")
    states = np.stack([tensor_power_states(induced.states, w) for w in codewords])
    decode_states = states
    if typical_delta is not None:
        proj = typical_projector(induced.average_state(), n, typical_delta)
        decode_states = proj[None] @ states @ proj[None]
    povm, fail = pretty_good_measurement(decode_states)
    return HswCode(codewords, states, povm, fail, S, n)


def outcome_probabilities(code: HswCode, rho: np.ndarray) -> np.ndarray:
    """``tr(Lambda_s rho)`` for every codeword, with the fail mass appended last."""
    flat = code.povm.reshape(code.size, -1)
    probs = (flat @ np.asarray(rho).T.reshape(-1)).real
    fail = float(np.real(np.vdot(code.fail.conj().T.reshape(-1), np.asarray(rho).reshape(-1))))
    out = np.append(np.clip(probs, 0.0, None), max(fail, 0.0))
    return out / out.sum()


def confusion_matrix(code: HswCode) -> np.ndarray:
    """``pi[s, s'] = tr(Lambda_{s'} rho_{F(s)})``, last column is the fail outcome."""
    n_cw, d = code.size, code.dim
    flat = code.povm.reshape(n_cw, d * d)
    rho_t = code.codeword_states.transpose(0, 2, 1).reshape(n_cw, d * d)
    pi = (rho_t @ flat.T).real
    fail = (rho_t @ code.fail.reshape(-1)).real
    out = np.concatenate([np.clip(pi, 0.0, None), np.clip(fail, 0.0, None)[:, None]], axis=1)
    return out / out.sum(axis=1, keepdims=True)


def decode_distribution(code: HswCode, s: int) -> np.ndarray:
    """Distribution of the decoded index given that ``s`` was sent (fail last)."""
    if not 0 <= s < code.size:
        raise IndexError(f"codeword index {s} out of range")
    return outcome_probabilities(code, code.codeword_states[s])


@dataclass(frozen=True)
class HswError:
    mean: float
    max: float
    per_codeword: np.ndarray


def average_error(code: HswCode) -> HswError:
    """``sum_{s'} |pi(s'|s) - delta(s, s')|`` per codeword; fail counts as an error."""
    pi = confusion_matrix(code)
    target = np.zeros_like(pi)
    target[np.arange(code.size), np.arange(code.size)] = 1.0
    err = np.abs(pi - target).sum(axis=1)
    return HswError(float(err.mean()), float(err.max()), err)


@dataclass(frozen=True)
class Measurement:
    outcome: int
    failed: bool
    probability: float
    post: np.ndarray
    disturbance: float


def measure(code: HswCode, state: np.ndarray, rng: np.random.Generator) -> Measurement:
    """Sample the decoder on ``state`` and return the outcome with the post-measurement state.

    The fail outcome is reported as ``outcome == code.size``.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape != (code.dim, code.dim):
        raise ValueError(f"state of shape {state.shape} does not act on dimension {code.dim}")
    probs = outcome_probabilities(code, state)
    s = int(rng.choice(probs.size, p=probs))
    root = code.sqrt_element(s)
    post = root @ state @ root
    weight = float(np.trace(post).real)
    if weight <= 1e-15:
        s = code.size
        root = code.sqrt_element(s)
        post = root @ state @ root
        weight = float(np.trace(post).real)
        if weight <= 1e-15:
            post, weight = state.copy(), 1.0
    post = post / weight
    return Measurement(s, s == code.size, float(probs[s]), post, trace_distance(state, post))


def expected_disturbance(code: HswCode, state: np.ndarray) -> float:
    """Exact average trace distance between ``state`` and the post-measurement state."""
    probs = outcome_probabilities(code, state)
    total = 0.0
    for s in np.flatnonzero(probs > 1e-14):
        root = code.sqrt_element(int(s))
        post = root @ state @ root
        w = np.trace(post).real
        if w > 1e-15:
            total += probs[s] * trace_distance(state, post / w)
    return float(total)
