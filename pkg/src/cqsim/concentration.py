"""Random codebooks that dilute uniform randomness and cover a marginal.

``dilute`` draws ``M`` i.i.d. words from ``q^n``; a uniform index pushed
through the table approximates ``q^n``.  ``covering_encoder`` additionally
builds the stochastic encoder ``E(i|x^n)`` that reproduces the joint
distribution ``(1/M) P^n(x^n|D(i))`` starting from the marginal ``p^n``, using
the trimmed conditionals supported on typical sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qinfo import as_channel, as_distribution, shannon_entropy
from .typicality import (
    GuardExceeded,
    all_sequences,
    joint_counts_typical,
    typical_mask,
    typicality_constants,
)

KAPPA0 = 1.0 / (2.0 * np.log(2.0))
EXACT_GUARD = 2**26


def chernoff_tail(n_samples: int, mu: float, eta: float, b: float, kappa0: float = KAPPA0) -> float:
    """Upper bound ``2 exp(-kappa0 n mu eta^2 / b)`` on ``Pr{|mean - mu| >= mu eta}``."""
    if not 0 < eta <= 0.5:
        raise ValueError(f"eta must lie in (0, 1/2], got {eta}")
    if b <= 0 or not 0 <= mu <= b:
        raise ValueError("need b > 0 and 0 <= mu <= b")
    return float(2.0 * np.exp(-kappa0 * n_samples * mu * eta**2 / b))


def index_set_size(n: int, rate: float) -> int:
    """``2^ceil(n * rate)`` with negative rates clamped to a single index."""
    bits = int(np.ceil(n * max(rate, 0.0) - 1e-9))
    return 2 ** max(bits, 0)


def word_index(words: np.ndarray, alphabet_size: int) -> np.ndarray:
    """Lexicographic rank of each row, matching :func:`all_sequences`."""
    words = np.atleast_2d(words)
    powers = alphabet_size ** np.arange(words.shape[-1] - 1, -1, -1)
    return words @ powers


def sample_words(q: np.ndarray, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.choice(q.size, size=(count, n), p=q)


# ---------------------------------------------------------------------------
# randomness dilution


@dataclass(frozen=True)
class DilutionCode:
    table: np.ndarray
    q: np.ndarray
    n: int

    @property
    def size(self) -> int:
        return self.table.shape[0]


def dilute(q: np.ndarray, n: int, M: int, rng: np.random.Generator) -> DilutionCode:
    """Draw ``M`` words i.i.d. from ``q^n``; ``G(i)`` is row ``i``."""
    q = as_distribution(q)
    if M < 1:
        raise ValueError("M must be at least 1")
    return DilutionCode(sample_words(q, n, M, rng), q, n)


def dilution_deviation(code: DilutionCode) -> float:
    """Exact ``||q^n - q_tilde||_1`` of the table's empirical distribution.

    Only words that occur in the table contribute a non-trivial term, the
    remaining ``q^n`` mass enters as ``1 - q^n(table support)``.
    """
    words, counts = np.unique(code.table, axis=0, return_counts=True)
    with np.errstate(divide="ignore"):
        logq = np.log2(code.q)
    qn = np.exp2(logq[words].sum(axis=1))
    qt = counts / code.size
    return float(np.abs(qt - qn).sum() + max(0.0, 1.0 - qn.sum()))


def dilution_tail_bound(q: np.ndarray, n: int, M: int, eps: float, delta: float,
                        kappa0: float = KAPPA0) -> float:
    """``2 gamma exp(-kappa0 M eps^2 / gamma)`` with ``gamma = 2^{n(H + c delta)}``."""
    q = as_distribution(q)
    c = typicality_constants(q).c
    gamma = 2.0 ** (n * (shannon_entropy(q) + c * delta))
    return float(2 * gamma * np.exp(-kappa0 * M * eps**2 / gamma))


# ---------------------------------------------------------------------------
# covering


@dataclass
class CoveringCode:
    """Codebook ``D(i)`` with its encoder ``E(i|x^n)``.

    Attributes:
        table: ``(M, n)`` codewords over the Y alphabet.
        encoder: ``(|X|^n, M)`` array, ``encoder[x, i] = E(i|x)``; rows sum to 1.
        cond: ``(M, |X|^n)`` array of ``P^n(x^n|D(i))``.
        pn: ``p^n`` over all X words.
        iota: whether every empirical average stayed within ``1 +- eps`` of ``w_tilde``.
        trim_loss: average ``P^n`` mass of the codeword conditionals outside ``B_y``.
        residual: ``sum_x p^n(x)(1 - sum_i E_sub(i|x))`` moved to index 0 by fill-up.
        max_subnormal: largest row sum of the subnormalised encoder before fill-up.
    """

    table: np.ndarray
    encoder: np.ndarray
    cond: np.ndarray
    pn: np.ndarray
    n: int
    K: float
    k: float
    eta: float
    eps: float
    delta: float
    iota: bool
    trim_loss: float
    residual: float
    max_subnormal: float
    extra: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.table.shape[0]


@dataclass(frozen=True)
class CoveringSets:
    """The per-``y^n`` trimmed supports shared by every codebook for one instance."""

    xs: np.ndarray
    ys: np.ndarray
    log_cond: np.ndarray  # [y, x] = log2 P^n(x|y)
    b_mask: np.ndarray  # [y, x] = x in B_y
    pn: np.ndarray
    w: np.ndarray
    w_tilde: np.ndarray
    K: float
    k: float


def covering_sets(q: np.ndarray, p_cond: np.ndarray, n: int, delta: float,
                  eps: float) -> CoveringSets:
    """Typical sets, ``w``, and the trimmed supports ``B_y`` at block length ``n``.

    ``T`` is the ``3 delta``-typical set of ``p``; ``T_y`` is the
    ``delta``-conditionally typical set of ``x^n`` given ``y^n`` when ``y^n`` is
    ``delta``-typical for ``q``, and empty otherwise.
    """
    q = as_distribution(q)
    p_cond = as_channel(p_cond)
    ny, nx = p_cond.shape
    if q.size != ny:
        raise ValueError("q and P(x|y) disagree on the Y alphabet")
    if nx**n * ny**n > EXACT_GUARD:
        raise GuardExceeded(f"|X|^n |Y|^n = {nx**n * ny**n} exceeds {EXACT_GUARD}")
    p = q @ p_cond
    xs = all_sequences(nx, n)
    ys = all_sequences(ny, n)
    with np.errstate(divide="ignore"):
        logp = np.log2(p)
        logc = np.log2(p_cond)
    pn = np.exp2(logp[xs].sum(axis=1))
    qn = np.exp2(np.log2(q)[ys].sum(axis=1)) if np.all(q > 0) else _power_probs(q, ys)

    yi = np.stack([(ys == a) for a in range(ny)], axis=1).astype(np.int32)
    xi = np.stack([(xs == b) for b in range(nx)], axis=1).astype(np.int32)
    counts = np.einsum("iak,jbk->ijab", yi, xi)
    with np.errstate(invalid="ignore"):
        log_cond = np.where(counts > 0, counts * logc, 0.0).sum(axis=(2, 3))
    log_cond[np.any((counts > 0) & np.isneginf(logc), axis=(2, 3))] = -np.inf

    t_mask = typical_mask(xs, p, 3 * delta)
    y_typ = typical_mask(ys, q, delta)
    ty_mask = joint_counts_typical(counts, p_cond, delta) & y_typ[:, None]
    a_mask = ty_mask & t_mask[None, :]
    cond = np.exp2(log_cond)
    w = (qn[:, None] * cond * a_mask).sum(axis=0)

    c = typicality_constants(p).c
    h_x = shannon_entropy(p)
    h_x_given_y = sum(qy * shannon_entropy(row) for qy, row in zip(q, p_cond))
    K = 2.0 ** (n * (h_x + 3 * c * delta))
    k = 2.0 ** (n * (h_x_given_y - typicality_constants(q, p_cond).c_prime * (2 * delta + delta**2)))
    keep = w >= eps / K
    b_mask = a_mask & keep[None, :]
    w_tilde = np.where(keep, w, 0.0)
    return CoveringSets(xs, ys, log_cond, b_mask, pn, w, w_tilde, K, k)


def _power_probs(q: np.ndarray, seqs: np.ndarray) -> np.ndarray:
    return np.prod(q[seqs], axis=1)


def covering_encoder(
    q: np.ndarray,
    p_cond: np.ndarray,
    n: int,
    M: int,
    delta: float,
    eps: float,
    rng: np.random.Generator,
    sets: CoveringSets | None = None,
    table: np.ndarray | None = None,
) -> CoveringCode:
    """Random covering codebook with its trimmed encoder.

    Args:
        q: distribution of Y.
        p_cond: ``p_cond[y, x] = P(x|y)``.
        n: block length.
        M: number of codewords.
        delta: typicality parameter (``T`` uses ``3 delta``).
        eps: covering accuracy; sets the trimming threshold and the ``1 + eps``
            normalisation.
        rng: source of the codebook when ``table`` is not given.
        sets: precomputed :func:`covering_sets` for this instance.
        table: explicit ``(M, n)`` codebook overriding the random draw.

    Raises:
        ValueError: if an X word of positive ``P^n(x|D(i))`` mass has ``p^n(x) = 0``.
    """
    q = as_distribution(q)
    if sets is None:
        sets = covering_sets(q, p_cond, n, delta, eps)
    ny = np.asarray(p_cond).shape[0]
    if table is None:
        table = sample_words(q, n, M, rng)
    table = np.asarray(table, dtype=int)
    M = table.shape[0]
    rows = word_index(table, ny)
    cond = np.exp2(sets.log_cond[rows])
    if np.any((cond > 0) & (sets.pn[None, :] == 0)):
        raise ValueError("codeword conditional puts mass on a word with p^n(x) = 0")
    p_tilde = cond * sets.b_mask[rows]
    avg = p_tilde.mean(axis=0)
    wt = sets.w_tilde
    iota = bool(np.all((avg >= (1 - eps) * wt - 1e-15) & (avg <= (1 + eps) * wt + 1e-15)))

    pn = sets.pn
    safe = np.where(pn > 0, pn, 1.0)
    sub = (p_tilde / ((1 + eps) * M * safe[None, :])).T  # [x, i]
    sums = sub.sum(axis=1)
    max_sub = float(sums.max(initial=0.0))
    # rows exceeding 1 only occur when iota fails; rescale them to stay stochastic
    over = sums > 1.0
    sub[over] /= sums[over, None]
    sums = np.minimum(sums, 1.0)
    residual_rows = 1.0 - sums
    enc = sub
    enc[:, 0] += residual_rows
    trim = float(1.0 - (cond * sets.b_mask[rows]).sum(axis=1).mean())
    return CoveringCode(
        table=table,
        encoder=enc,
        cond=cond,
        pn=pn,
        n=n,
        K=sets.K,
        k=sets.k,
        eta=sets.K / (sets.k * M),
        eps=eps,
        delta=delta,
        iota=iota,
        trim_loss=trim,
        residual=float((pn * residual_rows).sum()),
        max_subnormal=max_sub,
    )


def covering_deviation(code: CoveringCode) -> float:
    """``sum_{i,x} |P^n(x|D(i))/M - E(i|x) p^n(x)|``."""
    target = code.cond / code.size
    ours = (code.encoder * code.pn[:, None]).T
    return float(np.abs(target - ours).sum())


def covering_tail_bound(q: np.ndarray, p_cond: np.ndarray, n: int, M: int, eps: float,
                        delta: float, kappa0: float = KAPPA0) -> float:
    """``2 alpha exp(-kappa0 M eps^3 beta / alpha)`` for the block-length-``n`` covering."""
    q = as_distribution(q)
    p_cond = as_channel(p_cond)
    p = q @ p_cond
    c = typicality_constants(p).c
    alpha = 2.0 ** (n * (shannon_entropy(p) + c * delta))
    hxy = sum(qy * shannon_entropy(row) for qy, row in zip(q, p_cond))
    beta = 2.0 ** (n * (hxy - c * delta))
    return float(2 * alpha * np.exp(-kappa0 * M * eps**3 * beta / alpha))
