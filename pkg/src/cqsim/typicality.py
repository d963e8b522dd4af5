"""Robust typicality and conditional typicality for finite alphabets.

A sequence is delta-typical for ``p`` when every empirical frequency lies in
``[p(x)(1 - delta), p(x)(1 + delta)]``.  With the constant
``c = sum_x p(x)|log2 p(x)|`` this definition gives the per-sequence
probability sandwich ``2^{-n(H + c delta)} <= p^n(x^n) <= 2^{-n(H - c delta)}``
exactly, so every bound reported here is a checkable inequality rather than an
asymptotic statement.

Exact summaries are computed over type classes (multinomial counting), which
scales to large ``n``; :func:`iter_sequences` streams the raw sequences for
callers that need them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lgamma, log
from typing import Iterator, Sequence

import numpy as np

from .qinfo import as_channel, as_distribution, shannon_entropy

ENUM_GUARD = 2**24
# slack on the relative-deviation comparisons, absorbs float rounding of N/n
MEMBER_TOL = 1e-12
# slack on the log-domain bound checks
BOUND_TOL = 1e-9


class GuardExceeded(RuntimeError):
    """Raised when an exhaustive computation would exceed its size guard."""


@dataclass(frozen=True)
class TypicalityConstants:
    c: float
    c_prime: float


@dataclass(frozen=True)
class TypicalSetSummary:
    """Exact data of a typical set together with its probability and cardinality bounds.

    ``card_lower`` uses the measured mass in place of ``1 - eps``; both
    cardinality bounds are then exact consequences of the probability sandwich.
    """

    n: int
    delta: float
    entropy: float
    c: float
    cardinality: int
    mass: float
    min_prob: float
    max_prob: float
    prob_lower: float
    prob_upper: float
    card_lower: float
    card_upper: float

    @property
    def prob_bounds_hold(self) -> bool:
        if self.cardinality == 0:
            return True
        return (
            log2_le(self.prob_lower, self.min_prob)
            and log2_le(self.max_prob, self.prob_upper)
        )

    @property
    def card_bounds_hold(self) -> bool:
        return (
            self.cardinality == 0 or log2_le(self.card_lower, self.cardinality)
        ) and log2_le(self.cardinality, self.card_upper)

    @property
    def passed(self) -> bool:
        return self.prob_bounds_hold and self.card_bounds_hold


@dataclass(frozen=True)
class ConditionalSetSummary:
    """Exact data of ``T_{Q,delta}(x^n)`` with its conditional bounds."""

    n: int
    delta: float
    delta_prime: float
    cond_entropy: float
    slack: float
    cardinality: int
    mass: float
    min_prob: float
    max_prob: float
    prob_lower: float
    prob_upper: float
    card_lower: float
    card_upper: float
    closure_holds: bool | None
    output_mass: float

    @property
    def passed(self) -> bool:
        ok = self.cardinality == 0 or (
            log2_le(self.prob_lower, self.min_prob)
            and log2_le(self.max_prob, self.prob_upper)
            and log2_le(self.card_lower, self.cardinality)
        )
        ok = ok and log2_le(self.cardinality, self.card_upper)
        return ok and self.closure_holds is not False


def log2_le(a: float, b: float, tol: float = BOUND_TOL) -> bool:
    """``a <= b`` compared in the log domain with additive slack ``tol``."""
    if a <= 0:
        return True
    if b <= 0:
        return False
    return np.log2(a) <= np.log2(b) + tol


def typicality_constants(p: np.ndarray, q_cond: np.ndarray | None = None) -> TypicalityConstants:
    """Constants for the probability sandwiches.

    ``c = sum_x p(x)|log2 p(x)|``.  With a conditional ``Q[x, y]`` the second
    constant is ``sum_x p(x) sum_y Q(y|x)|log2 Q(y|x)|``, and it multiplies both
    ``delta`` and ``delta_prime`` in the conditional sandwich.
    """
    p = as_distribution(p)
    c = _abs_log_mean(p)
    if q_cond is None:
        return TypicalityConstants(c, 0.0)
    q_cond = as_channel(q_cond)
    c_prime = float(sum(px * _abs_log_mean(row) for px, row in zip(p, q_cond)))
    return TypicalityConstants(c, c_prime)


def _abs_log_mean(p: np.ndarray) -> float:
    p = p[p > 0]
    return float((p * np.abs(np.log2(p))).sum())


# ---------------------------------------------------------------------------
# membership


def empirical_type(xn: Sequence[int], alphabet_size: int | None = None) -> np.ndarray:
    """Empirical distribution ``N(x|x^n)/n``."""
    xn = np.asarray(xn, dtype=int).ravel()
    if xn.size == 0:
        raise ValueError("empty sequence has no type")
    if xn.min() < 0 or (alphabet_size is not None and xn.max() >= alphabet_size):
        raise ValueError("sequence has symbols outside the alphabet")
    size = alphabet_size if alphabet_size is not None else int(xn.max()) + 1
    return np.bincount(xn, minlength=size) / xn.size


def type_counts(xn: Sequence[int], alphabet_size: int) -> np.ndarray:
    xn = np.asarray(xn, dtype=int).ravel()
    return np.bincount(xn, minlength=alphabet_size)


def counts_typical(counts: np.ndarray, p: np.ndarray, delta: float) -> np.ndarray:
    """Vectorised typicality test on count vectors (last axis = alphabet)."""
    counts = np.asarray(counts, dtype=float)
    n = counts.sum(axis=-1, keepdims=True)
    freq = counts / n
    return np.all(np.abs(freq - p) <= p * delta + MEMBER_TOL, axis=-1)


def is_typical(xn: Sequence[int], p: np.ndarray, delta: float) -> bool:
    """Whether ``|P_{x^n}(x) - p(x)| <= p(x) delta`` for every symbol."""
    p = np.asarray(p, dtype=float)
    xn = np.asarray(xn, dtype=int).ravel()
    if xn.size == 0 or xn.min() < 0 or xn.max() >= p.size:
        return False
    return bool(counts_typical(type_counts(xn, p.size), p, delta))


def joint_counts(xn: Sequence[int], yn: Sequence[int], nx: int, ny: int) -> np.ndarray:
    xn = np.asarray(xn, dtype=int).ravel()
    yn = np.asarray(yn, dtype=int).ravel()
    out = np.zeros((nx, ny), dtype=int)
    np.add.at(out, (xn, yn), 1)
    return out


def joint_counts_typical(
    nxy: np.ndarray, q_cond: np.ndarray, delta: float
) -> np.ndarray:
    """Conditional typicality from joint count arrays ``(..., |X|, |Y|)``.

    Rows for input symbols that do not occur carry no constraint.
    """
    nxy = np.asarray(nxy, dtype=float)
    nx = nxy.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(nx > 0, nxy / np.where(nx > 0, nx, 1.0), q_cond)
    ok = np.abs(cond - q_cond) <= q_cond * delta + MEMBER_TOL
    return np.all(ok, axis=(-2, -1))


def is_conditionally_typical(
    yn: Sequence[int], xn: Sequence[int], q_cond: np.ndarray, delta: float
) -> bool:
    """Whether the conditional type of ``yn`` given ``xn`` is within ``delta`` of ``Q``.

    ``q_cond[x, y] = Q(y|x)``.
    """
    yn = np.asarray(yn, dtype=int).ravel()
    xn = np.asarray(xn, dtype=int).ravel()
    if yn.size != xn.size:
        raise ValueError(f"length mismatch: {yn.size} vs {xn.size}")
    q_cond = np.asarray(q_cond, dtype=float)
    nx, ny = q_cond.shape
    if xn.size == 0 or yn.min() < 0 or yn.max() >= ny or xn.min() < 0 or xn.max() >= nx:
        return False
    return bool(joint_counts_typical(joint_counts(xn, yn, nx, ny), q_cond, delta))


# ---------------------------------------------------------------------------
# enumeration


def _guard(alphabet_size: int, n: int, guard: int = ENUM_GUARD) -> None:
    if alphabet_size**n > guard:
        raise GuardExceeded(f"|alphabet|^n = {alphabet_size}^{n} exceeds guard {guard}")


def iter_sequences(alphabet_size: int, n: int) -> Iterator[tuple[int, ...]]:
    """Stream every word of length ``n`` in lexicographic order."""
    _guard(alphabet_size, n)
    return itertools.product(range(alphabet_size), repeat=n)


def all_sequences(alphabet_size: int, n: int) -> np.ndarray:
    """All words as an ``(|X|^n, n)`` integer array in lexicographic order."""
    _guard(alphabet_size, n)
    idx = np.arange(alphabet_size**n)
    powers = alphabet_size ** np.arange(n - 1, -1, -1)
    return (idx[:, None] // powers) % alphabet_size


def sequence_log2_probs(seqs: np.ndarray, p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        logp = np.log2(np.asarray(p, dtype=float))
    return logp[seqs].sum(axis=-1)


def iter_type_classes(alphabet_size: int, n: int) -> Iterator[tuple[int, ...]]:
    """Every count vector of length ``alphabet_size`` summing to ``n``."""
    if alphabet_size == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in iter_type_classes(alphabet_size - 1, n - first):
            yield (first,) + rest


def log2_multinomial(counts: Sequence[int]) -> float:
    n = sum(counts)
    val = lgamma(n + 1) - sum(lgamma(c + 1) for c in counts)
    return val / log(2)


def typical_set(p: np.ndarray, n: int, delta: float) -> TypicalSetSummary:
    """Exact cardinality, mass and extreme probabilities of ``T^n_{p,delta}``.

    Counts are accumulated over type classes, so the cost is polynomial in
    ``n``.  Sequences using a zero-probability symbol are never typical.
    """
    p = as_distribution(p)
    if n < 1:
        raise ValueError("block length must be positive")
    h = shannon_entropy(p)
    c = typicality_constants(p).c
    card = 0
    mass = 0.0
    lo = np.inf
    hi = -np.inf
    with np.errstate(divide="ignore"):
        logp = np.log2(p)
    for counts in iter_type_classes(p.size, n):
        cnt = np.array(counts)
        if not counts_typical(cnt, p, delta):
            continue
        lp = float(np.dot(cnt[cnt > 0], logp[cnt > 0]))
        lm = log2_multinomial(counts)
        card += int(round(2.0**lm)) if lm < 52 else _exact_multinomial(counts)
        mass += 2.0 ** (lm + lp)
        lo = min(lo, lp)
        hi = max(hi, lp)
    return TypicalSetSummary(
        n=n,
        delta=delta,
        entropy=h,
        c=c,
        cardinality=card,
        mass=min(mass, 1.0),
        min_prob=2.0**lo if card else 0.0,
        max_prob=2.0**hi if card else 0.0,
        prob_lower=2.0 ** (-n * (h + c * delta)),
        prob_upper=2.0 ** (-n * (h - c * delta)),
        card_lower=min(mass, 1.0) * 2.0 ** (n * (h - c * delta)),
        card_upper=2.0 ** (n * (h + c * delta)),
    )


def _exact_multinomial(counts: Sequence[int]) -> int:
    from math import factorial

    out = factorial(sum(counts))
    for c in counts:
        out //= factorial(c)
    return out


def typical_mask(seqs: np.ndarray, p: np.ndarray, delta: float) -> np.ndarray:
    """Membership of each row of ``seqs`` in ``T^n_{p,delta}``."""
    p = np.asarray(p, dtype=float)
    counts = np.stack([(seqs == a).sum(axis=-1) for a in range(p.size)], axis=-1)
    return counts_typical(counts, p, delta)


def conditional_typical_mask(
    candidates: np.ndarray, given: np.ndarray, q_cond: np.ndarray, delta: float
) -> np.ndarray:
    """Pairwise conditional typicality of ``candidates[j]`` given ``given[i]``.

    Returns a boolean ``(len(given), len(candidates))`` array.
    """
    q_cond = np.asarray(q_cond, dtype=float)
    nx, ny = q_cond.shape
    given = np.atleast_2d(given)
    candidates = np.atleast_2d(candidates)
    gi = np.stack([(given == a) for a in range(nx)], axis=1).astype(np.int32)
    ci = np.stack([(candidates == b) for b in range(ny)], axis=1).astype(np.int32)
    # nxy[i, j, a, b] = #positions with given[i] = a and candidates[j] = b
    nxy = np.einsum("iak,jbk->ijab", gi, ci)
    return joint_counts_typical(nxy, q_cond, delta)


def conditional_typical_set(
    q_cond: np.ndarray,
    xn: Sequence[int],
    delta: float,
    p: np.ndarray | None = None,
    delta_prime: float | None = None,
) -> tuple[np.ndarray, ConditionalSetSummary]:
    """Enumerate ``T^n_{Q,delta}(x^n)`` and report its conditional bounds.

    Args:
        q_cond: ``Q[x, y] = Q(y|x)``.
        xn: the conditioning sequence.
        delta: conditional typicality parameter.
        p: input distribution; used only when ``xn`` is ``delta_prime``-typical
            for it, otherwise the type of ``xn`` takes its place.
        delta_prime: typicality of ``xn`` under ``p``.  When it holds the
            closure property is checked: every member is jointly typical with
            ``xn`` for ``pQ`` and typical for ``q`` at
            ``delta + delta_prime + delta*delta_prime``.

    Returns:
        The member sequences as an integer array and a summary.
    """
    q_cond = as_channel(q_cond)
    xn = np.asarray(xn, dtype=int).ravel()
    n = xn.size
    nx, ny = q_cond.shape
    typical_input = (
        p is not None and delta_prime is not None and is_typical(xn, as_distribution(p), delta_prime)
    )
    if not typical_input:
        p, delta_prime = empirical_type(xn, nx), None
    p = as_distribution(p)
    ys = all_sequences(ny, n)
    member = conditional_typical_mask(ys, xn[None, :], q_cond, delta)[0]
    members = ys[member]
    with np.errstate(divide="ignore"):
        logq = np.log2(q_cond)
    lp = logq[xn[None, :], members].sum(axis=-1) if members.size else np.zeros(0)
    all_lp = logq[xn[None, :], ys].sum(axis=-1)
    mass = float(np.exp2(lp).sum())
    hyx = float(sum(px * shannon_entropy(row) for px, row in zip(p, q_cond)))
    k = typicality_constants(p, q_cond)
    dp = delta_prime if delta_prime is not None else 0.0
    slack = k.c_prime * (delta + dp + delta * dp)
    closure = None
    q = p @ q_cond
    big = delta + dp + delta * dp
    if typical_input:
        joint = (p[:, None] * q_cond).ravel()
        pairs = xn[None, :] * ny + members
        closure = bool(
            np.all(typical_mask(pairs, joint, big)) and np.all(typical_mask(members, q, big))
        ) if members.size else True
    out_mass = float(np.exp2(all_lp[typical_mask(ys, q, big)]).sum())
    card = int(members.shape[0])
    summary = ConditionalSetSummary(
        n=n,
        delta=delta,
        delta_prime=dp,
        cond_entropy=hyx,
        slack=slack,
        cardinality=card,
        mass=mass,
        min_prob=float(np.exp2(lp.min())) if card else 0.0,
        max_prob=float(np.exp2(lp.max())) if card else 0.0,
        prob_lower=2.0 ** (-n * (hyx + slack)),
        prob_upper=2.0 ** (-n * (hyx - slack)),
        card_lower=mass * 2.0 ** (n * (hyx - slack)),
        card_upper=2.0 ** (n * (hyx + slack)),
        closure_holds=closure,
        output_mass=out_mass,
    )
    return members, summary


def hatted_conditional_set(
    q_cond: np.ndarray,
    yn: Sequence[int],
    delta: float,
    delta_prime: float,
    q: np.ndarray,
) -> np.ndarray:
    """Conditional typical set of ``yn`` if ``yn`` is typical for ``q``, else empty.

    ``q_cond[y, x]`` is the conditional of the enumerated variable given ``y``;
    ``delta_prime`` is the typicality parameter applied to ``yn`` itself.
    """
    q_cond = np.asarray(q_cond, dtype=float)
    yn = np.asarray(yn, dtype=int).ravel()
    if not is_typical(yn, q, delta_prime):
        return np.zeros((0, yn.size), dtype=int)
    members, _ = conditional_typical_set(q_cond, yn, delta, p=q, delta_prime=delta_prime)
    return members
