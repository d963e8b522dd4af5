"""Channel simulation with classical-quantum side information.

One i.i.d. codebook ``Y[l, m, s]`` plays three roles at once: the full table
dilutes the uniform index into ``q^n``, each ``l`` slice is a covering code
over the ``(m, s)`` block, and each ``(l, m)`` slice is an HSW code over ``s``
that Bob decodes from his side information.  Alice, holding ``x^n`` and the
shared ``l``, samples ``(m, s)`` from the covering encoder and sends only
``m``; both parties output the codeword, Bob using his estimate ``s'``.

Indexing convention: X and Y words are addressed by their lexicographic rank
(:func:`cqsim.typicality.all_sequences`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .concentration import (
    CoveringCode,
    covering_encoder,
    covering_sets,
    index_set_size,
    word_index,
)
from .hsw import HswCode, build_hsw, measure
from .qinfo import (
    Ensemble,
    apply_channel,
    as_channel,
    classical_mutual_information,
    holevo_information,
    shannon_entropy,
    tensor_power_states,
    trace_norm,
)
from .typicality import GuardExceeded, all_sequences, typical_set, typicality_constants

TABLE_GUARD = 2**24
ACCUM_GUARD = 2**26
JOINT_STATE_MAX_N = 3


class ProtocolError(RuntimeError):
    """Raised when a built code cannot be executed."""


@dataclass(frozen=True)
class Rates:
    """Communication ``R``, common randomness ``C`` and decoded rate ``S`` in bits/copy."""

    R: float
    C: float
    S: float

    def __post_init__(self):
        for name in ("R", "C", "S"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def clamped(self) -> "Rates":
        return Rates(max(self.R, 0.0), max(self.C, 0.0), max(self.S, 0.0))

    def with_margin(self, margin: float) -> "Rates":
        """Move ``margin`` bits away from every constraint.

        ``R`` and ``C`` grow by ``margin``, ``S`` shrinks by it (Bob decodes a
        smaller index); the result is clamped at zero.
        """
        return Rates(self.R + margin, self.C + margin, self.S - margin).clamped()


def rate_constant(e: Ensemble, w: np.ndarray) -> float:
    """The typicality constant used in the rate prescriptions (that of ``q``)."""
    return typicality_constants(apply_channel(e, w).q).c


def default_rates(e: Ensemble, w: np.ndarray, delta: float) -> Rates:
    """``C = H(Y|X) - c delta``, ``R = I(X;Y) - I(Y;B) + 4 c delta``, ``S = I(Y;B) - c delta``.

    Negative values are clamped to zero.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    ext = apply_channel(e, w)
    c = typicality_constants(ext.q).c
    ixy = classical_mutual_information(ext.joint)
    iyb = holevo_information(ext.induced)
    hyx = shannon_entropy(ext.joint) - shannon_entropy(e.prior)
    return Rates(ixy - iyb + 4 * c * delta, hyx - c * delta, iyb - c * delta).clamped()


@dataclass
class SimulationCode:
    """A built simulation code.

    Attributes:
        codebook: ``(L, Mm, Ns, n)`` array of Y words.
        encoders: ``(L, |X|^n, Mm * Ns)``; ``encoders[l, x, m * Ns + s] = E_l(m, s|x)``.
        hsw: ``hsw[l][m]`` is the HSW code for the ``(l, m)`` slice.
        coverings: per-``l`` covering codes (diagnostics).
    """

    ensemble: Ensemble
    channel: np.ndarray
    n: int
    rates: Rates
    codebook: np.ndarray
    encoders: np.ndarray
    hsw: list[list[HswCode]]
    coverings: list[CoveringCode]
    cover_delta: float
    eps: float
    _states: np.ndarray | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int, int]:
        L, Mm, Ns, _ = self.codebook.shape
        return L, Mm, Ns

    @property
    def nx(self) -> int:
        return self.channel.shape[0]

    @property
    def ny(self) -> int:
        return self.channel.shape[1]

    def decode(self, l: int, m: int, s: int) -> np.ndarray:
        """``D_l(m, s)``."""
        return self.codebook[l, m, s]

    def source_state(self, xn) -> np.ndarray:
        return tensor_power_states(self.ensemble.states, np.asarray(xn, dtype=int))

    def all_source_states(self) -> np.ndarray:
        if self._states is None:
            xs = all_sequences(self.nx, self.n)
            self._states = np.stack([self.source_state(x) for x in xs])
        return self._states


def check_guards(e: Ensemble, w: np.ndarray, n: int, rates: Rates) -> tuple[int, int, int]:
    L = index_set_size(n, rates.C)
    Mm = index_set_size(n, rates.R)
    Ns = index_set_size(n, rates.S)
    if L * Mm * Ns > TABLE_GUARD:
        raise GuardExceeded(f"codebook of {L * Mm * Ns} words exceeds {TABLE_GUARD}")
    if e.dim**n > 2**13:
        raise GuardExceeded(f"(dim B)^n = {e.dim**n} exceeds 8192")
    return L, Mm, Ns


def build_simulation_code(
    e: Ensemble,
    w: np.ndarray,
    n: int,
    rates: Rates,
    rng: np.random.Generator,
    cover_delta: float = 2.0,
    eps: float = 0.15,
) -> SimulationCode:
    """Draw the shared codebook and assemble encoders, POVMs and decoder.

    Args:
        e: source ensemble ``{p(x), rho_x}``.
        w: channel to simulate, ``w[x, y] = W(y|x)``.
        n: block length.
        rates: index-set rates; sizes are ``2^ceil(n * rate)``.
        rng: randomness for the codebook.
        cover_delta: typicality parameter of the covering encoders.
        eps: covering accuracy parameter.
    """
    w = as_channel(w)
    L, Mm, Ns = check_guards(e, w, n, rates)
    ext = apply_channel(e, w)
    q = ext.q
    back = ext.backward_channel()
    sets = covering_sets(q, back, n, cover_delta, eps)
    codebook = rng.choice(q.size, size=(L, Mm, Ns, n), p=q)
    encoders = np.empty((L, e.size**n, Mm * Ns))
    coverings = []
    hsw_codes: list[list[HswCode]] = []
    for l in range(L):
        cov = covering_encoder(
            q, back, n, Mm * Ns, cover_delta, eps, rng, sets=sets,
            table=codebook[l].reshape(Mm * Ns, n),
        )
        coverings.append(cov)
        encoders[l] = cov.encoder
        hsw_codes.append(
            [build_hsw(ext.induced, n, rates.S, rng, codewords=codebook[l, m]) for m in range(Mm)]
        )
    return SimulationCode(e, w, n, rates, codebook, encoders, hsw_codes, coverings,
                          cover_delta, eps)


@dataclass(frozen=True)
class SimulationOutcome:
    xn: np.ndarray
    l: int
    m: int
    s: int
    s_prime: int
    y_tilde: np.ndarray
    y_hat: np.ndarray
    post_state: np.ndarray
    disturbance: float
    failed: bool


def simulate_once(
    code: SimulationCode,
    rng: np.random.Generator,
    xn=None,
    l: int | None = None,
) -> SimulationOutcome:
    """Run the protocol once; ``xn`` is drawn from ``p^n`` when omitted.

    A fail outcome of Bob's measurement is decoded as ``s' = 0``.
    """
    L, Mm, Ns = code.shape
    if xn is None:
        xn = rng.choice(code.nx, size=code.n, p=code.ensemble.prior)
    xn = np.asarray(xn, dtype=int)
    if l is None:
        l = int(rng.integers(L))
    row = code.encoders[l, int(word_index(xn, code.nx)[0])]
    total = row.sum()
    if not np.isfinite(total) or abs(total - 1.0) > 1e-9:
        raise ProtocolError(f"encoder row for l={l} sums to {total}")
    ms = int(rng.choice(row.size, p=row / total))
    m, s = divmod(ms, Ns)
    meas = measure(code.hsw[l][m], code.source_state(xn), rng)
    s_prime = 0 if meas.failed else meas.outcome
    return SimulationOutcome(
        xn=xn,
        l=l,
        m=m,
        s=s,
        s_prime=s_prime,
        y_tilde=code.decode(l, m, s),
        y_hat=code.decode(l, m, s_prime),
        post_state=meas.post,
        disturbance=meas.disturbance,
        failed=meas.failed,
    )


def decoder_probabilities(code: SimulationCode, l: int, m: int, states: np.ndarray) -> np.ndarray:
    """``pi_lm(s'|x)`` for every source word, fail folded into ``s' = 0``.  Shape ``(|X|^n, Ns)``."""
    h = code.hsw[l][m]
    d = h.dim
    rho_t = states.transpose(0, 2, 1).reshape(states.shape[0], d * d)
    probs = (rho_t @ h.povm.reshape(h.size, d * d).T).real
    fail = (rho_t @ h.fail.reshape(-1)).real
    probs = np.clip(probs, 0.0, None)
    probs[:, 0] += np.clip(fail, 0.0, None)
    return probs / probs.sum(axis=1, keepdims=True)


def _accum_guard(code: SimulationCode) -> None:
    L, Mm, Ns = code.shape
    size = code.nx**code.n * code.ny**code.n * L * Mm * Ns
    if size > ACCUM_GUARD:
        raise GuardExceeded(f"exact accumulation of {size} terms exceeds {ACCUM_GUARD}")


@dataclass(frozen=True)
class SimulatedChannel:
    """Exact simulated channels over words.

    ``alice[x, y]`` is ``W_tilde(y|x)``; ``joint[x, y_tilde, y_hat]`` includes
    Bob's decoding of his actual side information.
    """

    alice: np.ndarray
    joint: np.ndarray


def exact_simulated_channel(code: SimulationCode) -> SimulatedChannel:
    _accum_guard(code)
    L, Mm, Ns = code.shape
    nxw, nyw = code.nx**code.n, code.ny**code.n
    states = code.all_source_states()
    alice = np.zeros((nxw, nyw))
    joint = np.zeros((nxw, nyw, nyw))
    for l in range(L):
        enc = code.encoders[l].reshape(nxw, Mm, Ns)
        for m in range(Mm):
            words = word_index(code.codebook[l, m], code.ny)
            a = enc[:, m, :] / L
            np.add.at(alice.T, words, a.T)
            b = decoder_probabilities(code, l, m, states)
            pair = a[:, :, None] * b[:, None, :]  # [x, s, s']
            flat = joint.reshape(nxw, nyw * nyw)
            cols = (words[:, None] * nyw + words[None, :]).ravel()
            np.add.at(flat.T, cols, pair.reshape(nxw, -1).T)
    return SimulatedChannel(alice, joint)


def word_channel(w: np.ndarray, n: int) -> np.ndarray:
    """``W^n(y^n|x^n)`` over lexicographically ranked words."""
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, w)
    return out


def word_prior(p: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(n):
        out = np.kron(out, p)
    return out


@dataclass(frozen=True)
class ErrorReport:
    """Simulation error of a code.

    Attributes:
        classical: L1 distance of the ``(X^n, Y_tilde^n, Y_hat^n)`` joint from
            the ideal ``p^n W^n delta``.
        classical_se: its standard error (0 when computed exactly).
        alice_only: L1 distance with perfect decoding (Bob outputs ``Y_tilde``).
        disturbance: mean trace distance between Bob's state before and after
            measuring.
        disturbance_se: standard error of ``disturbance``.
        joint_state: full operator distance, only for ``n <= 3``.
        exact: whether ``classical`` was computed exactly.
    """

    classical: float
    classical_se: float
    alice_only: float
    disturbance: float
    disturbance_se: float
    joint_state: float | None
    exact: bool
    trials: int


def estimate_simulation_error(
    code: SimulationCode,
    trials: int,
    rng: np.random.Generator,
    joint_state: bool = True,
) -> ErrorReport:
    """Error of the simulated joint against ``p^n(x) W^n(y|x) delta(y_tilde, y_hat)``.

    The classical part is exact whenever the accumulation guard allows it and
    estimated by Monte Carlo otherwise; the disturbance is always sampled with
    ``trials`` runs.
    """
    p = word_prior(code.ensemble.prior, code.n)
    exact = True
    try:
        sim = exact_simulated_channel(code)
    except GuardExceeded:
        exact = False
    disturb = np.zeros(max(trials, 0))
    mc_hits: dict[tuple[int, int, int], int] = {}
    for t in range(trials):
        out = simulate_once(code, rng)
        disturb[t] = out.disturbance
        if not exact:
            key = (
                int(word_index(out.xn, code.nx)[0]),
                int(word_index(out.y_tilde, code.ny)[0]),
                int(word_index(out.y_hat, code.ny)[0]),
            )
            mc_hits[key] = mc_hits.get(key, 0) + 1
    if exact:
        wn = word_channel(code.channel, code.n)
        target = np.zeros_like(sim.joint)
        idx = np.arange(wn.shape[1])
        target[:, idx, idx] = wn
        classical = float(np.abs(p[:, None, None] * (sim.joint - target)).sum())
        alice_only = float(np.abs(p[:, None] * (sim.alice - wn)).sum())
        classical_se = 0.0
    else:
        classical, classical_se = _mc_l1(code, mc_hits, trials)
        alice_only = float("nan")
    js = None
    if joint_state and code.n <= JOINT_STATE_MAX_N:
        js = joint_state_distance(code)
    d_mean = float(disturb.mean()) if trials else float("nan")
    d_se = float(disturb.std(ddof=1) / np.sqrt(trials)) if trials > 1 else float("nan")
    return ErrorReport(classical, classical_se, alice_only, d_mean, d_se, js, exact, trials)


def _mc_l1(code: SimulationCode, hits: dict, trials: int) -> tuple[float, float]:
    """Plug-in L1 estimate ``sum |f - t|`` over observed cells plus unobserved target mass.

    Target probabilities are exact; the standard error uses the multinomial
    delta method on the observed cells.
    """
    p = code.ensemble.prior
    w = code.channel
    total = 0.0
    covered = 0.0
    var = 0.0
    for (xi, yt, yh), cnt in hits.items():
        f = cnt / trials
        xs = _unrank(xi, code.nx, code.n)
        ys = _unrank(yt, code.ny, code.n)
        t = float(np.prod(p[xs]) * np.prod(w[xs, ys])) if yt == yh else 0.0
        total += abs(f - t)
        covered += t
        var += f * (1 - f)
    total += max(0.0, 1.0 - covered)
    return total, float(np.sqrt(var / trials))


def _unrank(idx: int, base: int, n: int) -> np.ndarray:
    return (idx // base ** np.arange(n - 1, -1, -1)) % base


def joint_state_distance(code: SimulationCode) -> float:
    """``sum_{x, y~, y^} || sigma_{x y~ y^} - tau_{x y~ y^} ||_1`` on the post-measurement system.

    ``tau`` is the ideal ``p(x) W(y~|x) delta(y~, y^) rho_x`` and ``sigma`` the
    sub-normalised post-measurement state of Bob for each classical triple.
    Exponential in ``n``; restricted to ``n <= 3``.
    """
    if code.n > JOINT_STATE_MAX_N:
        raise GuardExceeded("full joint state distance is only computed for n <= 3")
    L, Mm, Ns = code.shape
    nxw, nyw = code.nx**code.n, code.ny**code.n
    p = word_prior(code.ensemble.prior, code.n)
    wn = word_channel(code.channel, code.n)
    states = code.all_source_states()
    d = states.shape[1]
    sigma = np.zeros((nxw, nyw, nyw, d, d), dtype=complex)
    for l in range(L):
        enc = code.encoders[l].reshape(nxw, Mm, Ns)
        for m in range(Mm):
            h = code.hsw[l][m]
            words = word_index(code.codebook[l, m], code.ny)
            roots = [h.sqrt_element(sp) for sp in range(h.size)] + [h.sqrt_element(h.size)]
            for x in range(nxw):
                rho = states[x]
                posts = [r @ rho @ r for r in roots]
                posts[0] = posts[0] + posts[-1]
                for s in np.flatnonzero(enc[x, m] > 0):
                    wgt = p[x] * enc[x, m, s] / L
                    for sp in range(Ns):
                        sigma[x, words[s], words[sp]] += wgt * posts[sp]
    total = 0.0
    for x in range(nxw):
        for yt in range(nyw):
            for yh in range(nyw):
                tau = p[x] * wn[x, yt] * states[x] if yt == yh else 0.0
                diff = sigma[x, yt, yh] - tau
                if np.any(diff != 0):
                    total += trace_norm(diff)
    return float(total)


def derandomize(
    e: Ensemble,
    w: np.ndarray,
    n: int,
    rates: Rates,
    candidates: int,
    rng: np.random.Generator,
    eval_seed: int = 0,
    trials: int = 0,
    **build_kw,
) -> tuple[SimulationCode, float, list[float]]:
    """Build ``candidates`` independent codes and keep the one with the smallest error.

    Every candidate is scored with the same evaluation seed, so the ranking
    depends only on the codes.  Returns the best code, its score and all scores.
    """
    if candidates < 1:
        raise ValueError("need at least one candidate")
    best = None
    scores = []
    for _ in range(candidates):
        code = build_simulation_code(e, w, n, rates, rng, **build_kw)
        rep = estimate_simulation_error(code, trials, np.random.default_rng(eval_seed),
                                        joint_state=False)
        scores.append(rep.classical)
        if best is None or rep.classical < best[1]:
            best = (code, rep.classical)
    return best[0], best[1], scores


@dataclass(frozen=True)
class NaiveReport:
    """Local channel application followed by typical-set compression of ``y^n``."""

    n: int
    rate: float
    error: float
    entropy_rate: float
    default_R: float
    rate_gap: float


def naive_baseline(e: Ensemble, w: np.ndarray, n: int, delta: float = 0.1) -> NaiveReport:
    """Error and rate of sending a typical-set index of ``y^n``.

    Outputs outside ``T^n_{q,delta}`` are decoded as a fixed typical word, so
    the joint error is exactly ``2 (1 - q^n(T))``; the rate is
    ``log2 |T| / n``.
    """
    w = as_channel(w)
    ext = apply_channel(e, w)
    q = ext.q
    hy = shannon_entropy(q)
    summary = typical_set(q, n, delta)
    rate = np.log2(max(summary.cardinality, 1)) / n
    error = 2.0 * (1.0 - summary.mass)
    rates = default_rates(e, w, delta)
    return NaiveReport(n, float(rate), float(max(error, 0.0)), hy, rates.R, hy - rates.R)
