"""Rate curves: common-randomness distillation and Wyner-Ziv with side information.

Both problems optimise over a test channel ``W(y|x)`` with ``|Y| = |X| + 1``.
The search is derivative-free: rows are softmax-parametrised, constraints
enter through an exterior quadratic penalty, and the final point is pulled
back into the feasible set along a segment towards a channel known to be
feasible.  For binary inputs a simplex grid at resolution 0.02 is evaluated
first; its best feasible point seeds the local search and certifies it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .qinfo import Ensemble, as_distribution, entropy_from_eigenvalues, partial_trace

GRID_RESOLUTION = 0.02
PENALTY = 1e3
SLACK_TOL = 1e-9


@dataclass(frozen=True)
class DistortionMeasure:
    """Single-letter distortion ``d(x, x_hat) >= 0``, extended additively to words."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 2 or not np.all(np.isfinite(t)) or np.any(t < 0):
            raise ValueError("distortion table must be a finite non-negative matrix")
        object.__setattr__(self, "table", t)

    @property
    def max(self) -> float:
        return float(self.table.max())

    def __call__(self, xn, xhat) -> float:
        """Per-letter average ``(1/n) sum_i d(x_i, xhat_i)``."""
        xn, xhat = np.asarray(xn, dtype=int), np.asarray(xhat, dtype=int)
        return float(self.table[xn, xhat].mean())


def _table(dist) -> np.ndarray:
    return dist.table if isinstance(dist, DistortionMeasure) else DistortionMeasure(dist).table


@dataclass(frozen=True)
class CurvePoint:
    """One point of a rate curve.

    Attributes:
        abscissa: ``R`` for distillation, ``d`` for Wyner-Ziv.
        ordinate: ``D(R)`` or ``R_Z(d)`` (``inf`` when infeasible).
        channel: optimal ``W[x, y]``.
        decoder: Wyner-Ziv reconstruction table ``[y, z] -> x_hat``.
        constraint_slack: non-negative when the constraint holds.
        certificate_gap: improvement of the local search over the grid
            certificate (``None`` without a grid).
        feasible: ``False`` only for Wyner-Ziv targets below the minimum distortion.
    """

    abscissa: float
    ordinate: float
    channel: np.ndarray | None
    decoder: np.ndarray | None = None
    constraint_slack: float = 0.0
    certificate_gap: float | None = None
    feasible: bool = True


# ---------------------------------------------------------------------------
# batched information quantities


def _plogp_sum(p: np.ndarray, axis) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return t.sum(axis=axis)


def classical_terms(prior: np.ndarray, W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(I(X;Y), q)`` for a batch of channels ``W[..., x, y]``."""
    joint = prior[:, None] * W
    q = joint.sum(axis=-2)
    hy = _plogp_sum(q, -1)
    hyx = (prior * _plogp_sum(W, -1)).sum(axis=-1)
    return hy - hyx, q


def holevo_of_channel(e: Ensemble, W: np.ndarray) -> np.ndarray:
    """``I(Y;B)`` of the induced ensemble, batched over leading axes of ``W``."""
    W = np.asarray(W, dtype=float)
    joint = e.prior[:, None] * W  # [..., x, y]
    unnorm = np.einsum("...xy,xij->...yij", joint, e.states)
    vals = np.linalg.eigvalsh(unnorm)  # eigenvalues of q(y) rho_y
    q = joint.sum(axis=-2)
    h_avg = entropy_from_eigenvalues(np.linalg.eigvalsh(e.average_state()))
    # sum_y q H(rho_y) = H(Y) - sum_y sum_k lambda log lambda of q rho_y
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.clip(vals, 0.0, None)
        ent_un = np.where(lam > 1e-15, -lam * np.log2(np.where(lam > 1e-15, lam, 1.0)), 0.0).sum(axis=-1)
    cond = ent_un.sum(axis=-1) - _plogp_sum(q, -1)
    return h_avg - cond


def distortion_of_channel(joint_xz: np.ndarray, dist: np.ndarray, W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimum expected distortion over decoders, batched over ``W``.

    Returns ``(distortion, decoder)`` with ``decoder[..., y, z]`` the optimal
    reconstruction.
    """
    # cost[..., y, z, xh] = sum_x p(x, z) W(y|x) d(x, xh)
    cost = np.einsum("xz,...xy,xh->...yzh", joint_xz, W, dist)
    dec = cost.argmin(axis=-1)
    return cost.min(axis=-1).sum(axis=(-2, -1)), dec


def wz_rate_of_channel(joint_xz: np.ndarray, W: np.ndarray) -> np.ndarray:
    """``I(X;Y) - I(Y;Z)`` batched over ``W``."""
    px = joint_xz.sum(axis=1)
    ixy, q = classical_terms(px, W)
    yz = np.einsum("xz,...xy->...yz", joint_xz, W)
    pz = joint_xz.sum(axis=0)
    iyz = _plogp_sum(q, -1) + _plogp_sum(pz, -1) - _plogp_sum(yz, (-2, -1))
    return ixy - iyz


# ---------------------------------------------------------------------------
# parametrisation and grids


def _snap(v: float) -> float:
    """Remove round-off below zero from a quantity that is non-negative in exact arithmetic."""
    return 0.0 if -1e-12 < v < 0 else v


def softmax_rows(theta: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    t = theta.reshape(shape)
    t = t - t.max(axis=1, keepdims=True)
    e = np.exp(t)
    return e / e.sum(axis=1, keepdims=True)


def logits_of(W: np.ndarray) -> np.ndarray:
    return np.log(np.clip(W, 1e-12, None)).ravel()


@lru_cache(maxsize=4)
def simplex_grid(k: int, resolution: float = GRID_RESOLUTION) -> np.ndarray:
    """All points of the ``k``-simplex whose coordinates are multiples of ``resolution``."""
    steps = int(round(1.0 / resolution))
    pts = []
    # stars and bars: choose k-1 bar positions among steps + k - 1 slots
    for bars in combinations(range(steps + k - 1), k - 1):
        prev = -1
        row = []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(steps + k - 1 - prev - 1)
        pts.append(row)
    return np.array(pts, dtype=float) / steps


def binary_channel_grid(ny: int, resolution: float = GRID_RESOLUTION, chunk: int = 64):
    """Yield chunks of ``(N, 2, ny)`` channels covering the product grid of two rows.

    Chunk ``i`` holds first rows ``i*chunk ... (i+1)*chunk - 1`` against every
    second row, so flat index ``a * rows + b`` addresses the pair ``(a, b)``.
    """
    rows = simplex_grid(ny, resolution)
    for i0 in range(0, rows.shape[0], chunk):
        a = rows[i0 : i0 + chunk]
        W = np.empty((a.shape[0], rows.shape[0], 2, ny))
        W[:, :, 0, :] = a[:, None, :]
        W[:, :, 1, :] = rows[None, :, :]
        yield W.reshape(-1, 2, ny)


def binary_grid_channel(ny: int, index: int, resolution: float = GRID_RESOLUTION) -> np.ndarray:
    rows = simplex_grid(ny, resolution)
    a, b = divmod(int(index), rows.shape[0])
    return np.stack([rows[a], rows[b]])


@dataclass
class _Grid:
    ny: int
    first: np.ndarray
    second: np.ndarray


_GRID_CACHE: dict = {}


def _cr_grid(e: Ensemble) -> _Grid:
    key = ("cr", e.prior.tobytes(), e.states.tobytes())
    if key not in _GRID_CACHE:
        iyb, gap = [], []
        for W in binary_channel_grid(e.size + 1):
            h = holevo_of_channel(e, W)
            ixy, _ = classical_terms(e.prior, W)
            iyb.append(h)
            gap.append(ixy - h)
        _GRID_CACHE[key] = _Grid(e.size + 1, np.concatenate(iyb), np.concatenate(gap))
    return _GRID_CACHE[key]


def _wz_grid(joint_xz: np.ndarray, dist: np.ndarray) -> _Grid:
    key = ("wz", joint_xz.tobytes(), dist.tobytes())
    if key not in _GRID_CACHE:
        rate, dd = [], []
        for W in binary_channel_grid(joint_xz.shape[0] + 1):
            rate.append(wz_rate_of_channel(joint_xz, W))
            dd.append(distortion_of_channel(joint_xz, dist, W)[0])
        _GRID_CACHE[key] = _Grid(joint_xz.shape[0] + 1, np.concatenate(rate), np.concatenate(dd))
    return _GRID_CACHE[key]


# ---------------------------------------------------------------------------
# feasibility restoration


def _restore(W: np.ndarray, anchor: np.ndarray, violation, steps: int = 60) -> np.ndarray:
    """Smallest mix ``(1 - t) W + t anchor`` with ``violation <= 0``; ``anchor`` must be feasible."""
    if violation(W) <= 0:
        return W
    ts = np.linspace(0.0, 1.0, 41)
    hi = next(t for t in ts[1:] if violation((1 - t) * W + t * anchor) <= 0)
    lo = hi - ts[1]
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if violation((1 - mid) * W + mid * anchor) <= 0:
            hi = mid
        else:
            lo = mid
    return (1 - hi) * W + hi * anchor


def _local_search(objective, violation, starts, shape, anchor, budget):
    """Penalised Powell search from each start; returns the best restored channel."""
    best_W, best_val = None, np.inf
    for W0 in starts:
        def f(theta):
            W = softmax_rows(theta, shape)
            return objective(W) + PENALTY * max(0.0, violation(W)) ** 2

        res = minimize(f, logits_of(W0), method="Powell",
                       options={"maxfev": budget, "xtol": 1e-6, "ftol": 1e-10})
        W = _restore(softmax_rows(res.x, shape), anchor, violation)
        for cand in (W, _restore(W0, anchor, violation)):
            val = objective(cand)
            if val < best_val:
                best_W, best_val = cand, val
    return best_W, best_val


def _random_starts(rng, k, shape):
    return [rng.dirichlet(np.ones(shape[1]), size=shape[0]) for _ in range(k)]


# ---------------------------------------------------------------------------
# common randomness distillation


def cr_distillation(
    e: Ensemble,
    R: float,
    starts: int = 6,
    budget: int = 4000,
    rng: np.random.Generator | None = None,
    warm: np.ndarray | None = None,
    grid: bool | None = None,
) -> CurvePoint:
    """``D(R) = max I(Y;B)`` subject to ``I(X;Y) - I(Y;B) <= R``.

    Args:
        e: the classical-quantum source.
        R: communication rate, ``R >= 0``.
        starts: number of random starting channels.
        budget: function evaluations per start.
        rng: randomness for the starts.
        warm: extra starting channel (e.g. the optimum at a smaller ``R``).
        grid: evaluate the resolution-0.02 grid certificate; defaults to
            ``True`` for binary inputs.
    """
    if R < 0:
        raise ValueError("R must be non-negative")
    rng = rng if rng is not None else np.random.default_rng(0)
    nx = e.size
    shape = (nx, nx + 1)
    const = np.tile(np.eye(1, nx + 1), (nx, 1))

    def gap(W):
        ixy, _ = classical_terms(e.prior, W)
        return float(ixy - holevo_of_channel(e, W) - R)

    def objective(W):
        return -float(holevo_of_channel(e, W))

    start_list = _random_starts(rng, starts, shape)
    start_list.append(np.hstack([np.eye(nx), np.zeros((nx, 1))]))
    if warm is not None:
        start_list.append(warm)
    use_grid = (nx == 2) if grid is None else grid
    cert = None
    if use_grid:
        g = _cr_grid(e)
        ok = g.second <= R + SLACK_TOL
        i = int(np.argmax(np.where(ok, g.first, -np.inf)))
        cert = float(g.first[i])
        start_list.append(binary_grid_channel(g.ny, i))
    W, val = _local_search(objective, gap, start_list, shape, const, budget)
    d = _snap(-val)
    return CurvePoint(
        abscissa=R,
        ordinate=d,
        channel=W,
        constraint_slack=-gap(W),
        certificate_gap=None if cert is None else d - cert,
    )


def cr_curve(e: Ensemble, R_values, rng: np.random.Generator | None = None, **kw) -> list[CurvePoint]:
    """``D(R)`` on increasing ``R``, each search warm-started at the previous optimum."""
    rng = rng if rng is not None else np.random.default_rng(0)
    out, warm = [], None
    for R in sorted(R_values):
        pt = cr_distillation(e, R, rng=rng, warm=warm, **kw)
        out.append(pt)
        warm = pt.channel
    return out


# ---------------------------------------------------------------------------
# Wyner-Ziv


def hamming_distortion(k: int) -> np.ndarray:
    return 1.0 - np.eye(k)


def min_distortion(joint_xz: np.ndarray, dist) -> float:
    """Distortion reached when the decoder knows ``x`` exactly."""
    dist = _table(dist)
    px = joint_xz.sum(axis=1)
    return float((px * dist.min(axis=1)).sum())


def wyner_ziv_rate(
    joint_xz: np.ndarray,
    dist: np.ndarray,
    d: float,
    starts: int = 6,
    budget: int = 4000,
    rng: np.random.Generator | None = None,
    warm: np.ndarray | None = None,
    grid: bool | None = None,
) -> CurvePoint:
    """``R_Z(d) = min I(X;Y) - I(Y;Z)`` subject to ``E d(X, D(Y, Z)) <= d``.

    The reconstruction ``D(y, z)`` is the expected-distortion minimiser for
    each channel.  Targets below :func:`min_distortion` return an infeasible
    point with ``ordinate = inf``.
    """
    if d < 0:
        raise ValueError("distortion target must be non-negative")
    joint_xz = np.asarray(joint_xz, dtype=float)
    as_distribution(joint_xz.ravel())
    dist = _table(dist)
    rng = rng if rng is not None else np.random.default_rng(0)
    nx = joint_xz.shape[0]
    shape = (nx, nx + 1)
    dmin = min_distortion(joint_xz, dist)
    if d < dmin - SLACK_TOL:
        return CurvePoint(d, float("inf"), None, feasible=False, constraint_slack=d - dmin)
    ident = np.hstack([np.eye(nx), np.zeros((nx, 1))])

    def violation(W):
        return float(distortion_of_channel(joint_xz, dist, W)[0] - d)

    def objective(W):
        return float(wz_rate_of_channel(joint_xz, W))

    start_list = _random_starts(rng, starts, shape)
    start_list.append(np.tile(np.eye(1, nx + 1), (nx, 1)))
    if warm is not None:
        start_list.append(warm)
    use_grid = (nx == 2) if grid is None else grid
    cert = None
    if use_grid:
        g = _wz_grid(joint_xz, dist)
        ok = g.second <= d + SLACK_TOL
        i = int(np.argmin(np.where(ok, g.first, np.inf)))
        cert = float(g.first[i])
        start_list.append(binary_grid_channel(g.ny, i))
    W, val = _local_search(objective, violation, start_list, shape, ident, budget)
    _, dec = distortion_of_channel(joint_xz, dist, W)
    val = _snap(val)
    return CurvePoint(
        abscissa=d,
        ordinate=val,
        channel=W,
        decoder=dec,
        constraint_slack=-violation(W),
        certificate_gap=None if cert is None else cert - val,
    )


def wyner_ziv_curve(joint_xz, dist, d_values, rng: np.random.Generator | None = None, **kw) -> list[CurvePoint]:
    """``R_Z(d)`` on increasing ``d`` with warm starts from the previous optimum."""
    dist = _table(dist)
    rng = rng if rng is not None else np.random.default_rng(0)
    out, warm = [], None
    for d in sorted(d_values):
        pt = wyner_ziv_rate(joint_xz, dist, d, rng=rng, warm=warm, **kw)
        out.append(pt)
        if pt.feasible:
            warm = pt.channel
    return out


def doubly_symmetric_joint(flip: float) -> np.ndarray:
    """Uniform binary X with ``Z = X`` flipped with probability ``flip``."""
    return 0.5 * np.array([[1 - flip, flip], [flip, 1 - flip]])


# ---------------------------------------------------------------------------
# rate-distortion codes from a simulation code


@dataclass(frozen=True)
class RDCodeReport:
    """Monte Carlo distortion of the per-``l`` rate-distortion codes.

    Attributes:
        per_l: mean distortion for each common-randomness value.
        per_l_se: standard errors of ``per_l``.
        best_l: index of the smallest distortion.
        best: ``per_l[best_l]``.
        average: mean over ``l`` (the distortion of the randomised code).
        target: single-letter distortion ``E d(X, D(Y, B))``.
    """

    per_l: np.ndarray
    per_l_se: np.ndarray
    best_l: int
    best: float
    average: float
    target: float


def single_letter_distortion(e: Ensemble, w: np.ndarray, dist, decoder: np.ndarray) -> float:
    """``sum_x p(x) sum_y W(y|x) sum_xh tr(Gamma^y_xh rho_x) d(x, xh)``.

    ``decoder`` has shape ``(|Y|, |X_hat|, d, d)``: one POVM on ``B`` per ``y``.
    """
    dist = _table(dist)
    probs = np.einsum("yhij,xji->xyh", decoder, e.states).real
    return float(np.einsum("x,xy,xyh,xh->", e.prior, w, probs, dist))


def rd_code_from_simulation(
    code,
    dist,
    decoder: np.ndarray,
    trials: int,
    rng: np.random.Generator,
) -> RDCodeReport:
    """Evaluate the rate-distortion code obtained from each ``l`` of a simulation code.

    For fixed ``l`` Alice sends ``m``; Bob measures his block, looks up
    ``y_hat`` and applies ``decoder[y_hat_i]`` to the ``i``-th site of the
    post-measurement state.  The expected distortion of that final
    measurement is computed exactly, so only ``x^n`` and the protocol
    randomness are sampled.

    Args:
        code: a built :class:`cqsim.protocol.SimulationCode`.
        dist: distortion measure on ``X x X_hat``.
        decoder: single-letter POVMs ``(|Y|, |X_hat|, d, d)``.
        trials: Monte Carlo runs per ``l``.
        rng: source of randomness.
    """
    from .protocol import simulate_once

    dist = _table(dist)
    decoder = np.asarray(decoder, dtype=complex)
    d, n = code.ensemble.dim, code.n
    dims = [d] * n
    L = code.shape[0]
    per_l = np.zeros(L)
    per_se = np.zeros(L)
    for l in range(L):
        vals = np.empty(trials)
        for t in range(trials):
            out = simulate_once(code, rng, l=l)
            total = 0.0
            for i in range(n):
                site = partial_trace(out.post_state, dims, [i])
                probs = np.einsum("hij,ji->h", decoder[out.y_hat[i]], site).real
                total += float(probs @ dist[out.xn[i]])
            vals[t] = total / n
        per_l[l] = vals.mean()
        per_se[l] = vals.std(ddof=1) / np.sqrt(trials) if trials > 1 else 0.0
    best = int(np.argmin(per_l))
    return RDCodeReport(
        per_l=per_l,
        per_l_se=per_se,
        best_l=best,
        best=float(per_l[best]),
        average=float(per_l.mean()),
        target=single_letter_distortion(code.ensemble, code.channel, dist, decoder),
    )


# ---------------------------------------------------------------------------
# single-letter bound with quantum side information


def helstrom_distortion(e: Ensemble, dist, W: np.ndarray) -> np.ndarray:
    """Smallest distortion of a binary reconstruction measured on ``B`` given ``y``.

    For each ``y`` the cost operators are ``A_xh = sum_x p(x) W(y|x) d(x, xh) rho_x``
    and the optimal two-outcome POVM reaches
    ``tr A_1 + (sum of negative eigenvalues of A_0 - A_1)``.  Batched over ``W``.
    """
    dist = _table(dist)
    if dist.shape[1] != 2:
        raise ValueError("closed-form decoder needs a binary reconstruction alphabet")
    W = np.asarray(W, dtype=float)
    a = np.einsum("x,...xy,xh,xij->...yhij", e.prior, W, dist, e.states)
    vals = np.linalg.eigvalsh(a[..., 0, :, :] - a[..., 1, :, :])
    tr1 = np.trace(a[..., 1, :, :], axis1=-2, axis2=-1).real
    return (tr1 + np.clip(vals, None, 0.0).sum(axis=-1)).sum(axis=-1)


def quantum_wz_single_letter(
    e: Ensemble,
    dist,
    d: float,
    starts: int = 6,
    budget: int = 4000,
    rng: np.random.Generator | None = None,
    warm: np.ndarray | None = None,
) -> CurvePoint:
    """``min I(X;Y) - I(Y;B)`` subject to a distortion ``<= d`` reached by measuring ``B`` given ``y``.

    This is the one-copy term of the regularised rate with quantum side
    information, so it upper-bounds that rate.  The reconstruction alphabet
    must be binary.
    """
    if d < 0:
        raise ValueError("distortion target must be non-negative")
    dist = _table(dist)
    rng = rng if rng is not None else np.random.default_rng(0)
    nx = e.size
    shape = (nx, nx + 1)
    dmin = float((e.prior * dist.min(axis=1)).sum())
    if d < dmin - SLACK_TOL:
        return CurvePoint(d, float("inf"), None, feasible=False, constraint_slack=d - dmin)
    ident = np.hstack([np.eye(nx), np.zeros((nx, 1))])

    def violation(W):
        return float(helstrom_distortion(e, dist, W) - d)

    def objective(W):
        return float(classical_terms(e.prior, W)[0] - holevo_of_channel(e, W))

    start_list = _random_starts(rng, starts, shape)
    start_list.append(np.tile(np.eye(1, nx + 1), (nx, 1)))
    if warm is not None:
        start_list.append(warm)
    W, val = _local_search(objective, violation, start_list, shape, ident, budget)
    return CurvePoint(d, _snap(val), W, constraint_slack=-violation(W))
