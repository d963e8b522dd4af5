import numpy as np
import pytest

from cqsim.qinfo import binary_symmetric_channel, reference_ensemble


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ref():
    return reference_ensemble()


@pytest.fixture
def bsc():
    return binary_symmetric_channel(0.1)


def h2(p: float) -> float:
    """Binary entropy, written out independently of the package."""
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def loop_partial_trace(rho, dims, keep):
    """Partial trace by explicit index loops, used as an oracle."""
    import itertools

    n = len(dims)
    keep = sorted(keep)
    tr = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    out = np.zeros((dk, dk), dtype=complex)
    strides = [int(np.prod(dims[i + 1 :])) for i in range(n)]
    kept_ranges = [range(dims[i]) for i in keep]
    tr_ranges = [range(dims[i]) for i in tr]
    for a_idx, a in enumerate(itertools.product(*kept_ranges)):
        for b_idx, b in enumerate(itertools.product(*kept_ranges)):
            s = 0j
            for t in itertools.product(*tr_ranges):
                ra = rb = 0
                for pos, i in enumerate(keep):
                    ra += a[pos] * strides[i]
                    rb += b[pos] * strides[i]
                for pos, i in enumerate(tr):
                    ra += t[pos] * strides[i]
                    rb += t[pos] * strides[i]
                s += rho[ra, rb]
            out[a_idx, b_idx] = s
    return out


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
