"""Outer bound and corner points for redistributing part of a random pure state.

    python3 demos/redistribution_region.py
"""

import numpy as np

from cqsim.redistribution import haar_state, region_report


def main():
    rng = np.random.default_rng(3)
    for dims in ([2, 2, 2, 2], [2, 1, 2, 2], [2, 2, 2, 1]):
        rep = region_report(haar_state(dims, rng))
        print(f"dims (R, A_hat, B_hat, B) = {dims}")
        print(f"  Q >= {rep.q_min:.4f},  Q + E >= {rep.qe_sum_min:.4f}")
        for c in rep.corners:
            print(f"  {c.label}: Q={c.Q:.4f} E={c.E:+.4f} inside={rep.contains(c)}")
        if rep.fqsw_tight is not None or rep.fqrs_tight is not None:
            print(f"  tight: fqsw={rep.fqsw_tight} fqrs={rep.fqrs_tight}")


if __name__ == "__main__":
    main()
