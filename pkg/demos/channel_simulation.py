"""Simulate a noisy channel on a classical-quantum source and watch the error.

The source emits |0> or |+> with equal probability; the channel flips the
classical label with probability 0.1.  For each block length we build a few
random simulation codes at the default rates and report the exact error of the
classical joint distribution, then repeat with a communication rate well below
the minimum to show the error staying large.

    python3 demos/channel_simulation.py
"""

import numpy as np

from cqsim.protocol import Rates, build_simulation_code, default_rates, estimate_simulation_error
from cqsim.qinfo import binary_symmetric_channel, reference_ensemble, theorem1_region


def mean_error(e, w, n, rates, seeds=8):
    errs = []
    for seed in range(seeds):
        code = build_simulation_code(e, w, n, rates, np.random.default_rng(seed))
        errs.append(estimate_simulation_error(code, 0, None, joint_state=False).classical)
    return float(np.mean(errs)), code.shape


def main():
    e, w = reference_ensemble(), binary_symmetric_channel(0.1)
    region = theorem1_region(e, w)
    rates = default_rates(e, w, 0.02).with_margin(0.1)
    print(f"region: R >= {region.r_min:.4f}, R + C >= {region.sum_min:.4f}")
    print(f"rates used: R={rates.R:.4f} C={rates.C:.4f} S={rates.S:.4f}\n")
    print(" n   (L, M, N)      error   error with R = r_min/2")
    starved = Rates(0.5 * region.r_min, rates.C, rates.S)
    for n in (2, 4, 6):
        err, shape = mean_error(e, w, n, rates)
        low, _ = mean_error(e, w, n, starved)
        print(f"{n:2d}   {str(shape):12s}  {err:.3f}   {low:.3f}")


if __name__ == "__main__":
    main()
