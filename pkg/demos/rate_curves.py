"""Trace the two rate curves for binary sources.

Prints D(R), the common randomness that can be distilled from the |0>/|+>
source with communication R, and the Wyner-Ziv rate of a uniform bit whose
side information is a copy flipped with probability 0.25.

    python3 demos/rate_curves.py
"""

import numpy as np

from cqsim.qinfo import holevo_information, reference_ensemble
from cqsim.rates import cr_curve, doubly_symmetric_joint, hamming_distortion, wyner_ziv_curve


def main():
    e = reference_ensemble()
    print(f"I(X;B) = {holevo_information(e):.4f}\n")
    print("   R     D(R)")
    for p in cr_curve(e, np.linspace(0, 0.5, 6), budget=1500):
        print(f"{p.abscissa:5.2f}  {p.ordinate:.4f}")

    print("\n   d     R_Z(d)")
    joint = doubly_symmetric_joint(0.25)
    for p in wyner_ziv_curve(joint, hamming_distortion(2), np.linspace(0, 0.25, 6), budget=1500):
        print(f"{p.abscissa:5.2f}  {p.ordinate:.4f}")


if __name__ == "__main__":
    main()
