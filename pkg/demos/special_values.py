"""A table of special values at integers for one degree-two datum.

At s = -k the value is B_k when k and chi have opposite parity and zero
otherwise; at s = k >= 1 with matching parity it comes from the dual
coefficients.  Each closed form is set against a quadrature value.
"""

import itertools

import numpy as np

from shintani import (
    Method,
    MultiIndex,
    ParityType,
    ShintaniDatum,
    L_normalized,
    continue_L,
    special_value_neg,
    special_value_pos,
)


def main():
    d = ShintaniDatum([[1.2, -0.7], [0.5, 1.4]], [0.3, 0.65], [0.25, 0.6])
    print(f"{'chi':>7} {'s':>9}  {'closed form':>40}  {'quadrature':>40}")
    for chi in ParityType.all(2):
        for k in itertools.product(range(3), repeat=2):
            mi = MultiIndex(k)
            s = -np.array(k, dtype=complex)
            value, _ = special_value_neg(mi, d, chi)
            if mi.congruent(chi.complement()):
                ref = continue_L(s, d, chi).value
            else:
                ref = L_normalized(s, d, chi, method=Method.CONTOUR).value
            print(f"{str(chi.chi):>7} {str(tuple(-v for v in k)):>9}  {value:40.12f}  {ref:40.12f}")
            if min(k) >= 1 and mi.congruent(chi):
                value, _ = special_value_pos(mi, d, chi)
                ref = L_normalized(np.array(k, dtype=complex), d, chi, method=Method.INTEGRAL).value
                print(f"{str(chi.chi):>7} {str(k):>9}  {value:40.12f}  {ref:40.12f}")


if __name__ == "__main__":
    main()
