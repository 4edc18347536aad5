"""Degree one with A = 1, x = y = 1/2: L_1(s) equals 2^s beta(s).

Prints the library value next to the alternating series for beta, by every
method that applies, and the special values at s = 1, 0, -2.
"""

import math

from shintani import Method, ShintaniDatum, L_normalized


def beta(s, terms=200000):
    # plain partial sum with the last term halved (an averaged alternating tail)
    total = sum((-1) ** m * (2 * m + 1) ** (-s) for m in range(terms))
    return total - 0.5 * (-1) ** (terms - 1) * (2 * terms - 1) ** (-s)


def main():
    d = ShintaniDatum([[1.0]], [0.5], [0.5])
    for s in (2, 3, 4):
        ref = 2 ** s * beta(s)
        print(f"s = {s}:  2^s beta(s) = {ref:.15f}")
        for method in (Method.AUTO, Method.DIRICHLET, Method.INTEGRAL):
            out = L_normalized([s], d, 1, method=method)
            print(f"    {method.value:9s} {out.value.real:.15f}  err {out.err:.1e}  ({out.method})")
    # the loop integral has a removable pole at positive integers, so it is
    # compared off the integers
    s = 2.5 + 0.5j
    a = L_normalized([s], d, 1, method=Method.INTEGRAL).value
    b = L_normalized([s], d, 1, method=Method.CONTOUR).value
    print(f"s = {s}: integral {a:.13f}, contour {b:.13f}")
    for s, closed in ((1, math.pi / 2), (0, 0.5), (-2, -0.125)):
        out = L_normalized([s], d, 1)
        print(f"L_1({s:2d}) = {out.value.real:+.15f}   closed form {closed:+.15f}")


if __name__ == "__main__":
    main()
