"""Both sides of the functional equation for a random mixed-sign 2x2 datum.

The left side is evaluated at s on one quadrature grid, the right side at
1 - s with the dual datum (A*, y, 1 - x) on a second, independent grid.
"""

import numpy as np

from shintani import ParityType, fe_check
from shintani.cli import random_datum


def main(seed=1):
    rng = np.random.default_rng(seed)
    d = random_datum(rng, 2)
    print("A =", d.A.round(4).tolist())
    print("x =", d.x.round(4).tolist(), " y =", d.y.round(4).tolist())
    s = np.array([0.35 + 0.6j, 0.7 - 0.2j])
    for chi in ParityType.all(2):
        res = fe_check(s, d, chi)
        print(f"chi = {chi.chi}:  lhs {res.lhs.value:.12f}  rhs {res.rhs.value:.12f}  "
              f"|diff| {res.value:.1e}")


if __name__ == "__main__":
    main()
