"""Randomized identities over generated inputs."""

import numpy as np
from hypothesis import given, settings, strategies as st

from shintani import ParityType, ShintaniDatum, SignVector, bernoulli_B, e_of, phi, reduce_torus
from shintani.cli import parse_complex

unit = st.floats(0.05, 0.95)
t_real = st.floats(-30.0, 30.0).filter(lambda t: abs(t) > 1e-3)
off_lattice = st.floats(-5.0, 5.0).filter(lambda v: abs(v - round(v)) > 1e-6)
entry = st.floats(0.3, 2.0).flatmap(lambda m: st.sampled_from([m, -m]))


@given(t_real, unit, unit)
def test_phi_reflection(t, x, y):
    # phi(-t, x, y) = -e(-y) phi(t, 1 - x, 1 - y)
    lhs = phi(-t, x, y)
    rhs = -e_of(-y) * phi(t, 1 - x, 1 - y)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


@given(off_lattice, off_lattice)
def test_reduce_torus_lands_in_the_cube(x, y):
    x0, y0, kx, ky, phase = reduce_torus([x], [y])
    assert 0 <= x0[0] < 1 and 0 <= y0[0] < 1
    assert np.allclose(x0 + kx, x) and np.allclose(y0 + ky, y)
    assert abs(abs(phase) - 1) < 1e-12


@given(st.lists(st.integers(0, 1), min_size=1, max_size=4))
def test_parity_complement_is_involution(bits):
    chi = ParityType(tuple(bits))
    assert chi.complement().complement() == chi
    for sigma in SignVector.all(chi.r):
        assert sigma.power(chi) * sigma.power(chi) == 1


@settings(max_examples=30, deadline=None)
@given(entry, entry, entry, entry, unit, unit, unit, unit, st.integers(0, 3), st.integers(0, 3),
       st.floats(0.5, 2.0).flatmap(lambda c: st.sampled_from([c, -c])))
def test_bernoulli_homogeneity(a, b, c, d, x1, x2, y1, y2, k1, k2, scale):
    A = np.array([[a, b], [c, d]])
    if abs(np.linalg.det(A)) < 1e-2:
        return
    datum = ShintaniDatum(A, [x1, x2], [y1, y2])
    b0, e0 = bernoulli_B(datum, (k1, k2))
    b1, e1 = bernoulli_B(datum.with_matrix(scale * A), (k1, k2))
    assert abs(b1 - scale ** (k1 + k2) * b0) <= 10 * (e1 + abs(scale) ** (k1 + k2) * e0) + 1e-13


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_complex_encodings_round_trip(z):
    assert parse_complex({"re": z.real, "im": z.imag}) == z
    assert parse_complex([z.real, z.imag]) == z
