import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidkit.model import ModelSpec, char_polynomial
from braidkit.polyalg import ComplexPolynomial, count_by_modulus, count_inside_batch, roots, roots_batch

CUBE_ROOT_14 = 1.4 ** (1 / 3)  # 1.1186889420813968


def test_difference_of_squares():
    rs = roots(ComplexPolynomial([-1, 0, 1]))
    np.testing.assert_allclose(sorted(rs.roots.real), [-1, 1], atol=1e-14)
    np.testing.assert_allclose(rs.moduli, [1, 1])
    assert rs.tie_groups == [(0, 2)]


def test_cube_roots():
    rs = roots(ComplexPolynomial([1.4, 0, 0, 1]))
    np.testing.assert_allclose(rs.moduli, [CUBE_ROOT_14] * 3, rtol=1e-13)
    angles = np.sort(np.mod(np.angle(rs.roots), 2 * np.pi))
    np.testing.assert_allclose(angles, [np.pi / 3, np.pi, 5 * np.pi / 3], atol=1e-12)


def test_hopf_characteristic_roots():
    rs = roots(char_polynomial(ModelSpec.h1(1.0, 1.4, 1.6, 3, 1), 0.0))
    assert rs.roots[0] == pytest.approx(-0.625)
    np.testing.assert_allclose(rs.moduli[1:], [CUBE_ROOT_14] * 3, rtol=1e-12)
    assert count_by_modulus(rs, 1.0, 1e-9) == (1, 0, 3)


def test_roots_on_unit_circle():
    assert count_by_modulus(roots(ComplexPolynomial([1, 0, 0, 1])), 1.0, 1e-9) == (0, 3, 0)


def test_tolerance_band():
    r = 1 + 1e-12
    rs = roots(ComplexPolynomial([-r, 1]))
    assert count_by_modulus(rs, 1.0, 1e-9) == (0, 1, 0)


def test_constant_polynomial():
    with pytest.raises(ValueError, match="constant polynomial"):
        roots(ComplexPolynomial([2.0]))


def test_degree_drop_counts_outside():
    p = ComplexPolynomial([1, 2, 0, 0], nominal_degree=3)
    assert p.degree == 1 and p.degree_drop == 2
    rs = roots(p)
    assert count_by_modulus(rs) == (1, 0, 2)


def test_exact_zero_roots():
    rs = roots(ComplexPolynomial([0, 0, -4, 1]))
    np.testing.assert_allclose(rs.roots, [0, 0, 4])


def test_large_energy_pushes_roots_to_origin():
    model = ModelSpec.h1(1.0, 1.4, 1.6, 3, 1)
    inside, _, outside = count_by_modulus(roots(char_polynomial(model, 1e6)))
    assert inside == 3 and outside == 1


def test_against_mpmath_high_precision():
    rng = np.random.default_rng(11)
    for _ in range(20):
        c = rng.normal(size=8) + 1j * rng.normal(size=8)
        exact = mpmath.polyroots([mpmath.mpc(z.real, z.imag) for z in c[::-1]], maxsteps=200, extraprec=60)
        exact = np.array([complex(z) for z in exact])
        got = roots(ComplexPolynomial(c)).roots
        d = np.abs(got[:, None] - exact[None, :]).min(axis=1)
        assert d.max() < 1e-10 * max(1, np.abs(exact).max())


def test_batch_matches_single():
    rng = np.random.default_rng(5)
    rows = rng.normal(size=(30, 6)) + 1j * rng.normal(size=(30, 6))
    rows[3, -1] = 0  # degree drop in one row
    rows[4, 0] = 0  # root at the origin
    for row, found in zip(rows, roots_batch(rows)):
        single = roots(ComplexPolynomial(row)).roots
        assert len(found) == len(single)
        d = np.abs(np.sort_complex(found)[:, None] - single[None, :]).min(axis=1)
        assert d.max() < 1e-9
    inside, on = count_inside_batch(rows)
    for i, row in enumerate(rows):
        assert inside[i] == count_by_modulus(roots(ComplexPolynomial(row)))[0]
    assert not on.any()


def test_tight_cluster_keeps_vieta():
    z = np.array([-2.625j, 0.0078125 - 2.625j, -2.62890625j, -2.62890625j])
    c = np.poly(z)[::-1]
    for found in (roots(ComplexPolynomial(c)).roots, roots_batch(c[None])[0]):
        np.testing.assert_allclose(np.poly(found), np.poly(z), atol=1e-12 * np.abs(c).max())


@settings(max_examples=80, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=1, max_size=9))
def test_reconstruct_from_roots(zs):
    z = np.array(zs)
    c = np.poly(z)[::-1]  # ascending
    rs = roots(ComplexPolynomial(c))
    assert len(rs) == len(z)
    # Vieta: the monic polynomial built from the roots reproduces the input
    np.testing.assert_allclose(np.poly(rs.roots), np.poly(z), atol=1e-7 * max(1, np.abs(c).max()))
    assert np.all(np.diff(rs.moduli) >= 0)
