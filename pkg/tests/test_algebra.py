import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.core.algebra import (
    Blade, CliffordDim, Multivector, Vector1, blade_order, clifford_conjugate, embed_vectors, inner, mv_modulus,
    mv_product, weighted_product_sum, wedge,
)
from app.core.errors import DimensionError

DIM4 = CliffordDim(4)

coefficient = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)
multivectors = st.lists(coefficient, min_size=16, max_size=16).map(lambda c: Multivector(DIM4, np.array(c)))
vectors = st.lists(coefficient, min_size=4, max_size=4).map(Vector1.of)


@pytest.mark.parametrize("d", [1, 3, 5, 0, -2])
def test_odd_or_small_dimension_rejected(d):
    with pytest.raises(DimensionError, match="even"):
        CliffordDim(d)


def test_lambda_and_size():
    assert CliffordDim(2).lam == 0
    assert CliffordDim(6).lam == 2
    assert CliffordDim(4).size == 16


def test_blade_order_is_lexicographic():
    labels = [b.indices for b in blade_order(4)]
    assert labels[:6] == [(), (1,), (1, 2), (1, 2, 3), (1, 2, 3, 4), (1, 2, 4)]
    assert len(labels) == 16


def test_blade_validation():
    with pytest.raises(DimensionError):
        Blade((2, 1))
    with pytest.raises(DimensionError):
        Blade((0,))
    assert Blade((1, 3)).mask == 0b101
    assert Blade.from_mask(0b101) == Blade((1, 3))
    assert Blade((1, 2)).column == "e1_2"


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_units_square_to_minus_one(i):
    e = Multivector.blade(DIM4, (i,))
    assert (e * e).is_close(Multivector.scalar(DIM4, -1.0))


def test_units_anticommute():
    e1, e2 = Multivector.blade(DIM4, (1,)), Multivector.blade(DIM4, (2,))
    assert (e1 * e2).is_close(-(e2 * e1))
    assert (e1 * e2).is_close(Multivector.blade(DIM4, (1, 2)))


def test_bivector_squares_to_minus_one():
    e12 = Multivector.blade(DIM4, (1, 2))
    assert (e12 * e12).is_close(Multivector.scalar(DIM4, -1.0))


@settings(max_examples=50, deadline=None)
@given(multivectors, multivectors, multivectors)
def test_product_is_associative(a, b, c):
    left = (a * b) * c
    right = a * (b * c)
    assert left.is_close(right, tol=1e-9 * (1.0 + left.modulus()))


@settings(max_examples=50, deadline=None)
@given(multivectors, multivectors)
def test_conjugate_is_anti_automorphism(a, b):
    lhs = clifford_conjugate(a * b)
    rhs = clifford_conjugate(b) * clifford_conjugate(a)
    assert lhs.is_close(rhs, tol=1e-9 * (1.0 + lhs.modulus()))


@settings(max_examples=50, deadline=None)
@given(multivectors)
def test_conjugate_is_involution(a):
    assert clifford_conjugate(clifford_conjugate(a)) == a


@settings(max_examples=50, deadline=None)
@given(vectors, vectors)
def test_vector_product_splits_into_inner_and_wedge(x, y):
    product = x.embed(DIM4) * y.embed(DIM4)
    expected = Multivector.scalar(DIM4, -inner(x, y)) + wedge(x, y, DIM4)
    assert product.is_close(expected, tol=1e-10)
    assert product.grades(tol=1e-10) in ([], [0], [2], [0, 2])


@settings(max_examples=50, deadline=None)
@given(vectors)
def test_vector_square_is_minus_norm_squared(x):
    v = x.embed(DIM4)
    assert (v * v).is_close(Multivector.scalar(DIM4, -x.norm() ** 2), tol=1e-10)


def test_conjugate_of_vector_is_negation():
    x = Vector1.of([1.0, -2.0, 0.5, 3.0]).embed(DIM4)
    assert clifford_conjugate(x) == -x


def test_conjugate_conjugates_complex_coefficients():
    a = Multivector.scalar(DIM4, 1.0 + 2.0j)
    assert clifford_conjugate(a).scalar_part == 1.0 - 2.0j


def test_modulus():
    a = Multivector.from_terms(DIM4, {(): 3.0, (1, 2): 4.0})
    assert a.modulus() == pytest.approx(5.0)
    assert float(mv_modulus(a.coeffs)) == pytest.approx(5.0)


def test_batched_product_matches_elementwise(rng):
    a = rng.normal(size=(5, 16))
    b = rng.normal(size=(5, 16))
    batched = mv_product(a, b, 4)
    for row in range(5):
        single = Multivector(DIM4, a[row]) * Multivector(DIM4, b[row])
        np.testing.assert_allclose(batched[row], single.coeffs, atol=1e-12)


def test_weighted_product_sum_matches_loop(rng):
    a = rng.normal(size=(7, 16))
    b = rng.normal(size=(7, 16))
    w = rng.uniform(0.1, 1.0, size=7)
    reduced = weighted_product_sum(a, b, w, 4)
    expected = sum(w[n] * mv_product(a[n], b[n], 4) for n in range(7))
    np.testing.assert_allclose(reduced, expected, atol=1e-12)


def test_compact_operand_matches_full(rng):
    masks = (0, 0b11, 0b101)
    compact = rng.normal(size=(4, 3))
    full = np.zeros((4, 16))
    full[:, list(masks)] = compact
    b = rng.normal(size=(4, 16))
    np.testing.assert_allclose(mv_product(compact, b, 4, a_masks=masks), mv_product(full, b, 4), atol=1e-12)


def test_embed_vectors_places_grade_one():
    out = embed_vectors(np.array([[1.0, 2.0, 3.0, 4.0]]), 4)
    assert out[0, 1] == 1.0 and out[0, 2] == 2.0 and out[0, 4] == 3.0 and out[0, 8] == 4.0
    assert np.count_nonzero(out) == 4


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionError):
        Multivector.scalar(DIM4) + Multivector.scalar(CliffordDim(2))
    with pytest.raises(DimensionError):
        Multivector.blade(CliffordDim(2), (3,))
