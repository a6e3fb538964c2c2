from fractions import Fraction
from math import comb

import numpy as np
import pytest

from app.config.config_model import EigenbasisModel
from app.core.algebra import CliffordDim
from app.core.eigenbasis import (
    EigenIndex, PolyMV, dirac_apply, dirac_matrix, eigen_indices, expected_eigenvalue, homogeneous_monomials,
    monogenic_basis, psi,
)
from app.core.transform import transform_values

OMEGA2 = np.array([[0.0, 0.0], [0.4, -0.9], [1.2, 0.3]])
OMEGA4 = np.array([[0.0, 0.0, 0.0, 0.0], [0.5, -0.3, 0.2, 0.1], [-0.6, 0.9, 0.0, 0.4]])


def test_dirac_of_vector_variable():
    dim = CliffordDim(2)
    x = PolyMV.monomial(dim, (1, 0), mask=0b01) + PolyMV.monomial(dim, (0, 1), mask=0b10)
    # ∂x = −d
    assert dirac_apply(x).terms == {(0, 0): {0: Fraction(-2)}}


def test_plane_monogenic_of_degree_one():
    dim = CliffordDim(2)
    p = PolyMV.monomial(dim, (1, 0)) + PolyMV.monomial(dim, (0, 1), mask=0b11, value=-1)
    assert dirac_apply(p).is_zero()


def test_monomial_order_and_matrix_shape():
    assert homogeneous_monomials(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert dirac_matrix(CliffordDim(2), 2).shape == (2 * 4, 3 * 4)


@pytest.mark.parametrize("d, k", [(2, 1), (2, 2), (2, 3), (4, 1)])
def test_monogenic_nullity(d, k):
    dim = CliffordDim(d)
    basis = monogenic_basis(k, dim, module='real')
    assert basis.nullity == 2 ** d * comb(k + d - 2, d - 2)
    for element in basis.elements:
        assert element.is_homogeneous(k)
        assert dirac_apply(element).is_zero()


def test_module_generators_in_the_plane():
    dim = CliffordDim(2)
    assert len(monogenic_basis(0, dim)) == 1
    assert len(monogenic_basis(1, dim)) == 1
    with pytest.raises(IndexError):
        monogenic_basis(1, dim)[2]


def test_eigen_index_validation():
    assert EigenIndex('odd', 1, 0).label == "psi(odd,1,0,1)"
    with pytest.raises(ValueError):
        EigenIndex('mixed', 0, 0)
    with pytest.raises(ValueError):
        EigenIndex('even', -1, 0)
    with pytest.raises(ValueError):
        EigenIndex('even', 0, 0, 0)


def test_expected_eigenvalues():
    dim4 = CliffordDim(4)
    assert expected_eigenvalue(EigenIndex('even', 1, 0), dim4) == -1
    assert expected_eigenvalue(EigenIndex('even', 0, 1), dim4, '+') == 1
    assert expected_eigenvalue(EigenIndex('odd', 0, 0), dim4) == -1
    assert expected_eigenvalue(EigenIndex('odd', 0, 0), CliffordDim(2)) == 1


def test_eigen_indices_enumeration():
    indices = eigen_indices(CliffordDim(2), max_j=1, max_k=1)
    assert len(indices) == 8
    assert indices[0] == EigenIndex('even', 0, 0, 1)


def test_index_beyond_generators():
    with pytest.raises(IndexError):
        psi(EigenIndex('even', 0, 1, 9), CliffordDim(2))


@pytest.mark.parametrize("idx", [
    EigenIndex('even', 0, 0), EigenIndex('even', 1, 0), EigenIndex('even', 0, 1), EigenIndex('odd', 0, 0),
    EigenIndex('odd', 1, 1),
])
def test_plane_basis_fields_are_eigenfunctions(idx, transform_grid2):
    dim = CliffordDim(2)
    field = psi(idx, dim)
    for sign in ('-', '+'):
        numeric = transform_values([field], OMEGA2, transform_grid2, sign=sign)[0]
        expected = expected_eigenvalue(idx, dim, sign).real * field(OMEGA2)
        np.testing.assert_allclose(numeric, expected, atol=1e-6)


@pytest.mark.parametrize("idx", [EigenIndex('even', 1, 0), EigenIndex('odd', 0, 0), EigenIndex('even', 0, 1)])
def test_space_basis_fields_are_eigenfunctions(idx, dim4, transform_grid4):
    field = psi(idx, dim4)
    numeric = transform_values([field], OMEGA4, transform_grid4)[0]
    np.testing.assert_allclose(numeric, expected_eigenvalue(idx, dim4).real * field(OMEGA4), atol=1e-6)


def test_attached_spectrum_uses_eigenvalue(dim4):
    idx = EigenIndex('odd', 0, 0)
    field = psi(idx, dim4)
    np.testing.assert_allclose(field.spectrum(OMEGA4), -field(OMEGA4), atol=1e-14)


def test_factor_order_changes_odd_fields():
    dim = CliffordDim(2)
    idx = EigenIndex('odd', 0, 1)
    swapped = psi(idx, dim, EigenbasisModel(odd_factor_order='m_then_x'))
    default = psi(idx, dim)
    assert not np.allclose(swapped(OMEGA2[1:]), default(OMEGA2[1:]))
