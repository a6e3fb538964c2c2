import numpy as np
import pytest

from app.config.config_model import AppConfig
from app.core.algebra import CliffordDim, Multivector
from app.core.eigenbasis import EigenIndex, psi
from app.core.errors import SignalSpecError
from app.core.signals import build_signal, build_window, parse_signal, parse_terms
from app.core.transform import CliffordField

POINTS = np.array([[0.0, 0.0], [0.3, -0.8], [1.2, 0.4]])


def test_terms_and_coefficients():
    dim = CliffordDim(2)
    terms = parse_terms("gaussian(1.5) + psi(odd,0,1,1) * 0.5 * e{1,2}", dim)
    assert [t.kind for t in terms] == ['gaussian', 'psi']
    assert terms[0].params == (1.5,)
    assert terms[1].params == ('odd', 0, 1, 1)
    assert terms[1].coefficient.is_close(Multivector.blade(dim, (1, 2), 0.5))
    assert terms[1].text == "psi(odd,0,1,1) * 0.5 * e{1,2}"


def test_bare_gaussian_has_unit_scale():
    assert parse_terms("gaussian", CliffordDim(4))[0].params == (1.0,)
    assert parse_terms("gaussian()", CliffordDim(4))[0].params == (1.0,)


@pytest.mark.parametrize("spec", [
    "", "   ", "* 2", "gaussian * e1", "gaussian * e{3}", "gaussian(abc)", "gaussian(-1)", "gaussian(0)",
    "sinc", "psi(odd,0,0,0)", "psi(mixed,0,0,1)",
])
def test_invalid_selectors(spec):
    with pytest.raises(SignalSpecError):
        parse_terms(spec, CliffordDim(2))


def test_signal_values_and_name():
    dim = CliffordDim(2)
    field = parse_signal("gaussian + gaussian(2) * e{1,2}", dim)
    assert field.name == "gaussian+gaussian(2)*e{1,2}"
    expected = CliffordField.gaussian(dim)(POINTS)
    expected = expected + CliffordField.gaussian(dim, 2.0).right_mul(Multivector.blade(dim, (1, 2)))(POINTS)
    np.testing.assert_allclose(field(POINTS), expected)
    assert field.radial
    assert field.has_spectrum


def test_basis_term_keeps_its_spectrum():
    dim = CliffordDim(2)
    field = parse_signal("psi(odd,0,0,1)", dim)
    reference = psi(EigenIndex('odd', 0, 0), dim)
    np.testing.assert_allclose(field(POINTS), reference(POINTS))
    np.testing.assert_allclose(field.spectrum(POINTS), reference.spectrum(POINTS))


def test_basis_index_beyond_generators():
    with pytest.raises(SignalSpecError) as info:
        parse_signal("psi(even,0,1,9)", CliffordDim(2))
    assert info.value.context["term"] == "psi(even,0,1,9)"


def test_signal_and_window_from_config():
    config = AppConfig(algebra={'dim': 2}, signal={'spec': 'gaussian(0.5)'}, window={'sigma': 2.0})
    signal = build_signal(config)
    window = build_window(config)
    np.testing.assert_allclose(signal(POINTS), CliffordField.gaussian(CliffordDim(2), 0.5)(POINTS))
    np.testing.assert_allclose(window.profile(POINTS), np.exp(-np.sum(POINTS ** 2, axis=1) / 8.0))
