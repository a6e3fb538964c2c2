"""
Signal selectors.

A selector is a sum of terms joined by '+'. Each term is a base field
followed by optional right factors:

    gaussian                    e^{−|x|²/2}
    gaussian(1.5)               e^{−|x|²/(2·1.5²)}
    psi(odd,0,1,2)              basis field ψ of parity, j, k and 1-based l
    ... * 0.5 * e{1,2}          right multiplication by a number or a blade

Example: 'gaussian + psi(odd,0,0,1)*e{1,2}'.
"""

import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from app.config.config_model import AppConfig, EigenbasisModel
from app.core.algebra import CliffordDim, Multivector
from app.core.cstft import Window
from app.core.eigenbasis import EigenIndex, psi
from app.core.errors import CliffordError, SignalSpecError
from app.core.transform import CliffordField

logger = logging.getLogger(__name__)

# '+' outside parentheses and braces
_TERM_SPLIT = re.compile(r"\+(?![^(){}]*[)}])")
_GAUSSIAN = re.compile(r"gaussian(?:\(\s*(?P<sigma>[^)]*?)\s*\))?")
_PSI = re.compile(r"psi\(\s*(?P<parity>even|odd)\s*,\s*(?P<j>\d+)\s*,\s*(?P<k>\d+)\s*,\s*(?P<l>\d+)\s*\)")
_BLADE = re.compile(r"e\{\s*(?P<indices>[\d\s,]*)\s*\}")


@dataclass(frozen=True)
class SignalTerm:
    """One parsed term: a base field and its right coefficient."""
    kind: str
    params: Tuple
    coefficient: Multivector
    text: str


def _fail(message: str, spec: str, term: str) -> SignalSpecError:
    return SignalSpecError(message, {"spec": spec, "term": term.strip()})


def _parse_factor(piece: str, dim: CliffordDim, spec: str, term: str) -> Multivector:
    blade = _BLADE.fullmatch(piece)
    if blade:
        raw = [s for s in re.split(r"[\s,]+", blade.group('indices')) if s]
        try:
            return Multivector.blade(dim, tuple(int(i) for i in raw))
        except CliffordError as e:
            raise _fail(f"invalid blade {piece}: {e}", spec, term) from e
    try:
        return Multivector.scalar(dim, float(piece))
    except ValueError:
        raise _fail(f"unknown factor '{piece}'", spec, term) from None


def parse_terms(spec: str, dim: CliffordDim) -> List[SignalTerm]:
    """
    Split a selector into terms.

    Raises:
        SignalSpecError: For an empty selector or an unparseable term
    """
    if not spec or not spec.strip():
        raise SignalSpecError("empty signal selector", {"spec": spec})
    terms = []
    for term in _TERM_SPLIT.split(spec):
        pieces = [p.strip() for p in term.split('*')]
        if not pieces[0]:
            raise _fail("missing base field", spec, term)
        coefficient = Multivector.scalar(dim, 1.0)
        for piece in pieces[1:]:
            coefficient = coefficient * _parse_factor(piece, dim, spec, term)

        gaussian = _GAUSSIAN.fullmatch(pieces[0])
        basis = _PSI.fullmatch(pieces[0])
        if gaussian:
            raw_sigma = gaussian.group('sigma')
            try:
                sigma = 1.0 if raw_sigma in (None, "") else float(raw_sigma)
            except ValueError:
                raise _fail(f"invalid gaussian scale '{raw_sigma}'", spec, term) from None
            if sigma <= 0:
                raise _fail("gaussian scale must be positive", spec, term)
            terms.append(SignalTerm('gaussian', (sigma,), coefficient, term.strip()))
        elif basis:
            params = (basis.group('parity'), int(basis.group('j')), int(basis.group('k')), int(basis.group('l')))
            if params[3] < 1:
                raise _fail("psi index l starts at 1", spec, term)
            terms.append(SignalTerm('psi', params, coefficient, term.strip()))
        else:
            raise _fail(f"unknown base field '{pieces[0]}'", spec, term)
    return terms


def parse_signal(spec: str, dim: CliffordDim, config: Optional[EigenbasisModel] = None) -> CliffordField:
    """
    Field described by a selector, with its spectrum linked when every term has one.

    Raises:
        SignalSpecError: For unparseable selectors or a ψ index beyond the basis
    """
    field: Optional[CliffordField] = None
    for term in parse_terms(spec, dim):
        if term.kind == 'gaussian':
            base = CliffordField.gaussian(dim, term.params[0])
        else:
            try:
                base = psi(EigenIndex(*term.params), dim, config)
            except IndexError as e:
                raise _fail(str(e), spec, term.text) from e
        part = base.right_mul(term.coefficient)
        field = part if field is None else field + part
    field.name = spec.replace(" ", "")
    logger.debug(f"Parsed signal '{spec}' (radial={field.radial}, spectrum={field.has_spectrum})")
    return field


def build_signal(config: AppConfig) -> CliffordField:
    return parse_signal(config.signal.spec, CliffordDim(config.algebra.dim), config.eigenbasis)


def build_window(config: AppConfig) -> Window:
    return Window.gaussian(CliffordDim(config.algebra.dim), config.window.sigma)
