import logging

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Add, Poly, Symbol, ZZ, div
from sympy.polys.matrices import DomainMatrix

from rimforge.components import Word
from rimforge.components.knots import KnotSpec, KnotSpecError, MarkedGroup, Mirror, Sum, Torus, wirtinger

logger = logging.getLogger(__name__)

t = Symbol("t")


class LaurentPoly:
    """
    Represents an integer Laurent polynomial in t.

    Coefficients are kept as a mapping of exponent to nonzero integer; the empty mapping is zero.
    """

    def __init__(self, coefficients: Optional[Dict[int, int]] = None):
        self.coefficients: Dict[int, int] = {
            exponent: coefficient for exponent, coefficient in (coefficients or {}).items() if coefficient != 0
        }

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> "LaurentPoly":
        return cls({exponent: coefficient})

    @classmethod
    def from_poly(cls, poly: Poly, shift: int = 0) -> "LaurentPoly":
        return cls({monom[0] + shift: int(coefficient) for monom, coefficient in poly.terms()})

    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def min_exponent(self) -> int:
        return min(self.coefficients) if self.coefficients else 0

    @property
    def max_exponent(self) -> int:
        return max(self.coefficients) if self.coefficients else 0

    def to_poly(self) -> Poly:
        """
        :return: sympy polynomial of t^-k * self, k the lowest exponent
        """
        if self.is_zero():
            return Poly(0, t, domain=ZZ)
        shift = self.min_exponent
        terms = {(exponent - shift,): coefficient for exponent, coefficient in self.coefficients.items()}
        return Poly(terms, t, domain=ZZ)

    def evaluate(self, value: int) -> int:
        """
        :param value: integer, must be a unit when the polynomial has negative exponents
        :return: integer value
        """
        total = 0
        for exponent, coefficient in self.coefficients.items():
            if exponent < 0:
                if value not in (1, -1):
                    raise ValueError(f"Cannot evaluate negative powers of t at [{value}] over the integers")
                total += coefficient * value ** (-exponent)
            else:
                total += coefficient * value**exponent
        return total

    def mirror(self) -> "LaurentPoly":
        """
        :return: the polynomial with t replaced by t^-1
        """
        return LaurentPoly({-exponent: coefficient for exponent, coefficient in self.coefficients.items()})

    def normalized(self) -> "LaurentPoly":
        """
        :return: the unit multiple with lowest exponent 0 and positive leading coefficient
        """
        if self.is_zero():
            return self
        shift = self.min_exponent
        sign = 1 if self.coefficients[self.max_exponent] > 0 else -1
        return LaurentPoly(
            {exponent - shift: sign * coefficient for exponent, coefficient in self.coefficients.items()}
        )

    def coefficient_multiset(self) -> Tuple[int, ...]:
        return tuple(sorted(self.coefficients.values()))

    def to_list(self) -> List[int]:
        """
        :return: coefficients from the lowest to the highest exponent, zeros included
        """
        return [self.coefficients.get(exponent, 0) for exponent in range(self.min_exponent, self.max_exponent + 1)]

    def to_text(self) -> str:
        if self.is_zero():
            return "0"
        _text = ""
        for exponent in sorted(self.coefficients):
            coefficient = self.coefficients[exponent]
            magnitude = abs(coefficient)
            if exponent == 0:
                term = str(magnitude)
            else:
                power = "t" if exponent == 1 else f"t^{exponent}"
                term = power if magnitude == 1 else f"{magnitude}*{power}"
            if not _text:
                _text = term if coefficient > 0 else f"-{term}"
            else:
                _text += f" + {term}" if coefficient > 0 else f" - {term}"
        return _text

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        total = dict(self.coefficients)
        for exponent, coefficient in other.coefficients.items():
            total[exponent] = total.get(exponent, 0) + coefficient
        return LaurentPoly(total)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({exponent: -coefficient for exponent, coefficient in self.coefficients.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        product: Dict[int, int] = {}
        for exponent, coefficient in self.coefficients.items():
            for other_exponent, other_coefficient in other.coefficients.items():
                key = exponent + other_exponent
                product[key] = product.get(key, 0) + coefficient * other_coefficient
        return LaurentPoly(product)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.coefficients.items())))

    def __repr__(self) -> str:
        """
        :return: String representation of a LaurentPoly
        """
        return f"LaurentPoly <{self.to_text()}>"


class AlexNormalForm:
    """
    Represents an Alexander polynomial in normal form.

    The polynomial is normalised to lowest exponent 0 with a positive leading coefficient, which makes it unique up to
    multiplication by units +/- t^k.
    """

    def __init__(self, poly: LaurentPoly):
        """
        :param poly: any unit multiple of a knot's Alexander polynomial
        """
        self.poly = poly.normalized()
        if self.poly.evaluate(1) not in (1, -1):
            raise KnotSpecError(f"Alexander polynomial [{self.poly.to_text()}] does not satisfy D(1) = +/-1")
        _coefficients = self.poly.to_list()
        self.palindromic: bool = _coefficients == _coefficients[::-1]

    @property
    def determinant(self) -> int:
        return abs(self.poly.evaluate(-1))

    def coefficient_multiset(self) -> Tuple[int, ...]:
        return self.poly.coefficient_multiset()

    def to_text(self) -> str:
        return self.poly.to_text()

    def to_dict(self) -> Dict:
        return {
            "polynomial": self.to_text(),
            "coefficients": self.poly.to_list(),
            "determinant": self.determinant,
            "palindromic": self.palindromic,
        }

    def __mul__(self, other: "AlexNormalForm") -> "AlexNormalForm":
        return AlexNormalForm(self.poly * other.poly)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AlexNormalForm) and self.poly == other.poly

    def __hash__(self) -> int:
        return hash(self.poly)

    def __repr__(self) -> str:
        """
        :return: String representation of an AlexNormalForm
        """
        return f"AlexNormalForm <{self.to_text()}>"


def fox_derivative(word: Word, generator: int, degrees: Sequence[int]) -> LaurentPoly:
    """
    Fox derivative of a word, abelianized to Z[t, t^-1]

    A letter g at a position whose prefix has degree s contributes t^s, a letter g^-1 contributes -t^(s - deg g).

    :param word: word in the generators
    :param generator: generator to differentiate by
    :param degrees: abelianization degree of each generator
    :return: abelianized derivative
    """
    if word.generators() and word.max_generator() >= len(degrees):
        raise KnotSpecError(f"Word {word!r} uses generators without a meridian degree")
    terms: Dict[int, int] = {}
    prefix = 0
    for index, sign in word:
        if index == generator:
            exponent = prefix if sign == 1 else prefix - degrees[index]
            terms[exponent] = terms.get(exponent, 0) + sign
        prefix += sign * degrees[index]
    return LaurentPoly(terms)


def alexander_matrix(group: MarkedGroup) -> List[List[LaurentPoly]]:
    """
    :return: Fox Jacobian of the relators, the meridian column deleted
    """
    presentation = group.presentation
    return [
        [fox_derivative(relator, generator, group.degrees) for generator in range(1, presentation.generator_count)]
        for relator in presentation.relators
    ]


def _expression(entry: LaurentPoly, shift: int):
    return Add(*[coefficient * t ** (exponent - shift) for exponent, coefficient in entry.coefficients.items()])


def _determinant(rows: List[List[LaurentPoly]]) -> LaurentPoly:
    if not rows:
        return LaurentPoly.monomial(0)
    ring = ZZ[t]
    shifts = 0
    entries = []
    for row in rows:
        shift = min((entry.min_exponent for entry in row if not entry.is_zero()), default=0)
        shifts += shift
        entries.append([ring.from_sympy(_expression(entry, shift)) for entry in row])
    matrix = DomainMatrix(entries, (len(rows), len(rows[0])), ring)
    return LaurentPoly.from_poly(Poly(ring.to_sympy(matrix.det()), t, domain=ZZ), shift=shifts)


def fox_alexander_polynomial(group: MarkedGroup) -> AlexNormalForm:
    """
    Alexander polynomial from a deficiency one presentation by Fox calculus

    :param group: knot group with one more generator than relators
    :return: normalised determinant of the Alexander matrix
    """
    presentation = group.presentation
    if len(presentation.relators) != presentation.generator_count - 1:
        raise KnotSpecError(
            f"Alexander matrix needs a deficiency one presentation, got {presentation.generator_count} generator(s) "
            f"and {len(presentation.relators)} relator(s)"
        )
    determinant = _determinant(alexander_matrix(group))
    if determinant.is_zero():
        raise KnotSpecError("Alexander matrix is degenerate, the knot description is probably malformed")
    return AlexNormalForm(determinant)


def alexander_polynomial(knot: KnotSpec) -> AlexNormalForm:
    """
    Alexander polynomial of a knot

    Connected sums multiply, mirrors substitute t^-1, everything else goes through Fox calculus on the knot group.

    :param knot: knot description
    :return: normalised Alexander polynomial
    """
    if isinstance(knot, Sum):
        return alexander_polynomial(knot.left) * alexander_polynomial(knot.right)
    if isinstance(knot, Mirror):
        return AlexNormalForm(alexander_polynomial(knot.inner).poly.mirror())
    polynomial = fox_alexander_polynomial(wirtinger(knot))
    logger.debug(f"Alexander polynomial of {knot.to_text()}: {polynomial.to_text()}")
    return polynomial


def torus_alexander_polynomial(p: int, q: int) -> AlexNormalForm:
    """
    Closed form (t^pq - 1)(t - 1) / ((t^p - 1)(t^q - 1)) for the torus knot T(p,q)
    """
    Torus(p, q)
    numerator = Poly(t ** (p * q) - 1, t, domain=ZZ) * Poly(t - 1, t, domain=ZZ)
    denominator = Poly(t**p - 1, t, domain=ZZ) * Poly(t**q - 1, t, domain=ZZ)
    quotient, remainder = div(numerator, denominator)
    if not remainder.is_zero:
        raise RuntimeError(f"Torus knot formula for T({p},{q}) did not divide exactly")
    return AlexNormalForm(LaurentPoly.from_poly(quotient))


def determinant(knot: KnotSpec) -> int:
    """
    :return: |D(-1)|
    """
    return alexander_polynomial(knot).determinant


def cover_homology_order(polynomial: AlexNormalForm, d: int) -> Optional[int]:
    """
    Order of H1 of the d-fold cyclic branched cover from the Alexander polynomial

    Computed exactly as |Res(D(t), 1 + t + ... + t^(d-1))|.

    :param polynomial: Alexander polynomial
    :param d: cover degree, at least 2
    :return: order, or None when the homology is infinite
    """
    if d < 2:
        raise ValueError(f"Cover degree [{d}] must be at least 2")
    cyclotomic_product = Poly([1] * d, t, domain=ZZ)
    order = abs(int(polynomial.poly.to_poly().resultant(cyclotomic_product)))
    return order if order != 0 else None


def cyclic_cover_homology_order(knot: KnotSpec, d: int) -> Optional[int]:
    """
    :param knot: knot description
    :param d: cover degree, at least 2
    :return: order of H1 of the d-fold cyclic branched cover, None when infinite
    """
    return cover_homology_order(alexander_polynomial(knot), d)


def fs_distinguish(polynomials: Iterable[AlexNormalForm]) -> List[List[int]]:
    """
    Groups Alexander polynomials by their coefficient multisets

    Different classes give smoothly inequivalent rim surgeries when the base surface is an SW-pair, which is an
    assumption about the geometry this package does not check.

    :param polynomials: at least one polynomial
    :return: classes of input positions, ordered by first position
    """
    _polynomials = list(polynomials)
    if not _polynomials:
        raise ValueError("At least one Alexander polynomial is needed")
    classes: Dict[Tuple[int, ...], List[int]] = {}
    for position, polynomial in enumerate(_polynomials):
        classes.setdefault(polynomial.coefficient_multiset(), []).append(position)
    return sorted(classes.values(), key=lambda positions: positions[0])
