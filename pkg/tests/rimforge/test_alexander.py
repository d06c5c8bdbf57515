import pytest

from rimforge.components import Presentation, Word
from rimforge.components.alexander import (
    AlexNormalForm,
    LaurentPoly,
    alexander_matrix,
    alexander_polynomial,
    cover_homology_order,
    cyclic_cover_homology_order,
    determinant,
    fox_alexander_polynomial,
    fox_derivative,
    fs_distinguish,
    torus_alexander_polynomial,
)
from rimforge.components.knots import KnotSpecError, Mirror, Sum, Torus, TwoBridge, build_Jn, named_knot, unknot, \
    wirtinger

trefoil = TwoBridge(3, 1)


def test_laurent_poly_arithmetic():
    one = LaurentPoly.monomial(0)
    t = LaurentPoly.monomial(1)
    assert (one - t) * (one + t) == one - t * t
    assert (t - t).is_zero()
    assert LaurentPoly({0: 0}).is_zero()
    assert (-t).to_text() == '-t'
    assert LaurentPoly({-1: 1, 2: -3}).mirror() == LaurentPoly({1: 1, -2: -3})


def test_laurent_poly_text():
    assert LaurentPoly({0: 1, 1: -3, 2: 1}).to_text() == '1 - 3*t + t^2'
    assert LaurentPoly({3: 2}).to_text() == '2*t^3'
    assert LaurentPoly().to_text() == '0'
    assert LaurentPoly({0: 1, 2: -1}).to_list() == [1, 0, -1]


def test_laurent_poly_evaluate():
    poly = LaurentPoly({-1: 1, 0: -1, 1: 1})
    assert poly.evaluate(1) == 1
    assert poly.evaluate(-1) == -3
    with pytest.raises(ValueError):
        poly.evaluate(2)


def test_laurent_poly_normalized():
    assert LaurentPoly({-1: -1, 0: 1, 1: -1}).normalized() == LaurentPoly({0: 1, 1: -1, 2: 1})


def test_alex_normal_form():
    polynomial = AlexNormalForm(LaurentPoly({-1: -1, 0: 1, 1: -1}))
    assert polynomial.to_dict() == {
        'polynomial': '1 - t + t^2',
        'coefficients': [1, -1, 1],
        'determinant': 3,
        'palindromic': True,
    }
    assert repr(polynomial) == 'AlexNormalForm <1 - t + t^2>'


def test_alex_normal_form_invalid():
    with pytest.raises(KnotSpecError):
        AlexNormalForm(LaurentPoly({0: 2}))


def test_fox_derivative():
    a, b = Word.generator(0), Word.generator(1)
    assert fox_derivative(Word.commutator(a.inverse(), b.inverse()), 0, [1, 1]) == LaurentPoly({0: 1, 1: -1})
    assert fox_derivative(a.inverse(), 0, [1, 1]) == LaurentPoly({-1: -1})
    assert fox_derivative(b * b, 0, [1, 1]).is_zero()
    assert fox_derivative(b * b, 1, [1, 1]) == LaurentPoly({0: 1, 1: 1})


def test_fox_derivative_missing_degree():
    with pytest.raises(KnotSpecError):
        fox_derivative(Word.generator(2), 0, [1, 1])


def test_alexander_matrix_shape():
    group = wirtinger(named_knot('4_1'))
    matrix = alexander_matrix(group)
    assert len(matrix) == group.presentation.generator_count - 1
    assert all(len(row) == group.presentation.generator_count - 1 for row in matrix)


@pytest.mark.parametrize(
    argnames=['knot', 'polynomial', 'knot_determinant'],
    argvalues=[
        (unknot(), '1', 1),
        (trefoil, '1 - t + t^2', 3),
        (Torus(2, 3), '1 - t + t^2', 3),
        (named_knot('3_1'), '1 - t + t^2', 3),
        (TwoBridge(5, 3), '1 - 3*t + t^2', 5),
        (named_knot('4_1'), '1 - 3*t + t^2', 5),
        (Mirror(named_knot('4_1')), '1 - 3*t + t^2', 5),
        (TwoBridge(5, 1), '1 - t + t^2 - t^3 + t^4', 5),
        (named_knot('5_1'), '1 - t + t^2 - t^3 + t^4', 5),
        (named_knot('5_2'), '2 - 3*t + 2*t^2', 7),
        (named_knot('6_1'), '2 - 5*t + 2*t^2', 9),
        (Torus(3, 5), '1 - t + t^3 - t^4 + t^5 - t^7 + t^8', 1),
        (Mirror(Torus(3, 5)), '1 - t + t^3 - t^4 + t^5 - t^7 + t^8', 1),
        (Sum(trefoil, trefoil), '1 - 2*t + 3*t^2 - 2*t^3 + t^4', 9),
        (build_Jn(named_knot('6_1'), 1), '4 - 20*t + 33*t^2 - 20*t^3 + 4*t^4', 81),
    ]
)
def test_alexander_polynomial(knot, polynomial, knot_determinant):
    result = alexander_polynomial(knot)
    assert result.to_text() == polynomial
    assert result.determinant == knot_determinant
    assert determinant(knot) == knot_determinant
    assert result.palindromic


@pytest.mark.parametrize(argnames=['p', 'q'], argvalues=[(3, 1), (5, 3), (7, 3), (9, 2), (11, 3)])
def test_two_bridge_determinant(p, q):
    assert determinant(TwoBridge(p, q)) == p


@pytest.mark.parametrize(argnames=['p', 'q'], argvalues=[(2, 3), (2, 5), (3, 4), (3, 5), (2, 7)])
def test_torus_closed_form_matches_fox(p, q):
    assert alexander_polynomial(Torus(p, q)) == torus_alexander_polynomial(p, q)


@pytest.mark.parametrize(
    argnames=['left', 'right'],
    argvalues=[
        (trefoil, trefoil),
        (trefoil, Mirror(trefoil)),
        (TwoBridge(5, 3), named_knot('4_1')),
        (named_knot('5_2'), Torus(2, 5)),
        (Torus(3, 5), Mirror(Torus(3, 5))),
    ]
)
def test_fox_alexander_polynomial_of_connected_sum(left, right):
    knot = Sum(left, right)
    polynomial = fox_alexander_polynomial(wirtinger(knot))
    assert polynomial == fox_alexander_polynomial(wirtinger(left)) * fox_alexander_polynomial(wirtinger(right))
    assert polynomial == alexander_polynomial(knot)


@pytest.mark.parametrize(
    argnames=['knot'],
    argvalues=[
        (trefoil,),
        (TwoBridge(7, 3),),
        (Torus(2, 5),),
        (named_knot('5_2'),),
        (named_knot('6_1'),),
        (Sum(trefoil, named_knot('4_1')),),
    ]
)
def test_fox_alexander_polynomial_of_mirror(knot):
    polynomial = fox_alexander_polynomial(wirtinger(Mirror(knot)))
    assert polynomial == AlexNormalForm(fox_alexander_polynomial(wirtinger(knot)).poly.mirror())
    assert polynomial == alexander_polynomial(Mirror(knot))


def test_fox_alexander_polynomial_needs_deficiency_one():
    group = wirtinger(trefoil)
    presentation = group.presentation
    group.presentation = Presentation(presentation.generators, list(presentation.relators) * 2, presentation.marks)
    with pytest.raises(KnotSpecError):
        fox_alexander_polynomial(group)


@pytest.mark.parametrize(
    argnames=['knot', 'd', 'order'],
    argvalues=[
        (trefoil, 2, 3),
        (trefoil, 3, 4),
        (trefoil, 5, 1),
        (trefoil, 6, None),
        (named_knot('4_1'), 2, 5),
        (named_knot('4_1'), 3, 16),
        (Torus(3, 5), 2, 1),
        (build_Jn(Torus(3, 5), 1), 2, 1),
        (unknot(), 4, 1),
    ]
)
def test_cover_homology_order(knot, d, order):
    assert cyclic_cover_homology_order(knot, d) == order


def test_cover_homology_order_invalid_degree():
    with pytest.raises(ValueError):
        cover_homology_order(alexander_polynomial(trefoil), 1)


def test_fs_distinguish_jn_family():
    polynomials = [alexander_polynomial(build_Jn(Torus(3, 5), n)) for n in range(1, 6)]
    assert fs_distinguish(polynomials) == [[0], [1], [2], [3], [4]]
    assert [polynomial.determinant for polynomial in polynomials] == [1, 1, 1, 1, 1]


def test_fs_distinguish_two_bridge():
    polynomials = [alexander_polynomial(TwoBridge(5, 1)), alexander_polynomial(TwoBridge(5, 3))]
    assert fs_distinguish(polynomials) == [[0], [1]]


def test_fs_distinguish_equal_multisets():
    polynomials = [alexander_polynomial(unknot()), alexander_polynomial(unknot()), alexander_polynomial(trefoil)]
    assert fs_distinguish(polynomials) == [[0, 1], [2]]


def test_fs_distinguish_empty():
    with pytest.raises(ValueError):
        fs_distinguish([])
