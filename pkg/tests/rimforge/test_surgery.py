import itertools

import pytest

from rimforge.components import AbelianInvariants, Mark, Word, abelianization, quotient_by_normal_closure, substitute
from rimforge.components.enumeration import element_order, enumerate_cosets, evaluate, group_order, \
    permutation_representation
from rimforge.components.alexander import cyclic_cover_homology_order
from rimforge.components.knots import Mirror, Torus, TwoBridge, build_Jn, named_knot, unknot
from rimforge.components.surgery import (
    Certification,
    CertificationTier,
    SurfaceKnotGroup,
    SurgeryError,
    branched_cover_group,
    certify_isomorphic,
    certify_trivial,
    cyclic_base,
    d_twist_group,
    iterated_surgery,
    m_twist_group,
    m_twist_relators,
    tietze_equivalent,
)
from rimforge.utils import parse_presentation

from tests.rimforge.conftest.groups import test_cyclic_6, test_dihedral_10, test_klein_four, test_quaternion, \
    test_free_abelian_2, dihedral_10_base

trefoil = TwoBridge(3, 1)


@pytest.mark.parametrize(
    argnames=['knot', 'd', 'order', 'torsion'],
    argvalues=[
        (trefoil, 2, 3, [3]),
        (trefoil, 3, 8, [2, 2]),
        (named_knot('3_1'), 3, 8, [2, 2]),
        (TwoBridge(5, 3), 2, 5, [5]),
        (Mirror(TwoBridge(5, 3)), 2, 5, [5]),
        (Torus(2, 3), 5, 120, []),
        (Torus(2, 5), 3, 120, []),
        (Torus(3, 5), 2, 120, []),
        (TwoBridge(1, 1), 4, 1, []),
        (unknot(), 3, 1, []),
    ]
)
def test_branched_cover_group(knot, d, order, torsion):
    cover = branched_cover_group(knot, d)
    assert cover.degree == d
    assert group_order(cover.presentation) == order
    assert abelianization(cover.presentation) == AbelianInvariants(0, torsion)


@pytest.mark.parametrize(argnames=['inverse_deck'], argvalues=[(False,), (True,)])
def test_branched_cover_deck_action_has_order_d(inverse_deck):
    cover = branched_cover_group(trefoil, 3, inverse_deck=inverse_deck)
    table = enumerate_cosets(cover.presentation)
    permutations = permutation_representation(table)
    for generator in range(cover.presentation.generator_count):
        image = Word.generator(generator)
        for _ in range(3):
            image = substitute(image, cover.deck_action)
        assert evaluate(permutations, image, table.coset_count) == evaluate(
            permutations, Word.generator(generator), table.coset_count
        )


def test_branched_cover_deck_action_inverts_double_cover_homology():
    # the double branched cover of the trefoil has group Z/3, and the deck transformation acts as v -> v^-1
    cover = branched_cover_group(trefoil, 2)
    table = enumerate_cosets(cover.presentation)
    permutations = permutation_representation(table)
    assert table.coset_count == 3
    for generator in range(cover.presentation.generator_count):
        element = evaluate(permutations, Word.generator(generator), table.coset_count)
        image = evaluate(permutations, cover.deck_action[generator], table.coset_count)
        assert image == ~element


def test_branched_cover_deck_action_permutes_triple_cover_homology():
    # H1 of the triple branched cover of the trefoil is (Z/2)^2, whose three non-zero classes are permuted cyclically
    cover = branched_cover_group(trefoil, 3)
    count = cover.presentation.generator_count
    commutators = [Word.commutator(Word.generator(i), Word.generator(j)) for i in range(count) for j in range(i)]
    table = enumerate_cosets(quotient_by_normal_closure(cover.presentation, commutators))
    permutations = permutation_representation(table)
    assert table.coset_count == 4

    action = {}
    for exponents in itertools.product((0, 1), repeat=count):
        word = Word.product(Word.generator(generator, exponent) for generator, exponent in enumerate(exponents))
        element = evaluate(permutations, word, table.coset_count)
        image = evaluate(permutations, substitute(word, cover.deck_action), table.coset_count)
        assert action.setdefault(element, image) == image

    identity = evaluate(permutations, Word(), table.coset_count)
    assert len(action) == 4
    assert action[identity] == identity
    assert sorted(action.values(), key=str) == sorted(action, key=str)
    for element in action:
        if element != identity:
            assert action[element] != element
            assert action[action[action[element]]] == element


def test_branched_cover_to_dict():
    cover = branched_cover_group(trefoil, 2)
    _cover = cover.to_dict()
    assert _cover['degree'] == 2
    assert sorted(_cover['deck_action']) == sorted(cover.presentation.generators)
    assert repr(cover).startswith('BranchedCoverGroup <degree=2')


def test_branched_cover_invalid_degree():
    with pytest.raises(SurgeryError):
        branched_cover_group(trefoil, 1)


def test_cyclic_base():
    base = cyclic_base(3)
    assert base.d == 3
    assert base.has_trivial_pushoff
    assert base.meridian == Word.generator(0)
    assert base.presentation.to_text() == '<u | u^3>'
    assert base.to_dict()['certification'] is None


@pytest.mark.parametrize(
    argnames=['presentation', 'marks', 'd'],
    argvalues=[
        (test_cyclic_6, {Mark.MERIDIAN: Word.generator(0)}, 3),
        (test_cyclic_6, {Mark.MERIDIAN: Word.generator(0, 2)}, 6),
        (test_klein_four, {Mark.MERIDIAN: Word.generator(0)}, 2),
        (test_cyclic_6, {}, 6),
        (test_cyclic_6, {Mark.MERIDIAN: Word.generator(0)}, 0),
    ]
)
def test_surface_knot_group_invalid(presentation, marks, d):
    with pytest.raises(SurgeryError):
        SurfaceKnotGroup(presentation.with_marks(marks), d)


def test_surface_knot_group_pushoff():
    base = SurfaceKnotGroup(test_cyclic_6.with_marks({Mark.MERIDIAN: Word.generator(0)}), 6)
    assert base.pushoff is None
    assert not base.has_trivial_pushoff
    with pytest.raises(SurgeryError):
        m_twist_group(base, trefoil, 2)


def test_tietze_equivalent():
    assert tietze_equivalent(parse_presentation('<a,b | a^2, b^3>'), parse_presentation('<x,y | y^3, x^-2>'))
    assert not tietze_equivalent(parse_presentation('<a | a^2>'), parse_presentation('<a | a^3>'))
    assert not tietze_equivalent(parse_presentation('<a | a^2>'), parse_presentation('<a,b | a^2, b>'))


def test_certify_isomorphic_t1():
    certification = certify_isomorphic(parse_presentation('<a | a^5>'), parse_presentation('<b | b^-5>'))
    assert certification.tier == CertificationTier.T1
    assert certification.passed


def test_certify_isomorphic_t2():
    certification = certify_isomorphic(parse_presentation('<a,b | a^2, b^3, [a,b]>'), test_cyclic_6)
    assert certification.tier == CertificationTier.T2
    assert certification.order == 6
    assert certification.reference_order == 6
    assert certification.passed


@pytest.mark.parametrize(
    argnames=['presentation', 'reference', 'reason'],
    argvalues=[
        (test_klein_four, test_cyclic_6, 'abelianizations differ'),
        (test_dihedral_10, parse_presentation('<x | x^2>'), 'orders differ'),
        (test_klein_four, test_quaternion, 'orders differ'),
        (test_quaternion, parse_presentation('<a,b | a^4, b^2, [a,b]>'), 'abelianizations differ'),
        (test_quaternion, parse_presentation('<a,b,c | a^2, b^2, c^2, [a,b], [a,c], [b,c]>'), 'abelianizations differ'),
        (test_quaternion, parse_presentation('<r,s | r^4, s^2, s*r*s^-1*r>'), 'kernels onto Z/k'),
    ]
)
def test_certify_isomorphic_failed(presentation, reference, reason):
    certification = certify_isomorphic(presentation, reference)
    assert certification.tier == CertificationTier.FAILED
    assert reason in certification.reason
    assert not certification.passed


def test_certify_isomorphic_indeterminate():
    certification = certify_isomorphic(test_free_abelian_2, parse_presentation('<a,b,c | [a,b], c*a^-1*b^-1>'), 2, 100)
    assert certification.tier == CertificationTier.INDETERMINATE
    assert certification.order is None


def test_certify_trivial():
    assert certify_trivial(parse_presentation('<a,b | a*b, b>')).tier == CertificationTier.T1
    assert certify_trivial(parse_presentation('<a,b | a^2, b^3, (a*b)^5, a*b^-1*a>')).passed
    assert certify_trivial(test_cyclic_6).tier == CertificationTier.FAILED
    assert certify_trivial(test_free_abelian_2, max_cosets=100).tier == CertificationTier.INDETERMINATE


def test_certification_to_dict():
    certification = Certification(CertificationTier.ASSERTED, 'no reference')
    assert certification.to_dict() == {
        'tier': 'ASSERTED',
        'reason': 'no reference',
        'order': None,
        'reference_order': None,
        'abelianization': None,
    }
    assert not certification.passed
    assert repr(certification) == 'Certification <tier=ASSERTED, reason=no reference>'


def test_d_twist_group_trefoil():
    group = d_twist_group(cyclic_base(3), trefoil)
    table = enumerate_cosets(group.presentation)
    assert table.coset_count == 24
    assert element_order(table, group.meridian) == 3
    assert abelianization(group.presentation) == AbelianInvariants(0, [3])
    assert group.has_trivial_pushoff
    assert group.provenance == [{'knot': 'twobridge(3,1)', 'm': 3, 'path': 'd-twist'}]


@pytest.mark.parametrize(argnames=['p', 'q'], argvalues=[(3, 1), (5, 3), (7, 3)])
def test_d_twist_group_two_bridge(p, q):
    group = d_twist_group(cyclic_base(2), TwoBridge(p, q))
    assert group_order(group.presentation) == 2 * p
    assert abelianization(group.presentation) == AbelianInvariants(0, [2])


def test_d_twist_group_unknot_is_base():
    group = d_twist_group(cyclic_base(4), unknot())
    assert group_order(group.presentation) == 4


def test_d_twist_group_needs_cyclic_base():
    with pytest.raises(SurgeryError):
        d_twist_group(dihedral_10_base(), trefoil)


def test_m_twist_relators():
    meridian = Word.generator(1)
    assert m_twist_relators([2, 3], meridian, 1) == [Word.generator(2) * meridian.inverse(),
                                                     Word.generator(3) * meridian.inverse()]
    assert m_twist_relators([2], meridian, 3) == [Word.commutator(meridian ** 3, Word.generator(2))]


@pytest.mark.parametrize(
    argnames=['knot'],
    argvalues=[(trefoil,), (named_knot('4_1'),), (build_Jn(Torus(3, 5), 1),)]
)
def test_m_twist_group_dihedral_base(knot):
    group = m_twist_group(dihedral_10_base(), knot, 3)
    assert group_order(group.presentation) == 10
    assert group.certification.passed
    assert group.provenance == [{'knot': knot.to_text(), 'm': 3, 'path': 'general'}]


def test_m_twist_group_one_twist_is_base():
    group = m_twist_group(cyclic_base(2), trefoil, 1)
    assert group.certification.tier == CertificationTier.T1
    assert group.presentation.to_text() == '<u | u^2>'


@pytest.mark.parametrize(
    argnames=['knot'],
    argvalues=[(trefoil,), (named_knot('4_1'),), (build_Jn(Torus(3, 5), 1),)]
)
def test_m_twist_group_one_twist_is_dihedral_base(knot):
    base = dihedral_10_base()
    group = m_twist_group(base, knot, 1)
    assert group.certification.tier == CertificationTier.T1
    assert group.presentation.generators == base.presentation.generators
    assert group_order(group.presentation) == 10
    assert abelianization(group.presentation) == AbelianInvariants(0, [2])
    assert group.provenance == [{'knot': knot.to_text(), 'm': 1, 'path': 'general'}]


def test_m_twist_group_meridian_order_twists():
    group = m_twist_group(cyclic_base(2), trefoil, 2)
    assert group_order(group.presentation) == 6
    assert group.certification.tier == CertificationTier.ASSERTED


def test_iterated_surgery_two_bridge_then_jn():
    steps = [(TwoBridge(5, 3), 2), (build_Jn(Torus(3, 5), 1), 3)]
    group = iterated_surgery(cyclic_base(2), steps)
    assert group_order(group.presentation) == 10
    assert [step['path'] for step in group.provenance] == ['d-twist', 'general']
    assert group.certification.passed


def test_iterated_surgery_trefoil():
    group = iterated_surgery(cyclic_base(3), [(trefoil, 3), (trefoil, 1)])
    table = enumerate_cosets(group.presentation)
    assert table.coset_count == 24
    assert element_order(table, group.meridian) == 3


def test_iterated_surgery_cross_certifies_d_twist():
    group = iterated_surgery(cyclic_base(2), [(trefoil, 2)])
    assert group.provenance[-1]['path'] == 'd-twist'
    assert group.certification.passed
    assert group_order(group.presentation) == 6


def test_iterated_surgery_no_steps():
    base = cyclic_base(2)
    assert iterated_surgery(base, []) is base


@pytest.mark.parametrize(
    argnames=['knot', 'd'],
    argvalues=[
        (knot, d)
        for knot in [unknot(), trefoil, named_knot('4_1'), TwoBridge(5, 1), TwoBridge(7, 3), Torus(2, 5), Torus(3, 5)]
        for d in range(2, 7)
    ]
)
def test_cover_homology_order_matches_cover_group(knot, d):
    # resultant of the Alexander polynomial against t^d - 1 and Smith normal form of the cover group must agree
    cover = branched_cover_group(knot, d)
    assert abelianization(cover.presentation).order == cyclic_cover_homology_order(knot, d)


@pytest.mark.parametrize(
    argnames=['knot', 'd', 'cover_order'],
    argvalues=[
        (trefoil, 3, 8),
        (TwoBridge(5, 3), 2, 5),
        (TwoBridge(7, 3), 2, 7),
        (named_knot('4_1'), 2, 5),
        (Torus(2, 5), 3, 120),
    ]
)
def test_d_twist_group_split_extension_order(knot, d, cover_order):
    assert group_order(branched_cover_group(knot, d).presentation) == cover_order
    assert group_order(d_twist_group(cyclic_base(d), knot).presentation) == d * cover_order


@pytest.mark.parametrize(argnames=['n'], argvalues=[(n,) for n in range(1, 6)])
def test_iterated_surgery_jn_family_keeps_dihedral_group(n):
    group = iterated_surgery(cyclic_base(2), [(TwoBridge(5, 3), 2), (build_Jn(Torus(3, 5), n), 3)])
    assert group_order(group.presentation) == 10
    assert abelianization(group.presentation) == AbelianInvariants(0, [2])
    assert group.certification.passed
