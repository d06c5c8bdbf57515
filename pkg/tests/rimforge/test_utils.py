import pytest

from random import Random

from rimforge.components import Presentation, Word
from rimforge.components.knots import Diagram, Mirror, Sum, Torus, TwoBridge, build_Jn, named_knot, unknot
from rimforge.utils import GrammarError, parse_knot_list, parse_knot_spec, parse_presentation, parse_steps, \
    parse_witnesses, parse_word

from tests.rimforge.conftest.words import random_presentation

a = Word.generator(0)
b = Word.generator(1)


@pytest.mark.parametrize(
    argnames=['text', 'generators', 'relators'],
    argvalues=[
        ('<x | x^2>', ('x',), (Word.generator(0) ** 2,)),
        ('< | >', (), ()),
        ('<a,b | >', ('a', 'b'), ()),
        ('<a, b | a^2, b^-3>', ('a', 'b'), (a ** 2, b ** -3)),
        ('<a,b | [a,b]>', ('a', 'b'), (Word.commutator(a, b),)),
        ('<a,b | (a*b)^2>', ('a', 'b'), ((a * b) ** 2,)),
        ('<a,b | a*1*a>', ('a', 'b'), (a ** 2,)),
    ]
)
def test_parse_presentation(text, generators, relators):
    presentation = parse_presentation(text)
    assert presentation.generators == generators
    assert presentation == Presentation(generators, relators)


@pytest.mark.parametrize(argnames=['seed'], argvalues=[(seed,) for seed in range(100)])
def test_parse_presentation_reads_printed_text(seed):
    presentation = random_presentation(Random(seed))
    assert parse_presentation(presentation.to_text()) == presentation
    assert parse_presentation(presentation.to_text().replace('*', ' * ').replace(',', ' , ')) == presentation


@pytest.mark.parametrize(
    argnames=['text', 'position'],
    argvalues=[
        ('x | x^2>', 0),
        ('<x | y>', 5),
        ('<x,x | x>', 3),
        ('<x | x^>', 7),
        ('<x | x^2', 8),
        ('<x | x^2> extra', 10),
        ('<x | [x,x>', 9),
        ('<x | x^->', 8),
        ('<x | x^- -1>', 9),
    ]
)
def test_parse_presentation_error(text, position):
    with pytest.raises(GrammarError) as e:
        parse_presentation(text)
    assert e.value.position == position
    assert e.value.text == text


def test_parse_word():
    assert parse_word('a*b^-1*[a,b]', ['a', 'b']) == a * b.inverse() * Word.commutator(a, b)
    assert parse_word('1', ['a']) == Word()
    assert parse_word('(a*b)^-1', ['a', 'b']) == b.inverse() * a.inverse()
    with pytest.raises(GrammarError):
        parse_word('c', ['a', 'b'])


@pytest.mark.parametrize(
    argnames=['text', 'word'],
    argvalues=[
        ('a ^ - 2', a ** -2),
        ('a^ -2 * b ^ +3', a ** -2 * b ** 3),
        ('( a * b ) ^ - 1', b.inverse() * a.inverse()),
        ('[ a , b ] ^ 2', Word.commutator(a, b) ** 2),
    ]
)
def test_parse_word_whitespace(text, word):
    assert parse_word(text, ['a', 'b']) == word


@pytest.mark.parametrize(
    argnames=['text', 'knot'],
    argvalues=[
        ('unknot', unknot()),
        ('twobridge(5,3)', TwoBridge(5, 3)),
        ('TwoBridge(5, -3)', TwoBridge(5, -3)),
        ('twobridge( 5 , - 3 )', TwoBridge(5, -3)),
        ('torus(3,5)', Torus(3, 5)),
        ('mirror(torus(2,3))', Mirror(Torus(2, 3))),
        ('sum(twobridge(3,1),torus(2,5))', Sum(TwoBridge(3, 1), Torus(2, 5))),
        ('jn(torus(3,5),1)', build_Jn(Torus(3, 5), 1)),
        ('knot(4_1)', named_knot('4_1')),
        ('pd[(1,5,2,4),(3,1,4,6),(5,3,6,2)]', Diagram([(1, 5, 2, 4), (3, 1, 4, 6), (5, 3, 6, 2)])),
    ]
)
def test_parse_knot_spec(text, knot):
    assert parse_knot_spec(text) == knot


@pytest.mark.parametrize(
    argnames=['text', 'position'],
    argvalues=[
        ('trefoil', 0),
        ('torus(3,)', 8),
        ('twobridge(5,3', 13),
        ('sum(unknot)', 10),
    ]
)
def test_parse_knot_spec_error(text, position):
    with pytest.raises(GrammarError) as e:
        parse_knot_spec(text)
    assert e.value.position == position


def test_parse_knot_list():
    assert parse_knot_list('twobridge(3,1); torus(2,3)') == [TwoBridge(3, 1), Torus(2, 3)]
    assert parse_knot_list('unknot') == [unknot()]


def test_parse_steps():
    assert parse_steps('[]') == []
    assert parse_steps('[(twobridge(5,3),2), (jn(torus(3,5),1),3)]') == [
        (TwoBridge(5, 3), 2),
        (build_Jn(Torus(3, 5), 1), 3),
    ]
    with pytest.raises(GrammarError):
        parse_steps('[(twobridge(5,3))]')


def test_parse_witnesses():
    assert parse_witnesses('[]', ['a', 'b']) == []
    assert parse_witnesses('[(a, b), (a*b, b^2)]', ['a', 'b']) == [(a, b), (a * b, b ** 2)]
    with pytest.raises(GrammarError):
        parse_witnesses('[(a)]', ['a', 'b'])
