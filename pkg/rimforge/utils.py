import re

from typing import List, Optional, Sequence, Tuple

from rimforge.components import Presentation, Word
from rimforge.components.knots import Diagram, KnotSpec, Mirror, Sum, Torus, TwoBridge, build_Jn, named_knot, unknot

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TABLE_NAME = re.compile(r"[A-Za-z0-9_]+")
_DIGITS = re.compile(r"[0-9]+")


class GrammarError(ValueError):
    """
    Raised when text does not follow one of the input grammars.

    Position is the 0-based offset in the text where parsing failed.
    """

    def __init__(self, message: str, position: int, text: str):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position} in [{text}]")


class _Parser:
    """
    Recursive descent parser shared by the presentation, word, knot and step list grammars.
    """

    def __init__(self, text: str):
        self.text = text
        self.position = 0

    def error(self, message: str, position: Optional[int] = None) -> GrammarError:
        return GrammarError(message, self.position if position is None else position, self.text)

    def skip_whitespace(self) -> None:
        while self.position < len(self.text) and self.text[self.position].isspace():
            self.position += 1

    def peek(self) -> str:
        self.skip_whitespace()
        return self.text[self.position] if self.position < len(self.text) else ""

    def accept(self, token: str) -> bool:
        if self.peek() == token:
            self.position += 1
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.accept(token):
            found = self.peek() or "end of input"
            raise self.error(f"Expected '{token}', found '{found}'")

    def match(self, pattern: "re.Pattern", what: str) -> str:
        self.skip_whitespace()
        found = pattern.match(self.text, self.position)
        if found is None:
            raise self.error(f"Expected {what}")
        self.position = found.end()
        return found.group(0)

    def integer(self) -> int:
        sign = -1 if self.accept("-") else 1
        if sign == 1:
            self.accept("+")
        return sign * int(self.match(_DIGITS, "an integer"))

    def end(self) -> None:
        if self.peek():
            raise self.error(f"Unexpected '{self.peek()}'")

    # Words

    def word(self, generators: Sequence[str]) -> Word:
        factors = [self.term(generators)]
        while self.accept("*"):
            factors.append(self.term(generators))
        return Word.product(factors)

    def term(self, generators: Sequence[str]) -> Word:
        base = self.atom(generators)
        if self.accept("^"):
            return base ** self.integer()
        return base

    def atom(self, generators: Sequence[str]) -> Word:
        if self.accept("("):
            inner = self.word(generators)
            self.expect(")")
            return inner
        if self.accept("["):
            left = self.word(generators)
            self.expect(",")
            right = self.word(generators)
            self.expect("]")
            return Word.commutator(left, right)
        if self.peek() == "1":
            self.position += 1
            return Word()
        start = self.position
        name = self.match(_IDENTIFIER, "a generator name, '1', '(' or '['")
        if name not in generators:
            raise self.error(f"Unknown generator '{name}', expected one of {list(generators)}", start)
        return Word.generator(generators.index(name))

    def presentation(self) -> Presentation:
        self.expect("<")
        generators: List[str] = []
        if self.peek() != "|":
            generators.append(self.match(_IDENTIFIER, "a generator name"))
            while self.accept(","):
                start = self.position
                name = self.match(_IDENTIFIER, "a generator name")
                if name in generators:
                    raise self.error(f"Generator '{name}' is listed twice", start)
                generators.append(name)
        self.expect("|")
        relators = []
        if self.peek() != ">":
            relators.append(self.word(generators))
            while self.accept(","):
                relators.append(self.word(generators))
        self.expect(">")
        return Presentation(generators, relators)

    # Knots

    def keyword(self) -> Tuple[str, int]:
        start = self.position
        return self.match(_IDENTIFIER, "a knot description").lower(), start

    def knot(self) -> KnotSpec:
        self.skip_whitespace()
        keyword, start = self.keyword()
        if keyword == "unknot":
            return unknot()
        if keyword in ("twobridge", "torus"):
            self.expect("(")
            p = self.integer()
            self.expect(",")
            q = self.integer()
            self.expect(")")
            return TwoBridge(p, q) if keyword == "twobridge" else Torus(p, q)
        if keyword == "sum":
            self.expect("(")
            left = self.knot()
            self.expect(",")
            right = self.knot()
            self.expect(")")
            return Sum(left, right)
        if keyword == "mirror":
            self.expect("(")
            inner = self.knot()
            self.expect(")")
            return Mirror(inner)
        if keyword == "jn":
            self.expect("(")
            inner = self.knot()
            self.expect(",")
            n = self.integer()
            self.expect(")")
            return build_Jn(inner, n)
        if keyword == "knot":
            self.expect("(")
            name = self.match(_TABLE_NAME, "a knot table name")
            self.expect(")")
            return named_knot(name)
        if keyword == "pd":
            return Diagram(self.crossings())
        raise self.error(
            f"Unknown knot description '{keyword}', expected unknot, twobridge, torus, sum, mirror, jn, knot or pd",
            start,
        )

    def crossings(self) -> List[List[int]]:
        self.expect("[")
        crossings: List[List[int]] = []
        if self.peek() != "]":
            crossings.append(self.crossing())
            while self.accept(","):
                crossings.append(self.crossing())
        self.expect("]")
        return crossings

    def crossing(self) -> List[int]:
        self.expect("(")
        labels = [self.integer()]
        while self.accept(","):
            labels.append(self.integer())
        self.expect(")")
        return labels


def parse_presentation(text: str) -> Presentation:
    """
    Parses '<a,b | a^2, b^-3, [a,b], (a*b)^5>'

    :param text: presentation text
    :return: presentation
    """
    parser = _Parser(text)
    presentation = parser.presentation()
    parser.end()
    return presentation


def parse_word(text: str, generators: Sequence[str]) -> Word:
    """
    Parses a word such as 'a*b^-1*[a,b]' over named generators

    :param text: word text, '1' for the identity
    :param generators: generator names, in index order
    :return: word
    """
    parser = _Parser(text)
    word = parser.word(list(generators))
    parser.end()
    return word


def parse_knot_spec(text: str) -> KnotSpec:
    """
    Parses knot descriptions such as 'sum(torus(3,5),mirror(torus(3,5)))', 'jn(twobridge(3,1),2)' or 'knot(4_1)'

    Keywords are case insensitive.

    :param text: knot text
    :return: knot description
    """
    parser = _Parser(text)
    knot = parser.knot()
    parser.end()
    return knot


def parse_knot_list(text: str) -> List[KnotSpec]:
    """
    :param text: knot descriptions separated by ';'
    :return: knot descriptions in order
    """
    parser = _Parser(text)
    knots = [parser.knot()]
    while parser.accept(";"):
        knots.append(parser.knot())
    parser.end()
    return knots


def parse_steps(text: str) -> List[Tuple[KnotSpec, int]]:
    """
    Parses surgery steps such as '[(twobridge(5,3),2), (jn(torus(3,5),1),3)]'

    :param text: step list text
    :return: (knot, twist) pairs
    """
    parser = _Parser(text)
    parser.expect("[")
    steps = []
    if parser.peek() != "]":
        while True:
            parser.expect("(")
            knot = parser.knot()
            parser.expect(",")
            m = parser.integer()
            parser.expect(")")
            steps.append((knot, m))
            if not parser.accept(","):
                break
    parser.expect("]")
    parser.end()
    return steps


def parse_witnesses(text: str, generators: Sequence[str]) -> List[Tuple[Word, Word]]:
    """
    Parses commutator witnesses such as '[(a, b), (a*b, b^2)]'

    :param text: witness list text
    :param generators: generator names, in index order
    :return: (v, w) pairs
    """
    parser = _Parser(text)
    _generators = list(generators)
    parser.expect("[")
    witnesses = []
    if parser.peek() != "]":
        while True:
            parser.expect("(")
            v = parser.word(_generators)
            parser.expect(",")
            w = parser.word(_generators)
            parser.expect(")")
            witnesses.append((v, w))
            if not parser.accept(","):
                break
    parser.expect("]")
    parser.end()
    return witnesses
