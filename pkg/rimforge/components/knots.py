import json
import logging

from enum import Enum
from functools import lru_cache
from importlib import resources
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from jsonschema import validate as jsonschema_validate

from rimforge.components import Mark, Presentation, Word, free_product, shift_word, substitute

logger = logging.getLogger(__name__)

Crossing = Tuple[int, int, int, int]


class KnotSpecError(ValueError):
    """
    Raised for invalid knot parameters or malformed planar diagram codes.
    """

    pass


class KnotVariant(Enum):
    """
    Represents the ways a knot can be described.
    """

    TWO_BRIDGE = "twobridge"
    TORUS = "torus"
    DIAGRAM = "diagram"
    SUM = "sum"
    MIRROR = "mirror"


class KnotSpec:
    """
    Represents a structural description of a knot.

    Specs are immutable and compare equal when their text forms are equal.
    """

    variant: KnotVariant

    def to_text(self) -> str:
        raise NotImplementedError()

    def to_dict(self) -> Dict:
        return {"variant": self.variant.value, "text": self.to_text()}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, KnotSpec) and self.to_text() == other.to_text()

    def __hash__(self) -> int:
        return hash(self.to_text())

    def __repr__(self) -> str:
        """
        :return: String representation of a KnotSpec
        """
        return f"KnotSpec <variant={self.variant.value}, text={self.to_text()}>"


class TwoBridge(KnotSpec):
    """
    Two-bridge knot K(p,q), p odd
    """

    variant = KnotVariant.TWO_BRIDGE

    def __init__(self, p: int, q: int):
        if p < 1 or p % 2 == 0:
            raise KnotSpecError(f"Two-bridge parameter p [{p}] must be odd and positive (p even gives a link)")
        if gcd(p, q) != 1:
            raise KnotSpecError(f"Two-bridge parameters p [{p}] and q [{q}] must be coprime")
        self.p = p
        self.q = q

    def to_text(self) -> str:
        return f"twobridge({self.p},{self.q})"


class Torus(KnotSpec):
    """
    Torus knot T(p,q)
    """

    variant = KnotVariant.TORUS

    def __init__(self, p: int, q: int):
        if p < 2 or q < 2:
            raise KnotSpecError(f"Torus knot parameters [{p},{q}] must both be at least 2")
        if gcd(p, q) != 1:
            raise KnotSpecError(f"Torus knot parameters [{p},{q}] must be coprime")
        self.p = p
        self.q = q

    def to_text(self) -> str:
        return f"torus({self.p},{self.q})"


class Diagram(KnotSpec):
    """
    Knot given by a planar diagram (PD) code

    Each crossing (a, b, c, d) lists its four edge labels counterclockwise from the incoming under edge a, so that c is
    the outgoing under edge. Edges are labelled 1..2n along the orientation.
    """

    variant = KnotVariant.DIAGRAM

    def __init__(self, code: Sequence[Sequence[int]], name: Optional[str] = None):
        """
        :param code: PD crossings, empty for the unknot
        :param name: knot table name, used for printing only
        """
        self.code: Tuple[Crossing, ...] = tuple(_validate_crossing(crossing) for crossing in code)
        self.name = name
        _validate_code(self.code)

    def to_text(self) -> str:
        if self.name is not None:
            return f"knot({self.name})"
        if not self.code:
            return "unknot"
        return "pd[" + ",".join(f"({a},{b},{c},{d})" for a, b, c, d in self.code) + "]"

    def to_dict(self) -> Dict:
        _diagram = super().to_dict()
        _diagram["pd"] = [list(crossing) for crossing in self.code]
        return _diagram


class Sum(KnotSpec):
    """
    Connected sum of two knots
    """

    variant = KnotVariant.SUM

    def __init__(self, left: KnotSpec, right: KnotSpec):
        self.left = left
        self.right = right

    def to_text(self) -> str:
        return f"sum({self.left.to_text()},{self.right.to_text()})"


class Mirror(KnotSpec):
    """
    Mirror image of a knot
    """

    variant = KnotVariant.MIRROR

    def __init__(self, inner: KnotSpec):
        self.inner = inner

    def to_text(self) -> str:
        return f"mirror({self.inner.to_text()})"


def unknot() -> Diagram:
    return Diagram(())


def _validate_crossing(crossing: Sequence[int]) -> Crossing:
    if len(crossing) != 4:
        raise KnotSpecError(f"PD crossing {list(crossing)} does not have four edge labels")
    a, b, c, d = (int(label) for label in crossing)
    return a, b, c, d


def _over_direction(crossing: Crossing, edge_count: int) -> int:
    """
    :return: +1 when the over strand runs from b to d, -1 when it runs from d to b
    """
    _, b, _, d = crossing
    return 1 if (d - b) % edge_count == 1 else -1


def _validate_code(code: Sequence[Crossing]) -> None:
    if not code:
        return
    edge_count = 2 * len(code)
    labels = sorted(label for crossing in code for label in crossing)
    if labels != sorted(list(range(1, edge_count + 1)) * 2):
        raise KnotSpecError(f"PD code must use every edge label 1..{edge_count} exactly twice")

    incoming, outgoing = [], []
    for crossing in code:
        a, b, c, d = crossing
        if (c - a) % edge_count != 1:
            raise KnotSpecError(
                f"PD crossing {list(crossing)} is inconsistent: under edges {a} -> {c} are not consecutive, the code "
                f"may describe more than one component"
            )
        if (d - b) % edge_count != 1 and (b - d) % edge_count != 1:
            raise KnotSpecError(
                f"PD crossing {list(crossing)} is inconsistent: over edges {b}, {d} are not consecutive, the code may "
                f"describe more than one component"
            )
        over_in, over_out = (b, d) if _over_direction(crossing, edge_count) == 1 else (d, b)
        incoming.extend([a, over_in])
        outgoing.extend([c, over_out])
    if sorted(incoming) != list(range(1, edge_count + 1)) or sorted(outgoing) != list(range(1, edge_count + 1)):
        raise KnotSpecError("PD code is not planar consistent: an edge does not run from one crossing to another")


def mirror_code(code: Sequence[Crossing]) -> Tuple[Crossing, ...]:
    """
    Swaps over and under strands at every crossing

    :param code: PD code
    :return: PD code of the mirror image
    """
    edge_count = 2 * len(code)
    mirrored = []
    for crossing in code:
        a, b, c, d = crossing
        if _over_direction(crossing, edge_count) == 1:
            mirrored.append((b, c, d, a))
        else:
            mirrored.append((d, a, b, c))
    return tuple(mirrored)


class MarkedGroup:
    """
    Represents a knot group presentation with a marked meridian.

    Every generator is a meridian: degrees gives the image of each generator under abelianization onto Z (all 1), and
    conjugators gives, for each generator x, a word c with x = c * meridian * c^-1 in the group.
    """

    def __init__(self, presentation: Presentation, degrees: Sequence[int], conjugators: Dict[int, Word]):
        """
        :param presentation: knot group presentation, marked with at least its meridian
        :param degrees: abelianization degree of each generator
        :param conjugators: meridian conjugating word of each generator
        """
        if presentation.mark(Mark.MERIDIAN) is None:
            raise KnotSpecError("Knot group presentation has no meridian mark")
        if len(degrees) != presentation.generator_count:
            raise KnotSpecError(f"Expected {presentation.generator_count} generator degree(s), got {len(degrees)}")
        self.presentation = presentation
        self.degrees: Tuple[int, ...] = tuple(degrees)
        self.conjugators = conjugators

    @property
    def meridian(self) -> Word:
        return self.presentation.marks[Mark.MERIDIAN]

    @property
    def longitude(self) -> Optional[Word]:
        return self.presentation.mark(Mark.LONGITUDE)

    def to_dict(self) -> Dict:
        return self.presentation.to_dict()

    def __repr__(self) -> str:
        """
        :return: String representation of a MarkedGroup
        """
        return f"MarkedGroup <presentation={self.presentation.to_text()}>"


def _meridian_only(name: str) -> MarkedGroup:
    meridian = Word.generator(0)
    return MarkedGroup(Presentation([name], [], {Mark.MERIDIAN: meridian}), [1], {0: Word()})


def normalise_two_bridge_q(p: int, q: int) -> int:
    """
    :return: the representative of q modulo 2p that is odd and lies in (-p, p)
    """
    residue = q % (2 * p)
    if residue % 2 == 0:
        residue -= p
    elif residue > p:
        residue -= 2 * p
    return residue


def two_bridge_signs(p: int, q: int) -> List[int]:
    """
    :return: the sign sequence e_i = (-1)^floor(i*q/p), i = 1..p-1, for the normalised q
    """
    _q = normalise_two_bridge_q(p, q)
    return [1 if ((i * _q) // p) % 2 == 0 else -1 for i in range(1, p)]


def two_bridge_presentation(p: int, q: int) -> MarkedGroup:
    """
    Over-presentation <u,v | W*u = v*W> of the two-bridge knot K(p,q)

    W = u^e1 * v^e2 * u^e3 * ... with signs from two_bridge_signs. The meridian is u.

    :param p: odd positive integer
    :param q: integer coprime to p
    :return: marked knot group
    """
    TwoBridge(p, q)
    if p == 1:
        return _meridian_only("u")

    letters = []
    for i, sign in enumerate(two_bridge_signs(p, q), start=1):
        letters.append((0 if i % 2 == 1 else 1, sign))
    omega = Word(letters)
    u, v = Word.generator(0), Word.generator(1)
    relator = omega * u * omega.inverse() * v.inverse()
    return MarkedGroup(Presentation(["u", "v"], [relator], {Mark.MERIDIAN: u}), [1, 1], {0: Word(), 1: omega})


def _artin_generator(strand: int, sign: int) -> Dict[int, Word]:
    x_i, x_next = Word.generator(strand), Word.generator(strand + 1)
    if sign == 1:
        return {strand: x_i * x_next * x_i.inverse(), strand + 1: x_i}
    return {strand: x_next, strand + 1: x_next.inverse() * x_i * x_next}


def _conjugate_form(word: Word) -> Tuple[Word, int]:
    letters = word.letters
    middle = len(letters) // 2
    conjugator = Word(letters[:middle])
    if len(letters) % 2 == 0 or letters[middle][1] != 1 or Word(letters[middle + 1 :]) != conjugator.inverse():
        raise RuntimeError(f"{word!r} is not a conjugate of a generator")
    return conjugator, letters[middle][0]


def torus_presentation(p: int, q: int, mirror: bool = False) -> MarkedGroup:
    """
    Presentation of T(p,q) as the closure of the p-strand braid (s_1 ... s_(p-1))^q

    Generators are the p strands, relators x_j^-1 * b(x_j) for the Artin action b of the braid, one dropped.

    :param p: number of strands
    :param q: number of twists
    :param mirror: close the inverse-letter braid instead
    :return: marked knot group, meridian x1
    """
    Torus(p, q)
    identity = {strand: Word.generator(strand) for strand in range(p)}
    images = dict(identity)
    sign = -1 if mirror else 1
    for _ in range(q):
        for strand in range(p - 1):
            action = dict(identity)
            action.update(_artin_generator(strand, sign))
            images = {j: substitute(word, action) for j, word in images.items()}

    relators = [Word.generator(j).inverse() * images[j] for j in range(p - 1)]

    conjugators: Dict[int, Word] = {0: Word()}
    strand = 0
    for _ in range(p - 1):
        conjugator, target = _conjugate_form(images[strand])
        conjugators[target] = conjugator.inverse() * conjugators[strand]
        strand = target

    names = [f"x{j + 1}" for j in range(p)]
    presentation = Presentation(names, relators, {Mark.MERIDIAN: Word.generator(0)})
    return MarkedGroup(presentation, [1] * p, conjugators)


def diagram_presentation(code: Sequence[Crossing]) -> MarkedGroup:
    """
    Wirtinger presentation of a PD code

    One generator per arc, arcs numbered by first edge along the orientation (the arc of edge 1 is x1, the meridian).
    Each crossing with incoming under arc x_in, outgoing under arc x_out and over arc x_o contributes
    x_o^e * x_in * x_o^-e * x_out^-1, e = +1 when the over strand runs b -> d.
    The crossing that starts arc x1 is dropped.
    The longitude is the product of over arcs met along the knot, corrected by the writhe.

    :param code: validated PD code
    :return: marked knot group with meridian and longitude marks
    """
    if not code:
        group = _meridian_only("x1")
        presentation = group.presentation.with_marks({Mark.LONGITUDE: Word()})
        return MarkedGroup(presentation, group.degrees, group.conjugators)

    edge_count = 2 * len(code)
    parent = {label: label for label in range(1, edge_count + 1)}

    def _find(label: int) -> int:
        while parent[label] != label:
            parent[label] = parent[parent[label]]
            label = parent[label]
        return label

    for _, b, _, d in code:
        parent[_find(b)] = _find(d)

    arc_numbers: Dict[int, int] = {}
    for label in range(1, edge_count + 1):
        arc_numbers.setdefault(_find(label), len(arc_numbers))

    def _arc(label: int) -> int:
        return arc_numbers[_find(label)]

    crossings = []
    for crossing in code:
        a, b, c, _ = crossing
        crossings.append((_arc(a), _arc(c), _arc(b), _over_direction(crossing, edge_count)))

    closing = next(index for index, (_, arc_out, _, _) in enumerate(crossings) if arc_out == 0)
    relators = []
    for index, (arc_in, arc_out, arc_over, sign) in enumerate(crossings):
        if index == closing:
            continue
        over = Word.generator(arc_over, sign)
        relators.append(over * Word.generator(arc_in) * over.inverse() * Word.generator(arc_out).inverse())

    under_crossing = {crossing[0]: index for index, crossing in enumerate(code)}
    conjugators: Dict[int, Word] = {0: Word()}
    winding = Word()
    label = code[closing][2]
    for _ in range(edge_count):
        if label in under_crossing:
            arc_in, arc_out, arc_over, sign = crossings[under_crossing[label]]
            over = Word.generator(arc_over, sign)
            conjugators.setdefault(arc_out, over * conjugators[arc_in])
            winding = over * winding
        label = label % edge_count + 1
    writhe = sum(sign for _, _, _, sign in crossings)
    longitude = Word.generator(0, -writhe) * winding

    names = [f"x{arc + 1}" for arc in range(len(arc_numbers))]
    presentation = Presentation(names, relators, {Mark.MERIDIAN: Word.generator(0), Mark.LONGITUDE: longitude})
    return MarkedGroup(presentation, [1] * len(names), conjugators)


def _sum_presentation(left: MarkedGroup, right: MarkedGroup) -> MarkedGroup:
    product, offset = free_product(left.presentation, right.presentation)
    identification = left.meridian * shift_word(right.meridian, offset).inverse()
    names = [f"x{index + 1}" for index in range(product.generator_count)]
    presentation = Presentation(names, list(product.relators) + [identification], {Mark.MERIDIAN: left.meridian})

    conjugators = dict(left.conjugators)
    for generator, conjugator in right.conjugators.items():
        conjugators[generator + offset] = shift_word(conjugator, offset)
    return MarkedGroup(presentation, list(left.degrees) + list(right.degrees), conjugators)


def wirtinger(knot: KnotSpec) -> MarkedGroup:
    """
    Knot group presentation with marked meridian

    Two-bridge and torus knots use their standard two-generator and braid-closure presentations, diagrams their
    Wirtinger presentation, connected sums the free product with meridians identified. Mirrors are realised by changing
    parameters (q -> -q, inverse braid) or by reflecting the diagram.

    :param knot: knot description
    :return: deficiency one presentation, every generator a meridian, abelianization Z
    """
    if isinstance(knot, TwoBridge):
        return two_bridge_presentation(knot.p, knot.q)
    if isinstance(knot, Torus):
        return torus_presentation(knot.p, knot.q)
    if isinstance(knot, Diagram):
        return diagram_presentation(knot.code)
    if isinstance(knot, Sum):
        return _sum_presentation(wirtinger(knot.left), wirtinger(knot.right))
    if isinstance(knot, Mirror):
        inner = knot.inner
        if isinstance(inner, TwoBridge):
            return two_bridge_presentation(inner.p, -inner.q)
        if isinstance(inner, Torus):
            return torus_presentation(inner.p, inner.q, mirror=True)
        if isinstance(inner, Diagram):
            return diagram_presentation(mirror_code(inner.code))
        if isinstance(inner, Sum):
            return wirtinger(Sum(Mirror(inner.left), Mirror(inner.right)))
        if isinstance(inner, Mirror):
            return wirtinger(inner.inner)
    raise KnotSpecError(f"Unsupported knot description {knot!r}")


def build_Jn(knot: KnotSpec, n: int) -> KnotSpec:  # noqa: N802
    """
    Ribbon knot #_n (J # -J)

    :param knot: the knot J
    :param n: number of J # -J summands, 0 gives the unknot
    :return: iterated connected sum
    """
    if n < 0:
        raise KnotSpecError(f"Number of summands [{n}] must not be negative")
    if n == 0:
        logger.info("build_Jn with n = 0 gives the unknot")
        return unknot()
    summand = Sum(knot, Mirror(knot))
    result: KnotSpec = summand
    for _ in range(n - 1):
        result = Sum(result, summand)
    return result


@lru_cache(maxsize=None)
def load_knot_table() -> Dict[str, Diagram]:
    """
    Loads and validates the knot table shipped in resources/knots

    :return: PD diagrams by knot name
    """
    table = json.loads(resources.files("rimforge.resources.knots").joinpath("knot-table.json").read_text())
    schema = json.loads(
        resources.files("rimforge.resources.json_schemas").joinpath("knot-table-schema.json").read_text()
    )
    jsonschema_validate(instance=table, schema=schema)
    return {entry["name"]: Diagram(entry["pd"], name=entry["name"]) for entry in table["knots"]}


def named_knot(name: str) -> Diagram:
    """
    :param name: knot table name, e.g. '3_1'
    :return: the knot's diagram
    """
    table = load_knot_table()
    try:
        return table[name]
    except KeyError:
        raise KnotSpecError(f"Knot [{name}] is not in the knot table, known knots: {', '.join(sorted(table))}")
