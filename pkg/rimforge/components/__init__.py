import logging

from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from sympy import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

logger = logging.getLogger(__name__)

DEFAULT_TIETZE_BUDGET = 200

# (generator index, exponent sign)
Letter = Tuple[int, int]


class PresentationError(ValueError):
    """
    Raised when a word or presentation refers to generators that do not exist, or when generator names clash.
    """

    pass


class Mark(Enum):
    """
    Represents the distinguished elements a presentation can carry alongside its relators.
    """

    MERIDIAN = "meridian"
    PUSHOFF = "pushoff"
    GAMMA = "gamma"
    LONGITUDE = "longitude"


def _reduce(letters: Iterable[Letter]) -> Tuple[Letter, ...]:
    stack: List[Letter] = []
    for generator, sign in letters:
        if stack and stack[-1][0] == generator and stack[-1][1] == -sign:
            stack.pop()
        else:
            stack.append((generator, sign))
    return tuple(stack)


class Word:
    """
    Represents an element of a free group as a freely reduced sequence of signed generators.

    Generators are referred to by index; names only exist on the Presentation a word belongs to. The empty sequence is
    the identity. Words are immutable.
    """

    def __init__(self, letters: Iterable[Letter] = ()):
        """
        :param letters: sequence of (generator index, +1/-1) pairs, reduced on construction
        """
        _letters = tuple((int(generator), int(sign)) for generator, sign in letters)
        for generator, sign in _letters:
            if generator < 0:
                raise PresentationError(f"Generator index [{generator}] is negative")
            if sign not in (1, -1):
                raise PresentationError(f"Exponent sign [{sign}] must be 1 or -1")

        self.letters: Tuple[Letter, ...] = _reduce(_letters)

    @classmethod
    def generator(cls, index: int, power: int = 1) -> "Word":
        """
        :param index: generator index
        :param power: exponent, may be negative or zero
        :return: the word g^power
        """
        sign = 1 if power >= 0 else -1
        return cls([(index, sign)] * abs(power))

    @staticmethod
    def commutator(u: "Word", v: "Word") -> "Word":
        """
        :return: [u,v] = u^-1 v^-1 u v
        """
        return u.inverse() * v.inverse() * u * v

    @staticmethod
    def product(words: Iterable["Word"]) -> "Word":
        letters: List[Letter] = []
        for word in words:
            letters.extend(word.letters)
        return Word(letters)

    @property
    def is_identity(self) -> bool:
        return len(self.letters) == 0

    def inverse(self) -> "Word":
        return Word((generator, -sign) for generator, sign in reversed(self.letters))

    def generators(self) -> Set[int]:
        return {generator for generator, _ in self.letters}

    def max_generator(self) -> int:
        """
        :return: highest generator index occurring in the word, -1 for the identity
        """
        return max((generator for generator, _ in self.letters), default=-1)

    def exponent_sum(self, generator: int) -> int:
        return sum(sign for _generator, sign in self.letters if _generator == generator)

    def occurrences(self, generator: int) -> int:
        return sum(1 for _generator, _ in self.letters if _generator == generator)

    def cyclically_reduced(self) -> "Word":
        letters = self.letters
        start, end = 0, len(letters) - 1
        while start < end and letters[start][0] == letters[end][0] and letters[start][1] == -letters[end][1]:
            start += 1
            end -= 1
        return Word(letters[start : end + 1])

    def syllables(self) -> List[Tuple[int, int]]:
        """
        Groups consecutive letters on the same generator

        :return: list of (generator index, exponent) pairs, e.g. a*a*b^-1 -> [(a, 2), (b, -1)]
        """
        _syllables: List[Tuple[int, int]] = []
        for generator, sign in self.letters:
            if _syllables and _syllables[-1][0] == generator:
                _syllables[-1] = (generator, _syllables[-1][1] + sign)
            else:
                _syllables.append((generator, sign))
        return _syllables

    def to_text(self, names: Sequence[str]) -> str:
        """
        Represents a word in the presentation text grammar, e.g. 'a^2*b^-1', '1' for the identity

        :param names: generator names, indexed by generator index
        :return: word as text
        """
        if self.is_identity:
            return "1"
        _terms = []
        for generator, exponent in self.syllables():
            _terms.append(names[generator] if exponent == 1 else f"{names[generator]}^{exponent}")
        return "*".join(_terms)

    def to_list(self) -> List[List[int]]:
        return [[generator, sign] for generator, sign in self.letters]

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, power: int) -> "Word":
        base = self if power >= 0 else self.inverse()
        return Word(base.letters * abs(power))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        """
        :return: String representation of a Word
        """
        return f"Word <letters={list(self.letters)}>"


def free_reduce(letters: Iterable[Letter], generator_count: Optional[int] = None) -> Word:
    """
    Returns the freely reduced form of a letter sequence

    :param letters: raw (generator index, sign) sequence
    :param generator_count: if given, every index must be below this number
    :return: freely reduced word
    """
    _letters = list(letters)
    if generator_count is not None:
        for generator, _ in _letters:
            if generator >= generator_count:
                raise PresentationError(
                    f"Generator index [{generator}] out of range for {generator_count} generator(s)"
                )
    return Word(_letters)


def substitute(word: Word, assignment: Mapping[int, Word]) -> Word:
    """
    Replaces each generator of a word by its image

    :param word: word to evaluate
    :param assignment: image word for every generator occurring in the word
    :return: freely reduced image
    """
    letters: List[Letter] = []
    for generator, sign in word.letters:
        try:
            image = assignment[generator]
        except KeyError:
            raise PresentationError(f"No substitution given for generator [{generator}]")
        letters.extend(image.letters if sign == 1 else image.inverse().letters)
    return Word(letters)


def _replace(word: Word, generator: int, image: Word) -> Word:
    letters: List[Letter] = []
    for _generator, sign in word.letters:
        if _generator == generator:
            letters.extend(image.letters if sign == 1 else image.inverse().letters)
        else:
            letters.append((_generator, sign))
    return Word(letters)


def cyclic_key(word: Word) -> Tuple[Letter, ...]:
    """
    Canonical form of a relator up to cyclic rotation and inversion

    :param word: any word
    :return: least rotation of the cyclically reduced word or its inverse
    """
    letters = word.cyclically_reduced().letters
    if not letters:
        return ()
    inverse = tuple((generator, -sign) for generator, sign in reversed(letters))
    return min(sequence[i:] + sequence[:i] for sequence in (letters, inverse) for i in range(len(sequence)))


def fresh_name(name: str, taken: Iterable[str]) -> str:
    """
    :param name: preferred name
    :param taken: names already in use
    :return: name, or name with the lowest numeric suffix that is free
    """
    _taken = set(taken)
    candidate = name
    suffix = 2
    while candidate in _taken:
        candidate = f"{name}_{suffix}"
        suffix += 1
    return candidate


def shift_word(word: Word, offset: int) -> Word:
    return Word((generator + offset, sign) for generator, sign in word.letters)


class Presentation:
    """
    Represents a finitely presented group with optional marked elements.

    Relators are stored cyclically reduced; identity relators are dropped. Marks are stored freely reduced only, as they
    name elements rather than conjugacy classes.
    """

    def __init__(
        self, generators: Sequence[str], relators: Iterable[Word] = (), marks: Optional[Mapping[Mark, Word]] = None
    ):
        """
        :param generators: generator names, unique
        :param relators: relator words over the generators
        :param marks: distinguished elements, keyed by Mark
        """
        self.generators: Tuple[str, ...] = tuple(generators)
        if len(set(self.generators)) != len(self.generators):
            raise PresentationError(f"Generator names {list(self.generators)} are not unique")

        _relators = []
        for relator in relators:
            if relator.max_generator() >= len(self.generators):
                raise PresentationError(
                    f"Relator refers to generator [{relator.max_generator()}] but only {len(self.generators)} exist"
                )
            relator = relator.cyclically_reduced()
            if not relator.is_identity:
                _relators.append(relator)
        self.relators: Tuple[Word, ...] = tuple(_relators)

        self.marks: Dict[Mark, Word] = {}
        for mark, word in (marks or {}).items():
            if word.max_generator() >= len(self.generators):
                raise PresentationError(
                    f"Mark [{Mark(mark).value}] refers to generator [{word.max_generator()}] but only "
                    f"{len(self.generators)} exist"
                )
            self.marks[Mark(mark)] = word

    @property
    def generator_count(self) -> int:
        return len(self.generators)

    @property
    def total_length(self) -> int:
        return sum(len(relator) for relator in self.relators)

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise PresentationError(f"Generator [{name}] is not one of {list(self.generators)}")

    def mark(self, mark: Mark) -> Optional[Word]:
        return self.marks.get(mark)

    def with_marks(self, marks: Mapping[Mark, Word]) -> "Presentation":
        _marks = dict(self.marks)
        _marks.update(marks)
        return Presentation(self.generators, self.relators, _marks)

    def renamed(self, generators: Sequence[str]) -> "Presentation":
        if len(generators) != self.generator_count:
            raise PresentationError(f"Expected {self.generator_count} generator name(s), got {len(generators)}")
        return Presentation(generators, self.relators, self.marks)

    def relator_keys(self) -> FrozenSet[Tuple[Letter, ...]]:
        return frozenset(cyclic_key(relator) for relator in self.relators)

    def word_to_text(self, word: Word) -> str:
        return word.to_text(self.generators)

    def to_text(self) -> str:
        """
        :return: presentation in the text grammar, e.g. '<a,b | a^2, b^5, a*b*a*b>'
        """
        return f"<{','.join(self.generators)} | {', '.join(self.word_to_text(r) for r in self.relators)}>"

    def to_dict(self) -> Dict:
        """
        Represents a Presentation as a dictionary

        :return: a Presentation represented as a dictionary
        """
        return {
            "text": self.to_text(),
            "generators": list(self.generators),
            "relators": [self.word_to_text(relator) for relator in self.relators],
            "marks": {mark.value: self.word_to_text(word) for mark, word in sorted(self.marks.items(), key=_mark_key)},
        }

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Presentation)
            and self.generators == other.generators
            and self.relators == other.relators
            and self.marks == other.marks
        )

    def __repr__(self) -> str:
        """
        :return: String representation of a Presentation
        """
        return f"Presentation <generators={list(self.generators)}, relators={len(self.relators)}>"


def _mark_key(item: Tuple[Mark, Word]) -> str:
    return item[0].value


def free_product(left: Presentation, right: Presentation) -> Tuple[Presentation, int]:
    """
    Free product of two presentations

    Right hand generators are renamed where they clash with left hand names. Only the left hand marks are kept.

    :param left: first factor
    :param right: second factor
    :return: the product and the index offset applied to right hand generators
    """
    offset = left.generator_count
    names = list(left.generators)
    for name in right.generators:
        names.append(fresh_name(name, names))
    relators = list(left.relators) + [shift_word(relator, offset) for relator in right.relators]
    return Presentation(names, relators, left.marks), offset


class AbelianInvariants:
    """
    Represents a finitely generated abelian group as Z^free_rank + Z/d1 + ... + Z/dk with d1 | d2 | ... | dk.
    """

    def __init__(self, free_rank: int, torsion: Sequence[int] = ()):
        """
        :param free_rank: rank of the free part
        :param torsion: torsion coefficients, each at least 2, in divisibility order
        """
        if free_rank < 0:
            raise ValueError(f"Free rank [{free_rank}] is negative")
        for coefficient in torsion:
            if coefficient < 2:
                raise ValueError(f"Torsion coefficient [{coefficient}] must be at least 2")
        for smaller, larger in zip(torsion, torsion[1:]):
            if larger % smaller != 0:
                raise ValueError(f"Torsion coefficients {list(torsion)} are not in divisibility order")

        self.free_rank = free_rank
        self.torsion: Tuple[int, ...] = tuple(torsion)

    @property
    def order(self) -> Optional[int]:
        """
        :return: group order, None when infinite
        """
        if self.free_rank > 0:
            return None
        order = 1
        for coefficient in self.torsion:
            order *= coefficient
        return order

    @property
    def cyclic_order(self) -> Optional[int]:
        """
        :return: d when the group is finite cyclic Z/d (1 for the trivial group), otherwise None
        """
        if self.free_rank > 0 or len(self.torsion) > 1:
            return None
        return self.torsion[0] if self.torsion else 1

    def to_text(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{coefficient}" for coefficient in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> Dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion), "text": self.to_text()}

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AbelianInvariants)
            and self.free_rank == other.free_rank
            and self.torsion == other.torsion
        )

    def __hash__(self) -> int:
        return hash((self.free_rank, self.torsion))

    def __repr__(self) -> str:
        """
        :return: String representation of AbelianInvariants
        """
        return f"AbelianInvariants <free_rank={self.free_rank}, torsion={list(self.torsion)}>"


def exponent_matrix(presentation: Presentation) -> List[List[int]]:
    """
    :return: relator by generator matrix of exponent sums
    """
    return [
        [relator.exponent_sum(generator) for generator in range(presentation.generator_count)]
        for relator in presentation.relators
    ]


def abelianization(presentation: Presentation) -> AbelianInvariants:
    """
    Computes the abelianization from the Smith normal form of the exponent sum matrix

    :param presentation: any presentation
    :return: invariant factors of the abelianized group
    """
    columns = presentation.generator_count
    rows = exponent_matrix(presentation)
    if columns == 0 or not rows:
        return AbelianInvariants(columns)

    matrix = DomainMatrix([[ZZ(value) for value in row] for row in rows], (len(rows), columns), ZZ)
    factors = [abs(int(factor)) for factor in invariant_factors(matrix)]
    nonzero = [factor for factor in factors if factor != 0]
    return AbelianInvariants(columns - len(nonzero), sorted(factor for factor in nonzero if factor > 1))


def quotient_by_normal_closure(presentation: Presentation, kills: Sequence[Word]) -> Presentation:
    """
    Adds relators, killing the normal closure of the given words

    :param presentation: group to take a quotient of
    :param kills: words over the presentation's generators
    :return: presentation of the quotient, marks preserved
    """
    for kill in kills:
        if kill.max_generator() >= presentation.generator_count:
            raise PresentationError(
                f"Kill word refers to generator [{kill.max_generator()}] but only {presentation.generator_count} exist"
            )
    return Presentation(presentation.generators, list(presentation.relators) + list(kills), presentation.marks)


class TietzeResult:
    """
    Represents the outcome of a Tietze reduction.

    Substitution maps every generator of the original presentation to a word in the generators of the reduced one,
    realising the isomorphism between the two groups.
    """

    def __init__(self, presentation: Presentation, substitution: Dict[int, Word], kept: List[int], moves: int):
        """
        :param presentation: reduced presentation
        :param substitution: image of each original generator, over the reduced generators
        :param kept: original indices of the surviving generators, in their new order
        :param moves: number of Tietze moves applied
        """
        self.presentation = presentation
        self.substitution = substitution
        self.kept = kept
        self.moves = moves

    def rewrite(self, word: Word) -> Word:
        """
        :param word: word over the original generators
        :return: the same element over the reduced generators
        """
        return substitute(word, self.substitution)

    def __repr__(self) -> str:
        """
        :return: String representation of a TietzeResult
        """
        return f"TietzeResult <kept={self.kept}, moves={self.moves}>"


def _normalise_relators(relators: Iterable[Word]) -> List[Word]:
    _relators: Dict[Tuple[Letter, ...], Word] = {}
    for relator in relators:
        relator = relator.cyclically_reduced()
        if relator.is_identity:
            continue
        key = cyclic_key(relator)
        if key not in _relators:
            _relators[key] = relator
    return [_relators[key] for key in sorted(_relators, key=lambda key: (len(key), key))]


def _reduce_substring(relators: List[Word]) -> Optional[List[Word]]:
    """
    Shortens one relator using more than half of another

    If a piece P of a cyclic permutation P*Q of relator r (or its inverse) with len(P) > len(Q) occurs cyclically in
    relator s, the occurrence is replaced by Q^-1.
    """
    for source_index, source in enumerate(relators):
        length = len(source)
        if length < 3:
            continue
        inverse = source.inverse().letters
        rotations = [sequence[i:] + sequence[:i] for sequence in (source.letters, inverse) for i in range(length)]
        for target_index, target in enumerate(relators):
            if target_index == source_index or len(target) <= length // 2:
                continue
            doubled = target.letters + target.letters
            starts: Dict[Letter, List[int]] = {}
            for position, letter in enumerate(target.letters):
                starts.setdefault(letter, []).append(position)
            for size in range(min(length - 1, len(target)), length // 2, -1):
                for rotation in rotations:
                    piece = rotation[:size]
                    for position in starts.get(piece[0], []):
                        if doubled[position : position + size] == piece:
                            rest = doubled[position + size : position + len(target)]
                            replacement = Word(rotation[size:]).inverse()
                            reduced = (replacement * Word(rest)).cyclically_reduced()
                            _relators = list(relators)
                            _relators[target_index] = reduced
                            return _relators
    return None


def _commuting_pairs(relators: Sequence[Word]) -> Set[FrozenSet[int]]:
    pairs = set()
    for relator in relators:
        if len(relator) != 4:
            continue
        (a, sign_a), (b, sign_b), (c, sign_c), (d, sign_d) = relator.letters
        if a == c and b == d and a != b and sign_a == -sign_c and sign_b == -sign_d:
            pairs.add(frozenset((a, b)))
    return pairs


def _cyclic_syllable_count(word: Word, generator: int) -> int:
    letters = word.letters
    count = 0
    for position, (_generator, _) in enumerate(letters):
        if _generator == generator and letters[position - 1][0] != generator:
            count += 1
    if count == 0 and word.occurrences(generator) > 0:
        count = 1
    return count


def _collect_central(relators: List[Word]) -> Optional[List[Word]]:
    """
    Collects a generator that commutes with every other letter of a relator into a single syllable
    """
    pairs = _commuting_pairs(relators)
    if not pairs:
        return None
    for index, relator in enumerate(relators):
        generators = relator.generators()
        if len(generators) < 2 or _commuting_pairs([relator]):
            continue
        for central in sorted(generators):
            if _cyclic_syllable_count(relator, central) < 2:
                continue
            if all(frozenset((central, other)) in pairs for other in generators if other != central):
                rest = Word((generator, sign) for generator, sign in relator.letters if generator != central)
                _relators = list(relators)
                _relators[index] = Word.generator(central, relator.exponent_sum(central)) * rest
                return _relators
    return None


def _solve_for(relator: Word, generator: int) -> Word:
    letters = relator.letters
    position = next(i for i, (_generator, _) in enumerate(letters) if _generator == generator)
    rotated = letters[position:] + letters[:position]
    rest = Word(rotated[1:])
    return rest.inverse() if rotated[0][1] == 1 else rest


def _best_elimination(
    relators: List[Word], protected: Set[int], length_limit: int
) -> Optional[Tuple[int, int, Word]]:
    candidates = []
    for index, relator in enumerate(relators):
        for generator in sorted(relator.generators()):
            if generator in protected or relator.occurrences(generator) != 1:
                continue
            image = _solve_for(relator, generator)
            new_total = sum(
                len(_replace(other, generator, image).cyclically_reduced())
                for _index, other in enumerate(relators)
                if _index != index
            )
            candidates.append(((new_total, len(relator), -generator), index, generator, image))
    if not candidates:
        return None
    best = min(candidates, key=lambda candidate: candidate[0])
    if best[0][0] > length_limit:
        return None
    return best[1], best[2], best[3]


def tietze_reduce(
    presentation: Presentation, budget: int = DEFAULT_TIETZE_BUDGET, protected: Iterable[int] = ()
) -> TietzeResult:
    """
    Simplifies a presentation by Tietze moves, keeping track of the isomorphism

    Moves are applied in a fixed order until none applies or the budget is spent: normalise relators (cyclic reduction,
    removal of duplicates up to rotation and inversion, shortest first), shorten a relator by more than half of
    another, collect central generators, then eliminate the generator whose removal gives the shortest presentation.
    Eliminations never take the total relator length above that of the input.

    :param presentation: presentation to simplify
    :param budget: maximum number of moves
    :param protected: indices of generators that must not be eliminated
    :return: the reduced presentation with its substitution data
    """
    _protected = set(protected)
    alive = list(range(presentation.generator_count))
    images: Dict[int, Word] = {generator: Word.generator(generator) for generator in alive}
    relators = _normalise_relators(presentation.relators)
    length_limit = presentation.total_length

    moves = 0
    while moves < budget:
        reduced = _reduce_substring(relators)
        if reduced is None:
            reduced = _collect_central(relators)
        if reduced is not None:
            relators = _normalise_relators(reduced)
            moves += 1
            continue

        elimination = _best_elimination(relators, _protected, length_limit)
        if elimination is None:
            break
        index, generator, image = elimination
        relators = _normalise_relators(
            _replace(relator, generator, image) for _index, relator in enumerate(relators) if _index != index
        )
        images = {_generator: _replace(word, generator, image) for _generator, word in images.items()}
        alive.remove(generator)
        moves += 1
    else:
        logger.debug(f"Tietze budget of {budget} move(s) spent")

    renumber = {generator: index for index, generator in enumerate(alive)}

    def _renumbered(word: Word) -> Word:
        return Word((renumber[generator], sign) for generator, sign in word.letters)

    substitution = {generator: _renumbered(word) for generator, word in images.items()}
    marks = {mark: substitute(word, substitution) for mark, word in presentation.marks.items()}
    reduced_presentation = Presentation(
        [presentation.generators[generator] for generator in alive], [_renumbered(r) for r in relators], marks
    )
    logger.debug(
        f"Tietze reduction: {presentation.generator_count} -> {reduced_presentation.generator_count} generator(s), "
        f"length {presentation.total_length} -> {reduced_presentation.total_length}, {moves} move(s)"
    )
    return TietzeResult(reduced_presentation, substitution, alive, moves)


def tietze_simplify(
    presentation: Presentation, effort: int = DEFAULT_TIETZE_BUDGET, protected: Iterable[int] = ()
) -> Presentation:
    """
    :param presentation: presentation to simplify
    :param effort: maximum number of Tietze moves
    :param protected: indices of generators that must not be eliminated
    :return: presentation of an isomorphic group, marks rewritten
    """
    return tietze_reduce(presentation, budget=effort, protected=protected).presentation
