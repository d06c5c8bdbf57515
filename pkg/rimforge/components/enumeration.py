import logging

from collections import deque
from enum import Enum
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.combinatorics import Permutation, PermutationGroup

from rimforge.components import AbelianInvariants, Presentation, Word, abelianization, fresh_name

logger = logging.getLogger(__name__)

DEFAULT_MAX_COSETS = 200000


class RewritingError(ValueError):
    """
    Raised when a word cannot be rewritten into subgroup generators, or a map on generators is not a usable epimorphism.
    """

    pass


class EnumerationStatus(Enum):
    """
    Represents whether a coset enumeration finished within its budget.
    """

    COMPLETE = "complete"
    INDETERMINATE = "indeterminate"


class _TableFull(Exception):
    pass


class CosetTable:
    """
    Represents the result of a coset enumeration.

    Rows are indexed by coset (coset 0 is the subgroup itself), columns by 2 * generator for the generator and
    2 * generator + 1 for its inverse. Undefined entries are -1, which only occur in incomplete tables.
    """

    def __init__(self, rows: Sequence[Sequence[int]], generator_count: int, complete: bool):
        """
        :param rows: action of each column on each coset
        :param generator_count: number of generators of the enumerated presentation
        :param complete: whether every entry is defined and every relator closes at every coset
        """
        self.rows: Tuple[Tuple[int, ...], ...] = tuple(tuple(row) for row in rows)
        self.generator_count = generator_count
        self.complete = complete

    @property
    def coset_count(self) -> int:
        return len(self.rows)

    @property
    def status(self) -> EnumerationStatus:
        return EnumerationStatus.COMPLETE if self.complete else EnumerationStatus.INDETERMINATE

    def act(self, coset: int, word: Word) -> int:
        """
        :param coset: starting coset
        :param word: word to trace
        :return: coset reached by the right action of the word
        """
        for generator, sign in word.letters:
            coset = self.rows[coset][2 * generator + (0 if sign == 1 else 1)]
            if coset < 0:
                raise ValueError("Coset table is incomplete")
        return coset

    def to_dict(self) -> Dict:
        return {"status": self.status.value, "cosets": self.coset_count}

    def __repr__(self) -> str:
        """
        :return: String representation of a CosetTable
        """
        return f"CosetTable <cosets={self.coset_count}, complete={self.complete}>"


def _columns(word: Word) -> List[int]:
    return [2 * generator + (0 if sign == 1 else 1) for generator, sign in word.letters]


class _Enumerator:
    """
    Hasse-Lewis-Todd (HLT) coset enumeration with lookahead

    Cosets are defined in order while scanning relators; coincidences are processed with a union-find forest and a
    queue of dead cosets. When the budget of live cosets is reached, every live coset is scanned against every relator
    without defining new cosets; the enumeration gives up if that frees nothing.
    """

    def __init__(self, presentation: Presentation, subgroup: Sequence[Word], max_cosets: int):
        self.column_count = 2 * presentation.generator_count
        self.relators = [_columns(relator) for relator in presentation.relators]
        self.subgroup = [_columns(word) for word in subgroup]
        self.max_cosets = max_cosets

        self.table: List[List[int]] = [[-1] * self.column_count]
        self.parent: List[int] = [0]
        self.live = 1

    def _alive(self, coset: int) -> bool:
        return self.parent[coset] == coset

    def _rep(self, coset: int) -> int:
        root = coset
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[coset] != root:
            self.parent[coset], coset = root, self.parent[coset]
        return root

    def _define(self, coset: int, column: int) -> None:
        if self.live >= self.max_cosets:
            raise _TableFull()
        new = len(self.table)
        self.table.append([-1] * self.column_count)
        self.parent.append(new)
        self.live += 1
        self.table[coset][column] = new
        self.table[new][column ^ 1] = coset

    def _merge(self, first: int, second: int, queue: deque) -> None:
        first, second = self._rep(first), self._rep(second)
        if first == second:
            return
        keep, drop = min(first, second), max(first, second)
        self.parent[drop] = keep
        self.live -= 1
        queue.append(drop)

    def _coincidence(self, first: int, second: int) -> None:
        queue: deque = deque()
        self._merge(first, second, queue)
        while queue:
            dead = queue.popleft()
            for column in range(self.column_count):
                target = self.table[dead][column]
                if target < 0:
                    continue
                self.table[target][column ^ 1] = -1
                source, image = self._rep(dead), self._rep(target)
                if self.table[source][column] >= 0:
                    self._merge(image, self.table[source][column], queue)
                elif self.table[image][column ^ 1] >= 0:
                    self._merge(source, self.table[image][column ^ 1], queue)
                else:
                    self.table[source][column] = image
                    self.table[image][column ^ 1] = source

    def _scan(self, coset: int, word: List[int], define: bool) -> None:
        table = self.table
        forward, backward = coset, coset
        start, end = 0, len(word) - 1
        while True:
            while start <= end and table[forward][word[start]] >= 0:
                forward = table[forward][word[start]]
                start += 1
            if start > end:
                if forward != backward:
                    self._coincidence(forward, backward)
                return
            while end >= start and table[backward][word[end] ^ 1] >= 0:
                backward = table[backward][word[end] ^ 1]
                end -= 1
            if end < start:
                self._coincidence(forward, backward)
                return
            if start == end:
                table[forward][word[start]] = backward
                table[backward][word[start] ^ 1] = forward
                return
            if not define:
                return
            self._define(forward, word[start])

    def _lookahead(self) -> None:
        before = self.live
        for coset in range(len(self.table)):
            for relator in self.relators:
                if not self._alive(coset):
                    break
                self._scan(coset, relator, define=False)
        logger.debug(f"Lookahead: {before} -> {self.live} live coset(s)")

    def _process(self, coset: int) -> None:
        if coset == 0:
            for word in self.subgroup:
                self._scan(0, word, define=True)
        for relator in self.relators:
            if not self._alive(coset):
                return
            self._scan(coset, relator, define=True)
        for column in range(self.column_count):
            if not self._alive(coset):
                return
            if self.table[coset][column] < 0:
                self._define(coset, column)

    def run(self) -> CosetTable:
        coset = 0
        while coset < len(self.table):
            if self._alive(coset):
                try:
                    self._process(coset)
                except _TableFull:
                    live = self.live
                    self._lookahead()
                    if self.live >= live or len(self.table) > 16 * self.max_cosets:
                        logger.warning(f"Coset budget of {self.max_cosets} exhausted, enumeration is indeterminate")
                        return self._compact(complete=False)
                    continue
            coset += 1
        return self._compact(complete=True)

    def _compact(self, complete: bool) -> CosetTable:
        live = [coset for coset in range(len(self.table)) if self._alive(coset)]
        renumber = {coset: index for index, coset in enumerate(live)}
        rows = []
        for coset in live:
            row = []
            for target in self.table[coset]:
                row.append(renumber[self._rep(target)] if target >= 0 else -1)
            rows.append(row)
        if complete and any(entry < 0 for row in rows for entry in row):
            complete = False
        return CosetTable(rows, self.column_count // 2, complete)


def enumerate_cosets(
    presentation: Presentation, subgroup: Sequence[Word] = (), max_cosets: int = DEFAULT_MAX_COSETS
) -> CosetTable:
    """
    Enumerates the cosets of a subgroup

    :param presentation: ambient group
    :param subgroup: generating words of the subgroup, the trivial subgroup when empty
    :param max_cosets: maximum number of live cosets
    :return: complete table, whose coset count is the index, or an incomplete (indeterminate) one
    """
    for word in subgroup:
        if word.max_generator() >= presentation.generator_count:
            raise ValueError(f"Subgroup word refers to generator [{word.max_generator()}] which does not exist")
    logger.debug(f"Enumerating cosets of {len(subgroup)} subgroup generator(s) in {presentation!r}")
    table = _Enumerator(presentation, subgroup, max_cosets).run()
    logger.debug(f"Enumeration finished: {table!r}")
    return table


def group_order(presentation: Presentation, max_cosets: int = DEFAULT_MAX_COSETS) -> Optional[int]:
    """
    :return: order of the group, None when the enumeration is indeterminate
    """
    table = enumerate_cosets(presentation, (), max_cosets)
    return table.coset_count if table.complete else None


def permutation_representation(table: CosetTable) -> List[Permutation]:
    """
    Coset action of each generator

    Permutations act on the right (sympy multiplies left to right), so the image of a word is the product of the
    images of its letters in order.

    :param table: complete coset table
    :return: one permutation per generator
    """
    if not table.complete:
        raise ValueError("Coset table is incomplete, no permutation representation")
    return [Permutation([row[2 * generator] for row in table.rows]) for generator in range(table.generator_count)]


def evaluate(permutations: Sequence[Permutation], word: Word, size: Optional[int] = None) -> Permutation:
    """
    :param permutations: image of each generator
    :param word: word to evaluate
    :param size: degree, needed when there are no generators
    :return: image of the word
    """
    degree = size if size is not None else (permutations[0].size if permutations else 1)
    result = Permutation(list(range(degree)))
    for generator, sign in word.letters:
        result = result * (permutations[generator] if sign == 1 else ~permutations[generator])
    return result


def element_order(table: CosetTable, word: Word) -> int:
    """
    :param table: complete coset table
    :param word: element
    :return: order of the permutation the element induces (the element order when the subgroup is trivial)
    """
    return int(evaluate(permutation_representation(table), word, table.coset_count).order())


def permutation_group(table: CosetTable) -> PermutationGroup:
    permutations = permutation_representation(table)
    return PermutationGroup(permutations or [Permutation([0])])


def verify_table(table: CosetTable, presentation: Presentation, subgroup: Sequence[Word] = ()) -> bool:
    """
    Checks that every relator closes at every coset and that the subgroup generators fix coset 0

    :return: True for a consistent complete table
    """
    if not table.complete:
        return False
    for coset in range(table.coset_count):
        for relator in presentation.relators:
            if table.act(coset, relator) != coset:
                return False
    return all(table.act(0, word) == 0 for word in subgroup)


class SubgroupPresentation:
    """
    Represents a finite index subgroup presented by Reidemeister-Schreier rewriting.

    Subgroup generators correspond to pairs (coset, ambient generator) whose Schreier word
    representative(coset) * generator * representative(coset * generator)^-1 is not freely trivial.
    """

    def __init__(
        self,
        ambient: Presentation,
        action: List[List[int]],
        representatives: List[Word],
        presentation: Presentation,
        schreier_generators: Dict[Tuple[int, int], int],
        transversal_generator: Optional[int] = None,
    ):
        """
        :param ambient: ambient presentation
        :param action: coset table rows of the ambient generators (column layout as CosetTable)
        :param representatives: transversal word of each coset
        :param presentation: presentation of the subgroup
        :param schreier_generators: subgroup generator index of each non trivial (coset, ambient generator)
        :param transversal_generator: ambient generator t for transversals made of powers of t
        """
        self.ambient = ambient
        self.action = action
        self.representatives = representatives
        self.presentation = presentation
        self.schreier_generators = schreier_generators
        self.transversal_generator = transversal_generator
        self._ambient_words = {
            index: self._schreier_word(coset, generator) for (coset, generator), index in schreier_generators.items()
        }

    @property
    def index(self) -> int:
        return len(self.representatives)

    def table(self) -> CosetTable:
        return CosetTable(self.action, self.ambient.generator_count, True)

    def _schreier_word(self, coset: int, generator: int) -> Word:
        target = self.action[coset][2 * generator]
        return self.representatives[coset] * Word.generator(generator) * self.representatives[target].inverse()

    def ambient_word(self, subgroup_generator: int) -> Word:
        """
        :return: the ambient word a subgroup generator stands for
        """
        return self._ambient_words[subgroup_generator]

    def rewrite(self, word: Word, start: int = 0) -> Tuple[Word, int]:
        """
        Reidemeister rewriting of an ambient word read from a coset

        :param word: ambient word
        :param start: coset to read from
        :return: rewritten word in subgroup generators and the coset reached
        """
        coset = start
        letters = []
        for generator, sign in word.letters:
            if sign == 1:
                index = self.schreier_generators.get((coset, generator))
                if index is not None:
                    letters.append((index, 1))
                coset = self.action[coset][2 * generator]
            else:
                coset = self.action[coset][2 * generator + 1]
                index = self.schreier_generators.get((coset, generator))
                if index is not None:
                    letters.append((index, -1))
        return Word(letters), coset

    def rewrite_element(self, word: Word) -> Word:
        """
        :param word: ambient word representing an element of the subgroup
        :return: the element in subgroup generators
        """
        rewritten, coset = self.rewrite(word)
        if coset != 0:
            raise RewritingError(f"Word does not lie in the subgroup (ends at coset {coset})")
        return rewritten

    def __repr__(self) -> str:
        """
        :return: String representation of a SubgroupPresentation
        """
        return f"SubgroupPresentation <index={self.index}, generators={self.presentation.generator_count}>"


def _schreier_presentation(
    ambient: Presentation,
    action: List[List[int]],
    representatives: List[Word],
    transversal_generator: Optional[int] = None,
) -> SubgroupPresentation:
    names: List[str] = []
    schreier_generators: Dict[Tuple[int, int], int] = {}
    for generator in range(ambient.generator_count):
        for coset in range(len(representatives)):
            target = action[coset][2 * generator]
            word = representatives[coset] * Word.generator(generator) * representatives[target].inverse()
            if word.is_identity:
                continue
            schreier_generators[(coset, generator)] = len(names)
            names.append(fresh_name(f"{ambient.generators[generator]}_{coset}", names + list(ambient.generators)))

    subgroup = SubgroupPresentation(
        ambient, action, representatives, Presentation(names), schreier_generators, transversal_generator
    )
    relators = []
    for coset in range(len(representatives)):
        for relator in ambient.relators:
            rewritten, end = subgroup.rewrite(relator, coset)
            if end != coset:
                raise RewritingError(f"Relator does not close at coset {coset}, the action is not a homomorphism")
            relators.append(rewritten)
    subgroup.presentation = Presentation(names, relators)
    return subgroup


def cyclic_action(presentation: Presentation, modulus: int, images: Mapping[int, int]) -> List[List[int]]:
    """
    Coset table of the kernel of a map onto Z/modulus, cosets numbered by residue

    :param presentation: ambient group
    :param modulus: order of the cyclic quotient
    :param images: residue of each generator
    :return: table rows
    """
    rows = []
    for residue in range(modulus):
        row = []
        for generator in range(presentation.generator_count):
            image = images[generator] % modulus
            row.extend([(residue + image) % modulus, (residue - image) % modulus])
        rows.append(row)
    return rows


def _check_homomorphism(presentation: Presentation, modulus: int, images: Mapping[int, int]) -> None:
    for generator in range(presentation.generator_count):
        if generator not in images:
            raise RewritingError(f"No image given for generator [{presentation.generators[generator]}]")
    for relator in presentation.relators:
        image = sum(sign * images[generator] for generator, sign in relator.letters)
        if image % modulus != 0:
            raise RewritingError(
                f"Relator {presentation.word_to_text(relator)} maps to {image % modulus} in Z/{modulus}, "
                f"not a homomorphism"
            )


def reidemeister_schreier(presentation: Presentation, d: int, epimorphism: Mapping[int, int]) -> SubgroupPresentation:
    """
    Presents the kernel of an epimorphism onto Z/d

    The transversal is {t^0, ..., t^(d-1)} for the first generator t whose image is coprime to d, coset k being the
    coset of t^k. For knot groups with the meridian first, t is the meridian and the deck action is t-conjugation.

    :param presentation: ambient group
    :param d: order of the cyclic quotient
    :param epimorphism: image in Z/d of each generator
    :return: kernel presentation with rewriting data
    """
    if d < 1:
        raise RewritingError(f"Cyclic quotient order [{d}] must be positive")
    _check_homomorphism(presentation, d, epimorphism)
    transversal_generator = next(
        (g for g in range(presentation.generator_count) if gcd(epimorphism[g] % d, d) == 1), None
    )
    if transversal_generator is None:
        raise RewritingError(f"No generator has image coprime to {d}, cannot build a transversal of powers")

    step = epimorphism[transversal_generator] % d
    step_inverse = pow(step, -1, d) if d > 1 else 0
    exponents = {generator: (epimorphism[generator] * step_inverse) % d for generator in epimorphism}
    action = cyclic_action(presentation, d, exponents)
    representatives = [Word.generator(transversal_generator, k) for k in range(d)]
    subgroup = _schreier_presentation(presentation, action, representatives, transversal_generator)
    logger.debug(f"Reidemeister-Schreier: {subgroup!r} of {presentation!r}")
    return subgroup


def subgroup_presentation(presentation: Presentation, table: CosetTable) -> SubgroupPresentation:
    """
    Presents the subgroup of a complete coset table, with a breadth-first Schreier transversal

    :param presentation: ambient group
    :param table: complete coset table
    :return: subgroup presentation with rewriting data
    """
    if not table.complete:
        raise RewritingError("Coset table is incomplete")
    representatives: List[Optional[Word]] = [None] * table.coset_count
    representatives[0] = Word()
    queue = deque([0])
    while queue:
        coset = queue.popleft()
        for column in range(2 * table.generator_count):
            target = table.rows[coset][column]
            if representatives[target] is None:
                generator, sign = column // 2, (1 if column % 2 == 0 else -1)
                representatives[target] = representatives[coset] * Word([(generator, sign)])
                queue.append(target)
    return _schreier_presentation(presentation, [list(row) for row in table.rows], list(representatives))


def deck_transformation_action(subgroup: SubgroupPresentation, inverse: bool = False) -> Dict[int, Word]:
    """
    Automorphism of a cyclic-cover kernel induced by the transversal generator

    :param subgroup: kernel from reidemeister_schreier
    :param inverse: use h -> t h t^-1 rather than h -> t^-1 h t
    :return: image of each subgroup generator, in subgroup generators
    """
    if subgroup.transversal_generator is None:
        raise RewritingError("Subgroup was not built on a transversal of powers of one generator")
    t = Word.generator(subgroup.transversal_generator)
    action = {}
    for generator in range(subgroup.presentation.generator_count):
        word = subgroup.ambient_word(generator)
        conjugate = t * word * t.inverse() if inverse else t.inverse() * word * t
        action[generator] = subgroup.rewrite_element(conjugate)
    return action


def cyclic_epimorphisms(presentation: Presentation, modulus: int, limit: int = 20000) -> Optional[List[Dict[int, int]]]:
    """
    Every epimorphism onto Z/modulus, in lexicographic order of generator images

    :param limit: maximum number of candidate assignments to try
    :return: list of generator images, None when there are more candidates than the limit
    """
    count = presentation.generator_count
    if modulus ** count > limit:
        return None
    matrix = [[relator.exponent_sum(g) for g in range(count)] for relator in presentation.relators]
    epimorphisms = []
    for code in range(modulus ** count):
        images = [(code // modulus ** (count - 1 - g)) % modulus for g in range(count)]
        if any(sum(row[g] * images[g] for g in range(count)) % modulus for row in matrix):
            continue
        unit = 0
        for image in images:
            unit = gcd(unit, image)
        if gcd(unit, modulus) != 1:
            continue
        epimorphisms.append(dict(enumerate(images)))
    return epimorphisms


def kernel_presentation(presentation: Presentation, modulus: int, images: Mapping[int, int]) -> Presentation:
    """
    :return: presentation of the kernel of a map onto Z/modulus, with a breadth-first transversal
    """
    _check_homomorphism(presentation, modulus, images)
    table = CosetTable(cyclic_action(presentation, modulus, images), presentation.generator_count, True)
    return subgroup_presentation(presentation, table).presentation


def cyclic_quotient_invariants(
    presentation: Presentation, max_k: int, limit: int = 20000
) -> Optional[List[Tuple[int, AbelianInvariants]]]:
    """
    Abelianizations of the kernels of every epimorphism onto Z/k, 2 <= k <= max_k

    The sorted list is an invariant of the group, finer than the abelianization alone.

    :param presentation: any presentation
    :param max_k: largest cyclic quotient order
    :param limit: candidate budget per k, see cyclic_epimorphisms
    :return: (k, kernel abelianization) pairs in sorted order, None when a budget is exceeded
    """
    invariants = []
    for k in range(2, max_k + 1):
        epimorphisms = cyclic_epimorphisms(presentation, k, limit)
        if epimorphisms is None:
            logger.debug(f"Too many candidate maps onto Z/{k}, cyclic quotient invariants skipped")
            return None
        for images in epimorphisms:
            invariants.append((k, abelianization(kernel_presentation(presentation, k, images))))
    return sorted(invariants, key=lambda item: (item[0], item[1].free_rank, item[1].torsion))
