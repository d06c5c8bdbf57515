import logging

from enum import Enum
from itertools import product as cartesian_product
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.combinatorics import Permutation

from rimforge.components import (
    DEFAULT_TIETZE_BUDGET,
    Mark,
    Presentation,
    Word,
    abelianization,
    fresh_name,
    quotient_by_normal_closure,
    tietze_reduce,
)
from rimforge.components.enumeration import (
    DEFAULT_MAX_COSETS,
    enumerate_cosets,
    evaluate,
    permutation_representation,
)
from rimforge.components.surgery import (
    Certification,
    CertificationTier,
    certify_isomorphic,
    certify_trivial,
    tietze_equivalent,
)

logger = logging.getLogger(__name__)

DEFAULT_WITNESS_BUDGET = 2000000
MAX_WITNESS_GROUP_ORDER = 10000
MAX_COMMUTATORS = 4

STABILIZATION_NOTE = (
    "Torus stabilizations of the fiber-sum surface add generator pairs that are killed together with the y and "
    "commutator generators; they leave the final presentations unchanged and are not modelled."
)
SW_PAIR_NOTE = (
    "Smooth distinctness of the surgered surfaces assumes the base is an SW-pair; this is an assumption about the "
    "geometry and is not checked."
)

Witness = Tuple[Word, Word]


class WitnessError(ValueError):
    """
    Raised when commutator witnesses do not satisfy gamma^d = [v1,w1]...[vn,wn].
    """

    pass


class KdStatus(Enum):
    """
    Represents the outcome of checking the normal generation condition.
    """

    HOLDS = "HOLDS"
    FAILS = "FAILS"
    INDETERMINATE = "INDETERMINATE"


class KdResult:
    """
    Represents the outcome of check_kd: H1 = Z/d and the group is the normal closure of gamma.
    """

    def __init__(self, status: KdStatus, d: Optional[int] = None, reason: str = ""):
        self.status = status
        self.d = d
        self.reason = reason

    def to_dict(self) -> Dict:
        return {"status": self.status.value, "d": self.d, "reason": self.reason}

    def __repr__(self) -> str:
        """
        :return: String representation of a KdResult
        """
        return f"KdResult <status={self.status.value}, d={self.d}>"


def check_kd(group: Presentation, gamma: Word, max_cosets: int = DEFAULT_MAX_COSETS) -> KdResult:
    """
    Checks that H1 of a group is finite cyclic and that the group is normally generated by gamma

    :param group: any presentation
    :param gamma: candidate normal generator
    :param max_cosets: coset enumeration budget for the normal generation check
    :return: HOLDS with d, FAILS with the clause that broke, or INDETERMINATE
    """
    if gamma.max_generator() >= group.generator_count:
        raise ValueError(f"Gamma refers to generator [{gamma.max_generator()}] which does not exist")
    invariants = abelianization(group)
    d = invariants.cyclic_order
    if d is None:
        return KdResult(KdStatus.FAILS, reason=f"H1 is {invariants.to_text()}, not finite cyclic")

    quotient = quotient_by_normal_closure(group, [gamma])
    quotient_invariants = abelianization(quotient)
    if quotient_invariants.order != 1:
        return KdResult(
            KdStatus.FAILS, d, f"gamma does not normally generate: the quotient has H1 {quotient_invariants.to_text()}"
        )
    if tietze_reduce(quotient).presentation.generator_count == 0:
        return KdResult(KdStatus.HOLDS, d, "quotient by gamma reduces to no generators")

    table = enumerate_cosets(quotient, (), max_cosets)
    if not table.complete:
        logger.warning("Normal generation check ran out of cosets")
        return KdResult(KdStatus.INDETERMINATE, d, "coset enumeration budget exhausted on the quotient by gamma")
    if table.coset_count != 1:
        return KdResult(
            KdStatus.FAILS, d, f"gamma does not normally generate: the quotient has order {table.coset_count}"
        )
    return KdResult(KdStatus.HOLDS, d, "quotient by gamma enumerates to one coset")


def commutator_product(witnesses: Sequence[Witness]) -> Word:
    return Word.product(Word.commutator(v, w) for v, w in witnesses)


def verify_commutator_witnesses(
    group: Presentation, gamma: Word, d: int, witnesses: Sequence[Witness], max_cosets: int = DEFAULT_MAX_COSETS
) -> bool:
    """
    Checks gamma^d = [v1,w1]...[vn,wn]

    :return: True when certified (free reduction or the regular permutation representation), False when the group
        could not be enumerated and the relation is only asserted
    """
    difference = gamma**d * commutator_product(witnesses).inverse()
    if difference.is_identity:
        return True
    table = enumerate_cosets(group, (), max_cosets)
    if not table.complete:
        logger.warning("Group could not be enumerated, commutator witnesses are asserted rather than certified")
        return False
    identity = Permutation(list(range(table.coset_count)))
    if evaluate(permutation_representation(table), difference, table.coset_count) != identity:
        raise WitnessError(f"gamma^{d} is not the product of the given commutators")
    return True


def _element_words(permutations: Sequence[Permutation], size: int) -> Dict[Permutation, Word]:
    letters = []
    for generator in range(len(permutations)):
        letters.extend([(generator, 1), (generator, -1)])
    identity = Permutation(list(range(size)))
    words = {identity: Word()}
    frontier = [identity]
    while frontier:
        _frontier = []
        for element in frontier:
            for generator, sign in letters:
                image = element * (permutations[generator] if sign == 1 else ~permutations[generator])
                if image not in words:
                    words[image] = words[element] * Word([(generator, sign)])
                    _frontier.append(image)
        frontier = _frontier
    return words


def find_commutator_witnesses(
    group: Presentation,
    gamma: Word,
    d: int,
    budget: int = DEFAULT_WITNESS_BUDGET,
    max_cosets: int = DEFAULT_MAX_COSETS,
) -> Optional[List[Witness]]:
    """
    Bounded search for words v_i, w_i with gamma^d = [v1,w1]...[vn,wn], n <= 4

    Elements are enumerated breadth first in the regular permutation representation, and the first product of
    commutators found in that order is returned, so the result is deterministic.

    :param group: finite group of order at most 10^4
    :param gamma: normal generator
    :param d: order of H1
    :param budget: maximum number of commutator evaluations and product lookups
    :param max_cosets: coset enumeration budget
    :return: witnesses, empty when gamma^d = 1, None when the search was not possible within the budget
    """
    table = enumerate_cosets(group, (), max_cosets)
    if not table.complete or table.coset_count > MAX_WITNESS_GROUP_ORDER:
        logger.warning("Commutator witness search needs a finite group of order at most 10^4")
        return None
    permutations = permutation_representation(table)
    size = table.coset_count
    target = evaluate(permutations, gamma**d, size)
    identity = Permutation(list(range(size)))
    if target == identity:
        return []

    words = _element_words(permutations, size)
    elements = list(words)
    if len(elements) ** 2 > budget:
        logger.warning(f"Commutator witness search needs {len(elements) ** 2} evaluations, budget is {budget}")
        return None

    commutators: Dict[Permutation, Tuple[Permutation, Permutation]] = {}
    for v, w in cartesian_product(elements, repeat=2):
        commutators.setdefault(~v * ~w * v * w, (v, w))
    values = list(commutators)
    spent = len(elements) ** 2

    def _witness(pairs: Sequence[Permutation]) -> List[Witness]:
        return [(words[commutators[c][0]], words[commutators[c][1]]) for c in pairs]

    for count in range(1, MAX_COMMUTATORS + 1):
        for prefix in cartesian_product(values, repeat=count - 1):
            spent += 1
            if spent > budget:
                logger.warning("Commutator witness search budget exhausted")
                return None
            partial = identity
            for value in prefix:
                partial = partial * value
            remainder = ~partial * target
            if remainder in commutators:
                witnesses = _witness(list(prefix) + [remainder])
                verify_commutator_witnesses(group, gamma, d, witnesses, max_cosets)
                return witnesses
    return None


class KdWitness:
    """
    Represents a group satisfying the normal generation condition, with gamma^d written as a product of commutators.

    Construction checks H1, the normal closure of gamma and the commutator relation. The witnesses are certified when
    the relation holds by free reduction or in the enumerated group and gamma is known to normally generate.
    """

    def __init__(
        self,
        group: Presentation,
        gamma: Word,
        d: int,
        witnesses: Sequence[Witness],
        max_cosets: int = DEFAULT_MAX_COSETS,
    ):
        """
        :param group: group with H1 = Z/d
        :param gamma: normal generator
        :param d: order of H1
        :param witnesses: (v_i, w_i) with gamma^d = [v1,w1]...[vn,wn]
        :param max_cosets: coset enumeration budget for the checks
        """
        if gamma.max_generator() >= group.generator_count:
            raise WitnessError(f"Gamma refers to generator [{gamma.max_generator()}] which does not exist")
        kd_result = check_kd(group, gamma, max_cosets)
        if kd_result.status == KdStatus.FAILS:
            raise WitnessError(kd_result.reason)
        if kd_result.d != d:
            raise WitnessError(f"H1 of the group is not Z/{d}")
        relation_certified = verify_commutator_witnesses(group, gamma, d, witnesses, max_cosets)
        if kd_result.status == KdStatus.INDETERMINATE:
            logger.warning("Normal generation by gamma could not be decided, witnesses are asserted")

        self.group = group
        self.gamma = gamma
        self.d = d
        self.witnesses: List[Witness] = list(witnesses)
        self.certified = relation_certified and kd_result.status == KdStatus.HOLDS

    def to_dict(self) -> Dict:
        return {
            "group": self.group.to_text(),
            "gamma": self.group.word_to_text(self.gamma),
            "d": self.d,
            "witnesses": [[self.group.word_to_text(v), self.group.word_to_text(w)] for v, w in self.witnesses],
            "certified": self.certified,
        }

    def __repr__(self) -> str:
        """
        :return: String representation of a KdWitness
        """
        return f"KdWitness <d={self.d}, witnesses={len(self.witnesses)}>"


class SympPipelineResult:
    """
    Represents the presentations produced by the symplectic construction and their certifications.

    xd is the surface complement before the fiber sum kills, md the complement after them, m the ambient manifold.
    """

    def __init__(
        self,
        xd_presentation: Presentation,
        md_presentation: Presentation,
        m_presentation: Presentation,
        md_certification: Certification,
        m_certification: Certification,
        relation_certification: Certification,
        notes: Sequence[str] = (),
    ):
        self.xd_presentation = xd_presentation
        self.md_presentation = md_presentation
        self.m_presentation = m_presentation
        self.md_certification = md_certification
        self.m_certification = m_certification
        self.relation_certification = relation_certification
        self.notes = list(notes)

    @property
    def certification_tier(self) -> CertificationTier:
        return self.md_certification.tier

    def to_dict(self) -> Dict:
        return {
            "xd": self.xd_presentation.to_dict(),
            "md": self.md_presentation.to_dict(),
            "m": self.m_presentation.to_dict(),
            "md_certification": self.md_certification.to_dict(),
            "m_certification": self.m_certification.to_dict(),
            "relation_certification": self.relation_certification.to_dict(),
            "notes": self.notes,
        }

    def __repr__(self) -> str:
        """
        :return: String representation of a SympPipelineResult
        """
        return (
            f"SympPipelineResult <md={self.md_certification.tier.value}, m={self.m_certification.tier.value}>"
        )


class _SurfaceComplement:
    """
    Generator layout of the surface complement presentation: x (group), alpha, beta, y, a, b, gamma.
    """

    def __init__(self, group: Presentation, commutator_count: int, d: int):
        self.group = group
        self.l = group.generator_count
        self.n = commutator_count
        self.d = d

        names = list(group.generators)
        for name in ["alpha", "beta"]:
            names.append(fresh_name(name, names))
        for name in group.generators:
            names.append(fresh_name(f"y_{name}", names))
        for prefix in ["a", "b"]:
            for j in range(1, commutator_count + 1):
                names.append(fresh_name(f"{prefix}{j}", names))
        for k in range(1, d + 1):
            names.append(fresh_name(f"gamma{k}", names))
        self.names = names

    @property
    def alpha(self) -> Word:
        return Word.generator(self.l)

    @property
    def beta(self) -> Word:
        return Word.generator(self.l + 1)

    def x(self, i: int) -> Word:
        return Word.generator(i)

    def y(self, i: int) -> Word:
        return Word.generator(self.l + 2 + i)

    def a(self, j: int) -> Word:
        return Word.generator(2 * self.l + 2 + j)

    def b(self, j: int) -> Word:
        return Word.generator(2 * self.l + 2 + self.n + j)

    def gamma(self, k: int) -> Word:
        """
        :param k: 1-based index
        """
        return Word.generator(2 * self.l + 2 + 2 * self.n + k - 1)

    def relators(self) -> List[Word]:
        relators = [
            Word.commutator(self.alpha, Word.generator(generator))
            for generator in range(len(self.names))
            if generator != self.l
        ]
        for i in range(self.l):
            relators.extend([Word.commutator(self.beta, self.x(i)), Word.commutator(self.beta, self.y(i))])
        for j in range(self.n):
            relators.extend([Word.commutator(self.beta, self.a(j)), Word.commutator(self.beta, self.b(j))])
        for k in range(1, self.d):
            relators.append(self.beta.inverse() * self.gamma(k) * self.beta * self.gamma(k + 1).inverse())
        eta = self.gamma_product()
        relators.append(
            self.beta.inverse() * self.gamma(self.d) * self.beta * (eta * self.gamma(1) * eta.inverse()).inverse()
        )
        commutators = Word.product(Word.commutator(self.x(i), self.y(i)) for i in range(self.l)) * Word.product(
            Word.commutator(self.a(j), self.b(j)) for j in range(self.n)
        )
        relators.append(commutators * eta.inverse())
        return relators

    def gamma_product(self) -> Word:
        """
        :return: gamma_d * ... * gamma_1
        """
        return Word.product(self.gamma(k) for k in range(self.d, 0, -1))

    def presentation(self) -> Presentation:
        return Presentation(self.names, self.relators(), {Mark.GAMMA: self.gamma(1)})

    def fiber_sum_kills(self, witnesses: Sequence[Witness]) -> List[Word]:
        kills = [self.alpha, self.beta] + [self.y(i) for i in range(self.l)] + list(self.group.relators)
        for j, (v, w) in enumerate(witnesses):
            kills.extend([self.a(j).inverse() * v, self.b(j).inverse() * w])
        return kills


def reduced_commutator_relation(
    kd: KdWitness, max_cosets: int = DEFAULT_MAX_COSETS, tietze_budget: int = DEFAULT_TIETZE_BUDGET
) -> Tuple[Presentation, Certification]:
    """
    The surface complement after the fiber sum kills, before gamma_1 is identified with gamma

    Its relators should be those of the group together with [v1,w1]...[vn,wn] = gamma_1^d. T1 is reached when Tietze
    reduction gives exactly that, otherwise both sides are compared after identifying gamma_1 with gamma.

    :param kd: verified group, gamma and witnesses
    :param max_cosets: coset enumeration budget
    :param tietze_budget: Tietze move budget
    :return: reduced presentation over the group generators and gamma_1, with its certification
    """
    layout = _SurfaceComplement(kd.group, len(kd.witnesses), kd.d)
    gamma_index = layout.gamma(1).letters[0][0]
    killed = quotient_by_normal_closure(layout.presentation(), layout.fiber_sum_kills(kd.witnesses))
    reduced = tietze_reduce(killed, tietze_budget, protected=list(range(layout.l)) + [gamma_index]).presentation

    gamma_1 = Word.generator(layout.l)
    expected = Presentation(
        list(kd.group.generators) + [layout.names[gamma_index]],
        list(kd.group.relators) + [commutator_product(kd.witnesses) * (gamma_1**kd.d).inverse()],
        {Mark.GAMMA: gamma_1},
    )
    if tietze_equivalent(reduced, expected, tietze_budget):
        return reduced, Certification(CertificationTier.T1, "presentations reduce to the same relators")

    certification = certify_isomorphic(
        quotient_by_normal_closure(reduced, [reduced.marks[Mark.GAMMA].inverse() * kd.gamma]),
        quotient_by_normal_closure(expected, [gamma_1.inverse() * kd.gamma]),
        2,
        max_cosets,
        tietze_budget,
    )
    certification.reason = f"after identifying gamma_1 with gamma: {certification.reason}"
    return reduced, certification


def build_symplectic_pipeline(
    kd: KdWitness,
    gamma_word: Optional[Word] = None,
    max_cosets: int = DEFAULT_MAX_COSETS,
    tietze_budget: int = DEFAULT_TIETZE_BUDGET,
) -> SympPipelineResult:
    """
    Builds the fundamental groups of the symplectic construction realising a group with the normal generation condition

    The surface complement X_d has generators x (the group), y, a, b, alpha central, beta acting on the gamma_k by
    cyclic conjugation, and the relation [x1,y1]...[xl,yl][a1,b1]...[an,bn] = gamma_d...gamma_1. The fiber sum kills
    alpha, beta, y, the group relators, a_j^-1 v_j, b_j^-1 w_j and gamma_1^-1 w, which should give the group back.
    Killing gamma_1 as well should give the trivial group.

    :param kd: verified group, gamma and witnesses
    :param gamma_word: word w identified with gamma_1, gamma by default
    :param max_cosets: coset enumeration budget
    :param tietze_budget: Tietze move budget
    :return: the three presentations and their certifications
    """
    w = gamma_word if gamma_word is not None else kd.gamma
    layout = _SurfaceComplement(kd.group, len(kd.witnesses), kd.d)
    xd = layout.presentation()

    kills = layout.fiber_sum_kills(kd.witnesses) + [layout.gamma(1).inverse() * w]
    md = tietze_reduce(quotient_by_normal_closure(xd, kills), tietze_budget, protected=range(layout.l)).presentation
    md_certification = certify_isomorphic(md, kd.group, max(kd.d, 2), max_cosets, tietze_budget)

    m = quotient_by_normal_closure(md, [md.marks[Mark.GAMMA]])
    m_certification = certify_trivial(m, max_cosets, tietze_budget)
    _, relation_certification = reduced_commutator_relation(kd, max_cosets, tietze_budget)

    if not md_certification.passed:
        logger.warning(f"Complement after the fiber sum is not certified: {md_certification.reason}")
    if not m_certification.passed:
        logger.warning(f"Ambient manifold group is not certified trivial: {m_certification.reason}")
    return SympPipelineResult(
        xd, md, m, md_certification, m_certification, relation_certification, [STABILIZATION_NOTE, SW_PAIR_NOTE]
    )
