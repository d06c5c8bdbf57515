import logging

from enum import Enum
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from rimforge.components import (
    DEFAULT_TIETZE_BUDGET,
    AbelianInvariants,
    Mark,
    Presentation,
    Word,
    abelianization,
    free_product,
    fresh_name,
    quotient_by_normal_closure,
    shift_word,
    tietze_reduce,
)
from rimforge.components.enumeration import (
    DEFAULT_MAX_COSETS,
    cyclic_quotient_invariants,
    deck_transformation_action,
    element_order,
    enumerate_cosets,
    group_order,
    reidemeister_schreier,
)
from rimforge.components.knots import KnotSpec, wirtinger

logger = logging.getLogger(__name__)


class SurgeryError(ValueError):
    """
    Raised when the preconditions of a surgery are not met.
    """

    pass


class CertificationTier(Enum):
    """
    Represents how strongly an isomorphism claim has been checked.

    T1: both presentations Tietze-reduce to the same presentation.
    T2: order, abelianization and cyclic quotient invariants agree.
    """

    T1 = "T1"
    T2 = "T2"
    ASSERTED = "ASSERTED"
    INDETERMINATE = "INDETERMINATE"
    FAILED = "FAILED"


class Certification:
    """
    Represents the outcome of comparing a constructed group with a reference group.
    """

    def __init__(
        self,
        tier: CertificationTier,
        reason: str,
        order: Optional[int] = None,
        reference_order: Optional[int] = None,
        abelian_invariants: Optional[AbelianInvariants] = None,
    ):
        self.tier = tier
        self.reason = reason
        self.order = order
        self.reference_order = reference_order
        self.abelian_invariants = abelian_invariants

    @property
    def passed(self) -> bool:
        return self.tier in (CertificationTier.T1, CertificationTier.T2)

    def to_dict(self) -> Dict:
        return {
            "tier": self.tier.value,
            "reason": self.reason,
            "order": self.order,
            "reference_order": self.reference_order,
            "abelianization": self.abelian_invariants.to_dict() if self.abelian_invariants is not None else None,
        }

    def __repr__(self) -> str:
        """
        :return: String representation of a Certification
        """
        return f"Certification <tier={self.tier.value}, reason={self.reason}>"


def _reduced_keys(presentation: Presentation, tietze_budget: int):
    reduced = tietze_reduce(presentation, tietze_budget, protected=range(presentation.generator_count))
    return reduced.presentation.generator_count, reduced.presentation.relator_keys()


def tietze_equivalent(
    presentation: Presentation, reference: Presentation, tietze_budget: int = DEFAULT_TIETZE_BUDGET
) -> bool:
    """
    :return: True when both presentations normalise to the same relators over the same generators
    """
    return presentation.generator_count == reference.generator_count and _reduced_keys(
        presentation, tietze_budget
    ) == _reduced_keys(reference, tietze_budget)


def certify_isomorphic(
    presentation: Presentation,
    reference: Presentation,
    max_k: int = 2,
    max_cosets: int = DEFAULT_MAX_COSETS,
    tietze_budget: int = DEFAULT_TIETZE_BUDGET,
) -> Certification:
    """
    Compares a constructed group with a reference group

    Tier T1 is reached when the presentations normalise to the same relators over the same generator count.
    Otherwise orders (by coset enumeration), abelianizations and the abelianizations of kernels onto Z/k, k <= max_k,
    are compared.

    :param presentation: constructed group
    :param reference: expected group
    :param max_k: largest cyclic quotient used for kernel invariants
    :param max_cosets: coset enumeration budget
    :param tietze_budget: Tietze move budget
    :return: certification
    """
    invariants = abelianization(presentation)
    if tietze_equivalent(presentation, reference, tietze_budget):
        certification = Certification(
            CertificationTier.T1, "presentations reduce to the same relators", abelian_invariants=invariants
        )
        logger.info(f"Certification: {certification!r}")
        return certification

    reference_invariants = abelianization(reference)
    order = group_order(presentation, max_cosets)
    reference_order = group_order(reference, max_cosets)
    if invariants != reference_invariants:
        certification = Certification(
            CertificationTier.FAILED,
            f"abelianizations differ ({invariants.to_text()} against {reference_invariants.to_text()})",
            order,
            reference_order,
            invariants,
        )
    elif order is None or reference_order is None:
        certification = Certification(
            CertificationTier.INDETERMINATE,
            "abelianizations agree, coset enumeration budget exhausted before orders were known",
            order,
            reference_order,
            invariants,
        )
    elif order != reference_order:
        certification = Certification(
            CertificationTier.FAILED, f"orders differ ({order} against {reference_order})", order, reference_order
        )
    else:
        quotients = cyclic_quotient_invariants(presentation, max_k)
        reference_quotients = cyclic_quotient_invariants(reference, max_k)
        if quotients is not None and reference_quotients is not None and quotients != reference_quotients:
            certification = Certification(
                CertificationTier.FAILED,
                f"abelianizations of kernels onto Z/k (k <= {max_k}) differ",
                order,
                reference_order,
                invariants,
            )
        elif quotients is None or reference_quotients is None:
            certification = Certification(
                CertificationTier.T2,
                "orders and abelianizations agree, cyclic quotient invariants skipped (too many maps)",
                order,
                reference_order,
                invariants,
            )
        else:
            certification = Certification(
                CertificationTier.T2,
                f"orders, abelianizations and kernels onto Z/k (k <= {max_k}) agree",
                order,
                reference_order,
                invariants,
            )
    logger.info(f"Certification: {certification!r}")
    return certification


def certify_trivial(
    presentation: Presentation, max_cosets: int = DEFAULT_MAX_COSETS, tietze_budget: int = DEFAULT_TIETZE_BUDGET
) -> Certification:
    """
    :return: T1 when Tietze reduction removes every generator, T2 when enumeration finds one coset
    """
    if tietze_reduce(presentation, tietze_budget).presentation.generator_count == 0:
        return Certification(CertificationTier.T1, "presentation reduces to no generators", 1, 1, AbelianInvariants(0))
    order = group_order(presentation, max_cosets)
    if order is None:
        return Certification(CertificationTier.INDETERMINATE, "coset enumeration budget exhausted", None, 1)
    if order != 1:
        return Certification(CertificationTier.FAILED, f"group has order {order}", order, 1)
    return Certification(CertificationTier.T2, "coset enumeration gives the trivial group", 1, 1, AbelianInvariants(0))


class SurfaceKnotGroup:
    """
    Represents the fundamental group of a surface complement.

    The presentation is marked with the surface meridian and, when the nullhomotopic pushoff hypothesis holds, the
    trivial pushoff. H1 is Z/d, generated by the meridian.
    """

    def __init__(
        self,
        presentation: Presentation,
        d: int,
        provenance: Sequence[Dict] = (),
        certification: Optional[Certification] = None,
        validate: bool = True,
    ):
        """
        :param presentation: presentation marked with meridian and, optionally, pushoff
        :param d: divisibility of the surface class, the order of H1
        :param provenance: surgeries that built the group, as dictionaries
        :param certification: how the group was checked against its expected isomorphism type
        :param validate: check the homology of the presentation
        """
        meridian = presentation.mark(Mark.MERIDIAN)
        if meridian is None:
            raise SurgeryError("Surface knot group has no meridian mark")
        if d < 1:
            raise SurgeryError(f"Divisibility [{d}] must be positive")
        if validate:
            invariants = abelianization(presentation)
            if invariants.cyclic_order != d:
                raise SurgeryError(f"H1 of the complement is {invariants.to_text()}, expected Z/{d}")
            if abelianization(quotient_by_normal_closure(presentation, [meridian])).order != 1:
                raise SurgeryError("Meridian does not generate H1 of the complement")

        self.presentation = presentation
        self.d = d
        self.provenance: List[Dict] = list(provenance)
        self.certification = certification

    @property
    def meridian(self) -> Word:
        return self.presentation.marks[Mark.MERIDIAN]

    @property
    def pushoff(self) -> Optional[Word]:
        return self.presentation.mark(Mark.PUSHOFF)

    @property
    def has_trivial_pushoff(self) -> bool:
        return self.pushoff is not None and self.pushoff.is_identity

    def to_dict(self) -> Dict:
        return {
            "presentation": self.presentation.to_dict(),
            "d": self.d,
            "provenance": self.provenance,
            "certification": self.certification.to_dict() if self.certification is not None else None,
        }

    def __repr__(self) -> str:
        """
        :return: String representation of a SurfaceKnotGroup
        """
        return f"SurfaceKnotGroup <d={self.d}, presentation={self.presentation.to_text()}>"


def cyclic_base(d: int, name: str = "u") -> SurfaceKnotGroup:
    """
    Surface knot group <u | u^d> with trivial pushoff

    :param d: order of the meridian
    :param name: generator name
    """
    meridian = Word.generator(0)
    presentation = Presentation([name], [meridian**d], {Mark.MERIDIAN: meridian, Mark.PUSHOFF: Word()})
    return SurfaceKnotGroup(presentation, d)


class BranchedCoverGroup:
    """
    Represents the fundamental group of a cyclic branched cover of a knot, with its deck transformation.

    deck_action maps each generator h to the word for t^-1 h t, t the knot meridian.
    """

    def __init__(self, presentation: Presentation, deck_action: Dict[int, Word], degree: int):
        self.presentation = presentation
        self.deck_action = deck_action
        self.degree = degree

    def to_dict(self) -> Dict:
        return {
            "presentation": self.presentation.to_dict(),
            "degree": self.degree,
            "deck_action": {
                self.presentation.generators[generator]: self.presentation.word_to_text(image)
                for generator, image in sorted(self.deck_action.items())
            },
        }

    def __repr__(self) -> str:
        """
        :return: String representation of a BranchedCoverGroup
        """
        return f"BranchedCoverGroup <degree={self.degree}, presentation={self.presentation.to_text()}>"


def branched_cover_group(
    knot: KnotSpec, d: int, tietze_budget: int = DEFAULT_TIETZE_BUDGET, inverse_deck: bool = False
) -> BranchedCoverGroup:
    """
    Fundamental group of the d-fold cyclic branched cover of a knot

    The kernel of meridian -> 1 in Z/d is presented by Reidemeister-Schreier, then the lifted meridian (the rewriting
    of meridian^d) is killed. The deck transformation descends to the quotient and is rewritten through the Tietze
    simplification.

    :param knot: knot description
    :param d: cover degree, at least 2
    :param tietze_budget: Tietze move budget
    :param inverse_deck: give h -> t h t^-1 instead of h -> t^-1 h t
    :return: cover group with deck action
    """
    if d < 2:
        raise SurgeryError(f"Branched cover degree [{d}] must be at least 2")
    group = wirtinger(knot)
    epimorphism = {generator: degree for generator, degree in enumerate(group.degrees)}
    subgroup = reidemeister_schreier(group.presentation, d, epimorphism)
    lifted_meridian = subgroup.rewrite_element(group.meridian**d)
    cover = quotient_by_normal_closure(subgroup.presentation, [lifted_meridian])
    deck = deck_transformation_action(subgroup, inverse=inverse_deck)

    reduced = tietze_reduce(cover, tietze_budget)
    deck_action = {index: reduced.rewrite(deck[original]) for index, original in enumerate(reduced.kept)}
    logger.debug(f"Branched cover of {knot.to_text()} of degree {d}: {reduced.presentation.to_text()}")
    return BranchedCoverGroup(reduced.presentation, deck_action, d)


def _check_cyclic_base(base: SurfaceKnotGroup, max_cosets: int) -> None:
    table = enumerate_cosets(base.presentation, (), max_cosets)
    if not table.complete:
        raise SurgeryError("Could not enumerate the base group to check that it is cyclic")
    if table.coset_count != base.d or element_order(table, base.meridian) != base.d:
        raise SurgeryError(f"Base group is not cyclic of order {base.d} generated by its meridian")


def d_twist_group(
    base: SurfaceKnotGroup,
    knot: KnotSpec,
    max_cosets: int = DEFAULT_MAX_COSETS,
    tietze_budget: int = DEFAULT_TIETZE_BUDGET,
) -> SurfaceKnotGroup:
    """
    Surface knot group after d-twist rim surgery on a surface with cyclic complement group

    The result is the split extension of the branched cover group H by Z/d acting through deck transformations:
    <H generators, u | H relators, u^d, u^-1 h u = deck(h)>.

    :param base: group isomorphic to Z/d generated by its meridian
    :param knot: knot to rim surger along
    :param max_cosets: coset enumeration budget for the base check
    :param tietze_budget: Tietze move budget
    :return: semidirect product, meridian u, trivial pushoff
    """
    _check_cyclic_base(base, max_cosets)
    cover = branched_cover_group(knot, base.d, tietze_budget)

    names = list(cover.presentation.generators)
    u_index = len(names)
    names.append(fresh_name("u", names))
    u = Word.generator(u_index)
    relators = list(cover.presentation.relators) + [u**base.d]
    for generator, image in sorted(cover.deck_action.items()):
        relators.append(u.inverse() * Word.generator(generator) * u * image.inverse())
    presentation = Presentation(names, relators, {Mark.MERIDIAN: u, Mark.PUSHOFF: Word()})

    reduced = tietze_reduce(presentation, tietze_budget, protected=[u_index]).presentation
    provenance = list(base.provenance) + [{"knot": knot.to_text(), "m": base.d, "path": "d-twist"}]
    return SurfaceKnotGroup(reduced, base.d, provenance)


def _meridian_order(base: SurfaceKnotGroup, max_cosets: int) -> Optional[int]:
    table = enumerate_cosets(base.presentation, (), max_cosets)
    if not table.complete:
        return None
    return element_order(table, base.meridian)


def m_twist_relators(knot_generators: Sequence[int], meridian: Word, exponent: int) -> List[Word]:
    """
    Relators identifying the twisted knot exterior with the surface complement

    meridian^e commutes with every knot exterior generator. For e = +/-1 this is equivalent to every generator equalling
    the meridian, each generator being a conjugate of the meridian.
    """
    if abs(exponent) == 1:
        return [Word.generator(generator) * meridian.inverse() for generator in knot_generators]
    return [Word.commutator(meridian**exponent, Word.generator(generator)) for generator in knot_generators]


def m_twist_group(
    base: SurfaceKnotGroup,
    knot: KnotSpec,
    m: int,
    max_cosets: int = DEFAULT_MAX_COSETS,
    tietze_budget: int = DEFAULT_TIETZE_BUDGET,
) -> SurfaceKnotGroup:
    """
    Surface knot group after m-twist rim surgery, by van Kampen gluing along a trivial pushoff

    Relators are the base relators, the knot group relators, meridian_K = meridian_S, and [meridian_K^m, b] for every
    knot group generator b. When the base meridian has finite order o, m is replaced by e = gcd(m, o): the
    commutators vanish for e = o, and for e = 1 they reduce to b = meridian_K.

    :param base: surface knot group with trivial pushoff
    :param knot: knot to rim surger along
    :param m: number of twists
    :param max_cosets: coset enumeration budget
    :param tietze_budget: Tietze move budget
    :return: surgered group, certified against the base when e = 1
    """
    if not base.has_trivial_pushoff:
        raise SurgeryError("m-twist rim surgery needs the nullhomotopic pushoff hypothesis (trivial pushoff mark)")
    group = wirtinger(knot)
    product, offset = free_product(base.presentation, group.presentation)
    knot_meridian = shift_word(group.meridian, offset)
    knot_generators = list(range(offset, product.generator_count))

    order = _meridian_order(base, max_cosets)
    exponent = gcd(m, order) if order is not None else m
    relators = list(product.relators) + [knot_meridian * base.meridian.inverse()]
    if exponent == 0 or (order is not None and exponent % order == 0):
        logger.debug(f"Twist exponent {m} is a multiple of the meridian order, no commutator relators")
    else:
        relators.extend(
            m_twist_relators(
                [generator for generator in knot_generators if Word.generator(generator) != knot_meridian],
                knot_meridian,
                exponent,
            )
        )
    presentation = Presentation(product.generators, relators, {Mark.MERIDIAN: knot_meridian, Mark.PUSHOFF: Word()})
    reduced = tietze_reduce(presentation, tietze_budget, protected=range(offset)).presentation

    if abs(exponent) == 1:
        certification = certify_isomorphic(reduced, base.presentation, base.d, max_cosets, tietze_budget)
    else:
        certification = Certification(
            CertificationTier.ASSERTED,
            f"general twist assembly with exponent {exponent}, no reference group to compare with",
        )
    provenance = list(base.provenance) + [{"knot": knot.to_text(), "m": m, "path": "general"}]
    return SurfaceKnotGroup(reduced, base.d, provenance, certification)


def _is_cyclic(base: SurfaceKnotGroup, max_cosets: int) -> bool:
    table = enumerate_cosets(base.presentation, (), max_cosets)
    return table.complete and table.coset_count == base.d


def iterated_surgery(
    base: SurfaceKnotGroup,
    steps: Sequence[Tuple[KnotSpec, int]],
    max_cosets: int = DEFAULT_MAX_COSETS,
    tietze_budget: int = DEFAULT_TIETZE_BUDGET,
) -> SurfaceKnotGroup:
    """
    Performs rim surgeries in order

    Steps with m = 0 mod d on a cyclic base use the semidirect product construction, cross-certified against the
    general assembly; every other step uses the general assembly.

    :param base: starting surface knot group
    :param steps: (knot, twist) pairs
    :param max_cosets: coset enumeration budget
    :param tietze_budget: Tietze move budget
    :return: final group, with all steps in its provenance
    """
    current = base
    for knot, m in steps:
        if m % current.d == 0 and _is_cyclic(current, max_cosets):
            twisted = d_twist_group(current, knot, max_cosets, tietze_budget)
            general = m_twist_group(current, knot, m, max_cosets, tietze_budget)
            twisted.certification = certify_isomorphic(
                twisted.presentation, general.presentation, current.d, max_cosets, tietze_budget
            )
            current = twisted
        else:
            current = m_twist_group(current, knot, m, max_cosets, tietze_budget)
        logger.info(
            f"Surgery along {knot.to_text()} with {m} twist(s): {current.presentation.to_text()} "
            f"[{current.certification.tier.value if current.certification is not None else 'n/a'}]"
        )
    return current
