from rimforge.components import Mark, Word
from rimforge.components.surgery import SurfaceKnotGroup
from rimforge.utils import parse_presentation

test_cyclic_2 = parse_presentation('<x | x^2>')
test_cyclic_6 = parse_presentation('<x | x^6>')
test_klein_four = parse_presentation('<a,b | a^2, b^2, [a,b]>')
test_symmetric_3 = parse_presentation('<a,b | a^2, b^3, (a*b)^2>')
test_dihedral_10 = parse_presentation('<r,s | r^5, s^2, s*r*s^-1*r>')
test_quaternion = parse_presentation('<i,j | i^4, i^2*j^-2, j^-1*i*j*i>')
test_free_abelian_2 = parse_presentation('<a,b | [a,b]>')
test_trefoil_group = parse_presentation('<a,b | a*b*a*b^-1*a^-1*b^-1>')


def dihedral_10_base() -> SurfaceKnotGroup:
    """
    D10 as a surface knot group: meridian the reflection s, trivial pushoff, H1 = Z/2
    """
    return SurfaceKnotGroup(test_dihedral_10.with_marks({Mark.MERIDIAN: Word.generator(1), Mark.PUSHOFF: Word()}), 2)
