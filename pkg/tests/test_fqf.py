import cmath
from fractions import Fraction

import pytest

from sextics.fqf import FiniteQuadraticForm as F
from sextics.fqf import chi, legendre, orthogonal_sum
from sextics.lattices import discriminant_form, gram_of, parse_set


def test_orthogonal_sum_blocks():
    G = orthogonal_sum(F.parse("<1/2>"), F.parse("<3/2>"))
    assert G.orders == (2, 2)
    assert G.q((1, 0)) == Fraction(1, 2) and G.q((0, 1)) == Fraction(3, 2)
    assert G.b((1, 0), (0, 1)) == 0


def test_sum_with_trivial_form():
    A = F.parse("<2/5>+<3/4>")
    assert orthogonal_sum(A, F.trivial()).is_isomorphic(A)


def test_a9_plus_h():
    G = orthogonal_sum(discriminant_form(gram_of(parse_set("A9"))), F.parse("<1/2>"))
    assert G.order == 20
    assert G.primary_part(5)[0].is_isomorphic(F.parse("<2/5>"))
    assert G.primary_part(2)[0].is_isomorphic(F.parse("<3/2>+<1/2>"))


def test_primary_part():
    assert F.parse("<2/5>+<3/2>").primary_part(5)[0].is_isomorphic(F.parse("<2/5>"))
    assert F((10,), [["11/10"]]).primary_part(5)[0].is_isomorphic(F.parse("<2/5>"))
    assert F.parse("<1/2>").primary_part(3)[0].order == 1


def test_primary_part_brute_force():
    # q(2g) = 4 * 11/10 = 22/5 = 2/5 mod 2
    G = F((10,), [["11/10"]])
    assert G.q((2,)) == Fraction(2, 5)


def test_length_and_det():
    # <2/5> is the discriminant of <15>; the unit 3 and the stored 2 are both non-squares mod 5
    assert F.parse("<2/5>").length_and_det(5) == (1, legendre(3, 5))
    assert F.parse("<1/2>").length_and_det(2) == (1, None)
    assert F.trivial().length_and_det(7) == (0, 1)


def test_is_even():
    assert not F.parse("<1/2>").is_even()
    assert F.parse("<2/5>").is_even()
    assert not F.parse("<3/2>+<3/2>").is_even()
    assert F.parse("u_1+v_2").is_even()


def test_brown_values():
    assert F.parse("<1/2>").brown() == 1
    assert F.trivial().brown() == 0
    E6 = discriminant_form(gram_of(parse_set("E6")))
    assert E6.brown() == (-6) % 8


@pytest.mark.parametrize("text", ["<1/2>", "<3/2>", "<2/5>", "<4/5>", "<2/3>", "<7/8>", "<5/4>",
                                  "u_1", "v_1", "v_2", "<6/7>+<3/4>", "<2/9>", "<4/3>+<4/3>"])
def test_brown_matches_gauss_sum(text):
    G = F.parse(text)
    expected = cmath.sqrt(G.order) * cmath.exp(1j * cmath.pi * G.brown() / 4)
    assert abs(G.gauss_sum() - expected) < 1e-9


def test_is_mirror():
    assert F.parse("<7/8>").is_mirror((1,)) == (2, 4, 7)
    assert F.parse("<4/5>").is_mirror((1,)) == (5, 1, 2)
    assert F.parse("<4/5>").is_mirror((0,)) is None


def test_is_mirror_mixed_primes():
    G = F.parse("<2/5>+<3/2>")
    assert G.is_mirror((1, 1)) is None


def test_reflection_examples():
    G = F.parse("<2/5>")
    assert G.reflection((1,))((1,)) == (4,)
    H = F.parse("<2/5>+<2/5>")
    r = H.reflection((1, 4))
    assert r((1, 0)) == (0, 1) and r((0, 1)) == (1, 0)
    K = F.parse("<1/2>+<3/2>")
    assert K.reflection((1, 0)).is_identity()


def test_norms_of_mirror():
    assert F.parse("<6/7>").norms_of_mirror((1,), 2) == (chi(2, 7), 1)
    assert F.parse("<7/8>").norms_of_mirror((1,), 2) == (-1, -1)
    assert F.parse("<4/5>").norms_of_mirror((1,), 5) == (-1, -1)


def test_isotropic_elements():
    from sextics.nikulin import sh_form
    S = sh_form(parse_set("6A2"))
    iso = S.isotropic_elements(3)
    assert (1, 1, 1, 1, 1, 1, 0) in iso
    # three points are isotropic too; they are excluded later because they create a root
    assert (1, 1, 1, 0, 0, 0, 0) in iso
    assert not F.parse("<1/2>").isotropic_elements(3)
    assert sh_form(parse_set("4A4")).isotropic_elements(5)


def test_negation():
    assert F.parse("<2/5>").negate().is_isomorphic(F.parse("<8/5>"))
    assert F.parse("<8/5>").is_isomorphic(F.parse("<2/5>"))
    assert F.parse("<1/2>").negate().is_isomorphic(F.parse("<3/2>"))
    G = F.parse("<7/8>+<2/3>+u_1")
    assert G.negate().negate().is_isomorphic(G)


def test_isomorphism_distinguishes():
    assert not F.parse("<2/3>").is_isomorphic(F.parse("<4/3>"))
    assert F.parse("<2/3>+<2/3>").is_isomorphic(F.parse("<4/3>+<4/3>"))
    assert not F.parse("u_1").is_isomorphic(F.parse("v_1"))
    assert F.parse("<1/2>+<1/2>+<1/2>").is_isomorphic(F.parse("<3/2>+v_1"))
    assert not F.parse("<1/2>+<1/2>+<1/2>").is_isomorphic(F.parse("<1/2>+v_1"))


def test_parse_render_roundtrip():
    for text in ["<2/5>", "<3/2>+<1/2>+<2/5>", "u_1+<4/3>", "v_2+<7/8>"]:
        G = F.parse(text)
        assert F.parse(G.render()).is_isomorphic(G)


def test_inconsistent_values_rejected():
    with pytest.raises(ValueError):
        F((2,), [["1/3"]])
