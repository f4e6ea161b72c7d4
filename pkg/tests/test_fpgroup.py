from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from jumploci.corpus import corpus
from jumploci.fpgroup import (
    CupStructure,
    FreeDerivative,
    NonCommutatorRelator,
    PresentationError,
    TrivialTorus,
    UnsupportedPresentation,
    Word,
    abelianize_presentation,
    abelianized_alexander_matrix,
    commutator,
    cup_structure,
    direct_product,
    fox_derivative,
    free_abelian,
    free_group,
    free_product,
    generator_images,
    magnus_quadratic,
    magnus_truncated,
    parse_cup_structure,
    parse_presentation,
    parse_word,
    surface_group,
)
from jumploci.polyalg.laurent import minors_ideal
from jumploci.polyalg.poly import parse_polynomial

from oracles import evaluate_ring_element, fox_oracle, magnus_oracle, reduce_units, unit_letters
from strategies import words

X, Y = Word.gen(0), Word.gen(1)


def to_units(fd: FreeDerivative):
    return {reduce_units(unit_letters(w.letters)): c for w, c in fd.items()}


# ---------------------------------------------------------------- words and parsing


@given(words(), words())
def test_free_reduction(u, v):
    assert Word(u.letters) == u
    assert (u * u.inverse()).is_empty()
    assert (u * v).inverse() == v.inverse() * u.inverse()


def test_parse_commutator_shorthand():
    p = parse_presentation("gens x y\nrel (x,y)")
    assert p.relators == (X * Y * X.inverse() * Y.inverse(),)


def test_parse_free_reduction():
    p = parse_presentation("gens x\nrel x x^-1")
    assert p.relators[0].is_empty()


def test_parse_ziegler_relator():
    p = corpus("ziegler-2134")
    x1, x3, x4 = Word.gen(0), Word.gen(2), Word.gen(3)
    assert p.relators[0] == x1 * x3**2 * x4 * x1.inverse() * x4.inverse() * x3 ** -2
    assert p.num_generators == 4 and len(p.relators) == 3


def test_parse_comments_and_name():
    p = parse_presentation("# a comment\ngroup demo\ngens a b  # two\nrel a b a^-1 b^-1\n")
    assert p.name == "demo" and p.generator_names == ("a", "b")


@pytest.mark.parametrize(
    "text, line",
    [
        ("gens x\nrel x $", 2),
        ("gens x\nrel y", 2),
        ("rel x", 1),
        ("gens x\nrel (x, x", 2),
        ("gens x x", 1),
        ("gens x\nfoo x", 2),
    ],
)
def test_parse_errors_have_locations(text, line):
    with pytest.raises(PresentationError) as info:
        parse_presentation(text)
    assert info.value.line == line


def test_parse_error_column():
    with pytest.raises(PresentationError) as info:
        parse_presentation("gens x y\nrel x z")
    assert (info.value.line, info.value.column) == (2, 7)


def test_missing_gens():
    with pytest.raises(PresentationError):
        parse_presentation("group G\n")


def test_presentation_text_roundtrip():
    p = corpus("ziegler-2134")
    assert parse_presentation(p.to_text()) == p


# ---------------------------------------------------------------- Fox calculus


def test_fox_axioms():
    assert fox_derivative(X, 0) == FreeDerivative.of(Word())
    assert fox_derivative(X.inverse(), 0) == FreeDerivative.of(X.inverse(), -1)
    assert fox_derivative(Y, 0) == FreeDerivative()


def test_fox_trefoil_by_hand():
    w = parse_word("x y x y^-1 x^-1 y^-1", ["x", "y"])
    expected = FreeDerivative()
    expected.add(Word(), 1)
    expected.add(X * Y, 1)
    expected.add(X * Y * X * Y.inverse() * X.inverse(), -1)
    assert fox_derivative(w, 0) == expected
    assert to_units(expected) == dict(fox_oracle(unit_letters(w.letters), 0))
    # abelianized: 1 + t^2 - t
    images = generator_images(corpus("trefoil"))
    assert images == [(1,), (1,)] or images == [(-1,), (-1,)]


@settings(max_examples=200)
@given(words(), st.integers(0, 2))
def test_fox_matches_recursive_oracle(w, i):
    assert to_units(fox_derivative(w, i)) == dict(fox_oracle(unit_letters(w.letters), i))


@settings(max_examples=200)
@given(words(), words(), st.integers(0, 2))
def test_fox_product_rule(u, v, i):
    lhs = fox_derivative(u * v, i)
    rhs = fox_derivative(u, i) + fox_derivative(v, i).left_mul(u)
    assert lhs == rhs


@settings(max_examples=200)
@given(words())
def test_fundamental_identity(w):
    # w - 1 = sum_i (dw/dx_i)(x_i - 1)
    total = FreeDerivative()
    for i in range(3):
        xi = FreeDerivative.of(Word.gen(i)) - FreeDerivative.of(Word())
        total = total + fox_derivative(w, i).right_mul(xi)
    assert total == FreeDerivative.of(w) - FreeDerivative.of(Word())


# ---------------------------------------------------------------- abelianization


def test_abelianization_examples():
    assert abelianize_presentation(corpus("trefoil")).rank_b1 == 1
    assert abelianize_presentation(corpus("trefoil")).torsion_orders == ()
    assert abelianize_presentation(free_group(3)).rank_b1 == 3
    ab = abelianize_presentation(parse_presentation("gens x\nrel x^2"))
    assert ab.rank_b1 == 0 and ab.torsion_orders == (2,)


def test_torsion_generator_maps_to_free_part():
    p = parse_presentation("gens x y\nrel y^3\nrel (x, y)")
    ab = abelianize_presentation(p)
    assert ab.rank_b1 == 1 and ab.torsion_orders == (3,)
    imgs = generator_images(p, ab)
    assert imgs[1] == (0,) and abs(imgs[0][0]) == 1


def test_trivial_torus():
    with pytest.raises(TrivialTorus):
        abelianized_alexander_matrix(parse_presentation("gens x\nrel x^2"))


def test_alexander_trefoil():
    M = abelianized_alexander_matrix(corpus("trefoil"))
    assert (M.rows, M.cols) == (1, 2)
    t = ["t1"]
    delta = parse_polynomial("t1^2 - t1 + 1", t)
    assert M[0, 0].poly == delta and M[0, 1].poly == -delta
    assert minors_ideal(M, 1).gens == (delta,)


def test_alexander_free_and_z2():
    M = abelianized_alexander_matrix(free_group(2))
    assert (M.rows, M.cols) == (0, 2)
    M = abelianized_alexander_matrix(parse_presentation("gens x y\nrel (x,y)"))
    names = ["t1", "t2"]
    one_minus_t2 = parse_polynomial("1 - t2", names)
    t1_minus_1 = parse_polynomial("t1 - 1", names)
    assert M[0, 0].poly == one_minus_t2 and M[0, 1].poly == t1_minus_1


@settings(max_examples=100)
@given(words(n_gens=2, max_len=6), st.tuples(st.integers(1, 5), st.integers(1, 5)))
def test_alexander_evaluation_matches_fox_oracle(w, point):
    p = parse_presentation("gens x y\n")
    p = type(p)("G", ("x", "y"), (w,))
    if abelianize_presentation(p).rank_b1 != 2:
        return
    M = abelianized_alexander_matrix(p)
    rho = [mpq(point[0]), mpq(point[1])]
    for i in range(2):
        want = evaluate_ring_element(fox_oracle(unit_letters(w.letters), i), [Fraction(point[0]), Fraction(point[1])])
        assert M[0, i].evaluate(rho) == want


# ---------------------------------------------------------------- Magnus and cup structure


def test_magnus_examples():
    assert magnus_quadratic(commutator(X, Y), 2) == [1]
    assert magnus_quadratic(commutator(commutator(X, Y), X), 2) == [0]
    x1, x3, x4 = Word.gen(0), Word.gen(2), Word.gen(3)
    v = magnus_quadratic(commutator(x1, x3**2 * x4), 4)
    # basis order e12 e13 e14 e23 e24 e34
    assert v == [0, 2, 1, 0, 0, 0]


def test_magnus_rejects_non_commutator():
    with pytest.raises(NonCommutatorRelator):
        magnus_quadratic(X * Y, 2)


@settings(max_examples=200)
@given(words(max_len=6))
def test_magnus_matches_series_oracle(w):
    lin, quad = magnus_truncated(w)
    ref = magnus_oracle(w.letters)
    assert lin == {k[0]: v for k, v in ref.items() if len(k) == 1}
    assert quad == {k: v for k, v in ref.items() if len(k) == 2}


@settings(max_examples=200)
@given(words(max_len=5), words(max_len=5))
def test_magnus_commutator_is_wedge(u, v):
    a, b = u.exponent_sums(3), v.exponent_sums(3)
    want = [a[p] * b[q] - a[q] * b[p] for p, q in [(0, 1), (0, 2), (1, 2)]]
    assert magnus_quadratic(commutator(u, v), 3) == want


def test_cup_structure_examples():
    p3 = parse_presentation("gens v1 v2 v3\nrel (v1,v2)\nrel (v2,v3)")
    c = cup_structure(p3)
    assert c.n == 3 and c.relation_classes == ((1, 0, 0), (0, 0, 1))
    assert cup_structure(corpus("heisenberg")).is_zero()
    with pytest.raises(UnsupportedPresentation):
        cup_structure(corpus("trefoil"))


def test_cup_normalization_spans():
    c = CupStructure(3, ((2, 0, 0), (1, 0, 0), (0, 3, 3)))
    assert c.relation_classes == ((1, 0, 0), (0, 1, 1))


def test_cup_file_roundtrip():
    c = parse_cup_structure("h1 4\nclass 2 on 1 3, 1 on 1 4\nclass 1 on 2 4\nclass -1 on 4 3\n")
    assert c == cup_structure(corpus("ziegler-2134"))
    assert parse_cup_structure(c.to_text()) == c


def test_cup_file_errors():
    with pytest.raises(PresentationError):
        parse_cup_structure("class 1 on 1 2")
    with pytest.raises(PresentationError):
        parse_cup_structure("h1 2\nclass 1 on 1 1")


def test_direct_product_cup_has_mixed_wedges():
    c = cup_structure(direct_product(free_group(2), free_group(1)))
    # F_2 x Z: classes e13 and e23
    assert c.relation_classes == ((0, 1, 0), (0, 0, 1))


@settings(max_examples=50)
@given(st.integers(1, 3), st.integers(1, 3))
def test_direct_product_cup_block_sum(a, b):
    p = direct_product(free_abelian(a), surface_group(1) if b == 2 else free_group(b))
    c = cup_structure(p)
    n = c.n
    assert n == a + (2 if b == 2 else b)
    mixed = a * (n - a)
    assert c.r >= mixed


# ---------------------------------------------------------------- combinators


def test_free_product_examples():
    f2 = free_product(free_group(1), free_group(1))
    assert f2.num_generators == 2 and not f2.relators
    z2z2 = free_product(free_abelian(2), free_abelian(2))
    assert z2z2.num_generators == 4 and len(z2z2.relators) == 2
    assert z2z2.generator_names[0] == "a.x1"


def test_direct_product_examples():
    z2 = direct_product(free_group(1), free_group(1))
    assert z2.num_generators == 2 and len(z2.relators) == 1
    p = direct_product(free_group(2), free_group(1))
    assert p.num_generators == 3 and len(p.relators) == 2


@settings(max_examples=30)
@given(st.integers(0, 3), st.integers(0, 3))
def test_combinator_counts(a, b):
    p1, p2 = free_abelian(a), free_group(b)
    fp, dp = free_product(p1, p2), direct_product(p1, p2)
    assert len(fp.relators) == len(p1.relators) + len(p2.relators)
    assert dp.num_generators == a + b
    assert len(dp.relators) == len(p1.relators) + len(p2.relators) + a * b
