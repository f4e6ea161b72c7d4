import random
from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from jumploci.corpus import corpus, corpus_cup_or_computed, corpus_presentations
from jumploci.fpgroup import CupStructure, cup_structure, free_group, parse_presentation
from jumploci.loci import (
    JumpingLocus,
    charvar_ideal,
    charvar_point_test,
    delta2_matrix,
    delta3_matrix,
    infinitesimal_alexander,
    infinitesimal_fitting_locus,
    resonance_ideal,
    resonance_matrix,
    tangent_cone_at_identity,
    translate_to_identity,
)
from jumploci.polyalg.groebner import Ideal, radical_member, variety_equal
from jumploci.polyalg.poly import Polynomial, parse_polynomial

from oracles import to_sympy

Z4 = ["z1", "z2", "z3", "z4"]


def ideal_of(texts, names):
    return Ideal(names, [parse_polynomial(t, names) for t in texts])


def ziegler():
    return corpus_cup_or_computed("ziegler-2134")


# ---------------------------------------------------------------- resonance matrix


def test_resonance_matrix_ziegler_column():
    # the raw class 2 e13 + e14 is stored as e13 + 1/2 e14; the column scales with it
    R = resonance_matrix(ziegler())
    assert (R.n, R.r) == (4, 3)
    col = [row[0] for row in R.entries]
    want = ["-2*z3 - z4", "0", "2*z1", "z1"]
    for got, text in zip(col, want):
        assert got * 2 == parse_polynomial(text, Z4)


def test_resonance_matrix_trivial_cases():
    R = resonance_matrix(CupStructure(2, ((1,),)))
    names = ["z1", "z2"]
    assert [row[0] for row in R.entries] == [parse_polynomial("-z2", names), parse_polynomial("z1", names)]
    R0 = resonance_matrix(CupStructure(3, ()))
    assert R0.r == 0 and all(len(row) == 0 for row in R0.entries)


@settings(max_examples=50)
@given(st.integers(2, 5), st.data())
def test_resonance_matrix_linear_and_vanishes_at_zero(n, data):
    m = n * (n - 1) // 2
    classes = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=m, max_size=m), max_size=3))
    R = resonance_matrix(CupStructure(n, tuple(tuple(c) for c in classes)))
    for row in R.entries:
        for e in row:
            assert e.is_zero() or (e.is_homogeneous() and e.degree() == 1)
    assert all(v == 0 for row in R.evaluate([0] * n) for v in row)


# ---------------------------------------------------------------- resonance varieties


def test_ziegler_r1():
    L = resonance_ideal(ziegler(), 1)
    assert L.origin_included
    assert variety_equal(L.variety_ideal(Z4), ideal_of(["2*z3*z4 + z4^2"], Z4))


def test_ziegler_r2():
    L = resonance_ideal(ziegler(), 2)
    want = ideal_of(["z1", "z3", "z4"], Z4) * ideal_of(["z2", "z3", "z4"], Z4)
    assert variety_equal(L.variety_ideal(Z4), want)


def test_heisenberg_resonance():
    c = cup_structure(corpus("heisenberg"))
    assert resonance_ideal(c, 1).ideal.is_zero()
    L2 = resonance_ideal(c, 2)
    assert L2.ideal.is_unit() and L2.origin_included


def test_resonance_k_above_n_is_empty():
    L = resonance_ideal(corpus_cup_or_computed("heisenberg"), 3)
    assert L.ideal.is_unit() and not L.origin_included


@pytest.mark.parametrize("name", corpus_presentations())
def test_resonance_degree_zero_is_everything(name):
    assert resonance_ideal(corpus_cup_or_computed(name), 0).ideal.is_zero()


def test_resonance_negative_k():
    with pytest.raises(ValueError):
        resonance_ideal(ziegler(), -1)


@pytest.mark.parametrize("name", corpus_presentations())
def test_resonance_filtration_descends(name):
    c = corpus_cup_or_computed(name)
    for k in range(1, c.n):
        big, small = resonance_ideal(c, k), resonance_ideal(c, k + 1)
        # R_{k+1} is inside R_k: every generator of I(R_k) vanishes on R_{k+1}
        for g in big.ideal.gens:
            assert radical_member(g, small.variety_ideal())


def test_jumping_locus_json_keys():
    d = resonance_ideal(ziegler(), 1).to_json()
    assert set(d) == {"kind", "k", "vars", "generators", "origin_included"}
    d = charvar_ideal(corpus("trefoil"), 1).to_json()
    assert d["identity_member"] is True and d["kind"] == "characteristic"
    with pytest.raises(ValueError):
        JumpingLocus(Ideal.zero(["x"]), 1, "bogus", False)
    with pytest.raises(ValueError):
        charvar_ideal(corpus("trefoil"), 1).variety_ideal()


# ---------------------------------------------------------------- infinitesimal Alexander matrix


def test_nabla_small_cases():
    nab = infinitesimal_alexander(CupStructure(2, ((1,),)))
    assert (nab.matrix.rows, nab.matrix.cols) == (1, 1)
    nab = infinitesimal_alexander(CupStructure(3, ()))
    names = ["z1", "z2", "z3"]
    col = [nab.matrix[i, 0].poly.mul_term(nab.matrix[i, 0].shift, 1) for i in range(3)]
    assert col == [parse_polynomial(t, names) for t in ["z3", "-z2", "z1"]]


@pytest.mark.parametrize("n", range(1, 7))
def test_koszul_identity(n):
    d2, d3 = delta2_matrix(n), delta3_matrix(n)
    if not d3 or not d3[0]:
        return
    syms = sympy.symbols(f"z1:{n + 1}")
    A = sympy.Matrix([[to_sympy(e, syms) for e in row] for row in d2])
    B = sympy.Matrix([[to_sympy(e, syms) for e in row] for row in d3])
    assert (A * B).expand() == sympy.zeros(n, B.shape[1])


@pytest.mark.parametrize("name", corpus_presentations())
def test_nabla_fitting_matches_resonance_away_from_origin(name):
    c = corpus_cup_or_computed(name)
    for k in range(1, c.n + 1):
        R = resonance_ideal(c, k).ideal
        W = Ideal(R.vars, infinitesimal_fitting_locus(c, k).gens)
        m = Ideal.maximal_at_origin(R.vars)
        assert variety_equal(R * m, W * m), k


# ---------------------------------------------------------------- characteristic varieties


def test_trefoil_charvar():
    L = charvar_ideal(corpus("trefoil"), 1)
    assert L.identity_member
    assert L.ideal.gens == (parse_polynomial("t1^2 - t1 + 1", ["t1"]),)


def test_heisenberg_charvar_is_identity():
    L = charvar_ideal(corpus("heisenberg"), 1)
    names = list(L.vars)
    assert L.identity_member
    assert variety_equal(L.ideal, ideal_of(["t1 - 1", "t2 - 1"], names))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_free_group_charvar_is_whole_torus(n):
    for k in range(n):
        assert charvar_ideal(free_group(n), k).ideal.is_zero()


def test_charvar_flag_follows_b1():
    p = corpus("ziegler-2134")
    assert charvar_ideal(p, 4).identity_member
    assert not charvar_ideal(p, 5).identity_member


def test_point_test_examples():
    p = corpus("trefoil")
    assert charvar_point_test(p, [1]) == 1
    assert charvar_point_test(p, [2]) == 0
    assert charvar_point_test(free_group(3), [2, 3, 5]) == 2
    with pytest.raises(ValueError):
        charvar_point_test(p, [0])
    with pytest.raises(ValueError):
        charvar_point_test(p, [1, 2])


def _vanishes(ideal, point):
    return all(g.evaluate(point) == 0 for g in ideal.gens)


def test_point_test_on_ziegler_subtorus():
    p = corpus("ziegler-2134")
    L1 = charvar_ideal(p, 1)
    rnd = random.Random(3)
    for _ in range(5):
        a, b, c = (mpq(rnd.randint(2, 9), rnd.randint(1, 9)) for _ in range(3))
        for pt in ([a, b, c, mpq(1)], [a, b, c, 1 / (c * c)]):
            assert charvar_point_test(p, pt) >= 1
            assert _vanishes(L1.ideal, pt)


@pytest.mark.parametrize("name", corpus_presentations())
def test_point_test_agrees_with_ideal(name):
    p = corpus(name)
    rnd = random.Random(name)
    b = charvar_ideal(p, 0).ideal.nvars
    loci = {k: charvar_ideal(p, k) for k in range(1, p.num_generators + 1)}
    for _ in range(5):
        pt = [mpq(rnd.choice([-3, -2, 2, 3, 5]), rnd.choice([1, 4, 7])) for _ in range(b)]
        d = charvar_point_test(p, pt)
        for k, L in loci.items():
            assert (d >= k) == _vanishes(L.ideal, pt)


@pytest.mark.parametrize("name", corpus_presentations())
def test_semicontinuity_near_identity(name):
    p = corpus(name)
    b = charvar_ideal(p, 0).ideal.nvars
    at_one = charvar_point_test(p, [1] * b)
    rnd = random.Random(name + "line")
    for _ in range(4):
        direction = [rnd.randint(-3, 3) for _ in range(b)]
        for j in range(1, 6):
            eps = Fraction(1, 10 * j)
            pt = [mpq(1 + eps * d) for d in direction]
            assert charvar_point_test(p, pt) <= at_one


# ---------------------------------------------------------------- tangent cones


def test_translate_to_identity():
    names = ["t1", "t2"]
    f = parse_polynomial("t1*t2 - 1", names)
    assert translate_to_identity(f) == parse_polynomial("t1*t2 + t1 + t2", names)


def test_tangent_cone_trefoil():
    T = tangent_cone_at_identity(charvar_ideal(corpus("trefoil"), 1))
    assert T.ideal.is_unit() and T.origin_included
    assert T.variety_ideal().gens and variety_equal(T.variety_ideal(), Ideal.maximal_at_origin(T.vars))


def test_tangent_cone_heisenberg_is_origin():
    T = tangent_cone_at_identity(charvar_ideal(corpus("heisenberg"), 1))
    assert variety_equal(T.variety_ideal(), Ideal.maximal_at_origin(T.vars))
    R1 = resonance_ideal(cup_structure(corpus("heisenberg")), 1)
    assert R1.ideal.is_zero()


def test_tangent_cone_of_product_of_hyperplanes():
    names = ("t1", "t2")
    L = JumpingLocus(ideal_of(["t1*t2 - t1 - t2 + 1"], list(names)), 1, "characteristic", True)
    T = tangent_cone_at_identity(L)
    assert variety_equal(T.variety_ideal(), ideal_of(["u1*u2"], ["u1", "u2"]))


def test_tangent_cone_needs_characteristic():
    with pytest.raises(ValueError):
        tangent_cone_at_identity(resonance_ideal(ziegler(), 1))


def test_tangent_cone_ziegler_matches_resonance():
    T = tangent_cone_at_identity(charvar_ideal(corpus("ziegler-2134"), 1))
    R = resonance_ideal(ziegler(), 1)
    assert variety_equal(T.variety_ideal(Z4), R.variety_ideal(Z4))


@settings(max_examples=25)
@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=2))
def test_tangent_cone_is_homogeneous(exps):
    names = ["t1", "t2"]
    gens = []
    for a, b in exps:
        # t1^a t2^b - 1 with the monomial unit cleared
        shift = (max(0, -a), max(0, -b))
        up = Polynomial.monomial((a + shift[0], b + shift[1]))
        gens.append(up - Polynomial.monomial(shift))
    gens = [g for g in gens if not g.is_zero()]
    L = JumpingLocus(Ideal(names, gens), 1, "characteristic", True)
    T = tangent_cone_at_identity(L)
    assert all(g.is_homogeneous() for g in T.ideal.gens)
    for g in L.ideal.gens:
        init = translate_to_identity(g).initial_form()
        assert Ideal(T.vars, T.ideal.gens).contains(init)


def test_charvar_on_torsion_presentation():
    p = parse_presentation("gens x y\nrel y^2\nrel (x, y)")
    L = charvar_ideal(p, 1)
    assert L.ideal.nvars == 1
