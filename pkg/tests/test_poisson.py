from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from todatype.exactalg import PolyMap, parse_poly
from todatype.poisson import (PoissonStruct, VectorField, bareiss_rank, bracket, compatible,
                              generic_rank, ham_field, involution_table, is_casimir,
                              is_poisson, jacobi_residual, kernel_at, nullspace, rank_at,
                              verify_pushforward)
from conftest import SYMS, XYZ, polys, to_sympy


def so3():
    x, y, z = XYZ.gens()
    return PoissonStruct.from_relations(XYZ, {("x", "y"): z, ("y", "z"): x, ("z", "x"): y}, "so3")


def sympy_jacobi(rel):
    """Jacobi sum for three variables computed directly with sympy."""
    x, y, z = SYMS
    P = {("x", "y"): rel[0], ("y", "z"): rel[1], ("z", "x"): rel[2]}

    def br(f, g):
        names = ["x", "y", "z"]
        total = 0
        for i, a in enumerate(names):
            for j, b in enumerate(names):
                if a == b:
                    continue
                pij = P.get((a, b), None)
                pij = pij if pij is not None else -P[(b, a)]
                total += sympy.diff(f, SYMS[i]) * pij * sympy.diff(g, SYMS[j])
        return sympy.expand(total)

    return sympy.expand(br(x, br(y, z)) + br(y, br(z, x)) + br(z, br(x, y)))


def test_so3_is_poisson_with_casimir():
    pi = so3()
    assert is_poisson(pi).ok
    assert is_casimir(pi, parse_poly("x^2 + y^2 + z^2", XYZ))
    assert not is_casimir(pi, parse_poly("x", XYZ))


def test_non_poisson_bracket_detected_and_matches_sympy():
    x, y, z = XYZ.gens()
    # v = (y, z, x) has v . curl v = -(x + y + z), so Jacobi fails
    pi = PoissonStruct.from_relations(XYZ, {("x", "y"): x, ("y", "z"): y, ("z", "x"): z}, "bad")
    rep = is_poisson(pi, "bad", 3)
    assert not rep.ok
    want = sympy_jacobi([SYMS[0], SYMS[1], SYMS[2]])
    assert want != 0
    got = jacobi_residual(pi, 0, 1, 2)
    assert to_sympy(got) == want
    assert rep.failures[0]["indices"] == [1, 2, 3]


@given(polys(3), polys(3), polys(3))
def test_three_dim_jacobi_matches_sympy(p, q, r):
    pi = PoissonStruct.from_relations(XYZ, {("x", "y"): p, ("y", "z"): q, ("z", "x"): r})
    assert to_sympy(jacobi_residual(pi, 0, 1, 2)) == sympy_jacobi([to_sympy(p), to_sympy(q), to_sympy(r)])


@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_constant_brackets_are_poisson(cs):
    pi = PoissonStruct.from_relations(XYZ, {("x", "y"): XYZ.const(cs[0]), ("y", "z"): XYZ.const(cs[1]),
                                            ("x", "z"): XYZ.const(cs[2])})
    assert is_poisson(pi).ok


@given(polys(4), polys(4), polys(4))
def test_bracket_antisymmetric_and_leibniz(f, g, h):
    pi = so3()
    assert bracket(pi, f, g) == -bracket(pi, g, f)
    assert bracket(pi, f, g * h) == bracket(pi, f, g) * h + g * bracket(pi, f, h)


def test_ham_field_and_involution():
    pi = so3()
    H = parse_poly("x^2/2 + y^2", XYZ)
    X = ham_field(pi, H)
    assert X["x"] == parse_poly("2*y*z", XYZ) * 1 or X["x"] == bracket(pi, XYZ.var("x"), H)
    C = parse_poly("x^2 + y^2 + z^2", XYZ)
    table = involution_table(pi, [H, C])
    assert table[0][1] == 0 and table[1][0] == 0


def test_compatible_reports():
    pi = so3()
    const = PoissonStruct.from_relations(XYZ, {("x", "y"): XYZ.const(1)})
    assert compatible(pi, const).ok


def test_antisymmetry_enforced():
    with pytest.raises(ValueError):
        PoissonStruct.from_relations(XYZ, {("x", "y"): XYZ.var("z"), ("y", "x"): XYZ.var("z")})


@given(st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5), min_size=1, max_size=5))
def test_bareiss_rank_matches_sympy(rows):
    assert bareiss_rank(rows) == sympy.Matrix(rows).rank()


@given(st.lists(st.lists(st.fractions(-2, 2, max_denominator=4), min_size=4, max_size=4),
                min_size=1, max_size=4))
def test_nullspace_dimension_and_kernel(rows):
    basis = nullspace(rows)
    assert len(basis) == 4 - bareiss_rank(rows)
    for v in basis:
        assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)


def test_rank_and_kernel_of_so3():
    pi = so3()
    assert rank_at(pi, [1, 2, 3]) == 2
    assert rank_at(pi, [0, 0, 0]) == 0
    info = generic_rank(pi, samples=5, seed=3)
    assert info["max_rank"] == 2 and info["seed"] == 3 and len(info["ranks"]) == 5
    assert generic_rank(pi, seed=3) == generic_rank(pi, seed=3)
    (kv,) = kernel_at(pi, [1, 2, 3])
    assert {k: Fraction(v) for k, v in kv.items()} in (
        {"x": Fraction(1), "y": Fraction(2), "z": Fraction(3)},
        {"x": Fraction(1, 3), "y": Fraction(2, 3), "z": Fraction(1)})


def test_pushforward_of_scaling_map():
    # u -> 2x scales the so3 bracket: {2x, 2y} = 4z = 2 * (2z)
    x, y, z = XYZ.gens()
    m = PolyMap(XYZ, XYZ, [2 * x, 2 * y, 2 * z])
    assert verify_pushforward(m, so3(), so3(), 2).ok
    assert not verify_pushforward(m, so3(), so3(), 1).ok


def test_vector_field_lie_derivative():
    X = VectorField.from_dict(XYZ, {"x": XYZ.var("y"), "y": -XYZ.var("x"), "z": XYZ.zero()})
    assert X.apply(parse_poly("x^2 + y^2", XYZ)) == 0
