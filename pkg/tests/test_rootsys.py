import numpy as np
import pytest
from hypothesis import given, strategies as st

from todatype.rootsys import (PhiSubset, build_B, build_L, build_Psi, build_roots, closure_check,
                              default_signs, lax_varset, psi_pairs, root_label, root_vector,
                              simple_coords)


@pytest.mark.parametrize("n", range(1, 7))
def test_positive_root_count(n):
    R = build_roots(n)
    assert len(R.positive_roots) == n * (n + 1) // 2
    assert R.simple_roots == tuple((k, k + 1) for k in range(1, n + 1))


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(st.just(n), st.sampled_from(build_roots(n).positive_roots))))
def test_simple_coords_reconstruct_vector(case):
    n, root = case
    vec = np.zeros(n + 1, dtype=int)
    for k, c in simple_coords(root).items():
        vec += c * np.array(root_vector((k, k + 1), n + 1))
    assert tuple(vec) == root_vector(root, n + 1)
    assert sum(root_vector(root, n + 1)) == 0


def test_root_label():
    assert root_label((1, 3)) == "alpha1+alpha2"
    assert root_label((3, 1)) == "-(alpha1+alpha2)"


def test_presets_and_validation():
    assert len(PhiSubset.preset(4, "simple")) == 4
    assert len(PhiSubset.preset(4, "all")) == 10
    phi = PhiSubset.preset(4, "simple+length(3)")
    assert phi.roots[4:] == ((1, 4), (2, 5))
    assert PhiSubset.from_pairs(4, [(1, 3)]).roots[-1] == (1, 4)
    with pytest.raises(ValueError):
        PhiSubset(3, ((1, 3), (1, 2), (2, 3), (3, 4)))
    with pytest.raises(ValueError):
        PhiSubset(3, ((1, 2), (2, 3), (3, 4), (2, 1)))
    with pytest.raises(ValueError):
        PhiSubset.preset(3, "simple+length(5)")


def _brute_psi(phi):
    d = phi.dim
    signed = []
    for k, (i, j) in enumerate(phi.roots, start=1):
        signed.append((k, np.array(root_vector((i, j), d))))
        signed.append((-k, np.array(root_vector((j, i), d))))
    positives = {root_vector(r, d): r for r in build_roots(phi.rank).positive_roots}
    out = {}
    for a in range(len(signed)):
        for b in range(a + 1, len(signed)):
            (s1, v1), (s2, v2) = signed[a], signed[b]
            if abs(s1) == abs(s2):
                continue
            tot = tuple(v1 + v2)
            if tot in positives:
                out[tuple(sorted((s1, s2)))] = positives[tot]
    return out


@given(st.integers(2, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.sampled_from(build_roots(n).positive_roots)))))
def test_psi_pairs_agree_with_vector_addition(case):
    n, extra = case
    phi = PhiSubset.from_roots(n, sorted(extra))
    assert psi_pairs(phi) == _brute_psi(phi)
    assert set(build_Psi(phi)) == set(_brute_psi(phi).values())


@given(st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.sampled_from(build_roots(n).positive_roots)))))
def test_L_symmetric_B_antisymmetric(case):
    n, extra = case
    phi = PhiSubset.from_roots(n, sorted(extra))
    vs = lax_varset(phi)
    L, B = build_L(phi, vs), build_B(phi, vs)
    assert L.is_symmetric() and B.is_antisymmetric()
    assert all(L[i, i] == 0 for i in range(phi.dim))


@pytest.mark.parametrize("n", range(2, 7))
def test_simple_phi_closes(n):
    phi = PhiSubset.preset(n, "simple")
    vs = lax_varset(phi)
    assert closure_check(build_L(phi, vs), build_B(phi, vs)).ok


@pytest.mark.parametrize("n", [5, 6, 7])
def test_glv_phi_closes(n):
    phi = PhiSubset.preset(n - 1, f"simple+length({n - 2})")
    vs = lax_varset(phi)
    assert closure_check(build_L(phi, vs), build_B(phi, vs)).ok


def test_sign_validation():
    phi = PhiSubset.preset(3, "simple")
    vs = lax_varset(phi)
    with pytest.raises(ValueError):
        build_B(phi, vs, {(1, 3): 1})
    signs = default_signs(phi)
    assert signs == {(1, 2): 1, (2, 3): 1}
