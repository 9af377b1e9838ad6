from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import families
from arrperv.errors import InvalidModule, NotInA, ValidationFailed
from arrperv.linalg import Matrix, Subspace, kron
from arrperv.modules import (
    DoubleRep,
    RModule,
    ab_double_rep,
    ab_module,
    collapse,
    constant_double_rep,
    constant_module,
    direct_sum,
    expand,
    external_tensor,
    find_isomorphism,
    hom_space,
    isomorphic,
    nat_iso_check,
    one_hyperplane_extension,
    phi,
    stalk,
    validate_module,
)

MODULES = families.all_modules()
IDS = [name for name, _ in MODULES]


def test_constant_module_validates():
    p = families.posets()["braid_a2"]
    rep = validate_module(constant_module(p, 2))
    assert rep.ok and rep.checked > 0


def test_r1_failure_names_the_face():
    p = families.posets()["braid_a2"]
    act = {c: Matrix.identity(1) for c in range(len(p))}
    bad = p.face_index("+-+")
    act[bad] = Matrix([[2]])
    rep = validate_module(RModule(p, 1, act))
    assert "R1 violated at face +-+" in rep.failures
    with pytest.raises(InvalidModule):
        RModule(p, 1, act).require_valid()


def test_unit_and_r3_failures():
    p = families.line_poset()
    act = {c: Matrix.identity(1) for c in range(len(p))}
    act[p.zero] = Matrix.zeros(1, 1)
    rep = validate_module(RModule(p, 1, act))
    assert any(f.startswith("unit violated") for f in rep.failures)
    assert any(f.startswith("R3 violated") for f in rep.failures)


def test_non_invertible_localization_fails():
    rep = validate_module(RModule(families.line_poset(), 2, dict(_ab_acts(1, 0))))
    assert rep.failures == ["localization element for opposing +, - is not invertible",
                            "localization element for opposing -, + is not invertible"]
    with pytest.raises(ValidationFailed):
        ab_module(1, 0)


def _ab_acts(a, b):
    p = families.line_poset()
    return {
        p.face_index("+"): Matrix([[1, a], [0, 0]]),
        p.face_index("-"): Matrix([[0, 0], [b, 1]]),
        p.face_index("0"): Matrix.identity(2),
    }


def test_ab_module_matches_hand_matrices():
    p = families.line_poset()
    m = ab_module(3, 5, p)
    assert m.act == _ab_acts(3, 5)
    plus, minus = p.face_index("+"), p.face_index("-")
    # e_+ e_- e_+ = ab e_+
    assert m.act[plus] @ m.act[minus] @ m.act[plus] == m.act[plus].scale(15)


@pytest.mark.parametrize("name,m", MODULES, ids=IDS)
def test_collapse_expand_identity(name, m):
    e = expand(m)
    assert collapse(e) == m
    assert nat_iso_check(e).ok


def test_ab_double_rep_collapses_to_hand_formula():
    for a, b in [(1, 2), (2, 1), (-1, Fraction(1, 3))]:
        e = ab_double_rep(a, b)
        m = collapse(e)
        assert m.act == _ab_acts(a, b)
        assert nat_iso_check(e).ok
        assert collapse(expand(m)) == m


def test_double_rep_phi_values():
    e = ab_double_rep(3, 5)
    p = e.poset
    plus, minus = p.face_index("+"), p.face_index("-")
    assert phi(e, plus, minus) == Matrix([[5]])
    assert phi(e, minus, plus) == Matrix([[3]])
    assert phi(e, plus, plus) == Matrix.identity(1)


def test_monotonicity_violation_is_not_in_a():
    e = ab_double_rep(1, 2)
    p = e.poset
    e.gamma[(p.zero, p.face_index("+"))] = Matrix([[2, 1]])
    rep = nat_iso_check(e)
    assert not rep.ok and any("monotonicity" in f for f in rep.failures)
    with pytest.raises(NotInA):
        collapse(e)


def test_invertibility_violation_is_not_in_a():
    with pytest.raises(NotInA):
        collapse(ab_double_rep(1, 0))


def test_constant_double_rep():
    for p in families.posets().values():
        e = constant_double_rep(p, 2)
        assert nat_iso_check(e).ok
        assert collapse(e) == constant_module(p, 2)


def test_transitivity_violation_detected():
    # on braid-A2 the constant double rep with one gamma scaled breaks phi along a collinear triple
    p = families.posets()["braid_a2"]
    e = constant_double_rep(p, 1)
    c = p.chambers[0]
    e.gamma[(p.zero, c)] = Matrix([[2]])
    e.delta[(c, p.zero)] = Matrix([["1/2"]])
    assert not nat_iso_check(e).ok


def _hom_dim_oracle(m1, m2):
    """``dim Hom`` from the floating-point rank of the stacked Kronecker system."""
    blocks = []
    for c in m1.act:
        a = np.array([m1.act[c].row(i) for i in range(m1.dim)], dtype=float)
        b = np.array([m2.act[c].row(i) for i in range(m2.dim)], dtype=float)
        blocks.append(np.kron(np.eye(m2.dim), a.T) - np.kron(b, np.eye(m1.dim)))
    stacked = np.vstack(blocks)
    return m1.dim * m2.dim - np.linalg.matrix_rank(stacked)


@pytest.mark.parametrize("i,j", [(0, 0), (1, 1), (1, 2), (2, 1), (3, 3), (4, 4), (3, 4), (8, 9)])
def test_hom_space_dimension_matches_oracle(i, j):
    fam = families.one_hyperplane_family()
    m1, m2 = fam[i][1], fam[j][1]
    basis = hom_space(m1, m2)
    assert len(basis) == _hom_dim_oracle(m1, m2)
    for h in basis:
        for c in m1.act:
            assert h.matrix @ m1.act[c] == m2.act[c] @ h.matrix


def test_isomorphism_examples():
    p = families.line_poset()
    assert isomorphic(ab_module(1, 2, p), ab_module(2, 1, p))
    assert isomorphic(ab_module(3, 5, p), ab_module(5, 3, p))
    assert not isomorphic(ab_module(1, 2, p), ab_module(1, 3, p))
    assert not isomorphic(ab_module(1, 2, p), constant_module(p, 2))
    # ab(1, 1) is a non-split extension of the constant module by the skyscraper
    ab11, sky = ab_module(1, 1, p), _skyscraper(p)
    assert len(hom_space(sky, ab11)) == 1 and len(hom_space(ab11, constant_module(p))) == 1
    assert find_isomorphism(ab11, direct_sum(constant_module(p), sky)) is None
    assert find_isomorphism(ab_module(2, 3, p), ab_module(3, 2, p)) is not None


def _skyscraper(p):
    act = {c: Matrix.zeros(1, 1) for c in range(len(p))}
    act[p.zero] = Matrix.identity(1)
    return RModule(p, 1, act).validated()


def test_one_hyperplane_extension_blocks():
    t = Matrix([[1, 1], [0, 1]])
    m = one_hyperplane_extension(t)
    assert m.dim == 4
    p = m.poset
    plus = m.act[p.face_index("+")]
    assert plus.submatrix(range(2), range(2, 4)) == t
    with pytest.raises(InvalidModule):
        one_hyperplane_extension([[1]], poset=families.posets()["boolean2"])


def test_external_tensor_acts_by_kronecker():
    p = families.line_poset()
    m1, m2 = ab_module(1, 2, p), ab_module(1, -1, p)
    t = external_tensor(m1, m2)
    assert len(t.poset) == 9
    for i, face in enumerate(t.poset.faces):
        c1, c2 = p.index[face.signs[:1]], p.index[face.signs[1:]]
        assert t.act[i] == kron(m1.act[c1], m2.act[c2])


def test_direct_sum_requires_same_poset():
    with pytest.raises(InvalidModule):
        direct_sum(constant_module(families.line_poset()), constant_module(families.posets()["one_line"]))


def test_stalk_examples():
    p = families.posets()["boolean2"]
    m = constant_module(p, 2)
    pp, cc = p.face_index("0+"), p.face_index("++")
    assert stalk(m, pp, p.zero, cc) == Subspace.full(2)
    assert stalk(m, cc, p.zero, pp).dim == 0
    line = families.line_poset()
    ab = ab_module(1, 2, line)
    plus, minus = line.face_index("+"), line.face_index("-")
    assert stalk(ab, line.zero, minus, plus) == ab.image(plus)
    assert stalk(ab, line.zero, plus, line.zero) == ab.image(plus)


@pytest.mark.parametrize("name,m", MODULES, ids=IDS)
def test_chamber_images_have_equal_dimension(name, m):
    dims = {m.image(c).dim for c in m.poset.chambers}
    assert len(dims) == 1


@pytest.mark.parametrize("name,m", MODULES, ids=IDS)
def test_localization_inverses(name, m):
    ident = Matrix.identity(m.dim)
    for a, b, _w in m.poset.opposing_pairs:
        ea, eb = m.act[a], m.act[b]
        loc = ea @ eb @ ea + (ident - ea)
        assert m.s(a, b) @ loc == ident and loc @ m.s(a, b) == ident
        # s_AB commutes with e_A and acts on e_A M as the inverse of e_A e_B e_A
        assert m.s(a, b) @ ea == ea @ m.s(a, b)


@pytest.mark.parametrize("name,m", MODULES, ids=IDS)
def test_collinear_telescoping(name, m):
    p = m.poset
    for a, b, c in p.collinear_triples():
        assert m.act[a] @ m.act[c] == m.act[a] @ m.act[b] @ m.act[c]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(range(len(MODULES))), st.sampled_from(range(len(MODULES))))
def test_direct_sum_validates_and_projects(i, j):
    m1, m2 = MODULES[i][1], MODULES[j][1]
    if m1.poset is not m2.poset:
        return
    s = direct_sum(m1, m2)
    assert validate_module(s).ok
    assert len(hom_space(m1, s)) >= len(hom_space(m1, m1))
    assert collapse(expand(s)) == s


def test_double_rep_from_scratch_on_boolean_square():
    # gamma and delta built by hand on Boolean^2: the external tensor of two copies of ab(1, 2)
    line = families.line_poset()
    m = external_tensor(ab_module(1, 2, line), ab_module(1, 2, line))
    e = expand(m)
    p = e.poset
    assert e.dims[p.zero] == 4
    assert {e.dims[c] for c in p.chambers} == {1}
    assert all(e.dims[c] == 2 for c in p.by_codim(1))
    for a, b in itertools.product(p.chambers, repeat=2):
        if p.opposes(a, b) is not None:
            assert phi(e, a, b).rows == 1 and phi(e, a, b) != Matrix.zeros(1, 1)


def test_double_rep_rejects_wrong_shapes():
    e = ab_double_rep(1, 2)
    p = e.poset
    e.gamma[(p.zero, p.face_index("+"))] = Matrix([[1, 2, 3]])
    rep = nat_iso_check(e)
    assert not rep.ok and any("shape" in f for f in rep.failures)
    assert isinstance(e, DoubleRep)
