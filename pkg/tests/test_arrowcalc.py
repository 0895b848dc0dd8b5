from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import to_map
from enrichedsoa.arrowcalc import (
    NonCommutingSquare,
    Square,
    adjoint_square_bwd,
    adjoint_square_fwd,
    copower,
    corner,
    corner_assoc_bijection,
    e_map,
    postcompose,
    precompose,
    sq,
    sq_action,
    squares_between,
    transpose_down,
    transpose_up,
)
from enrichedsoa.finkernel import EMPTY, POINT, FiniteMap, FiniteSetObj, all_maps, compose, fin, hom_set, identity
from enrichedsoa.lifting import EMPTY_TO_POINT, FOLD, has_lift, maps_up_to, random_map

SMALL = maps_up_to(2)


# ---------------------------------------------------------------------------
# copowers

def test_copower_examples():
    A = FiniteSetObj.of("abc")
    assert len(copower(POINT, A)) == len(A)
    assert len(copower(EMPTY, A)) == 0
    assert len(copower(FiniteSetObj.of("xy"), A)) == 6


# ---------------------------------------------------------------------------
# square objects

def test_sq_from_empty_domain_is_codomain_of_k():
    k = FiniteMap(fin(2), fin(3), (0, 2))
    S = sq(EMPTY_TO_POINT, k)
    assert len(S.carrier) == len(k.cod)
    assert all(r == () for r, _ in S.carrier)


def test_sq_of_identities_is_hom():
    A, C = fin(2), fin(3)
    assert len(sq(identity(A), identity(C)).carrier) == len(hom_set(A, C))


def test_sq_to_terminal_maps():
    f = FiniteMap(FiniteSetObj.of([1, 2]), POINT, ("*", "*"))
    k = FiniteMap(FiniteSetObj.of("ab"), POINT, ("*", "*"))
    assert len(sq(f, k).carrier) == 4


@pytest.mark.parametrize("f", SMALL[::3])
@pytest.mark.parametrize("k", SMALL[::2])
def test_sq_matches_pair_filter(f, k):
    tf = (len(f.dom), len(f.cod), f.table)
    tk = (len(k.dom), len(k.cod), k.table)
    assert list(sq(f, k).carrier.elements) == oracles.square_pairs(tf, tk)


def test_sq_projections_are_the_pullback_legs():
    f, k = FiniteMap(fin(2), fin(2), (0, 0)), FiniteMap(fin(3), fin(2), (0, 1, 1))
    S = sq(f, k)
    assert compose(postcompose(f.dom, k), S.p1) == compose(precompose(f, k.cod), S.p2)


# ---------------------------------------------------------------------------
# functoriality of Sq in the first variable

def test_sq_action_identity():
    f, k = FiniteMap(fin(2), fin(2), (1, 1)), FiniteMap(fin(2), fin(1), (0, 0))
    m = sq_action(identity(f.dom), identity(f.cod), f, f, k)
    assert m == identity(sq(f, k).carrier)


def test_sq_action_rejects_non_commuting():
    f = FiniteMap(fin(1), fin(2), (0,))
    with pytest.raises(NonCommutingSquare):
        sq_action(identity(fin(1)), FiniteMap(fin(2), fin(2), (1, 0)), f, f, identity(fin(1)))


def _arrow_morphisms(f, f2):
    for g in all_maps(f.dom, f2.dom):
        for g2 in all_maps(f.cod, f2.cod):
            if compose(g2, f) == compose(f2, g):
                yield g, g2


def test_sq_action_is_contravariantly_functorial():
    two = [m for m in maps_up_to(2) if len(m.dom) == 2 and len(m.cod) == 2]
    k = FiniteMap(fin(2), fin(2), (0, 0))
    for f1, f2, f3 in itertools.product(two, repeat=3):
        for a, a2 in _arrow_morphisms(f1, f2):
            for b, b2 in _arrow_morphisms(f2, f3):
                lhs = sq_action(compose(b, a), compose(b2, a2), f1, f3, k)
                rhs = compose(sq_action(a, a2, f1, f2, k), sq_action(b, b2, f2, f3, k))
                assert lhs == rhs


def test_sq_action_along_f_itself():
    # the square (f, id): f -> id_B; Sq(id_B, k) -> Sq(f, k) is (r, s) ↦ (r∘f, s)
    f = FiniteMap(fin(2), fin(3), (2, 0))
    k = FiniteMap(fin(2), fin(2), (1, 0))
    m = sq_action(f, identity(f.cod), f, identity(f.cod), k)
    for (r, s), img in zip(m.dom.elements, m.table):
        assert img == (tuple(r[i] for i in f.table), s)


# ---------------------------------------------------------------------------
# e_{f,k}

def test_e_map_at_empty_domain_is_k():
    k = FiniteMap(fin(3), fin(2), (1, 1, 0))
    e = e_map(EMPTY_TO_POINT, k).map
    assert [s for _, s in e.table] == [(y,) for y in k.table]


@pytest.mark.parametrize("f", SMALL)
def test_e_map_identity_cases_are_bijections(f):
    for k in SMALL:
        if len(f.dom) == len(f.cod) and f.is_bijective():
            assert e_map(f, k).map.is_bijective()
    assert e_map(f, identity(fin(2))).map.is_bijective()
    assert e_map(identity(f.dom), f).map.is_bijective()


@pytest.mark.parametrize("f", SMALL)
def test_e_map_projections_and_epi_injectivity(f):
    for k in SMALL:
        S, e = sq(f, k), e_map(f, k).map
        assert compose(S.p1, e) == precompose(f, k.dom)
        assert compose(S.p2, e) == postcompose(f.cod, k)
        if f.is_surjective():
            assert e.is_injective()


# ---------------------------------------------------------------------------
# corner maps

def test_corner_with_empty_to_point_is_f():
    f = FiniteMap(fin(3), fin(2), (0, 1, 1))
    cr = corner(EMPTY_TO_POINT, f)
    assert len(cr.apex) == len(f.dom)
    for a in f.dom:
        assert cr.corner(cr.i2((0, a))) == (0, f(a))


def test_corner_of_empty_to_point_with_itself():
    cr = corner(EMPTY_TO_POINT, EMPTY_TO_POINT)
    assert len(cr.apex) == 0 and len(cr.corner.cod) == 1


def test_corner_of_fold_with_injection():
    f = FiniteMap.from_dict(FiniteSetObj.of("a"), FiniteSetObj.of("ab"), {"a": "a"})
    cr = corner(FOLD, f)
    # B ⊔_A B has three points
    partition = oracles.pushout_partition(1, 2, 2, (0,), (0,))
    assert len(cr.apex) == len(partition) == 3
    assert cr.corner.is_surjective() and len(cr.corner.cod) == 2
    assert compose(cr.corner, cr.i1) == FiniteMap(copower(FOLD.dom, f.cod), cr.corner.cod, tuple((0, b) for _ in FOLD.dom for b in f.cod))


@pytest.mark.parametrize("u", SMALL[::2])
def test_corner_triangles(u):
    for f in SMALL:
        cr = corner(u, f)
        assert compose(cr.corner, cr.i1).table == tuple((y, b) for y in u.table for b in f.cod)
        assert compose(cr.corner, cr.i2).table == tuple((v, b) for v in u.cod for b in f.table)


def test_corner_with_identity_is_iso():
    for f in SMALL:
        for n in range(3):
            assert corner(identity(fin(n)), f).corner.is_bijective()


# ---------------------------------------------------------------------------
# transposition

def test_transpose_unit_and_empty():
    A, B = fin(2), fin(3)
    phi = FiniteMap(POINT, hom_set(A, B), ((2, 0),))
    assert transpose_up(phi, A, B).table == (2, 0)
    e = FiniteMap(EMPTY, hom_set(A, B), ())
    assert len(transpose_up(e, A, B).dom) == 0
    assert transpose_down(transpose_up(e, A, B), EMPTY, A) == e


def test_transpose_round_trips_exhaustive():
    for nu, na, nb in itertools.product(range(4), repeat=3):
        U, A, B = fin(nu), fin(na), fin(nb)
        H = hom_set(A, B)
        for phi in all_maps(U, H):
            psi = transpose_up(phi, A, B)
            assert transpose_down(psi, U, A) == phi
            assert all(psi((x, a)) == phi(x)[a] for x in U for a in A)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(1, 3), st.data())
def test_transpose_down_then_up(nu, na, nb, data):
    U, A, B = fin(nu), fin(na), fin(nb)
    table = tuple(data.draw(st.integers(0, nb - 1)) for _ in range(nu * na))
    psi = FiniteMap(copower(U, A), B, table)
    assert transpose_up(transpose_down(psi, U, A), A, B) == psi


# ---------------------------------------------------------------------------
# adjoint squares

def test_adjoint_squares_exhaustive_small():
    count = 0
    for u, f, k in itertools.product(SMALL, repeat=3):
        e = e_map(f, k).map
        nab = corner(u, f).corner
        for s in squares_between(u, e):
            fwd = adjoint_square_fwd(s, f, k)
            assert fwd.commutes()
            assert fwd.left == nab and fwd.right == k
            assert adjoint_square_bwd(fwd, u, f) == s
            count += 1
        for t in squares_between(nab, k):
            assert adjoint_square_fwd(adjoint_square_bwd(t, u, f), f, k) == t
    assert count > 0


def test_adjoint_square_rejects_non_commuting():
    f = FiniteMap(fin(1), fin(2), (0,))
    k = FiniteMap(fin(2), fin(1), (0, 0))
    e = e_map(f, k).map
    top = FiniteMap(POINT, e.dom, ((0, 0),))
    bottom = FiniteMap(POINT, e.cod, (((1,), (0, 0)),))
    with pytest.raises(NonCommutingSquare):
        adjoint_square_fwd(Square(identity(POINT), e, top, bottom), f, k)


def test_adjoint_square_along_identity():
    f, k = FiniteMap(fin(1), fin(2), (1,)), FiniteMap(fin(2), fin(2), (0, 0))
    u = identity(fin(2))
    for s in squares_between(u, e_map(f, k).map):
        out = adjoint_square_fwd(s, f, k)
        assert out.left.is_bijective() and out.commutes()


# ---------------------------------------------------------------------------
# corner associativity and lifting transposition

@pytest.mark.parametrize("seed", range(25))
def test_corner_associativity_seeded(seed):
    rng = random.Random(f"assoc:{seed}")
    v, u, f = (random_map(rng, 3) for _ in range(3))
    res = corner_assoc_bijection(v, u, f)
    assert res.ok, res.problems
    assert res.bijection.is_bijective()


def test_lifting_transposition_brute_small():
    for u, f, k in itertools.product(SMALL, repeat=3):
        left = has_lift(u, e_map(f, k).map).all_lift
        right = has_lift(corner(u, f).corner, k).all_lift
        assert left == right, (u, f, k)


def test_lifting_counts_match_oracle_on_e_maps():
    rng = random.Random("e-oracle")
    for _ in range(60):
        u, f, k = random_map(rng, 2), random_map(rng, 2), random_map(rng, 2)
        e = e_map(f, k).map
        # relabel e onto integers for the oracle
        te = (len(e.dom), len(e.cod), tuple(e.cod.index[y] for y in e.table))
        tu = (len(u.dom), len(u.cod), u.table)
        counts = oracles.lifting_counts(tu, te)
        table = has_lift(u, to_map(te))
        assert [w.count for w in table.witnesses] == counts
