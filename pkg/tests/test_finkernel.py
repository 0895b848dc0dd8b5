from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from enrichedsoa.finkernel import (
    EMPTY,
    POINT,
    DomainMismatch,
    FiniteCategory,
    FiniteFunctor,
    FiniteMap,
    FiniteSetObj,
    KernelError,
    UnionFind,
    all_maps,
    chain_colimit,
    coequalizer,
    compose,
    enumerate_functors,
    fin,
    hom_set,
    identity,
    pullback,
    pushout,
    pushout_induce,
    verify_coequalizer,
    verify_pullback,
    verify_pushout,
)


@st.composite
def maps_into(draw, A: FiniteSetObj, max_cod: int):
    n = draw(st.integers(1 if len(A) else 0, max_cod))
    return FiniteMap(A, fin(n), tuple(draw(st.integers(0, n - 1)) for _ in A))


@st.composite
def spans(draw, max_size: int):
    A = fin(draw(st.integers(0, max_size)))
    return draw(maps_into(A, max_size)), draw(maps_into(A, max_size))


@st.composite
def cospans(draw, max_size: int):
    D = fin(draw(st.integers(0, max_size)))

    def into_d():
        n = draw(st.integers(0, max_size if len(D) else 0))
        return FiniteMap(fin(n), D, tuple(draw(st.integers(0, len(D) - 1)) for _ in range(n)))

    return into_d(), into_d()


# ---------------------------------------------------------------------------
# sets and maps

def test_sets_are_canonical():
    assert FiniteSetObj.of(["b", "a"]) == FiniteSetObj.of(["a", "b"])
    with pytest.raises(KernelError):
        FiniteSetObj(("a", "a"))
    assert FiniteSetObj.of([(1, "x"), 0, "y"]).elements[0] == 0


def test_maps_must_be_total_and_land_in_codomain():
    with pytest.raises(KernelError):
        FiniteMap(fin(2), fin(2), (0,))
    with pytest.raises(KernelError):
        FiniteMap(fin(1), fin(2), (5,))
    with pytest.raises(KernelError):
        FiniteMap.from_dict(fin(2), fin(1), {0: 0})


def test_compose_and_identity():
    f = FiniteMap(fin(3), fin(2), (0, 1, 1))
    g = FiniteMap(fin(2), fin(2), (1, 0))
    assert compose(g, f).table == (1, 0, 0)
    assert compose(identity(fin(2)), f) == f == compose(f, identity(fin(3)))
    with pytest.raises(DomainMismatch):
        compose(f, g)


# ---------------------------------------------------------------------------
# pushout

def test_pushout_of_identities():
    i = identity(POINT)
    P, inB, inC = pushout(i, i)
    assert len(P) == 1 and inB.is_bijective() and inC.is_bijective()


def test_pushout_over_empty_apex_is_coproduct():
    B, C = FiniteSetObj.of(["b"]), FiniteSetObj.of(["c"])
    P, inB, inC = pushout(FiniteMap(EMPTY, B, ()), FiniteMap(EMPTY, C, ()))
    assert len(P) == 2
    assert inB.is_injective() and inC.is_injective()
    assert set(inB.table).isdisjoint(inC.table)


def test_pushout_gluing_one_point():
    B, C = FiniteSetObj.of(["b1", "b2"]), FiniteSetObj.of(["c1"])
    f = FiniteMap.from_dict(POINT, B, {"*": "b1"})
    g = FiniteMap.from_dict(POINT, C, {"*": "c1"})
    P, _, _ = pushout(f, g)
    expected = oracles.pushout_partition(1, 2, 1, (0,), (0,))
    assert len(P) == len(expected) == 2


def test_pushout_domain_mismatch():
    with pytest.raises(DomainMismatch):
        pushout(identity(fin(1)), identity(fin(2)))


def test_pushout_induce_rejects_non_cocone():
    f = FiniteMap(fin(1), fin(2), (0,))
    P, inB, inC = pushout(f, f)
    with pytest.raises(KernelError):
        pushout_induce(P, inB, inC, identity(fin(2)), FiniteMap(fin(2), fin(2), (1, 1)))


def _partition(P, inB, inC):
    classes: dict = {}
    for b, p in zip(inB.dom, inB.table):
        classes.setdefault(p, set()).add(("B", b))
    for c, p in zip(inC.dom, inC.table):
        classes.setdefault(p, set()).add(("C", c))
    return sorted(map(sorted, classes.values()))


@settings(max_examples=150, deadline=None)
@given(spans(5))
def test_pushout_matches_graph_components(span):
    f, g = span
    P, inB, inC = pushout(f, g)
    oracle = oracles.pushout_partition(len(f.dom), len(f.cod), len(g.cod), f.table, g.table)
    assert _partition(P, inB, inC) == sorted(map(sorted, oracle))


@settings(max_examples=60, deadline=None)
@given(spans(3))
def test_pushout_universal_property(span):
    f, g = span
    assert verify_pushout(f, g, *pushout(f, g))


@settings(max_examples=60, deadline=None)
@given(spans(4))
def test_pushout_symmetry(span):
    f, g = span
    P1, b1, c1 = pushout(f, g)
    P2, c2, b2 = pushout(g, f)
    iso = pushout_induce(P1, b1, c1, b2, c2)
    assert iso.is_bijective()
    assert compose(iso, b1) == b2 and compose(iso, c1) == c2


def test_verify_pushout_catches_a_wrong_apex():
    f = FiniteMap(fin(1), fin(2), (0,))
    P, inB, inC = pushout(f, f)
    # collapse everything to a point: a cocone, but not universal
    bad = FiniteMap(fin(2), POINT, ("*", "*"))
    assert not verify_pushout(f, f, POINT, bad, bad)


# ---------------------------------------------------------------------------
# pullback

def test_pullback_of_identities_is_diagonal():
    D = fin(3)
    P, p1, p2 = pullback(identity(D), identity(D))
    assert P.elements == ((0, 0), (1, 1), (2, 2))


def test_pullback_over_point_is_product():
    t = FiniteMap(fin(2), POINT, ("*", "*"))
    P, _, _ = pullback(t, t)
    assert len(P) == 4


def test_pullback_filters_pairs():
    D = FiniteSetObj.of(["x", "y"])
    f = FiniteMap.from_dict(FiniteSetObj.of([1, 2]), D, {1: "x", 2: "y"})
    g = FiniteMap.from_dict(FiniteSetObj.of(["a"]), D, {"a": "x"})
    P, _, _ = pullback(f, g)
    brute = [(b, c) for b in f.dom for c in g.dom if f(b) == g(c)]
    assert list(P.elements) == brute == [(1, "a")]


def test_pullback_codomain_mismatch():
    with pytest.raises(DomainMismatch):
        pullback(identity(fin(1)), identity(fin(2)))


@settings(max_examples=50, deadline=None)
@given(cospans(3))
def test_pullback_universal_property(cospan):
    f, g = cospan
    assert verify_pullback(f, g, *pullback(f, g))


# ---------------------------------------------------------------------------
# coequalizer

def test_coequalizer_of_equal_pair():
    f = FiniteMap(fin(2), fin(3), (0, 2))
    Q, q = coequalizer(f, f)
    assert len(Q) == 3 and q.is_bijective()


def test_coequalizer_identifies_two_points():
    B = FiniteSetObj.of(["x", "y"])
    f = FiniteMap.from_dict(POINT, B, {"*": "x"})
    g = FiniteMap.from_dict(POINT, B, {"*": "y"})
    Q, q = coequalizer(f, g)
    assert len(Q) == len(B) - 1 == oracles.coequalizer_classes(2, (0,), (1,))


def test_coequalizer_of_empty_relation():
    e = FiniteMap(EMPTY, fin(3), ())
    Q, q = coequalizer(e, e)
    assert len(Q) == 3


def test_coequalizer_needs_parallel_pair():
    with pytest.raises(DomainMismatch):
        coequalizer(FiniteMap(fin(1), fin(2), (0,)), FiniteMap(fin(1), fin(3), (0,)))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_coequalizer_against_oracle_and_universal_property(data):
    nA, nB = data.draw(st.integers(0, 5)), data.draw(st.integers(1, 5))
    f = FiniteMap(fin(nA), fin(nB), tuple(data.draw(st.integers(0, nB - 1)) for _ in range(nA)))
    g = FiniteMap(fin(nA), fin(nB), tuple(data.draw(st.integers(0, nB - 1)) for _ in range(nA)))
    Q, q = coequalizer(f, g)
    assert len(Q) == oracles.coequalizer_classes(nB, f.table, g.table)
    assert verify_coequalizer(f, g, Q, q)


# ---------------------------------------------------------------------------
# chains and hom-sets

def test_chain_colimit_single_map():
    f = FiniteMap(fin(1), fin(2), (1,))
    final, inj = chain_colimit([f])
    assert final == fin(2) and inj == [f, identity(fin(2))]


def test_chain_colimit_pair_composes():
    f = FiniteMap(fin(1), fin(2), (1,))
    g = FiniteMap(fin(2), fin(3), (2, 0))
    _, inj = chain_colimit([f, g])
    assert inj[0] == compose(g, f)


def test_chain_colimit_of_inclusions():
    sets = [FiniteSetObj.of(range(1, n + 1)) for n in (1, 2, 3, 4)]
    incl = [FiniteMap.from_function(a, b, lambda x: x) for a, b in zip(sets, sets[1:])]
    final, inj = chain_colimit(incl)
    assert final == FiniteSetObj.of([1, 2, 3, 4])
    assert inj[0].table == (1,)


def test_chain_colimit_errors():
    with pytest.raises(KernelError):
        chain_colimit([])
    with pytest.raises(DomainMismatch):
        chain_colimit([identity(fin(1)), identity(fin(2))])


def test_hom_set_examples():
    assert len(hom_set(EMPTY, fin(3))) == 1
    assert len(hom_set(fin(2), fin(3))) == 9
    assert hom_set(FiniteSetObj.of(["a"]), FiniteSetObj.of(["x", "y"])).elements == (("x",), ("y",))


@pytest.mark.parametrize("n,m", [(0, 0), (0, 2), (2, 0), (3, 2), (2, 3)])
def test_hom_set_cardinality_and_order(n, m):
    H = hom_set(fin(n), fin(m))
    assert len(H) == m ** n
    assert list(H.elements) == list(itertools.product(range(m), repeat=n))
    assert [f.table for f in all_maps(fin(n), fin(m))] == list(H.elements)


def test_union_find_least_representative():
    uf = UnionFind([3, 1, 2])
    uf.union(3, 2)
    assert uf.find(3) == 2 and uf.find(1) == 1


# ---------------------------------------------------------------------------
# categories and functors

def test_preorder_category_validates():
    C = FiniteCategory.from_preorder((0, 1, 2), lambda x, y: x <= y)
    C.validate()
    assert len(C.morphisms) == 6
    assert C.hom(2, 0) == ()


def test_one_object_category_validates():
    FiniteCategory.one_object((0, 1, 2), lambda g, f: (g + f) % 3, 0).validate()


def test_validate_rejects_non_associative_table():
    bad = FiniteCategory.one_object((0, 1, 2), lambda g, f: (g - f) % 3, 0)
    with pytest.raises(KernelError):
        bad.validate()


def test_functor_enumeration_counts():
    arrow = FiniteCategory.from_preorder((0, 1), lambda x, y: x <= y)
    # functors 𝟐 -> 𝟐 are the monotone maps of the chain: 3 of them
    Fs = enumerate_functors(arrow, arrow)
    assert len(Fs) == 3
    for F in Fs:
        F.validate()


def test_functor_validate_rejects_bad_composition():
    Z2 = FiniteCategory.one_object((0, 1), lambda g, f: (g + f) % 2, 0)
    F = FiniteFunctor(Z2, Z2, {"*": "*"}, {0: 1, 1: 1})
    with pytest.raises(KernelError):
        F.validate()
