"""Arrow-category calculus over finite sets.

Square objects, copowers, corner maps and the induced comparison ``e_{f,k}``,
plus the transposition dictionary relating lifting problems of ``u`` against
``e_{f,k}`` to lifting problems of ``∇(u,f)`` against ``k``.

Conventions: an element of ``hom_set(A, B)`` is the image tuple of a map in
``A``'s canonical order; an element of a copower ``U⊙A`` is a pair ``(u, a)``;
an element of ``Sq(f, k)`` is a pair ``(r, s)`` of such image tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .finkernel import (
    FiniteMap,
    FiniteSetObj,
    KernelError,
    compose,
    hom_set,
    pullback,
    pushout,
    pushout_induce,
)


class NonCommutingSquare(KernelError):
    pass


def _after(t: tuple, g: FiniteMap) -> tuple:
    """The tuple of ``t ∘ g`` when ``t`` is an image tuple over ``g.cod``."""
    return tuple(t[i] for i in g.idx)


def _post(k: FiniteMap, t: tuple) -> tuple:
    """The tuple of ``k ∘ t``."""
    index, table = k.dom.index, k.table
    return tuple(table[index[x]] for x in t)


# ---------------------------------------------------------------------------
# copowers

@lru_cache(maxsize=4096)
def copower(U: FiniteSetObj, A: FiniteSetObj) -> FiniteSetObj:
    # itertools.product over sorted factors is already in canonical order
    return FiniteSetObj._sorted(tuple(itertools.product(U.elements, A.elements)))


def copower_left(u: FiniteMap, A: FiniteSetObj) -> FiniteMap:
    """``u ⊙ A : U×A -> V×A``."""
    dom = copower(u.dom, A)
    return FiniteMap._trusted(dom, copower(u.cod, A), tuple((y, a) for y in u.table for a in A.elements))


def copower_right(U: FiniteSetObj, f: FiniteMap) -> FiniteMap:
    """``U ⊙ f : U×A -> U×B``."""
    dom = copower(U, f.dom)
    return FiniteMap._trusted(dom, copower(U, f.cod), tuple((x, b) for x in U.elements for b in f.table))


def copower_maps(u: FiniteMap, f: FiniteMap) -> FiniteMap:
    """``u ⊙ f : U×A -> V×B``."""
    return FiniteMap._trusted(
        copower(u.dom, f.dom), copower(u.cod, f.cod), tuple((y, b) for y in u.table for b in f.table)
    )


# ---------------------------------------------------------------------------
# hom actions

@lru_cache(maxsize=8192)
def precompose(f: FiniteMap, D: FiniteSetObj) -> FiniteMap:
    """``K(f, D) : hom(B, D) -> hom(A, D)``, ``s ↦ s∘f``."""
    src, dst = hom_set(f.cod, D), hom_set(f.dom, D)
    return FiniteMap._trusted(src, dst, tuple(_after(s, f) for s in src.elements))


@lru_cache(maxsize=8192)
def postcompose(A: FiniteSetObj, k: FiniteMap) -> FiniteMap:
    """``K(A, k) : hom(A, C) -> hom(A, D)``, ``r ↦ k∘r``."""
    src, dst = hom_set(A, k.dom), hom_set(A, k.cod)
    return FiniteMap._trusted(src, dst, tuple(_post(k, r) for r in src.elements))


# ---------------------------------------------------------------------------
# square objects

@dataclass(frozen=True, eq=False)
class SquareObject:
    f: FiniteMap
    k: FiniteMap
    carrier: FiniteSetObj
    p1: FiniteMap
    p2: FiniteMap

    def contains(self, r: tuple, s: tuple) -> bool:
        return (r, s) in self.carrier


@lru_cache(maxsize=8192)
def sq(f: FiniteMap, k: FiniteMap) -> SquareObject:
    """The object of commutative squares from ``f: A -> B`` to ``k: C -> D``."""
    A, D = f.dom, k.cod
    carrier, p1, p2 = pullback(postcompose(A, k), precompose(f, D))
    return SquareObject(f, k, carrier, p1, p2)


def sq_action(g: FiniteMap, g2: FiniteMap, f: FiniteMap, f2: FiniteMap, k: FiniteMap) -> FiniteMap:
    """``Sq((g, g'), k) : Sq(f', k) -> Sq(f, k)`` for a square ``g'∘f = f'∘g``."""
    if g.dom != f.dom or g.cod != f2.dom or g2.dom != f.cod or g2.cod != f2.cod:
        raise KernelError("square morphism has the wrong boundary")
    if compose(g2, f) != compose(f2, g):
        raise NonCommutingSquare("(g, g') is not a morphism of arrows")
    source, target = sq(f2, k), sq(f, k)
    table = tuple((_after(r, g), _after(s, g2)) for r, s in source.carrier.elements)
    return FiniteMap._trusted(source.carrier, target.carrier, table)


@dataclass(frozen=True, eq=False)
class InducedE:
    f: FiniteMap
    k: FiniteMap
    map: FiniteMap


@lru_cache(maxsize=8192)
def e_map(f: FiniteMap, k: FiniteMap) -> InducedE:
    """``e_{f,k} : hom(B, C) -> Sq(f, k)``, ``d ↦ (d∘f, k∘d)``."""
    H = hom_set(f.cod, k.dom)
    S = sq(f, k).carrier
    table = tuple((_after(d, f), _post(k, d)) for d in H.elements)
    return InducedE(f, k, FiniteMap._trusted(H, S, table))


# ---------------------------------------------------------------------------
# corner maps

@dataclass(frozen=True, eq=False)
class CornerResult:
    u: FiniteMap
    f: FiniteMap
    apex: FiniteSetObj
    i1: FiniteMap  # U×B -> apex
    i2: FiniteMap  # V×A -> apex
    corner: FiniteMap  # apex -> V×B


@lru_cache(maxsize=8192)
def corner(u: FiniteMap, f: FiniteMap) -> CornerResult:
    U, V, A = u.dom, u.cod, f.dom
    apex, i1, i2 = pushout(copower_right(U, f), copower_left(u, A))
    c = pushout_induce(apex, i1, i2, copower_left(u, f.cod), copower_right(V, f))
    return CornerResult(u, f, apex, i1, i2, c)


# ---------------------------------------------------------------------------
# transposition

def transpose_up(phi: FiniteMap, A: FiniteSetObj, B: FiniteSetObj) -> FiniteMap:
    """``φ: U -> hom(A, B)`` to ``φ^*: U⊙A -> B``, ``(u, a) ↦ φ(u)(a)``."""
    if phi.cod != hom_set(A, B):
        raise KernelError("transpose_up expects a map into hom(A, B)")
    table = tuple(x for t in phi.table for x in t)
    return FiniteMap._trusted(copower(phi.dom, A), B, table)


def transpose_down(psi: FiniteMap, U: FiniteSetObj, A: FiniteSetObj) -> FiniteMap:
    """``ψ: U⊙A -> B`` to ``ψ_*: U -> hom(A, B)``."""
    if psi.dom != copower(U, A):
        raise KernelError("transpose_down expects a map out of U⊙A")
    n = len(A)
    t = psi.table
    return FiniteMap._trusted(U, hom_set(A, psi.cod), tuple(t[i * n:(i + 1) * n] for i in range(len(U))))


# ---------------------------------------------------------------------------
# lifting problems and their adjoint transposes

@dataclass(frozen=True)
class Square:
    """A commutative square ``right∘top = bottom∘left``."""

    left: FiniteMap
    right: FiniteMap
    top: FiniteMap
    bottom: FiniteMap

    def commutes(self) -> bool:
        return compose(self.right, self.top) == compose(self.bottom, self.left)


def _require(square: Square) -> None:
    if not square.commutes():
        raise NonCommutingSquare("input square does not commute")


def adjoint_square_fwd(square: Square, f: FiniteMap, k: FiniteMap) -> Square:
    """Transpose a square ``u -> e_{f,k}`` (top ``v``, bottom ``w``) to a square ``∇(u,f) -> k``."""
    _require(square)
    u, v, w = square.left, square.top, square.bottom
    cr = corner(u, f)
    A, B, C, D = f.dom, f.cod, k.dom, k.cod
    SqC = sq(f, k)
    if square.right != e_map(f, k).map:
        raise KernelError("right edge must be e_{f,k}")
    on_i1 = transpose_up(v, B, C)
    on_i2 = transpose_up(compose(SqC.p1, w), A, C)
    top = pushout_induce(cr.apex, cr.i1, cr.i2, on_i1, on_i2)
    bottom = transpose_up(compose(SqC.p2, w), B, D)
    return Square(cr.corner, k, top, bottom)


def adjoint_square_bwd(square: Square, u: FiniteMap, f: FiniteMap) -> Square:
    """Inverse of :func:`adjoint_square_fwd`: a square ``∇(u,f) -> k`` (top ``g``, bottom ``h``) to ``u -> e_{f,k}``."""
    _require(square)
    g, h, k = square.top, square.bottom, square.right
    cr = corner(u, f)
    if square.left != cr.corner:
        raise KernelError("left edge must be ∇(u, f)")
    U, V, A, B = u.dom, u.cod, f.dom, f.cod
    top = transpose_down(compose(g, cr.i1), U, B)
    r_part = transpose_down(compose(g, cr.i2), V, A)
    s_part = transpose_down(h, V, B)
    SqC = sq(f, k).carrier
    bottom = FiniteMap(V, SqC, tuple(zip(r_part.table, s_part.table)))
    return Square(u, e_map(f, k).map, top, bottom)


def squares_between(left: FiniteMap, right: FiniteMap):
    """Every commutative square from ``left`` to ``right`` as a :class:`Square`."""
    S = sq(left, right)
    for r, s in S.carrier.elements:
        yield Square(left, right, FiniteMap._trusted(left.dom, right.dom, r), FiniteMap._trusted(left.cod, right.cod, s))


# ---------------------------------------------------------------------------
# corner associativity

@dataclass(frozen=True, eq=False)
class CornerAssociator:
    left: CornerResult  # ∇(v, ∇(u, f))
    right: CornerResult  # ∇(∇(v, u), f)
    inner_left: CornerResult  # ∇(u, f)
    inner_right: CornerResult  # ∇(v, u)
    bijection: FiniteMap | None  # left.apex -> right.apex
    problems: tuple

    @property
    def ok(self) -> bool:
        return not self.problems


def reassociate(X: FiniteSetObj, V: FiniteSetObj, B: FiniteSetObj) -> FiniteMap:
    """``X×(V×B) -> (X×V)×B``."""
    dom = copower(X, copower(V, B))
    return FiniteMap._trusted(dom, copower(copower(X, V), B), tuple(((x, y), b) for x, (y, b) in dom.elements))


def corner_assoc_bijection(v: FiniteMap, u: FiniteMap, f: FiniteMap) -> CornerAssociator:
    """Build the canonical apex map ``∇(v,∇(u,f)) -> ∇(∇(v,u),f)`` from generators.

    Both apexes are quotients of the three pieces ``W×V×B``, ``X×U×B`` and
    ``X×V×A``; the map is read off on those pieces, then checked to be
    well defined, bijective, and compatible with the two corner maps.
    """
    W, X = v.dom, v.cod
    U, V = u.dom, u.cod
    A, B = f.dom, f.cod
    c1 = corner(u, f)
    L = corner(v, c1.corner)
    cvu = corner(v, u)
    R = corner(cvu.corner, f)
    pairs = []
    for w in W:
        for y in V:
            for b in B:
                pairs.append((L.i1((w, (y, b))), R.i1((cvu.i1((w, y)), b))))
    for x in X:
        for u_ in U:
            for b in B:
                pairs.append((L.i2((x, c1.i1((u_, b)))), R.i1((cvu.i2((x, u_)), b))))
        for y in V:
            for a in A:
                pairs.append((L.i2((x, c1.i2((y, a)))), R.i2(((x, y), a))))
    problems = []
    fwd: dict = {}
    bwd: dict = {}
    for l, r in pairs:
        if fwd.setdefault(l, r) != r:
            problems.append(f"not well defined at {l!r}")
        if bwd.setdefault(r, l) != l:
            problems.append(f"not injective at {r!r}")
    if set(fwd) != set(L.apex.elements):
        problems.append("generators miss part of the left apex")
    if set(bwd) != set(R.apex.elements):
        problems.append("not surjective onto the right apex")
    bij = None
    if not problems:
        bij = FiniteMap.from_dict(L.apex, R.apex, fwd)
        if compose(R.corner, bij) != compose(reassociate(X, V, B), L.corner):
            problems.append("corner maps do not commute with the bijection")
    return CornerAssociator(L, R, c1, cvu, bij, tuple(problems))
