"""Finite 2-categories and the lifting relation whose right class is the surjective equivalences.

Only lifting is decided here.  No colimits of categories are formed, so the
factorization engine never runs on this backend.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .finkernel import (
    FiniteCategory,
    FiniteFunctor,
    FiniteMap,
    KernelError,
    all_maps,
    atom_key,
    compose,
    enumerate_functors,
    functor_compose,
)


class TwoCategoryError(KernelError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteTwoCategory:
    objects: tuple
    one_cells: dict  # name -> (x, y)
    two_cells: dict  # name -> (source 1-cell, target 1-cell)
    id1: dict  # object -> identity 1-cell
    id2: dict  # 1-cell -> identity 2-cell
    vcomp: dict  # (β, α) -> β·α
    hcomp1: dict  # (g, f) -> g∘f
    hcomp2: dict  # (β, α) -> β∗α
    name: str = ""

    def hom(self, x, y) -> FiniteCategory:
        return self._homs[(x, y)]

    @property
    def _homs(self) -> dict:
        cache = self.__dict__.get("_hom_cache")
        if cache is None:
            cache = {}
            for x in self.objects:
                for y in self.objects:
                    objs = tuple(sorted((c for c, t in self.one_cells.items() if t == (x, y)), key=atom_key))
                    objset = set(objs)
                    mors = {a: st for a, st in self.two_cells.items() if st[0] in objset}
                    comp = {(b, a): self.vcomp[(b, a)] for b in mors for a in mors if mors[a][1] == mors[b][0]}
                    cache[(x, y)] = FiniteCategory(objs, mors, {c: self.id2[c] for c in objs}, comp)
            object.__setattr__(self, "_hom_cache", cache)
        return cache

    def src(self, c):
        return self.one_cells[c][0]

    def tgt(self, c):
        return self.one_cells[c][1]

    def after(self, g, f):
        """``g ∘ f`` for 1-cells."""
        return self.hcomp1[(g, f)]

    def whisker_left(self, k, theta):
        """``k ∗ θ``."""
        return self.hcomp2[(self.id2[k], theta)]

    def whisker_right(self, theta, f):
        """``θ ∗ f``."""
        return self.hcomp2[(theta, self.id2[f])]

    def validate(self) -> None:
        for (x, y), H in self._homs.items():
            try:
                H.validate()
            except KernelError as exc:
                raise TwoCategoryError(f"hom({x!r},{y!r}): {exc}") from None
        cells = list(self.one_cells)
        for f in cells:
            x, y = self.one_cells[f]
            if self.hcomp1.get((f, self.id1[x])) != f or self.hcomp1.get((self.id1[y], f)) != f:
                raise TwoCategoryError(f"identity 1-cells are not neutral at {f!r}")
            for g in cells:
                if self.src(g) != y:
                    continue
                gf = self.hcomp1.get((g, f))
                if gf is None or self.one_cells[gf] != (x, self.tgt(g)):
                    raise TwoCategoryError(f"1-cell composite {g!r}∘{f!r} missing or ill-typed")
                for h in cells:
                    if self.src(h) == self.tgt(g) and self.hcomp1[(h, gf)] != self.hcomp1[(self.hcomp1[(h, g)], f)]:
                        raise TwoCategoryError("1-cell composition is not associative")
        twos = list(self.two_cells)
        for a in twos:
            f, f2 = self.two_cells[a]
            x, y = self.one_cells[f]
            if self.hcomp2.get((a, self.id2[self.id1[x]])) != a or self.hcomp2.get((self.id2[self.id1[y]], a)) != a:
                raise TwoCategoryError(f"identity 2-cells are not neutral horizontally at {a!r}")
            for b in twos:
                g, g2 = self.two_cells[b]
                if self.src(g) != y:
                    continue
                ba = self.hcomp2.get((b, a))
                if ba is None or self.two_cells[ba] != (self.hcomp1[(g, f)], self.hcomp1[(g2, f2)]):
                    raise TwoCategoryError(f"horizontal composite {b!r}∗{a!r} missing or ill-typed")
                for c in twos:
                    if self.src(self.two_cells[c][0]) == self.tgt(g):
                        if self.hcomp2[(c, ba)] != self.hcomp2[(self.hcomp2[(c, b)], a)]:
                            raise TwoCategoryError("horizontal composition of 2-cells is not associative")
        for f in cells:
            for g in cells:
                if self.src(g) == self.tgt(f) and self.hcomp2[(self.id2[g], self.id2[f])] != self.id2[self.hcomp1[(g, f)]]:
                    raise TwoCategoryError("horizontal composition does not preserve identities")
        # interchange: (β'·β) ∗ (α'·α) = (β'∗α')·(β∗α)
        for (a2, a1), a21 in self.vcomp.items():
            for (b2, b1), b21 in self.vcomp.items():
                if self.src(self.two_cells[b1][0]) != self.tgt(self.two_cells[a1][0]):
                    continue
                if self.hcomp2[(b21, a21)] != self.vcomp[(self.hcomp2[(b2, a2)], self.hcomp2[(b1, a1)])]:
                    raise TwoCategoryError("interchange law fails")


# ---------------------------------------------------------------------------
# builders

def from_tables(
    objects: Iterable,
    one_cells: dict,
    two_cells: dict,
    id1: dict,
    id2: dict,
    vcomp: dict,
    hcomp1: dict,
    hcomp2: dict,
    name: str = "",
) -> FiniteTwoCategory:
    K = FiniteTwoCategory(tuple(objects), dict(one_cells), dict(two_cells), dict(id1), dict(id2), dict(vcomp), dict(hcomp1), dict(hcomp2), name)
    K.validate()
    return K


def discrete_from_sets(sets: dict, name: str = "discrete") -> FiniteTwoCategory:
    """Objects are the given finite sets, 1-cells all maps between them, 2-cells identities only."""
    objects = tuple(sets)
    one, id1 = {}, {}
    for x in objects:
        for y in objects:
            for m in all_maps(sets[x], sets[y]):
                one[(x, y, m.table)] = (x, y)
        id1[x] = (x, x, sets[x].elements)
    two = {("id", c): (c, c) for c in one}
    id2 = {c: ("id", c) for c in one}
    vcomp = {(("id", c), ("id", c)): ("id", c) for c in one}
    hcomp1 = {}
    for f in one:
        x, y, ft = f
        for g in one:
            if g[0] != y:
                continue
            gm = FiniteMap._trusted(sets[y], sets[g[1]], g[2])
            fm = FiniteMap._trusted(sets[x], sets[y], ft)
            hcomp1[(g, f)] = (x, g[1], compose(gm, fm).table)
    hcomp2 = {(("id", g), ("id", f)): ("id", gf) for (g, f), gf in hcomp1.items()}
    return FiniteTwoCategory(objects, one, two, id1, id2, vcomp, hcomp1, hcomp2, name)


def cell(K: FiniteTwoCategory, x, y, table) -> object:
    """The 1-cell of a discrete-from-sets 2-category with the given table."""
    c = (x, y, tuple(table))
    if c not in K.one_cells:
        raise TwoCategoryError(f"no 1-cell {c!r}")
    return c


def chain_with_twist(n: int = 4, twisted: tuple = (1, 2)) -> FiniteTwoCategory:
    """Objects ``0..n-1``, one 1-cell ``i -> j`` for ``i ≤ j``; only ``hom(twisted)`` has a nontrivial 2-cell.

    The nontrivial 2-cell ``τ`` is an involution; whiskering it into any other
    hom-category yields an identity.
    """
    objects = tuple(range(n))
    one = {("c", i, j): (i, j) for i in objects for j in objects if i <= j}
    id1 = {i: ("c", i, i) for i in objects}
    two = {("id", c): (c, c) for c in one}
    tw = ("c",) + tuple(twisted)
    two["tau"] = (tw, tw)
    id2 = {c: ("id", c) for c in one}
    vcomp = {(("id", c), ("id", c)): ("id", c) for c in one}
    vcomp[("tau", ("id", tw))] = "tau"
    vcomp[(("id", tw), "tau")] = "tau"
    vcomp[("tau", "tau")] = ("id", tw)
    hcomp1 = {(("c", j, k), ("c", i, j)): ("c", i, k) for i in objects for j in objects for k in objects if i <= j <= k}
    hcomp2 = {}
    cells2 = list(two)
    for b in cells2:
        for a in cells2:
            g, f = two[b][0], two[a][0]
            if one[g][0] != one[f][1]:
                continue
            gf = hcomp1[(g, f)]
            taus = (b == "tau") + (a == "tau")
            hcomp2[(b, a)] = "tau" if gf == tw and taus % 2 == 1 else ("id", gf)
    return FiniteTwoCategory(objects, one, two, id1, id2, vcomp, hcomp1, hcomp2, f"chain{n}-twist")


# ---------------------------------------------------------------------------
# square categories and the comparison functor

def sq2(K: FiniteTwoCategory, f, k) -> FiniteCategory:
    A, B = K.one_cells[f]
    C, D = K.one_cells[k]
    HAC, HBD = K.hom(A, C), K.hom(B, D)
    objs = tuple((r, s) for r in HAC.objects for s in HBD.objects if K.after(k, r) == K.after(s, f))
    objset = set(objs)
    mors, ident = {}, {}
    out_ac, out_bd = {}, {}
    for th, (r, r2) in HAC.morphisms.items():
        out_ac.setdefault(r, []).append((th, r2))
    for th2, (s, s2) in HBD.morphisms.items():
        out_bd.setdefault(s, []).append((th2, s2))
    for r, s in objs:
        for th, r2 in out_ac[r]:
            for th2, s2 in out_bd[s]:
                if (r2, s2) in objset and K.whisker_left(k, th) == K.whisker_right(th2, f):
                    mors[(th, th2)] = ((r, s), (r2, s2))
    for r, s in objs:
        ident[(r, s)] = (K.id2[r], K.id2[s])
    comp = {}
    for b, (y, z) in mors.items():
        for a, (x, y2) in mors.items():
            if y2 == y:
                comp[(b, a)] = (K.vcomp[(b[0], a[0])], K.vcomp[(b[1], a[1])])
    return FiniteCategory(objs, mors, ident, comp, "Sq")


def e_functor(K: FiniteTwoCategory, f, k) -> FiniteFunctor:
    A, B = K.one_cells[f]
    C, D = K.one_cells[k]
    H = K.hom(B, C)
    S = sq2(K, f, k)
    omap = {d: (K.after(d, f), K.after(k, d)) for d in H.objects}
    mmap = {phi: (K.whisker_right(phi, f), K.whisker_left(k, phi)) for phi in H.morphisms}
    return FiniteFunctor(H, S, omap, mmap)


@dataclass(frozen=True)
class EquivalenceReport:
    surjective: bool
    full: bool
    faithful: bool
    diagnostics: tuple

    @property
    def ok(self) -> bool:
        return self.surjective and self.full and self.faithful


def surjective_equivalence_check(F: FiniteFunctor) -> EquivalenceReport:
    S, T = F.source, F.target
    diags = []
    hit = {F.ob(x) for x in S.objects}
    missing = [y for y in T.objects if y not in hit]
    surj = not missing
    if missing:
        diags.append(f"not surjective on objects: {missing[0]!r} is missed")
    images: dict = {}
    faithful = True
    for m, (x, y) in S.morphisms.items():
        seen = images.setdefault((x, y), set())
        img = F.mor(m)
        if img in seen and faithful:
            faithful = False
            diags.append(f"not faithful on hom({x!r},{y!r})")
        seen.add(img)
    fibre: dict = {}
    for x in S.objects:
        fibre.setdefault(F.ob(x), []).append(x)
    full = True
    for t, (X, Y) in T.morphisms.items():
        for x in fibre.get(X, ()):
            for y in fibre.get(Y, ()):
                if t not in images.get((x, y), ()) and full:
                    full = False
                    diags.append(f"not full on hom({x!r},{y!r})")
    return EquivalenceReport(surj, full, faithful, tuple(diags))


# ---------------------------------------------------------------------------
# brute-force lifting in Cat against the three generators

def _empty_cat() -> FiniteCategory:
    return FiniteCategory((), {}, {}, {}, "∅")


def point_cat() -> FiniteCategory:
    return FiniteCategory.discrete((0,), "1")


def two_discrete() -> FiniteCategory:
    return FiniteCategory.discrete((0, 1), "2")


def arrow_cat() -> FiniteCategory:
    return FiniteCategory.from_preorder((0, 1), lambda x, y: x <= y, "𝟐")


def parallel_pair() -> FiniteCategory:
    mors = {("id", 0): (0, 0), ("id", 1): (1, 1), "a": (0, 1), "b": (0, 1)}
    comp = {(("id", 0), ("id", 0)): ("id", 0), (("id", 1), ("id", 1)): ("id", 1)}
    for m in ("a", "b"):
        comp[(m, ("id", 0))] = m
        comp[(("id", 1), m)] = m
    return FiniteCategory((0, 1), mors, {0: ("id", 0), 1: ("id", 1)}, comp, "𝟐′")


def cat_generators() -> dict:
    """``u: ∅ -> 1``, ``v: 2 -> 𝟐`` and ``w: 𝟐′ -> 𝟐`` as functors."""
    E, P, D2, A2, PP = _empty_cat(), point_cat(), two_discrete(), arrow_cat(), parallel_pair()
    u = FiniteFunctor(E, P, {}, {})
    v = FiniteFunctor(D2, A2, {0: 0, 1: 1}, {("id", 0): (0, 0), ("id", 1): (1, 1)})
    w = FiniteFunctor(PP, A2, {0: 0, 1: 1}, {("id", 0): (0, 0), ("id", 1): (1, 1), "a": (0, 1), "b": (0, 1)})
    return {"u": u, "v": v, "w": w}


def _fkey(F: FiniteFunctor) -> tuple:
    S = F.source
    return (tuple(F.ob(x) for x in S.objects), tuple(F.mor(m) for m in S.sorted_morphisms))


def cat_lifts(j: FiniteFunctor, p: FiniteFunctor) -> bool:
    """``j □ p`` in Cat by enumerating all squares and all candidate diagonals."""
    diag = set()
    for d in enumerate_functors(j.target, p.source):
        diag.add((_fkey(functor_compose(d, j)), _fkey(functor_compose(p, d))))
    for a in enumerate_functors(j.source, p.source):
        pa = _fkey(functor_compose(p, a))
        ka = _fkey(a)
        for b in enumerate_functors(j.target, p.target):
            if _fkey(functor_compose(b, j)) == pa and (ka, _fkey(b)) not in diag:
                return False
    return True


def cat_rlp_member(p: FiniteFunctor) -> bool:
    return all(cat_lifts(j, p) for j in cat_generators().values())


def category_zoo() -> list[FiniteCategory]:
    """Small categories (≤ 3 objects, ≤ 2 parallel morphisms) used for cross-validation."""
    zoo = [_empty_cat(), point_cat(), two_discrete(), FiniteCategory.discrete((0, 1, 2), "3"), arrow_cat(), parallel_pair()]
    zoo.append(FiniteCategory.from_preorder((0, 1, 2), lambda x, y: x <= y, "chain3"))
    zoo.append(FiniteCategory.from_preorder((0, 1), lambda x, y: True, "iso"))
    zoo.append(FiniteCategory.one_object((0, 1), lambda g, f: (g + f) % 2, 0, 0, "Z/2"))
    zoo.append(FiniteCategory.one_object((0, 1), lambda g, f: g | f, 0, 0, "idem"))
    zoo.append(FiniteCategory.from_preorder((0, 1, 2), lambda x, y: x == y or x == 0, "span"))
    zoo.append(FiniteCategory.from_preorder((0, 1, 2), lambda x, y: x == y or y == 2, "cospan"))
    return zoo


# ---------------------------------------------------------------------------
# the enriched lifting relation

@dataclass(frozen=True)
class F2LiftResult:
    value: bool
    unfolded: bool
    report: EquivalenceReport

    @property
    def consistent(self) -> bool:
        return self.value == self.unfolded


def _unfolded(K: FiniteTwoCategory, f, k) -> bool:
    """Diagonals exist for every square, and 2-cells between squares lift uniquely."""
    A, B = K.one_cells[f]
    C, D = K.one_cells[k]
    H = K.hom(B, C)
    S = sq2(K, f, k)
    for r, s in S.objects:
        if not any(K.after(d, f) == r and K.after(k, d) == s for d in H.objects):
            return False
    for d in H.objects:
        for d2 in H.objects:
            src, dst = (K.after(d, f), K.after(k, d)), (K.after(d2, f), K.after(k, d2))
            for theta, theta2 in S.hom(src, dst):
                sols = [phi for phi in H.hom(d, d2) if K.whisker_right(phi, f) == theta and K.whisker_left(k, phi) == theta2]
                if len(sols) != 1:
                    return False
    return True


def f_lift2(K: FiniteTwoCategory, f, k) -> F2LiftResult:
    rep = surjective_equivalence_check(e_functor(K, f, k))
    return F2LiftResult(rep.ok, _unfolded(K, f, k), rep)
