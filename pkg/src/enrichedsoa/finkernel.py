"""Finite sets, maps, categories and the handful of (co)limits the engine uses.

Atoms are strings, integers, or nested tuples of those.  Every finite set keeps
its elements in one canonical order (see :func:`atom_key`), so two sets with the
same elements compare equal and every derived object is deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Atom = Hashable


class KernelError(ValueError):
    """Raised on malformed finite data (non-total maps, mismatched domains, ...)."""


class DomainMismatch(KernelError):
    pass


@lru_cache(maxsize=1 << 18)
def _key(x):
    if isinstance(x, tuple):
        return (2, tuple(_key(y) for y in x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    raise TypeError(f"unsupported atom {x!r} ({type(x).__name__})")


def atom_key(x: Atom):
    """Sort key giving the canonical order on atoms: ints < strings < tuples."""
    if isinstance(x, bool):
        raise TypeError("booleans are not atoms")
    return _key(x)


@dataclass(frozen=True, eq=False)
class FiniteSetObj:
    elements: tuple

    def __post_init__(self):
        elems = tuple(self.elements)
        ordered = tuple(sorted(set(elems), key=atom_key))
        if len(ordered) != len(elems):
            raise KernelError("duplicate atoms in finite set")
        object.__setattr__(self, "elements", ordered)

    @classmethod
    def of(cls, items: Iterable[Atom]) -> "FiniteSetObj":
        return cls(tuple(dict.fromkeys(items)))

    @classmethod
    def _sorted(cls, items: tuple) -> "FiniteSetObj":
        # caller guarantees canonical order and distinctness
        obj = object.__new__(cls)
        object.__setattr__(obj, "elements", items)
        return obj

    @cached_property
    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.elements)}

    @cached_property
    def _hash(self) -> int:
        return hash(self.elements)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteSetObj):
            return NotImplemented
        return self._hash == other._hash and self.elements == other.elements

    def __len__(self):
        return len(self.elements)

    def __iter__(self) -> Iterator:
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    def __repr__(self):
        return "{" + ", ".join(map(repr, self.elements)) + "}"


EMPTY = FiniteSetObj(())
POINT = FiniteSetObj(("*",))


def fin(n: int) -> FiniteSetObj:
    """The set {0, ..., n-1}."""
    return FiniteSetObj._sorted(tuple(range(n)))


@dataclass(frozen=True, eq=False)
class FiniteMap:
    """A total function ``dom -> cod`` stored as the tuple of images in ``dom`` order."""

    dom: FiniteSetObj
    cod: FiniteSetObj
    table: tuple

    def __post_init__(self):
        table = tuple(self.table)
        if len(table) != len(self.dom):
            raise KernelError(f"map table has {len(table)} entries for a domain of size {len(self.dom)}")
        index = self.cod.index
        for y in table:
            if y not in index:
                raise KernelError(f"image {y!r} is not in the codomain")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_dict(cls, dom: FiniteSetObj, cod: FiniteSetObj, assignment: Mapping) -> "FiniteMap":
        missing = [x for x in dom if x not in assignment]
        if missing:
            raise KernelError(f"map is not total: no image for {missing[0]!r}")
        return cls(dom, cod, tuple(assignment[x] for x in dom))

    @classmethod
    def from_function(cls, dom: FiniteSetObj, cod: FiniteSetObj, fn: Callable) -> "FiniteMap":
        return cls(dom, cod, tuple(fn(x) for x in dom))

    @classmethod
    def identity(cls, A: FiniteSetObj) -> "FiniteMap":
        return cls._trusted(A, A, A.elements)

    @classmethod
    def _trusted(cls, dom, cod, table) -> "FiniteMap":
        m = object.__new__(cls)
        object.__setattr__(m, "dom", dom)
        object.__setattr__(m, "cod", cod)
        object.__setattr__(m, "table", table)
        return m

    @cached_property
    def _hash(self) -> int:
        return hash((self.dom, self.cod, self.table))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteMap):
            return NotImplemented
        return self.table == other.table and self.dom == other.dom and self.cod == other.cod

    def __call__(self, x):
        return self.table[self.dom.index[x]]

    @cached_property
    def idx(self) -> tuple:
        """Images as codomain positions."""
        index = self.cod.index
        return tuple(index[y] for y in self.table)

    def as_dict(self) -> dict:
        return dict(zip(self.dom.elements, self.table))

    def then(self, g: "FiniteMap") -> "FiniteMap":
        """``g ∘ self``."""
        return compose(g, self)

    def image(self) -> FiniteSetObj:
        return FiniteSetObj.of(self.table)

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == len(self.cod)

    def is_bijective(self) -> bool:
        return len(self.dom) == len(self.cod) and self.is_injective()

    def inverse(self) -> "FiniteMap":
        if not self.is_bijective():
            raise KernelError("only bijections have inverses")
        back = {y: x for x, y in zip(self.dom.elements, self.table)}
        return FiniteMap._trusted(self.cod, self.dom, tuple(back[y] for y in self.cod))

    def fibres(self) -> dict:
        out = {y: [] for y in self.cod}
        for x, y in zip(self.dom.elements, self.table):
            out[y].append(x)
        return out

    def __repr__(self):
        pairs = ", ".join(f"{x!r}↦{y!r}" for x, y in zip(self.dom, self.table))
        return f"FiniteMap({pairs} : {len(self.dom)}→{len(self.cod)})"


def compose(*maps: FiniteMap) -> FiniteMap:
    """Right-to-left composite: ``compose(g, f) = g ∘ f``."""
    if not maps:
        raise KernelError("compose needs at least one map")
    result = maps[-1]
    for g in reversed(maps[:-1]):
        if g.dom != result.cod:
            raise DomainMismatch("maps are not composable")
        gi = g.dom.index
        gt = g.table
        result = FiniteMap._trusted(result.dom, g.cod, tuple(gt[gi[y]] for y in result.table))
    return result


def identity(A: FiniteSetObj) -> FiniteMap:
    return FiniteMap.identity(A)


def element_to_map(element: tuple, A: FiniteSetObj, B: FiniteSetObj) -> FiniteMap:
    """Read an element of ``hom_set(A, B)`` back as a map."""
    return FiniteMap(A, B, element)


def map_to_element(f: FiniteMap) -> tuple:
    return f.table


def hom_set(A: FiniteSetObj, B: FiniteSetObj) -> FiniteSetObj:
    """All total maps ``A -> B``, each encoded as its image tuple, in canonical order."""
    # product over a sorted codomain enumerates tuples in lexicographic key order
    return FiniteSetObj._sorted(tuple(itertools.product(B.elements, repeat=len(A))))


def all_maps(A: FiniteSetObj, B: FiniteSetObj) -> Iterator[FiniteMap]:
    for t in itertools.product(B.elements, repeat=len(A)):
        yield FiniteMap._trusted(A, B, t)


class UnionFind:
    """Disjoint sets whose class representative is the least member under :func:`atom_key`."""

    def __init__(self, items: Iterable = ()):
        self.parent: dict = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        if atom_key(ry) < atom_key(rx):
            rx, ry = ry, rx
        self.parent[ry] = rx
        return rx

    def classes(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def _tag_b(b):
    return (0, b)


def _tag_c(c):
    return (1, c)


def pushout(f: FiniteMap, g: FiniteMap):
    """Pushout of the span ``B <-f- A -g-> C``.

    Returns ``(P, inB, inC)``; ``P`` is the quotient of the tagged coproduct
    ``{(0, b)} ∪ {(1, c)}`` by the equivalence generated by ``(0, f(a)) ~ (1, g(a))``.
    """
    if f.dom != g.dom:
        raise DomainMismatch("pushout needs a span with a common domain")
    B, C = f.cod, g.cod
    uf = UnionFind(_tag_b(b) for b in B)
    for c in C:
        uf.add(_tag_c(c))
    for fb, gc in zip(f.table, g.table):
        uf.union(_tag_b(fb), _tag_c(gc))
    P = FiniteSetObj(tuple(uf.classes()))
    inB = FiniteMap._trusted(B, P, tuple(uf.find(_tag_b(b)) for b in B))
    inC = FiniteMap._trusted(C, P, tuple(uf.find(_tag_c(c)) for c in C))
    return P, inB, inC


def pushout_induce(P: FiniteSetObj, inB: FiniteMap, inC: FiniteMap, x: FiniteMap, y: FiniteMap) -> FiniteMap:
    """The mediating map ``P -> T`` for a cocone ``x: B -> T``, ``y: C -> T``.

    Raises :class:`KernelError` when the cocone does not factor (that is, when it
    is not a cocone over the span the pushout was built from).
    """
    if x.cod != y.cod or x.dom != inB.dom or y.dom != inC.dom:
        raise DomainMismatch("cocone legs do not match the pushout")
    value: dict = {}
    for leg, inj in ((x, inB), (y, inC)):
        for p, t in zip(inj.table, leg.table):
            if value.setdefault(p, t) != t:
                raise KernelError("cocone does not factor through the pushout")
    missing = [p for p in P if p not in value]
    if missing:
        raise KernelError("pushout injections are not jointly surjective")
    return FiniteMap._trusted(P, x.cod, tuple(value[p] for p in P))


def pullback(f: FiniteMap, g: FiniteMap):
    """Pullback of the cospan ``B -f-> D <-g- C`` as the set of pairs ``(b, c)`` with ``f(b) = g(c)``."""
    if f.cod != g.cod:
        raise DomainMismatch("pullback needs a cospan with a common codomain")
    over: dict = {}
    for c, d in zip(g.dom.elements, g.table):
        over.setdefault(d, []).append(c)
    pairs = [(b, c) for b, d in zip(f.dom.elements, f.table) for c in over.get(d, ())]
    P = FiniteSetObj(tuple(pairs))
    p1 = FiniteMap._trusted(P, f.dom, tuple(b for b, _ in P))
    p2 = FiniteMap._trusted(P, g.dom, tuple(c for _, c in P))
    return P, p1, p2


def coequalizer(f: FiniteMap, g: FiniteMap):
    """Quotient ``q: B -> Q`` by the equivalence generated by ``f(a) ~ g(a)``."""
    if f.dom != g.dom or f.cod != g.cod:
        raise DomainMismatch("coequalizer needs a parallel pair")
    uf = UnionFind(f.cod)
    for x, y in zip(f.table, g.table):
        uf.union(x, y)
    Q = FiniteSetObj(tuple(uf.classes()))
    return Q, FiniteMap._trusted(f.cod, Q, tuple(uf.find(b) for b in f.cod))


def chain_colimit(maps: Sequence[FiniteMap]):
    """Colimit of a finite chain ``X0 -> X1 -> ... -> Xn``.

    The colimit object is ``Xn``; the returned injections are the composites
    ``Xi -> Xn`` for ``i = 0..n`` (the last one is the identity).
    """
    if not maps:
        raise KernelError("chain_colimit needs a non-empty chain")
    for a, b in zip(maps, maps[1:]):
        if a.cod != b.dom:
            raise DomainMismatch("chain is not composable")
    final = maps[-1].cod
    injections = [identity(final)]
    for m in reversed(maps):
        injections.append(compose(injections[-1], m))
    injections.reverse()
    return final, injections


def coproduct(A: FiniteSetObj, B: FiniteSetObj):
    S = FiniteSetObj(tuple(_tag_b(a) for a in A) + tuple(_tag_c(b) for b in B))
    return S, FiniteMap._trusted(A, S, tuple(_tag_b(a) for a in A)), FiniteMap._trusted(B, S, tuple(_tag_c(b) for b in B))


# ---------------------------------------------------------------------------
# universal-property verification (test mode; exponential in the set sizes)

def _test_objects(max_size: int):
    return [FiniteSetObj(tuple(f"t{i}" for i in range(n))) for n in range(max_size + 1)]


def verify_pushout(f: FiniteMap, g: FiniteMap, P, inB, inC, max_size: int = 2) -> bool:
    """Exhaustively check the pushout universal property against test sets of size ≤ ``max_size``."""
    if compose(inB, f) != compose(inC, g):
        return False
    for T in _test_objects(max_size):
        for x in all_maps(f.cod, T):
            xf = compose(x, f).table
            for y in all_maps(g.cod, T):
                if compose(y, g).table != xf:
                    continue
                mediators = [m for m in all_maps(P, T) if compose(m, inB) == x and compose(m, inC) == y]
                if len(mediators) != 1:
                    return False
    return True


def verify_pullback(f: FiniteMap, g: FiniteMap, P, p1, p2, max_size: int = 2) -> bool:
    if compose(f, p1) != compose(g, p2):
        return False
    for T in _test_objects(max_size):
        for x in all_maps(T, f.dom):
            fx = compose(f, x).table
            for y in all_maps(T, g.dom):
                if compose(g, y).table != fx:
                    continue
                mediators = [m for m in all_maps(T, P) if compose(p1, m) == x and compose(p2, m) == y]
                if len(mediators) != 1:
                    return False
    return True


def verify_coequalizer(f: FiniteMap, g: FiniteMap, Q, q, max_size: int = 2) -> bool:
    if compose(q, f) != compose(q, g):
        return False
    for T in _test_objects(max_size):
        for x in all_maps(f.cod, T):
            if compose(x, f) != compose(x, g):
                continue
            mediators = [m for m in all_maps(Q, T) if compose(m, q) == x]
            if len(mediators) != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# finite categories and functors

@dataclass(frozen=True, eq=False)
class FiniteCategory:
    """A finite category given by explicit tables.

    ``morphisms`` maps each morphism name to ``(dom, cod)``; ``comp`` maps
    ``(g, f)`` to ``g ∘ f`` for every composable pair.
    """

    objects: tuple
    morphisms: Mapping[Any, tuple]
    ident: Mapping[Any, Any]
    comp: Mapping[tuple, Any]
    name: str = ""

    @cached_property
    def _homs(self) -> dict:
        homs: dict = {}
        for m, xy in self.morphisms.items():
            homs.setdefault(xy, []).append(m)
        return {k: tuple(sorted(v, key=atom_key)) for k, v in homs.items()}

    def hom(self, x, y) -> tuple:
        return self._homs.get((x, y), ())

    def dom(self, m):
        return self.morphisms[m][0]

    def cod(self, m):
        return self.morphisms[m][1]

    def compose(self, g, f):
        return self.comp[(g, f)]

    @cached_property
    def sorted_morphisms(self) -> tuple:
        return tuple(sorted(self.morphisms, key=atom_key))

    def validate(self) -> None:
        objs = set(self.objects)
        for m, (x, y) in self.morphisms.items():
            if x not in objs or y not in objs:
                raise KernelError(f"morphism {m!r} has an unknown endpoint")
        for x in self.objects:
            i = self.ident.get(x)
            if i is None or self.morphisms.get(i) != (x, x):
                raise KernelError(f"object {x!r} lacks an identity")
        for g in self.morphisms:
            for f in self.morphisms:
                if self.cod(f) != self.dom(g):
                    continue
                h = self.comp.get((g, f))
                if h is None:
                    raise KernelError(f"composite {g!r}∘{f!r} is missing")
                if self.morphisms.get(h) != (self.dom(f), self.cod(g)):
                    raise KernelError(f"composite {g!r}∘{f!r} has the wrong type")
        for f in self.morphisms:
            if self.comp[(self.ident[self.cod(f)], f)] != f or self.comp[(f, self.ident[self.dom(f)])] != f:
                raise KernelError(f"identity law fails at {f!r}")
        for h in self.morphisms:
            for g in self.hom_into(self.dom(h)):
                for f in self.hom_into(self.dom(g)):
                    if self.comp[(self.comp[(h, g)], f)] != self.comp[(h, self.comp[(g, f)])]:
                        raise KernelError(f"composition is not associative at {h!r},{g!r},{f!r}")

    def hom_into(self, y) -> list:
        return [m for m, (_, c) in self.morphisms.items() if c == y]

    @classmethod
    def discrete(cls, objects: Iterable, name: str = "") -> "FiniteCategory":
        objects = tuple(objects)
        mors = {("id", x): (x, x) for x in objects}
        return cls(objects, mors, {x: ("id", x) for x in objects}, {(("id", x), ("id", x)): ("id", x) for x in objects}, name)

    @classmethod
    def from_preorder(cls, objects: Sequence, leq: Callable[[Any, Any], bool], name: str = "") -> "FiniteCategory":
        """The thin category of a preorder; the morphism ``x -> y`` is named ``(x, y)``."""
        objects = tuple(objects)
        mors = {(x, y): (x, y) for x in objects for y in objects if leq(x, y)}
        comp = {((y, z), (x, y)): (x, z) for (x, y) in mors for (y2, z) in mors if y2 == y}
        return cls(objects, mors, {x: (x, x) for x in objects}, comp, name)

    @classmethod
    def one_object(cls, elements: Sequence, mult: Callable, unit, obj="*", name: str = "") -> "FiniteCategory":
        """A monoid as a one-object category; ``mult(g, f)`` is ``g ∘ f``."""
        mors = {e: (obj, obj) for e in elements}
        comp = {(g, f): mult(g, f) for g in elements for f in elements}
        return cls((obj,), mors, {obj: unit}, comp, name)


@dataclass(frozen=True, eq=False)
class FiniteFunctor:
    """A functor out of a finite category.

    With ``target=None`` the functor lands in finite sets: ``obj_map`` sends
    objects to :class:`FiniteSetObj` and ``mor_map`` sends morphisms to
    :class:`FiniteMap`.
    """

    source: FiniteCategory
    target: FiniteCategory | None
    obj_map: Mapping
    mor_map: Mapping

    def ob(self, x):
        return self.obj_map[x]

    def mor(self, m):
        return self.mor_map[m]

    @property
    def set_valued(self) -> bool:
        return self.target is None

    def validate(self) -> None:
        S = self.source
        for x in S.objects:
            if x not in self.obj_map:
                raise KernelError(f"functor has no image for object {x!r}")
        for m, (x, y) in S.morphisms.items():
            if m not in self.mor_map:
                raise KernelError(f"functor has no image for morphism {m!r}")
            if self.set_valued:
                fm = self.mor_map[m]
                if fm.dom != self.obj_map[x] or fm.cod != self.obj_map[y]:
                    raise KernelError(f"image of {m!r} has the wrong type")
            else:
                if self.target.morphisms[self.mor_map[m]] != (self.obj_map[x], self.obj_map[y]):
                    raise KernelError(f"image of {m!r} has the wrong type")
        for x in S.objects:
            img = self.mor_map[S.ident[x]]
            expected = identity(self.obj_map[x]) if self.set_valued else self.target.ident[self.obj_map[x]]
            if img != expected:
                raise KernelError(f"identity at {x!r} is not preserved")
        for (g, f), h in S.comp.items():
            if self.set_valued:
                ok = compose(self.mor_map[g], self.mor_map[f]) == self.mor_map[h]
            else:
                ok = self.target.comp[(self.mor_map[g], self.mor_map[f])] == self.mor_map[h]
            if not ok:
                raise KernelError(f"composition {g!r}∘{f!r} is not preserved")


def functor_compose(G: FiniteFunctor, F: FiniteFunctor) -> FiniteFunctor:
    """``G ∘ F`` for functors between finite categories."""
    if F.target is None or F.target is not G.source and F.target.objects != G.source.objects:
        raise DomainMismatch("functors are not composable")
    return FiniteFunctor(
        F.source,
        G.target,
        {x: G.obj_map[F.obj_map[x]] for x in F.source.objects},
        {m: G.mor_map[F.mor_map[m]] for m in F.source.morphisms},
    )


def functors_equal(F: FiniteFunctor, G: FiniteFunctor) -> bool:
    return dict(F.obj_map) == dict(G.obj_map) and dict(F.mor_map) == dict(G.mor_map)


def enumerate_functors(S: FiniteCategory, T: FiniteCategory) -> list[FiniteFunctor]:
    """Every functor ``S -> T``, found by backtracking over the morphisms of ``S``."""
    objs = S.objects
    nonid = [m for m in S.sorted_morphisms if m not in set(S.ident.values())]
    out = []
    for images in itertools.product(T.objects, repeat=len(objs)):
        omap = dict(zip(objs, images))
        choices = [T.hom(omap[S.dom(m)], omap[S.cod(m)]) for m in nonid]
        if any(not c for c in choices):
            continue
        for pick in itertools.product(*choices):
            mmap = dict(zip(nonid, pick))
            for x in objs:
                mmap[S.ident[x]] = T.ident[omap[x]]
            if all(T.comp[(mmap[g], mmap[f])] == mmap[h] for (g, f), h in S.comp.items()):
                out.append(FiniteFunctor(S, T, omap, mmap))
    return out
