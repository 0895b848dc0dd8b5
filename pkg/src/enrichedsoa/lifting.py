"""Lifting relations between finite maps.

Two deciders are provided for ordinary lifting.  :func:`has_lift` searches every
candidate diagonal for every square and returns the whole witness table.
:func:`lifts` decides the same relation fibre by fibre: a square ``(r, s)`` from
``f: A -> B`` to ``k: C -> D`` splits into independent local problems, one for
each ``b ∈ B``, so the universal statement reduces to conditions on the fibre
sizes of ``f`` and on the injectivity and surjectivity of ``k``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .arrowcalc import corner, e_map, sq
from .finkernel import (
    EMPTY,
    FiniteMap,
    FiniteSetObj,
    KernelError,
    all_maps,
    compose,
    fin,
    hom_set,
    identity,
    pushout,
)


# ---------------------------------------------------------------------------
# ordinary lifting

def _fibre_profile(f: FiniteMap) -> tuple[bool, bool]:
    counts = [0] * len(f.cod)
    for i in f.idx:
        counts[i] += 1
    return any(c == 0 for c in counts), any(c > 1 for c in counts)


def _no_squares(f: FiniteMap, k: FiniteMap, missing: bool) -> bool:
    # some local problem has no data: an unhit b with D empty, or a hit b with C empty
    return (missing and len(k.cod) == 0) or (len(f.dom) > 0 and len(k.dom) == 0)


def lifts(f: FiniteMap, k: FiniteMap) -> bool:
    """``f □ k``: every commutative square from ``f`` to ``k`` has a diagonal."""
    missing, multi = _fibre_profile(f)
    if _no_squares(f, k, missing):
        return True
    return (not missing or k.is_surjective()) and (not multi or k.is_injective())


def lifts_uniquely(f: FiniteMap, k: FiniteMap) -> bool:
    """Every commutative square from ``f`` to ``k`` has exactly one diagonal."""
    missing, multi = _fibre_profile(f)
    if _no_squares(f, k, missing):
        return True
    return (not missing or k.is_bijective()) and (not multi or k.is_injective())


@dataclass(frozen=True)
class LiftWitness:
    r: tuple
    s: tuple
    diagonal: tuple | None
    count: int  # number of diagonals found

    @property
    def solved(self) -> bool:
        return self.diagonal is not None


@dataclass(frozen=True)
class LiftTable:
    f: FiniteMap
    k: FiniteMap
    witnesses: tuple

    @property
    def all_lift(self) -> bool:
        return all(w.solved for w in self.witnesses)

    @property
    def all_unique(self) -> bool:
        return all(w.count == 1 for w in self.witnesses)

    def unsolved(self) -> list[LiftWitness]:
        return [w for w in self.witnesses if not w.solved]


def has_lift(f: FiniteMap, k: FiniteMap) -> LiftTable:
    """Brute-force search of ``hom(B, C)`` for a diagonal of every square.

    The witness is the first diagonal in canonical (lexicographic) order.
    """
    S = sq(f, k)
    H = hom_set(f.cod, k.dom)
    kidx, ktab = k.dom.index, k.table
    fi = f.idx
    # precompute (d∘f, k∘d) for every candidate once
    images = [(tuple(d[i] for i in fi), tuple(ktab[kidx[c]] for c in d)) for d in H.elements]
    out = []
    for r, s in S.carrier.elements:
        first, count = None, 0
        for d, (df, kd) in zip(H.elements, images):
            if df == r and kd == s:
                if first is None:
                    first = d
                count += 1
        out.append(LiftWitness(r, s, first, count))
    return LiftTable(f, k, tuple(out))


def brute_lifts(f: FiniteMap, k: FiniteMap) -> bool:
    return has_lift(f, k).all_lift


# ---------------------------------------------------------------------------
# classes determined by J

def rlp_member(v: FiniteMap, J: Sequence[FiniteMap], method: str = "fibre") -> bool:
    """``v ∈ J^□``.  ``method`` is ``"fibre"`` (closed form) or ``"brute"`` (diagonal search)."""
    decide = lifts if method == "fibre" else brute_lifts
    return all(decide(j, v) for j in J)


def f_lift(f: FiniteMap, k: FiniteMap, J: Sequence[FiniteMap], method: str = "fibre") -> bool:
    """The enriched relation: ``e_{f,k} ∈ J^□``."""
    return rlp_member(e_map(f, k).map, J, method)


def llp_f_member(f: FiniteMap, I: Sequence[FiniteMap], J: Sequence[FiniteMap]) -> bool:
    return all(f_lift(f, k, J) for k in I)


def rlp_f_member(k: FiniteMap, I: Sequence[FiniteMap], J: Sequence[FiniteMap]) -> bool:
    return all(f_lift(g, k, J) for g in I)


# ---------------------------------------------------------------------------
# profiles

def arrow(n: int, m: int, table: Iterable[int]) -> FiniteMap:
    """The map ``{0..n-1} -> {0..m-1}`` with the given images."""
    return FiniteMap(fin(n), fin(m), tuple(table))


EMPTY_TO_POINT = arrow(0, 1, ())
FOLD = arrow(2, 1, (0, 0))


@dataclass(frozen=True)
class WfsSpec:
    name: str
    J: tuple
    r_predicate: Callable[[FiniteMap], bool] | None = None
    l_predicate: Callable[[FiniteMap], bool] | None = None


PROFILES: dict[str, WfsSpec] = {
    "set-weak": WfsSpec(
        "set-weak",
        (EMPTY_TO_POINT,),
        r_predicate=FiniteMap.is_surjective,
        l_predicate=FiniteMap.is_injective,
    ),
    "set-ortho": WfsSpec(
        "set-ortho",
        (EMPTY_TO_POINT, FOLD),
        r_predicate=FiniteMap.is_bijective,
        l_predicate=lambda f: True,
    ),
}


def get_profile(name: str) -> WfsSpec:
    try:
        return PROFILES[name]
    except KeyError:
        raise KernelError(f"unknown profile {name!r}; known: {sorted(PROFILES)}") from None


def maps_up_to(max_size: int) -> list[FiniteMap]:
    """All maps between the sets ``fin(0) .. fin(max_size)``."""
    sets = [fin(n) for n in range(max_size + 1)]
    return [m for A in sets for B in sets for m in all_maps(A, B)]


def random_map(rng: random.Random, max_size: int, min_size: int = 0) -> FiniteMap:
    A = fin(rng.randint(min_size, max_size))
    B = fin(rng.randint(min_size, max_size))
    if len(A) and not len(B):
        B = fin(rng.randint(max(1, min_size), max(1, max_size)))
    return FiniteMap(A, B, tuple(rng.choice(B.elements) for _ in A))


def structured_right_members(J: Sequence[FiniteMap], max_size: int = 2, extra: int = 40, seed: int = 0) -> list[FiniteMap]:
    """Members of ``J^□``: all of them up to ``max_size`` plus a seeded sample of larger ones."""
    out = [k for k in maps_up_to(max_size) if rlp_member(k, J)]
    rng = random.Random(seed)
    tries = 0
    while extra > 0 and tries < 50 * extra:
        tries += 1
        k = random_map(rng, max_size + 2)
        if rlp_member(k, J):
            out.append(k)
            extra -= 1
    return out


# ---------------------------------------------------------------------------
# certificates

class CertificateError(KernelError):
    pass


@dataclass(frozen=True)
class Generator:
    map: FiniteMap
    role: str = "J"


@dataclass(frozen=True)
class Identity:
    obj: FiniteSetObj


@dataclass(frozen=True)
class Pushout:
    cert: object
    attach: FiniteMap  # dom = dom of the replayed map


@dataclass(frozen=True)
class Composite:
    parts: tuple  # applied first to last


@dataclass(frozen=True)
class Corner:
    left: object
    right: object


CellCertificate = Generator | Identity | Pushout | Composite | Corner


def replay_certificate(c) -> FiniteMap:
    if isinstance(c, Generator):
        return c.map
    if isinstance(c, Identity):
        return identity(c.obj)
    if isinstance(c, Pushout):
        j = replay_certificate(c.cert)
        if c.attach.dom != j.dom:
            raise CertificateError("attaching map does not start at the domain of the cell")
        _, leg, _ = pushout(c.attach, j)
        return leg
    if isinstance(c, Composite):
        if not c.parts:
            raise CertificateError("empty composite; use an Identity node")
        maps = [replay_certificate(p) for p in c.parts]
        try:
            return compose(*reversed(maps))
        except KernelError as exc:
            raise CertificateError(f"composite is ill-typed: {exc}") from None
    if isinstance(c, Corner):
        return corner(replay_certificate(c.left), replay_certificate(c.right)).corner
    raise CertificateError(f"unknown certificate node {type(c).__name__}")


def corner_premise(spec: WfsSpec, sample: Sequence[FiniteMap] | None = None) -> bool:
    """Every corner of two generators lies in the left class."""
    for u1 in spec.J:
        for u2 in spec.J:
            c = corner(u1, u2).corner
            if spec.l_predicate is not None:
                if not spec.l_predicate(c):
                    return False
            else:
                ks = sample if sample is not None else structured_right_members(spec.J)
                if not all(lifts(c, k) for k in ks):
                    return False
    return True


def _has_corner(c) -> bool:
    if isinstance(c, Corner):
        return True
    if isinstance(c, Pushout):
        return _has_corner(c.cert)
    if isinstance(c, Composite):
        return any(_has_corner(p) for p in c.parts)
    return False


def _generators(c) -> list:
    if isinstance(c, Generator):
        return [c]
    if isinstance(c, Pushout):
        return _generators(c.cert)
    if isinstance(c, Composite):
        return [g for p in c.parts for g in _generators(p)]
    if isinstance(c, Corner):
        return _generators(c.left) + _generators(c.right)
    return []


def certificate_soundness_check(c, spec: WfsSpec | Sequence[FiniteMap], seed: int = 0) -> bool:
    """Replay ``c`` and test the result against members of ``J^□``.

    Raises :class:`CertificateError` if a Corner node is used while the
    generator-corner premise fails for ``J``.
    """
    if not isinstance(spec, WfsSpec):
        spec = WfsSpec("inline", tuple(spec))
    J = list(spec.J)
    for g in _generators(c):
        if g.map not in J:
            raise CertificateError(f"generator {g.map!r} is not in J")
    sample = structured_right_members(J, seed=seed)
    if _has_corner(c) and not corner_premise(spec, sample):
        raise CertificateError("corner premise fails for this J")
    m = replay_certificate(c)
    if not all(lifts(m, k) for k in sample):
        return False
    if spec.l_predicate is not None and not spec.l_predicate(m):
        return False
    return True


def injection_certificate(i: FiniteMap) -> object:
    """A cell structure for an injection: attach one ``∅ -> 1`` per missing point."""
    if not i.is_injective():
        raise CertificateError("only injections are relative cell complexes for ∅ -> 1")
    image = set(i.table)
    parts: list = []
    current = i.dom
    for b in i.cod:
        if b in image:
            continue
        parts.append(Pushout(Generator(EMPTY_TO_POINT), FiniteMap(EMPTY, current, ())))
        current = replay_certificate(parts[-1]).cod
    if not parts:
        return Identity(i.dom)
    return Composite(tuple(parts))


# ---------------------------------------------------------------------------
# JSON codec for certificates

def encode_atom(x):
    if isinstance(x, tuple):
        return [encode_atom(y) for y in x]
    return x


def decode_atom(x):
    if isinstance(x, list):
        return tuple(decode_atom(y) for y in x)
    return x


def encode_set(A: FiniteSetObj) -> list:
    return [encode_atom(x) for x in A]


def decode_set(xs: list) -> FiniteSetObj:
    return FiniteSetObj.of(decode_atom(x) for x in xs)


def encode_map(f: FiniteMap) -> dict:
    return {"dom": encode_set(f.dom), "cod": encode_set(f.cod), "table": [encode_atom(y) for y in f.table]}


def decode_map(d: dict) -> FiniteMap:
    return FiniteMap(decode_set(d["dom"]), decode_set(d["cod"]), tuple(decode_atom(y) for y in d["table"]))


def encode_certificate(c) -> dict:
    if isinstance(c, Generator):
        return {"node": "generator", "role": c.role, "map": encode_map(c.map)}
    if isinstance(c, Identity):
        return {"node": "identity", "object": encode_set(c.obj)}
    if isinstance(c, Pushout):
        return {"node": "pushout", "cell": encode_certificate(c.cert), "attach": encode_map(c.attach)}
    if isinstance(c, Composite):
        return {"node": "composite", "parts": [encode_certificate(p) for p in c.parts]}
    if isinstance(c, Corner):
        return {"node": "corner", "left": encode_certificate(c.left), "right": encode_certificate(c.right)}
    raise CertificateError(f"cannot encode {type(c).__name__}")


def decode_certificate(d: dict):
    kind = d.get("node")
    if kind == "generator":
        return Generator(decode_map(d["map"]), d.get("role", "J"))
    if kind == "identity":
        return Identity(decode_set(d["object"]))
    if kind == "pushout":
        return Pushout(decode_certificate(d["cell"]), decode_map(d["attach"]))
    if kind == "composite":
        return Composite(tuple(decode_certificate(p) for p in d["parts"]))
    if kind == "corner":
        return Corner(decode_certificate(d["left"]), decode_certificate(d["right"]))
    raise CertificateError(f"unknown certificate node {kind!r}")
