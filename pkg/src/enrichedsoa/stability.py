"""Property harness for closure of the enriched left class under pushouts, composites and corners.

Each check runs a seeded random tier and an exhaustive tier over all maps
between sets of size at most ``exhaustive_size``.  A counterexample is shrunk
by deleting single elements (largest set first) while it stays a
counterexample, then reported with every map in JSON form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .arrowcalc import corner, e_map
from .finkernel import FiniteMap, FiniteSetObj, atom_key, compose, fin, pushout
from .lifting import (
    EMPTY_TO_POINT,
    FOLD,
    arrow,
    brute_lifts,
    encode_map,
    get_profile,
    lifts,
    llp_f_member,
    maps_up_to,
    random_map,
    structured_right_members,
)

DEFAULT_I_FAMILIES: tuple = (
    (EMPTY_TO_POINT,),
    (FOLD,),
    (EMPTY_TO_POINT, FOLD),
    (arrow(1, 2, (0,)),),
)


@dataclass(frozen=True)
class HarnessConfig:
    max_set_size: int = 3
    num_random_cases: int = 200
    seed: int = 0
    profile: str = "set-weak"
    exhaustive_size: int = 2
    I_families: tuple = DEFAULT_I_FAMILIES

    def __post_init__(self):
        if self.max_set_size < 1:
            raise ValueError("max_set_size must be at least 1")
        if self.num_random_cases < 0 or self.exhaustive_size < 0:
            raise ValueError("case counts must be non-negative")


@dataclass(frozen=True)
class CheckReport:
    check: str
    profile: str
    random_cases: int
    exhaustive_cases: int
    counterexamples: tuple = ()
    skipped: str | None = None
    notes: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "profile": self.profile,
            "random_cases": self.random_cases,
            "exhaustive_cases": self.exhaustive_cases,
            "counterexamples": list(self.counterexamples),
            "skipped": self.skipped,
            "notes": list(self.notes),
            "ok": self.ok,
        }


# ---------------------------------------------------------------------------
# instances and shrinking

@dataclass(frozen=True)
class Instance:
    """Named finite sets and maps between them."""

    sets: tuple  # ((name, elements), ...)
    maps: tuple  # ((name, dom name, cod name, ((x, y), ...)), ...)

    @classmethod
    def build(cls, sets: dict, maps: dict) -> "Instance":
        """``sets``: name -> FiniteSetObj; ``maps``: name -> (dom name, cod name, FiniteMap)."""
        return cls(
            tuple((n, s.elements) for n, s in sets.items()),
            tuple((n, d, c, tuple(zip(m.dom.elements, m.table))) for n, (d, c, m) in maps.items()),
        )

    def realize(self) -> dict:
        sets = {n: FiniteSetObj(els) for n, els in self.sets}
        return {n: FiniteMap.from_dict(sets[d], sets[c], dict(t)) for n, d, c, t in self.maps}

    def size(self) -> int:
        return sum(len(e) for _, e in self.sets)

    def delete(self, set_name, x) -> "Instance":
        doomed = {(set_name, x)}
        changed = True
        while changed:
            changed = False
            for _, d, c, table in self.maps:
                for a, b in table:
                    if (c, b) in doomed and (d, a) not in doomed:
                        doomed.add((d, a))
                        changed = True
        sets = tuple((n, tuple(e for e in els if (n, e) not in doomed)) for n, els in self.sets)
        maps = tuple((n, d, c, tuple((a, b) for a, b in t if (d, a) not in doomed)) for n, d, c, t in self.maps)
        return Instance(sets, maps)

    def to_json(self) -> dict:
        return {n: encode_map(m) for n, m in sorted(self.realize().items())}


def shrink(inst: Instance, still_failing: Callable[[Instance], bool]) -> Instance:
    """Repeatedly delete one element (largest set first) while the failure persists."""
    progress = True
    while progress:
        progress = False
        order = sorted(inst.sets, key=lambda ne: (-len(ne[1]), atom_key(ne[0])))
        for name, els in order:
            for x in els:
                cand = inst.delete(name, x)
                if still_failing(cand):
                    inst = cand
                    progress = True
                    break
            if progress:
                break
    return inst


# ---------------------------------------------------------------------------
# helpers

def _member(f: FiniteMap, I, J) -> bool:
    return llp_f_member(f, I, J)


def _random_member(rng: random.Random, I, J, size: int, dom: FiniteSetObj | None = None, tries: int = 200) -> FiniteMap | None:
    for _ in range(tries):
        if dom is None:
            f = random_map(rng, size)
        else:
            B = fin(rng.randint(0 if not len(dom) else 1, size))
            f = FiniteMap(dom, B, tuple(rng.choice(B.elements) for _ in dom))
        if _member(f, I, J):
            return f
    return None


def _rng(config: HarnessConfig, check: str) -> random.Random:
    return random.Random(f"{config.seed}:{config.profile}:{check}")


def _failing(builder: Callable[[dict], tuple[bool, bool]]) -> Callable[[Instance], bool]:
    def run(inst: Instance) -> bool:
        try:
            premise, conclusion = builder(inst.realize())
        except Exception:
            return False
        return premise and not conclusion

    return run


def _record(counterexamples: list, inst: Instance, builder, label: str) -> None:
    small = shrink(inst, _failing(builder))
    counterexamples.append({"case": label, "instance": small.to_json(), "original_size": inst.size(), "size": small.size()})


# ---------------------------------------------------------------------------
# checks

def check_pushout_stability(config: HarnessConfig) -> CheckReport:
    spec = get_profile(config.profile)
    J = spec.J
    rng = _rng(config, "pushout")
    bad: list = []

    def builder_for(I):
        def b(m):
            f, g = m["f"], m["g"]
            _, _, leg = pushout(f, g)
            return _member(f, I, J), _member(leg, I, J)
        return b

    def run(f, g, I, label):
        b = builder_for(I)
        premise, conclusion = b({"f": f, "g": g})
        if premise and not conclusion:
            inst = Instance.build({"A": f.dom, "B": f.cod, "C": g.cod}, {"f": ("A", "B", f), "g": ("A", "C", g)})
            _record(bad, inst, b, label)

    n = 0
    for i in range(config.num_random_cases):
        I = rng.choice(config.I_families)
        f = _random_member(rng, I, J, config.max_set_size)
        if f is None:
            continue
        C = fin(rng.randint(1 if len(f.dom) else 0, config.max_set_size))
        g = FiniteMap(f.dom, C, tuple(rng.choice(C.elements) for _ in f.dom))
        run(f, g, I, f"random:{i}")
        n += 1
    ex = 0
    small = maps_up_to(config.exhaustive_size)
    for I in config.I_families:
        for f in small:
            if not _member(f, I, J):
                continue
            for g in small:
                if g.dom == f.dom:
                    run(f, g, I, "exhaustive")
                    ex += 1
    return CheckReport("pushout", config.profile, n, ex, tuple(bad))


def check_transfinite_stability(config: HarnessConfig, max_length: int = 4) -> CheckReport:
    spec = get_profile(config.profile)
    J = spec.J
    rng = _rng(config, "transfinite")
    bad: list = []

    def builder_for(I, length):
        def b(m):
            chain = [m[f"f{i}"] for i in range(length)]
            return all(_member(c, I, J) for c in chain), _member(compose(*reversed(chain)), I, J)
        return b

    def run(chain, I, label):
        b = builder_for(I, len(chain))
        premise, conclusion = b({f"f{i}": c for i, c in enumerate(chain)})
        if premise and not conclusion:
            sets = {f"X{i}": c.dom for i, c in enumerate(chain)}
            sets[f"X{len(chain)}"] = chain[-1].cod
            maps = {f"f{i}": (f"X{i}", f"X{i + 1}", c) for i, c in enumerate(chain)}
            _record(bad, Instance.build(sets, maps), b, label)

    n = 0
    for i in range(config.num_random_cases):
        I = rng.choice(config.I_families)
        length = rng.randint(1, max_length)
        first = _random_member(rng, I, J, config.max_set_size)
        if first is None:
            continue
        chain = [first]
        while len(chain) < length:
            nxt = _random_member(rng, I, J, config.max_set_size, dom=chain[-1].cod)
            if nxt is None:
                break
            chain.append(nxt)
        run(chain, I, f"random:{i}")
        n += 1
    ex = 0
    small = maps_up_to(config.exhaustive_size)
    for I in config.I_families:
        members = [f for f in small if _member(f, I, J)]
        for f in members:
            run([f], I, "exhaustive")
            ex += 1
            for g in members:
                if g.dom == f.cod:
                    run([f, g], I, "exhaustive")
                    ex += 1
    return CheckReport("transfinite", config.profile, n, ex, tuple(bad))


def check_corner_stability(config: HarnessConfig) -> CheckReport:
    spec = get_profile(config.profile)
    if spec.l_predicate is None:
        return CheckReport("corner", config.profile, 0, 0, skipped="profile has no decidable left class")
    J, inL = spec.J, spec.l_predicate
    rng = _rng(config, "corner")
    bad: list = []

    def builder_for(I):
        def b(m):
            u, f = m["u"], m["f"]
            return inL(u) and _member(f, I, J), _member(corner(u, f).corner, I, J)
        return b

    def run(u, f, I, label):
        b = builder_for(I)
        premise, conclusion = b({"u": u, "f": f})
        if premise and not conclusion:
            inst = Instance.build(
                {"U": u.dom, "V": u.cod, "A": f.dom, "B": f.cod}, {"u": ("U", "V", u), "f": ("A", "B", f)}
            )
            _record(bad, inst, b, label)

    n = 0
    for i in range(config.num_random_cases):
        I = rng.choice(config.I_families)
        f = _random_member(rng, I, J, config.max_set_size)
        u = None
        for _ in range(200):
            cand = random_map(rng, config.max_set_size)
            if inL(cand):
                u = cand
                break
        if f is None or u is None:
            continue
        run(u, f, I, f"random:{i}")
        n += 1
    ex = 0
    small = maps_up_to(config.exhaustive_size)
    for I in config.I_families:
        fs = [f for f in small if _member(f, I, J)]
        for u in small:
            if not inL(u):
                continue
            for f in fs:
                run(u, f, I, "exhaustive")
                ex += 1
    return CheckReport("corner", config.profile, n, ex, tuple(bad))


def check_lemma_corners(J: Sequence[FiniteMap] | None, config: HarnessConfig) -> CheckReport:
    """Corners of left-class maps stay in the left class, given that corners of generators do."""
    spec = get_profile(config.profile)
    if spec.l_predicate is None or spec.r_predicate is None:
        return CheckReport("lemma-corners", config.profile, 0, 0, skipped="profile lacks l/r predicates")
    J = tuple(J) if J is not None else spec.J
    inL = spec.l_predicate
    right = structured_right_members(J, max_size=2, extra=20, seed=config.seed)
    bad: list = []
    premise_bad = [
        (encode_map(u1), encode_map(u2)) for u1 in J for u2 in J if not inL(corner(u1, u2).corner)
    ]
    if premise_bad:
        return CheckReport(
            "lemma-corners", config.profile, 0, 0,
            counterexamples=tuple({"case": "premise", "pair": list(p)} for p in premise_bad),
            notes=("premise failure: a corner of two generators is outside the left class",),
        )

    def b(m):
        u1, u2 = m["u1"], m["u2"]
        c = corner(u1, u2).corner
        # the conclusion is checked by the predicate and, independently, by lifting against J^□ members
        return inL(u1) and inL(u2), inL(c) and all(lifts(c, k) for k in right)

    def run(u1, u2, label):
        premise, conclusion = b({"u1": u1, "u2": u2})
        if premise and not conclusion:
            inst = Instance.build(
                {"U1": u1.dom, "V1": u1.cod, "U2": u2.dom, "V2": u2.cod},
                {"u1": ("U1", "V1", u1), "u2": ("U2", "V2", u2)},
            )
            _record(bad, inst, b, label)

    rng = _rng(config, "lemma")
    n = 0
    for i in range(config.num_random_cases):
        pair = []
        for _ in range(2):
            for _ in range(200):
                cand = random_map(rng, config.max_set_size)
                if inL(cand):
                    pair.append(cand)
                    break
        if len(pair) < 2:
            continue
        run(pair[0], pair[1], f"random:{i}")
        n += 1
    ex = 0
    small = [m for m in maps_up_to(config.exhaustive_size) if inL(m)]
    for u1 in small:
        for u2 in small:
            run(u1, u2, "exhaustive")
            ex += 1
    return CheckReport("lemma-corners", config.profile, n, ex, tuple(bad), notes=("premise verified",))


def check_adjlift_equivalence(config: HarnessConfig) -> CheckReport:
    """``u □ e_{f,k}`` against ``∇(u,f) □ k`` over every triple of maps up to ``max_set_size``.

    Triples up to size 2 are decided by diagonal search; at larger sizes the
    fibrewise decider is used on both sides.
    """
    method = "brute" if config.max_set_size <= 2 else "fibre"
    decide = brute_lifts if method == "brute" else lifts
    maps = maps_up_to(config.max_set_size)
    bad: list = []
    E = {}
    n = 0
    for f in maps:
        for k in maps:
            E[(f, k)] = e_map(f, k).map
    for u in maps:
        for f in maps:
            c = corner(u, f).corner
            for k in maps:
                n += 1
                if decide(u, E[(f, k)]) != decide(c, k):
                    bad.append({"u": encode_map(u), "f": encode_map(f), "k": encode_map(k)})
    return CheckReport("adjlift", config.profile, 0, n, tuple(bad), notes=(f"decider: {method}",))


ALL_CHECKS = ("pushout", "transfinite", "corner", "lemma-corners", "adjlift")


def run_all(config: HarnessConfig, checks: Sequence[str] = ALL_CHECKS) -> list[CheckReport]:
    out = []
    for name in checks:
        if name == "pushout":
            out.append(check_pushout_stability(config))
        elif name == "transfinite":
            out.append(check_transfinite_stability(config))
        elif name == "corner":
            out.append(check_corner_stability(config))
        elif name == "lemma-corners":
            out.append(check_lemma_corners(None, config))
        elif name == "adjlift":
            out.append(check_adjlift_equivalence(config))
        else:
            raise ValueError(f"unknown check {name!r}")
    return out
