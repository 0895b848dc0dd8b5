"""Staged factorization ``f = m∘e`` by attaching cells along corner maps.

Stage ``α`` schedules the generator ``u = J[α mod |J|]``, lists every triple
``(g, v, w)`` that solves the outer square of ``u`` against ``e_{g,φ_α}``, and
attaches one cell per triple.  A cell is a pushout of ``∇(u, g)`` along the map
out of the corner apex obtained by transposing ``v`` and ``w``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .arrowcalc import corner, e_map, transpose_up
from .finkernel import (
    FiniteMap,
    FiniteSetObj,
    KernelError,
    all_maps,
    compose,
    fin,
    hom_set,
    identity,
    pushout,
    pushout_induce,
)
from .lifting import (
    Composite,
    Corner,
    Generator,
    Identity,
    Pushout,
    f_lift,
    replay_certificate,
    rlp_f_member,
    rlp_member,
)


class SoaError(KernelError):
    pass


@dataclass(frozen=True)
class SoaConfig:
    stage_cap: int = 8
    inner_cap: int = 512  # atoms nest one level per cell; keeps canonical sorting within recursion limits
    check_before_stage: bool = True
    skip_solved: bool = False

    def __post_init__(self):
        if self.stage_cap < 1 or self.inner_cap < 1:
            raise SoaError("stage_cap and inner_cap must be at least 1")


def mod_schedule(alpha: int, J_size: int) -> int:
    if J_size < 1:
        raise SoaError("the generating set must be nonempty")
    return alpha % J_size


@dataclass(frozen=True)
class Triple:
    g_index: int
    g: FiniteMap
    v: FiniteMap  # V -> Sq(g, φ_α)
    w: FiniteMap  # U -> hom(cod g, D_α)

    def sort_key(self):
        return (self.g_index, self.v.table, self.w.table)


def _diagonal_exists(u: FiniteMap, e: FiniteMap, v: FiniteMap, w: FiniteMap) -> bool:
    # a diagonal d: V -> hom(B, D) needs d∘u = w and e∘d = v; decide point by point over V
    over: dict = {}
    for x, y in zip(u.dom.elements, u.table):
        over.setdefault(y, set()).add(w(x))
    hit = set(e.table)
    for y in u.cod:
        ws = over.get(y)
        if ws is None:
            if v(y) not in hit:
                return False
        elif len(ws) > 1:
            return False
    return True


def enumerate_triples(I: Sequence[FiniteMap], phi: FiniteMap, u: FiniteMap, skip_solved: bool = False) -> list[Triple]:
    """All ``(g, v, w)`` with ``e_{g,φ}∘w = v∘u``, in lexicographic order of ``(g index, v, w)``."""
    U, V = u.dom, u.cod
    out = []
    for gi, g in enumerate(I):
        e = e_map(g, phi).map
        S, H = e.cod, e.dom
        pre = e.fibres()
        for vt in itertools.product(S.elements, repeat=len(V)):
            v = FiniteMap._trusted(V, S, vt)
            choices = [pre[v(y)] for y in u.table]
            for wt in itertools.product(*choices):
                w = FiniteMap._trusted(U, H, wt)
                if skip_solved and _diagonal_exists(u, e, v, w):
                    continue
                out.append(Triple(gi, g, v, w))
    return out


@dataclass(frozen=True, eq=False)
class CopoweredPushout:
    obj: FiniteSetObj
    leg: FiniteMap  # D_β -> D_{β+1}
    cell: FiniteMap  # V⊙B -> D_{β+1}
    attach: FiniteMap  # apex of ∇(u, g) -> D_β
    corner: FiniteMap  # ∇(u, g)


def copowered_pushout(u: FiniteMap, g: FiniteMap, v: FiniteMap, w: FiniteMap, stage_map: FiniteMap) -> CopoweredPushout:
    """Attach one cell for the triple ``(g, v, w)``.

    ``stage_map`` is the composite ``D_α -> D_β`` of the cells already attached
    in this stage; ``v`` and ``w`` refer to ``D_α``.
    """
    A, B = g.dom, g.cod
    cr = corner(u, g)
    S = v.cod
    Dalpha = stage_map.dom
    if w.cod != hom_set(B, Dalpha):
        raise SoaError("w must land in hom(cod g, D_α)")
    p1 = FiniteMap._trusted(S, hom_set(A, Dalpha), tuple(r for r, _ in S.elements))
    h_star = compose(stage_map, transpose_up(w, B, Dalpha))
    g_star = compose(stage_map, transpose_up(compose(p1, v), A, Dalpha))
    try:
        attach = pushout_induce(cr.apex, cr.i1, cr.i2, h_star, g_star)
    except KernelError as exc:
        raise SoaError(f"incompatible attaching data: {exc}") from None
    obj, leg, cell = pushout(attach, cr.corner)
    return CopoweredPushout(obj, leg, cell, attach, cr.corner)


@dataclass(frozen=True)
class StageLog:
    stage: int
    scheduled: int
    generator: FiniteMap
    triples: int
    size_before: int
    size_after: int


@dataclass
class SoaState:
    stage: int
    obj: FiniteSetObj
    connecting: list
    phi: FiniteMap
    logs: list = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class FactorizationResult:
    f: FiniteMap
    e: FiniteMap
    m: FiniteMap
    converged: bool
    cell_certificate: object
    stats: dict
    logs: tuple
    diagnostics: tuple = ()


def _stage(state: SoaState, I, u: FiniteMap, J_index: int, config: SoaConfig, cells: list) -> str | None:
    phi, D = state.phi, state.obj
    triples = enumerate_triples(I, phi, u, config.skip_solved)
    if len(triples) > config.inner_cap:
        return f"stage {state.stage}: {len(triples)} triples exceed inner_cap={config.inner_cap}"
    stage_map = identity(D)
    phi_beta = phi
    for t in triples:
        cp = copowered_pushout(u, t.g, t.v, t.w, stage_map)
        S = t.v.cod
        p2 = FiniteMap._trusted(S, hom_set(t.g.cod, phi.cod), tuple(s for _, s in S.elements))
        on_cell = transpose_up(compose(p2, t.v), t.g.cod, phi.cod)
        phi_beta = pushout_induce(cp.obj, cp.leg, cp.cell, phi_beta, on_cell)
        stage_map = compose(cp.leg, stage_map)
        cells.append(Pushout(Corner(Generator(u, "J"), Generator(t.g, "I")), cp.attach))
    state.logs.append(StageLog(state.stage, J_index, u, len(triples), len(D), len(stage_map.cod)))
    state.connecting.append(stage_map)
    state.obj, state.phi = stage_map.cod, phi_beta
    state.stage += 1
    return None


def is_solved(phi: FiniteMap, I: Sequence[FiniteMap], J: Sequence[FiniteMap]) -> bool:
    return all(rlp_member(e_map(g, phi).map, J) for g in I)


def soa_factorize(f: FiniteMap, I: Sequence[FiniteMap], J: Sequence[FiniteMap], config: SoaConfig | None = None) -> FactorizationResult:
    config = config or SoaConfig()
    I, J = list(I), list(J)
    if not I or not J:
        raise SoaError("I and J must be nonempty")
    state = SoaState(0, f.dom, [], f)
    cells: list = []
    diagnostics: list[str] = []
    converged = False
    while True:
        if config.check_before_stage and is_solved(state.phi, I, J):
            converged = True
            break
        if state.stage >= config.stage_cap:
            break
        j = mod_schedule(state.stage, len(J))
        problem = _stage(state, I, J[j], j, config, cells)
        if problem:
            diagnostics.append(problem)
            break
    if not config.check_before_stage:
        converged = not diagnostics and is_solved(state.phi, I, J)
    if not converged and not diagnostics:
        diagnostics.append(f"not solved after {state.stage} stages (stage_cap={config.stage_cap})")
    e = identity(f.dom)
    for c in state.connecting:
        e = compose(c, e)
    cert = Composite(tuple(cells)) if cells else Identity(f.dom)
    stats = {
        "stages": state.stage,
        "cells": len(cells),
        "sizes": [len(f.dom)] + [log.size_after for log in state.logs],
    }
    return FactorizationResult(f, e, state.phi, converged, cert, stats, tuple(state.logs), tuple(diagnostics))


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class VerificationReport:
    composite_ok: bool  # (a)
    right_class_ok: bool  # (b)
    certificate_ok: bool  # (c)
    spot_check_ok: bool  # (d)
    spot_checked: int
    failures: tuple

    @property
    def all_ok(self) -> bool:
        return self.composite_ok and self.right_class_ok and self.certificate_ok and self.spot_check_ok


def sample_right_members(I, J, n: int, seed: int, max_dom: int = 2, max_cod: int = 3) -> list[FiniteMap]:
    """``n`` seeded draws from the small maps ``k`` with ``f_lift(g, k)`` for every ``g ∈ I``."""
    rng = random.Random(seed)
    pool = []
    for a in range(max_dom + 1):
        for b in range(max_cod + 1):
            for k in all_maps(fin(a), fin(b)):
                if rlp_f_member(k, I, J):
                    pool.append(k)
    return [rng.choice(pool) for _ in range(n)] if pool else []


def verify_result(r: FactorizationResult, I, J, samples: int = 50, seed: int = 0, hom_limit: int = 20_000) -> VerificationReport:
    failures = []
    a = compose(r.m, r.e) == r.f
    if not a:
        failures.append("(a) m∘e differs from f")
    b_bad = [i for i, g in enumerate(I) if not rlp_member(e_map(g, r.m).map, J)]
    if b_bad:
        failures.append(f"(b) e_{{g,m}} not in J^□ for I indices {b_bad}")
    try:
        c = replay_certificate(r.cell_certificate) == r.e
    except KernelError as exc:
        c = False
        failures.append(f"(c) replay failed: {exc}")
    else:
        if not c:
            failures.append("(c) certificate does not replay to e")
    ks = sample_right_members(I, J, samples, seed)
    ks += [identity(r.e.cod), identity(r.e.dom), identity(r.f.cod)]
    checked = 0
    d = True
    for k in ks:
        if len(k.dom) ** len(r.e.cod) > hom_limit:
            continue
        checked += 1
        if not f_lift(r.e, k, J):
            d = False
            failures.append(f"(d) e does not lift against sampled {k!r}")
            break
    return VerificationReport(a, not b_bad, c, d, checked, tuple(failures))
