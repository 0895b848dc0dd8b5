"""Command-line front end: instance loading, the five commands, and JSON reports."""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import jsonschema

from . import __version__
from .dayaction import (
    INDEX_BUILDERS,
    adjunction_check,
    angle_vs_e,
    assoc_check,
    random_functor,
    star_vs_corner,
    unit_check,
)
from .finkernel import FiniteMap, FiniteSetObj, KernelError
from .lifting import (
    WfsSpec,
    decode_atom,
    encode_atom,
    encode_certificate,
    encode_map,
    f_lift,
    get_profile,
    has_lift,
    lifts,
    lifts_uniquely,
    random_map,
)
from .soa import SoaConfig, SoaError, soa_factorize, verify_result
from .stability import ALL_CHECKS, HarnessConfig, run_all
from .twocat import FiniteTwoCategory, chain_with_twist, discrete_from_sets, e_functor, f_lift2, from_tables

REPORT_SCHEMA = "enrichedsoa/report@1"
INSTANCE_SCHEMA = "enrichedsoa/instance@1"

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_FAILED = 0, 1, 2, 3


class InstanceError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


# ---------------------------------------------------------------------------
# locating JSON paths in the source text

_WS = " \t\r\n"


def _skip(text: str, i: int) -> int:
    while i < len(text) and text[i] in _WS:
        i += 1
    return i


def _positions(text: str) -> dict:
    """Map every JSON path (tuple of keys/indices) to the offset where its value starts."""
    dec = json.JSONDecoder()
    pos: dict = {}

    def value(i: int, path: tuple) -> int:
        i = _skip(text, i)
        pos[path] = i
        if text[i] == "{":
            i = _skip(text, i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = json.decoder.scanstring(text, _skip(text, i) + 1)
                i = _skip(text, i) + 1  # ':'
                i = _skip(text, value(i, path + (key,)))
                if text[i] == "}":
                    return i + 1
                i += 1
        if text[i] == "[":
            i = _skip(text, i + 1)
            if text[i] == "]":
                return i + 1
            n = 0
            while True:
                i = _skip(text, value(i, path + (n,)))
                n += 1
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = dec.raw_decode(text, i)
        return end

    value(0, ())
    return pos


def _line_of(text: str, positions: dict, path: Sequence) -> int | None:
    path = tuple(path)
    while path not in positions and path:
        path = path[:-1]
    off = positions.get(path)
    return None if off is None else text.count("\n", 0, off) + 1


def load_schema() -> dict:
    return json.loads(resources.files("enrichedsoa").joinpath("schema/instance.schema.json").read_text("utf-8"))


# ---------------------------------------------------------------------------
# instances

@dataclass
class Instance:
    doc: dict
    text: str
    positions: dict
    sets: dict  # name -> FiniteSetObj
    listed: dict  # name -> atoms in document order
    maps: dict  # name -> FiniteMap

    def line(self, *path) -> int | None:
        return _line_of(self.text, self.positions, path)

    def map_ref(self, ref, path: tuple) -> FiniteMap:
        if isinstance(ref, str):
            if ref not in self.maps:
                raise InstanceError(f"unknown map {ref!r}", self.line(*path))
            return self.maps[ref]
        return _build_map(self, ref, path)

    def profile(self) -> WfsSpec:
        p = self.doc.get("profile", "set-weak")
        if isinstance(p, str):
            return get_profile(p)
        J = tuple(self.map_ref(r, ("profile", "J", i)) for i, r in enumerate(p["J"]))
        return WfsSpec("inline", J)


def _build_map(inst: Instance, m: dict, path: tuple) -> FiniteMap:
    for key in ("dom", "cod"):
        if m[key] not in inst.sets:
            raise InstanceError(f"unknown set {m[key]!r}", inst.line(*path, key))
    dom, cod = m["dom"], m["cod"]
    table = [decode_atom(y) for y in m["table"]]
    listed = inst.listed[dom]
    if len(table) != len(listed):
        raise InstanceError(
            f"map is not total: {len(table)} images for {len(listed)} elements of {dom!r}", inst.line(*path, "table")
        )
    for i, y in enumerate(table):
        if y not in inst.sets[cod]:
            raise InstanceError(f"image {encode_atom(y)!r} is not in {cod!r}", inst.line(*path, "table", i))
    return FiniteMap.from_dict(inst.sets[dom], inst.sets[cod], dict(zip(listed, table)))


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    positions = _positions(text)
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = errors[0]
        where = "/".join(map(str, err.absolute_path)) or "<root>"
        raise InstanceError(f"schema violation at {where}: {err.message}", _line_of(text, positions, err.absolute_path))
    inst = Instance(doc, text, positions, {}, {}, {})
    for name, atoms in doc.get("sets", {}).items():
        decoded = [decode_atom(a) for a in atoms]
        if len(set(decoded)) != len(decoded):
            raise InstanceError(f"set {name!r} lists an element twice", inst.line("sets", name))
        inst.sets[name] = FiniteSetObj.of(decoded)
        inst.listed[name] = decoded
    for name, m in doc.get("maps", {}).items():
        inst.maps[name] = _build_map(inst, m, ("maps", name))
    return inst


def load_instance(path: str | Path) -> Instance:
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def _require(inst: Instance, key: str, base: str) -> None:
    if inst.doc.get("base") != base:
        raise InstanceError(f"this command needs base {base!r}", inst.line("base"))
    if key and key not in inst.doc:
        raise InstanceError(f"missing field {key!r}", 1)


def soa_config(inst: Instance, args) -> SoaConfig:
    c = dict(inst.doc.get("config", {}))
    c.pop("seed", None)
    if getattr(args, "stage_cap", None) is not None:
        c["stage_cap"] = args.stage_cap
    if getattr(args, "skip_solved", False):
        c["skip_solved"] = True
    try:
        return SoaConfig(**c)
    except SoaError as exc:
        raise InstanceError(str(exc), inst.line("config")) from None


# ---------------------------------------------------------------------------
# commands

def cmd_factorize(args) -> tuple[int, dict]:
    inst = load_instance(args.instance)
    _require(inst, "f", "set")
    spec = _resolve_profile(inst, args)
    f = inst.map_ref(inst.doc["f"], ("f",))
    I = [inst.map_ref(r, ("I", i)) for i, r in enumerate(inst.doc.get("I", []))]
    if not I:
        raise InstanceError("factorize needs a nonempty I", inst.line("I") or 1)
    config = soa_config(inst, args)
    seed = args.seed if args.seed is not None else inst.doc.get("config", {}).get("seed", 0)
    r = soa_factorize(f, I, list(spec.J), config)
    v = verify_result(r, I, list(spec.J), seed=seed)
    result = {
        "converged": r.converged,
        "e": encode_map(r.e),
        "m": encode_map(r.m),
        "stats": r.stats,
        "diagnostics": list(r.diagnostics),
        "stages": [
            {"stage": s.stage, "scheduled": s.scheduled, "triples": s.triples, "size_before": s.size_before, "size_after": s.size_after}
            for s in r.logs
        ],
        "verification": {
            "composite": v.composite_ok,
            "right_class": v.right_class_ok,
            "certificate": v.certificate_ok,
            "spot_check": v.spot_check_ok,
            "spot_checked": v.spot_checked,
            "failures": list(v.failures),
        },
    }
    report = {"result": result, "certificate": encode_certificate(r.cell_certificate)}
    if not r.converged:
        code = EXIT_NONCONVERGED
    elif not v.all_ok:
        code = EXIT_FAILED
    else:
        code = EXIT_OK
    return code, report


def _witness_json(table) -> list:
    return [
        {"r": encode_atom(w.r), "s": encode_atom(w.s), "diagonal": encode_atom(w.diagonal), "count": w.count}
        for w in table.witnesses
    ]


def _resolve_profile(inst: Instance, args) -> WfsSpec:
    if getattr(args, "profile", None):
        return get_profile(args.profile)
    return inst.profile()


def cmd_lift(args) -> tuple[int, dict]:
    inst = load_instance(args.instance)
    if inst.doc.get("base") == "twocat":
        return _twocat_lift(inst, args)
    _require(inst, "f", "set")
    _require(inst, "k", "set")
    spec = _resolve_profile(inst, args)
    f = inst.map_ref(inst.doc["f"], ("f",))
    k = inst.map_ref(inst.doc["k"], ("k",))
    result: dict[str, Any] = {
        "profile": spec.name,
        "f_lift": f_lift(f, k, spec.J),
        "ordinary_lift": lifts(f, k),
        "unique_lift": lifts_uniquely(f, k),
    }
    if args.witnesses:
        result["witnesses"] = _witness_json(has_lift(f, k))
    return EXIT_OK, {"result": result}


def _twocat_from_doc(inst: Instance) -> FiniteTwoCategory:
    spec = inst.doc.get("twocat")
    if spec is None:
        raise InstanceError("missing field 'twocat'", 1)
    kind = spec["kind"]
    try:
        if kind == "discrete":
            sets = {n: FiniteSetObj.of(decode_atom(a) for a in els) for n, els in spec["sets"].items()}
            return discrete_from_sets(sets)
        if kind == "chain-twist":
            return chain_with_twist(spec.get("n", 4), tuple(spec.get("twisted", (1, 2))))
        pairs = lambda rows: {(a, b): c for a, b, c in rows}
        return from_tables(
            spec["objects"],
            {n: tuple(v) for n, v in spec["one_cells"].items()},
            {n: tuple(v) for n, v in spec["two_cells"].items()},
            spec["id1"],
            spec["id2"],
            pairs(spec["vcomp"]),
            pairs(spec["hcomp1"]),
            pairs(spec["hcomp2"]),
        )
    except KernelError as exc:
        raise InstanceError(f"invalid 2-category: {exc}", inst.line("twocat")) from None
    except KeyError as exc:
        raise InstanceError(f"2-category table is missing {exc}", inst.line("twocat")) from None


def _one_cell(inst: Instance, K: FiniteTwoCategory, key: str):
    ref = inst.doc.get(key)
    if ref is None:
        raise InstanceError(f"missing field {key!r}", 1)
    kind = inst.doc["twocat"]["kind"]
    if kind == "discrete":
        if isinstance(ref, str):
            raise InstanceError("discrete 2-categories take inline 1-cells", inst.line(key))
        sets = inst.doc["twocat"]["sets"]
        listed = [decode_atom(a) for a in sets.get(ref["dom"], [])]
        if ref["dom"] not in sets or ref["cod"] not in sets:
            raise InstanceError("1-cell endpoints must be objects of the 2-category", inst.line(key))
        if len(listed) != len(ref["table"]):
            raise InstanceError("1-cell is not total", inst.line(key, "table"))
        dom = FiniteSetObj.of(listed)
        assign = dict(zip(listed, (decode_atom(y) for y in ref["table"])))
        c = (ref["dom"], ref["cod"], tuple(assign[x] for x in dom))
    elif kind == "chain-twist":
        try:
            i, j = (int(t) for t in str(ref).split("->"))
        except ValueError:
            raise InstanceError("chain 1-cells are written 'i->j'", inst.line(key)) from None
        c = ("c", i, j)
    else:
        c = ref
    if c not in K.one_cells:
        raise InstanceError(f"unknown 1-cell {ref!r}", inst.line(key))
    return c


def _twocat_lift(inst: Instance, args) -> tuple[int, dict]:
    K = _twocat_from_doc(inst)
    f, k = _one_cell(inst, K, "f"), _one_cell(inst, K, "k")
    res = f_lift2(K, f, k)
    result = {
        "f_lift2": res.value,
        "unfolded": res.unfolded,
        "consistent": res.consistent,
        "surjective": res.report.surjective,
        "full": res.report.full,
        "faithful": res.report.faithful,
        "diagnostics": list(res.report.diagnostics),
    }
    if getattr(args, "witnesses", False):
        F = e_functor(K, f, k)
        result["squares"] = [
            {"square": encode_atom(sq_obj), "diagonals": [encode_atom(d) for d in F.source.objects if F.ob(d) == sq_obj]}
            for sq_obj in F.target.objects
        ]
    return (EXIT_OK if res.consistent else EXIT_FAILED), {"result": result}


def cmd_twocat_lift(args) -> tuple[int, dict]:
    inst = load_instance(args.instance)
    _require(inst, "", "twocat")
    return _twocat_lift(inst, args)


def cmd_laws(args) -> tuple[int, dict]:
    laws = [n for n in ("assoc", "unit", "adjunction") if getattr(args, n)] or ["assoc", "unit", "adjunction"]
    indices = args.index or ["trivial", "arrow-min"]
    rng = random.Random(args.seed if args.seed is not None else 0)
    out: dict[str, Any] = {}
    failed = False
    for name in indices:
        if name not in INDEX_BUILDERS:
            raise InstanceError(f"unknown index category {name!r}; known: {sorted(INDEX_BUILDERS)}")
        A = INDEX_BUILDERS[name]()
        tally = {law: {"passed": 0, "failed": 0, "first_failure": None} for law in laws}
        for i in range(args.cases):
            F, G, X = (random_functor(A, rng, args.max_size) for _ in range(3))
            checks = {
                "assoc": lambda: assoc_check(A, F, G, X),
                "unit": lambda: unit_check(A, X),
                "adjunction": lambda: adjunction_check(A, F, G, X, seed=i),
            }
            for law in laws:
                res = checks[law]()
                t = tally[law]
                if res.ok:
                    t["passed"] += 1
                else:
                    t["failed"] += 1
                    failed = True
                    t["first_failure"] = t["first_failure"] or f"case {i}: {res.detail}"
        out[name] = tally
    if "arrow-min" in indices and not args.no_specialization:
        bad = 0
        for _ in range(args.cases):
            u, f, k = (random_map(rng, args.max_size) for _ in range(3))
            if not (star_vs_corner(u, f).ok and angle_vs_e(f, k).ok):
                bad += 1
        out["arrow-specialization"] = {"cases": args.cases, "failed": bad}
        failed = failed or bad > 0
    return (EXIT_FAILED if failed else EXIT_OK), {"result": out}


def cmd_stability(args) -> tuple[int, dict]:
    profiles = ["set-weak", "set-ortho"] if args.profile in (None, "all") else [args.profile]
    out = {}
    failed = False
    for p in profiles:
        get_profile(p)
        config = HarnessConfig(
            max_set_size=args.max_size,
            num_random_cases=args.cases,
            seed=args.seed if args.seed is not None else 0,
            profile=p,
            exhaustive_size=args.exhaustive_size,
        )
        checks = args.checks.split(",") if args.checks else list(ALL_CHECKS)
        reports = run_all(config, checks)
        out[p] = [r.to_json() for r in reports]
        failed = failed or any(not r.ok for r in reports)
    return (EXIT_FAILED if failed else EXIT_OK), {"result": out}


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="enrichedsoa", description="Enriched small object argument over finite sets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", type=Path, default=None, help="write the JSON report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factorize", parents=[common], help="factor f through the staged cell construction")
    p.add_argument("instance")
    p.add_argument("--profile", choices=["set-weak", "set-ortho"])
    p.add_argument("--stage-cap", type=int, default=None)
    p.add_argument("--skip-solved", action="store_true")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("lift", parents=[common], help="decide the enriched lifting relation f □ k")
    p.add_argument("instance")
    p.add_argument("--profile", choices=["set-weak", "set-ortho"])
    p.add_argument("--witnesses", action="store_true")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("twocat-lift", parents=[common], help="decide lifting in a finite 2-category")
    p.add_argument("instance")
    p.add_argument("--witnesses", action="store_true")
    p.set_defaults(func=cmd_twocat_lift)

    p = sub.add_parser("laws", parents=[common], help="check the action laws over a random grid")
    p.add_argument("--assoc", action="store_true")
    p.add_argument("--unit", action="store_true")
    p.add_argument("--adjunction", action="store_true")
    p.add_argument("--index", action="append", help=f"index category; one of {sorted(INDEX_BUILDERS)}")
    p.add_argument("--cases", type=int, default=25)
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--no-specialization", action="store_true")
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("stability", parents=[common], help="run the closure-property harness")
    p.add_argument("--profile", choices=["set-weak", "set-ortho", "all"], default="all")
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--exhaustive-size", type=int, default=2)
    p.add_argument("--checks", help=f"comma-separated subset of {','.join(ALL_CHECKS)}")
    p.set_defaults(func=cmd_stability)
    return parser


def _echo(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "out", "timing"):
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        code, body = args.func(args)
    except (InstanceError, KernelError, ValueError) as exc:
        print(f"enrichedsoa: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {"schema": REPORT_SCHEMA, "command": _echo(args), "exit_code": code, **body}
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    text = dumps(report)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
