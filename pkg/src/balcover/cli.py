"""Command-line front end.

Every subcommand prints a JSON report on stdout and a one-line summary on
stderr.  Exit codes: 0 the property holds (or the computation finished),
1 the property fails and the report carries a witness, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

import numpy as np

from . import acceptance
from . import cleaving as cl
from . import galois as gl
from . import krullschmidt as ks
from . import repmod as rm
from . import transport as tr
from .fileio import (InputError, Workspace, category_to_json, document_kind, dumps, morphism_from_terms, read_json,
                     representation_to_json, resolve)
from .functorcore import (
    DisconnectedTargetError,
    FunctorError,
    LinearFunctor,
    NotCoveringError,
    _labelled,
    check_balanced,
    check_covering,
    check_functor,
    check_quiver_covering_map,
    covering_order,
    induced_functor,
    lift,
)
from .quivercat import BoundCategory, CategoryError, TabulatedCategory, check_schurian
from .repmod import RepresentationError


class Outcome:
    def __init__(self, code: int, report: dict, summary: str):
        self.code, self.report, self.summary = code, report, summary


def _verdict(ok: bool, report: dict, yes: str, no: str) -> Outcome:
    return Outcome(0 if ok else 1, report, yes if ok else no)


# loading helpers ------------------------------------------------------------------------------


def _from_quiver_map(ws: Workspace, ref) -> LinearFunctor:
    q, A, B = ws.quiver_map(ref)
    rep = check_quiver_covering_map(q)
    if not rep.covering:
        raise NotCoveringError("quiver map is not a covering", rep.witness)
    return induced_functor(q, A, B)[0]


def _functor_file(ws: Workspace, ref) -> LinearFunctor:
    """A functor file or a quiver-map file, told apart by content."""
    if document_kind(read_json(resolve(str(ref)))) == "quiver_map":
        return _from_quiver_map(ws, ref)
    return ws.functor(ref)


def _functor(ws: Workspace, args) -> LinearFunctor:
    if getattr(args, "functor", None):
        return ws.functor(args.functor)
    if getattr(args, "quiver_map", None):
        return _from_quiver_map(ws, args.quiver_map)
    raise InputError("one of --functor or --quiver-map is required")


def _cert(ws: Workspace, args):
    return check_covering(_functor(ws, args))


def _morphism(cat: BoundCategory, text: str, source: str | None, target: str | None):
    """``alpha.beta`` (arrows in traversal order) or a JSON list of ``{"coeff", "path"}`` terms."""
    text = text.strip()
    if text.startswith("["):
        try:
            terms = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"--morphism is not valid JSON: {exc.msg}") from None
    else:
        terms = [{"coeff": 1, "path": [t for t in text.split(".") if t]}]
    if source is None or target is None:
        first = next((t["path"] for t in terms if isinstance(t, dict) and t.get("path")), None)
        if first is None:
            raise InputError("--source and --target are needed for identity terms")
        try:
            m = cat.path_morphism(first)
        except CategoryError as exc:
            raise InputError(str(exc), "--morphism") from None
        source, target = source or m.source, target or m.target
    return morphism_from_terms(cat, terms, source, target, "--morphism")


def _tabulated_json(cat: TabulatedCategory) -> dict:
    homs = {f"{a}|{b}": cat.hom_labels(a, b) for a in cat.objects for b in cat.objects if cat.hom_dim(a, b)}
    products = []
    for a in cat.objects:
        for b in cat.objects:
            for c in cat.objects:
                T = cat.mult(a, b, c)
                for i, j, k in zip(*np.nonzero(T)):
                    products.append([cat.hom_labels(b, c)[j], cat.hom_labels(a, b)[i],
                                     cat.hom_labels(a, c)[k], int(T[i, j, k])])
    return {"objects": list(cat.objects), "homs": homs, "products": products}


def _rep_json(X: rm.Representation) -> dict:
    return representation_to_json(X)


# commands -------------------------------------------------------------------------------------


def cmd_validate(ws: Workspace, args) -> Outcome:
    report, ok = {}, True
    if args.category:
        A = ws.category(args.category)
        report["category"] = {
            "locally_bounded": A.validate_locally_bounded(),
            "nilpotency_implied_by_relations": A.nilpotency_implied(),
            "connected": A.is_connected(),
            "schurian": check_schurian(A),
            "objects": len(A.objects),
            "total_dim": int(sum(A.hom_dims().values())),
        }
    if args.functor:
        r = check_functor(ws.functor(args.functor))
        report["functor"] = {"well_defined": r.well_defined, "radical_preserving": r.radical_preserving,
                             "witness": r.witness}
        ok &= r.ok
    if args.rep:
        X = ws.representation(args.rep)
        report["representation"] = {"dims": dict(X.dims), "valid": True}
    if args.group:
        r = gl.check_action(ws.group_action(args.group))
        report["action"] = r.to_json()
        ok &= r.ok
    if args.grading:
        r = gl.check_grading(ws.grading(args.grading))
        report["grading"] = {"homogeneous": r.ok, "witness": r.witness}
        ok &= r.ok
    if not report:
        raise InputError("nothing to validate; pass --category, --functor, --rep, --group or --grading")
    return _verdict(ok, report, "valid", "invalid")


def cmd_hom(ws: Workspace, args) -> Outcome:
    A = ws.category(args.category)
    pairs = [(args.source, args.target)] if args.source and args.target else \
        [(a, b) for a in A.objects for b in A.objects]
    out = {}
    for a, b in pairs:
        if a not in A.objects or b not in A.objects:
            raise InputError(f"unknown object in pair ({a}, {b})")
        out[f"{a}|{b}"] = {"dim": A.hom_dim(a, b), "basis": A.hom_labels(a, b)}
    return Outcome(0, {"homs": out}, f"{len(out)} hom spaces")


def cmd_check_covering(ws: Workspace, args) -> Outcome:
    report = {}
    if args.quiver_map:
        q, A, B = ws.quiver_map(args.quiver_map)
        r = check_quiver_covering_map(q)
        report["quiver_map"] = {"covering": r.covering, "witness": r.witness}
        if not r.covering:
            return Outcome(1, report, "quiver map is not a covering")
        F, adm = induced_functor(q, A, B)
        report["admissible"] = {"admissible": adm.admissible, "witness": adm.witness}
        if not adm.admissible:
            return Outcome(1, report, "induced functor is not admissible")
    else:
        F = _functor(ws, args)
    fr = check_functor(F)
    if not fr.ok:
        report.update({"covering": False, "witness": {"functor": fr.witness}})
        return Outcome(1, report, "functor is not well defined")
    cert = check_covering(F)
    report.update({"covering": True, "fibers": cert.fibers})
    if args.certificate:
        report["certificate"] = cert.to_json()
    return Outcome(0, report, "covering")


def cmd_check_balanced(ws: Workspace, args) -> Outcome:
    r = check_balanced(_cert(ws, args))
    report = {"balanced": r.balanced}
    if not r.balanced:
        report["witness"] = r.witness
        report["failures"] = r.failures if args.all else r.failures[:1]
        w = r.witness
        return Outcome(1, report, f"not balanced at ({w['a']}, {w['b']}, {w['f']})")
    return Outcome(0, report, "balanced")


def cmd_order(ws: Workspace, args) -> Outcome:
    cert = _cert(ws, args)
    try:
        n = covering_order(cert)
    except DisconnectedTargetError as exc:
        return Outcome(1, {"order": None, "components": exc.per_component}, "target is disconnected")
    return Outcome(0, {"order": n, "fibers": cert.fibers}, f"order {n}")


def cmd_lift(ws: Workspace, args) -> Outcome:
    cert = _cert(ws, args)
    A, B, F = cert.source, cert.target, cert.functor
    f = _morphism(B, args.morphism, args.source, args.target)
    base = f.source if args.direction == "out" else f.target
    anchors = [args.anchor] if args.anchor else cert.fibers[base]
    out = []
    for x in anchors:
        if x not in A.objects or F(x) != base:
            raise InputError(f"anchor {x} does not lie over {base}")
        out.append(lift(cert, f, x, args.direction).to_json(A))
    return Outcome(0, {"morphism": _labelled(B, f), "lifts": out}, f"{len(out)} lift families")


def _transport(ws: Workspace, args, fn) -> Outcome:
    cert = _cert(ws, args)
    res = fn(cert, ws.representation(args.rep))
    blocks = {i: [{"object": a, "offset": o, "dim": d} for a, o, d in rows] for i, rows in res.blocks.items()}
    return Outcome(0, {"representation": _rep_json(res.rep), "blocks": blocks},
                   f"dims {dict(res.rep.dims)}")


def cmd_push_down(ws, args):
    return _transport(ws, args, tr.push_down)


def cmd_push_rho(ws, args):
    return _transport(ws, args, tr.push_down_right)


def cmd_pull_up(ws: Workspace, args) -> Outcome:
    F = _functor(ws, args)
    Y = tr.pull_up(F, ws.representation(args.rep))
    return Outcome(0, {"representation": _rep_json(Y)}, f"dims {dict(Y.dims)}")


def cmd_schurian(ws: Workspace, args) -> Outcome:
    if args.category:
        ok = check_schurian(ws.category(args.category))
        return _verdict(ok, {"schurian": ok}, "schurian", "not schurian")
    cert = _cert(ws, args)
    s = check_schurian(cert.target)
    b = check_balanced(cert)
    report = {"target_schurian": s, "balanced": b.balanced, "witness": b.witness}
    # a covering of a schurian category must be balanced
    ok = (not s) or b.balanced
    return _verdict(ok, report, "consistent", "schurian target but not balanced")


def cmd_quotient(ws: Workspace, args) -> Outcome:
    action = ws.group_action(args.group)
    ar = gl.check_action(action)
    if not ar.ok:
        return Outcome(1, {"action": ar.to_json()}, "action is not free")
    quot = gl.galois_quotient(action)
    order = covering_order(quot.certificate) if quot.category.is_connected() else None
    report = {"action": ar.to_json(), "orbits": quot.orbit_members, "representatives": quot.representatives,
              "quotient": _tabulated_json(quot.category), "projection_balanced": quot.balanced,
              "order": order}
    ok = quot.balanced
    if args.functor:
        iso = gl.factor_through_quotient(quot, ws.functor(args.functor))
        report["isomorphic_to_target"] = iso.isomorphic
        report["iso_witness"] = iso.witness
        ok &= iso.isomorphic
    return _verdict(ok, report, "Galois quotient built", "quotient check failed")


def cmd_smash(ws: Workspace, args) -> Outcome:
    g = ws.grading(args.grading)
    S = gl.smash_product(g)
    iso = gl.canonical_quotient_iso(S)
    report = {"smash": category_to_json(S.category), "connected": S.connected,
              "schurian": check_schurian(S.category), "action_free": gl.check_action(S.action).ok,
              "quotient_isomorphic": iso.isomorphic}
    return _verdict(iso.isomorphic, report, f"smash with {len(S.category.objects)} objects",
                    "quotient of the smash is not isomorphic")


def cmd_grade_check(ws: Workspace, args) -> Outcome:
    r = gl.check_grading(ws.grading(args.grading))
    return _verdict(r.ok, {"homogeneous": r.ok, "witness": r.witness}, "homogeneous", "not homogeneous")


def cmd_smash_functor(ws: Workspace, args) -> Outcome:
    F = _functor(ws, args)
    res = gl.smash_functor(F, ws.grading(args.grading_source), ws.grading(args.grading_target))
    ok = res.square_commutes and res.covering and res.biconditional
    return _verdict(ok, res.to_json(), "smash functor consistent", "smash functor check failed")


def cmd_induce_grading(ws: Workspace, args) -> Outcome:
    F = _functor(ws, args)
    gA = gl.induce_grading_schurian(F, ws.grading(args.grading))
    return Outcome(0, {"grading": gA.to_json()}, "grading induced")


def cmd_grading_from_tower(ws: Workspace, args) -> Outcome:
    F = _functor_file(ws, args.functor) if args.functor else None
    action = ws.group_action(args.group)
    Fp = _functor_file(ws, args.cover)
    if F is None:
        F = LinearFunctor.identity(Fp.target)
    t = gl.grading_from_schurian_galois(F, Fp, action)
    ok = t.square_commutes and t.comparison_is_iso and t.factors
    return _verdict(ok, t.to_json(), "tower factors through the smash", "tower check failed")


def cmd_retraction_table(ws: Workspace, args) -> Outcome:
    t = cl.retraction_table(_cert(ws, args))
    return _verdict(t.left_inverse, t.to_json(), "E∘F = 1", "E∘F differs from 1")


def cmd_squares(ws: Workspace, args) -> Outcome:
    cert = _cert(ws, args)
    sq = cl.check_naturality_squares(cl.retraction_table(cert))
    bal = check_balanced(cert).balanced
    report = {"balanced": bal, "squares": sq.to_json(), "square2_matches_balanced": sq.square2 == bal}
    return _verdict(sq.square1 and sq.square2, report, "both squares commute",
                    "square 2 fails" if sq.square1 else "square 1 fails")


def cmd_epsilon(ws: Workspace, args) -> Outcome:
    e = cl.epsilon(_cert(ws, args), ws.representation(args.rep))
    return Outcome(0, {"epsilon": e.to_json(), "pulled": _rep_json(e.pulled)}, "ε is a module morphism")


def cmd_cleave(ws: Workspace, args) -> Outcome:
    cert = _cert(ws, args)
    if args.rep:
        samples = [(args.rep, ws.representation(args.rep))]
    else:
        rng = np.random.default_rng(args.seed)
        samples = [(f"random[{k}]", rm.random_representation(cert.source, rng)) for k in range(args.samples)]
    results = []
    for name, X in samples:
        r = cl.cleaving_test(cert, X, args.seed)
        results.append({"rep": name, **r.to_json(), "witness_dims": dict(r.epsilon.pulled.dims)})
    ok = all(r["verdict"] == "splits" for r in results)
    report = {"balanced": check_balanced(cert).balanced, "cleaving": results}
    return _verdict(ok, report, "every sample splits", "a sample does not split")


def cmd_decompose(ws: Workspace, args) -> Outcome:
    D = ks.decompose(ws.representation(args.rep), args.seed)
    if not D.verify():
        raise ks.KrullSchmidtError("decomposition failed verification")
    n = len(D.components)
    return Outcome(0, D.to_json(witnesses=args.witnesses), f"{n} indecomposable summand(s)")


def cmd_iso(ws: Workspace, args) -> Outcome:
    X, Y = ws.representation(args.rep), ws.representation(args.other)
    r = ks.are_isomorphic(X, Y, args.seed)
    report = {"isomorphic": r.isomorphic, "method": r.method}
    if r.isomorphic and r.forward is not None:
        report["forward"] = {a: M.tolist() for a, M in r.forward.maps.items()}
    else:
        report["witness"] = {"dims": [dict(X.dims), dict(Y.dims)],
                             "decompositions": [ks.decompose(X, args.seed).to_json(),
                                                ks.decompose(Y, args.seed).to_json()]}
    return _verdict(r.isomorphic, report, "isomorphic", "not isomorphic")


def cmd_summand(ws: Workspace, args) -> Outcome:
    X, Y = ws.representation(args.rep), ws.representation(args.into)
    r = ks.is_direct_summand(X, Y, args.seed)
    report = r.to_json()
    if r.summand and r.split is not None:
        i, q = r.split
        report["inclusion"] = {a: M.tolist() for a, M in i.maps.items()}
        report["retraction"] = {a: M.tolist() for a, M in q.maps.items()}
    else:
        report["witness"] = {"decomposition_of_summand": ks.decompose(X, args.seed).to_json(),
                             "decomposition_of_target": ks.decompose(Y, args.seed).to_json()}
    return _verdict(r.summand, report, "direct summand", "not a direct summand")


def cmd_corpus(ws: Workspace, args) -> Outcome:
    checks = acceptance.run_all(args.seed)
    ok = all(c.passed for c in checks)
    if args.json:
        report = {"seed": args.seed, "passed": ok, "checks": [c.to_json() for c in checks]}
    else:
        report = {"seed": args.seed, "passed": ok, "checks": {c.name: c.passed for c in checks}}
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}", file=sys.stderr)
    passed = sum(c.passed for c in checks)
    return _verdict(ok, report, f"{passed}/{len(checks)} checks pass", f"{passed}/{len(checks)} checks pass")


# parser ---------------------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, top: bool) -> None:
    d = None if top else argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=0 if top else d, help="random seed (default 0)")
    p.add_argument("--prime", type=int, default=d,
                   help="field prime; overrides the prime in every loaded file (default: file value or 32003)")


def _covering_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--functor", help="functor JSON file")
    g.add_argument("--quiver-map", help="quiver map JSON file; its induced functor is used")


COMMANDS: dict[str, tuple[Callable, Callable[[argparse.ArgumentParser], None], str]] = {}


def _setup_table() -> None:
    def cov(p):
        _covering_args(p)

    def cov_rep(p):
        _covering_args(p)
        p.add_argument("--rep", required=True, help="representation JSON file")

    def validate(p):
        for flag in ("category", "functor", "rep", "group", "grading"):
            p.add_argument(f"--{flag}")

    def hom(p):
        p.add_argument("--category", required=True)
        p.add_argument("--source")
        p.add_argument("--target")

    def check_cov(p):
        _covering_args(p)
        p.add_argument("--certificate", action="store_true", help="include the inverse matrices")

    def balanced(p):
        _covering_args(p)
        p.add_argument("--all", action="store_true", help="list every failing basis element")

    def lift_(p):
        _covering_args(p)
        p.add_argument("--morphism", required=True, help="'alpha.beta' or a JSON list of terms")
        p.add_argument("--source")
        p.add_argument("--target")
        p.add_argument("--anchor")
        p.add_argument("--direction", choices=("out", "in"), default="out")

    def schur(p):
        _covering_args(p)
        p.add_argument("--category")

    def quot(p):
        p.add_argument("--group", required=True, help="group action JSON file")
        p.add_argument("--functor", help="G-invariant functor to compare the quotient with")

    def grading(p):
        p.add_argument("--grading", required=True)

    def sm_fun(p):
        _covering_args(p)
        p.add_argument("--grading-source", required=True)
        p.add_argument("--grading-target", required=True)

    def induce(p):
        _covering_args(p)
        p.add_argument("--grading", required=True, help="grading of the target")

    def tower(p):
        p.add_argument("--functor", help="covering A -> B (default: identity of B)")
        p.add_argument("--cover", required=True, help="Galois covering B' -> B (functor or quiver map)")
        p.add_argument("--group", required=True, help="action of G on B'")

    def cleave(p):
        _covering_args(p)
        p.add_argument("--rep")
        p.add_argument("--samples", type=int, default=5, help="random samples when --rep is absent")

    def decompose(p):
        p.add_argument("--rep", required=True)
        p.add_argument("--witnesses", action="store_true", help="include inclusions and projections")

    def iso(p):
        p.add_argument("--rep", required=True)
        p.add_argument("--other", required=True)

    def summand(p):
        p.add_argument("--rep", required=True, help="candidate summand")
        p.add_argument("--into", required=True, help="ambient representation")

    def corpus(p):
        p.add_argument("--json", action="store_true", help="full consolidated report")

    table = [
        ("validate", cmd_validate, validate, "validate input files"),
        ("hom", cmd_hom, hom, "hom dimensions and bases"),
        ("check-covering", cmd_check_covering, check_cov, "verify the covering bijections"),
        ("check-balanced", cmd_check_balanced, balanced, "compare out- and in-lifts"),
        ("order", cmd_order, cov, "order of a covering"),
        ("lift", cmd_lift, lift_, "out- or in-lift of a morphism"),
        ("push-down", cmd_push_down, cov_rep, "left push-down of a representation"),
        ("pull-up", cmd_pull_up, cov_rep, "pull-up of a representation"),
        ("push-rho", cmd_push_rho, cov_rep, "right push-down of a representation"),
        ("schurian", cmd_schurian, schur, "schurian check; with a covering, also balanced"),
        ("quotient", cmd_quotient, quot, "Galois quotient of a free action"),
        ("smash", cmd_smash, grading, "smash product of a graded category"),
        ("grade-check", cmd_grade_check, grading, "homogeneity of a grading"),
        ("smash-functor", cmd_smash_functor, sm_fun, "smash functor of a graded covering"),
        ("induce-grading", cmd_induce_grading, induce, "grading induced over a schurian target"),
        ("grading-from-tower", cmd_grading_from_tower, tower, "grading from a Galois tower"),
        ("retraction-table", cmd_retraction_table, cov, "the retraction E and the check E∘F = 1"),
        ("squares", cmd_squares, cov, "naturality squares of E"),
        ("epsilon", cmd_epsilon, cov_rep, "canonical mono into the pulled-up push-down"),
        ("cleave", cmd_cleave, cleave, "splitting test for the canonical mono"),
        ("decompose", cmd_decompose, decompose, "Krull-Schmidt decomposition"),
        ("iso", cmd_iso, iso, "isomorphism test"),
        ("summand", cmd_summand, summand, "direct summand test"),
        ("corpus", cmd_corpus, corpus, "run the bundled corpus suite"),
    ]
    for name, fn, setup, help in table:
        COMMANDS[name] = (fn, setup, help)


_setup_table()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="balcover", description="Coverings of bound quiver categories over F_p.")
    _add_common(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, setup, help) in COMMANDS.items():
        p = sub.add_parser(name, help=help, description=help)
        _add_common(p, top=False)
        setup(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    fn = COMMANDS[args.command][0]
    try:
        ws = Workspace(args.prime)
        out = fn(ws, args)
    except (InputError, CategoryError, RepresentationError, FunctorError, gl.GroupError,
            KeyError, FileNotFoundError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(dumps({"error": type(exc).__name__, "message": str(msg)}))
        print(f"input error: {msg}", file=sys.stderr)
        return 2
    except NotCoveringError as exc:
        print(dumps({"covering": False, "reason": str(exc), "witness": exc.witness}))
        print(f"not a covering: {exc}", file=sys.stderr)
        return 1
    print(dumps(out.report))
    print(out.summary, file=sys.stderr)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
