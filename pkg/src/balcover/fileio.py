"""JSON file formats and a workspace that resolves cross-file references.

Referenced files (``"source"``, ``"target"``, ``"category"``, ``"group"``)
are paths relative to the referring file.  A reference that does not exist on
disk is looked up by basename in the bundled corpus.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from . import exactfield as ef
from .functorcore import LinearFunctor, QuiverMap
from .galois import FiniteGroup, GroupAction, Grading
from .quivercat import BoundCategory, CategoryError, LinearCategory, Morphism
from .repmod import Representation


class InputError(ValueError):
    """Malformed or missing input; ``where`` names the file and field."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def corpus_dir() -> Path:
    return Path(str(resources.files("balcover") / "corpus"))


def resolve(ref: str, base: Path | None = None) -> Path:
    path = Path(ref)
    candidates = [path] if path.is_absolute() else [(base or Path.cwd()) / path, Path.cwd() / path]
    for c in candidates:
        if c.exists():
            return c.resolve()
    bundled = corpus_dir() / path.name
    if bundled.exists():
        return bundled.resolve()
    raise InputError(f"file not found: {ref}")


def read_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", str(path)) from None
    if not isinstance(data, dict):
        raise InputError("top level must be an object", str(path))
    return data


def _need(data: dict, key: str, where: str, kind=None):
    if key not in data:
        raise InputError(f"missing field {key!r}", where)
    val = data[key]
    if kind is not None and not isinstance(val, kind):
        raise InputError(f"field {key!r} has the wrong type", where)
    return val


def _terms(raw, where: str) -> list[tuple[int, list[str]]]:
    if not isinstance(raw, list):
        raise InputError("a linear combination must be a list of terms", where)
    out = []
    for k, t in enumerate(raw):
        if not isinstance(t, dict) or "coeff" not in t or "path" not in t:
            raise InputError(f"term {k} needs 'coeff' and 'path'", where)
        if not isinstance(t["coeff"], int) or not isinstance(t["path"], list):
            raise InputError(f"term {k} has a non-integer coefficient or a non-list path", where)
        out.append((int(t["coeff"]), [str(x) for x in t["path"]]))
    return out


def category_from_json(data: dict, prime: int | None = None, where: str = "category") -> BoundCategory:
    p = prime if prime is not None else int(data.get("field_prime", ef.DEFAULT_PRIME))
    vertices = _need(data, "vertices", where, list)
    arrows = []
    for k, a in enumerate(_need(data, "arrows", where, list)):
        if not isinstance(a, dict) or not {"name", "source", "target"} <= set(a):
            raise InputError(f"arrows[{k}] needs name, source and target", where)
        arrows.append((str(a["name"]), str(a["source"]), str(a["target"])))
    relations = [_terms(r, f"{where}: relations[{k}]") for k, r in enumerate(data.get("relations", []))]
    n = _need(data, "nilpotency_bound", where, int)
    try:
        return BoundCategory.from_data(vertices, arrows, relations, n, p, name=str(data.get("name", "")))
    except (CategoryError, ValueError) as exc:
        raise InputError(str(exc), where) from None


def category_to_json(cat: BoundCategory) -> dict:
    q = cat.quiver
    out = {
        "field_prime": cat.p,
        "vertices": list(q.vertices),
        "arrows": [{"name": a.name, "source": a.source, "target": a.target} for a in q.arrows],
        "relations": [[{"coeff": _small(c, cat.p), "path": [q.arrows[i].name for i in arr]} for c, arr in r.terms]
                      for r in cat.relations],
        "nilpotency_bound": cat.n,
    }
    if cat.name:
        out["name"] = cat.name
    return out


def _small(c: int, p: int) -> int:
    return c - p if c > p // 2 else c


def morphism_from_terms(cat: BoundCategory, terms, source: str, target: str, where: str) -> Morphism:
    acc = cat.zero(source, target)
    for c, names in _terms(terms, where):
        try:
            m = cat.path_morphism(names, source if not names else None)
        except CategoryError as exc:
            raise InputError(str(exc), where) from None
        if (m.source, m.target) != (source, target):
            raise InputError(f"path {names} does not run {source} -> {target}", where)
        acc = cat.add(acc, m, c)
    return acc


def morphism_to_terms(cat: BoundCategory, f: Morphism) -> list[dict]:
    q = cat.quiver
    return [{"coeff": _small(int(c), cat.p), "path": q.path_names(pth)}
            for c, pth in zip(f.coords, cat.hom_basis(f.source, f.target)) if c]


def functor_from_json(data: dict, A: BoundCategory, B: BoundCategory, where: str = "functor") -> LinearFunctor:
    obj = _need(data, "object_map", where, dict)
    imgs_raw = _need(data, "arrow_images", where, dict)
    imgs = {}
    for arr in A.quiver.arrows:
        if arr.name not in imgs_raw:
            raise InputError(f"no image for arrow {arr.name}", where)
        if arr.source not in obj or arr.target not in obj:
            raise InputError(f"object map misses an endpoint of {arr.name}", where)
        imgs[arr.name] = morphism_from_terms(B, imgs_raw[arr.name], obj[arr.source], obj[arr.target],
                                             f"{where}: arrow_images.{arr.name}")
    try:
        return LinearFunctor(A, B, obj, arrow_images=imgs)
    except ValueError as exc:
        raise InputError(str(exc), where) from None


def functor_to_json(F: LinearFunctor, source_ref: str = "", target_ref: str = "") -> dict:
    return {
        "source": source_ref,
        "target": target_ref,
        "object_map": dict(F.object_map),
        "arrow_images": {n: morphism_to_terms(F.target, m) for n, m in F.arrow_images.items()},
    }


def representation_from_json(data: dict, cat: LinearCategory, where: str = "representation") -> Representation:
    dims = _need(data, "dims", where, dict)
    mats_raw = data.get("matrices", {})
    mats = {}
    gens = {g.name: g for g in cat.generators()}
    for name, M in mats_raw.items():
        if name not in gens:
            raise InputError(f"unknown arrow {name!r}", f"{where}: matrices")
        g = gens[name]
        shape = (int(dims.get(g.target, 0)), int(dims.get(g.source, 0)))
        try:
            mats[name] = ef.as_matrix(M, cat.p, shape)
        except ef.DimensionError as exc:
            raise InputError(str(exc), f"{where}: matrices.{name}") from None
    try:
        return Representation(cat, dims, mats)
    except ValueError as exc:
        raise InputError(str(exc), where) from None


def representation_to_json(X: Representation, category_ref: str = "") -> dict:
    return {"category": category_ref, **X.to_json()}


class Workspace:
    """Loads files once, so that categories shared between files are shared objects."""

    def __init__(self, prime: int | None = None):
        try:
            self.prime = ef.check_prime(prime) if prime is not None else None
        except ValueError as exc:
            raise InputError(str(exc)) from None
        self._cache: dict[Path, Any] = {}
        self.raw: dict[Path, dict] = {}

    def _load(self, ref: str | Path, base: Path | None, builder):
        path = resolve(str(ref), base)
        if path not in self._cache:
            data = read_json(path)
            self.raw[path] = data
            self._cache[path] = builder(data, path)
        return self._cache[path]

    def category(self, ref, base: Path | None = None) -> BoundCategory:
        return self._load(ref, base, lambda d, path: category_from_json(d, self.prime, str(path)))

    def functor(self, ref, base: Path | None = None) -> LinearFunctor:
        def build(d, path):
            A = self.category(_need(d, "source", str(path), str), path.parent)
            B = self.category(_need(d, "target", str(path), str), path.parent)
            return functor_from_json(d, A, B, str(path))
        return self._load(ref, base, build)

    def quiver_map(self, ref, base: Path | None = None) -> tuple[QuiverMap, BoundCategory, BoundCategory]:
        def build(d, path):
            A = self.category(_need(d, "source", str(path), str), path.parent)
            B = self.category(_need(d, "target", str(path), str), path.parent)
            try:
                q = QuiverMap(A.quiver, B.quiver, dict(_need(d, "vertex_map", str(path), dict)),
                              dict(_need(d, "arrow_map", str(path), dict)))
            except CategoryError as exc:
                raise InputError(str(exc), str(path)) from None
            return q, A, B
        return self._load(ref, base, build)

    def representation(self, ref, base: Path | None = None) -> Representation:
        def build(d, path):
            cat = self.category(_need(d, "category", str(path), str), path.parent)
            return representation_from_json(d, cat, str(path))
        return self._load(ref, base, build)

    def group_action(self, ref, base: Path | None = None) -> GroupAction:
        def build(d, path):
            where = str(path)
            A = self.category(_need(d, "category", where, str), path.parent)
            G = group_from_json(d, where)
            action_raw = _need(d, "action", where, dict)
            functors = {}
            for g in G.elements:
                body = action_raw.get(g)
                if body is None:
                    if g == G.identity:
                        functors[g] = LinearFunctor.identity(A)
                        continue
                    raise InputError(f"no action given for {g}", where)
                if isinstance(body, str):
                    F = self.functor(body, path.parent)
                    if F.source is not A or F.target is not A:
                        raise InputError(f"action of {g} is not an endofunctor of the category", where)
                    functors[g] = F
                else:
                    functors[g] = functor_from_json(body, A, A, f"{where}: action.{g}")
            return GroupAction(A, G, functors)
        return self._load(ref, base, build)

    def grading(self, ref, base: Path | None = None) -> Grading:
        def build(d, path):
            where = str(path)
            cat = self.category(_need(d, "category", where, str), path.parent)
            graw = _need(d, "group", where)
            if isinstance(graw, str):
                G = self.group(graw, path.parent)
            else:
                G = group_from_json(graw, f"{where}: group")
            try:
                return Grading(cat, G, {str(k): str(v) for k, v in _need(d, "degrees", where, dict).items()})
            except ValueError as exc:
                raise InputError(str(exc), where) from None
        return self._load(ref, base, build)

    def group(self, ref, base: Path | None = None) -> FiniteGroup:
        return self._load(ref, base, lambda d, path: group_from_json(d, str(path)))


def document_kind(data: dict) -> str:
    """Classify a JSON document by its distinguishing field."""
    for key, kind in (("vertices", "category"), ("object_map", "functor"), ("vertex_map", "quiver_map"),
                      ("dims", "representation"), ("action", "group_action"), ("degrees", "grading"),
                      ("table", "group")):
        if key in data:
            return kind
    raise InputError("unrecognised document")


def dump_document(ws: Workspace, ref, base: Path | None = None) -> dict:
    """Load a file through ``ws`` and serialize the resulting object again.

    Cross-file references are kept as written in the source document.
    """
    path = resolve(str(ref), base)
    raw = read_json(path)
    kind = document_kind(raw)
    if kind == "category":
        return category_to_json(ws.category(path))
    if kind == "functor":
        return functor_to_json(ws.functor(path), raw["source"], raw["target"])
    if kind == "quiver_map":
        q, _, _ = ws.quiver_map(path)
        return {"source": raw["source"], "target": raw["target"],
                "vertex_map": dict(q.vertex_map), "arrow_map": dict(q.arrow_map)}
    if kind == "representation":
        return representation_to_json(ws.representation(path), raw["category"])
    if kind == "group_action":
        act = ws.group_action(path)
        return {"category": raw["category"], **act.group.to_json(),
                "action": {g: {k: v for k, v in functor_to_json(F).items() if k not in ("source", "target")}
                           for g, F in act.functors.items() if g != act.group.identity}}
    if kind == "grading":
        g = ws.grading(path)
        return {"category": raw["category"], "group": g.group.to_json(), "degrees": dict(g.degrees)}
    return ws.group(path).to_json()


_GROUP_CACHE: dict[str, FiniteGroup] = {}


def group_from_json(d: dict, where: str) -> FiniteGroup:
    elements = _need(d, "elements", where, list)
    table = _need(d, "table", where, list)
    key = json.dumps([elements, table])
    if key not in _GROUP_CACHE:
        try:
            _GROUP_CACHE[key] = FiniteGroup(elements, table)
        except ValueError as exc:
            raise InputError(str(exc), where) from None
    return _GROUP_CACHE[key]


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, ensure_ascii=False)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
