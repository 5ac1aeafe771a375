"""Parsing and validation of JSON model files into typed model bundles."""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import fincat
from .finalg import QftFunctor, validate_algebra, validate_qft
from .fincat import CatFunctor, FinCategory, LocStructure, build_fibered_model
from .qlinalg import QMatrix, rat


class ModelError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class Model:
    name: str
    description: str
    loc: LocStructure
    strcat: FinCategory
    pi: CatFunctor
    A: QftFunctor

    def fibered(self, order: str = "normal") -> fincat.FiberedModel:
        return build_fibered_model(self.pi, order)


def _category_from_dict(data, path):
    try:
        morphisms = [
            (m["name"], m["source"], m["target"]) for m in data["morphisms"]
        ]
        compose = {(g, f): h for g, f, h in data["compose"]}
        cat = FinCategory(data["objects"], morphisms, data["identity"], compose)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError([f"{path}: malformed category data ({exc})"])
    violations = cat.violations()
    if violations:
        raise ModelError([f"{path}: {v}" for v in violations])
    return cat


def model_from_dict(data: dict) -> Model:
    if not isinstance(data, dict):
        raise ModelError(["$: model file must be a JSON object"])
    if data.get("format") != 1:
        raise ModelError(["$.format: expected 1"])
    meta = data.get("metadata", {})
    name = meta.get("name", "unnamed")
    description = meta.get("description", "")

    base = _category_from_dict(data.get("loc", {}), "$.loc")
    strcat = _category_from_dict(data.get("str", {}), "$.str")

    locdata = data["loc"]
    try:
        loc = fincat.validate_loc_structure(
            base, locdata.get("causal_cospans", []), locdata.get("cauchy", [])
        )
    except fincat.CategoryError as exc:
        raise ModelError([f"$.loc: {v}" for v in exc.violations] or [f"$.loc: {exc}"])

    proj = data.get("projection", {})
    try:
        pi = fincat.validate_functor(
            strcat, base, proj.get("objects", {}), proj.get("morphisms", {})
        )
    except fincat.CategoryError as exc:
        raise ModelError(
            [f"$.projection: {v}" for v in exc.violations] or [f"$.projection: {exc}"]
        )

    errors = []
    algebras = {}
    for S in strcat.objects:
        spec = data.get("algebras", {}).get(S)
        if spec is None:
            errors.append(f"$.algebras.{S}: missing")
            continue
        try:
            algebras[S] = validate_algebra(
                spec["dim"], spec["structure_constants"], spec["unit"]
            )
        except (KeyError, ValueError) as exc:
            errors.append(f"$.algebras.{S}: {exc}")
    matrices = {}
    for g in strcat.morphisms:
        spec = data.get("algebra_maps", {}).get(g)
        if spec is None:
            errors.append(f"$.algebra_maps.{g}: missing")
            continue
        try:
            matrices[g] = QMatrix.from_rows(
                [[rat(v) for v in row] for row in spec]
            )
        except ValueError as exc:
            errors.append(f"$.algebra_maps.{g}: {exc}")
    if errors:
        raise ModelError(errors)
    try:
        A = validate_qft(strcat, algebras, matrices)
    except ValueError as exc:
        raise ModelError([f"$.algebra_maps: {exc}"])
    return Model(name, description, loc, strcat, pi, A)


def parse_model(path) -> Model:
    with open(path) as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ModelError([f"$: invalid JSON ({exc})"])
    return model_from_dict(data)
