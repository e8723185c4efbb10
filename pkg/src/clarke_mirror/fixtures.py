"""Bundled example data: reflexive polygons, the P^1 examples, square nef data.

Set ``CLARKE_MIRROR_FIXTURES`` to a directory to load files from there
instead of the packaged copies.
"""

from __future__ import annotations

import json
import os
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .fan import StackyFan
from .nefclarke import NefPartition, validate_nef_partition
from .polytope import Polytope

ENV_VAR = "CLARKE_MIRROR_FIXTURES"


def fixture_dir() -> Path | None:
    value = os.environ.get(ENV_VAR)
    return Path(value) if value else None


def load_json(name: str) -> dict:
    override = fixture_dir()
    if override is not None:
        path = override / name
        if not path.exists():
            raise FileNotFoundError(f"fixture {name} not found in {override}")
        return json.loads(path.read_text())
    return json.loads(resources.files("clarke_mirror").joinpath("data").joinpath(name).read_text())


def nef_from_json(doc: dict) -> NefPartition:
    """A nef partition from ``{"polytope": <doc>, "parts": [[vertex index, ...], ...]}``."""
    try:
        delta = Polytope.from_json(doc["polytope"])
        parts = [[int(i) for i in part] for part in doc["parts"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed nef partition document: {exc}") from exc
    if any(not 0 <= i < len(delta.vertices) for part in parts for i in part):
        raise ValueError("vertex index out of range")
    return validate_nef_partition(delta, parts)


@lru_cache(maxsize=None)
def _polygon_doc() -> dict:
    return load_json("reflexive_polygons.json")


def polygon_records() -> list[dict]:
    return list(_polygon_doc()["polygons"])


def polygon_ids() -> list[str]:
    return [r["id"] for r in polygon_records()]


def polygon(key: str) -> Polytope:
    """Look up a reflexive polygon by id (``r05c``) or alias (``P2``, ``dP6``)."""
    for rec in polygon_records():
        if key == rec["id"] or key in rec["aliases"]:
            return Polytope([tuple(v) for v in rec["vertices"]], name=rec["id"])
    raise KeyError(f"unknown polygon {key!r}")


def polygon_record(key: str) -> dict:
    for rec in polygon_records():
        if key == rec["id"] or key in rec["aliases"]:
            return rec
    raise KeyError(f"unknown polygon {key!r}")


def p1_examples() -> dict:
    return load_json("p1_examples.json")


def segment() -> Polytope:
    return Polytope.from_json(p1_examples()["segment"])


def segment_nef(k: int) -> NefPartition:
    return nef_from_json(p1_examples()[f"nef_k{k}"])


def p1_fans() -> dict[str, StackyFan]:
    doc = p1_examples()
    return {name: StackyFan.from_json(doc[name]) for name in ("sigma_L_stacky", "sigma_L_plain", "sigma_check")}


def square_data() -> dict:
    return load_json("square_k2.json")


def square_axis_nef() -> NefPartition:
    """The cross polygon with its two axis parts, whose toric variety is ``P^1 x P^1``."""
    return nef_from_json(square_data()["square_axis"])


def named_document(name: str) -> dict:
    """Bundled JSON document by short name, so commands accept ``square.json`` offline."""
    key = name[:-5] if name.endswith(".json") else name
    p1 = p1_examples()
    sq = square_data()
    table = {
        "square": sq["square"],
        "cross": sq["cross"],
        "square-axis": sq["square_axis"],
        "segment": p1["segment"],
        "segment-k1": p1["nef_k1"],
        "segment-k2": p1["nef_k2"],
        "p1-sigma": p1["sigma_L_stacky"],
        "p1-sigma-plain": p1["sigma_L_plain"],
        "p1-sigma-check": p1["sigma_check"],
    }
    if key in table:
        return table[key]
    try:
        rec = polygon_record(key)
    except KeyError:
        raise KeyError(f"no bundled document named {name!r}") from None
    return {"rank": 2, "lattice": "N", "vertices": rec["vertices"], "name": rec["id"]}


__all__ = [
    "ENV_VAR",
    "fixture_dir",
    "load_json",
    "named_document",
    "nef_from_json",
    "p1_examples",
    "p1_fans",
    "polygon",
    "polygon_ids",
    "polygon_record",
    "polygon_records",
    "segment",
    "segment_nef",
    "square_axis_nef",
    "square_data",
]
