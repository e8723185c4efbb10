import json

import pytest

from clarke_mirror import fixtures
from clarke_mirror.polytope import is_reflexive


def test_sixteen_reflexive_polygons():
    ids = fixtures.polygon_ids()
    assert len(ids) == 16
    assert all(is_reflexive(fixtures.polygon(i)) for i in ids)


def test_aliases_and_unknown_names():
    assert fixtures.polygon("P2").name == fixtures.polygon_record("P2")["id"]
    assert sorted(fixtures.polygon("P1xP1").vertices) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    with pytest.raises(KeyError):
        fixtures.polygon("nope")
    with pytest.raises(KeyError):
        fixtures.named_document("nope.json")


def test_named_documents():
    assert fixtures.named_document("square.json")["vertices"] == fixtures.named_document("square")["vertices"]
    assert fixtures.named_document("r04")["rank"] == 2


def test_nef_from_json_errors():
    doc = fixtures.square_data()["square_axis"]
    assert fixtures.nef_from_json(doc).k == 2
    with pytest.raises(ValueError):
        fixtures.nef_from_json({"parts": [[0]]})
    with pytest.raises(ValueError):
        fixtures.nef_from_json(dict(doc, parts=[[0, 1], [2, 9]]))


def test_env_var_override(tmp_path, monkeypatch):
    doc = fixtures.p1_examples()
    doc["segment"] = {"rank": 1, "lattice": "N", "vertices": [[-1], [1]], "name": "override"}
    (tmp_path / "p1_examples.json").write_text(json.dumps(doc))
    monkeypatch.setenv(fixtures.ENV_VAR, str(tmp_path))
    assert fixtures.segment().name == "override"
    with pytest.raises(FileNotFoundError):
        fixtures.square_data()
