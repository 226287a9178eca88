import json
from fractions import Fraction

import pytest

from decaykit.registry import (
    ENV_VAR,
    Registry,
    RegistryError,
    decayed_registry_lookup,
    default_registry_path,
    knot_presentation,
    parse_knot_id,
)


@pytest.mark.parametrize(
    "knot,decay",
    [
        ("torus:2,3", 5),
        ("torus:3,4", 11),
        ("torus:2,5", 9),
        ("pretzel:-2,3,5", 15),
        ("pretzel:-2,3,7", 17),
        ("twisted-torus:3,5", 17),
        ("cable:2,11:torus:2,3", 22),
    ],
)
def test_decay_formulas(knot, decay):
    assert decayed_registry_lookup(knot) == decay


def test_absent_decays():
    assert decayed_registry_lookup("twisted-torus:3,4") is None
    assert decayed_registry_lookup("cable:2,7:torus:2,3") is None
    assert decayed_registry_lookup("cable:2,11:cable:2,7:torus:2,3") is None


@pytest.mark.parametrize("bad", ["torus:2,4", "torus:1,3", "pretzel:-2,3,4", "twisted-torus:3,6", "knot:1", "torus:2"])
def test_rejects_invalid_ids(bad):
    with pytest.raises(RegistryError):
        parse_knot_id(bad)


def test_shipped_registry_consistent():
    reg = Registry.load()
    assert "torus:2,3" in reg.ids()
    for rec in reg.records:
        if rec.kind == "cable":
            p, q = rec.params[:2]
            assert p * q - p - q < p * q == rec.decay


def test_stored_mismatch_rejected(tmp_path):
    path = tmp_path / "reg.json"
    path.write_text(json.dumps([{"id": "torus:2,3", "decay": "6"}]))
    with pytest.raises(RegistryError, match="disagrees"):
        Registry.load(str(path))


def test_env_override_and_add(tmp_path, monkeypatch):
    path = tmp_path / "reg.json"
    path.write_text("[]")
    monkeypatch.setenv(ENV_VAR, str(path))
    assert default_registry_path() == str(path)
    reg = Registry.load()
    reg.add("torus:2,7")
    reg.save()
    again = Registry.load()
    assert again.ids() == ["torus:2,7"]
    assert again.lookup("torus:2,7").decay == Fraction(13)
    assert json.loads(path.read_text())[0]["decay"] == "13"


def test_presentations():
    t = knot_presentation(parse_knot_id("torus:2,3"))
    assert t.generators == ("x", "y")
    c = knot_presentation(parse_knot_id("cable:2,11:torus:2,3"))
    assert c.abelianization().rank == 1
    assert knot_presentation(parse_knot_id("pretzel:-2,3,7")) is None
