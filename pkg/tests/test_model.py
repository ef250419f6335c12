import copy
from fractions import Fraction

import pytest

from morphsynth.errors import ValidationError
from morphsynth.model import (FIXTURES, binarize_compatibility, composition_level, compatibility,
                              fixture_document, format_fraction, load_fixture, make_composition,
                              to_document, to_fraction, validate_morphology, env_cap)


def test_toy_shape(toy):
    assert [p.id for p in toy.parts] == ["X", "Y", "Z"]
    assert toy.space_size() == 18
    assert (toy.k, toy.l) == (3, 3)


def test_gsm_shape(gsm):
    assert [n.id for n in gsm.internal_nodes()] == ["S", "A", "B"]
    assert [p.id for p in gsm.leaves("B")] == ["V", "U", "T"]
    assert gsm.space_size() == 3000
    assert gsm.space_size("A") == 20
    # sibling tables only: 1 pair under A, 3 under B
    assert len(gsm.compat.part_pairs) == 4
    assert not gsm.compat.covers("M", "V")


@pytest.mark.parametrize("name", FIXTURES)
def test_round_trip(name):
    m = load_fixture(name)
    assert validate_morphology(to_document(m)) == m


def test_compatibility_lookup(gsm):
    assert compatibility(gsm, "M4", "L2") == compatibility(gsm, "L2", "M4") == 3
    with pytest.raises(ValidationError):
        compatibility(gsm, "M1", "M2")


def test_binarize_keeps_coverage(gsm):
    b = binarize_compatibility(gsm.compat, 2)
    assert b.part_pairs == gsm.compat.part_pairs
    assert all(v == int(gsm.compat.entries[k] >= 2) for k, v in b.entries.items())
    for bad in (0, 4):
        with pytest.raises(ValidationError):
            binarize_compatibility(gsm.compat, bad)


def test_composition_helpers(gsm):
    c = make_composition(gsm, ["L2", "M4", "V1", "U5", "T1"])
    assert c.label() == "M4*L2*V1*U5*T1"
    assert composition_level(gsm, c) == 3
    assert c["U"] == "U5"
    with pytest.raises(ValidationError):
        make_composition(gsm, ["M4", "M1", "V1", "U5", "T1"])
    with pytest.raises(ValidationError):
        make_composition(gsm, ["M4", "L2"])


def _doc(name="toy_xyz"):
    return copy.deepcopy(fixture_document(name))


def _broken(mutator, name="toy_xyz"):
    doc = _doc(name)
    mutator(doc)
    return doc


@pytest.mark.parametrize("mutate", [
    lambda d: d["alternatives"]["Y"].append({"id": "X1", "priority": 1}),
    lambda d: d["alternatives"]["X"][0].update(priority=4),
    lambda d: d["alternatives"].update(Y=[]),
    lambda d: d["compatibility"]["S"].pop(),
    lambda d: d["compatibility"]["S"].append({"a": "X1", "b": "X2", "level": 1}),
    lambda d: d["compatibility"]["S"].append({"a": "X1", "b": "Y1", "level": 1}),
    lambda d: d["compatibility"]["S"][0].update(level=5),
    lambda d: d["system"].update(children=[{"id": "X"}]),
    lambda d: d.update(scales={"k": 0, "l": 3}),
])
def test_invalid_instances(mutate):
    with pytest.raises(ValidationError):
        validate_morphology(_broken(mutate))


def test_criteria_rules():
    def weights(d):
        d["criteria"]["M"][0]["weight"] = "0.3"
    with pytest.raises(ValidationError, match="sum"):
        validate_morphology(_broken(weights, "gsm"))

    def direction(d):
        del d["criteria"]["M"][0]["direction"]
    with pytest.raises(ValidationError):
        validate_morphology(_broken(direction, "gsm"))

    def estimates(d):
        del d["alternatives"]["M"][0]["estimates"]["Cm1"]
    with pytest.raises(ValidationError):
        validate_morphology(_broken(estimates, "gsm"))


def test_fill_missing():
    doc = _broken(lambda d: d["compatibility"]["S"].pop())
    m = validate_morphology(doc, fill_missing=0)
    assert m.compat.level("Y2", "Z3") == 0
    assert m.space_size() == 18


def test_numbers():
    assert to_fraction("0.1") == Fraction(1, 10)
    assert to_fraction(0.1) == Fraction(1, 10)
    assert to_fraction("2/3") == Fraction(2, 3)
    for bad in (True, "x", None):
        with pytest.raises(ValidationError):
            to_fraction(bad)
    assert format_fraction(Fraction(1, 4)) == "0.25"
    assert format_fraction(Fraction(-3, 8)) == "-0.375"
    assert format_fraction(Fraction(1, 3)) == "1/3"
    assert format_fraction(Fraction(6)) == "6"


def test_env_cap(monkeypatch):
    monkeypatch.delenv("MORPHSYNTH_CAP", raising=False)
    assert env_cap(7) == 7
    monkeypatch.setenv("MORPHSYNTH_CAP", "12")
    assert env_cap(7) == 12
    monkeypatch.setenv("MORPHSYNTH_CAP", "lots")
    with pytest.raises(ValidationError):
        env_cap(7)
