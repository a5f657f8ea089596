import json

import pytest

from stele.canon import canonical_bytes, canonical_json


def test_floats_fixed_six_decimals():
    assert canonical_json(0.5) == "0.500000"
    assert canonical_json(1.0 / 3.0) == "0.333333"
    assert canonical_json([1.25, -2.0]) == "[1.250000,-2.000000]"


def test_ints_and_scalars_untouched():
    assert canonical_json(42) == "42"
    assert canonical_json(True) == "true"
    assert canonical_json(None) == "null"


def test_keys_sorted():
    assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_unicode_not_escaped():
    assert canonical_json("江湖") == '"江湖"'


def test_nested_structures():
    doc = {"z": [1, {"y": 0.1}], "a": "x"}
    assert canonical_json(doc) == '{"a":"x","z":[1,{"y":0.100000}]}'


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        canonical_json(float("nan"))
    with pytest.raises(ValueError):
        canonical_json([float("inf")])


def test_non_string_keys_rejected():
    with pytest.raises(TypeError):
        canonical_json({1: "x"})


def test_reload_then_rewrite_is_stable():
    doc = {"values": [0.1234567, 2.5, 7], "name": "column"}
    first = canonical_bytes(doc)
    second = canonical_bytes(json.loads(first))
    assert first == second
