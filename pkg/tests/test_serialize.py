import json
import math

import numpy as np
import pytest

from mhi.serialize import dump_bytes, dumps, format_float


def test_scalars():
    assert dumps(None) == "null"
    assert dumps(True) == "true"
    assert dumps(False) == "false"
    assert dumps(42) == "42"
    assert dumps(-1.5) == "-1.5"
    assert dumps("a\"b") == '"a\\"b"'


def test_float_round_trip_exact():
    rng = np.random.Generator(np.random.PCG64(31))
    for _ in range(200):
        value = float(rng.standard_normal() * 10.0 ** rng.integers(-20, 20))
        assert float(format_float(value)) == value


def test_non_finite_rejected():
    for value in (math.inf, -math.inf, math.nan):
        with pytest.raises(ValueError):
            dumps(value)


def test_numpy_scalars_and_arrays():
    assert dumps(np.int64(3)) == "3"
    assert dumps(np.float64(0.5)) == "0.5"
    doc = dumps(np.array([1.0, 2.0]))
    assert json.loads(doc) == [1.0, 2.0]
    nested = dumps(np.arange(4).reshape(2, 2))
    assert json.loads(nested) == [[0, 1], [2, 3]]


def test_dict_insertion_order_kept():
    doc = dumps({"b": 1, "a": 2})
    assert doc.index('"b"') < doc.index('"a"')


def test_empty_containers():
    assert dumps([]) == "[]"
    assert dumps({}) == "{}"


def test_output_is_valid_json():
    obj = {"name": "m", "values": [1, 2.5, None, True], "inner": {"k": [[]]}}
    assert json.loads(dumps(obj)) == obj


def test_dump_bytes_trailing_newline():
    data = dump_bytes({"x": 1})
    assert data.endswith(b"\n")
    assert json.loads(data) == {"x": 1}


def test_deterministic_bytes():
    obj = {"w": np.linspace(0, 1, 7), "b": [np.float64(1e-17)]}
    assert dump_bytes(obj) == dump_bytes(obj)


def test_unserializable_type():
    with pytest.raises(TypeError):
        dumps(object())
