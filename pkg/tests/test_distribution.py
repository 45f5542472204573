import json

import numpy as np
import pytest

from hgnoise.distribution import Distribution


def test_dense_roundtrip(rng):
    v = rng.random(16)
    v /= v.sum()
    d = Distribution.from_dense(v)
    assert d.n == 4
    assert np.allclose(d.to_dense(), v)
    assert d.total() == pytest.approx(1.0)


def test_infidelity_and_validation():
    d = Distribution(2, {0: 0.9, 3: 0.1})
    assert d.infidelity() == pytest.approx(0.1)
    assert d.validate() is d
    with pytest.raises(ValueError):
        Distribution(2, {0: 0.5}).validate()
    with pytest.raises(ValueError):
        Distribution(2, {0: 1.1, 1: -0.1}).validate()
    assert Distribution(2, {0: 1.1, 1: -0.1}, kind="quasi").validate().negativity() == pytest.approx(0.1)


def test_bad_masks():
    with pytest.raises(ValueError):
        Distribution(2, {4: 1.0})
    with pytest.raises(ValueError):
        Distribution(2, {0: 1.0}, kind="weird")


def test_json_roundtrip():
    d = Distribution(5, {0: 0.75, 0b10001: 0.25}, kind="quasi")
    data = json.loads(json.dumps(d.to_json()))
    assert data["entries"][1]["mask"] == "0x11"
    back = Distribution.from_json(data)
    assert back.kind == "quasi" and dict(back.entries) == dict(d.entries)


def test_point_mass():
    d = Distribution.point(3)
    assert d[0] == 1.0 and d[5] == 0.0 and d.support() == [0]
