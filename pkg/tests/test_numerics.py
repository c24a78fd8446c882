import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dwnls._numerics import bisect_newton, dumps_json, fmt


class TestFmt:
    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_round_trip(self, x):
        assert float(fmt(x)) == x

    def test_fixed_digits(self):
        assert fmt(0.1) == "0.10000000000000001"
        assert fmt(3) == "3" and fmt(True) == "true"


class TestDumpsJson:
    def test_parses_back(self):
        doc = {"b": [1, 2.5, None, True], "a": {"x": "s", "y": np.float64(0.1)}, "c": np.int64(4)}
        back = json.loads(dumps_json(doc))
        assert back == {"a": {"x": "s", "y": 0.1}, "b": [1, 2.5, None, True], "c": 4}

    def test_sorted_and_stable(self):
        text = dumps_json({"z": 1.0, "a": 2.0})
        assert text.index('"a"') < text.index('"z"')
        assert text == dumps_json({"a": 2.0, "z": 1.0})

    def test_non_finite_become_null(self):
        assert json.loads(dumps_json([math.inf, math.nan])) == [None, None]

    def test_empty_containers(self):
        assert json.loads(dumps_json({"a": [], "b": {}})) == {"a": [], "b": {}}

    def test_rejects_unknown(self):
        with pytest.raises(TypeError):
            dumps_json({"a": object()})


class TestBisectNewton:
    def test_polished_root(self):
        r = bisect_newton(lambda t: t * t - 2, lambda t: 2 * t, 0.0, 2.0)
        assert r == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_without_derivative(self):
        r = bisect_newton(math.cos, None, 0.0, 3.0)
        assert r == pytest.approx(math.pi / 2, abs=1e-12)

    def test_endpoint_root(self):
        assert bisect_newton(lambda t: t, None, 0.0, 1.0) == 0.0

    def test_requires_sign_change(self):
        with pytest.raises(ValueError):
            bisect_newton(lambda t: t * t + 1, None, -1.0, 1.0)

    def test_newton_stays_in_bracket(self):
        # derivative deliberately wrong: the polish must not leave the bracket
        r = bisect_newton(lambda t: t - 0.3, lambda t: 1e-9, 0.0, 1.0)
        assert abs(r - 0.3) < 1e-12
