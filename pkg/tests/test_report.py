import json
import math

import pytest

from eigsmooth import SolveReport
from eigsmooth.report import empirical_order


def test_order_linear():
    assert empirical_order([2.0**-k for k in range(50)], limit=0.0) == pytest.approx(1.0, abs=0.1)


def test_order_quadratic():
    assert empirical_order([2.0 ** -(2**k) for k in range(7)], limit=0.0) == pytest.approx(2.0, abs=0.05)


def test_order_last_iterate_as_limit():
    xs = [1 + 2.0 ** -(2**k) for k in range(1, 6)] + [1.0]
    assert empirical_order(xs) == pytest.approx(2.0, abs=0.05)


def test_order_too_short():
    with pytest.raises(ValueError):
        empirical_order([1.0, 0.5, 0.25])


def test_order_nan_when_instant():
    assert math.isnan(empirical_order([1.0, 1.0, 1.0, 1.0]))


def test_report_json():
    rep = SolveReport(1.5, 0.25, [{"level": 1.0}], [(0.0, 1.0)], 2.0, extra={"z": complex(1, 2)})
    d = json.loads(json.dumps(rep.as_dict()))
    assert d["optimum"] == 1.5 and d["extra"]["z"] == [1.0, 2.0]
