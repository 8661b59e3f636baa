import json

import numpy as np
import pytest

from eigsmooth import LtiSystem, PoleError, PreconditionError
from eigsmooth.lti import random_system, transfer_eval


def scalar(a=-1.0, b=1.0, c=1.0, d=0.0):
    return LtiSystem(np.array([[a]]), np.array([[b]]), np.array([[c]]), np.array([[d]]))


def test_transfer_examples():
    s = scalar()
    assert transfer_eval(s, 0.0)[0, 0] == 1.0
    g = transfer_eval(s, 1.0)[0, 0]
    assert g == pytest.approx(1 / (1 + 1j)) and abs(g) == pytest.approx(2**-0.5)


def test_zero_input_gives_feedthrough():
    rng = np.random.default_rng(1)
    s = LtiSystem(random_system(1, 4, 2, 3).A, np.zeros((4, 2)), rng.standard_normal((3, 4)),
                  rng.standard_normal((3, 2)))
    for w in (0.0, 3.0, -50.0):
        assert np.array_equal(transfer_eval(s, w), s.D)


def test_pole_error():
    s = LtiSystem(np.zeros((1, 1)), np.ones((1, 1)), np.ones((1, 1)), np.zeros((1, 1)))
    with pytest.raises(PoleError):
        transfer_eval(s, 0.0)


def test_dimension_validation():
    with pytest.raises(ValueError):
        LtiSystem(np.eye(2), np.ones((3, 1)), np.ones((1, 2)), np.zeros((1, 1)))


def test_stability():
    assert random_system(42, 6, 2, 2).is_stable()
    with pytest.raises(PreconditionError, match="A not asymptotically stable"):
        scalar(a=1.0).require_stable()


def test_json_roundtrip_bitwise(tmp_path):
    s = random_system(5, 5, 2, 3, complex_valued=True)
    path = tmp_path / "s.json"
    s.dump(path)
    back = LtiSystem.load(path)
    for name in "ABCD":
        assert np.array_equal(getattr(s, name), getattr(back, name))
    obj = json.loads(path.read_text())
    assert set(obj) == {"A", "B", "C", "D"}
    assert len(obj["A"][0][0]) == 2


def test_random_system_deterministic():
    a, b = random_system(42, 6, 2, 2), random_system(42, 6, 2, 2)
    assert all(np.array_equal(getattr(a, n), getattr(b, n)) for n in "ABCD")
