import math

import pytest
from sklearn.base import clone

from qmpc._validation import check_circuits, check_count, check_sigma, check_threshold
from qmpc.partition import QuCPAllocator
from qmpc.qasm import load_benchmark
from qmpc.zne import GateFolder, ZeroNoiseExtrapolator


@pytest.mark.parametrize("est", [QuCPAllocator(sigma=8.0, threshold=0.1),
                                 GateFolder(scale_factors=(1, 3), random_state=2),
                                 ZeroNoiseExtrapolator(method="polynomial", order=1)])
def test_params_round_trip(est):
    params = est.get_params()
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    twin.set_params(**params)
    assert repr(twin) == repr(est)


def test_unfitted_raises():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        QuCPAllocator().predict([load_benchmark("adder")])
    with pytest.raises(NotFittedError):
        ZeroNoiseExtrapolator().predict([0.0])
    with pytest.raises(NotFittedError):
        GateFolder().transform(load_benchmark("adder"))


def test_allocator_rejects_non_device():
    with pytest.raises(TypeError):
        QuCPAllocator().fit("toronto-27")


def test_validation_helpers():
    assert check_sigma(4) == 4.0
    for bad in (0.5, math.nan, math.inf):
        with pytest.raises(ValueError):
            check_sigma(bad)
    assert check_threshold(None) == math.inf
    assert check_threshold("none") == math.inf
    assert check_threshold(0) == 0.0
    with pytest.raises(ValueError):
        check_threshold(-0.1)
    assert check_count(3, "shots") == 3
    with pytest.raises(ValueError):
        check_count(0, "shots")
    with pytest.raises((TypeError, ValueError)):
        check_circuits([])
    with pytest.raises(TypeError):
        check_circuits(["adder"])
