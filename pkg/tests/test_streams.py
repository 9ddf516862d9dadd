import numpy as np
import pytest

from subweibull import ParameterError, RandomStream


def test_same_handle_same_sequence():
    a = RandomStream(12345, 7).uniforms(1000)
    b = RandomStream(12345, 7).uniforms(1000)
    assert np.array_equal(a, b)


def test_distinct_substreams_differ():
    a = RandomStream(12345, 0).uniforms(100)
    b = RandomStream(12345, 1).uniforms(100)
    assert not np.array_equal(a, b)


def test_distinct_seeds_differ():
    a = RandomStream(1, 0).uniforms(100)
    b = RandomStream(2, 0).uniforms(100)
    assert not np.array_equal(a, b)


def test_prefix_stability():
    # uniform j is a function of (seed, stream_index, j) alone
    long = RandomStream(9, 3).uniforms(500)
    short = RandomStream(9, 3).uniforms(120)
    assert np.array_equal(long[:120], short)


def test_uniforms_in_unit_interval():
    u = RandomStream(0, 0).uniforms(10_000)
    assert u.min() >= 0.0 and u.max() < 1.0


def test_substream_helper():
    s = RandomStream(5, 0)
    assert s.substream(9) == RandomStream(5, 9)


@pytest.mark.parametrize("bad", [-1, 2**64, 1.5, "x", True])
def test_rejects_bad_fields(bad):
    with pytest.raises(ParameterError):
        RandomStream(bad, 0)
    with pytest.raises(ParameterError):
        RandomStream(0, bad)


def test_rejects_bad_count():
    with pytest.raises(ParameterError):
        RandomStream(0, 0).uniforms(0)
