import numpy as np

from hnhn.rng import CounterRng


def test_same_seed_same_stream():
    a = CounterRng(42).random((3, 5))
    b = CounterRng(42).random((3, 5))
    assert np.array_equal(a, b)


def test_different_seeds_differ():
    a = CounterRng(1).random(64)
    b = CounterRng(2).random(64)
    assert not np.array_equal(a, b)


def test_block_shape_independence():
    # Drawing 10 values at once or one at a time yields the same stream.
    whole = CounterRng(7).random(10)
    one_at_a_time = CounterRng(7)
    singles = np.array([one_at_a_time.random(1)[0] for _ in range(10)])
    assert np.array_equal(whole, singles)


def test_random_in_unit_interval():
    values = CounterRng(3).random(10_000)
    assert values.min() >= 0.0
    assert values.max() < 1.0
    # Mean of U[0,1) concentrates near 1/2.
    assert abs(values.mean() - 0.5) < 0.02


def test_uniform_bounds():
    values = CounterRng(11).uniform(-2.0, 3.0, (100,))
    assert values.min() >= -2.0
    assert values.max() < 3.0


def test_integers_range_and_coverage():
    values = CounterRng(5).integers(7, 5_000)
    assert values.min() >= 0
    assert values.max() <= 6
    assert set(np.unique(values)) == set(range(7))


def test_integers_rejects_bad_upper():
    import pytest

    with pytest.raises(ValueError):
        CounterRng(0).integers(0, 3)


def test_permutation_is_permutation():
    perm = CounterRng(9).permutation(50)
    assert sorted(perm) == list(range(50))


def test_shuffled_preserves_multiset():
    values = np.array([3, 1, 4, 1, 5, 9, 2, 6])
    shuffled = CounterRng(13).shuffled(values)
    assert sorted(shuffled) == sorted(values)


def test_spawn_streams_are_distinct_and_stable():
    parent = CounterRng(21)
    a1 = parent.spawn(0).random(16)
    a2 = CounterRng(21).spawn(0).random(16)
    b = CounterRng(21).spawn(1).random(16)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, CounterRng(21).random(16))
