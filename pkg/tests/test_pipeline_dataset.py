import math

import pytest

from cadkit.errors import TooFewSamplesError
from cadkit.pipeline import approx_token_count, split_dataset, token_stats


def test_split_100_is_90_5_5():
    ids = [f"id{i:03d}" for i in range(100)]
    split = split_dataset(ids, seed=7)
    assert (len(split.train), len(split.val), len(split.test)) == (90, 5, 5)


def test_split_101_largest_remainder():
    ids = [f"id{i:03d}" for i in range(101)]
    split = split_dataset(ids, seed=7)
    assert (len(split.train), len(split.val), len(split.test)) == (91, 5, 5)


def test_split_deterministic_and_seed_sensitive():
    ids = [f"id{i:03d}" for i in range(50)]
    a = split_dataset(ids, seed=1)
    b = split_dataset(ids, seed=1)
    c = split_dataset(ids, seed=2)
    assert a == b
    assert a != c


def test_split_disjoint_and_covering():
    ids = [f"id{i:03d}" for i in range(137)]
    split = split_dataset(ids, seed=3)
    union = set(split.train) | set(split.val) | set(split.test)
    assert union == set(ids)
    assert split.total == 137
    assert not (set(split.train) & set(split.val))
    assert not (set(split.train) & set(split.test))
    assert not (set(split.val) & set(split.test))


def test_split_too_few_rejected():
    with pytest.raises(TooFewSamplesError):
        split_dataset([f"id{i}" for i in range(19)], seed=0)


def test_split_duplicate_ids_rejected():
    with pytest.raises(ValueError):
        split_dataset(["a"] * 25, seed=0)


def test_token_stats_with_injected_counts():
    corpus = ["a", "bb", "ccc"]
    counts = {"a": 194, "bb": 395, "ccc": 3535}
    stats = token_stats(corpus, count_fn=lambda t: counts[t])
    assert stats.min == 194
    assert stats.max == 3535
    assert stats.median == 395
    assert stats.mean == pytest.approx((194 + 395 + 3535) / 3)
    assert stats.fraction_below(1024) == pytest.approx(2 / 3)
    assert stats.fraction_below(math.inf) == 1.0


def test_token_stats_single_sample():
    stats = token_stats(["hello world"])
    assert stats.min == stats.max == stats.mean == stats.median == 2


def test_fraction_below_monotone():
    stats = token_stats(["a"] * 3 + ["a b c"] * 4 + ["a b c d e f"] * 5, count_fn=len)
    limits = [0, 1, 2, 5, 10, 100]
    fracs = [stats.fraction_below(x) for x in limits]
    assert all(f1 <= f2 for f1, f2 in zip(fracs, fracs[1:]))


def test_approx_token_count_counts_words_and_symbols():
    # moveTo ( 0 . 0 , 0 . 0 )
    assert approx_token_count("moveTo(0.0, 0.0)") == 10
    assert approx_token_count("") == 0
