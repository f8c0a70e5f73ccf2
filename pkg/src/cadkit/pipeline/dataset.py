"""Dataset operations: deterministic splits and token statistics."""

from __future__ import annotations

import math
import re
import statistics
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from ..errors import TooFewSamplesError

SPLIT_FRACTIONS = (0.90, 0.05, 0.05)
MIN_SPLIT_SIZE = 20

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]
    seed: int

    def __post_init__(self):
        ids = set(self.train) | set(self.val) | set(self.test)
        if len(ids) != len(self.train) + len(self.val) + len(self.test):
            raise ValueError("split lists overlap")

    @property
    def total(self) -> int:
        return len(self.train) + len(self.val) + len(self.test)


def split_dataset(ids: Sequence[str], seed: int) -> DatasetSplit:
    """Shuffle deterministically and split 90/5/5 by largest remainder."""
    ids = list(ids)
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate ids")
    if len(ids) < MIN_SPLIT_SIZE:
        raise TooFewSamplesError(
            f"need at least {MIN_SPLIT_SIZE} ids to keep every split nonempty, got {len(ids)}"
        )
    order = np.random.default_rng(seed).permutation(len(ids))
    shuffled = [ids[i] for i in order]
    counts = _largest_remainder(len(ids), SPLIT_FRACTIONS)
    train = tuple(shuffled[: counts[0]])
    val = tuple(shuffled[counts[0] : counts[0] + counts[1]])
    test = tuple(shuffled[counts[0] + counts[1] :])
    return DatasetSplit(train=train, val=val, test=test, seed=seed)


def _largest_remainder(n: int, fractions: tuple[float, ...]) -> list[int]:
    exact = [n * f for f in fractions]
    counts = [math.floor(e) for e in exact]
    leftover = n - sum(counts)
    by_remainder = sorted(range(len(fractions)), key=lambda i: exact[i] - counts[i], reverse=True)
    for i in by_remainder[:leftover]:
        counts[i] += 1
    return counts


def approx_token_count(text: str) -> int:
    """Approximate tokenizer: word and symbol units, not any model's BPE."""
    return len(_TOKEN_RE.findall(text))


@dataclass(frozen=True)
class TokenStats:
    counts: tuple[int, ...]
    min: int
    max: int
    mean: float
    median: float

    def fraction_below(self, limit: float) -> float:
        return sum(1 for c in self.counts if c < limit) / len(self.counts)


def token_stats(
    corpus: Iterable[str], count_fn: Optional[Callable[[str], int]] = None
) -> TokenStats:
    """Exact order statistics of per-sample token counts.

    count_fn defaults to the approximate word/symbol tokenizer; inject a
    model tokenizer for faithful counts.
    """
    counter = count_fn or approx_token_count
    counts = tuple(counter(text) for text in corpus)
    if not counts:
        raise ValueError("empty corpus")
    return TokenStats(
        counts=counts,
        min=min(counts),
        max=max(counts),
        mean=statistics.fmean(counts),
        median=statistics.median(counts),
    )
