"""Oracles for the shelf shuffle: exact enumeration and seeded sampling.

The inverse shelf shuffle cuts the ordered deck into ``2m`` packets with
symmetric multinomial sizes, reverses packets 2, 4, ... (counted from 1),
and riffles the packets together GSR-style.  The inverse of the resulting
arrangement is a draw from the ``m``-shelf shuffle measure.

Reproducibility: :func:`simulate` draws samples in fixed chunks of
``CHUNK`` and chunk ``i`` uses the ``i``-th child of
``numpy.random.SeedSequence(seed)`` with a PCG64 generator, so a given
``(n, m, samples, seed)`` always yields the same histogram.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterator, Sequence

import numpy as np

from shelfmix import config
from shelfmix.errors import BoundExceeded
from shelfmix.permstat import Permutation, _valleys, max_valleys, valley_table
from shelfmix.shelfmeasure import q_value

CHUNK = 1 << 16


def _arrangement_to_sample(arrangement: Sequence[int]) -> Permutation:
    """Invert a deck arrangement (position -> card, 1-based cards)."""
    inv = [0] * len(arrangement)
    for pos, card in enumerate(arrangement, start=1):
        inv[card - 1] = pos
    return tuple(inv)


def _cut_packets(n: int, sizes: Sequence[int]) -> list[list[int]]:
    packets, start = [], 1
    for i, s in enumerate(sizes):
        packet = list(range(start, start + s))
        if i % 2 == 1:
            packet.reverse()
        packets.append(packet)
        start += s
    return packets


def cut_sizes(n: int, m: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Symmetric multinomial packet sizes for a cut into ``2m`` packets."""
    return rng.multinomial(n, [1.0 / (2 * m)] * (2 * m), size=size)


def inverse_shuffle_sample(n: int, m: int, rng: np.random.Generator) -> Permutation:
    """One draw from the ``m``-shelf shuffle measure on ``n`` cards.

    Follows the physical recipe step by step: multinomial cut, reversal of
    the even-numbered packets, then a sequential drop where the next card
    comes from a packet chosen with probability proportional to its
    remaining size.
    """
    if n < 1 or m < 1:
        raise ValueError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    sizes = cut_sizes(n, m, rng)
    packets = _cut_packets(n, sizes)
    heads = [0] * len(packets)
    remaining = [int(s) for s in sizes]
    left = n
    arrangement = []
    for _ in range(n):
        # integer draw keeps the choice exact
        pick = int(rng.integers(left))
        p = 0
        while pick >= remaining[p]:
            pick -= remaining[p]
            p += 1
        arrangement.append(packets[p][heads[p]])
        heads[p] += 1
        remaining[p] -= 1
        left -= 1
    return _arrangement_to_sample(arrangement)


def sample_batch(n: int, m: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` draws at once, as a ``(size, n)`` array of 1-based permutations.

    Multinomial packet sizes followed by a uniform interleaving is the same
    as giving each output position an independent uniform packet label, so
    this draws labels and reads packet contents off a stable sort.
    """
    a = 2 * m
    labels = rng.integers(0, a, size=(size, n), dtype=np.int64)
    order = np.argsort(labels, axis=1, kind="stable")  # output positions grouped by packet
    lab = np.take_along_axis(labels, order, axis=1)
    idx = np.broadcast_to(np.arange(n), (size, n))
    new_group = np.ones((size, n), dtype=bool)
    new_group[:, 1:] = lab[:, 1:] != lab[:, :-1]
    first = np.maximum.accumulate(np.where(new_group, idx, 0), axis=1)
    end_group = np.ones((size, n), dtype=bool)
    end_group[:, :-1] = new_group[:, 1:]
    last = np.flip(
        np.minimum.accumulate(np.flip(np.where(end_group, idx, n), axis=1), axis=1), axis=1
    )
    # sorted slot i holds the card at deck index i, or its mirror inside a reversed packet
    card = np.where(lab % 2 == 1, first + last - idx, idx)
    perm = np.empty((size, n), dtype=np.int64)
    np.put_along_axis(perm, card, order + 1, axis=1)
    return perm


def batch_valleys(perms: np.ndarray) -> np.ndarray:
    if perms.shape[1] < 3:
        return np.zeros(perms.shape[0], dtype=np.int64)
    mid = perms[:, 1:-1]
    return np.sum((perms[:, :-2] > mid) & (mid < perms[:, 2:]), axis=1)


@dataclass(frozen=True)
class SampleRun:
    n: int
    m: int
    seed: int
    samples: int
    valley_histogram: tuple[int, ...]


def simulate(n: int, m: int, samples: int, seed: int) -> SampleRun:
    """Histogram of valley counts over ``samples`` seeded draws."""
    if n < 1 or m < 1 or samples < 1:
        raise ValueError(f"need n, m, samples >= 1, got {n}, {m}, {samples}")
    hist = np.zeros(max_valleys(n) + 1, dtype=np.int64)
    chunks = -(-samples // CHUNK)
    children = np.random.SeedSequence(seed).spawn(chunks)
    for i, child in enumerate(children):
        size = min(CHUNK, samples - i * CHUNK)
        rng = np.random.Generator(np.random.PCG64(child))
        v = batch_valleys(sample_batch(n, m, size, rng))
        hist += np.bincount(v, minlength=hist.size)
    return SampleRun(n, m, seed, samples, tuple(int(h) for h in hist))


def empirical_tv(n: int, m: int, samples: int, seed: int) -> float:
    """Distance between the sampled valley histogram and the exact uniform
    valley distribution.

    Estimates the exact distance with noise of order ``sqrt(u_n / samples)``.
    """
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples, got {samples}")
    run = simulate(n, m, samples, seed)
    uniform = valley_table(n).pmf()
    return 0.5 * math.fsum(abs(h / samples - float(p)) for h, p in zip(run.valley_histogram, uniform))


@dataclass(frozen=True)
class PermDist:
    """Exact distribution over permutations of ``n`` (1-based tuples)."""

    n: int
    probs: dict[Permutation, Fraction]

    def prob(self, p: Sequence[int]) -> Fraction:
        return self.probs.get(tuple(p), Fraction(0))

    def by_valleys(self) -> list[Fraction]:
        out = [Fraction(0)] * (max_valleys(self.n) + 1)
        for p, w in self.probs.items():
            out[_valleys(p)] += w
        return out

    def class_values(self) -> dict[int, set[Fraction]]:
        """Distinct per-permutation probabilities within each valley class."""
        seen: dict[int, set[Fraction]] = defaultdict(set)
        for p in permutations(range(1, self.n + 1)):
            seen[_valleys(p)].add(self.prob(p))
        return dict(seen)


def _compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first, *rest)


def _multiset_permutations(counts: list[int], length: int) -> Iterator[list[int]]:
    if length == 0:
        yield []
        return
    for label, c in enumerate(counts):
        if c:
            counts[label] -= 1
            for tail in _multiset_permutations(counts, length - 1):
                yield [label, *tail]
            counts[label] += 1


def _check_budget(n: int, m: int, budget: int | None) -> None:
    budget = config.enum_budget() if budget is None else budget
    work = (2 * m) ** n
    if work > budget:
        raise BoundExceeded(f"enumerating n={n}, m={m} needs {work} terms, budget is {budget}")


def enumerate_exact(n: int, m: int, budget: int | None = None) -> PermDist:
    """Exact shelf shuffle distribution by enumerating every cut and interleaving.

    A cut ``s`` has multinomial weight ``n! / prod(s_i!) / (2m)**n`` and each of
    its interleavings has GSR weight ``prod(s_i!) / n!``.
    """
    if n < 1 or m < 1:
        raise ValueError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    _check_budget(n, m, budget)
    a = 2 * m
    nfact = math.factorial(n)
    probs: dict[Permutation, Fraction] = defaultdict(Fraction)
    for sizes in _compositions(n, a):
        block = math.prod(math.factorial(s) for s in sizes)
        cut_weight = Fraction(nfact, block * a**n)
        weave_weight = Fraction(block, nfact)
        weight = cut_weight * weave_weight
        packets = _cut_packets(n, sizes)
        for weave in _multiset_permutations(list(sizes), n):
            heads = [0] * a
            arrangement = []
            for p in weave:
                arrangement.append(packets[p][heads[p]])
                heads[p] += 1
            probs[_arrangement_to_sample(arrangement)] += weight
    return PermDist(n, dict(probs))


def convolve(first: PermDist, second: PermDist) -> PermDist:
    """Law of the result of applying ``first`` and then ``second``."""
    if first.n != second.n:
        raise ValueError("deck sizes differ")
    out: dict[Permutation, Fraction] = defaultdict(Fraction)
    for s, a in first.probs.items():
        for t, b in second.probs.items():
            out[tuple(s[i - 1] for i in t)] += a * b
    return PermDist(first.n, dict(out))


@dataclass(frozen=True)
class CompositionReport:
    n: int
    m1: int
    m2: int
    holds: bool
    mismatches: int
    witness: tuple[Permutation, Fraction, Fraction] | None


def composition_check(n: int, m1: int, m2: int, budget: int | None = None) -> CompositionReport:
    """Compare an ``m1`` pass followed by an ``m2`` pass with one ``2*m1*m2`` pass."""
    for m in (m1, m2, 2 * m1 * m2):
        _check_budget(n, m, budget)
    combined = convolve(enumerate_exact(n, m1, budget), enumerate_exact(n, m2, budget))
    target = enumerate_exact(n, 2 * m1 * m2, budget)
    bad = [
        (p, combined.prob(p), target.prob(p))
        for p in permutations(range(1, n + 1))
        if combined.prob(p) != target.prob(p)
    ]
    return CompositionReport(n, m1, m2, not bad, len(bad), bad[0] if bad else None)


def q_equivalence(dist: PermDist, m: int) -> list[tuple[Permutation, Fraction, Fraction]]:
    """Permutations whose enumerated probability differs from ``q(n, m, v)``."""
    qs = [q_value(dist.n, m, k) for k in range(max_valleys(dist.n) + 1)]
    return [
        (p, dist.prob(p), qs[_valleys(p)])
        for p in permutations(range(1, dist.n + 1))
        if dist.prob(p) != qs[_valleys(p)]
    ]
