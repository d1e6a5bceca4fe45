"""Monte Carlo simulation of the adjacent-transposition chain.

An adjacent swap flips exactly one pair's order, so the inversion count is
maintained incrementally at O(1) per step.  Randomness is a counter-based
splittable stream (SplitMix64 finalizer over a (seed, trial, step, slot)
counter), so trial k is a fixed function of (seed, k) and the summary is
bit-identical for any worker count.  Sums and sums of squares accumulate
in exact integers; floats appear only in the final summary.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
# Counter layout: per step, slot 0 = lazy hold decision, slot 1 = generator
# index; each slot reserves _ATTEMPTS counters for rejection redraws.
_SLOTS = 2
_ATTEMPTS = 8


def _mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def _mix64_np(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def trial_key(seed: int, trial: int) -> int:
    return _mix64(_mix64(seed & _MASK) ^ ((_GAMMA * (trial + 1)) & _MASK))


def _draw(key: int, counter: int) -> int:
    return _mix64((key + _GAMMA * counter) & _MASK)


def _counter(step: int, slot: int, attempt: int) -> int:
    return (step * _SLOTS + slot) * _ATTEMPTS + attempt


def _uniform_index(key: int, step: int, m: int) -> int:
    """Uniform i in [0, m) by rejection (no modulo bias)."""
    limit = (1 << 64) - ((1 << 64) % m)
    for attempt in range(_ATTEMPTS):
        v = _draw(key, _counter(step, 1, attempt))
        if v < limit:
            return v % m
    # Probability ~ (m / 2^64)^_ATTEMPTS; residual bias is negligible.
    return v % m


@dataclass(frozen=True)
class SimulationSummary:
    m: int
    n: int
    trials: int
    seed: int
    lazy_p: Fraction | None
    mean: float
    variance: float
    stderr: float
    sum_counts: int
    sum_squares: int
    elapsed: float

    def key_fields(self) -> tuple:
        """Everything except wall-clock time; used by determinism checks."""
        return (self.m, self.n, self.trials, self.seed, self.lazy_p,
                self.sum_counts, self.sum_squares)


def simulate_once(m: int, n: int, seed: int = 0, trial: int = 0,
                  lazy_p: Fraction | None = None) -> int:
    """Inversion count after n steps for one trial of the (seed, trial) stream."""
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    key = trial_key(seed, trial)
    hold_threshold = None
    if lazy_p is not None:
        lazy_p = Fraction(lazy_p)
        if not (0 < lazy_p <= 1):
            raise ValueError(f"lazy_p must lie in (0, 1], got {lazy_p}")
        hold_threshold = (lazy_p.numerator << 64) // lazy_p.denominator
    perm = list(range(m + 1))
    count = 0
    for step in range(n):
        if hold_threshold is not None:
            if _draw(key, _counter(step, 0, 0)) >= hold_threshold:
                continue
        i = _uniform_index(key, step, m)
        a, b = perm[i], perm[i + 1]
        count += 1 if a < b else -1
        perm[i], perm[i + 1] = b, a
    return count


def _run_chunk(m, n, seed, lo, hi, hold_threshold):
    """Vectorized simulation of trials [lo, hi); returns exact (sum, sumsq)."""
    size = hi - lo
    if size == 0:
        return 0, 0
    trials = np.arange(lo, hi, dtype=np.uint64)
    seed_mixed = np.uint64(_mix64(seed))
    keys = _mix64_np(seed_mixed ^ (np.uint64(_GAMMA) * (trials + np.uint64(1))))
    perm = np.tile(np.arange(m + 1, dtype=np.int64), (size, 1))
    counts = np.zeros(size, dtype=np.int64)
    rows = np.arange(size)
    limit_int = (1 << 64) - ((1 << 64) % m)
    needs_rejection = limit_int < (1 << 64)
    limit = np.uint64(limit_int) if needs_rejection else None
    always_move = hold_threshold is None or hold_threshold > _MASK
    for step in range(n):
        if always_move:
            move = None
        else:
            hv = _mix64_np(keys + np.uint64((_GAMMA * _counter(step, 0, 0)) & _MASK))
            move = hv < np.uint64(hold_threshold)
        v = _mix64_np(keys + np.uint64((_GAMMA * _counter(step, 1, 0)) & _MASK))
        if needs_rejection:
            for attempt in range(1, _ATTEMPTS):
                bad = v >= limit
                if not bad.any():
                    break
                redraw = _mix64_np(
                    keys[bad] + np.uint64((_GAMMA * _counter(step, 1, attempt)) & _MASK)
                )
                v[bad] = redraw
        idx = (v % np.uint64(m)).astype(np.int64)
        act_rows = rows if move is None else rows[move]
        act_idx = idx if move is None else idx[move]
        left = perm[act_rows, act_idx]
        right = perm[act_rows, act_idx + 1]
        delta = np.where(left < right, 1, -1)
        if move is None:
            counts += delta
        else:
            counts[move] += delta
        perm[act_rows, act_idx] = right
        perm[act_rows, act_idx + 1] = left
    total = int(counts.sum())
    max_count = m * (m + 1) // 2
    if size * max_count * max_count < (1 << 62):
        total_sq = int((counts * counts).sum())
    else:
        total_sq = int((counts.astype(object) ** 2).sum())
    return total, total_sq


def monte_carlo(m: int, n: int, trials: int, seed: int = 0,
                lazy_p: Fraction | None = None, workers: int = 1) -> SimulationSummary:
    """Run independent trials; bit-identical summary for any worker count."""
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    if trials < 2:
        raise ValueError(f"trials must be >= 2 (variance undefined), got {trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    hold_threshold = None
    if lazy_p is not None:
        lazy_p = Fraction(lazy_p)
        if not (0 < lazy_p <= 1):
            raise ValueError(f"lazy_p must lie in (0, 1], got {lazy_p}")
        hold_threshold = (lazy_p.numerator << 64) // lazy_p.denominator

    start = time.monotonic()
    edges = [trials * w // workers for w in range(workers + 1)]
    chunks = [(lo, hi) for lo, hi in zip(edges, edges[1:]) if hi > lo]
    if workers == 1:
        results = [_run_chunk(m, n, seed, lo, hi, hold_threshold) for lo, hi in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda span: _run_chunk(m, n, seed, span[0], span[1], hold_threshold),
                chunks,
            ))
    total = sum(r[0] for r in results)
    total_sq = sum(r[1] for r in results)
    elapsed = time.monotonic() - start

    mean = Fraction(total, trials)
    # Unbiased sample variance from the exact moments.
    var = Fraction(trials * total_sq - total * total, trials * (trials - 1)) if trials > 1 else Fraction(0)
    variance = float(var)
    return SimulationSummary(
        m=m, n=n, trials=trials, seed=seed, lazy_p=lazy_p,
        mean=float(mean), variance=variance,
        stderr=float(variance / trials) ** 0.5,
        sum_counts=total, sum_squares=total_sq, elapsed=elapsed,
    )
