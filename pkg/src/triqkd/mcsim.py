"""Seeded Monte Carlo execution of the protocol rounds.

Reproducibility contract: a session is split into fixed chunks of
CHUNK_ROUNDS rounds. Chunk c draws from a counter-based Philox stream
keyed by (seed, c), in a fixed order: per-user basis bits, per-user value
bits, per-detector uniforms, then per-detector dark-count uniforms (drawn
only when some dark rate is nonzero). Chunk boundaries and draws are
therefore independent of how chunks are scheduled across workers, and a
(seed, rounds, mu, channel) configuration maps to one exact SessionStats
no matter the worker count. Counters are integers, so merging is exact and
order-insensitive.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import optics, sifting
from .encoding import (
    Basis,
    BasesTriplet,
    ChannelParams,
    EncodingChoice,
    classify_triplet,
    prepare_pulses,
    triplet_of,
)

#: Rounds per RNG chunk. Fixed: changing it changes the stream mapping.
CHUNK_ROUNDS = 1 << 16

_IU = optics.build_interference_unit()
_BASES = (Basis.X, Basis.Y)


class UndefinedStatisticError(ValueError):
    """A ratio was requested whose denominator is zero."""


@dataclass(frozen=True)
class SessionConfig:
    """Parameters of one Monte Carlo session."""

    mu: float
    rounds: int
    seed: int
    channel: ChannelParams = ChannelParams()

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValueError(f"mean photon number must be >= 0, got {self.mu}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")


@dataclass(frozen=True)
class RoundRecord:
    """Everything one protocol round produced.

    errors[i] flags pair PAIRS[i] recording disagreeing bits; only set on
    accepted rounds.
    """

    choices: tuple[EncodingChoice, EncodingChoice, EncodingChoice]
    pattern: frozenset[int]
    outcome: sifting.SiftingOutcome
    errors: tuple[bool, bool, bool]


@dataclass(frozen=True)
class SessionStats:
    """Counters accumulated over a session.

    Round outcomes partition the session: no_click + all_click +
    inadmissible + accepted == rounds. valid_rounds (rounds with an
    announceable single/double click) is the denominator for the per-user
    basis-sift discard fractions. The per-class counters condition on the
    drawn triplet being a mismatch (6 of 8) or an all-match (2 of 8).
    """

    rounds: int
    no_click: int
    all_click: int
    inadmissible: int
    accepted: int
    mismatch_rounds: int
    match_rounds: int
    mismatch_correct: int
    mismatch_wrong: int
    match_correct: int
    match_wrong: int
    pair_accepted: tuple[int, int, int]
    pair_errors: tuple[int, int, int]
    user_discards: tuple[int, int, int]

    @property
    def valid_rounds(self) -> int:
        return self.rounds - self.no_click - self.all_click

    def discard_fraction(self, user: int) -> float:
        """Basis-sift discard fraction of one user over valid rounds."""
        if self.valid_rounds == 0:
            raise UndefinedStatisticError("no valid rounds in session")
        return self.user_discards[user] / self.valid_rounds


def empirical_ber(stats: SessionStats, pair: tuple[int, int]) -> float:
    """Observed bit error rate of one pair: error_bits / accepted_bits."""
    idx = sifting.PAIRS.index(pair)
    accepted = stats.pair_accepted[idx]
    if accepted == 0:
        raise UndefinedStatisticError(f"pair {sifting.PAIR_NAMES[idx]} recorded no bits")
    return stats.pair_errors[idx] / accepted


# ---------------------------------------------------------------------------
# Round resolution tables. Index layout: bases b in 0..7 (A*4+B1*2+B2, X=0),
# bits e in 0..7, click pattern p in 0..7 (bit d set = detector d fired).
# Built once per process from sift(), so the vectorized path and the scalar
# path share one source of truth; a test diffs all 512 entries against
# direct sift() calls.
# ---------------------------------------------------------------------------

_P_NO_CLICK = 0
_P_ALL_CLICK = 7


def _triplet_from_index(b: int) -> BasesTriplet:
    return BasesTriplet(_BASES[(b >> 2) & 1], _BASES[(b >> 1) & 1], _BASES[b & 1])


def _bits_from_index(e: int) -> tuple[int, int, int]:
    return ((e >> 2) & 1, (e >> 1) & 1, e & 1)


def _pattern_from_index(p: int) -> frozenset[int]:
    return frozenset(d for d in range(3) if p & (1 << d))


def _build_tables():
    accepted = np.zeros((8, 8, 8), dtype=bool)
    correct = np.zeros((8, 8, 8), dtype=bool)
    pair_rec = np.zeros((8, 8, 8, 3), dtype=bool)
    pair_err = np.zeros((8, 8, 8, 3), dtype=bool)
    is_mismatch = np.zeros(8, dtype=bool)
    for b in range(8):
        bases = _triplet_from_index(b)
        cls = classify_triplet(bases)
        is_mismatch[b] = not cls.all_match
        for p in range(8):
            t = sifting.classify_pattern(_pattern_from_index(p))
            if t is None:
                continue
            for e in range(8):
                bits = _bits_from_index(e)
                outcome = sifting.sift(t, bases, bits)
                if not outcome.accepted:
                    continue
                accepted[b, e, p] = True
                correct[b, e, p] = t == sifting.expected_type(bases, bits)
                for pair, key in zip(outcome.matched_pairs, outcome.key_bits):
                    k = sifting.PAIRS.index(pair)
                    pair_rec[b, e, p, k] = True
                    pair_err[b, e, p, k] = key[0] != key[1]
    unmatched = np.full(8, -1, dtype=np.int64)
    for b in range(8):
        cls = classify_triplet(_triplet_from_index(b))
        if not cls.all_match:
            unmatched[b] = cls.unmatched_user
    return accepted, correct, pair_rec, pair_err, is_mismatch, unmatched


(_ACCEPTED, _CORRECT, _PAIR_REC, _PAIR_ERR, _IS_MISMATCH, _UNMATCHED) = _build_tables()

#: SessionStats counter layout inside per-chunk accumulator vectors.
_N_COUNTERS = 19


def _fire_probabilities(mu: float, channel: ChannelParams) -> np.ndarray:
    """P(signal click) per detector for each of the 64 (bases, bits) codes."""
    p = np.zeros((64, 3))
    for b, e in itertools.product(range(8), range(8)):
        bases = _triplet_from_index(b)
        bits = _bits_from_index(e)
        choices = [EncodingChoice(basis, bit) for basis, bit in zip(bases, bits)]
        outputs = optics.transform_modes(_IU, prepare_pulses(choices, mu, channel))
        p[b * 8 + e] = [optics.click_probability(beta) for beta in outputs]
    return p


def _simulate_chunk(
    seed: int, chunk_index: int, n: int, p_fire: np.ndarray, dark: np.ndarray
) -> np.ndarray:
    """Simulate one chunk and return its counter vector."""
    rng = np.random.Generator(
        np.random.Philox(key=np.array([seed, chunk_index], dtype=np.uint64))
    )
    bases = rng.integers(0, 2, size=(n, 3))
    bits = rng.integers(0, 2, size=(n, 3))
    u = rng.random(size=(n, 3))
    b = bases[:, 0] * 4 + bases[:, 1] * 2 + bases[:, 2]
    e = bits[:, 0] * 4 + bits[:, 1] * 2 + bits[:, 2]
    clicks = u < p_fire[b * 8 + e]
    if np.any(dark > 0):
        v = rng.random(size=(n, 3))
        clicks |= v < dark
    p = clicks[:, 0] * 1 + clicks[:, 1] * 2 + clicks[:, 2] * 4

    no_click = p == _P_NO_CLICK
    all_click = p == _P_ALL_CLICK
    valid = ~(no_click | all_click)
    acc = _ACCEPTED[b, e, p]
    corr = acc & _CORRECT[b, e, p]
    mm = _IS_MISMATCH[b]

    out = np.zeros(_N_COUNTERS, dtype=np.int64)
    out[0] = np.count_nonzero(no_click)
    out[1] = np.count_nonzero(all_click)
    out[2] = np.count_nonzero(valid & ~acc)
    out[3] = np.count_nonzero(acc)
    out[4] = np.count_nonzero(mm)
    out[5] = n - out[4]
    out[6] = np.count_nonzero(corr & mm)
    out[7] = np.count_nonzero(acc & ~corr & mm)
    out[8] = np.count_nonzero(corr & ~mm)
    out[9] = np.count_nonzero(acc & ~corr & ~mm)
    for k in range(3):
        out[10 + k] = np.count_nonzero(_PAIR_REC[b, e, p, k])
        out[13 + k] = np.count_nonzero(_PAIR_ERR[b, e, p, k])
    discarding_user = np.where(valid, _UNMATCHED[b], -1)
    for k in range(3):
        out[16 + k] = np.count_nonzero(discarding_user == k)
    return out


def run_session(config: SessionConfig, workers: int = 1) -> SessionStats:
    """Run a full session; deterministic in config, whatever the workers.

    workers > 1 distributes chunks over a thread pool (the heavy numpy
    work releases the GIL); results are identical to the serial run.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    p_fire = _fire_probabilities(config.mu, config.channel)
    dark = np.asarray(config.channel.dark_count_prob, dtype=float)
    n_chunks = (config.rounds + CHUNK_ROUNDS - 1) // CHUNK_ROUNDS
    sizes = [
        min(CHUNK_ROUNDS, config.rounds - c * CHUNK_ROUNDS) for c in range(n_chunks)
    ]

    def job(c: int) -> np.ndarray:
        return _simulate_chunk(config.seed, c, sizes[c], p_fire, dark)

    if workers == 1 or n_chunks == 1:
        chunk_counts = [job(c) for c in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunk_counts = list(pool.map(job, range(n_chunks)))
    totals = np.sum(chunk_counts, axis=0, dtype=np.int64)
    return SessionStats(
        rounds=config.rounds,
        no_click=int(totals[0]),
        all_click=int(totals[1]),
        inadmissible=int(totals[2]),
        accepted=int(totals[3]),
        mismatch_rounds=int(totals[4]),
        match_rounds=int(totals[5]),
        mismatch_correct=int(totals[6]),
        mismatch_wrong=int(totals[7]),
        match_correct=int(totals[8]),
        match_wrong=int(totals[9]),
        pair_accepted=tuple(int(x) for x in totals[10:13]),
        pair_errors=tuple(int(x) for x in totals[13:16]),
        user_discards=tuple(int(x) for x in totals[16:19]),
    )


def run_round(
    rng: np.random.Generator, mu: float, channel: ChannelParams = ChannelParams()
) -> RoundRecord:
    """Simulate a single round, drawing from the given generator.

    Scalar reference path: draws basis bits, value bits, detector
    uniforms, and (only when needed) dark-count uniforms, in that order,
    then resolves the round through the same sifting rules the vectorized
    session uses.
    """
    basis_bits = rng.integers(0, 2, size=3)
    bits = tuple(int(x) for x in rng.integers(0, 2, size=3))
    u = rng.random(3)
    choices = tuple(
        EncodingChoice(_BASES[bb], bit) for bb, bit in zip(basis_bits, bits)
    )
    outputs = optics.transform_modes(_IU, prepare_pulses(choices, mu, channel))
    p_fire = np.array([optics.click_probability(beta) for beta in outputs])
    clicks = u < p_fire
    dark = np.asarray(channel.dark_count_prob, dtype=float)
    if np.any(dark > 0):
        clicks |= rng.random(3) < dark
    pattern = frozenset(int(d) for d in np.flatnonzero(clicks))

    bases = triplet_of(choices)
    t = sifting.classify_pattern(pattern)
    outcome = sifting.REJECTED if t is None else sifting.sift(t, bases, bits)
    errors = [False, False, False]
    if outcome.accepted:
        for pair, key in zip(outcome.matched_pairs, outcome.key_bits):
            errors[sifting.PAIRS.index(pair)] = key[0] != key[1]
    return RoundRecord(
        choices=choices, pattern=pattern, outcome=outcome, errors=tuple(errors)
    )
