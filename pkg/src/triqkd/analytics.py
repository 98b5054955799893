"""Closed-form curves: success probability, systematic error, BER vs mu.

Everything here is exact enumeration over encodings and click patterns on
top of the optics kernel; no sampling. "Correct" means the round was
accepted with the detection type the reference tables assign to the sent
encoding; "wrong" means it was accepted with a different (admissible)
type, which is the systematic-error mechanism: the matched users then
hold disagreeing bits even though nobody cheated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

from . import optics, sifting
from .encoding import (
    ALL_TRIPLETS,
    MATCH_TRIPLETS,
    MISMATCH_TRIPLETS,
    BasesTriplet,
    ChannelParams,
    EncodingChoice,
    classify_triplet,
    prepare_pulses,
)

_IU = optics.build_interference_unit()
_BIT_TRIPLETS = tuple(itertools.product((0, 1), repeat=3))


@dataclass(frozen=True)
class ScenarioStats:
    """Per-round probabilities of correct and wrong acceptance.

    p_accept = p_correct + p_wrong and ber = p_wrong / p_accept hold by
    construction (use from_rates).
    """

    p_correct: float
    p_wrong: float
    p_accept: float
    ber: float

    @classmethod
    def from_rates(cls, p_correct: float, p_wrong: float) -> "ScenarioStats":
        p_accept = p_correct + p_wrong
        ber = p_wrong / p_accept if p_accept > 0 else 0.0
        return cls(p_correct=p_correct, p_wrong=p_wrong, p_accept=p_accept, ber=ber)


@dataclass(frozen=True)
class SweepPoint:
    """All curves evaluated at one intensity."""

    mu: float
    mismatch: ScenarioStats
    match_: ScenarioStats
    overall: ScenarioStats
    baseline: float


def _output_amplitudes(bases: BasesTriplet, bits: tuple[int, int, int], mu: float):
    choices = [EncodingChoice(basis, bit) for basis, bit in zip(bases, bits)]
    return optics.transform_modes(_IU, prepare_pulses(choices, mu, ChannelParams()))


def _type_probability(outputs, t: int) -> float:
    return optics.pattern_probability(outputs, sifting.TYPE_PATTERNS[t])


def scenario_stats(bases: BasesTriplet, mu: float) -> ScenarioStats:
    """Correct/wrong acceptance probabilities for one bases triplet.

    Uniform average over the triplet's 8 encodings of the probability that
    the observed click pattern is the expected type's pattern (correct) or
    another admissible type's pattern (wrong). For an all-match triplet an
    encoding whose expected type is excluded (3 or 4) can only contribute
    wrong acceptances.
    """
    if mu <= 0:
        raise ValueError(f"intensity must be > 0, got {mu}")
    p_correct = 0.0
    p_wrong = 0.0
    for bits in _BIT_TRIPLETS:
        outputs = _output_amplitudes(bases, bits, mu)
        expected = sifting.expected_type(bases, bits)
        for t in sifting.ADMISSIBLE_TYPES[bases.label]:
            p = _type_probability(outputs, t) / 8.0
            if t == expected:
                p_correct += p
            else:
                p_wrong += p
    return ScenarioStats.from_rates(p_correct, p_wrong)


def mismatch_curve(mu_grid: Iterable[float]) -> list[ScenarioStats]:
    """Average of scenario_stats over the 6 mismatch triplets."""
    out = []
    for mu in mu_grid:
        stats = [scenario_stats(t, mu) for t in MISMATCH_TRIPLETS]
        out.append(
            ScenarioStats.from_rates(
                sum(s.p_correct for s in stats) / len(stats),
                sum(s.p_wrong for s in stats) / len(stats),
            )
        )
    return out


def match_curve(mu_grid: Iterable[float]) -> list[ScenarioStats]:
    """All-match curve under the type-0/1 postselection.

    p_correct averages P(observed = expected) over the 4 encodings whose
    expected type is 0 or 1. p_wrong averages, over the 12 combinations of
    an input from a complementary class (the other kept type, type 3, or
    type 4) with a kept observed type, the probability of landing in that
    observed type's click pattern. The XXX and YYY curves are identical, so
    one triplet is evaluated.
    """
    bases = MATCH_TRIPLETS[0]
    out = []
    for mu in mu_grid:
        if mu <= 0:
            raise ValueError(f"intensity must be > 0, got {mu}")
        correct_terms: list[float] = []
        wrong_terms: list[float] = []
        for bits in _BIT_TRIPLETS:
            outputs = _output_amplitudes(bases, bits, mu)
            expected = sifting.expected_type(bases, bits)
            for observed in (0, 1):
                p = _type_probability(outputs, observed)
                if expected == observed:
                    correct_terms.append(p)
                else:
                    wrong_terms.append(p)
        out.append(
            ScenarioStats.from_rates(
                sum(correct_terms) / len(correct_terms),
                sum(wrong_terms) / len(wrong_terms),
            )
        )
    return out


def pair_stats(pair: tuple[int, int], mu: float) -> ScenarioStats:
    """Per-round key-bit statistics for one pair of users.

    The pair records a bit when the round is accepted and the pair is
    matched: on its two mismatch triplets and on both all-match triplets.
    p_correct is the probability (per protocol round, uniform random
    choices) that the pair records agreeing bits; p_wrong that it records
    disagreeing bits. Their ratio is the BER this pair would measure.
    """
    if pair not in sifting.PAIRS:
        raise ValueError(f"unknown pair {pair}")
    if mu <= 0:
        raise ValueError(f"intensity must be > 0, got {mu}")
    p_correct = 0.0
    p_wrong = 0.0
    pair_index = sifting.PAIRS.index(pair)
    for bases in ALL_TRIPLETS:
        cls = classify_triplet(bases)
        if not cls.all_match and cls.matched_pair != pair:
            continue
        for bits in _BIT_TRIPLETS:
            outputs = _output_amplitudes(bases, bits, mu)
            for t in sifting.ADMISSIBLE_TYPES[bases.label]:
                outcome = sifting.sift(t, bases, bits)
                slot = 0 if not cls.all_match else pair_index
                left, right = outcome.key_bits[slot]
                p = _type_probability(outputs, t) / 64.0
                if left == right:
                    p_correct += p
                else:
                    p_wrong += p
    return ScenarioStats.from_rates(p_correct, p_wrong)


def overall_curve(mu_grid: Iterable[float]) -> list[SweepPoint]:
    """Full-protocol sweep: mismatch, match, and per-pair overall stats.

    The overall entry is the average over the three pairs of pair_stats:
    the statistics of the key bits a single (representative) pair
    accumulates per protocol round, with triplets weighted by their
    uniform occurrence probabilities.
    """
    points = []
    for mu in mu_grid:
        per_pair = [pair_stats(pair, mu) for pair in sifting.PAIRS]
        overall = ScenarioStats.from_rates(
            sum(s.p_correct for s in per_pair) / len(per_pair),
            sum(s.p_wrong for s in per_pair) / len(per_pair),
        )
        points.append(
            SweepPoint(
                mu=mu,
                mismatch=mismatch_curve([mu])[0],
                match_=match_curve([mu])[0],
                overall=overall,
                baseline=two_user_baseline(mu),
            )
        )
    return points


def two_user_baseline(mu: float) -> float:
    """Success probability of the two-user reference scheme.

    Two matched-basis users interfere on a balanced splitter: the
    constructive port carries amplitude sqrt(2 mu), the destructive port
    vacuum, and success is the single correct detector firing, so
    P = 1 - exp(-2 mu) with perfect detectors.
    """
    if mu <= 0:
        raise ValueError(f"intensity must be > 0, got {mu}")
    return -math.expm1(-2.0 * mu)


def user_discard_probability(users: int = 3) -> float:
    """Probability a fixed user's basis matches no one and they discard.

    With three users choosing bases uniformly, a fixed user is unmatched in
    2 of the 8 equiprobable triplets, so 1/4; the two-user scheme discards
    on any mismatch, so 1/2.
    """
    if users == 3:
        return 0.25
    if users == 2:
        return 0.5
    raise ValueError(f"only the 2- and 3-user schemes are defined, got {users}")
