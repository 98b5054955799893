"""Acceptance gate: one test per release criterion.

Each test prints as its own pass/fail line under pytest -v. Statistical
criteria run against fixed seeds, so outcomes are reproducible; tolerances
are stated next to each assertion.
"""

import io
import itertools
import json
import math
import time

import numpy as np
import pytest

from triqkd import analytics, cli, mcsim, optics, sifting
from triqkd.encoding import ALL_TRIPLETS, BasesTriplet, EncodingChoice, prepare_pulses

import enumeration_oracle as oracle

MU_GRID_10 = np.linspace(0.1, 1.0, 10)
MC_SEED = 11
MC_ROUNDS = 1_000_000


def binomial_sigma(p, n):
    return math.sqrt(max(p * (1.0 - p), 1e-30) / n)


def test_criterion_01_table_reproduction():
    # all 16 reference rows within 0.02 * sqrt(mu) at mu = 1, in under 1 s
    start = time.perf_counter()
    stream = io.StringIO()
    rc = cli.cmd_verify_tables(stream=stream)
    elapsed = time.perf_counter() - start
    assert rc == 0
    text = stream.getvalue()
    assert text.count("PASS") == 16
    assert "FAIL" not in text
    assert cli.TABLE_TOLERANCE == 0.02
    assert elapsed < 1.0


def test_criterion_02_unitarity_and_energy_conservation():
    iu = optics.build_interference_unit()
    assert iu.orthogonality_residual() <= 1e-12
    for bases in ALL_TRIPLETS:
        for bits in itertools.product((0, 1), repeat=3):
            choices = [
                EncodingChoice(basis, bit) for basis, bit in zip(bases, bits)
            ]
            for mu in (0.1, 0.5, 1.0):
                outputs = optics.transform_modes(iu, prepare_pulses(choices, mu))
                energy = float(np.sum(np.abs(outputs) ** 2))
                assert abs(energy - 3.0 * mu) <= 1e-12


def test_criterion_03_basis_fidelity_claim():
    value = optics.basis_fidelity(0.3)
    assert value == pytest.approx(0.8436, abs=1e-4)
    assert value >= 0.84
    for mu in np.linspace(0.05, 1.0, 20):
        r = math.sqrt(mu)

        def mixture_trace(states_a, states_b):
            return sum(
                abs(optics.coherent_overlap(a, b)) ** 2
                for a in states_a
                for b in states_b
            ) / 4.0

        cross = mixture_trace((r, -r), (1j * r, -1j * r))
        auto = mixture_trace((r, -r), (r, -r))
        assert abs(optics.basis_fidelity(mu) - cross / auto) <= 1e-10


def test_criterion_04_quarter_discard_rate():
    # combinatorial: a fixed user is basis-unmatched in exactly 2 of the
    # 8 equiprobable triplets
    for user in range(3):
        unmatched = [
            t for t in ALL_TRIPLETS
            if tuple(t)[user] != tuple(t)[(user + 1) % 3]
            and tuple(t)[user] != tuple(t)[(user + 2) % 3]
        ]
        assert len(unmatched) == 2
    assert analytics.user_discard_probability(3) == 0.25
    # Monte Carlo at one million rounds
    config = mcsim.SessionConfig(mu=0.1, rounds=MC_ROUNDS, seed=MC_SEED)
    stats = mcsim.run_session(config, workers=4)
    for user in range(3):
        assert stats.discard_fraction(user) == pytest.approx(0.25, abs=0.002)


def test_criterion_05_honest_sifting_errors():
    # exhaustive over 8 triplets x 8 encodings: the expected type yields
    # agreement on every recorded pair; the other admissible type makes
    # the matched pair disagree
    for bases in ALL_TRIPLETS:
        for bits in itertools.product((0, 1), repeat=3):
            want = sifting.expected_type(bases, bits)
            for t in sifting.ADMISSIBLE_TYPES[bases.label]:
                outcome = sifting.sift(t, bases, bits)
                assert outcome.accepted
                disagreements = sum(1 for k in outcome.key_bits if k[0] != k[1])
                if t == want:
                    assert disagreements == 0
                else:
                    assert disagreements >= 1


def test_criterion_06_oracle_equivalence():
    for mu in MU_GRID_10:
        point = analytics.overall_curve([mu])[0]
        mm_pc, mm_pw = oracle.mismatch_average(mu)
        assert abs(point.mismatch.p_correct - mm_pc) <= 1e-12
        assert abs(point.mismatch.p_wrong - mm_pw) <= 1e-12
        m_pc, m_pw = oracle.match_conditional(mu)
        assert abs(point.match_.p_correct - m_pc) <= 1e-12
        assert abs(point.match_.p_wrong - m_pw) <= 1e-12
        ov_pc, ov_pw = oracle.overall(mu)
        assert abs(point.overall.p_correct - ov_pc) <= 1e-12
        assert abs(point.overall.p_wrong - ov_pw) <= 1e-12


def test_criterion_07_monte_carlo_matches_analytics():
    start = time.perf_counter()
    for mu in (0.1, 0.3, 0.5):
        config = mcsim.SessionConfig(mu=mu, rounds=MC_ROUNDS, seed=MC_SEED)
        stats = mcsim.run_session(config, workers=4)

        # class-conditional rates: mismatch average and all-match triplet
        mm = analytics.mismatch_curve([mu])[0]
        n = stats.mismatch_rounds
        for empirical, p in (
            (stats.mismatch_correct / n, mm.p_correct),
            (stats.mismatch_wrong / n, mm.p_wrong),
        ):
            assert abs(empirical - p) <= 4 * binomial_sigma(p, n)
        mm_accepted = stats.mismatch_correct + stats.mismatch_wrong
        assert abs(stats.mismatch_wrong / mm_accepted - mm.ber) <= (
            4 * binomial_sigma(mm.ber, mm_accepted)
        )

        xxx = analytics.scenario_stats(BasesTriplet.from_label("XXX"), mu)
        n = stats.match_rounds
        for empirical, p in (
            (stats.match_correct / n, xxx.p_correct),
            (stats.match_wrong / n, xxx.p_wrong),
        ):
            assert abs(empirical - p) <= 4 * binomial_sigma(p, n)
        match_accepted = stats.match_correct + stats.match_wrong
        assert abs(stats.match_wrong / match_accepted - xxx.ber) <= (
            4 * binomial_sigma(xxx.ber, match_accepted)
        )

        # per-pair bit-level rates and BERs
        for k, pair in enumerate(sifting.PAIRS):
            ps = analytics.pair_stats(pair, mu)
            accepted = stats.pair_accepted[k]
            errors = stats.pair_errors[k]
            n = stats.rounds
            assert abs((accepted - errors) / n - ps.p_correct) <= (
                4 * binomial_sigma(ps.p_correct, n)
            )
            assert abs(errors / n - ps.p_wrong) <= 4 * binomial_sigma(ps.p_wrong, n)
            assert abs(errors / accepted - ps.ber) <= 4 * binomial_sigma(ps.ber, accepted)
    assert time.perf_counter() - start < 60.0


def test_criterion_08_basis_swap_symmetry():
    swap = str.maketrans("XY", "YX")
    for bases in ALL_TRIPLETS:
        mirrored = BasesTriplet.from_label(bases.label.translate(swap))
        for mu in MU_GRID_10:
            a = analytics.scenario_stats(bases, mu)
            b = analytics.scenario_stats(mirrored, mu)
            assert abs(a.p_correct - b.p_correct) <= 1e-12
            assert abs(a.p_wrong - b.p_wrong) <= 1e-12


def test_criterion_09_two_user_baseline():
    assert abs(analytics.two_user_baseline(0.5) - (1.0 - math.exp(-1.0))) <= 1e-12
    grid = np.linspace(0.02, 2.0, 100)
    values = [analytics.two_user_baseline(mu) for mu in grid]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_criterion_10_simulation_determinism(tmp_path):
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    common = ["simulate", "--mu", "0.3", "--rounds", "200000", "--seed", "20260815"]
    assert cli.main(common + ["--workers", "1", "--out", str(out_a)]) == 0
    assert cli.main(common + ["--workers", "4", "--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    json.loads(out_a.read_text())
