"""Tests for simulated play, exact payoffs, deviations and Monte Carlo runs."""

import numpy as np
import pytest

from conftest import random_probs, random_regular_problem
from icbargain.bargaining import BreakdownProbs, Player, spe
from icbargain.errors import DomainError, PreconditionError
from icbargain.game_sim import (
    Ending,
    GameSpec,
    Strategy,
    deviation_gain,
    equilibrium_strategies,
    expected_payoffs,
    monte_carlo,
    play,
    trial_seed,
)
from icbargain.rate_region import RatePair

# Threshold no rate on these channels reaches
NEVER = 1e6


@pytest.fixture
def spec(mixed_problem, half):
    return GameSpec(mixed_problem, half)


@pytest.fixture
def delayed(spec):
    """Player 2 turns down the first offer, player 1 takes the second."""
    s1, s2 = equilibrium_strategies(spec.problem, spec.probs)
    return s1, Strategy(s2.offer, NEVER)


class TestStrategies:
    def test_negative_threshold(self):
        with pytest.raises(DomainError):
            Strategy(RatePair(0.0, 0.0), -1.0)

    def test_max_rounds(self, mixed_problem, half):
        with pytest.raises(DomainError):
            GameSpec(mixed_problem, half, max_rounds=0)

    def test_proposer_alternates(self, mixed_problem, half):
        spec = GameSpec(mixed_problem, half, first_mover=Player.USER2)
        assert [spec.proposer(n) for n in (1, 2, 3)] == [Player.USER2, Player.USER1, Player.USER2]

    def test_infeasible_offer(self, spec):
        s1, s2 = equilibrium_strategies(spec.problem, spec.probs)
        with pytest.raises(PreconditionError):
            play(spec, Strategy(RatePair(10.0, 10.0), 0.0), s2, seed=0)


class TestPlay:
    def test_equilibrium_agrees_at_once(self, spec):
        s1, s2 = equilibrium_strategies(spec.problem, spec.probs)
        pair = spe(spec.problem, spec.probs)
        for seed in range(100):
            outcome = play(spec, s1, s2, seed)
            assert outcome.ending is Ending.AGREEMENT
            assert outcome.round == 1
            assert outcome.payoffs == pair.r_bar

    def test_second_mover_proposes_first(self, mixed_problem, half):
        spec = GameSpec(mixed_problem, half, first_mover=Player.USER2)
        s1, s2 = equilibrium_strategies(mixed_problem, half)
        outcome = play(spec, s1, s2, seed=3)
        assert outcome.round == 1
        assert outcome.payoffs == spe(mixed_problem, half).r_tilde

    def test_truncated(self, mixed_problem, half):
        spec = GameSpec(mixed_problem, half, max_rounds=1)
        s1, s2 = equilibrium_strategies(mixed_problem, half)
        stubborn = Strategy(s2.offer, NEVER)
        # seed chosen so the one chance move keeps the game going
        for seed in range(50):
            outcome = play(spec, s1, stubborn, seed)
            if not outcome.truncated:
                assert outcome.ending is Ending.BREAKDOWN
                continue
            assert outcome.round == 1
            assert outcome.payoffs == mixed_problem.disagreement
            break
        else:
            pytest.fail("no seed survived the chance move")

    def test_same_seed_same_outcome(self, spec, delayed):
        assert play(spec, *delayed, seed=11) == play(spec, *delayed, seed=11)


class TestExpectedPayoffs:
    def test_equilibrium(self, spec):
        s1, s2 = equilibrium_strategies(spec.problem, spec.probs)
        assert expected_payoffs(spec, s1, s2) == spe(spec.problem, spec.probs).r_bar

    def test_delayed_agreement(self, spec, delayed):
        r0 = spec.problem.disagreement
        r_tilde = spe(spec.problem, spec.probs).r_tilde
        value = expected_payoffs(spec, *delayed)
        p1 = spec.probs.p1
        assert value.r1 == pytest.approx(p1 * r0.r1 + (1 - p1) * r_tilde.r1, abs=1e-12)
        assert value.r2 == pytest.approx(p1 * r0.r2 + (1 - p1) * r_tilde.r2, abs=1e-12)

    def test_never_agree(self, spec):
        s1, s2 = equilibrium_strategies(spec.problem, spec.probs)
        value = expected_payoffs(spec, Strategy(s1.offer, NEVER), Strategy(s2.offer, NEVER))
        assert value == spec.problem.disagreement

    def test_single_round_game(self, mixed_problem, half, delayed):
        spec = GameSpec(mixed_problem, half, max_rounds=1)
        assert expected_payoffs(spec, *delayed) == mixed_problem.disagreement


class TestDeviation:
    def test_grid_size(self, spec):
        with pytest.raises(DomainError):
            deviation_gain(spec, grid_size=2)

    def test_equilibrium_is_stable(self, rng):
        for _ in range(50):
            problem = random_regular_problem(rng)
            spec = GameSpec(problem, random_probs(rng),
                            first_mover=Player.USER1 if rng.random() < 0.5 else Player.USER2)
            report = deviation_gain(spec, grid_size=201)
            assert report.max_gain <= 1e-9

    def test_generous_offer_is_not(self, spec):
        s1, s2 = equilibrium_strategies(spec.problem, spec.probs)
        lo = spec.problem.frontier.domain[0]
        generous = spec.problem.frontier.point_at((lo + s1.offer.r1) / 2)
        report = deviation_gain(spec, grid_size=201, profile=(Strategy(generous, s1.accept_threshold), s2))
        assert report.gains[Player.USER1] > 1e-3
        assert report.best_offers[Player.USER1].r1 > generous.r1

    def test_greedy_offer_is_not(self, spec):
        s1, s2 = equilibrium_strategies(spec.problem, spec.probs)
        lo, hi = spec.problem.frontier.domain
        greedy = spec.problem.frontier.point_at(min(s1.offer.r1 + 0.1, hi))
        assert greedy.r2 < s2.accept_threshold
        report = deviation_gain(spec, grid_size=201, profile=(Strategy(greedy, s1.accept_threshold), s2))

        # Player 2 turns the greedy offer down and player 1 takes R_tilde a round later
        pair = spe(spec.problem, spec.probs)
        r0, p1 = spec.problem.disagreement, spec.probs.p1
        assert report.baseline.r1 == pytest.approx(p1 * r0.r1 + (1 - p1) * pair.r_tilde.r1, abs=1e-12)
        assert report.baseline.r2 == pytest.approx(p1 * r0.r2 + (1 - p1) * pair.r_tilde.r2, abs=1e-12)

        loss = pair.r_bar.r1 - report.baseline.r1
        assert loss > 1e-3
        assert loss - (hi - lo) / 200 <= report.gains[Player.USER1] <= loss + 1e-9
        assert report.gains[Player.USER2] <= 1e-9


class TestMonteCarlo:
    def test_trials(self, spec, delayed):
        with pytest.raises(DomainError):
            monte_carlo(spec, *delayed, trials=0, seed=1)

    def test_deterministic(self, spec, delayed):
        a = monte_carlo(spec, *delayed, trials=500, seed=42)
        b = monte_carlo(spec, *delayed, trials=500, seed=42)
        assert a == b
        assert a != monte_carlo(spec, *delayed, trials=500, seed=43)

    def test_trial_replays_alone(self, spec, delayed):
        outcome = play(spec, *delayed, seed=trial_seed(42, 7))
        again = play(spec, *delayed, seed=trial_seed(42, 7))
        assert outcome == again
        assert outcome.round in (1, 2)

    def test_equilibrium_rounds(self, spec):
        s1, s2 = equilibrium_strategies(spec.problem, spec.probs)
        result = monte_carlo(spec, s1, s2, trials=200, seed=5)
        assert result.agreements == 200
        assert result.agreement_rounds == {1: 200}
        assert result.std_errors == pytest.approx((0.0, 0.0), abs=1e-12)
        assert result.mean_payoffs.distance(spe(spec.problem, spec.probs).r_bar) <= 1e-12

    @pytest.mark.slow
    def test_matches_expected_payoffs(self, spec, delayed):
        result = monte_carlo(spec, *delayed, trials=100_000, seed=2024)
        exact = expected_payoffs(spec, *delayed)
        for i in (1, 2):
            assert abs(result.mean_payoffs.rate(i) - exact.rate(i)) <= 4 * result.std_errors[i - 1]
        assert result.breakdowns / result.trials == pytest.approx(spec.probs.p1, abs=0.01)
        assert result.breakdown_rounds.keys() == {1}
        assert result.agreement_rounds.keys() == {2}

    @pytest.mark.slow
    def test_equilibrium_mean_is_exact(self, mac_problem):
        probs = BreakdownProbs(0.3, 0.6)
        spec = GameSpec(mac_problem, probs)
        result = monte_carlo(spec, *equilibrium_strategies(mac_problem, probs), trials=100_000, seed=9)
        assert np.allclose(tuple(result.mean_payoffs), tuple(spe(mac_problem, probs).r_bar), atol=1e-9)

    @pytest.mark.slow
    @pytest.mark.parametrize("case", range(20))
    def test_random_pairs_match_expected_payoffs(self, case):
        rng = np.random.default_rng(1000 + case)
        problem = random_regular_problem(rng)
        first = Player.USER1 if case % 2 == 0 else Player.USER2
        spec = GameSpec(problem, random_probs(rng, 0.1, 0.9), first_mover=first)
        frontier, r0 = problem.frontier, problem.disagreement
        s1, s2 = (
            Strategy(frontier.point_at(float(rng.uniform(*frontier.domain))), float(rng.uniform(low, high)))
            for low, high in ((r0.r1, frontier.right.r1), (r0.r2, frontier.top.r2))
        )
        result = monte_carlo(spec, s1, s2, trials=100_000, seed=case)
        exact = expected_payoffs(spec, s1, s2)
        for i in (1, 2):
            gap = abs(result.mean_payoffs.rate(i) - exact.rate(i))
            assert gap <= 4 * result.std_errors[i - 1] + 1e-12
