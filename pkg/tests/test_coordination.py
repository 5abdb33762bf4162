"""Tests for the two-phase protocol, sweeps and scheme comparison."""

import numpy as np
import pytest

from icbargain.bargaining import (
    BreakdownProbs,
    Player,
    Scheme,
    incentive_check,
    spe,
    spe_mac,
)
from icbargain.coordination import (
    Preference,
    Scenario,
    Solution,
    Status,
    Verdict,
    build_problem,
    compare_schemes,
    negotiate,
    sweep,
)
from icbargain.rate_region import ChannelParams, capacity, disagreement_point, tdm_point

STRONG = ChannelParams(1.5, 1.5, 10.0, 100.0)

FIG_GRID = [round(0.05 * k, 2) for k in range(1, 20)]


class TestNegotiate:
    def test_mixed_agrees(self, mixed_params, half):
        outcome = negotiate(Scenario(mixed_params, Scheme.HK, half))
        assert outcome.status is Status.AGREED
        assert outcome.regular
        assert outcome.operating_point == outcome.spe.r_bar
        assert outcome.nbs is not None
        assert outcome.refusal is None
        assert outcome.phase1.split.beta == pytest.approx(0.05)

    def test_matches_direct_composition(self, mixed_params, half):
        outcome = negotiate(Scenario(mixed_params, Scheme.HK, half, solution=Solution.SPE))
        phase1 = incentive_check(mixed_params, Scheme.HK)
        assert outcome.spe == spe(build_problem(mixed_params, Scheme.HK, phase1.split), half)
        assert outcome.nbs is None

    def test_phase1_failure(self, half):
        params = ChannelParams(0.005, 0.5, 10.0, 100.0)
        outcome = negotiate(Scenario(params, Scheme.HK, half))
        assert outcome.status is Status.DISAGREED
        assert not outcome.agreed
        assert outcome.operating_point == disagreement_point(params)
        assert outcome.spe is None and outcome.nbs is None

    def test_non_regular_spe(self, half):
        outcome = negotiate(Scenario(STRONG, Scheme.HK, half, solution=Solution.SPE))
        assert outcome.status is Status.NON_REGULAR
        assert not outcome.regular
        assert outcome.operating_point == outcome.disagreement
        assert outcome.refusal
        assert outcome.nbs is not None

    def test_non_regular_falls_back_to_nbs(self, half):
        outcome = negotiate(Scenario(STRONG, Scheme.HK, half, solution=Solution.BOTH))
        assert outcome.status is Status.AGREED
        assert outcome.spe is None
        assert outcome.operating_point == outcome.nbs

    def test_nbs_only(self, mixed_params, half):
        outcome = negotiate(Scenario(mixed_params, Scheme.HK, half, solution=Solution.NBS))
        assert outcome.spe is None
        assert outcome.operating_point == outcome.nbs

    def test_second_mover(self, mixed_params, half):
        outcome = negotiate(Scenario(mixed_params, Scheme.HK, half, first_mover=Player.USER2))
        assert outcome.operating_point == outcome.spe.r_tilde

    def test_mac(self, half):
        params = ChannelParams(1.0, 1.0, 100.0, 10 ** 1.5)
        outcome = negotiate(Scenario(params, Scheme.MAC, half))
        assert outcome.status is Status.AGREED
        assert outcome.spe == spe_mac(100.0, 10 ** 1.5, half)
        assert sum(outcome.operating_point) == pytest.approx(capacity(100.0 + 10 ** 1.5), abs=1e-9)

    def test_tdm_share(self, mixed_params, half):
        outcome = negotiate(Scenario(mixed_params, Scheme.TDM, half))
        assert outcome.status is Status.AGREED
        assert 0.0 < outcome.tdm_share < 1.0
        point = tdm_point(outcome.tdm_share, mixed_params)
        assert point.distance(outcome.operating_point) <= 1e-9


class TestSweep:
    def test_figure_range(self, mixed_params):
        rows = sweep(Scenario(mixed_params), FIG_GRID, p2=0.5)
        assert [row.p1 for row in rows] == FIG_GRID
        assert all(row.p2 == 0.5 and row.error is None for row in rows)
        r_bar1 = [row.r_bar.r1 for row in rows]
        assert all(np.diff(r_bar1) > 0)

    def test_default_p2_from_scenario(self, mixed_params):
        rows = sweep(Scenario(mixed_params, probs=BreakdownProbs(0.5, 0.3)), [0.2, 0.4])
        assert [row.p2 for row in rows] == [0.3, 0.3]

    def test_joint_converges(self, mixed_params):
        grid = [0.5, 0.2, 0.1, 0.05, 0.01]
        rows = sweep(Scenario(mixed_params), grid, joint=True)
        assert [row.p2 for row in rows] == grid
        distances = [row.nbs_distance for row in rows]
        assert all(b < a for a, b in zip(distances, distances[1:]))

    def test_matches_negotiate(self, mixed_params):
        rows = sweep(Scenario(mixed_params), [0.3], p2=0.6)
        outcome = negotiate(Scenario(mixed_params, probs=BreakdownProbs(0.3, 0.6)))
        assert rows[0].r_bar == outcome.spe.r_bar
        assert rows[0].r_tilde == outcome.spe.r_tilde

    def test_non_regular_rows(self):
        rows = sweep(Scenario(STRONG), [0.2, 0.4], p2=0.5)
        assert all(not row.regular and row.error and row.r_bar is None for row in rows)
        assert all(row.nbs is not None for row in rows)

    def test_phase1_failure_rows(self):
        rows = sweep(Scenario(ChannelParams(0.005, 0.5, 10.0, 100.0)), [0.2, 0.4], joint=True)
        assert [row.p2 for row in rows] == [0.2, 0.4]
        assert all(row.error.startswith("phase 1 failed") for row in rows)


class TestCompare:
    def test_hk_dominates(self, half):
        result = compare_schemes(ChannelParams(0.1, 1.2, 100.0, 1000.0), half)
        assert result.verdict is Verdict.HK_DOMINATES
        assert result.preferences == {Player.USER1: Preference.HK, Player.USER2: Preference.HK}
        assert result.hk.operating_point.strictly_dominates(result.tdm.operating_point)

    def test_mixed(self, half):
        result = compare_schemes(ChannelParams(0.2, 1.2, 100.0, 1000.0), half)
        assert result.verdict is Verdict.MIXED
        assert result.preferences[Player.USER1] is Preference.HK
        assert result.preferences[Player.USER2] is Preference.TDM

    def test_relabeling(self, half):
        params = ChannelParams(0.2, 1.2, 100.0, 1000.0)
        result = compare_schemes(params, half)
        mirrored = compare_schemes(params.swapped(), half, first_mover=Player.USER2)
        assert mirrored.verdict is result.verdict
        assert mirrored.preferences[Player.USER1] is result.preferences[Player.USER2]
        assert mirrored.preferences[Player.USER2] is result.preferences[Player.USER1]

    def test_non_regular_is_incomparable(self, half):
        result = compare_schemes(STRONG, half)
        assert result.verdict is Verdict.INCOMPARABLE
        assert result.hk.status is Status.NON_REGULAR
