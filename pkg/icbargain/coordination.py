"""
Two-phase coordination between the users.

Phase 1 decides whether a cooperative scheme helps both users. Phase 2 poses
the bargaining problem over the scheme's rate region and solves it. Failures
are part of the outcome, never exceptions.
"""

from dataclasses import dataclass, field
from enum import StrEnum

from icbargain.bargaining import (
    BargainingProblem,
    BreakdownProbs,
    IncentiveResult,
    Player,
    Scheme,
    SpePair,
    incentive_check,
    is_regular_frontier,
    is_regular_ic,
    nbs,
    spe,
    spe_mac,
)
from icbargain.errors import NonRegularError
from icbargain.log import logger
from icbargain.rate_region import (
    TOL,
    ChannelParams,
    PowerSplit,
    RatePair,
    disagreement_point,
    tdm_share,
)


class Solution(StrEnum):
    SPE = "spe"
    NBS = "nbs"
    BOTH = "both"


class Status(StrEnum):
    AGREED = "agreed"
    DISAGREED = "disagreed"
    NON_REGULAR = "non_regular"


class Verdict(StrEnum):
    HK_DOMINATES = "hk_dominates"
    TDM_DOMINATES = "tdm_dominates"
    MIXED = "mixed"
    INCOMPARABLE = "incomparable"


class Preference(StrEnum):
    HK = "hk"
    TDM = "tdm"
    INDIFFERENT = "indifferent"


@dataclass(frozen=True)
class Scenario:
    """Everything negotiate needs."""
    params: ChannelParams
    scheme: Scheme = Scheme.HK
    probs: BreakdownProbs = field(default_factory=lambda: BreakdownProbs(0.5, 0.5))
    first_mover: Player = Player.USER1
    solution: Solution = Solution.BOTH


@dataclass(frozen=True)
class CoordinationOutcome:
    """Result of both phases for one scenario."""
    scenario: Scenario
    phase1: IncentiveResult
    status: Status
    operating_point: RatePair
    disagreement: RatePair
    regular: bool = False
    spe: SpePair | None = None
    nbs: RatePair | None = None
    refusal: str | None = None
    tdm_share: float | None = None  # time fraction of user 1 at the operating point

    @property
    def agreed(self) -> bool:
        return self.phase1.proceed


@dataclass(frozen=True)
class SweepRow:
    p1: float
    p2: float
    regular: bool
    r_bar: RatePair | None = None
    r_tilde: RatePair | None = None
    nbs: RatePair | None = None
    nbs_distance: float | None = None  # max-norm distance of R_bar to the NBS
    error: str | None = None


@dataclass(frozen=True)
class SchemeComparison:
    hk: CoordinationOutcome
    tdm: CoordinationOutcome
    verdict: Verdict
    preferences: dict[Player, Preference]


def build_problem(params: ChannelParams, scheme: Scheme, split: PowerSplit | None = None) -> BargainingProblem:
    """Bargaining problem of a scheme (H-K at the given or default split)."""
    if scheme is Scheme.HK:
        return BargainingProblem.hk(params, split)
    if scheme is Scheme.TDM:
        return BargainingProblem.tdm(params)
    return BargainingProblem.mac(params.P1, params.P2)


def _scenario_r0(scenario: Scenario) -> RatePair:
    if scenario.scheme is Scheme.MAC:
        return BargainingProblem.mac(scenario.params.P1, scenario.params.P2).disagreement
    return disagreement_point(scenario.params)


def negotiate(scenario: Scenario) -> CoordinationOutcome:
    """
    Run phase 1 and, if it succeeds, phase 2.

    Phase-1 failure leaves the users at the disagreement point. In phase 2 a
    non-regular problem has no unique equilibrium: with solution=spe the
    outcome is NON_REGULAR at the disagreement point, with solution=both the
    NBS becomes the operating point. In both cases the refusal is reported.

    Args:
        scenario: Scenario to negotiate

    Returns:
        CoordinationOutcome
    """
    params = scenario.params
    r0 = _scenario_r0(scenario)
    phase1 = incentive_check(params, scenario.scheme)

    if not phase1.proceed:
        logger.info(f"Phase 1 failed for {scenario.scheme}: {phase1.reason}")
        return CoordinationOutcome(
            scenario=scenario,
            phase1=phase1,
            status=Status.DISAGREED,
            operating_point=r0,
            disagreement=r0,
        )

    problem = build_problem(params, scenario.scheme, phase1.split)
    regular = is_regular_frontier(problem)
    if scenario.scheme is Scheme.HK:
        closed_form = is_regular_ic(params, phase1.split)
        if closed_form != regular:
            logger.warning(f"Regularity tests disagree for {params}: "
                           f"closed form {closed_form}, frontier {regular}")
    logger.info(f"Phase 2 ({scenario.scheme}): problem is {'regular' if regular else 'not regular'}")

    pair = None
    refusal = None
    if scenario.solution in (Solution.SPE, Solution.BOTH):
        try:
            if scenario.scheme is Scheme.MAC:
                pair = spe_mac(params.P1, params.P2, scenario.probs, scenario.first_mover)
            else:
                pair = spe(problem, scenario.probs, scenario.first_mover)
        except NonRegularError as e:
            refusal = str(e)
            logger.info(f"SPE refused: {refusal}")

    solution_nbs = None
    if scenario.solution in (Solution.NBS, Solution.BOTH) or refusal:
        solution_nbs = nbs(problem)

    if pair is not None:
        status, point = Status.AGREED, pair.outcome
    elif scenario.solution is Solution.SPE:
        status, point = Status.NON_REGULAR, r0
    else:
        status, point = Status.AGREED, solution_nbs

    share = None
    if scenario.scheme is Scheme.TDM and status is Status.AGREED:
        share = tdm_share(params, point)

    return CoordinationOutcome(
        scenario=scenario,
        phase1=phase1,
        status=status,
        operating_point=point,
        disagreement=r0,
        regular=regular,
        spe=pair,
        nbs=solution_nbs,
        refusal=refusal,
        tdm_share=share,
    )


def sweep(scenario: Scenario, p1_grid: list[float], p2: float | None = None,
          joint: bool = False) -> list[SweepRow]:
    """
    Equilibrium pair over a grid of p1 values.

    Args:
        scenario: Base scenario (its probs.p2 is used unless p2 is given)
        p1_grid: Values of p1, in output order
        p2: Fixed p2 for every row
        joint: Use p2 = p1 on every row

    Returns:
        One SweepRow per grid value; non-regular rows carry an error
    """
    params = scenario.params
    phase1 = incentive_check(params, scenario.scheme)
    if p2 is None:
        p2 = scenario.probs.p2

    if not phase1.proceed:
        reason = f"phase 1 failed: {phase1.reason}"
        return [SweepRow(p1=p1, p2=p1 if joint else p2, regular=False, error=reason) for p1 in p1_grid]

    problem = build_problem(params, scenario.scheme, phase1.split)
    regular = is_regular_frontier(problem)
    reference = nbs(problem)

    rows = []
    for p1 in p1_grid:
        row_p2 = p1 if joint else p2
        probs = BreakdownProbs(p1, row_p2)
        try:
            pair = spe(problem, probs, scenario.first_mover)
        except NonRegularError as e:
            rows.append(SweepRow(p1=p1, p2=row_p2, regular=False, nbs=reference, error=str(e)))
            continue
        rows.append(SweepRow(
            p1=p1,
            p2=row_p2,
            regular=regular,
            r_bar=pair.r_bar,
            r_tilde=pair.r_tilde,
            nbs=reference,
            nbs_distance=pair.r_bar.distance(reference),
        ))
        logger.debug(f"Sweep p1={p1} p2={row_p2}: R_bar={pair.r_bar} R_tilde={pair.r_tilde}")
    return rows


def _prefers(hk_rate: float, tdm_rate: float) -> Preference:
    if hk_rate > tdm_rate + TOL:
        return Preference.HK
    if tdm_rate > hk_rate + TOL:
        return Preference.TDM
    return Preference.INDIFFERENT


def compare_schemes(params: ChannelParams, probs: BreakdownProbs,
                    first_mover: Player = Player.USER1) -> SchemeComparison:
    """
    Negotiate under H-K and TDM and compare the equilibrium outcomes.

    A scheme whose phase 1 fails counts with the disagreement point. When
    either problem is not regular there is no unique equilibrium to compare
    and the verdict is INCOMPARABLE.
    """
    outcomes = {
        scheme: negotiate(Scenario(params, scheme, probs, first_mover, Solution.SPE))
        for scheme in (Scheme.HK, Scheme.TDM)
    }
    hk, tdm = outcomes[Scheme.HK], outcomes[Scheme.TDM]

    if Status.NON_REGULAR in (hk.status, tdm.status):
        preferences = {player: Preference.INDIFFERENT for player in Player}
        verdict = Verdict.INCOMPARABLE
    else:
        preferences = {
            player: _prefers(hk.operating_point.rate(player.index), tdm.operating_point.rate(player.index))
            for player in Player
        }
        chosen = set(preferences.values()) - {Preference.INDIFFERENT}
        if not chosen:
            verdict = Verdict.INCOMPARABLE
        elif chosen == {Preference.HK}:
            verdict = Verdict.HK_DOMINATES
        elif chosen == {Preference.TDM}:
            verdict = Verdict.TDM_DOMINATES
        else:
            verdict = Verdict.MIXED

    logger.info(f"Scheme comparison: {verdict} "
                f"(u1 prefers {preferences[Player.USER1]}, u2 prefers {preferences[Player.USER2]})")
    return SchemeComparison(hk=hk, tdm=tdm, verdict=verdict, preferences=preferences)
