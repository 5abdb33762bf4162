"""
Extensive-form alternating-offer game with breakdown risk.

Players alternate proposals; the first mover proposes in odd rounds. After a
rejection a chance move ends the game in disagreement with the proposer's
breakdown probability. Strategies are stationary: a standing offer plus an
acceptance threshold on the player's own rate.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from icbargain.bargaining import (
    BargainingProblem,
    BreakdownProbs,
    Player,
    spe,
)
from icbargain.errors import DomainError, PreconditionError
from icbargain.log import logger
from icbargain.rate_region import RatePair

DEFAULT_MAX_ROUNDS = 10_000


class Ending(StrEnum):
    AGREEMENT = "agreement"
    BREAKDOWN = "breakdown"


@dataclass(frozen=True)
class Strategy:
    """Standing offer and acceptance threshold on own rate."""
    offer: RatePair
    accept_threshold: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.accept_threshold) or self.accept_threshold < 0:
            raise DomainError(f"accept_threshold must be finite and >= 0, got {self.accept_threshold}")

    def accepts(self, offer: RatePair, me: Player) -> bool:
        return offer.rate(me.index) >= self.accept_threshold


@dataclass(frozen=True)
class PlayOutcome:
    ending: Ending
    round: int
    payoffs: RatePair
    truncated: bool = False  # stopped at max_rounds without resolution


@dataclass(frozen=True)
class GameSpec:
    problem: BargainingProblem
    probs: BreakdownProbs
    first_mover: Player = Player.USER1
    max_rounds: int = DEFAULT_MAX_ROUNDS

    def __post_init__(self) -> None:
        if self.max_rounds < 1:
            raise DomainError(f"max_rounds must be >= 1, got {self.max_rounds}")

    def proposer(self, round_no: int) -> Player:
        return self.first_mover if round_no % 2 == 1 else self.first_mover.other()


@dataclass
class MonteCarloResult:
    """Summary of repeated seeded plays."""
    trials: int
    seed: int
    mean_payoffs: RatePair
    std_errors: tuple[float, float]
    agreements: int
    breakdowns: int
    truncated: int
    mean_round: float
    agreement_rounds: dict[int, int] = field(default_factory=dict)
    breakdown_rounds: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class DeviationReport:
    """Best stationary deviation found for each player."""
    baseline: RatePair
    gains: dict[Player, float]
    best_offers: dict[Player, RatePair]
    best_thresholds: dict[Player, float]
    grid_size: int

    @property
    def max_gain(self) -> float:
        return max(self.gains.values())


def equilibrium_strategies(problem: BargainingProblem, probs: BreakdownProbs) -> tuple[Strategy, Strategy]:
    """
    Stationary equilibrium strategies.

    Player 1 offers R_bar and accepts anything giving it at least R_tilde1;
    player 2 offers R_tilde and accepts anything giving it at least R_bar2.
    """
    pair = spe(problem, probs)
    return (
        Strategy(offer=pair.r_bar, accept_threshold=pair.r_tilde.r1),
        Strategy(offer=pair.r_tilde, accept_threshold=pair.r_bar.r2),
    )


def _check_feasible(spec: GameSpec, s1: Strategy, s2: Strategy) -> None:
    for player, strategy in ((Player.USER1, s1), (Player.USER2, s2)):
        if not spec.problem.region.contains(strategy.offer):
            raise PreconditionError(f"offer {strategy.offer} of {player} is not feasible")


def _play(spec: GameSpec, s1: Strategy, s2: Strategy, seed) -> PlayOutcome:
    strategies = {Player.USER1: s1, Player.USER2: s2}
    rng = None  # created at the first chance move
    for round_no in range(1, spec.max_rounds + 1):
        proposer = spec.proposer(round_no)
        responder = proposer.other()
        offer = strategies[proposer].offer
        if strategies[responder].accepts(offer, responder):
            return PlayOutcome(Ending.AGREEMENT, round_no, offer)
        if rng is None:
            rng = np.random.default_rng(seed)
        if rng.random() < spec.probs.of(proposer):
            return PlayOutcome(Ending.BREAKDOWN, round_no, spec.problem.disagreement)
    return PlayOutcome(Ending.BREAKDOWN, spec.max_rounds, spec.problem.disagreement, truncated=True)


def play(spec: GameSpec, s1: Strategy, s2: Strategy, seed: int) -> PlayOutcome:
    """
    Play one game.

    Args:
        spec: Game specification
        s1: Strategy of player 1
        s2: Strategy of player 2
        seed: Seed of the chance moves

    Returns:
        PlayOutcome (deterministic given seed)
    """
    _check_feasible(spec, s1, s2)
    return _play(spec, s1, s2, seed)


def _chain_value(first_offer, second_offer, first_accepted, second_accepted, p_first, fallback):
    # Value of the two-state stationary chain: round-1 offer accepted, else a
    # chance move, else the round-2 offer accepted; otherwise play rejects
    # forever and ends at the disagreement point with probability 1.
    return np.where(
        first_accepted,
        first_offer,
        np.where(second_accepted, p_first * fallback + (1.0 - p_first) * second_offer, fallback),
    )


def expected_payoffs(spec: GameSpec, s1: Strategy, s2: Strategy) -> RatePair:
    """
    Exact expected payoffs of a stationary strategy pair.

    Args:
        spec: Game specification
        s1: Strategy of player 1
        s2: Strategy of player 2

    Returns:
        Expected payoffs (no sampling)
    """
    _check_feasible(spec, s1, s2)
    first = spec.first_mover
    second = first.other()
    strategies = {Player.USER1: s1, Player.USER2: s2}
    offer_a = strategies[first].offer
    offer_b = strategies[second].offer
    accepted_a = strategies[second].accepts(offer_a, second)
    accepted_b = strategies[first].accepts(offer_b, first) and spec.max_rounds >= 2
    p_a = spec.probs.of(first)
    r0 = spec.problem.disagreement

    values = [
        float(_chain_value(offer_a.rate(i), offer_b.rate(i), accepted_a, accepted_b, p_a, r0.rate(i)))
        for i in (1, 2)
    ]
    return RatePair(*values)


def deviation_gain(spec: GameSpec, grid_size: int,
                   profile: tuple[Strategy, Strategy] | None = None) -> DeviationReport:
    """
    Best improvement from a unilateral stationary deviation.

    One player keeps its strategy from the profile (default: equilibrium
    strategies); the other tries every combination of grid_size offers along
    the IR frontier and grid_size thresholds spanning [own disagreement rate,
    own largest frontier rate]. Payoffs are exact.

    Args:
        spec: Game specification (regular problem)
        grid_size: Offers and thresholds per axis (>= 3)
        profile: Strategy pair to test

    Returns:
        DeviationReport with the gain of each player
    """
    if grid_size < 3:
        raise DomainError(f"grid_size must be >= 3, got {grid_size}")
    if profile is None:
        profile = equilibrium_strategies(spec.problem, spec.probs)
    baseline = expected_payoffs(spec, *profile)
    strategies = {Player.USER1: profile[0], Player.USER2: profile[1]}

    frontier = spec.problem.frontier
    offers = frontier.sample(grid_size)
    r0 = spec.problem.disagreement
    first = spec.first_mover
    p_a = spec.probs.of(first)
    reach_second = spec.max_rounds >= 2
    top = {Player.USER1: frontier.right.r1, Player.USER2: frontier.top.r2}

    gains, best_offers, best_thresholds = {}, {}, {}
    for me in (Player.USER1, Player.USER2):
        other = me.other()
        i, j = me.index - 1, other.index - 1
        held = strategies[other]
        thresholds = np.linspace(r0.rate(me.index), top[me], grid_size)

        # offers along axis 0, thresholds along axis 1
        they_accept = (offers[:, j] >= held.accept_threshold)[:, None]
        i_accept = (held.offer.rate(me.index) >= thresholds)[None, :]
        if me is first:
            payoff = _chain_value(offers[:, i][:, None], held.offer.rate(me.index),
                                  they_accept, i_accept & reach_second, p_a, r0.rate(me.index))
        else:
            payoff = _chain_value(held.offer.rate(me.index), offers[:, i][:, None],
                                  i_accept, they_accept & reach_second, p_a, r0.rate(me.index))
        payoff = np.broadcast_to(payoff, (grid_size, grid_size))
        k, m = np.unravel_index(np.argmax(payoff), payoff.shape)
        gains[me] = float(payoff[k, m]) - baseline.rate(me.index)
        best_offers[me] = RatePair.from_array(offers[k])
        best_thresholds[me] = float(thresholds[m])
        logger.debug(f"Deviation by {me}: gain {gains[me]:.3e} with offer {best_offers[me]} "
                     f"threshold {best_thresholds[me]:.6f}")

    return DeviationReport(baseline, gains, best_offers, best_thresholds, grid_size)


def trial_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Seed of one Monte Carlo trial, derived from the master seed and trial index."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(index,))


def monte_carlo(spec: GameSpec, s1: Strategy, s2: Strategy, trials: int, seed: int) -> MonteCarloResult:
    """
    Repeated seeded plays.

    Trial i plays with trial_seed(seed, i), so any trial can be replayed
    alone and the result does not depend on evaluation order.

    Args:
        spec: Game specification
        s1: Strategy of player 1
        s2: Strategy of player 2
        trials: Number of plays (>= 1)
        seed: Master seed

    Returns:
        MonteCarloResult with means, standard errors and round histograms
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    _check_feasible(spec, s1, s2)

    payoffs = np.empty((trials, 2))
    rounds = np.empty(trials, dtype=np.int64)
    agreed = np.empty(trials, dtype=bool)
    truncated = 0
    for index in range(trials):
        outcome = _play(spec, s1, s2, trial_seed(seed, index))
        payoffs[index] = tuple(outcome.payoffs)
        rounds[index] = outcome.round
        agreed[index] = outcome.ending is Ending.AGREEMENT
        truncated += outcome.truncated

    means = payoffs.mean(axis=0)
    if trials > 1:
        errors = payoffs.std(axis=0, ddof=1) / np.sqrt(trials)
    else:
        errors = np.zeros(2)

    result = MonteCarloResult(
        trials=trials,
        seed=seed,
        mean_payoffs=RatePair.from_array(means),
        std_errors=(float(errors[0]), float(errors[1])),
        agreements=int(agreed.sum()),
        breakdowns=int((~agreed).sum()),
        truncated=truncated,
        mean_round=float(rounds.mean()),
        agreement_rounds=dict(sorted(Counter(rounds[agreed].tolist()).items())),
        breakdown_rounds=dict(sorted(Counter(rounds[~agreed].tolist()).items())),
    )
    logger.info(f"Monte Carlo: {trials} trials, {result.agreements} agreements, "
                f"mean payoffs {result.mean_payoffs}")
    return result
