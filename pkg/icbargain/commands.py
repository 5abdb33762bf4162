"""
CLI command runners.

Each runner writes its artifacts into the output directory, logs the run to
{command}.log there and finishes with report.json.
"""

from pathlib import Path

from icbargain.bargaining import (
    BargainingProblem,
    Scheme,
    incentive_check,
    is_regular_frontier,
)
from icbargain.config import ScenarioFile
from icbargain.coordination import (
    Status,
    build_problem,
    compare_schemes,
    negotiate,
    sweep,
)
from icbargain.errors import EmptyFrontierError, NonRegularError, ScenarioError
from icbargain.game_sim import (
    GameSpec,
    deviation_gain,
    equilibrium_strategies,
    expected_payoffs,
    monte_carlo,
    play,
)
from icbargain.log import get_run_logger, logger
from icbargain.plot import render_comparison, render_outcome, render_region, render_sweep
from icbargain.rate_region import (
    RateRegion,
    classify_interference,
    default_power_split,
    disagreement_point,
    hk_bounds,
    hk_polytope,
    mac_polytope,
    tdm_region,
)
from icbargain.report import (
    InputEcho,
    RunReport,
    comparison_record,
    exact,
    outcome_record,
    rate_record,
    save_report,
    split_record,
    sweep_record,
    write_csv,
    write_json,
)

EXIT_OK = 0
EXIT_NON_REGULAR = 3


def _echo(command: str, scenario: ScenarioFile) -> InputEcho:
    params = scenario.channel_params()
    return InputEcho(
        command=command,
        scheme=scenario.scheme,
        a=params.a,
        b=params.b,
        snr1_db=scenario.snr1_db,
        snr2_db=scenario.snr2_db,
        P1=params.P1,
        P2=params.P2,
        p1=scenario.p1,
        p2=scenario.p2,
        first_mover=scenario.first_mover,
        solution=scenario.solution,
    )


def _problem(scenario: ScenarioFile) -> BargainingProblem:
    params = scenario.channel_params()
    scheme = Scheme(scenario.scheme)
    split = incentive_check(params, scheme).split if scheme is Scheme.HK else None
    return build_problem(params, scheme, split)


def _region(scenario: ScenarioFile) -> RateRegion:
    params = scenario.channel_params()
    if scenario.scheme == Scheme.HK:
        return hk_polytope(params, default_power_split(params))
    if scenario.scheme == Scheme.TDM:
        return tdm_region(params)
    return mac_polytope(params.P1, params.P2)


def run_region(scenario: ScenarioFile, out_dir: Path, svg: bool, report: RunReport) -> int:
    """Region vertices, disagreement point and IR frontier."""
    params = scenario.channel_params()
    region = _region(scenario)
    r0 = disagreement_point(params)

    record = {
        "scheme": scenario.scheme,
        "regime": str(classify_interference(params)),
        "split": split_record(region.split),
        "disagreement": rate_record(r0),
        "vertices": [rate_record(v) for v in region.vertices],
        "essential": False,
        "regular": False,
        "frontier": [],
    }
    if region.split is not None:
        phi = hk_bounds(params, region.split)
        record["bounds"] = {
            name: exact(value) for name, value in vars(phi).items() if value is not None
        }

    rows = [["vertex", v.r1, v.r2] for v in region.vertices]
    rows.append(["disagreement", r0.r1, r0.r2])
    if region.contains(r0):
        problem = BargainingProblem(region, r0)
        try:
            if region.is_polytope:
                samples = [(p.r1, p.r2) for p in problem.frontier.points]
            else:
                samples = problem.frontier.sample(101)
            record["frontier"] = [{"r1": exact(x), "r2": exact(y)} for x, y in samples]
            rows.extend(["frontier", float(x), float(y)] for x, y in samples)
            record["essential"] = True
            record["regular"] = is_regular_frontier(problem)
        except EmptyFrontierError as e:
            logger.info(f"IR frontier is empty: {e}")
    else:
        logger.info(f"Disagreement point {r0} is outside the {region.kind} region")

    report.outcomes.append(record)
    report.artifacts.append(str(write_csv(out_dir / "region.csv", ["kind", "r1", "r2"], rows)))
    report.artifacts.append(str(write_json(out_dir / "region.json", record)))
    if svg:
        title = f"{scenario.scheme} region ({record['regime']} interference)"
        report.artifacts.append(str(render_region(out_dir / "region.svg", region, r0, title)))

    print(f"Region: {len(region.vertices)} vertices, disagreement point ({r0.r1:.6f}, {r0.r2:.6f})")
    return EXIT_OK


def run_bargain(scenario: ScenarioFile, out_dir: Path, svg: bool, report: RunReport) -> int:
    """Two-phase negotiation."""
    outcome = negotiate(scenario.to_scenario())
    record = outcome_record(outcome)
    report.outcomes.append(record)

    rows = [["disagreement", outcome.disagreement.r1, outcome.disagreement.r2]]
    if outcome.nbs is not None:
        rows.append(["nbs", outcome.nbs.r1, outcome.nbs.r2])
    if outcome.spe is not None:
        rows.append(["r_bar", outcome.spe.r_bar.r1, outcome.spe.r_bar.r2])
        rows.append(["r_tilde", outcome.spe.r_tilde.r1, outcome.spe.r_tilde.r2])
    rows.append(["operating_point", outcome.operating_point.r1, outcome.operating_point.r2])

    report.artifacts.append(str(write_csv(out_dir / "outcome.csv", ["point", "r1", "r2"], rows)))
    report.artifacts.append(str(write_json(out_dir / "outcome.json", record)))
    if svg:
        report.artifacts.append(str(render_outcome(out_dir / "bargain.svg", _region(scenario), outcome,
                                                   f"{scenario.scheme} bargaining")))

    op = outcome.operating_point
    print(f"Phase 1: {outcome.phase1.reason}")
    print(f"Status: {outcome.status}, operating point ({op.r1:.6f}, {op.r2:.6f})")
    if outcome.status is Status.NON_REGULAR:
        print(f"Refused: {outcome.refusal}")
        return EXIT_NON_REGULAR
    return EXIT_OK


def run_simulate(scenario: ScenarioFile, out_dir: Path, svg: bool, report: RunReport) -> int:
    """Seeded play, exact payoffs, Monte Carlo and deviation check of the equilibrium."""
    params = scenario.channel_params()
    phase1 = incentive_check(params, Scheme(scenario.scheme))
    if not phase1.proceed:
        report.outcomes.append({"phase1": phase1.reason, "simulated": False})
        print(f"Phase 1 failed, nothing to simulate: {phase1.reason}")
        return EXIT_OK

    problem = _problem(scenario)
    probs = scenario.breakdown_probs()
    sim = scenario.sim
    spec = GameSpec(problem, probs, scenario.to_scenario().first_mover, sim.max_rounds)
    try:
        s1, s2 = equilibrium_strategies(problem, probs)
    except NonRegularError as e:
        report.outcomes.append({"simulated": False, "refusal": str(e)})
        print(f"Refused: {e}")
        return EXIT_NON_REGULAR

    single = play(spec, s1, s2, sim.seed)
    expected = expected_payoffs(spec, s1, s2)
    mc = monte_carlo(spec, s1, s2, sim.trials, sim.seed)
    deviation = deviation_gain(spec, sim.grid_size, (s1, s2))

    record = {
        "simulated": True,
        "strategies": {
            "u1": {"offer": rate_record(s1.offer), "accept_threshold": exact(s1.accept_threshold)},
            "u2": {"offer": rate_record(s2.offer), "accept_threshold": exact(s2.accept_threshold)},
        },
        "play": {
            "seed": sim.seed,
            "ending": str(single.ending),
            "round": single.round,
            "payoffs": rate_record(single.payoffs),
            "truncated": single.truncated,
        },
        "expected_payoffs": rate_record(expected),
        "monte_carlo": {
            "trials": mc.trials,
            "seed": mc.seed,
            "mean_payoffs": rate_record(mc.mean_payoffs),
            "std_errors": [exact(e) for e in mc.std_errors],
            "agreements": mc.agreements,
            "breakdowns": mc.breakdowns,
            "truncated": mc.truncated,
            "mean_round": exact(mc.mean_round),
        },
        "deviation": {
            "grid_size": deviation.grid_size,
            "gains": {str(player): exact(gain) for player, gain in deviation.gains.items()},
        },
    }
    report.outcomes.append(record)

    rounds = sorted(set(mc.agreement_rounds) | set(mc.breakdown_rounds))
    rows = [[r, mc.agreement_rounds.get(r, 0), mc.breakdown_rounds.get(r, 0)] for r in rounds]
    report.artifacts.append(str(write_csv(out_dir / "rounds.csv", ["round", "agreements", "breakdowns"], rows)))
    report.artifacts.append(str(write_json(out_dir / "simulate.json", record)))

    print(f"Play (seed {sim.seed}): {single.ending} at round {single.round}")
    print(f"Monte Carlo: {mc.agreements}/{mc.trials} agreements, "
          f"mean payoffs ({mc.mean_payoffs.r1:.6f}, {mc.mean_payoffs.r2:.6f})")
    print(f"Max deviation gain: {deviation.max_gain:.3e}")
    return EXIT_OK


def run_sweep(scenario: ScenarioFile, out_dir: Path, svg: bool, report: RunReport) -> int:
    """Equilibrium pair over a p1 grid."""
    grid = scenario.sweep.grid()
    for p1 in grid:
        if not 0.0 < p1 < 1.0:
            raise ScenarioError(f"grid value {p1} is not in (0, 1)", key="p1")
    rows = sweep(scenario.to_scenario(), grid, p2=scenario.p2, joint=scenario.sweep.joint)

    header = ["p1", "p2", "r_bar1", "r_bar2", "r_tilde1", "r_tilde2", "nbs1", "nbs2",
              "nbs_distance", "regular", "error"]
    table = []
    for row in rows:
        table.append([
            row.p1, row.p2,
            row.r_bar.r1 if row.r_bar else None, row.r_bar.r2 if row.r_bar else None,
            row.r_tilde.r1 if row.r_tilde else None, row.r_tilde.r2 if row.r_tilde else None,
            row.nbs.r1 if row.nbs else None, row.nbs.r2 if row.nbs else None,
            row.nbs_distance, str(row.regular).lower(), row.error or "",
        ])
    records = [sweep_record(row) for row in rows]
    report.outcomes.extend(records)

    report.artifacts.append(str(write_csv(out_dir / "sweep.csv", header, table)))
    report.artifacts.append(str(write_json(out_dir / "sweep.json", records)))
    if svg:
        report.artifacts.append(str(render_sweep(out_dir / "sweep.svg", rows,
                                                 f"{scenario.scheme} equilibrium vs p1")))

    solved = sum(1 for row in rows if row.r_bar is not None)
    print(f"Sweep: {len(rows)} rows, {solved} solved")
    return EXIT_OK


def run_compare(scenario: ScenarioFile, out_dir: Path, svg: bool, report: RunReport) -> int:
    """H-K against TDM."""
    if scenario.scheme == Scheme.MAC:
        raise ScenarioError("compare needs an interference channel, not the MAC", key="scheme")
    full = scenario.to_scenario()
    comparison = compare_schemes(full.params, full.probs, full.first_mover)
    record = comparison_record(comparison)
    report.outcomes.append(record)

    rows = []
    for name, outcome in (("hk", comparison.hk), ("tdm", comparison.tdm)):
        op = outcome.operating_point
        rows.append([name, str(outcome.status), op.r1, op.r2])
    report.artifacts.append(str(write_csv(out_dir / "compare.csv", ["scheme", "status", "r1", "r2"], rows)))
    report.artifacts.append(str(write_json(out_dir / "compare.json", record)))
    if svg:
        regions = {
            "hk": build_problem(full.params, Scheme.HK, comparison.hk.phase1.split).region,
            "tdm": build_problem(full.params, Scheme.TDM).region,
        }
        outcomes = {"hk": comparison.hk, "tdm": comparison.tdm}
        report.artifacts.append(str(render_comparison(out_dir / "compare.svg", regions, outcomes,
                                                      "H-K vs TDM")))

    print(f"Verdict: {comparison.verdict}")
    for player, preference in comparison.preferences.items():
        print(f"  {player} prefers {preference}")
    return EXIT_OK


RUNNERS = {
    "region": run_region,
    "bargain": run_bargain,
    "simulate": run_simulate,
    "sweep": run_sweep,
    "compare": run_compare,
}


def run_command(command: str, scenario: ScenarioFile, out_dir: Path, svg: bool = True) -> int:
    """
    Run one command and write its report.

    Args:
        command: One of region, bargain, simulate, sweep, compare
        scenario: Validated scenario
        out_dir: Output directory (created if missing)
        svg: Write SVG figures

    Returns:
        Exit code
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    run_log = get_run_logger(out_dir, command)
    report = RunReport(inputs=_echo(command, scenario))
    run_log.info(f"{command}: {report.inputs}")

    status = RUNNERS[command](scenario, out_dir, svg, report)

    report.exit_status = status
    path = save_report(out_dir, report)
    run_log.info(f"{command} finished with exit status {status}; artifacts: {', '.join(report.artifacts)}")
    print(f"Report: {path}")
    return status
