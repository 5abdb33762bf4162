"""
SVG figures of rate regions, bargaining points and sweeps.

Figures are 800x600 pt with linear axes scaled to the regions shown. Output
is byte-for-byte repeatable: element ids use a fixed hash salt and no date
is written.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from icbargain.coordination import CoordinationOutcome, SweepRow  # noqa: E402
from icbargain.rate_region import RatePair, RateRegion  # noqa: E402

FIGSIZE = (800 / 72, 600 / 72)  # SVG user units are points

# (label, marker, color) of each bargaining point
MARKERS = {
    "disagreement": ("$R^0$", "s", "black"),
    "nbs": ("NBS", "*", "tab:green"),
    "r_bar": (r"$\bar{R}$", "o", "tab:red"),
    "r_tilde": (r"$\tilde{R}$", "o", "tab:blue"),
}


def _figure():
    plt.rcParams["svg.hashsalt"] = "icbargain"
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.set_xlabel("$R_1$ (bits/channel use)")
    ax.set_ylabel("$R_2$ (bits/channel use)")
    ax.grid(True, linewidth=0.5, alpha=0.5)
    return fig, ax


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _outcome_points(outcome: CoordinationOutcome) -> dict[str, RatePair]:
    points = {"disagreement": outcome.disagreement}
    if outcome.nbs is not None:
        points["nbs"] = outcome.nbs
    if outcome.spe is not None:
        points["r_bar"] = outcome.spe.r_bar
        points["r_tilde"] = outcome.spe.r_tilde
    return points


def _draw_region(ax, region: RateRegion, label: str, style: str = "-") -> None:
    ring = region.boundary()
    ax.plot([p.r1 for p in ring], [p.r2 for p in ring], style, linewidth=1.2, label=label)


def _draw_points(ax, points: dict[str, RatePair], suffix: str = "", filled: bool = True) -> None:
    for key, point in points.items():
        label, marker, color = MARKERS[key]
        ax.plot(
            point.r1, point.r2, marker,
            color=color,
            markerfacecolor=color if filled else "none",
            markersize=9,
            label=f"{label}{suffix}",
        )


def _scale(ax, regions: list[RateRegion]) -> None:
    width = max(region.bounding_box()[0] for region in regions)
    height = max(region.bounding_box()[1] for region in regions)
    ax.set_xlim(0.0, width * 1.05)
    ax.set_ylim(0.0, height * 1.05)


def render_region(path: Path, region: RateRegion, disagreement: RatePair | None = None,
                  title: str = "") -> Path:
    """Region boundary with an optional disagreement point."""
    fig, ax = _figure()
    _draw_region(ax, region, str(region.kind))
    if disagreement is not None:
        _draw_points(ax, {"disagreement": disagreement})
    _scale(ax, [region])
    ax.set_title(title)
    ax.legend(loc="upper right")
    return _save(fig, path)


def render_outcome(path: Path, region: RateRegion, outcome: CoordinationOutcome, title: str = "") -> Path:
    """Region boundary with disagreement point, NBS, R_bar and R_tilde."""
    fig, ax = _figure()
    _draw_region(ax, region, str(region.kind))
    _draw_points(ax, _outcome_points(outcome))
    _scale(ax, [region])
    ax.set_title(title)
    ax.legend(loc="upper right")
    return _save(fig, path)


def render_comparison(path: Path, regions: dict[str, RateRegion],
                      outcomes: dict[str, CoordinationOutcome], title: str = "") -> Path:
    """H-K and TDM regions with their bargaining points (open markers for TDM)."""
    fig, ax = _figure()
    for index, (name, region) in enumerate(regions.items()):
        _draw_region(ax, region, name, "-" if index == 0 else "--")
        _draw_points(ax, _outcome_points(outcomes[name]), f" ({name})", filled=index == 0)
    _scale(ax, list(regions.values()))
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize="small")
    return _save(fig, path)


def render_sweep(path: Path, rows: list[SweepRow], title: str = "") -> Path:
    """Equilibrium rates of both users against p1."""
    plt.rcParams["svg.hashsalt"] = "icbargain"
    fig, ax = plt.subplots(figsize=FIGSIZE)
    solved = [row for row in rows if row.r_bar is not None]
    p1 = [row.p1 for row in solved]
    ax.plot(p1, [row.r_bar.r1 for row in solved], "o-", color="tab:red", label=r"$\bar{R}_1$")
    ax.plot(p1, [row.r_bar.r2 for row in solved], "o--", color="tab:red", label=r"$\bar{R}_2$")
    ax.plot(p1, [row.r_tilde.r1 for row in solved], "s-", color="tab:blue", label=r"$\tilde{R}_1$")
    ax.plot(p1, [row.r_tilde.r2 for row in solved], "s--", color="tab:blue", label=r"$\tilde{R}_2$")
    if solved and solved[0].nbs is not None:
        ax.axhline(solved[0].nbs.r1, color="tab:green", linewidth=0.8, label="NBS $R_1$")
        ax.axhline(solved[0].nbs.r2, color="tab:green", linewidth=0.8, linestyle="--", label="NBS $R_2$")
    ax.set_xlabel("$p_1$")
    ax.set_ylabel("rate (bits/channel use)")
    ax.grid(True, linewidth=0.5, alpha=0.5)
    ax.set_title(title)
    ax.legend(loc="best")
    return _save(fig, path)
