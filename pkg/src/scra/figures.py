"""Reference tables and figures as column-oriented datasets.

Each builder returns a FigureData whose columns are plain float/int lists;
the CSV writer and the matplotlib renderer both consume that structure.
Every dataset carries a validator re-checking the ordering and sandwich
invariants the series must satisfy before a file is accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .errors import ArgumentError, IntegrityError

DEFAULT_M = 1031
DEFAULT_P = 100.0
DEFAULT_PM = 3.0
LOG2_HALF = 0.5  # net-rate ceiling is 0.5*log2(P)


@dataclass
class FigureData:
    name: str
    x_label: str
    y_label: str
    header: list[str]
    rows: list[tuple]
    xscale: str = "linear"
    config: dict = field(default_factory=dict)

    def column(self, name: str) -> list[float]:
        idx = self.header.index(name)
        return [row[idx] for row in self.rows]


def _slots_series(K: int, L_max: int):
    Ls = range(1, L_max + 1)
    exact = [analysis.expected_slots(L, K) for L in Ls]
    lo = [L if L <= K else analysis.lower_slope(K) * L - 1.0 for L in Ls]
    hi = [L if L <= K else analysis.upper_slope(K) * L - 1.0 for L in Ls]
    return exact, lo, hi


def fig_slots_in_l(K_list=(1, 4, 16), L_max=20, **_) -> FigureData:
    header = ["L"]
    series = {}
    for K in K_list:
        exact, lo, hi = _slots_series(K, L_max)
        series[f"K{K}_exact"] = exact
        series[f"K{K}_lower"] = lo
        series[f"K{K}_upper"] = hi
        header += [f"K{K}_exact", f"K{K}_lower", f"K{K}_upper"]
    rows = [
        tuple([L] + [series[h][L - 1] for h in header[1:]]) for L in range(1, L_max + 1)
    ]
    return FigureData(
        "SinL", "L", "expected slots", header, rows,
        config={"K": list(K_list), "L_max": L_max},
    )


def fig_rres_in_l(K_list=(1, 4, 16), L_max=20, **_) -> FigureData:
    header = ["L"]
    series = {}
    for K in K_list:
        exact, lo, hi = _slots_series(K, L_max)
        series[f"K{K}_exact"] = [L / s for L, s in zip(range(1, L_max + 1), exact)]
        # bound roles invert under division
        series[f"K{K}_lower"] = [L / s for L, s in zip(range(1, L_max + 1), hi)]
        series[f"K{K}_upper"] = [L / s for L, s in zip(range(1, L_max + 1), lo)]
        header += [f"K{K}_exact", f"K{K}_lower", f"K{K}_upper"]
    rows = [
        tuple([L] + [series[h][L - 1] for h in header[1:]]) for L in range(1, L_max + 1)
    ]
    return FigureData(
        "RresinL", "L", "users resolved per slot", header, rows,
        config={"K": list(K_list), "L_max": L_max},
    )


def fig_avgperf_in_k(M=DEFAULT_M, pM_list=(3.0, 6.0, 12.0), K_max=64, sic=False, **_) -> FigureData:
    header = ["K"] + [f"pM{g:g}" for g in pM_list]
    rows = []
    for K in range(1, K_max + 1):
        row = [K]
        for g in pM_list:
            row.append(analysis.throughput_lower(M, K, g / M, sic))
        rows.append(tuple(row))
    return FigureData(
        "avgperf_inK", "K", "mean users resolved per slot", header, rows,
        config={"M": M, "pM": list(pM_list), "K_max": K_max, "sic": sic},
    )


def fig_avg_vs_worst(M=DEFAULT_M, K_list=(4, 8, 16), pM_max=30, sic=False, **_) -> FigureData:
    header = ["pM"]
    for K in K_list:
        header += [f"K{K}_avg", f"K{K}_worst"]
    rows = []
    for g in range(1, pM_max + 1):
        row = [float(g)]
        for K in K_list:
            row.append(analysis.throughput_lower(M, K, g / M, sic))
            row.append(analysis.worst_case_throughput(K, sic))
        rows.append(tuple(row))
    return FigureData(
        "avg_vs_worst", "pM", "users resolved per slot", header, rows,
        config={"M": M, "K": list(K_list), "pM_max": pM_max, "sic": sic},
    )


def _d_grid(d_lo=1e2, d_hi=1e6, points=81):
    return np.logspace(math.log10(d_lo), math.log10(d_hi), points)


def fig_rtotal_in_d(
    M=DEFAULT_M, pM=DEFAULT_PM, P=DEFAULT_P, K_list=(4, 8, 16),
    d_lo=1e2, d_hi=1e6, points=81, **_,
) -> FigureData:
    p = pM / M
    header = ["D"] + [f"K{K}" for K in K_list] + ["upper", "plnc_limit", "Kstar"]
    grid = _d_grid(d_lo, d_hi, points)
    half = analysis.plnc_rate(P)
    upper = analysis.net_rate_upper(analysis.SchemeParams(M=M, K=1, p=p, P=P, D=1.0))
    rows = []
    for D in grid:
        row = [float(D)]
        for K in K_list:
            params = analysis.SchemeParams(M=M, K=K, p=p, P=P, D=float(D))
            row.append(analysis.mean_net_rate_lower(params))
        _, best = analysis.optimal_k(M, p, P, float(D))
        row += [upper, half, best]
        rows.append(tuple(row))
    return FigureData(
        "Rtotal_inD", "D (bits)", "net rate (bits/channel use)", header, rows,
        xscale="log",
        config={"M": M, "pM": pM, "P": P, "K": list(K_list), "points": points},
    )


def fig_optimal_k_in_d(
    M=DEFAULT_M, P=DEFAULT_P, pM_list=(1.0, 3.0, 6.0, 12.0),
    d_lo=1e2, d_hi=1e6, points=81, sic=False, **_,
) -> FigureData:
    header = ["D"] + [f"pM{g:g}" for g in pM_list]
    grid = _d_grid(d_lo, d_hi, points)
    rows = []
    for D in grid:
        row = [float(D)]
        for g in pM_list:
            k, _ = analysis.optimal_k(M, g / M, P, float(D), sic=sic)
            row.append(k)
        rows.append(tuple(row))
    return FigureData(
        "optimalK_inD", "D (bits)", "best K", header, rows, xscale="log",
        config={"M": M, "P": P, "pM": list(pM_list), "points": points, "sic": sic},
    )


def fig_rtotal_in_d_sic(
    M=DEFAULT_M, pM=DEFAULT_PM, P=DEFAULT_P, d_lo=1e2, d_hi=1e6, points=81, **_,
) -> FigureData:
    p = pM / M
    header = ["D", "net_sic", "net", "upper", "plnc_limit"]
    grid = _d_grid(d_lo, d_hi, points)
    half = analysis.plnc_rate(P)
    upper = analysis.net_rate_upper(analysis.SchemeParams(M=M, K=1, p=p, P=P, D=1.0))
    rows = []
    for D in grid:
        _, best_sic = analysis.optimal_k(M, p, P, float(D), sic=True)
        _, best = analysis.optimal_k(M, p, P, float(D), sic=False)
        rows.append((float(D), best_sic, best, upper, half))
    return FigureData(
        "Rtotal_inD_SIC", "D (bits)", "net rate (bits/channel use)", header, rows,
        xscale="log", config={"M": M, "pM": pM, "P": P, "points": points},
    )


def fig_table_slopes(K_list=(1, 2, 4, 8, 16), **_) -> FigureData:
    rows = [
        (K, analysis.lower_slope(K), analysis.upper_slope(K)) for K in K_list
    ]
    return FigureData(
        "tableI", "K", "bound slope", ["K", "slope_lower", "slope_upper"], rows,
        config={"K": list(K_list)},
    )


def fig_table_slopes_sic(K_list=(1, 2, 4, 8), **_) -> FigureData:
    rows = [(K, analysis.upper_slope_sic(K)) for K in K_list]
    return FigureData(
        "tableII", "K", "bound slope", ["K", "slope_upper_sic"], rows,
        config={"K": list(K_list)},
    )


FIGURES = {
    "SinL": fig_slots_in_l,
    "RresinL": fig_rres_in_l,
    "avgperf_inK": fig_avgperf_in_k,
    "avg_vs_worst": fig_avg_vs_worst,
    "Rtotal_inD": fig_rtotal_in_d,
    "optimalK_inD": fig_optimal_k_in_d,
    "Rtotal_inD_SIC": fig_rtotal_in_d_sic,
    "tableI": fig_table_slopes,
    "tableII": fig_table_slopes_sic,
}


def build_figure(name: str, **overrides) -> FigureData:
    if name not in FIGURES:
        raise ArgumentError(
            f"unknown figure {name!r}; valid names: {', '.join(sorted(FIGURES))}"
        )
    fig = FIGURES[name](**{k: v for k, v in overrides.items() if v is not None})
    validate_figure(fig)
    return fig


def validate_figure(fig: FigureData) -> None:
    """Re-check the ordering/sandwich invariants of a built dataset."""
    cols = {h: fig.column(h) for h in fig.header}
    if fig.name in ("SinL", "RresinL"):
        for h in fig.header:
            if h.endswith("_exact"):
                stem = h[: -len("_exact")]
                lo, hi = cols[stem + "_lower"], cols[stem + "_upper"]
                for a, b, c in zip(lo, cols[h], hi):
                    if not (a <= b + 1e-12 and b <= c + 1e-12):
                        raise IntegrityError(f"{fig.name}: {stem} bound sandwich violated")
    elif fig.name == "avgperf_inK":
        for h in fig.header[1:]:
            col = cols[h]
            if any(b < a - 1e-12 for a, b in zip(col, col[1:])):
                raise IntegrityError("avgperf_inK: series must be nondecreasing in K")
            if any(not 0.0 <= v <= 1.0 + 1e-12 for v in col):
                raise IntegrityError("avgperf_inK: throughput must lie in [0, 1]")
    elif fig.name in ("Rtotal_inD", "Rtotal_inD_SIC"):
        half = cols["plnc_limit"][0]
        for h in fig.header[1:]:
            if h in ("upper", "plnc_limit"):
                continue
            if any(v > min(half, u) + 1e-9 for v, u in zip(cols[h], cols["upper"])):
                raise IntegrityError(f"{fig.name}: lower bound exceeds an upper bound")
        if fig.name == "Rtotal_inD_SIC":
            if any(s < n - 1e-12 for s, n in zip(cols["net_sic"], cols["net"])):
                raise IntegrityError("Rtotal_inD_SIC: cancellation curve fell below basic")
    elif fig.name == "optimalK_inD":
        for h in fig.header[1:]:
            col = cols[h]
            if any(b < a for a, b in zip(col, col[1:])):
                raise IntegrityError("optimalK_inD: best K must be nondecreasing in D")


def format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def figure_csv(fig: FigureData, comments: list[str]) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(fig.header))
    for row in fig.rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def render_figure(fig: FigureData, path: str) -> None:
    """Render the dataset to a PNG next to its CSV."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig_mpl, ax = plt.subplots(figsize=(7.0, 4.5))
    xs = fig.column(fig.header[0])
    table_like = fig.name in ("tableI", "tableII")
    for h in fig.header[1:]:
        style = {"marker": "o", "linestyle": "-"} if table_like else {}
        if h in ("upper", "plnc_limit"):
            style = {"linestyle": "--" if h == "upper" else ":", "color": "black"}
        ax.plot(xs, fig.column(h), label=h, **style)
    if fig.xscale == "log":
        ax.set_xscale("log")
    ax.set_xlabel(fig.x_label)
    ax.set_ylabel(fig.y_label)
    ax.set_title(fig.name)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig_mpl.tight_layout()
    fig_mpl.savefig(path, dpi=120)
    plt.close(fig_mpl)
