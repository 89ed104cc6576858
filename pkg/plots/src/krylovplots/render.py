"""Renderers: one vector image per figure spec.

Every curve comes straight from a CSV column.  The only arithmetic here is
axis placement; statistics were computed by whatever wrote the files.
"""

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .figspec import FigureSpec, SpecError
from .readers import read_column_pair, read_table

# stable ids inside SVG output, so identical inputs give identical bytes
_RC = {"svg.hashsalt": "krylovplots", "figure.figsize": (6.4, 4.2)}

_HAIRLINE = dict(color="steelblue", alpha=0.25, linewidth=0.6)
_MEAN = dict(color="tab:orange", linewidth=2.5)
_OVERLAY = dict(color="black", linestyle="--", linewidth=1.2)


@dataclass(frozen=True)
class RenderResult:
    """Where the image went and exactly which arrays were drawn."""

    path: Path
    kind: str
    table: dict


def render(spec: FigureSpec) -> RenderResult:
    """Draw one figure and return the output path with the plotted data."""
    draw = {"sample_paths": _draw_sample_paths,
            "burn_in": _draw_burn_in,
            "srank_profile": _draw_srank_profile,
            "bound_overlay": _draw_bound_overlay}[spec.kind]
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots()
        try:
            table = draw(ax, spec)
            if spec.overlay is not None:
                x, y = read_column_pair(spec.overlay["csv"],
                                        spec.overlay["x"], spec.overlay["y"])
                ax.plot(x, y, label=spec.overlay.get("label", "reference"),
                        **_OVERLAY)
                table["overlay_x"], table["overlay_y"] = x, y
            if spec.title:
                ax.set_title(spec.title)
            if ax.get_legend_handles_labels()[0]:
                ax.legend(frameon=False)
            ax.grid(True, alpha=0.3)
            fig.tight_layout()
            out = Path(spec.out)
            out.parent.mkdir(parents=True, exist_ok=True)
            if out.suffix.lower() == ".svg":
                metadata = {"Date": None}
            else:
                metadata = {"CreationDate": None}
            fig.savefig(out, metadata=metadata)
        finally:
            plt.close(fig)
    return RenderResult(Path(spec.out), spec.kind, table)


def _draw_sample_paths(ax, spec):
    trials = read_table(spec.inputs["trials"], "sample_paths_trials")
    means = read_table(spec.inputs["mean"], "sample_paths_mean")
    ell = float(spec.ell)
    t_keep = trials["ell"] == ell
    m_keep = means["ell"] == ell
    if not t_keep.any() or not m_keep.any():
        present = sorted(set(np.unique(trials["ell"])) | set(np.unique(means["ell"])))
        raise SpecError(f"no rows for ell = {spec.ell}; the CSVs hold ell in "
                        f"{[int(v) for v in present]}")
    trial_ids = trials["trial"][t_keep]
    q_col = trials["q"][t_keep]
    err_col = trials["err"][t_keep]
    for tid in np.unique(trial_ids):
        rows = trial_ids == tid
        order = np.argsort(q_col[rows])
        ax.plot(q_col[rows][order], err_col[rows][order], **_HAIRLINE)
    mean_q = means["q"][m_keep]
    mean_err = means["mean_err"][m_keep]
    order = np.argsort(mean_q)
    ax.plot(mean_q[order], mean_err[order], label="mean error", **_MEAN)
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("depth q")
    ax.set_ylabel("relative error")
    if not spec.title:
        ax.set_title(f"block size {spec.ell}")
    return {"q": mean_q[order], "mean": mean_err[order],
            "trial": trial_ids, "trial_q": q_col, "trial_err": err_col}


def _draw_burn_in(ax, spec):
    cols = read_table(spec.inputs["table"], "burn_in_mean")
    for value in np.unique(cols["series"]):
        rows = cols["series"] == value
        order = np.argsort(cols["q"][rows])
        ax.plot(cols["q"][rows][order], cols["mean_err"][rows][order],
                label=f"{spec.series_label} = {value:g}")
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("depth q")
    ax.set_ylabel("mean relative error")
    return {"series": cols["series"], "q": cols["q"], "mean": cols["mean_err"]}


def _draw_srank_profile(ax, spec):
    cols = read_table(spec.inputs["table"], "srank_profile")
    for value in np.unique(cols["series"]):
        rows = cols["series"] == value
        order = np.argsort(cols["nu"][rows])
        ax.plot(cols["nu"][rows][order], cols["log_srk"][rows][order],
                label=f"{spec.series_label} = {value:g}")
    ax.set_xlabel("nu")
    ax.set_ylabel("log srk(nu)")
    return {"series": cols["series"], "nu": cols["nu"],
            "log_srk": cols["log_srk"]}


def _draw_bound_overlay(ax, spec):
    if spec.table == "prob":
        cols = read_table(spec.inputs["table"], "bound_check_prob")
        keep = cols["eps"] == spec.eps
        if not keep.any():
            present = ", ".join(f"{v:g}" for v in np.unique(cols["eps"]))
            raise SpecError(f"no rows for eps = {spec.eps:g}; the CSV holds "
                            f"eps in {{{present}}}")
        cols = {name: col[keep] for name, col in cols.items()}
        point, half, bound = "p_hat", "wilson_halfwidth", "prob_best"
        ax.set_ylabel(f"P[err >= {spec.eps:g}]")
    else:
        cols = read_table(spec.inputs["table"], "bound_check_expect")
        point, half, bound = "mean_err", "stderr", "expect_best"
        ax.set_ylabel("mean relative error")
    for i, ell in enumerate(np.unique(cols["ell"])):
        rows = cols["ell"] == ell
        order = np.argsort(cols["q"][rows])
        q = cols["q"][rows][order]
        color = f"C{i}"
        ax.errorbar(q, cols[point][rows][order], yerr=cols[half][rows][order],
                    fmt="o", markersize=4, capsize=3, color=color,
                    label=f"empirical, ell = {ell:g}")
        ax.plot(q, cols[bound][rows][order], linestyle="--", color=color,
                label=f"bound, ell = {ell:g}")
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("depth q")
    return {name: col for name, col in cols.items()}
