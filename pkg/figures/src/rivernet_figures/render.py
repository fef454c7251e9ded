"""Deterministic figure rendering from rivernet CSV files."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

THRESHOLD_GID = "threshold-contour"  # the emphasized R0 = 1 level set

_STYLE = {
    "figure.figsize": (6.4, 4.8),
    "figure.dpi": 110,
    "svg.hashsalt": "rivernet-figures",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}

KINDS = ("lines", "contour", "edge-profiles")


class MissingColumn(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    """What to draw and from which CSV.

    kind "lines" plots y over x, one curve per value of the optional group
    column; "contour" needs exactly two axis columns and a value column;
    "edge-profiles" lays out one panel per edge of a steady-state table in
    topological (edge id) order.
    """
    kind: str
    input: Path
    out: Path                       # basename; .svg and .png are appended
    x: str | None = None
    y: str | None = None
    group: str | None = None
    axes: tuple[str, str] | None = None
    value: str = "R0"
    levels: tuple[float, ...] | None = None
    labels: dict = field(default_factory=dict)
    title: str = ""

    @classmethod
    def from_document(cls, doc: dict, base_dir: Path | None = None) -> "FigureSpec":
        base = Path(base_dir) if base_dir else Path.cwd()
        kind = doc.get("kind")
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}; got {kind!r}")
        if "input" not in doc or "out" not in doc:
            raise ValueError("spec needs 'input' and 'out'")
        axes = doc.get("axes")
        if kind == "contour":
            if not isinstance(axes, (list, tuple)) or len(axes) != 2:
                raise ValueError("contour kind requires exactly 2 axis columns")
            axes = (str(axes[0]), str(axes[1]))
        else:
            axes = None
        levels = doc.get("levels")
        return cls(
            kind=kind,
            input=(base / doc["input"]).resolve(),
            out=(base / doc["out"]).resolve(),
            x=doc.get("x"),
            y=doc.get("y"),
            group=doc.get("group"),
            axes=axes,
            value=doc.get("value", "R0"),
            levels=tuple(float(v) for v in levels) if levels else None,
            labels=dict(doc.get("labels", {})),
            title=doc.get("title", ""),
        )


def _read_csv(path: Path) -> pd.DataFrame:
    if not Path(path).exists():
        raise EmptyInput(f"input file not found: {path}")
    frame = pd.read_csv(path, comment="#")
    if frame.empty:
        raise EmptyInput(f"{path} has no data rows")
    return frame


def _need(frame: pd.DataFrame, columns, path) -> None:
    missing = [c for c in columns if c is not None and c not in frame.columns]
    if missing:
        raise MissingColumn(f"{path} lacks column(s) {missing}; "
                            f"has {list(frame.columns)}")


def render(spec: FigureSpec) -> list[Path]:
    """Render the figure; returns the written SVG and PNG paths."""
    with plt.rc_context(_STYLE):
        if spec.kind == "lines":
            fig = _render_lines(spec)
        elif spec.kind == "contour":
            fig = _render_contour(spec)
        else:
            fig = _render_edge_profiles(spec)
        try:
            svg = spec.out.with_suffix(".svg")
            png = spec.out.with_suffix(".png")
            svg.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(svg, metadata={"Date": None})
            fig.savefig(png, metadata={"Software": None})
        finally:
            plt.close(fig)
    return [svg, png]


def _render_lines(spec: FigureSpec):
    frame = _read_csv(spec.input)
    x = spec.x or frame.columns[0]
    y = spec.y or spec.value
    _need(frame, [x, y, spec.group], spec.input)
    fig, ax = plt.subplots()
    if spec.group:
        for key, sub in frame.groupby(spec.group, sort=True):
            sub = sub.sort_values(x, kind="stable")
            ax.plot(sub[x], sub[y], marker="o", markersize=3, label=str(key))
        ax.legend(title=spec.group)
    else:
        sub = frame.sort_values(x, kind="stable")
        ax.plot(sub[x], sub[y], marker="o", markersize=3)
    if y == "R0" and frame[y].min() < 1.0 < frame[y].max():
        ax.axhline(1.0, color="0.2", linewidth=1.0, linestyle="--")
    _decorate(ax, spec, x, y)
    return fig


def _render_contour(spec: FigureSpec):
    frame = _read_csv(spec.input)
    ax1, ax2 = spec.axes
    _need(frame, [ax1, ax2, spec.value], spec.input)
    if len(frame) < 4:
        raise EmptyInput(f"{spec.input}: contour needs a grid of rows, "
                         f"got {len(frame)}")
    ok = frame
    if "status" in frame.columns:
        ok = frame[frame["status"] == "ok"]
    table = ok.pivot_table(index=ax2, columns=ax1, values=spec.value)
    if table.isna().any().any() or table.shape[0] < 2 or table.shape[1] < 2:
        raise EmptyInput(f"{spec.input}: rows do not form a complete "
                         f"{ax1} x {ax2} grid")
    X, Y = np.meshgrid(table.columns.to_numpy(float), table.index.to_numpy(float))
    Z = table.to_numpy(float)

    fig, ax = plt.subplots()
    filled = ax.contourf(X, Y, Z, levels=12, cmap="viridis")
    fig.colorbar(filled, ax=ax, label=spec.value)
    if spec.levels:
        ax.contour(X, Y, Z, levels=sorted(spec.levels), colors="w",
                   linewidths=0.8)
    if Z.min() < 1.0 < Z.max():
        threshold = ax.contour(X, Y, Z, levels=[1.0], colors="k",
                               linewidths=2.2)
        threshold.set_gid(THRESHOLD_GID)
        ax.clabel(threshold, fmt={1.0: f"{spec.value} = 1"}, fontsize=9)
    _decorate(ax, spec, ax1, ax2)
    return fig


def _render_edge_profiles(spec: FigureSpec):
    frame = _read_csv(spec.input)
    _need(frame, ["edge_id", "x_m", "u"], spec.input)
    edges = sorted(frame["edge_id"].unique())
    fig, axs = plt.subplots(1, len(edges), sharey=True,
                            figsize=(2.4 * len(edges) + 1.2, 3.6))
    axs = np.atleast_1d(axs)
    top = frame["u"].max()
    for ax, edge in zip(axs, edges):
        sub = frame[frame["edge_id"] == edge].sort_values("x_m", kind="stable")
        ax.plot(sub["x_m"], sub["u"], color="tab:blue")
        ax.set_xlabel(spec.labels.get("x", "distance from upstream end (m)"))
        ax.set_title(f"edge {edge}")
        ax.set_ylim(0.0, 1.05 * top if top > 0 else 1.0)
    axs[0].set_ylabel(spec.labels.get("y", "density"))
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return fig


def _decorate(ax, spec: FigureSpec, xdefault: str, ydefault: str) -> None:
    ax.set_xlabel(spec.labels.get("x", xdefault))
    ax.set_ylabel(spec.labels.get("y", ydefault))
    if spec.title:
        ax.set_title(spec.title)
    ax.figure.tight_layout()
