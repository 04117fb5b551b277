"""Render figures from the delimited outputs of the tpsdist pipelines.

This package never computes physics. It reads the documented CSV schemas,
applies at most an axis transform, and writes image files. Anything missing
or misnamed in the inputs fails loudly with the offending column names.
"""

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "tpsdist-figures"

import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("timeseries", "clustering", "scaling")

TIMESERIES_COLUMNS = ("t", "phi", "ep")
CLUSTERING_COLUMNS = ("regime", "m", "phi_bar", "phi_stderr", "haar_ref",
                      "converged")
SCALING_COLUMNS = ("family", "n_sites", "dim", "phi_bar", "phi_stderr",
                   "typical", "deviation", "converged", "realizations")


class SchemaError(ValueError):
    """An input CSV does not carry the columns a figure kind requires."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: input CSVs, figure kind, output image path."""

    inputs: tuple
    kind: str
    output: Path

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}, "
                             f"expected one of {KINDS}")
        object.__setattr__(self, "inputs",
                           tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "output", Path(self.output))


def read_csv(path, required):
    """Rows of ``path`` as string dicts, after checking the named columns."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path.name} is missing required columns: "
                f"{', '.join(missing)} (found: {', '.join(header)})")
        return list(reader)


def _column(rows, name, cast=float):
    return [cast(row[name]) for row in rows]


def render_timeseries(inputs, output):
    """Two stacked panels, one per input CSV, phi and e_p against time."""
    fig, axes = plt.subplots(len(inputs), 1, figsize=(6.4, 3.0 * len(inputs)),
                             sharex=True, squeeze=False)
    for ax, path in zip(axes[:, 0], inputs):
        rows = read_csv(path, TIMESERIES_COLUMNS)
        t = _column(rows, "t")
        ax.plot(t, _column(rows, "phi"), label=r"$\Phi$", lw=1.4)
        ax.plot(t, _column(rows, "ep"), label=r"$e_p$", lw=1.0, ls="--")
        ax.set_ylabel(r"$\Phi$, $e_p$")
        ax.set_title(Path(path).stem, fontsize=10)
        ax.legend(frameon=False, fontsize=9)
    axes[-1, 0].set_xlabel(r"$t$")
    fig.tight_layout()
    fig.savefig(output, metadata={"Date": None})
    plt.close(fig)


def render_clustering(inputs, output):
    """Long-time average vs cluster count, with Haar reference segments."""
    rows = []
    for path in inputs:
        rows.extend(read_csv(path, CLUSTERING_COLUMNS))
    regimes = sorted({row["regime"] for row in rows})
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for regime in regimes:
        sub = sorted((r for r in rows if r["regime"] == regime),
                     key=lambda r: int(r["m"]))
        ms = [int(r["m"]) for r in sub]
        ax.errorbar(ms, [float(r["phi_bar"]) for r in sub],
                    yerr=[float(r["phi_stderr"]) for r in sub],
                    marker="o", capsize=3, label=regime)
    refs = sorted({(int(r["m"]), float(r["haar_ref"])) for r in rows})
    for i, (m, ref) in enumerate(refs):
        ax.hlines(ref, m - 0.35, m + 0.35, colors="gray", ls=":",
                  label="Haar typical" if i == 0 else None)
    ax.set_xlabel("clusters $M$")
    ax.set_ylabel(r"$\overline{\Phi}$")
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(output, metadata={"Date": None})
    plt.close(fig)


def render_scaling(inputs, output):
    """Deviation from the Haar typical value against dimension, log-log."""
    rows = []
    for path in inputs:
        rows.extend(read_csv(path, SCALING_COLUMNS))
    families = sorted({row["family"] for row in rows})
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for family in families:
        sub = sorted((r for r in rows if r["family"] == family),
                     key=lambda r: int(r["dim"]))
        ax.plot([int(r["dim"]) for r in sub],
                [float(r["deviation"]) for r in sub],
                marker="o", label=family)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("Hilbert space dimension $d$")
    ax.set_ylabel(r"$|\overline{\Phi} - \Phi_{\mathrm{typ}}|$")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(output, metadata={"Date": None})
    plt.close(fig)


_RENDERERS = {
    "timeseries": render_timeseries,
    "clustering": render_clustering,
    "scaling": render_scaling,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure and return the written image path."""
    if not spec.inputs:
        raise ValueError("need at least one input CSV")
    for path in spec.inputs:
        if not path.exists():
            raise FileNotFoundError(f"input CSV not found: {path}")
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    _RENDERERS[spec.kind](spec.inputs, spec.output)
    return spec.output


def discover_specs(indir, outdir, fmt="png"):
    """Match the standard pipeline filenames in ``indir`` to figure specs."""
    indir, outdir = Path(indir), Path(outdir)
    specs = []
    fig1 = sorted(indir.glob("fig1_*.csv"))
    if fig1:
        specs.append(FigureSpec(tuple(fig1), "timeseries",
                                outdir / f"fig1_timeseries.{fmt}"))
    fig2 = sorted(indir.glob("fig2_m*.csv"))
    if fig2:
        specs.append(FigureSpec(tuple(fig2), "clustering",
                                outdir / f"fig2_clustering.{fmt}"))
    fig3 = indir / "fig3_scaling.csv"
    if fig3.exists():
        specs.append(FigureSpec((fig3,), "scaling",
                                outdir / f"fig3_scaling.{fmt}"))
    return specs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tpsdist-figures",
        description="Render the standard figures from tpsdist CSV outputs")
    parser.add_argument("--indir", default="out",
                        help="directory holding the pipeline CSVs")
    parser.add_argument("--outdir", default=None,
                        help="where to write images (default: next to inputs)")
    parser.add_argument("--format", choices=("png", "svg"), default="png")
    ns = parser.parse_args(argv)
    outdir = ns.outdir if ns.outdir is not None else ns.indir
    specs = discover_specs(ns.indir, outdir, ns.format)
    if not specs:
        print(f"no pipeline CSVs found in {ns.indir}", file=sys.stderr)
        return 1
    try:
        for spec in specs:
            path = render(spec)
            print(f"wrote {path}")
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
