"""Time evolution of the tensor-product-structure distance.

Series of Phi(t) under e^{-iHt}, finite-window long-time averages with a
half-window convergence diagnostic, an exact resonance-sum oracle for the
infinite-time average at small dimension, and the three experiment
pipelines that produce the shipped data files.

Output contract: every time-series record writes one CSV with header
``t,phi[,ep,...]`` plus a JSON sidecar carrying the fully resolved
configuration, seeds, library version, and wall-clock time.  CSV bytes are
a pure function of the configuration; timestamps live only in the sidecar.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .config import TOL
from .geometry import phi_correlator
from .linalg import NumericError, SizeError, herm_eig, propagator_matrix
from .models import (BuiltModel, ModelConfig, build_model, build_tfim,
                     disorder_repetitions, tfim_regime_couplings)
from .randomness import SeededGenerator, typical_phi, typical_phi_clustered
from .scrambling import entangling_power, phi_bipartite
from .structure import AlgebraSet, full_tps


def _emit_phi(value: float) -> float:
    """Range-check an outgoing Phi value, absorbing tiny negative rounding."""
    if value < -1e-9 or value > 1.0 + 1e-9:
        raise NumericError(f"phi out of range: {value!r}")
    return max(float(value), 0.0)


def _model_echo(model: BuiltModel) -> dict:
    echo = {
        "family": model.family,
        "label": model.label,
        "n_sites": model.n_sites,
        "dims": list(model.fact.dims),
        "couplings": model.couplings,
    }
    if model.leakage is not None:
        echo["leakage"] = model.leakage
    return echo


@dataclass(frozen=True)
class ExperimentRecord:
    """One reproducible run: resolved config, grid, named columns, aggregates.

    ``config`` must contain everything needed to regenerate the columns
    bit-for-bit (model couplings, algebra choice, grid, seeds).
    """

    config: dict
    times: tuple[float, ...]
    series: dict[str, tuple[float, ...]]
    aggregates: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, column in self.series.items():
            if len(column) != len(self.times):
                raise ValueError(
                    f"column {name!r} has {len(column)} entries for {len(self.times)} times")


@dataclass(frozen=True)
class LongTimeAverage:
    """Finite-window estimate of the infinite-time average of Phi.

    ``converged`` records whether the two half-window means agree within
    the configured tolerance; a False flag is a diagnostic, not an error.
    """

    value: float
    stderr: float
    converged: bool
    window: tuple[float, float]
    n_samples: int


def default_time_grid() -> list[float]:
    """Explicit default grid: 0, geometric ramp through [1e-3, 1), then
    linear coverage of [1, 100]."""
    head = np.geomspace(1e-3, 1.0, 40, endpoint=False)
    tail = np.linspace(1.0, 100.0, 61)
    return [0.0] + [float(t) for t in head] + [float(t) for t in tail]


def _eval_indexed(worker, n_items: int, threads: int | None) -> list:
    """Run worker(i) for i in range(n_items) with deterministic assembly."""
    out = [None] * n_items
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, res in zip(range(n_items), pool.map(worker, range(n_items))):
                out[i] = res
    else:
        for i in range(n_items):
            out[i] = worker(i)
    return out


def _phi_values(model: BuiltModel, algebras: AlgebraSet, times,
                threads: int | None = None) -> np.ndarray:
    es = herm_eig(model.hamiltonian)

    def worker(i: int) -> float:
        u = propagator_matrix(es, times[i])
        return _emit_phi(phi_correlator(algebras, u).value)

    return np.array(_eval_indexed(worker, len(times), threads))


def phi_time_series(model: BuiltModel, algebras: AlgebraSet, times,
                    threads: int | None = None) -> ExperimentRecord:
    """Phi(t) for U_t = e^{+iHt} on an explicit grid.

    One eigendecomposition total; each grid point builds its propagator from
    the stored spectrum, so the cost is one diagonalization plus one
    correlator evaluation per time.
    """
    ts = [float(t) for t in times]
    if not ts:
        raise ValueError("need at least one time")
    if not all(np.isfinite(t) and t >= 0.0 for t in ts):
        raise ValueError("times must be finite and nonnegative")
    values = _phi_values(model, algebras, ts, threads)
    config = {
        "kind": "phi_time_series",
        "model": _model_echo(model),
        "algebras": algebras.label(),
        "times": ts,
    }
    return ExperimentRecord(config, tuple(ts), {"phi": tuple(float(v) for v in values)})


def window_average(values) -> tuple[float, float, bool]:
    """Mean, standard error, and half-window agreement of a sampled series."""
    vals = np.asarray(values, dtype=float)
    n = vals.size
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    half = n // 2
    converged = bool(abs(vals[:half].mean() - vals[half:].mean()) < TOL.convergence_tol)
    return mean, stderr, converged


def long_time_average(model: BuiltModel, algebras: AlgebraSet,
                      window: tuple[float, float] = (50.0, 500.0),
                      n_samples: int = 128,
                      threads: int | None = None) -> LongTimeAverage:
    """Average Phi over a uniform grid on [T0, T1].

    The two half-window means must agree within the configured tolerance
    for the ``converged`` flag to be set; disagreement flags a window that
    is too early or too short but never raises.
    """
    t0, t1 = float(window[0]), float(window[1])
    if not (t1 > t0 >= 0.0):
        raise ValueError(f"window must satisfy T1 > T0 >= 0, got {window}")
    if n_samples < 16:
        raise ValueError("need at least 16 window samples")
    times = [float(t) for t in np.linspace(t0, t1, n_samples)]
    values = _phi_values(model, algebras, times, threads)
    mean, stderr, converged = window_average(values)
    return LongTimeAverage(mean, stderr, converged, (t0, t1), int(n_samples))


def resonance_average(model: BuiltModel, algebras: AlgebraSet) -> float:
    """Exact infinite-time average of Phi from the resonance structure.

    Writing U_t in the energy eigenbasis, each correlator matrix entry is a
    sum of e^{i(E_m - E_n)t} terms; the time average of its square modulus
    keeps only pairs whose energy gaps coincide.  Gaps are grouped with a
    small tolerance, and each resonance class contributes the squared
    Frobenius norm of a Gram matrix built from the basis elements rotated
    into the eigenbasis.  Dense in d^2 pairs, so capped at small dimension
    where it serves as the oracle for the windowed estimator.
    """
    d = model.dim
    if d > TOL.resonance_oracle_max_dim:
        raise SizeError(
            f"resonance sum needs d <= {TOL.resonance_oracle_max_dim}, got {d}")
    if algebras.d != d:
        raise ValueError("algebra dimension does not match the model")
    es = herm_eig(model.hamiltonian)
    v = es.eigenvectors
    basis = algebras.w_basis()
    rotated = np.stack([v.conj().T @ b @ v for b in basis])
    k = rotated.shape[0]

    gaps = (es.eigenvalues[:, None] - es.eigenvalues[None, :]).ravel()
    order = np.argsort(gaps, kind="stable")
    sorted_gaps = gaps[order]
    # class boundaries wherever consecutive sorted gaps separate
    breaks = np.flatnonzero(np.diff(sorted_gaps) > TOL.gap_group_tol) + 1
    flat = rotated.reshape(k, d * d)[:, order]
    total = 0.0
    for chunk in np.split(np.arange(d * d), breaks):
        vals = flat[:, chunk]
        if vals.shape[1] >= k:
            gram = vals @ vals.conj().T
        else:
            gram = vals.conj().T @ vals
        total += float(np.sum(np.abs(gram) ** 2))
    return _emit_phi(1.0 - total / algebras.dim_w_traceless)


def _fmt_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_sidecar(path: Path, config: dict, aggregates: dict,
                   wall_clock: float | None) -> None:
    from . import __version__
    meta = {
        "config": config,
        "aggregates": aggregates,
        "version": __version__,
        "written_at": datetime.now(timezone.utc).isoformat(),
    }
    if wall_clock is not None:
        meta["wall_clock_s"] = round(float(wall_clock), 3)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def write_record(record: ExperimentRecord, outdir, name: str,
                 wall_clock: float | None = None) -> Path:
    """Write a time-series record as ``name.csv`` plus a ``name.json`` sidecar.

    CSV header is ``t`` followed by the series names; floats are written
    with repr so the bytes round-trip exactly.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    columns = list(record.series)
    lines = ["t," + ",".join(columns)]
    for i, t in enumerate(record.times):
        row = [repr(float(t))] + [repr(float(record.series[c][i])) for c in columns]
        lines.append(",".join(row))
    csv_path = outdir / f"{name}.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    _write_sidecar(outdir / f"{name}.json", record.config, record.aggregates, wall_clock)
    return csv_path


def write_table(rows: list[dict], columns: list[str], outdir, name: str,
                config: dict, wall_clock: float | None = None) -> Path:
    """Write aggregate rows (one dict per row) as CSV plus a JSON sidecar."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt_cell(row[c]) for c in columns))
    csv_path = outdir / f"{name}.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    _write_sidecar(outdir / f"{name}.json", config, {}, wall_clock)
    return csv_path


def fig1_pipeline(n_sites: int = 8, n1: int = 2, grid=None, outdir=None,
                  threads: int | None = None) -> dict[str, ExperimentRecord]:
    """Phi and entangling power on one trajectory, asymmetric bipartition.

    Evolves the integrable and nonintegrable Ising chains and evaluates, at
    every grid point, both the bipartite TPS distance (first n1 qubits
    against the rest) and the entangling power of the same propagator.  The
    two series are distinct quantities that track each other closely; the
    Pearson correlation over the grid lands in the aggregates.
    """
    if not (0 < n1 < n_sites):
        raise ValueError("bipartition must leave qubits on both sides")
    ts = [float(t) for t in (grid if grid is not None else default_time_grid())]
    d1, d2 = 2 ** n1, 2 ** (n_sites - n1)
    records: dict[str, ExperimentRecord] = {}
    for regime in ("integrable", "nonintegrable"):
        started = time.perf_counter()
        coup = tfim_regime_couplings(regime, n_sites)
        model = build_tfim(n_sites, coup["h"], coup["g"])
        es = herm_eig(model.hamiltonian)

        def worker(i: int) -> tuple[float, float]:
            u = propagator_matrix(es, ts[i])
            return (_emit_phi(phi_bipartite(u, d1, d2)),
                    _emit_phi(entangling_power(u, d1, d2)))

        pairs = _eval_indexed(worker, len(ts), threads)
        phi = tuple(p for p, _ in pairs)
        ep = tuple(e for _, e in pairs)
        r = float(np.corrcoef(phi, ep)[0, 1])
        gap = float(np.max(np.abs(np.array(phi) - np.array(ep))))
        config = {
            "kind": "fig1_pipeline",
            "model": _model_echo(model),
            "regime": regime,
            "bipartition": [d1, d2],
            "times": ts,
        }
        record = ExperimentRecord(config, tuple(ts), {"phi": phi, "ep": ep},
                                  {"pearson_r": r, "max_abs_gap": gap})
        records[regime] = record
        if outdir is not None:
            write_record(record, outdir, f"fig1_{regime}",
                         wall_clock=time.perf_counter() - started)
    return records


def fig2_pipeline(n_sites: int = 8, clusters=(1, 2, 4, 8),
                  window: tuple[float, float] = (50.0, 500.0),
                  n_samples: int = 128, outdir=None,
                  threads: int | None = None) -> list[dict]:
    """Long-time average against cluster count for both Ising regimes.

    For each M in ``clusters`` the N qubits are grouped into M equal
    clusters and the windowed average of Phi is compared with the Haar
    typical value for that clustering.  Every M must divide N.
    """
    for m in clusters:
        if n_sites % int(m):
            raise ValueError(f"cluster count {m} does not divide {n_sites} sites")
    started = time.perf_counter()
    d = 2 ** n_sites
    rows = []
    for regime in ("integrable", "nonintegrable"):
        coup = tfim_regime_couplings(regime, n_sites)
        model = build_tfim(n_sites, coup["h"], coup["g"])
        for m in clusters:
            m = int(m)
            cluster_dim = 2 ** (n_sites // m)
            algebras = full_tps([cluster_dim] * m)
            lt = long_time_average(model, algebras, window, n_samples, threads)
            rows.append({
                "regime": regime,
                "m": m,
                "phi_bar": lt.value,
                "phi_stderr": lt.stderr,
                "haar_ref": typical_phi_clustered(d, m),
                "converged": lt.converged,
            })
    if outdir is not None:
        elapsed = time.perf_counter() - started
        columns = ["regime", "m", "phi_bar", "phi_stderr", "haar_ref", "converged"]
        for m in clusters:
            m = int(m)
            config = {
                "kind": "fig2_pipeline",
                "n_sites": n_sites,
                "m": m,
                "window": list(window),
                "n_samples": n_samples,
                "regimes": ["integrable", "nonintegrable"],
            }
            write_table([r for r in rows if r["m"] == m], columns, outdir,
                        f"fig2_m{m}", config, wall_clock=elapsed)
    return rows


FIG3_TFIM_REGIMES = ("nonintegrable", "integrable", "anderson", "mbl")


def fig3_pipeline(tfim_sizes=(4, 6, 8), chain_sizes=(3, 4, 5),
                  window: tuple[float, float] = (50.0, 500.0),
                  n_samples: int = 128, seed: int = 0,
                  disorder_average: bool = False, outdir=None,
                  threads: int | None = None) -> list[dict]:
    """Size scaling of the long-time average against the Haar typical value.

    Runs the four Ising regimes over ``tfim_sizes`` and the qutrit chains
    over ``chain_sizes``, always on the per-site tensor product structure.
    Disordered Ising regimes average over floor(200/N) realizations; the
    qutrit chains use a single seeded draw unless ``disorder_average`` is
    set.  Emits one row per (family, size) with the deviation from typical.
    """
    started = time.perf_counter()
    gen = SeededGenerator(seed)
    stream = 0
    rows = []

    def averaged(configs: list[ModelConfig], algebras: AlgebraSet) -> tuple:
        nonlocal stream
        values, errs, flags = [], [], []
        for cfg in configs:
            rng = gen.stream(stream)
            stream += 1
            model = build_model(cfg, rng)
            lt = long_time_average(model, algebras, window, n_samples, threads)
            values.append(lt.value)
            errs.append(lt.stderr)
            flags.append(lt.converged)
        if len(values) > 1:
            arr = np.array(values)
            return float(arr.mean()), float(arr.std(ddof=1) / np.sqrt(arr.size)), all(flags)
        return values[0], errs[0], flags[0]

    for regime in FIG3_TFIM_REGIMES:
        for n in tfim_sizes:
            n = int(n)
            reps = disorder_repetitions(n) if regime in ("anderson", "mbl") else 1
            configs = [ModelConfig("tfim", n, regime=regime) for _ in range(reps)]
            algebras = full_tps([2] * n)
            phi_bar, stderr, converged = averaged(configs, algebras)
            typ = typical_phi(algebras)
            rows.append({
                "family": f"tfim_{regime}", "n_sites": n, "dim": 2 ** n,
                "phi_bar": phi_bar, "phi_stderr": stderr, "typical": typ,
                "deviation": abs(phi_bar - typ), "converged": converged,
                "realizations": reps,
            })
    for family in ("temperley_lieb", "tjz"):
        for n in chain_sizes:
            n = int(n)
            reps = disorder_repetitions(n) if disorder_average else 1
            configs = [ModelConfig(family, n) for _ in range(reps)]
            algebras = full_tps([3] * n)
            phi_bar, stderr, converged = averaged(configs, algebras)
            typ = typical_phi(algebras)
            rows.append({
                "family": family, "n_sites": n, "dim": 3 ** n,
                "phi_bar": phi_bar, "phi_stderr": stderr, "typical": typ,
                "deviation": abs(phi_bar - typ), "converged": converged,
                "realizations": reps,
            })
    if outdir is not None:
        config = {
            "kind": "fig3_pipeline",
            "tfim_sizes": [int(n) for n in tfim_sizes],
            "chain_sizes": [int(n) for n in chain_sizes],
            "window": list(window),
            "n_samples": n_samples,
            "seed": seed,
            "disorder_average": disorder_average,
        }
        write_table(rows, ["family", "n_sites", "dim", "phi_bar", "phi_stderr",
                           "typical", "deviation", "converged", "realizations"],
                    outdir, "fig3_scaling", config,
                    wall_clock=time.perf_counter() - started)
    return rows
