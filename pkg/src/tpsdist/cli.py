"""Command-line interface.

Three subcommands:

* ``phi``: Phi time series for a model, or Phi of a fixed named unitary.
* ``verify``: internal cross-check suites (independent computational routes
  must agree); exit 0 iff every residual is under its tolerance.
* ``figures``: the fig1/fig2/fig3 experiment pipelines.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric or
size limit error.  Every subcommand accepts ``--seed`` and records it in the
JSON sidecar.  A key=value config file can preload any long option; explicit
flags override file values.  The default output directory comes from the
TPSDIST_OUTDIR environment variable when set.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from .config import OUTPUT_DIR_ENV
from .dynamics import (ExperimentRecord, default_time_grid, fig1_pipeline,
                       fig2_pipeline, fig3_pipeline, phi_time_series,
                       write_record)
from .geometry import (phi_correlator, phi_man, phi_projection,
                       two_unitary_example)
from .linalg import NumericError, SizeError, permutation_operator, swap_pair
from .models import ModelConfig, build_model
from .randomness import SeededGenerator, haar_state, haar_unitary
from .scrambling import (entangling_power, entangling_power_mc,
                         man, man_swap_oracle, operator_entanglement,
                         operator_entanglement_swap_oracle)
from .structure import full_tps

_FAMILY_ALIASES = {"tfim": "tfim", "tl": "temperley_lieb",
                   "temperley_lieb": "temperley_lieb", "tjz": "tjz"}


@dataclass(frozen=True)
class CliConfig:
    """Resolved options for one invocation, echoed verbatim into sidecars."""

    subcommand: str
    options: dict

    def as_dict(self) -> dict:
        return asdict(self)


def _parse_times(text: str) -> list[float]:
    """Either ``start:step:stop`` (inclusive uniform grid) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("grid spec must be start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError("grid spec needs step > 0 and stop >= start")
        n = int(round((stop - start) / step)) + 1
        return [float(t) for t in np.linspace(start, stop, n)]
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_window(text: str) -> tuple[float, float]:
    parts = [float(tok) for tok in text.split(",") if tok.strip()]
    if len(parts) != 2:
        raise ValueError("window must be T0,T1")
    return (parts[0], parts[1])


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {line!r}")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


_FILE_CONVERTERS = {
    "n": int, "seed": int, "threads": int, "samples": int, "q": int,
    "large": lambda s: s.lower() in ("1", "true", "yes"),
    "disorder_average": lambda s: s.lower() in ("1", "true", "yes"),
}


def _resolve_outdir(ns) -> str:
    if ns.outdir is not None:
        return ns.outdir
    return os.environ.get(OUTPUT_DIR_ENV, "out")


def _echo_options(ns, skip=("func", "config")) -> dict:
    return {k: v for k, v in vars(ns).items() if k not in skip}


def cmd_phi(ns) -> int:
    started = time.perf_counter()
    outdir = _resolve_outdir(ns)
    times = _parse_times(ns.times) if ns.times is not None else default_time_grid()
    if ns.unitary is not None:
        if ns.unitary == "swap":
            dims = _parse_ints(ns.dims) if ns.dims else [ns.q, ns.q]
            if len(dims) != 2:
                raise ValueError("swap acts on exactly two factors")
            u = permutation_operator([1, 0], dims)
            name = "phi_swap"
        elif ns.unitary == "two-unitary":
            u = two_unitary_example(ns.q)
            dims = [ns.q, ns.q]
            name = f"phi_two_unitary_q{ns.q}"
        elif ns.unitary == "haar":
            dims = _parse_ints(ns.dims) if ns.dims else [ns.q, ns.q]
            d = int(np.prod(dims))
            u = haar_unitary(d, SeededGenerator(ns.seed).stream(0))
            name = "phi_haar"
        else:
            raise ValueError(f"unknown unitary {ns.unitary!r}")
        algebras = full_tps(dims)
        value = phi_correlator(algebras, u).value
        config = {
            "kind": "phi_unitary",
            "unitary": ns.unitary,
            "dims": dims,
            "seed": ns.seed,
            "cli": CliConfig("phi", _echo_options(ns)).as_dict(),
        }
        record = ExperimentRecord(config, (0.0,), {"phi": (float(value),)})
        path = write_record(record, outdir, name,
                            wall_clock=time.perf_counter() - started)
        print(f"phi = {value!r} ({ns.unitary} on {dims}); wrote {path}")
        return 0

    if ns.model is None:
        raise ValueError("need either --model or --unitary")
    family = _FAMILY_ALIASES.get(ns.model)
    if family is None:
        raise ValueError(f"unknown model {ns.model!r}")
    if family == "tfim" and ns.regime is None:
        raise ValueError("tfim needs --regime")
    mc = ModelConfig(family, ns.n, regime=ns.regime, disorder_seed=ns.seed)
    model = build_model(mc)
    if ns.dims is not None:
        dims = _parse_ints(ns.dims)
        if int(np.prod(dims)) != model.dim:
            raise ValueError(f"dims {dims} do not multiply to model dimension {model.dim}")
    elif ns.clusters is not None:
        n_sites = model.n_sites
        if n_sites % ns.clusters:
            raise ValueError(f"{ns.clusters} clusters do not divide {n_sites} sites")
        q = model.fact.dims[0]
        dims = [q ** (n_sites // ns.clusters)] * ns.clusters
    else:
        dims = list(model.fact.dims)
    algebras = full_tps(dims)
    record = phi_time_series(model, algebras, times, threads=ns.threads)
    record.config["seed"] = ns.seed
    record.config["cli"] = CliConfig("phi", _echo_options(ns)).as_dict()
    path = write_record(record, outdir, f"phi_{model.label}",
                        wall_clock=time.perf_counter() - started)
    print(f"wrote {path} ({len(times)} rows)")
    return 0


def _verify_route_agreement(seed: int) -> tuple[float, float]:
    rng = SeededGenerator(seed).stream(1)
    worst = 0.0
    for dims in ([2, 3], [2, 2, 2]):
        algebras = full_tps(dims)
        d = algebras.d
        for _ in range(5):
            u = haar_unitary(d, rng)
            a = phi_correlator(algebras, u).value
            b = phi_man(algebras, u).value
            c = phi_projection(algebras, u).value
            worst = max(worst, abs(a - b), abs(a - c))
    return worst, 1e-9


def _verify_bridge_identity(seed: int) -> tuple[float, float]:
    rng = SeededGenerator(seed).stream(2)
    worst = 0.0
    for dims in ([2, 2], [2, 3]):
        algebras = full_tps(dims)
        d = algebras.d
        for _ in range(5):
            u = haar_unitary(d, rng)
            for i in range(2):
                for j in range(2):
                    a = man(algebras, u, i, j).value
                    b = man_swap_oracle(algebras, u, i, j)
                    worst = max(worst, abs(a - b))
    return worst, 1e-9


def _verify_swap_identity(seed: int) -> tuple[float, float]:
    rng = SeededGenerator(seed).stream(3)
    worst = 0.0
    for d1, d2 in ((2, 2), (2, 3)):
        for _ in range(5):
            u = haar_unitary(d1 * d2, rng)
            a = operator_entanglement(u, d1, d2)
            b = operator_entanglement_swap_oracle(u, d1, d2)
            worst = max(worst, abs(a - b))
    return worst, 1e-9


def _verify_ep_symmetric(seed: int) -> tuple[float, float]:
    rng = SeededGenerator(seed).stream(4)
    worst = 0.0
    for q in (2, 3):
        algebras = full_tps([q, q])
        for _ in range(5):
            u = haar_unitary(q * q, rng)
            a = entangling_power(u, q, q)
            b = phi_correlator(algebras, u).value
            worst = max(worst, abs(a - b))
    return worst, 1e-9


def _verify_swap_moment(seed: int) -> tuple[float, float]:
    # Monte Carlo check of the pure-state second moment:
    # E |psi><psi| tensor |psi><psi| = (1 + SWAP) / (d (d + 1))
    rng = SeededGenerator(seed).stream(5)
    d, n = 4, 4000
    acc = np.zeros((d * d, d * d), dtype=complex)
    for _ in range(n):
        psi = haar_state(d, rng)
        pair = np.kron(psi, psi)
        acc += np.outer(pair, pair.conj())
    acc /= n
    target = (np.eye(d * d) + swap_pair(0, [d])) / (d * (d + 1))
    return float(np.max(np.abs(acc - target))), 0.02


def _verify_ep_def(seed: int) -> tuple[float, float]:
    # Monte Carlo product-state average of the linear entropy against the
    # closed-form entangling power; pass band is five standard errors.
    rng = SeededGenerator(seed).stream(6)
    u = haar_unitary(4, rng)
    exact = entangling_power(u, 2, 2)
    est, err = entangling_power_mc(u, 2, 2, 2000, rng)
    return abs(est - exact), 5.0 * err


_VERIFY_SUITES = {
    "route-agreement": _verify_route_agreement,
    "bridge-identity": _verify_bridge_identity,
    "swap-identity": _verify_swap_identity,
    "ep-symmetric": _verify_ep_symmetric,
}
_VERIFY_EXTRA = {
    "swap-moment": _verify_swap_moment,
    "ep-def": _verify_ep_def,
}


def cmd_verify(ns) -> int:
    if ns.identity is not None:
        pool = {**_VERIFY_SUITES, **_VERIFY_EXTRA}
        if ns.identity not in pool:
            raise ValueError(
                f"unknown identity {ns.identity!r}; choose from {sorted(pool)}")
        chosen = {ns.identity: pool[ns.identity]}
    else:
        chosen = dict(_VERIFY_SUITES)
    failed = []
    for name, suite in chosen.items():
        residual, tol = suite(ns.seed)
        status = "ok" if residual < tol else "FAIL"
        print(f"{name}: max residual {residual:.3e} (tol {tol:.1e}) {status}")
        if residual >= tol:
            failed.append(name)
    if failed:
        print(f"verification failed: {', '.join(failed)}")
        return 1
    print(f"all identities passed (seed {ns.seed})")
    return 0


def cmd_figures(ns) -> int:
    outdir = _resolve_outdir(ns)
    which = ns.which
    window = _parse_window(ns.window) if ns.window is not None else (50.0, 500.0)
    threads = ns.threads if ns.threads is not None else os.cpu_count()
    written = []
    if which in ("1", "all"):
        n = ns.n if ns.n is not None else (10 if ns.large else 8)
        fig1_pipeline(n_sites=n, n1=2, outdir=outdir, threads=threads)
        written += ["fig1_integrable.csv", "fig1_nonintegrable.csv"]
    if which in ("2", "all"):
        n = ns.n if ns.n is not None else (12 if ns.large else 8)
        clusters = ([1, 2, 3, 4, 6] if ns.large else [1, 2, 4, 8]) \
            if ns.clusters is None else _parse_ints(ns.clusters)
        fig2_pipeline(n_sites=n, clusters=clusters, window=window,
                      n_samples=ns.samples, outdir=outdir, threads=threads)
        written += [f"fig2_m{m}.csv" for m in clusters]
    if which in ("3", "all"):
        tfim_sizes = (4, 6, 8, 10, 11) if ns.large else (4, 6, 8)
        chain_sizes = (3, 4, 5, 6, 7) if ns.large else (3, 4, 5)
        fig3_pipeline(tfim_sizes=tfim_sizes, chain_sizes=chain_sizes,
                      window=window, n_samples=ns.samples, seed=ns.seed,
                      disorder_average=ns.disorder_average, outdir=outdir,
                      threads=threads)
        written.append("fig3_scaling.csv")
    print(f"wrote {len(written)} CSVs to {outdir}: {', '.join(written)}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpsdist",
        description="Tensor-product-structure distance of unitary evolution")
    parser.add_argument("--config", help="key=value file preloading any long option")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_phi = sub.add_parser("phi", help="Phi time series or single-unitary Phi")
    p_phi.add_argument("--model", choices=sorted(_FAMILY_ALIASES),
                       help="model family (tl is short for temperley_lieb)")
    p_phi.add_argument("--n", "--N", dest="n", type=int, default=4, help="number of sites")
    p_phi.add_argument("--regime", choices=("nonintegrable", "integrable",
                                            "anderson", "mbl"))
    p_phi.add_argument("--times", help="start:step:stop grid or comma list")
    p_phi.add_argument("--dims", help="tensor factor dims, e.g. 4,4 (default: per site)")
    p_phi.add_argument("--clusters", type=int, help="group sites into this many clusters")
    p_phi.add_argument("--unitary", choices=("swap", "two-unitary", "haar"),
                       help="evaluate a fixed unitary instead of a model")
    p_phi.add_argument("--q", type=int, default=3, help="local dimension for --unitary")
    p_phi.add_argument("--seed", type=int, default=0)
    p_phi.add_argument("--threads", type=int)
    p_phi.add_argument("--outdir")
    p_phi.set_defaults(func=cmd_phi)

    p_ver = sub.add_parser("verify", help="run internal identity cross-checks")
    p_ver.add_argument("--identity",
                       help="run one identity (adds Monte Carlo checks "
                            "swap-moment and ep-def to the deterministic set)")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=cmd_verify)

    p_fig = sub.add_parser("figures", help="run the experiment pipelines")
    p_fig.add_argument("--which", choices=("1", "2", "3", "all"), default="all")
    p_fig.add_argument("--n", "--N", dest="n", type=int,
                       help="override the chain length for fig1/fig2")
    p_fig.add_argument("--clusters", help="comma list of cluster counts for fig2")
    p_fig.add_argument("--large", action="store_true",
                       help="paper-scale sizes (minutes to hours, documented in README)")
    p_fig.add_argument("--window", help="long-time window T0,T1 (default 50,500)")
    p_fig.add_argument("--samples", type=int, default=128,
                       help="time samples per window average")
    p_fig.add_argument("--disorder-average", action="store_true",
                       help="average qutrit-chain couplings over floor(200/N) draws")
    p_fig.add_argument("--seed", type=int, default=0)
    p_fig.add_argument("--threads", type=int)
    p_fig.add_argument("--outdir")
    p_fig.set_defaults(func=cmd_figures)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()

    # Pre-scan for --config so file values become parser defaults; explicit
    # flags then override them in the real parse.
    prescan = argparse.ArgumentParser(add_help=False)
    prescan.add_argument("--config")
    pre, _ = prescan.parse_known_args(argv)
    if pre.config is not None:
        try:
            raw = _load_config_file(pre.config)
        except OSError as exc:
            parser.error(f"cannot read config file: {exc}")
        converted = {}
        for key, val in raw.items():
            converted[key] = _FILE_CONVERTERS.get(key, str)(val)
        for action in parser._subparsers._group_actions[0].choices.values():
            known = {a.dest for a in action._actions}
            action.set_defaults(**{k: v for k, v in converted.items() if k in known})

    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except (SizeError, NumericError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        parser.error(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
