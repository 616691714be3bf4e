"""Command-line front end.

Subcommands write seeded, deterministic datasets (CSV with ``#`` metadata
lines, or JSON) and analyse single states read from JSON files.

Exit codes: 0 success, 2 parse error, 3 dimension mismatch, 4 I/O error,
5 infeasible or out-of-range parameters.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import __version__, backend
from .arrowhead import mismatch_direct
from .bounds import bound_report, commutator_lower_bound, commutator_metrics, commutator_upper_bound, delta_upper_bound
from .circuits import ANGLE_MODES, CHANNELS, sweep_sigma2
from .distillation import (
    copies_needed,
    eigenstate_observable,
    observable_error,
    random_normalized_observable,
)
from .errors import CohMismatchError, DegenerateDominantEigenvalue, DimensionMismatch, NoDecomposition
from .linalg_core import householder_complement
from .rng import make_rng
from .states import DensityMatrix, PureState, haar_random_pure, mix, optimal_eta, random_density

EXIT_OK, EXIT_PARSE, EXIT_DIM, EXIT_IO, EXIT_INFEASIBLE = 0, 2, 3, 4, 5


class ParseError(CohMismatchError, ValueError):
    pass


# ---------------------------------------------------------------- formats


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _pairs(values) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.shape[-1] != 2:
        raise ParseError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def read_density(path: str) -> DensityMatrix:
    doc = _load_json(path)
    try:
        d = int(doc["dim"])
        m = _pairs(doc["entries"]).reshape(d, d)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CohMismatchError):
            raise
        raise ParseError(f"{path}: expected {{dim, entries}} with d*d [re, im] pairs") from exc
    return DensityMatrix(m)


def read_pure(path: str) -> PureState:
    doc = _load_json(path)
    try:
        d = int(doc["dim"])
        v = _pairs(doc["amplitudes"]).reshape(d)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CohMismatchError):
            raise
        raise ParseError(f"{path}: expected {{dim, amplitudes}} with d [re, im] pairs") from exc
    return PureState.from_vector(v)


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def density_to_json(rho) -> dict:
    m = np.asarray(getattr(rho, "matrix", rho))
    return {"dim": int(m.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in m.ravel()]}


def pure_to_json(psi) -> dict:
    v = np.asarray(getattr(psi, "amplitudes", psi))
    return {"dim": int(v.shape[0]), "amplitudes": [[float(z.real), float(z.imag)] for z in v]}


def write_table(out: str | None, fmt_name: str, meta: dict, columns: Sequence[str], rows: list[Sequence]) -> None:
    buf = io.StringIO()
    if fmt_name == "json":
        doc = {"metadata": meta, "columns": list(columns), "rows": [[_json_num(v) for v in r] for r in rows]}
        buf.write(json.dumps(doc, sort_keys=True))
        buf.write("\n")
    else:
        for k in sorted(meta):
            buf.write(f"# {k}: {json.dumps(meta[k], sort_keys=True)}\n")
        buf.write(",".join(columns) + "\n")
        for r in rows:
            buf.write(",".join(fmt(v) for v in r) + "\n")
    if out is None or out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


def _json_num(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    f = float(v)
    return f if math.isfinite(f) else None


# ---------------------------------------------------------------- arg types


def int_range(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}") from exc
    if a < 2 or b < a:
        raise argparse.ArgumentTypeError(f"need 2 <= MIN <= MAX, got {text!r}")
    return a, b


def grid(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(":")
        out = (float(a), float(b), int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected START:STOP:STEPS, got {text!r}") from exc
    if out[2] < 1:
        raise argparse.ArgumentTypeError("STEPS must be positive")
    return out


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def make_grid(spec: tuple[float, float, int], scale: str) -> list[float]:
    a, b, n = spec
    if scale == "log":
        if a <= 0 or b <= 0:
            raise ValueError("log grid needs positive bounds")
        return [float(x) for x in np.geomspace(a, b, n)]
    return [float(x) for x in np.linspace(a, b, n)]


# ---------------------------------------------------------------- helpers


def _draw_dim(rng: np.random.Generator, lo: int, hi: int) -> int:
    return int(rng.integers(lo, hi + 1))


def _draw_eta(rng: np.random.Generator, law: str) -> float:
    if law == "log_uniform":
        return float(10.0 ** rng.uniform(-4.0, 0.0))
    if law == "uniform":
        return float(rng.uniform(1e-12, 1.0))
    if law == "uniform_half":
        return float(rng.uniform(0.5, 1.0))
    raise ValueError(f"unknown eta law {law!r}")


def _map(fn: Callable[[int], list], n: int, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, range(n)))
    return [fn(i) for i in range(n)]


def _base_meta(args, command: str) -> dict:
    return {
        "command": command,
        "seed": int(args.seed),
        "rng": "numpy Philox, SeedSequence(seed, spawn_key=(sample_id,))",
        "version": __version__,
        "kernel_backend": backend.NAME,
    }


def noisy_sample(seed: int, i: int, dims: tuple[int, int], law: str) -> tuple[int, float, DensityMatrix, PureState]:
    """Sample ``i``: ``eta psi_id + (1-eta) random error state`` with a uniform integer dimension."""
    rng = make_rng(seed, i)
    d = _draw_dim(rng, *dims)
    eta = _draw_eta(rng, law)
    psi = haar_random_pure(d, rng)
    err = random_density(d, rng)
    return d, eta, mix(eta, psi, err), psi


# ---------------------------------------------------------------- commands


def cmd_analyze(args) -> int:
    rho = read_density(args.state)
    psi = read_pure(args.psi)
    if rho.dim != psi.dim:
        raise DimensionMismatch(f"state dim {rho.dim} differs from psi_id dim {psi.dim}")
    rep = bound_report(rho, psi)
    met = rep.metrics
    out = {
        "dim": rho.dim,
        "c": rep.c,
        "delta": rep.delta,
        "eta": rep.eta,
        "mu1": rep.mu1,
        "delta_bound": rep.delta_bound,
        "Delta_bound": rep.Delta_bound,
        "lower_bound": rep.lower_bound,
        "sigma": met.sigma,
        "sigma_r": met.sigma_r,
        "Q": met.Q,
        "Q_min": met.Q_min,
        "Delta": met.Delta,
        "Delta_min": met.Delta_min,
        "eigenvalue": met.eigenvalue,
        "eigenvalue2": met.eigenvalue2,
        "weyl_lambda_range": rep.weyl_lambda_range,
        "weyl_lambda2_range": rep.weyl_lambda2_range,
        "ratio_estimate": rep.ratio_estimate,
        "noise_floor": math.sqrt(rep.c),
        "copies_general": None,
        "copies_eigenstate": None,
        "notes": [],
    }
    if rep.delta is None:
        out["notes"].append("no ideal-state weight can be split off; delta undefined")
    elif rep.delta > 1:
        out["notes"].append("delta > 1: weight-ratio bound is vacuous")
    if rep.eta is not None and rep.mu1 is not None:
        for key, target in (("copies_general", "general_sqrt"), ("copies_eigenstate", "eigenstate_quadratic")):
            try:
                out[key] = copies_needed(rep.eta, rep.mu1, target)
            except CohMismatchError:
                pass
        if out["copies_general"] is None:
            out["notes"].append("copy estimates need 0 < (1/eta - 1) mu1 < 1")
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fig_trdist(args) -> int:
    lo, hi = args.dims

    def one(i: int) -> list:
        rng = make_rng(args.seed, i)
        d = _draw_dim(rng, lo, hi)
        a = haar_random_pure(d, rng)
        c = float(10.0 ** rng.uniform(args.log_c_min, 0.0))
        w = householder_complement(a.amplitudes)[:, 1:]
        phi = haar_random_pure(d - 1, rng).amplitudes if d > 2 else np.ones(1, dtype=complex)
        b = PureState.from_vector(math.sqrt(1.0 - c) * a.amplitudes + math.sqrt(c) * (w @ phi))
        c = 1.0 - abs(a.overlap(b)) ** 2
        o = random_normalized_observable(d, rng)
        oe = eigenstate_observable(a, rng)
        return [i, d, c, math.sqrt(c), observable_error(a, b, o), observable_error(a, b, oe), 2 * math.sqrt(c), 2 * c]

    rows = _map(one, args.samples, args.workers)
    meta = _base_meta(args, "fig-trdist")
    meta.update(
        samples=args.samples,
        dims=list(args.dims),
        dim_law="uniform_int",
        c_law=f"log_uniform[1e{args.log_c_min:g}, 1]",
        observable="Gaussian Hermitian, unit spectral norm; eigenstate variant has psi_id as eigenvector",
    )
    cols = ["sample_id", "dim", "c", "sqrt_c", "obs_error_general", "obs_error_eigenstate", "bound_general", "bound_eigenstate"]
    write_table(args.out, args.format, meta, cols, rows)
    return EXIT_OK


def eigvals_row(seed: int, i: int, dim_class: str, dims: tuple[int, int], law: str) -> list:
    d, _, rho, psi = noisy_sample(seed, i, dims, law)
    try:
        dec = optimal_eta(rho, psi)
        eta, delta = dec.eta, dec.delta
    except NoDecomposition:
        eta, delta = float("nan"), float("nan")
    try:
        c = mismatch_direct(rho, psi).c
    except DegenerateDominantEigenvalue:
        c = float("nan")
    bound = delta_upper_bound(delta) if delta <= 1.0 else 1.0
    return [i, dim_class, d, eta, delta, c, bound]


def cmd_fig_eigvals(args) -> int:
    n_large = args.large_samples
    n_small = args.samples - n_large
    if n_small < 0:
        raise ValueError("--large-samples exceeds --samples")

    def one(i: int) -> list:
        if i < n_small:
            return eigvals_row(args.seed, i, "small", args.dims, args.eta_law)
        return eigvals_row(args.seed, i, "large", args.dims_large, args.eta_law)

    rows = _map(one, args.samples, args.workers)
    meta = _base_meta(args, "fig-eigvals")
    meta.update(
        samples=args.samples,
        large_samples=n_large,
        dims_small=list(args.dims),
        dims_large=list(args.dims_large),
        dim_law="uniform_int",
        eta_law=args.eta_law,
        delta_bound_note="1 (vacuous) when delta > 1",
    )
    write_table(args.out, args.format, meta, ["sample_id", "dim_class", "dim", "eta", "delta", "c", "delta_bound"], rows)
    return EXIT_OK


def commutators_row(seed: int, i: int, dims: tuple[int, int], law: str) -> list:
    d, _, rho, psi = noisy_sample(seed, i, dims, law)
    try:
        met = commutator_metrics(rho, psi)
        c = mismatch_direct(rho, psi).c
    except DegenerateDominantEigenvalue:
        nan = float("nan")
        return [i, d, nan, nan, nan, nan, nan]
    return [i, d, met.Delta, met.Delta_min, c, commutator_upper_bound(met), commutator_lower_bound(met)]


def cmd_fig_commutators(args) -> int:
    rows = _map(lambda i: commutators_row(args.seed, i, args.dims, args.eta_law), args.samples, args.workers)
    meta = _base_meta(args, "fig-commutators")
    meta.update(samples=args.samples, dims=list(args.dims), dim_law="uniform_int", eta_law=args.eta_law)
    write_table(args.out, args.format, meta, ["sample_id", "dim", "Delta", "Delta_min", "c", "upper", "lower"], rows)
    return EXIT_OK


def _noisemodel_config(args) -> dict:
    cfg = {
        "qubits": args.qubits,
        "gates": args.nu,
        "angle_mode": args.angles,
        "entangler": args.entangler,
        "channel": args.channel,
        "samples": args.samples,
        "seed": args.seed,
        "xi_grid": make_grid(args.xi_grid, args.xi_scale),
    }
    if args.config:
        doc = _load_json(args.config)
        if not isinstance(doc, dict):
            raise ParseError("ensemble config must be a JSON object")
        unknown = set(doc) - {"qubits", "gates", "angle_mode", "entangler", "channel", "epsilon_grid", "xi_grid", "samples", "seed"}
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        cfg.update({k: v for k, v in doc.items() if k != "epsilon_grid"})
        if isinstance(cfg["qubits"], int):
            cfg["qubits"] = [cfg["qubits"]]
        if "epsilon_grid" in doc:
            cfg["xi_grid"] = [float(e) * int(cfg["gates"]) for e in doc["epsilon_grid"]]
    if cfg["channel"] not in CHANNELS or cfg["angle_mode"] not in ANGLE_MODES:
        raise ParseError("unknown channel or angle mode in config")
    return cfg


def cmd_fig_noisemodel(args) -> int:
    cfg = _noisemodel_config(args)
    rows = []
    nu = int(cfg["gates"])
    for n in cfg["qubits"]:
        res = sweep_sigma2(
            int(n), nu, cfg["channel"], cfg["xi_grid"], int(cfg["samples"]), int(cfg["seed"]),
            cfg["angle_mode"], cfg["entangler"], workers=args.workers,
        )
        for r in res:
            rows.append([r.qubits, cfg["channel"], cfg["angle_mode"], r.xi, r.epsilon, r.sample_id, r.sigma2, r.f_exact, r.f_approx, r.xi**2 / 4])
    meta = _base_meta(args, "fig-noisemodel")
    meta["seed"] = int(cfg["seed"])
    meta.update(
        config=cfg,
        bound_const=args.bound_const,
        bound_const_note="empirical scale for the f(xi) envelope from our own ensemble calibration",
        noise_placement="after each gate on its targets; dephasing Z or ZZ; depolarising eps (1q) or eps/2 per target (2q); damping gamma=eps per target",
        circuit_stream="circuit i drawn from SeedSequence(seed, spawn_key=(qubits, i)), reused across the xi grid",
    )
    cols = ["qubits", "channel", "angle_mode", "xi", "epsilon", "sample_id", "sigma2", "f_exact", "f_approx", "worst_case"]
    write_table(args.out, args.format, meta, cols, rows)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cohmismatch", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, samples: int):
        sp.add_argument("--seed", type=int, default=0, help="64-bit base seed")
        sp.add_argument("--samples", type=int, default=samples)
        sp.add_argument("--out", default=None, help="output path (stdout when omitted)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--workers", type=int, default=1, help="worker threads; output order is fixed")

    a = sub.add_parser("analyze", help="mismatch and every bound for one state")
    a.add_argument("state", help="JSON density matrix {dim, entries}")
    a.add_argument("psi", help="JSON ideal state {dim, amplitudes}")
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("fig-trdist", help="observable errors against 2 sqrt(c) and 2c")
    common(t, 10_000)
    t.add_argument("--dims", type=int_range, default=(2, 64))
    t.add_argument("--log-c-min", type=float, default=-6.0, help="c drawn log-uniform on [10^x, 1]")
    t.set_defaults(func=cmd_fig_trdist)

    e = sub.add_parser("fig-eigvals", help="mismatch against the weight ratio delta")
    common(e, 50_000)
    e.add_argument("--dims", type=int_range, default=(2, 8), help="small dimension class")
    e.add_argument("--dims-large", type=int_range, default=(2, 1024))
    e.add_argument("--large-samples", type=int, default=500, help="how many of --samples use the large class")
    e.add_argument("--eta-law", choices=("log_uniform", "uniform"), default="log_uniform")
    e.set_defaults(func=cmd_fig_eigvals)

    c = sub.add_parser("fig-commutators", help="mismatch against the commutator bounds")
    common(c, 50_000)
    c.add_argument("--dims", type=int_range, default=(2, 64))
    c.add_argument("--eta-law", choices=("uniform_half", "uniform", "log_uniform"), default="uniform_half")
    c.set_defaults(func=cmd_fig_commutators)

    n = sub.add_parser("fig-noisemodel", help="sigma^2 of random noisy circuits over an xi grid")
    common(n, 500)
    n.add_argument("--qubits", type=int_list, default=[2, 4, 6])
    n.add_argument("--nu", type=int, default=200)
    n.add_argument("--channel", choices=CHANNELS, default="depolarising")
    n.add_argument("--angles", choices=ANGLE_MODES, default="haar_uniform")
    n.add_argument("--entangler", choices=("cnot", "xx"), default="cnot")
    n.add_argument("--xi-grid", type=grid, default=(0.1, 5.0, 15))
    n.add_argument("--xi-scale", choices=("lin", "log"), default="lin")
    n.add_argument("--bound-const", type=float, default=10.0)
    n.add_argument("--config", default=None, help="JSON ensemble config overriding the flags")
    n.set_defaults(func=cmd_fig_noisemodel)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionMismatch as exc:
        print(f"dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIM
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CohMismatchError, ValueError) as exc:
        print(f"infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
