"""Command-line interface: ``dpmix fit | scan-k | benchmark | simulate``.

Exit codes: 0 success, 2 input/format error, 3 infeasible K, 4 EM divergence.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import formats
from .benchmark import BenchmarkConfig, run_benchmark, write_results
from .em import PROFILES, EmConfig, run_em
from .errors import DivergenceError, FormatError, InfeasibleError, InvalidPartitionError
from .methods import METHOD_NAMES, Method, fit, partitions_for_range
from .metrics import bic
from .model import blocks_to_params
from .simulate import GroupSpec, child_rng, draw_mixture, sample_mixture

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_DIVERGENCE = 0, 2, 3, 4

log = logging.getLogger("dpmix")


def _k_range(text):
    a, _, b = text.partition("..")
    lo, hi = int(a), int(b or a)
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError(f"bad K range {text!r}")
    return list(range(lo, hi + 1))


def _add_em_flags(p):
    p.add_argument("--profile", choices=sorted(PROFILES), default=None,
                   help="constraint defaults (default: simulation for points, spectra for spectra)")
    p.add_argument("--sigma-min", type=float)
    p.add_argument("--alpha-min", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--rel-tol", type=float)


def _add_input_flags(p):
    p.add_argument("input", type=Path)
    p.add_argument("--format", choices=("points-csv", "spectra-tsv"), default="points-csv")
    p.add_argument("--range", dest="mz_range", help="keep spectra rows with LO <= m/z <= HI, as LO..HI")
    p.add_argument("--method", choices=METHOD_NAMES, default="dp-q4")
    p.add_argument("--delta", type=float, default=None, help="Q4 offset in data units")
    p.add_argument("--out", type=Path, default=Path("."))


def _em_config(args) -> EmConfig:
    profile = args.profile or ("spectra" if getattr(args, "format", "") == "spectra-tsv" else "simulation")
    base = PROFILES[profile]
    over = {k: getattr(args, k) for k in ("sigma_min", "alpha_min", "max_iters", "rel_tol")
            if getattr(args, k, None) is not None}
    return EmConfig(**{**base.__dict__, **over})


def _method(args) -> Method:
    if args.method == "dp-q4":
        if args.delta is None:
            raise FormatError("--method dp-q4 needs --delta")
        return Method("dp-q4", args.delta)
    return Method(args.method)


def _load(args):
    """Returns a list of (suffix, sample) pairs."""
    if args.format == "points-csv":
        if args.mz_range:
            raise FormatError("--range applies to spectra-tsv input only")
        return [("", formats.read_points(args.input))]
    samples = formats.read_spectra(args.input, formats.parse_range(args.mz_range))
    if len(samples) == 1:
        return [("", samples[0])]
    return [(f"_{i + 1}", s) for i, s in enumerate(samples)]


def cmd_fit(args) -> int:
    config = _em_config(args)
    method = _method(args)
    args.out.mkdir(parents=True, exist_ok=True)
    for suffix, data in _load(args):
        res = fit(data, args.k, method, config)
        path = args.out / f"{args.input.stem}{suffix}.model"
        formats.write_model(path, res, data, method.label, config)
        print(f"{path}: K={args.k} method={method.label} loglik={res.loglik:.6f} "
              f"iterations={res.iterations} converged={res.converged} clamps={len(res.clamp_events)}")
    return EXIT_OK


def scan_k(data, ks, method, config):
    """Fit each K; returns (table rows, best K, best FitResult)."""
    parts = partitions_for_range(data, ks, method)
    rows, best = [], None
    for k in ks:
        part = parts[k]
        row = dict(K=k, loglik=float("nan"), bic=float("nan"), iterations=0, status="ok")
        try:
            if isinstance(part, Exception):
                raise part
            res = run_em(data, blocks_to_params(data, part, config.sigma_min), config)
            score = bic(res.loglik, k, data.total_weight)
            row.update(loglik=res.loglik, bic=score, iterations=res.iterations)
            if best is None or score < best[0]:
                best = (score, k, res)
        except Exception as exc:  # noqa: BLE001 - failed K is reported and skipped
            row["status"] = f"failed:{type(exc).__name__}"
            log.warning("K=%d failed: %s", k, exc)
        rows.append(row)
    if best is None:
        raise InfeasibleError("no K in the range produced a fit")
    return rows, best[1], best[2]


def cmd_scan_k(args) -> int:
    config = _em_config(args)
    method = _method(args)
    args.out.mkdir(parents=True, exist_ok=True)
    for suffix, data in _load(args):
        rows, k, res = scan_k(data, args.k_range, method, config)
        stem = f"{args.input.stem}{suffix}"
        formats.write_table(args.out / f"{stem}_bic.csv", ("K", "loglik", "bic", "iterations", "status"), rows)
        formats.write_model(args.out / f"{stem}.model", res, data, method.label, config)
        print(f"{stem}: best K={k} by BIC (loglik={res.loglik:.6f})")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    try:
        cfg = BenchmarkConfig.load(args.config)
    except (OSError, ValueError, TypeError) as exc:
        raise FormatError(f"bad benchmark config: {exc}") from None
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    long_rows, summary = run_benchmark(cfg)
    paths = write_results(args.out, long_rows, summary)
    n_fail = sum(r["status"] != "ok" for r in long_rows)
    print(f"{len(long_rows)} fits ({n_fail} failed); wrote {paths[0]} and {paths[1]}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = GroupSpec.group(args.group, args.ov, K=args.k, N=args.n)
    rng = child_rng(args.seed, args.group, 0, 0)
    truth = draw_mixture(spec, rng)
    data = sample_mixture(truth, args.n, rng)
    args.out.mkdir(parents=True, exist_ok=True)
    stem = f"group{args.group}_ov{args.ov:g}_seed{args.seed}"
    formats.write_points(args.out / f"{stem}.csv", data)
    formats.write_params(args.out / f"{stem}_truth.model", truth)
    print(f"wrote {args.out / (stem + '.csv')} ({data.N} points)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dpmix", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a K-component mixture")
    _add_input_flags(p)
    p.add_argument("--k", type=int, required=True)
    _add_em_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scan-k", help="fit a range of K and choose by BIC")
    _add_input_flags(p)
    p.add_argument("--k-range", type=_k_range, required=True, help="A..B")
    _add_em_flags(p)
    p.set_defaults(func=cmd_scan_k)

    p = sub.add_parser("benchmark", help="run the simulation benchmark from a JSON config")
    p.add_argument("config", type=Path)
    p.add_argument("--seed", type=int, help="override master_seed")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", type=Path, default=Path("."))
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("simulate", help="write one simulated dataset and its true parameters")
    p.add_argument("--group", type=int, choices=(1, 2, 3, 4), default=4)
    p.add_argument("--ov", type=float, default=0.2)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("."))
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        print(f"dpmix: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InfeasibleError, InvalidPartitionError) as exc:
        print(f"dpmix: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DivergenceError as exc:
        print(f"dpmix: EM diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except ValueError as exc:
        print(f"dpmix: invalid argument: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
