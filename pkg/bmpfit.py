#!/usr/bin/env python3
"""
MIT License

Copyright (c) 2026 The bmpfit authors

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

"""
bmpfit command line: synth | noise | mask | fit | reconstruct | eval | curve | oracle.

Tensors are read from and written to TLT1 files (2-mode inputs may also be CSV),
models as JSON, traces and curves as CSV. Every random draw derives from --seed.
"""

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Callable

from bench_harness import (
    DEFAULT_MISSING_FRACTIONS,
    DEFAULT_SIGMA,
    DESK_DIMS,
    PAPER_DIMS,
    SYN_PRESETS,
    BenchError,
    SynthSpec,
    add_gaussian_noise,
    generate_ground_truth,
    planted_model,
    rmse,
    rmse_masked,
    run_denoise_curve,
    run_recovery_curve,
    sample_mask,
    write_curve_csv,
)
from boolquad import (
    DEFAULT_MAX_SWEEPS,
    DEFAULT_ROUNDING_TRIALS,
    DEFAULT_SDP_TOL,
    BoolQuadError,
    SdpSolverConfig,
    brute_force,
    dump_quadratic,
    solve,
)
from matching_pursuit import (
    DEFAULT_DUPLICATE_RETRY_BUDGET,
    DEFAULT_RIDGE,
    DEFAULT_STOP_TOL,
    SOLVERS,
    FitConfig,
    FitError,
    ModelFormatError,
    Objective,
    Partition,
    fit,
    fit_meta,
    load_model,
    reconstruct,
    save_model,
    write_trace_csv,
)
from tensor_core import (
    ModeSubset,
    TensorFormatError,
    TensorShapeError,
    read_mask,
    read_tensor,
    write_tensor,
)

logger = logging.getLogger("bmpfit")

CHILD_LOGGERS = ["bmpfit.tensor", "bmpfit.boolquad", "bmpfit.pursuit", "bmpfit.bench"]
THREADS_ENV = "BMPFIT_NUM_THREADS"
DEFAULT_GRID = (2, 4, 6, 8, 10, 12, 14, 16, 18)
DEFAULT_MAX_ATOMS = 18
TRUE_WORDS = {"true", "1", "yes"}
FALSE_WORDS = {"false", "0", "no"}


class InvalidInputError(Exception):
    pass


class OutputWriteError(Exception):
    pass


def _detect_cpu_count() -> int:
    """
    Logical CPUs usable by this process, floored at 1.

    Scheduler affinity first (respects `taskset` and container cpusets), then
    `os.cpu_count()` where `sched_getaffinity` does not exist.
    """
    getaffinity = getattr(os, "sched_getaffinity", None)
    if getaffinity is not None:
        try:
            return max(1, len(getaffinity(0)))
        except OSError:
            pass
    return max(1, os.cpu_count() or 1)


def _resolve_cpu_threads(cli_value: int | None) -> int:
    """
    Worker threads for the per-partition atom search.

    Precedence: `cli_value` > BMPFIT_NUM_THREADS > detected logical cores. An
    invalid environment value is warned about and ignored. Always >= 1.
    """
    if cli_value is not None:
        return max(1, cli_value)
    env_value = (os.environ.get(THREADS_ENV) or "").strip()
    if env_value:
        try:
            parsed = int(env_value)
        except ValueError:
            parsed = 0
        if parsed >= 1:
            return parsed
        logger.warning(
            f"Ignoring invalid {THREADS_ENV}='{env_value}'. "
            "Expected a positive integer; using the detected CPU count."
        )
    return _detect_cpu_count()


def _positive_int(value: str) -> int:
    """argparse type: accept only integers >= 1."""
    try:
        parsed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}")
    if parsed < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {parsed}")
    return parsed


def _non_negative_int(value: str) -> int:
    try:
        parsed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}")
    if parsed < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {parsed}")
    return parsed


def _non_negative_float(value: str) -> float:
    try:
        parsed = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {value!r}")
    if not parsed >= 0.0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return parsed


def _int_list(value: str) -> tuple[int, ...]:
    """argparse type: comma-separated positive integers, e.g. 20,20,5."""
    try:
        parsed = tuple(int(part) for part in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")
    if any(p < 1 for p in parsed):
        raise argparse.ArgumentTypeError(f"entries must be >= 1, got {value!r}")
    return parsed


def _float_list(value: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


def parse_partitions(spec: str, ndim: int) -> Partition:
    """Parse "1;2;3" or "1,2;3": subsets split by ';', 1-based modes within a subset by ','."""
    subsets = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            raise InvalidInputError(f"empty mode subset in partition spec {spec!r}")
        try:
            modes = tuple(int(m) for m in chunk.split(","))
        except ValueError:
            raise InvalidInputError(f"partition spec {spec!r} must list integer modes, got {chunk!r}")
        try:
            subsets.append(ModeSubset(modes))
        except TensorShapeError as e:
            raise InvalidInputError(f"invalid partition spec {spec!r}: {e}") from e
    try:
        partition = Partition(tuple(subsets))
        partition.check(ndim)
    except TensorShapeError as e:
        raise InvalidInputError(f"invalid partition spec {spec!r}: {e}") from e
    return partition


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat key=value file; keys are flag names without dashes, '#' starts a comment."""
    p = Path(path)
    if not p.is_file():
        raise InvalidInputError(f"config file not found: {p}")
    values: dict[str, str] = {}
    for n, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"{p}:{n}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-")] = value
    return values


def _config_defaults(parser: argparse.ArgumentParser, values: dict[str, str]) -> dict[str, object]:
    """Convert config-file entries to parser defaults using each flag's own type."""
    by_key = {}
    for action in parser._actions:
        for option in action.option_strings:
            if option.startswith("--"):
                by_key[option[2:]] = action
    defaults: dict[str, object] = {}
    for key, raw in values.items():
        action = by_key.get(key)
        if action is None or key in ("config", "help"):
            raise InvalidInputError(f"unknown config key {key!r}")
        if action.nargs == 0:
            word = raw.lower()
            if word not in TRUE_WORDS | FALSE_WORDS:
                raise InvalidInputError(f"config key {key!r} expects true/false, got {raw!r}")
            on = word in TRUE_WORDS
            defaults[action.dest] = on if action.const is True else (not on)
            continue
        try:
            converted = action.type(raw) if action.type else raw
        except (argparse.ArgumentTypeError, ValueError) as e:
            raise InvalidInputError(f"config key {key!r}: {e}") from e
        if action.choices is not None and converted not in action.choices:
            raise InvalidInputError(f"config key {key!r} must be one of {list(action.choices)}, got {raw!r}")
        defaults[action.dest] = converted
    return defaults


def _configure_logging(args) -> bool:
    quiet = args.quiet or (not args.verbose and not args.debug)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.handlers.clear()
    logger.addHandler(handler)
    if args.debug:
        log_level = logging.DEBUG
    elif quiet:
        log_level = logging.ERROR
    else:
        log_level = logging.INFO
    logger.setLevel(log_level)
    for name in CHILD_LOGGERS:
        logging.getLogger(name).setLevel(log_level)
    return quiet


def _require(args, dest: str, flag: str):
    value = getattr(args, dest, None)
    if value is None:
        raise InvalidInputError(f"{args.command} requires {flag}")
    return value


def _input_path(args, dest: str, flag: str) -> Path:
    p = Path(_require(args, dest, flag))
    if not p.is_file():
        raise InvalidInputError(f"{flag} file not found: {p}")
    return p


def _write(writer: Callable[[], None], path: str | Path) -> None:
    try:
        writer()
    except OSError as e:
        raise OutputWriteError(f"Failed to write {path}: {e}") from e
    logger.info(f"Wrote: {path}")


def _synth_spec(args) -> SynthSpec:
    if args.paper_scale:
        dims = PAPER_DIMS
    else:
        dims = args.dims if args.dims is not None else DESK_DIMS
    atoms = SYN_PRESETS[args.preset] if args.preset else args.atoms
    return SynthSpec(dims=dims, atoms=atoms, seed=args.seed)


def _sdp_config(args) -> SdpSolverConfig:
    return SdpSolverConfig(
        rank=args.sdp_rank,
        max_sweeps=args.sdp_sweeps,
        tol=args.sdp_tol,
        rounding_trials=args.rounding_trials,
        seed=args.seed,
    )


def _fit_config(args) -> FitConfig:
    return FitConfig(
        max_atoms=args.max_atoms,
        stop_tol=args.stop_tol,
        ridge=args.ridge,
        sdp=_sdp_config(args),
        seed=args.seed,
        duplicate_retry_budget=args.duplicate_retries,
        solver=args.solver,
        workers=_resolve_cpu_threads(args.cpu_threads),
        dump_quadratic=args.dump_quadratic,
    )


def _partition_for(args, ndim: int) -> Partition:
    spec = args.partitions or ";".join(str(m) for m in range(1, ndim + 1))
    return parse_partitions(spec, ndim)


# --- subcommands -------------------------------------------------------------

def cmd_synth(args) -> None:
    out = _require(args, "out", "--out")
    spec = _synth_spec(args)
    truth, planted = generate_ground_truth(spec)
    logger.info(f"Synthetic ground truth: dims {spec.dims}, {spec.atoms} atoms, seed {spec.seed}")
    _write(lambda: write_tensor(truth, out), out)
    if args.model:
        meta = {"seed": spec.seed, "atoms": spec.atoms, "alphabet": list(spec.alphabet)}
        _write(lambda: save_model(planted_model(spec.dims, planted), args.model, meta), args.model)


def cmd_noise(args) -> None:
    X = read_tensor(_input_path(args, "in_path", "--in"))
    out = _require(args, "out", "--out")
    noisy = add_gaussian_noise(X, args.sigma, args.seed, as_variance=args.sigma_is_variance)
    _write(lambda: write_tensor(noisy, out), out)


def cmd_mask(args) -> None:
    out = _require(args, "out", "--out")
    if args.in_path is not None:
        dims = read_tensor(_input_path(args, "in_path", "--in")).dims
    elif args.paper_scale:
        dims = PAPER_DIMS
    else:
        dims = args.dims if args.dims is not None else DESK_DIMS
    mask = sample_mask(dims, args.missing, args.seed)
    logger.info(f"Mask: {mask.size - mask.n_observed} of {mask.size} entries missing")
    _write(lambda: write_tensor(mask, out), out)


def cmd_fit(args) -> None:
    X = read_tensor(_input_path(args, "in_path", "--in"))
    mask = read_mask(_input_path(args, "mask", "--mask")) if args.mask else None
    truth = read_tensor(_input_path(args, "truth", "--truth")) if args.truth else None
    partition = _partition_for(args, X.ndim)
    cfg = _fit_config(args)
    logger.info(f"Fitting dims {X.dims} over partition {partition.label()} "
                f"(max {cfg.max_atoms} atoms, solver {cfg.solver}, {cfg.workers} worker(s))")
    model, trace = fit(Objective(X, mask), partition, cfg, truth=truth)
    if args.model:
        _write(lambda: save_model(model, args.model, fit_meta(cfg, partition)), args.model)
    if args.trace:
        _write(lambda: write_trace_csv(trace, args.trace), args.trace)
    final = trace.records[-1].objective if trace.records else trace.initial_objective
    print(f"objective={final!r} atoms={len(model.atoms)}")


def cmd_reconstruct(args) -> None:
    model, _ = load_model(_input_path(args, "model", "--model"))
    out = _require(args, "out", "--out")
    W = reconstruct(model)
    _write(lambda: write_tensor(W, out), out)


def cmd_eval(args) -> None:
    truth = read_tensor(_input_path(args, "truth", "--truth"))
    est = read_tensor(_input_path(args, "est", "--est"))
    if args.mask:
        mask = read_mask(_input_path(args, "mask", "--mask"))
        value = rmse_masked(truth, est, mask, held_out=args.held_out)
    else:
        if args.held_out:
            raise InvalidInputError("--held-out needs --mask")
        value = rmse(truth, est)
    print(json.dumps({"rmse": value}))


def cmd_curve(args) -> None:
    out = Path(_require(args, "out", "--out"))
    spec = _synth_spec(args)
    partition = _partition_for(args, len(spec.dims)) if args.lfm_mode is None else None
    cfg = replace(_fit_config(args), max_atoms=max(args.grid))
    if args.task == "denoise":
        records = run_denoise_curve(
            spec, args.sigma, cfg, args.grid, partition=partition,
            baseline_mode=args.lfm_mode, as_variance=args.sigma_is_variance,
        )
        _write(lambda: write_curve_csv(records, out), out)
        return

    fractions = args.missing_list or DEFAULT_MISSING_FRACTIONS
    for frac in fractions:
        records = run_recovery_curve(
            spec, frac, cfg, args.grid, partition=partition,
            zero_fill=args.zero_fill, baseline_mode=args.lfm_mode,
        )
        target = out if len(fractions) == 1 else out.with_name(f"{out.stem}_m{round(frac * 100)}{out.suffix}")
        _write(lambda: write_curve_csv(records, target), target)


def cmd_oracle(args) -> None:
    A = read_tensor(_input_path(args, "in_path", "--in"))
    if A.ndim != 2 or A.dims[0] != A.dims[1]:
        raise InvalidInputError(f"oracle needs a square matrix, got dims {A.dims}")
    matrix = A.as_array()
    if args.dump_quadratic:
        paths = dump_quadratic(matrix, args.dump_quadratic, "oracle")
        for p in paths:
            logger.info(f"Wrote: {p}")
    z, value = brute_force(matrix)
    result = {"p": A.dims[0], "z": "".join(str(int(b)) for b in z), "value": value}
    if args.compare:
        sol = solve(matrix, _sdp_config(args))
        result["sdp"] = {
            "z": "".join(str(int(b)) for b in sol.z),
            "value": sol.value,
            "sdp_objective": sol.sdp_objective,
        }
        result["ratio"] = sol.value / value if value > 0 else 1.0
    print(json.dumps(result))


COMMANDS = {
    "synth": cmd_synth,
    "noise": cmd_noise,
    "mask": cmd_mask,
    "fit": cmd_fit,
    "reconstruct": cmd_reconstruct,
    "eval": cmd_eval,
    "curve": cmd_curve,
    "oracle": cmd_oracle,
}


# --- argument parsing --------------------------------------------------------

def _add_synth_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dims", type=_int_list, default=None, help=f"Tensor extents, e.g. 20,20,5 (default: {','.join(map(str, DESK_DIMS))})")
    p.add_argument("--atoms", type=_positive_int, default=6, help="Number of planted atoms (default: 6)")
    p.add_argument("--preset", choices=sorted(SYN_PRESETS), default=None, help="Synthetic preset; sets --atoms")
    p.add_argument("--paper-scale", dest="paper_scale", action="store_true", help=f"Use dims {','.join(map(str, PAPER_DIMS))}")


def _add_sdp_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sdp-rank", dest="sdp_rank", type=_positive_int, default=None, help="Mixing-method factor rank (default: ceil(sqrt(2(p+1)))+1)")
    p.add_argument("--sdp-sweeps", dest="sdp_sweeps", type=_positive_int, default=DEFAULT_MAX_SWEEPS, help=f"Maximum mixing sweeps (default: {DEFAULT_MAX_SWEEPS})")
    p.add_argument("--sdp-tol", dest="sdp_tol", type=float, default=DEFAULT_SDP_TOL, help=f"Relative sweep tolerance (default: {DEFAULT_SDP_TOL})")
    p.add_argument("--rounding-trials", dest="rounding_trials", type=_positive_int, default=DEFAULT_ROUNDING_TRIALS, help=f"Hyperplane rounding trials (default: {DEFAULT_ROUNDING_TRIALS})")


def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--partitions", default=None, help="Mode subsets, e.g. '1;2;3' or '1,2;3' (default: every single mode)")
    p.add_argument("--max-atoms", dest="max_atoms", type=_positive_int, default=DEFAULT_MAX_ATOMS, help=f"Atom budget K (default: {DEFAULT_MAX_ATOMS})")
    p.add_argument("--stop-tol", dest="stop_tol", type=_non_negative_float, default=DEFAULT_STOP_TOL, help=f"Stop when the relative objective improvement drops below this (default: {DEFAULT_STOP_TOL})")
    p.add_argument("--ridge", type=_non_negative_float, default=DEFAULT_RIDGE, help=f"Ridge used when the Gram matrix is singular (default: {DEFAULT_RIDGE})")
    p.add_argument("--duplicate-retries", dest="duplicate_retries", type=_non_negative_int, default=DEFAULT_DUPLICATE_RETRY_BUDGET, help=f"Re-rounds before a duplicate atom stops the fit (default: {DEFAULT_DUPLICATE_RETRY_BUDGET})")
    p.add_argument("--solver", choices=SOLVERS, default="mixing", help="Boolean subproblem solver (default: mixing)")
    p.add_argument("--cpu-threads", dest="cpu_threads", type=_positive_int, default=None, help=f"Worker threads for the partition search (default: auto-detect; {THREADS_ENV} is honored when set)")
    p.add_argument("--dump-quadratic", dest="dump_quadratic", default=None, metavar="DIR", help="Write every Boolean subproblem as A_<tag>.csv / Ctilde_<tag>.csv into DIR")
    _add_sdp_flags(p)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key=value file; command-line flags override it")
    common.add_argument("--seed", type=_non_negative_int, default=0, help="Seed for every random draw (default: 0)")
    vg = common.add_mutually_exclusive_group()
    vg.add_argument("--quiet", action="store_true", help="Reduce log output")
    vg.add_argument("--verbose", action="store_true", help="Verbose log output (default)")
    vg.add_argument("--debug", action="store_true", help="Debug log output (sweeps, rounding, refit residuals)")
    common.set_defaults(verbose=True)

    parser = argparse.ArgumentParser(description="Binary matching pursuit for tensor latent feature models.")
    sub = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    p = subs["synth"] = sub.add_parser("synth", parents=[common], help="Generate planted ground truth")
    _add_synth_flags(p)
    p.add_argument("--out", default=None, help="Output TLT1 tensor")
    p.add_argument("--model", default=None, help="Also write the planted model as JSON")

    p = subs["noise"] = sub.add_parser("noise", parents=[common], help="Add i.i.d. Gaussian noise")
    p.add_argument("--in", dest="in_path", default=None, help="Input tensor")
    p.add_argument("--sigma", type=_non_negative_float, default=DEFAULT_SIGMA, help=f"Noise standard deviation (default: {DEFAULT_SIGMA})")
    p.add_argument("--sigma-is-variance", dest="sigma_is_variance", action="store_true", help="Read --sigma as a variance")
    p.add_argument("--out", default=None, help="Output TLT1 tensor")

    p = subs["mask"] = sub.add_parser("mask", parents=[common], help="Sample an observation mask")
    p.add_argument("--in", dest="in_path", default=None, help="Take dims from this tensor")
    p.add_argument("--dims", type=_int_list, default=None, help="Mask extents when --in is not given")
    p.add_argument("--paper-scale", dest="paper_scale", action="store_true", help=f"Use dims {','.join(map(str, PAPER_DIMS))}")
    p.add_argument("--missing", type=_non_negative_float, default=0.1, help="Fraction of entries removed (default: 0.1)")
    p.add_argument("--out", default=None, help="Output TLT1 mask")

    p = subs["fit"] = sub.add_parser("fit", parents=[common], help="Fit a BMP model")
    p.add_argument("--in", dest="in_path", default=None, help="Input tensor (TLT1, or CSV for a matrix)")
    p.add_argument("--mask", default=None, help="Observation mask; fits observed entries only")
    p.add_argument("--truth", default=None, help="Ground truth for per-iteration RMSE")
    p.add_argument("--model", default=None, help="Output model JSON")
    p.add_argument("--trace", default=None, help="Output trace CSV")
    _add_fit_flags(p)

    p = subs["reconstruct"] = sub.add_parser("reconstruct", parents=[common], help="Rebuild the tensor of a model")
    p.add_argument("--model", default=None, help="Model JSON")
    p.add_argument("--out", default=None, help="Output TLT1 tensor")

    p = subs["eval"] = sub.add_parser("eval", parents=[common], help="RMSE between two tensors")
    p.add_argument("--truth", default=None, help="Reference tensor")
    p.add_argument("--est", default=None, help="Estimated tensor")
    p.add_argument("--mask", default=None, help="Restrict to observed entries")
    p.add_argument("--held-out", dest="held_out", action="store_true", help="With --mask, evaluate the missing entries instead")

    p = subs["curve"] = sub.add_parser("curve", parents=[common], help="Denoising or recovery curve over an atom grid")
    p.add_argument("--task", choices=["denoise", "recovery"], default="denoise", help="Experiment (default: denoise)")
    _add_synth_flags(p)
    p.add_argument("--sigma", type=_non_negative_float, default=DEFAULT_SIGMA, help=f"Noise level for denoise (default: {DEFAULT_SIGMA})")
    p.add_argument("--sigma-is-variance", dest="sigma_is_variance", action="store_true", help="Read --sigma as a variance")
    p.add_argument("--missing", dest="missing_list", type=_float_list, default=None, help="Missing fractions for recovery, e.g. 0.1,0.25,0.4")
    p.add_argument("--zero-fill", dest="zero_fill", action="store_true", help="Fit X*mask densely instead of the masked objective")
    p.add_argument("--grid", type=_int_list, default=DEFAULT_GRID, help=f"Atom counts to report (default: {','.join(map(str, DEFAULT_GRID))})")
    p.add_argument("--lfm-mode", dest="lfm_mode", type=_positive_int, default=None, help="Matrix LFM baseline on the unfolding over this mode")
    p.add_argument("--out", default=None, help="Output curve CSV (one per fraction for several --missing values)")
    _add_fit_flags(p)

    p = subs["oracle"] = sub.add_parser("oracle", parents=[common], help="Exhaustive max z'Az for a small matrix")
    p.add_argument("--in", dest="in_path", default=None, help="Square matrix (TLT1 or CSV)")
    p.add_argument("--compare", action="store_true", help="Also run the SDP pipeline and report the ratio")
    p.add_argument("--dump-quadratic", dest="dump_quadratic", default=None, metavar="DIR", help="Write A and its lift as CSV into DIR")
    _add_sdp_flags(p)

    return parser, subs


def main(argv: list[str] | None = None) -> int:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    quiet = _configure_logging(args)
    start_time = time.time()
    try:
        if args.config:
            subs[args.command].set_defaults(**_config_defaults(subs[args.command], read_config_file(args.config)))
            args = parser.parse_args(argv)
            quiet = _configure_logging(args)
        COMMANDS[args.command](args)
        if not quiet:
            logger.info(f"{args.command} completed in {time.time() - start_time:.2f} seconds.")
    except (InvalidInputError, TensorShapeError, BenchError) as e:
        logger.error(str(e))
        return 2
    except (TensorFormatError, ModelFormatError) as e:
        logger.error(str(e))
        return 3
    except (FitError, BoolQuadError) as e:
        logger.error(str(e))
        return 4
    except OutputWriteError as e:
        logger.error(str(e))
        return 5
    except Exception as e:
        if not quiet:
            logger.error(f"Unexpected error: {e}")
        else:
            logger.error("Unexpected error. Run with --verbose for details.")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
