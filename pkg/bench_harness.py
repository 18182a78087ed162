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
Synthetic ground truth, noise and mask injection, RMSE metrics, and the
denoising / recovery curve experiments.

Ground truth is a sum of K planted atoms. Atom k puts a Bernoulli(0.5) binary
code on mode l = ((k - 1) mod L) + 1 and integer factors drawn from a small
alphabet on every other mode.
"""

import csv
import logging
import math
from dataclasses import dataclass, replace
from functools import reduce
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from matching_pursuit import (
    Atom,
    FitConfig,
    FitTrace,
    Model,
    Objective,
    Partition,
    fit,
    matrix_lfm_fit,
    reconstruct,
    snapshot,
)
from tensor_core import (
    MaskTensor,
    ModeSubset,
    Tensor,
    TensorShapeError,
    apply_mask,
    refold,
    unfold,
)

logger = logging.getLogger("bmpfit.bench")

DESK_DIMS = (20, 20, 5)
PAPER_DIMS = (100, 100, 10)
DEFAULT_ALPHABET = (1, 2, 3, 4, 5)
DEFAULT_SIGMA = 0.1
DEFAULT_MISSING_FRACTIONS = (0.10, 0.25, 0.40)
SYN_PRESETS = {"syn0": 6, "syn1": 15, "syn2": 30}
CURVE_HEADER = ["atom_count", "rmse", "objective", "wall_time_ms"]
# child index of SeedSequence(seed) per purpose
TRUTH_STREAM, NOISE_STREAM, MASK_STREAM = range(3)


class BenchError(ValueError):
    """Raised for invalid experiment settings or metrics without support."""
    pass


@dataclass(frozen=True)
class SynthSpec:
    dims: tuple[int, ...] = DESK_DIMS
    atoms: int = 6
    alphabet: tuple[int, ...] = DEFAULT_ALPHABET
    seed: int = 0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise BenchError(f"synthetic dims need >= 2 modes with extents >= 1, got {dims}")
        if self.atoms < 1:
            raise BenchError(f"atom count must be >= 1, got {self.atoms}")
        alphabet = tuple(int(a) for a in self.alphabet)
        if not alphabet:
            raise BenchError("feature alphabet must not be empty")
        if not any(alphabet):
            raise BenchError("feature alphabet needs at least one nonzero value")
        if self.seed < 0:
            raise BenchError(f"seed must be non-negative, got {self.seed}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "alphabet", alphabet)

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "SynthSpec":
        if name not in SYN_PRESETS:
            raise BenchError(f"unknown preset {name!r}; choose from {sorted(SYN_PRESETS)}")
        return cls(atoms=SYN_PRESETS[name], **overrides)


@dataclass
class PlantedAtom:
    mode: int  # 1-based mode carrying the binary code
    z: np.ndarray
    factors: tuple[np.ndarray, ...]  # remaining modes, ascending

    def vectors(self, ndim: int) -> list[np.ndarray]:
        others = iter(self.factors)
        return [self.z.astype(np.float64) if m == self.mode else next(others).astype(np.float64)
                for m in range(1, ndim + 1)]

    def tensor(self) -> Tensor:
        return Tensor.from_array(reduce(np.multiply.outer, self.vectors(len(self.factors) + 1)))


def random_stream(seed: int, purpose: int) -> np.random.Generator:
    """Generator on child `purpose` of SeedSequence(seed); truth, noise and mask never share draws."""
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(purpose + 1)[purpose])


@dataclass
class CurveRecord:
    atom_count: int
    rmse: float
    objective: float
    wall_time: float  # seconds
    heldout_rmse: float | None = None


def generate_ground_truth(
    spec: SynthSpec,
    codes: Mapping[int, Sequence[int]] | None = None,
) -> tuple[Tensor, list[PlantedAtom]]:
    """X* = sum of spec.atoms planted atoms drawn from the truth stream of spec.seed.

    `codes` pins the binary code of atom k (1-based) instead of sampling it.
    """
    rng = random_stream(spec.seed, TRUTH_STREAM)
    L = len(spec.dims)
    alphabet = np.asarray(spec.alphabet)
    planted: list[PlantedAtom] = []
    total = np.zeros(spec.dims)
    for k in range(1, spec.atoms + 1):
        mode = (k - 1) % L + 1
        extent = spec.dims[mode - 1]
        if codes is not None and k in codes:
            z = np.asarray(codes[k], dtype=np.int8)
            if z.shape != (extent,) or not np.any(z) or not np.all((z == 0) | (z == 1)):
                raise BenchError(f"pinned code for atom {k} must be a nonzero binary vector of length {extent}")
        else:
            z = rng.integers(0, 2, size=extent).astype(np.int8)
            while not np.any(z):
                z = rng.integers(0, 2, size=extent).astype(np.int8)
        factors = []
        for m in range(1, L + 1):
            if m == mode:
                continue
            w = rng.choice(alphabet, size=spec.dims[m - 1])
            while not np.any(w):
                w = rng.choice(alphabet, size=spec.dims[m - 1])
            factors.append(w.astype(np.int64))
        atom = PlantedAtom(mode, z, tuple(factors))
        planted.append(atom)
        total += atom.tensor().as_array()
    logger.debug(f"Planted {spec.atoms} atoms on dims {spec.dims} (seed {spec.seed})")
    return Tensor.from_array(total), planted


def planted_model(dims: Sequence[int], planted: Sequence[PlantedAtom]) -> Model:
    """Model whose reconstruction is X*: atom over S={l}, v = w/||w||, c = ||w||."""
    atoms, coeffs = [], []
    for p in planted:
        w = reduce(np.multiply.outer, [f.astype(np.float64) for f in p.factors]).reshape(-1, order="F")
        norm = float(np.linalg.norm(w))
        atoms.append(Atom(ModeSubset((p.mode,)), p.z, w / norm))
        coeffs.append(norm)
    return Model(tuple(dims), atoms, np.array(coeffs))


def add_gaussian_noise(X: Tensor, sigma: float, seed: int, as_variance: bool = False) -> Tensor:
    """X + e with e ~ N(0, sigma^2) i.i.d.; `as_variance` reads sigma as the variance."""
    if sigma < 0:
        raise BenchError(f"noise level must be >= 0, got {sigma}")
    std = math.sqrt(sigma) if as_variance else sigma
    if std == 0.0:
        return Tensor(X.dims, X.data)
    rng = random_stream(seed, NOISE_STREAM)
    return Tensor(X.dims, X.data + rng.normal(0.0, std, size=X.size))


def sample_mask(dims: Sequence[int], missing_frac: float, seed: int) -> MaskTensor:
    """Exactly round(missing_frac * N) entries set to 0, uniformly without replacement."""
    if not 0.0 <= missing_frac < 1.0:
        raise BenchError(f"missing fraction must be in [0, 1), got {missing_frac}")
    n = math.prod(dims)
    n_missing = int(round(missing_frac * n))
    if n_missing >= n:
        raise BenchError(f"missing fraction {missing_frac} removes every one of the {n} entries")
    data = np.ones(n)
    if n_missing:
        rng = random_stream(seed, MASK_STREAM)
        data[rng.choice(n, size=n_missing, replace=False)] = 0.0
    return MaskTensor(tuple(dims), data)


def rmse(truth: Tensor, est: Tensor) -> float:
    if truth.dims != est.dims:
        raise TensorShapeError(f"rmse: dims {truth.dims} and {est.dims} differ")
    return float(np.sqrt(np.mean((truth.data - est.data) ** 2)))


def rmse_masked(truth: Tensor, est: Tensor, mask: MaskTensor, held_out: bool = False) -> float:
    """RMSE over observed entries, or over the missing ones when held_out is set."""
    if truth.dims != est.dims or truth.dims != mask.dims:
        raise TensorShapeError(f"rmse_masked: dims {truth.dims}, {est.dims}, {mask.dims} differ")
    select = ~mask.observed if held_out else mask.observed
    if not np.any(select):
        which = "missing" if held_out else "observed"
        raise BenchError(f"no {which} entries to evaluate")
    diff = truth.data[select] - est.data[select]
    return float(np.sqrt(np.mean(diff ** 2)))


def mean_fill_baseline(X: Tensor, mask: MaskTensor) -> Tensor:
    """Observed entries kept, missing entries replaced by the observed mean."""
    if X.dims != mask.dims:
        raise TensorShapeError(f"mean_fill_baseline: dims {X.dims} and {mask.dims} differ")
    observed = mask.observed
    if not np.any(observed):
        raise BenchError("no observed entries to average")
    fill = float(np.mean(X.data[observed]))
    return Tensor(X.dims, np.where(observed, X.data, fill))


def _check_grid(grid: Sequence[int]) -> list[int]:
    points = [int(g) for g in grid]
    if not points:
        raise BenchError("atom grid must not be empty")
    if points[0] < 1 or any(b <= a for a, b in zip(points, points[1:])):
        raise BenchError(f"atom grid must be strictly increasing positive counts, got {points}")
    return points


def _fit_estimator(
    X: Tensor,
    mask: MaskTensor | None,
    cfg: FitConfig,
    partition: Partition | None,
    baseline_mode: int | None,
    truth: Tensor | None,
) -> tuple[Callable[[int], Tensor], FitTrace]:
    """Run one fit and return k -> W^k (refolded to X's dims) plus the trace."""
    if baseline_mode is None:
        partition = partition or Partition.singletons(X.ndim)
        model, trace = fit(Objective(X, mask), partition, cfg, truth=truth)
        return (lambda k: reconstruct(snapshot(model, trace, k))), trace

    subset = ModeSubset((baseline_mode,))
    subset.check(X.ndim)
    X2 = unfold(X, subset)
    mask2 = None if mask is None else MaskTensor(X2.dims, unfold(mask, subset).data)
    truth2 = None if truth is None else unfold(truth, subset)
    logger.info(f"Matrix LFM baseline on the mode-{baseline_mode} unfolding {X2.dims}")
    model, trace = matrix_lfm_fit(X2, cfg, mask=mask2, truth=truth2)
    return (lambda k: refold(reconstruct(snapshot(model, trace, k)), subset, X.dims)), trace


def _curve(
    estimate: Callable[[int], Tensor],
    trace: FitTrace,
    grid: list[int],
    score: Callable[[Tensor], tuple[float, float | None]],
) -> list[CurveRecord]:
    records: list[CurveRecord] = []
    seen = set()
    for g in grid:
        k = min(g, len(trace))
        if k in seen:
            continue
        seen.add(k)
        if k == 0:
            objective, elapsed = trace.initial_objective, 0.0
        else:
            objective, elapsed = trace.records[k - 1].objective, trace.records[k - 1].elapsed
        full, held = score(estimate(k))
        records.append(CurveRecord(k, full, objective, elapsed, held))
        logger.info(f"  {k:>3} atoms: rmse={full:.6g}" + (f" held-out={held:.6g}" if held is not None else ""))
    if len(trace) < grid[-1]:
        logger.info(f"Fit stopped at {len(trace)} atoms ({trace.stop_reason}); later grid points collapsed")
    return records


def run_denoise_curve(
    spec: SynthSpec,
    sigma: float,
    cfg: FitConfig,
    grid: Sequence[int],
    partition: Partition | None = None,
    baseline_mode: int | None = None,
    as_variance: bool = False,
) -> list[CurveRecord]:
    """RMSE(X*, W^k) along the atom grid for one fit of the noisy tensor."""
    points = _check_grid(grid)
    truth, _ = generate_ground_truth(spec)
    noisy = add_gaussian_noise(truth, sigma, cfg.seed, as_variance=as_variance)
    logger.info(f"Denoise curve: dims {spec.dims}, K={spec.atoms}, sigma={sigma}, "
                f"noise rmse={rmse(truth, noisy):.6g}")
    estimate, trace = _fit_estimator(
        noisy, None, replace(cfg, max_atoms=points[-1]), partition, baseline_mode, truth
    )
    return _curve(estimate, trace, points, lambda W: (rmse(truth, W), None))


def run_recovery_curve(
    spec: SynthSpec,
    missing_frac: float,
    cfg: FitConfig,
    grid: Sequence[int],
    partition: Partition | None = None,
    zero_fill: bool = False,
    baseline_mode: int | None = None,
) -> list[CurveRecord]:
    """Full-tensor and held-out RMSE along the atom grid for one fit of the masked tensor."""
    points = _check_grid(grid)
    truth, _ = generate_ground_truth(spec)
    mask = sample_mask(spec.dims, missing_frac, cfg.seed)
    has_missing = mask.n_observed < truth.size
    logger.info(f"Recovery curve: dims {spec.dims}, K={spec.atoms}, missing={missing_frac}"
                + (" (zero-fill)" if zero_fill else ""))
    if zero_fill:
        X, fit_mask = apply_mask(truth, mask), None
    else:
        X, fit_mask = truth, mask
    estimate, trace = _fit_estimator(
        X, fit_mask, replace(cfg, max_atoms=points[-1]), partition, baseline_mode, truth
    )

    def score(W: Tensor) -> tuple[float, float | None]:
        held = rmse_masked(truth, W, mask, held_out=True) if has_missing else None
        return rmse(truth, W), held

    return _curve(estimate, trace, points, score)


def run_recovery_sweep(
    spec: SynthSpec,
    cfg: FitConfig,
    grid: Sequence[int],
    fractions: Sequence[float] = DEFAULT_MISSING_FRACTIONS,
    **kwargs,
) -> dict[float, list[CurveRecord]]:
    return {frac: run_recovery_curve(spec, frac, cfg, grid, **kwargs) for frac in fractions}


def write_curve_csv(records: Sequence[CurveRecord], path: str | Path) -> None:
    held = any(r.heldout_rmse is not None for r in records)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CURVE_HEADER + (["heldout_rmse"] if held else []))
        for r in records:
            row = [r.atom_count, repr(r.rmse), repr(r.objective), repr(r.wall_time * 1000.0)]
            if held:
                row.append("" if r.heldout_rmse is None else repr(r.heldout_rmse))
            writer.writerow(row)
