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
Binary matching pursuit over tensor latent feature atoms.

An atom refold_S(z v^T) pairs a binary code z over the modes of S with a unit
feature vector v over S^c. Each iteration:
  gradient -> greedy atom search over the partition -> append atom
  -> fully-corrective least-squares refit of all coefficients -> reconstruct.

The least-squares objective is either dense, 1/2 ||X - W||_F^2, or masked to the
observed entries of a MaskTensor.
"""

import csv
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from scipy import linalg

from boolquad import BoolQuadSolution, SdpSolverConfig, dump_quadratic, solve, solve_exhaustive
from tensor_core import (
    MaskTensor,
    ModeSubset,
    Tensor,
    TensorShapeError,
    frobenius_norm,
    refold,
    unfold,
)

logger = logging.getLogger("bmpfit.pursuit")

DEFAULT_STOP_TOL = 1e-8
DEFAULT_RIDGE = 1e-10
DEFAULT_DUPLICATE_RETRY_BUDGET = 3
DUPLICATE_V_TOL = 1e-6
UNIT_NORM_TOL = 1e-9
ZERO_GRADIENT_RTOL = 1e-13
# squared ratio of smallest to largest Cholesky pivot below this marks a singular Gram
MIN_GRAM_RCOND = 1e-13
AUTO_EXHAUSTIVE_MAX_P = 12
SOLVERS = ("mixing", "exhaustive", "auto")
TRACE_HEADER = ["iter", "objective", "partition", "score", "c_l1", "rmse"]

__all__ = [
    "Partition",
    "Atom",
    "Model",
    "ModelFormatError",
    "FitError",
    "Objective",
    "FitConfig",
    "FitTrace",
    "TraceRecord",
    "gradient",
    "greedy_atom_search",
    "adjust_weights",
    "reconstruct",
    "fit",
    "matrix_lfm_fit",
    "snapshot",
    "convergence_trend",
    "trend_is_bounded",
    "normal_equation_residual",
    "derive_seed",
    "fit_meta",
    "dumps_model",
    "save_model",
    "load_model",
    "dumps_trace",
    "write_trace_csv",
]


class FitError(RuntimeError):
    """Raised when a fit cannot proceed (bad config, singular refit)."""
    pass


class ModelFormatError(FitError):
    """Raised when a model JSON document cannot be decoded."""
    pass


@dataclass(frozen=True)
class Partition:
    """Ordered collection of mode subsets S searched for atoms."""
    subsets: tuple[ModeSubset, ...]

    def __post_init__(self):
        subsets = tuple(self.subsets)
        if not subsets:
            raise TensorShapeError("partition must contain at least one mode subset")
        seen = set()
        for s in subsets:
            if s.modes in seen:
                raise TensorShapeError(f"duplicate mode subset {{{s.label()}}} in partition")
            seen.add(s.modes)
        object.__setattr__(self, "subsets", subsets)

    @classmethod
    def singletons(cls, ndim: int) -> "Partition":
        return cls(tuple(ModeSubset((m,)) for m in range(1, ndim + 1)))

    def check(self, ndim: int) -> None:
        for s in self.subsets:
            s.check(ndim)

    def __len__(self) -> int:
        return len(self.subsets)

    def __iter__(self) -> Iterator[ModeSubset]:
        return iter(self.subsets)

    def label(self) -> str:
        return ";".join(s.label() for s in self.subsets)


@dataclass(eq=False)
class Atom:
    subset: ModeSubset
    z: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=np.int8).reshape(-1)
        self.v = np.asarray(self.v, dtype=np.float64).reshape(-1)
        if not np.all((self.z == 0) | (self.z == 1)):
            raise FitError("atom code must be binary")
        if not np.any(self.z):
            raise FitError("atom code must not be all zeros")
        if abs(np.linalg.norm(self.v) - 1.0) > UNIT_NORM_TOL:
            raise FitError(f"atom feature vector must have unit norm, got {np.linalg.norm(self.v)!r}")

    def flat(self, dims: Sequence[int]) -> np.ndarray:
        """vec(refold_S(z v^T)) in the fixed layout."""
        p, q = self.subset.row_extent(dims), self.subset.col_extent(dims)
        if self.z.size != p or self.v.size != q:
            raise TensorShapeError(
                f"atom over {{{self.subset.label()}}} has shape ({self.z.size}, {self.v.size}), expected ({p}, {q})"
            )
        return refold(Tensor.from_array(np.outer(self.z, self.v)), self.subset, dims).data

    def tensor(self, dims: Sequence[int]) -> Tensor:
        return Tensor(tuple(dims), self.flat(dims))

    def duplicates(self, other: "Atom") -> bool:
        if self.subset != other.subset or not np.array_equal(self.z, other.z):
            return False
        return min(np.linalg.norm(self.v - other.v), np.linalg.norm(self.v + other.v)) <= DUPLICATE_V_TOL


@dataclass
class Model:
    dims: tuple[int, ...]
    atoms: list[Atom] = field(default_factory=list)
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64).reshape(-1)
        if len(self.atoms) != self.coeffs.size:
            raise FitError(f"{len(self.atoms)} atoms but {self.coeffs.size} coefficients")


@dataclass(frozen=True, eq=False)
class Objective:
    """Least-squares objective, dense or restricted to the observed entries of a mask."""
    X: Tensor
    mask: MaskTensor | None = None

    def __post_init__(self):
        if self.mask is not None:
            if self.mask.dims != self.X.dims:
                raise TensorShapeError(f"mask dims {self.mask.dims} do not match data dims {self.X.dims}")
            if self.mask.n_observed < 1:
                raise FitError("mask has no observed entries")
            target = np.where(self.mask.observed, self.X.data, 0.0)
        else:
            target = self.X.data
        object.__setattr__(self, "_target", target)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.X.dims

    @property
    def ndim(self) -> int:
        return self.X.ndim

    @property
    def observed(self) -> np.ndarray | None:
        return None if self.mask is None else self.mask.observed

    def restrict(self, flat: np.ndarray) -> np.ndarray:
        return flat if self.mask is None else flat[self.mask.observed]

    def target(self) -> np.ndarray:
        """Observed part of vec(X)."""
        return self.restrict(self._target)

    def full_target(self) -> np.ndarray:
        """vec(X) with unobserved entries set to +0.0."""
        return self._target

    def value(self, W: Tensor) -> float:
        if W.dims != self.dims:
            raise TensorShapeError(f"estimate dims {W.dims} do not match objective dims {self.dims}")
        r = self.restrict(self._target - W.data)
        return 0.5 * float(r @ r)


@dataclass(frozen=True)
class FitConfig:
    max_atoms: int
    stop_tol: float = DEFAULT_STOP_TOL
    ridge: float = DEFAULT_RIDGE
    sdp: SdpSolverConfig = field(default_factory=SdpSolverConfig)
    seed: int = 0
    duplicate_retry_budget: int = DEFAULT_DUPLICATE_RETRY_BUDGET
    solver: str = "mixing"
    workers: int = 1
    dump_quadratic: str | None = None  # directory for A / Ctilde CSV dumps

    def __post_init__(self):
        if self.max_atoms < 1:
            raise FitError(f"max_atoms must be >= 1, got {self.max_atoms}")
        if self.ridge < 0:
            raise FitError(f"ridge must be >= 0, got {self.ridge}")
        if self.stop_tol < 0:
            raise FitError(f"stop_tol must be >= 0, got {self.stop_tol}")
        if self.duplicate_retry_budget < 0:
            raise FitError(f"duplicate_retry_budget must be >= 0, got {self.duplicate_retry_budget}")
        if self.solver not in SOLVERS:
            raise FitError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if self.seed < 0:
            raise FitError(f"seed must be non-negative, got {self.seed}")
        if self.workers < 1:
            raise FitError(f"workers must be >= 1, got {self.workers}")


@dataclass
class TraceRecord:
    iteration: int
    objective: float
    partition: int  # 1-based index into the partition
    score: float
    c_l1: float
    rmse: float | None
    coeffs: tuple[float, ...]
    elapsed: float  # seconds since the fit started


@dataclass
class FitTrace:
    initial_objective: float
    initial_rmse: float | None = None
    records: list[TraceRecord] = field(default_factory=list)
    stop_reason: str = "max_atoms"

    @property
    def objectives(self) -> list[float]:
        return [r.objective for r in self.records]

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class AtomSearchResult:
    atom: Atom
    score: float
    partition_index: int  # 0-based


def gradient(obj: Objective, W: Tensor) -> Tensor:
    """W - X, zeroed (+0.0) on unobserved entries for the masked objective."""
    if W.dims != obj.dims:
        raise TensorShapeError(f"estimate dims {W.dims} do not match objective dims {obj.dims}")
    diff = W.data - obj.full_target()
    if obj.observed is not None:
        diff = np.where(obj.observed, diff, 0.0)
    return Tensor(obj.dims, diff)


def derive_seed(seed: int, iteration: int, retry: int, index: int) -> int:
    """Independent 63-bit stream per (iteration, duplicate retry, partition index)."""
    state = np.random.SeedSequence([seed, iteration, retry, index]).generate_state(1, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))


def _solve_boolean(A: np.ndarray, cfg: FitConfig, seed: int) -> BoolQuadSolution:
    p = A.shape[0]
    if cfg.solver == "exhaustive" or (cfg.solver == "auto" and p <= AUTO_EXHAUSTIVE_MAX_P):
        return solve_exhaustive(A)
    return solve(A, replace(cfg.sdp, seed=seed))


def greedy_atom_search(
    grad: Tensor,
    partition: Partition,
    cfg: FitConfig,
    *,
    iteration: int = 1,
    retry: int = 0,
) -> AtomSearchResult | None:
    """Steepest-descent atom over all subsets of the partition, or None at a zero gradient.

    For each S: G = unfold_S(grad), z from max z'GG'z, v = -G'z/||G'z||; the
    candidate score <grad, refold_S(z v')> equals -||G'z||. The lowest score wins,
    ties going to the earliest subset.
    """
    partition.check(grad.ndim)

    def search(item: tuple[int, ModeSubset]) -> AtomSearchResult | None:
        index, subset = item
        G = unfold(grad, subset).as_array()
        A = G @ G.T
        if cfg.dump_quadratic:
            dump_quadratic(A, cfg.dump_quadratic, f"k{iteration}_r{retry}_s{index + 1}")
        solution = _solve_boolean(A, cfg, derive_seed(cfg.seed, iteration, retry, index))
        if solution.zero_gradient:
            return None
        u = G.T @ solution.z.astype(np.float64)
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            return None
        return AtomSearchResult(Atom(subset, solution.z, -u / norm), score=-norm, partition_index=index)

    items = list(enumerate(partition.subsets))
    if cfg.workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=min(cfg.workers, len(items))) as pool:
            results = list(pool.map(search, items))
    else:
        results = [search(item) for item in items]

    candidates = [r for r in results if r is not None]
    if not candidates:
        return None
    return min(candidates, key=lambda r: (r.score, r.partition_index))


def _cholesky_solve(gram: np.ndarray, rhs: np.ndarray, check_rcond: bool) -> np.ndarray:
    factor = linalg.cho_factor(gram, lower=True)
    if check_rcond:
        pivots = np.abs(np.diag(factor[0]))
        if (pivots.min() / pivots.max()) ** 2 < MIN_GRAM_RCOND:
            raise linalg.LinAlgError("Gram matrix is numerically singular")
    return linalg.cho_solve(factor, rhs)


def _solve_normal_equations(gram: np.ndarray, rhs: np.ndarray, ridge: float) -> tuple[np.ndarray, float]:
    """Solve (G + eps I) c = b; eps = 0 first, ridge on a singular Gram."""
    try:
        return _cholesky_solve(gram, rhs, check_rcond=True), 0.0
    except linalg.LinAlgError as e:
        if ridge <= 0:
            raise FitError(f"singular Gram matrix of {gram.shape[0]} atoms and ridge is 0: {e}") from e
        logger.warning(f"Gram matrix of {gram.shape[0]} atoms is singular; retrying with ridge {ridge:g}")
    try:
        return _cholesky_solve(gram + ridge * np.eye(gram.shape[0]), rhs, check_rcond=False), ridge
    except linalg.LinAlgError as e:
        raise FitError(f"weight adjustment failed even with ridge {ridge:g}: {e}") from e


def normal_equation_residual(obj: Objective, atoms: Sequence[Atom], coeffs) -> float:
    """max_m |<M_m, X - sum c M>| over the observed entries."""
    if not atoms:
        return 0.0
    M = np.column_stack([obj.restrict(a.flat(obj.dims)) for a in atoms])
    r = obj.target() - M @ np.asarray(coeffs, dtype=np.float64)
    return float(np.max(np.abs(M.T @ r)))


def adjust_weights(obj: Objective, atoms: Sequence[Atom], ridge: float = DEFAULT_RIDGE) -> np.ndarray:
    """Fully-corrective coefficients: argmin_c 1/2 ||X - sum_m c_m M_m||^2 (observed entries)."""
    if not atoms:
        raise FitError("adjust_weights needs at least one atom")
    M = np.column_stack([obj.restrict(a.flat(obj.dims)) for a in atoms])
    c, _ = _solve_normal_equations(M.T @ M, M.T @ obj.target(), ridge)
    return c


class _ActiveSet:
    """Flattened active atoms with an incrementally grown Gram matrix."""

    def __init__(self, obj: Objective, capacity: int):
        self.obj = obj
        self.full = np.empty((obj.X.size, capacity))
        self.gram = np.empty((capacity, capacity))
        self.rhs = np.empty(capacity)
        self.k = 0
        self._target = obj.target()

    def _observed(self, j: int) -> np.ndarray:
        return self.obj.restrict(self.full[:, j])

    def push(self, atom: Atom) -> None:
        k = self.k
        self.full[:, k] = atom.flat(self.obj.dims)
        col = self._observed(k)
        for j in range(k):
            self.gram[j, k] = self.gram[k, j] = float(self._observed(j) @ col)
        self.gram[k, k] = float(col @ col)
        self.rhs[k] = float(col @ self._target)
        self.k += 1

    def pop(self) -> None:
        self.k -= 1

    def solve(self, ridge: float) -> tuple[np.ndarray, float]:
        k = self.k
        return _solve_normal_equations(self.gram[:k, :k], self.rhs[:k], ridge)

    def combine(self, coeffs: np.ndarray) -> Tensor:
        return Tensor(self.obj.dims, self.full[:, : self.k] @ coeffs)


def reconstruct(model: Model) -> Tensor:
    flat = np.zeros(int(np.prod(model.dims)))
    for atom, c in zip(model.atoms, model.coeffs):
        flat += c * atom.flat(model.dims)
    return Tensor(model.dims, flat)


def _rmse(truth: Tensor | None, W: Tensor) -> float | None:
    if truth is None:
        return None
    return float(np.sqrt(np.mean((truth.data - W.data) ** 2)))


def fit(
    obj: Objective,
    partition: Partition,
    cfg: FitConfig,
    truth: Tensor | None = None,
) -> tuple[Model, FitTrace]:
    """Binary matching pursuit with fully-corrective refits.

    Stops after cfg.max_atoms accepted atoms, at a zero gradient, when the relative
    objective improvement drops below cfg.stop_tol, or when the search keeps
    returning an atom already in the active set after cfg.duplicate_retry_budget
    re-rounds.
    """
    partition.check(obj.ndim)
    if truth is not None and truth.dims != obj.dims:
        raise TensorShapeError(f"truth dims {truth.dims} do not match data dims {obj.dims}")

    started = time.perf_counter()
    active = _ActiveSet(obj, cfg.max_atoms)
    atoms: list[Atom] = []
    coeffs = np.zeros(0)
    W = Tensor.zeros(obj.dims)
    F = obj.value(W)
    trace = FitTrace(initial_objective=F, initial_rmse=_rmse(truth, W))
    grad_floor = ZERO_GRADIENT_RTOL * float(np.linalg.norm(obj.target()))

    for k in range(1, cfg.max_atoms + 1):
        grad = gradient(obj, W)
        if frobenius_norm(grad) <= grad_floor:
            trace.stop_reason = "zero_gradient"
            break

        found = None
        for retry in range(cfg.duplicate_retry_budget + 1):
            found = greedy_atom_search(grad, partition, cfg, iteration=k, retry=retry)
            if found is None or not any(found.atom.duplicates(a) for a in atoms):
                break
            logger.debug(f"[{k}] search returned an active atom; re-rounding (retry {retry + 1})")
        else:
            logger.warning(f"[{k}] duplicate atom after {cfg.duplicate_retry_budget} retries; stopping")
            trace.stop_reason = "duplicate_atom"
            break
        if found is None:
            trace.stop_reason = "zero_gradient"
            break

        active.push(found.atom)
        new_coeffs, ridge_used = active.solve(cfg.ridge)
        W_new = active.combine(new_coeffs)
        F_new = obj.value(W_new)
        if F_new > F:
            # A refit over a larger span cannot increase F; this is roundoff or ridge bias.
            active.pop()
            logger.debug(f"[{k}] refit raised the objective ({F!r} -> {F_new!r}); atom rejected")
            trace.stop_reason = "stalled"
            break

        atoms.append(found.atom)
        coeffs, W = new_coeffs, W_new
        if ridge_used == 0.0 and logger.isEnabledFor(logging.DEBUG):
            logger.debug(f"[{k}] normal-equation residual {normal_equation_residual(obj, atoms, coeffs):.3e}")

        improvement = (F - F_new) / F if F > 0 else 0.0
        record = TraceRecord(
            iteration=k,
            objective=F_new,
            partition=found.partition_index + 1,
            score=found.score,
            c_l1=float(np.sum(np.abs(coeffs))),
            rmse=_rmse(truth, W),
            coeffs=tuple(float(c) for c in coeffs),
            elapsed=time.perf_counter() - started,
        )
        trace.records.append(record)
        rmse_note = f" rmse={record.rmse:.6g}" if record.rmse is not None else ""
        logger.info(
            f"[{k}] objective={F_new:.6g} partition={record.partition} "
            f"score={found.score:.6g} |c|_1={record.c_l1:.6g}{rmse_note}"
        )
        F = F_new
        if improvement < cfg.stop_tol:
            trace.stop_reason = "stalled"
            break

    trend = convergence_trend(trace)
    if trend:
        logger.debug("Convergence trend k*(F_k - F_K): " + ", ".join(f"{k}:{t:.4g}" for k, t in trend))
        if not trend_is_bounded(trend):
            logger.warning("Convergence trend k*(F_k - F_K) grows by more than 10x over its value at k=2")
    logger.info(f"Fit finished: {len(atoms)} atoms, objective {F:.6g} ({trace.stop_reason})")
    return Model(obj.dims, atoms, coeffs), trace


def matrix_lfm_fit(
    X2: Tensor,
    cfg: FitConfig,
    mask: MaskTensor | None = None,
    truth: Tensor | None = None,
) -> tuple[Model, FitTrace]:
    """Matrix latent feature model: `fit` on a 2-mode tensor with the single subset {1}."""
    if X2.ndim != 2:
        raise TensorShapeError(f"matrix LFM needs a 2-mode tensor, got dims {X2.dims}")
    return fit(Objective(X2, mask), Partition((ModeSubset((1,)),)), cfg, truth=truth)


def snapshot(model: Model, trace: FitTrace, k: int) -> Model:
    """The model as it stood after iteration k (k = 0 is the empty model)."""
    if k == 0:
        return Model(model.dims)
    if not 1 <= k <= len(trace.records):
        raise FitError(f"no iteration {k} in a trace of {len(trace.records)} records")
    return Model(model.dims, list(model.atoms[:k]), np.array(trace.records[k - 1].coeffs))


def convergence_trend(trace: FitTrace) -> list[tuple[int, float]]:
    """(k, k * (F(W^k) - F(W^K_final))) for every recorded iteration."""
    if not trace.records:
        return []
    final = trace.records[-1].objective
    return [(r.iteration, r.iteration * (r.objective - final)) for r in trace.records]


def trend_is_bounded(trend: Sequence[tuple[int, float]], factor: float = 10.0) -> bool:
    """Soft check: max over k >= 2 stays within `factor` times the k = 2 value."""
    values = {k: t for k, t in trend}
    if 2 not in values:
        return True
    later = [t for k, t in trend if k >= 2]
    reference = values[2]
    if reference <= 0.0:
        return max(later) <= 0.0
    return max(later) <= factor * reference


# --- serialization -----------------------------------------------------------

def model_to_dict(model: Model, meta: dict | None = None) -> dict:
    return {
        "dims": list(model.dims),
        "atoms": [
            {
                "modes": list(a.subset.modes),
                "z": "".join(str(int(b)) for b in a.z),
                "v": [float(x) for x in a.v],
            }
            for a in model.atoms
        ],
        "coeffs": [float(c) for c in model.coeffs],
        "meta": meta if meta is not None else {},
    }


def model_from_dict(doc: dict) -> tuple[Model, dict]:
    try:
        atoms = [
            Atom(
                ModeSubset(tuple(a["modes"])),
                np.array([int(ch) for ch in a["z"]], dtype=np.int8),
                np.array(a["v"], dtype=np.float64),
            )
            for a in doc["atoms"]
        ]
        model = Model(tuple(doc["dims"]), atoms, np.array(doc["coeffs"], dtype=np.float64))
        for atom in model.atoms:
            atom.subset.check(len(model.dims))
            atom.flat(model.dims)  # validates extents
    except (KeyError, TypeError, ValueError, FitError) as e:
        raise ModelFormatError(f"malformed model document: {e}") from e
    return model, doc.get("meta", {})


def fit_meta(cfg: FitConfig, partition: Partition) -> dict:
    """Reproducibility metadata; worker count and debug paths do not affect results."""
    config = asdict(cfg)
    config.pop("workers")
    config.pop("dump_quadratic")
    return {"seed": cfg.seed, "partitions": partition.label(), "config": config}


def dumps_model(model: Model, meta: dict | None = None) -> str:
    return json.dumps(model_to_dict(model, meta), indent=2) + "\n"


def save_model(model: Model, path: str | Path, meta: dict | None = None) -> None:
    Path(path).write_text(dumps_model(model, meta), encoding="utf-8")


def load_model(path: str | Path) -> tuple[Model, dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"model file {path} is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ModelFormatError(f"model file {path} does not hold a JSON object")
    return model_from_dict(doc)


def dumps_trace(trace: FitTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for r in trace.records:
        writer.writerow([
            r.iteration,
            repr(r.objective),
            r.partition,
            repr(r.score),
            repr(r.c_l1),
            "" if r.rmse is None else repr(r.rmse),
        ])
    return buf.getvalue()


def write_trace_csv(trace: FitTrace, path: str | Path) -> None:
    Path(path).write_text(dumps_trace(trace), encoding="utf-8")
