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
Boolean quadratic maximization max_{z in {0,1}^p} z^T A z for PSD A = G G^T.

Pipeline used by `solve()`:
1. lift(): substitute y = 2z - 1 and a dummy sign y0, giving a +-1 quadratic with
   the (p+1)x(p+1) matrix C~ = [[1'A1, 1'A], [A1, A]] (value = y'C~y / 4).
2. mixing_solve(): low-rank coordinate ascent on max <C~, V'V> s.t. unit columns
   (the diagonally constrained SDP relaxation).
3. round_solution(): Gaussian hyperplane rounding, best of N trials, each polished
   with 1-opt coordinate flips.
4. to_binary(): undo the lift (global sign flip so y0 = +1).

`brute_force()` enumerates all 2^p assignments and is the test oracle.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tensor_core import write_csv_matrix

logger = logging.getLogger("bmpfit.boolquad")

DEFAULT_MAX_SWEEPS = 200
DEFAULT_SDP_TOL = 1e-6
# consecutive sweeps below the per-column tolerance before the mixing method stops
STALL_SWEEPS = 3
# slack of the rounded value over the relaxation bound before a converged run is flagged
SANDWICH_RTOL = 1e-4
DEFAULT_ROUNDING_TRIALS = 100
BRUTE_FORCE_MAX_P = 20
SYMMETRY_TOL = 1e-12
_BRUTE_FORCE_CHUNK = 1 << 15


class BoolQuadError(ValueError):
    """Raised for malformed Boolean quadratic inputs or solver settings."""
    pass


def default_rank(p: int) -> int:
    """ceil(sqrt(2(p+1))) + 1, above the Barvinok-Pataki bound for p+1 unit columns."""
    return math.ceil(math.sqrt(2 * (p + 1))) + 1


@dataclass(frozen=True)
class SdpSolverConfig:
    rank: int | None = None  # None -> default_rank(p)
    max_sweeps: int = DEFAULT_MAX_SWEEPS
    tol: float = DEFAULT_SDP_TOL
    rounding_trials: int = DEFAULT_ROUNDING_TRIALS
    one_opt: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.rank is not None and self.rank < 2:
            raise BoolQuadError(f"rank must be >= 2, got {self.rank}")
        if self.max_sweeps < 1:
            raise BoolQuadError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if not self.tol > 0:
            raise BoolQuadError(f"tol must be > 0, got {self.tol}")
        if self.rounding_trials < 1:
            raise BoolQuadError(f"rounding_trials must be >= 1, got {self.rounding_trials}")
        if self.seed < 0:
            raise BoolQuadError(f"seed must be non-negative, got {self.seed}")

    def rank_for(self, p: int) -> int:
        return self.rank if self.rank is not None else default_rank(p)


@dataclass(frozen=True)
class MaxCutLift:
    ctilde: np.ndarray = field(repr=False)

    @property
    def p(self) -> int:
        return self.ctilde.shape[0] - 1


@dataclass
class MixingResult:
    """Column-normalized factor V (rank x (p+1)) and the sweep history of <C~, V'V>."""
    factor: np.ndarray
    objective: float
    history: list[float]
    sweeps: int
    converged: bool


@dataclass
class BoolQuadSolution:
    z: np.ndarray
    value: float
    zero_gradient: bool = False
    sdp_objective: float | None = None  # <C~, V'V>; None for the exhaustive path
    method: str = "mixing"


def _as_symmetric(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise BoolQuadError(f"expected a nonempty square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))))
    if not np.allclose(A, A.T, rtol=0.0, atol=SYMMETRY_TOL * scale):
        raise BoolQuadError("matrix is not symmetric")
    return A


def quadratic_value(A, z) -> float:
    z = np.asarray(z, dtype=np.float64)
    return float(z @ np.asarray(A, dtype=np.float64) @ z)


def lift(A) -> MaxCutLift:
    A = _as_symmetric(A)
    p = A.shape[0]
    row = A.sum(axis=0)
    ctilde = np.empty((p + 1, p + 1))
    ctilde[0, 0] = row.sum()
    ctilde[0, 1:] = row
    ctilde[1:, 0] = row
    ctilde[1:, 1:] = A
    return MaxCutLift(ctilde=ctilde)


def _sdp_objective(C: np.ndarray, V: np.ndarray) -> float:
    return float(np.sum(C * (V.T @ V)))


def mixing_solve(ctilde, cfg: SdpSolverConfig) -> MixingResult:
    """Cyclic coordinate ascent over the columns of V (mixing method).

    Each column update v_i <- g / ||g|| with g = sum_{j != i} C~_ij v_j is the exact
    maximizer over the unit sphere, so the objective never decreases. The run stops
    once STALL_SWEEPS consecutive sweeps each change the objective by at most
    tol * max(1, |objective|) / n, i.e. cfg.tol per column of V.
    """
    C = np.asarray(ctilde, dtype=np.float64)
    n = C.shape[0]
    rank = cfg.rank_for(n - 1)
    rng = np.random.default_rng(cfg.seed)
    V = rng.standard_normal((rank, n))
    V /= np.linalg.norm(V, axis=0, keepdims=True)

    objective = _sdp_objective(C, V)
    history = [objective]
    converged = False
    sweeps = 0
    quiet = 0
    for sweeps in range(1, cfg.max_sweeps + 1):
        for i in range(n):
            g = V @ C[:, i] - C[i, i] * V[:, i]
            norm = np.linalg.norm(g)
            if norm <= 1e-300:
                continue
            V[:, i] = g / norm
        new_objective = _sdp_objective(C, V)
        if new_objective < objective - 1e-9 * max(1.0, abs(objective)):
            logger.warning(f"Mixing objective decreased on sweep {sweeps}: {objective} -> {new_objective}")
        change = abs(new_objective - objective)
        objective = new_objective
        history.append(objective)
        quiet = quiet + 1 if change <= cfg.tol * max(1.0, abs(objective)) / n else 0
        if quiet >= STALL_SWEEPS:
            converged = True
            break
    logger.debug(f"Mixing method: n={n} rank={rank} sweeps={sweeps} objective={objective:.6g} converged={converged}")
    return MixingResult(factor=V, objective=objective, history=history, sweeps=sweeps, converged=converged)


def _one_opt(C: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Steepest single-coordinate flips until no flip increases y'C y."""
    y = y.astype(np.float64)
    Cy = C @ y
    value = float(y @ Cy)
    diag = np.diag(C)
    eps = 1e-12 * max(1.0, float(np.max(np.abs(C))))
    while True:
        gains = 4.0 * (diag - y * Cy)
        i = int(np.argmax(gains))
        if gains[i] <= eps:
            break
        Cy -= 2.0 * y[i] * C[:, i]
        y[i] = -y[i]
        value += float(gains[i])
    return y, float(y @ Cy)


def _rounding_candidates(V: np.ndarray, C: np.ndarray, cfg: SdpSolverConfig) -> list[tuple[float, int, np.ndarray]]:
    """One (value, trial, y) per trial; trial t draws its hyperplane from seed ^ t."""
    candidates = []
    for t in range(cfg.rounding_trials):
        rng = np.random.default_rng(cfg.seed ^ t)
        r = rng.standard_normal(V.shape[0])
        y = np.where(V.T @ r >= 0.0, 1.0, -1.0)
        if cfg.one_opt:
            y, value = _one_opt(C, y)
        else:
            value = float(y @ C @ y)
        candidates.append((value, t, y))
    return candidates


def _best(candidates):
    # max value, ties -> lowest trial index
    return min(candidates, key=lambda c: (-c[0], c[1]))


def round_solution(V, ctilde, cfg: SdpSolverConfig) -> tuple[np.ndarray, float]:
    """Best hyperplane rounding of the factor V; returns (y in {-1,1}^{p+1}, y'C~y)."""
    C = np.asarray(ctilde, dtype=np.float64)
    value, trial, y = _best(_rounding_candidates(np.asarray(V), C, cfg))
    logger.debug(f"Rounding: best trial {trial} of {cfg.rounding_trials}, value {value:.6g}")
    return y.astype(np.int8), value


def to_binary(y) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1 or y.size < 2 or not np.all((y == 1) | (y == -1)):
        raise BoolQuadError("expected a sign vector in {-1, 1}^(p+1)")
    if y[0] == -1:
        y = -y
    return ((1 + y[1:]) // 2).astype(np.int8)


def brute_force(A) -> tuple[np.ndarray, float]:
    """Exact maximizer over all 2^p assignments.

    z_1 is the least significant bit of the encoding; ties go to the lowest code.
    """
    A = _as_symmetric(A)
    p = A.shape[0]
    if p > BRUTE_FORCE_MAX_P:
        raise BoolQuadError(f"brute force is limited to p <= {BRUTE_FORCE_MAX_P}, got p={p}")
    bits = np.arange(p)
    best_code, best_value = 0, -np.inf
    for start in range(0, 1 << p, _BRUTE_FORCE_CHUNK):
        codes = np.arange(start, min(start + _BRUTE_FORCE_CHUNK, 1 << p))
        Z = ((codes[:, None] >> bits) & 1).astype(np.float64)
        values = np.einsum("ij,jk,ik->i", Z, A, Z)
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_code, best_value = int(codes[i]), float(values[i])
    z = ((best_code >> bits) & 1).astype(np.int8)
    return z, quadratic_value(A, z)


def _trim_zero_rows(A: np.ndarray, z: np.ndarray) -> np.ndarray:
    # A_ii = 0 on a PSD matrix means row i of A is zero, so z_i contributes nothing.
    z = z.copy()
    z[np.diag(A) == 0.0] = 0
    return z


def solve(A, cfg: SdpSolverConfig) -> BoolQuadSolution:
    """Approximate max z'Az through the lift, mixing SDP and rounding.

    z = 0 is only returned (with zero_gradient=True) when no nonzero candidate has
    positive value, which for PSD A means A = 0.
    """
    A = _as_symmetric(A)
    p = A.shape[0]
    if not np.any(A):
        return BoolQuadSolution(z=np.zeros(p, dtype=np.int8), value=0.0, zero_gradient=True, sdp_objective=0.0)

    lifted = lift(A)
    mixing = mixing_solve(lifted.ctilde, cfg)
    candidates = _rounding_candidates(mixing.factor, lifted.ctilde, cfg)

    best_z, best_value = None, -np.inf
    for value, trial, y in sorted(candidates, key=lambda c: (-c[0], c[1])):
        z = _trim_zero_rows(A, to_binary(y.astype(np.int8)))
        if np.any(z):
            best_z, best_value = z, quadratic_value(A, z)
            logger.debug(f"Rounding: trial {trial} wins with value {best_value:.6g}")
            break

    # Single-coordinate fallback: PSD and nonzero implies some A_ii > 0.
    i = int(np.argmax(np.diag(A)))
    if best_z is None or A[i, i] > best_value:
        best_z = np.zeros(p, dtype=np.int8)
        best_z[i] = 1
        best_value = float(A[i, i])

    if best_value <= 0.0:
        return BoolQuadSolution(z=np.zeros(p, dtype=np.int8), value=0.0, zero_gradient=True,
                                sdp_objective=mixing.objective / 4.0)

    bound = mixing.objective / 4.0
    if best_value > bound + SANDWICH_RTOL * max(1.0, abs(bound)):
        if mixing.converged:
            logger.warning(f"Rounded value {best_value!r} exceeds converged SDP objective {bound!r}")
        else:
            logger.debug(f"Rounded value {best_value:.6g} above SDP objective {bound:.6g} after "
                         f"{mixing.sweeps} sweeps without convergence")
    return BoolQuadSolution(z=best_z, value=best_value, sdp_objective=bound)


def solve_exhaustive(A) -> BoolQuadSolution:
    """`brute_force` wrapped in the same result type as `solve`."""
    A = _as_symmetric(A)
    z, value = brute_force(A)
    z = _trim_zero_rows(A, z)
    if value <= 0.0 or not np.any(z):
        return BoolQuadSolution(z=np.zeros(A.shape[0], dtype=np.int8), value=0.0,
                                zero_gradient=True, method="exhaustive")
    return BoolQuadSolution(z=z, value=quadratic_value(A, z), method="exhaustive")


def dump_quadratic(A, directory: str | Path, tag: str) -> tuple[Path, Path]:
    """Write A and its lift as CSV (A_<tag>.csv, Ctilde_<tag>.csv) for debugging."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    a_path, c_path = out / f"A_{tag}.csv", out / f"Ctilde_{tag}.csv"
    write_csv_matrix(A, a_path)
    write_csv_matrix(lift(A).ctilde, c_path)
    return a_path, c_path
