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
Dense L-mode tensors and generalized unfoldings.

Every tensor stores its entries as a flat float64 vector in a fixed layout where
the earliest mode index varies fastest (Fortran order). Unfolding over a mode
subset S puts the modes of S (ascending, earliest fastest) on the rows and the
complement S^c (same rule) on the columns.

Also home to the TLT1 binary container and the 2-mode CSV importer.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger("bmpfit.tensor")

TLT_MAGIC = b"TLT1"
MAX_MODES = 255


class TensorShapeError(ValueError):
    """Raised for invalid extents, mode subsets, or mismatched dimensions."""
    pass


class TensorFormatError(ValueError):
    """Raised when a TLT1 or CSV artifact cannot be decoded."""
    pass


def _check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if not out:
        raise TensorShapeError("a tensor needs at least one mode")
    if len(out) > MAX_MODES:
        raise TensorShapeError(f"at most {MAX_MODES} modes are supported, got {len(out)}")
    bad = [d for d in out if d < 1]
    if bad:
        raise TensorShapeError(f"every extent must be >= 1, got dims {out}")
    return out


@dataclass(frozen=True, eq=False)
class Tensor:
    """Immutable dense tensor: extents plus a flat Fortran-ordered float64 payload."""
    dims: tuple[int, ...]
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        data = np.array(self.data, dtype=np.float64, copy=True).reshape(-1)
        if data.size != math.prod(dims):
            raise TensorShapeError(
                f"data length {data.size} does not match product of dims {dims} ({math.prod(dims)})"
            )
        data.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, array) -> "Tensor":
        """Wrap an L-dimensional numpy array (index [i1, ..., iL], 0-based)."""
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim == 0:
            raise TensorShapeError("scalars are not tensors; reshape to (1,) first")
        return cls(arr.shape, arr.reshape(-1, order="F"))

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "Tensor":
        dims = _check_dims(dims)
        return cls(dims, np.zeros(math.prod(dims)))

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return self.data.size

    def as_array(self) -> np.ndarray:
        """Read-only L-dimensional view with 0-based index [i1, ..., iL]."""
        return self.data.reshape(self.dims, order="F")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class MaskTensor(Tensor):
    """Observation indicator tensor: 1.0 observed, 0.0 missing."""

    def __post_init__(self):
        super().__post_init__()
        if not np.all((self.data == 0.0) | (self.data == 1.0)):
            raise TensorFormatError("mask entries must be exactly 0 or 1")

    @classmethod
    def ones(cls, dims: Sequence[int]) -> "MaskTensor":
        dims = _check_dims(dims)
        return cls(dims, np.ones(math.prod(dims)))

    @property
    def observed(self) -> np.ndarray:
        """Boolean vector over the flat layout, True where observed."""
        return self.data == 1.0

    @property
    def n_observed(self) -> int:
        return int(np.count_nonzero(self.data))


@dataclass(frozen=True)
class ModeSubset:
    """Strictly increasing 1-based mode indices placed on the rows of an unfolding."""
    modes: tuple[int, ...]

    def __post_init__(self):
        modes = tuple(int(m) for m in self.modes)
        if not modes:
            raise TensorShapeError("mode subset must not be empty")
        if any(m < 1 for m in modes):
            raise TensorShapeError(f"mode indices are 1-based, got {modes}")
        if any(b <= a for a, b in zip(modes, modes[1:])):
            raise TensorShapeError(f"mode indices must be strictly increasing, got {modes}")
        object.__setattr__(self, "modes", modes)

    def check(self, ndim: int) -> None:
        """Validate against an L-mode tensor: indices in [1, L] and a nonempty complement."""
        if self.modes[-1] > ndim:
            raise TensorShapeError(f"mode {self.modes[-1]} out of range for a {ndim}-mode tensor")
        if len(self.modes) >= ndim:
            raise TensorShapeError(
                f"subset {self.label()} leaves an empty complement on a {ndim}-mode tensor"
            )

    def complement(self, ndim: int) -> tuple[int, ...]:
        self.check(ndim)
        return tuple(m for m in range(1, ndim + 1) if m not in self.modes)

    def row_extent(self, dims: Sequence[int]) -> int:
        return math.prod(dims[m - 1] for m in self.modes)

    def col_extent(self, dims: Sequence[int]) -> int:
        return math.prod(dims[m - 1] for m in self.complement(len(dims)))

    def label(self) -> str:
        return ",".join(str(m) for m in self.modes)


def _axis_order(subset: ModeSubset, ndim: int) -> list[int]:
    return [m - 1 for m in subset.modes] + [m - 1 for m in subset.complement(ndim)]


def unfold(X: Tensor, subset: ModeSubset) -> Tensor:
    """Generalized unfolding: p x q matrix with p over S and q over S^c."""
    order = _axis_order(subset, X.ndim)
    p = subset.row_extent(X.dims)
    q = X.size // p
    matrix = np.transpose(X.as_array(), order).reshape((p, q), order="F")
    return Tensor.from_array(matrix)


def refold(M: Tensor, subset: ModeSubset, dims: Sequence[int]) -> Tensor:
    """Exact inverse of `unfold` for the given subset and target extents."""
    dims = _check_dims(dims)
    order = _axis_order(subset, len(dims))
    p = subset.row_extent(dims)
    q = math.prod(dims) // p
    if M.ndim != 2 or M.dims != (p, q):
        raise TensorShapeError(
            f"matrix dims {M.dims} do not match unfolding {subset.label()} of {dims} (expected {(p, q)})"
        )
    permuted = M.as_array().reshape([dims[a] for a in order], order="F")
    return Tensor.from_array(np.transpose(permuted, np.argsort(order)))


def _require_same_dims(X: Tensor, Y: Tensor, what: str) -> None:
    if X.dims != Y.dims:
        raise TensorShapeError(f"{what}: dims {X.dims} and {Y.dims} differ")


def inner(X: Tensor, Y: Tensor) -> float:
    _require_same_dims(X, Y, "inner")
    return float(np.dot(X.data, Y.data))


def frobenius_norm(X: Tensor) -> float:
    return float(np.linalg.norm(X.data))


def apply_mask(X: Tensor, mask: MaskTensor) -> Tensor:
    """Entry-wise X*mask; unobserved entries become +0.0."""
    _require_same_dims(X, mask, "apply_mask")
    return Tensor(X.dims, np.where(mask.observed, X.data, 0.0))


def axpy(a: float, X: Tensor, Y: Tensor) -> Tensor:
    """Return Y + a*X."""
    _require_same_dims(X, Y, "axpy")
    return Tensor(X.dims, Y.data + a * X.data)


def vec(X: Tensor) -> np.ndarray:
    """Flat copy of the entries in the fixed layout."""
    return X.data.copy()


# --- TLT1 container ----------------------------------------------------------

def encode_tlt(X: Tensor) -> bytes:
    header = TLT_MAGIC + np.uint8(X.ndim).tobytes() + np.asarray(X.dims, dtype="<u4").tobytes()
    return header + np.asarray(X.data, dtype="<f8").tobytes()


def decode_tlt(payload: bytes) -> Tensor:
    if len(payload) < 5 or payload[:4] != TLT_MAGIC:
        raise TensorFormatError("not a TLT1 file (bad magic)")
    ndim = payload[4]
    if ndim < 1:
        raise TensorFormatError("TLT1 header declares zero modes")
    header_end = 5 + 4 * ndim
    if len(payload) < header_end:
        raise TensorFormatError("TLT1 header truncated")
    dims = tuple(int(d) for d in np.frombuffer(payload[5:header_end], dtype="<u4"))
    expected = header_end + 8 * math.prod(dims)
    if len(payload) != expected:
        raise TensorFormatError(
            f"TLT1 payload length {len(payload)} does not match dims {dims} (expected {expected})"
        )
    data = np.frombuffer(payload[header_end:], dtype="<f8")
    try:
        return Tensor(dims, data)
    except TensorShapeError as e:
        raise TensorFormatError(f"TLT1 header is invalid: {e}") from e


def write_tensor(X: Tensor, path: str | Path) -> None:
    Path(path).write_bytes(encode_tlt(X))


def read_tensor(path: str | Path) -> Tensor:
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return read_csv_matrix(p)
    return decode_tlt(p.read_bytes())


def read_mask(path: str | Path) -> MaskTensor:
    X = read_tensor(path)
    return MaskTensor(X.dims, X.data)


def read_csv_matrix(path: str | Path) -> Tensor:
    """2-mode tensor from CSV, one row per first-mode index."""
    try:
        rows = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise TensorFormatError(f"could not parse CSV {path}: {e}") from e
    if rows.size == 0:
        raise TensorFormatError(f"CSV {path} is empty")
    logger.debug(f"Read {rows.shape[0]}x{rows.shape[1]} matrix from {path}")
    return Tensor.from_array(rows)


def write_csv_matrix(matrix, path: str | Path) -> None:
    np.savetxt(path, np.atleast_2d(np.asarray(matrix, dtype=np.float64)), delimiter=",", fmt="%.17g")
