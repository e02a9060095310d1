"""Closed-form matrix solvers: orthogonal Procrustes and least squares.

Everything follows the row-vector convention: maps act on the right, so a
row v is transformed as v @ matrix, and a fit minimizes ||A @ X - B||_F
over the rows of paired data. This convention matches the row-major
embedding matrices and is stated once here to avoid transposition bugs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSpace, format_component

ORTHOGONALITY_TOL = 1e-8


@dataclass
class LinearMap:
    """A d_in x d_out real matrix, optionally constrained orthogonal."""

    matrix: np.ndarray
    orthogonal: bool = False

    def __post_init__(self):
        matrix = np.ascontiguousarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError(f"map matrix must be 2-dimensional, got shape {matrix.shape}")
        if not np.isfinite(matrix).all():
            raise ValueError("map matrix contains non-finite entries")
        if self.orthogonal:
            d_in, d_out = matrix.shape
            if d_in != d_out:
                raise ValueError(f"orthogonal map must be square, got {d_in}x{d_out}")
            defect = np.abs(matrix.T @ matrix - np.eye(d_in)).max()
            if defect > ORTHOGONALITY_TOL:
                raise ValueError(f"matrix is not orthogonal: max |M'M - I| = {defect:.3e}")
        matrix.setflags(write=False)
        self.matrix = matrix

    @property
    def d_in(self) -> int:
        return self.matrix.shape[0]

    @property
    def d_out(self) -> int:
        return self.matrix.shape[1]


@dataclass
class PairedData:
    """Row-aligned input/target matrices assembled from translation pairs."""

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        self.inputs = np.ascontiguousarray(self.inputs, dtype=np.float64)
        self.targets = np.ascontiguousarray(self.targets, dtype=np.float64)
        if self.inputs.ndim != 2 or self.targets.ndim != 2:
            raise ValueError("paired data must be 2-dimensional matrices")
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ValueError(
                f"row count mismatch: {self.inputs.shape[0]} inputs vs "
                f"{self.targets.shape[0]} targets"
            )
        if self.inputs.shape[0] < 1:
            raise ValueError("paired data needs at least one row")

    def __len__(self) -> int:
        return self.inputs.shape[0]


def _require_finite(a: np.ndarray, what: str) -> None:
    if not np.isfinite(a).all():
        raise ValueError(f"{what} contain non-finite values")


def fit_procrustes(data: PairedData) -> LinearMap:
    """Best orthogonal map W minimizing ||A @ W - B||_F.

    Closed form: with U S V' the SVD of A'B, the minimizer is W = U V'.
    W is unique whenever A'B has no repeated singular values; ties yield
    one of the equally optimal solutions.
    """
    A, B = data.inputs, data.targets
    if A.shape[1] != B.shape[1]:
        raise ValueError(
            f"procrustes requires equal dimensions, got {A.shape[1]} and {B.shape[1]}"
        )
    _require_finite(A, "inputs")
    _require_finite(B, "targets")
    u, _, vt = np.linalg.svd(A.T @ B)
    return LinearMap(u @ vt, orthogonal=True)


def fit_least_squares(data: PairedData) -> LinearMap:
    """Unconstrained X minimizing sum_i ||a_i @ X - b_i||^2.

    Solved by SVD (numpy lstsq); rank-deficient systems return the
    minimum-Frobenius-norm minimizer rather than erroring.
    """
    A, B = data.inputs, data.targets
    _require_finite(A, "inputs")
    _require_finite(B, "targets")
    solution, *_ = np.linalg.lstsq(A, B, rcond=None)
    return LinearMap(solution, orthogonal=False)


def apply_map(linear_map: LinearMap, space: EmbeddingSpace) -> EmbeddingSpace:
    """Transform every row of a space: v -> v @ matrix. Vocab is unchanged."""
    if space.dim != linear_map.d_in:
        raise ValueError(
            f"map expects input dimension {linear_map.d_in}, space has {space.dim}"
        )
    return EmbeddingSpace(space.vocab, space.matrix @ linear_map.matrix)


def save_map(linear_map: LinearMap, path) -> None:
    """Write `<d_in> <d_out> <orthogonal:0|1>` then one row of floats per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{linear_map.d_in} {linear_map.d_out} {1 if linear_map.orthogonal else 0}\n")
        for row in linear_map.matrix:
            fh.write(" ".join(format_component(x) for x in row) + "\n")


def load_map(path) -> LinearMap:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3 or not all(p.isascii() and p.isdigit() for p in header):
            raise ValueError(f"{path}:1: expected header '<d_in> <d_out> <orthogonal:0|1>'")
        d_in, d_out, flag = (int(p) for p in header)
        if flag not in (0, 1):
            raise ValueError(f"{path}:1: orthogonal flag must be 0 or 1, got {flag}")
        rows = []
        for line_no, raw in enumerate(fh, start=2):
            parts = raw.split()
            if not parts:
                continue
            if len(parts) != d_out:
                raise ValueError(f"{path}:{line_no}: expected {d_out} entries, found {len(parts)}")
            rows.append([float(p) for p in parts])
    if len(rows) != d_in:
        raise ValueError(f"{path}: expected {d_in} matrix rows, found {len(rows)}")
    return LinearMap(np.array(rows, dtype=np.float64), orthogonal=bool(flag))
