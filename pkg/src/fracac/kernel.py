"""Fractional-difference kernels: coefficient tables and per-direction operators.

The spatial discretization lives here.  A fractional centered difference with
weights ``c_0, c_1, ...`` approximates the one-dimensional Riesz derivative of
order ``alpha`` on a uniform grid; a compact three-point average lifts it from
second to fourth order.  :func:`assemble_direction` bakes both into dense
interior matrices for one grid direction, together with a reusable LU
factorization of the implicit matrix, so that the ADI stepper can sweep grid
pencils with plain matrix products and back-substitutions.

Lines ("pencils") are arrays of length ``m + 1`` that include the two boundary
entries; solution lines carry homogeneous Dirichlet values, i.e. zero at both
ends.  All matrices act on the ``m - 1`` interior unknowns only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve, matmul_toeplitz, toeplitz

__all__ = [
    "CoefficientTable",
    "DirectionOperator",
    "build_coefficients",
    "averaging_weights",
    "apply_frac_difference",
    "apply_averaging",
    "assemble_direction",
    "solve_line",
    "apply_explicit",
    "apply_explicit_fast",
    "apply_matrix_along_axis",
    "apply_explicit_along_axis",
    "solve_along_axis",
    "apply_averaging_along_axis",
]


@dataclass(frozen=True)
class CoefficientTable:
    """Fractional centered-difference weights ``c_0 .. c_{n_max}``.

    Only the non-negative half is stored; the weights are symmetric,
    ``c_{-s} = c_s``.  Properties (for 1 < alpha <= 2): ``c_0 > 0``,
    ``c_s <= 0`` for ``s >= 1``, and ``sum(2 |c_s|) < c_0``.
    """

    alpha: float
    coeffs: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 1.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (1, 2], got {alpha}")
    return alpha


def build_coefficients(alpha: float, n_max: int) -> CoefficientTable:
    """Generate ``c_0 .. c_{n_max}`` by the downward recurrence.

    ``c_0 = Gamma(alpha+1) / Gamma(alpha/2+1)^2`` is evaluated directly (its
    arguments never exceed 3, so overflow is impossible and alpha = 2 yields
    exactly 2.0), then ``c_s = (1 - (alpha+1)/(alpha/2+s)) c_{s-1}``.
    """
    alpha = _check_alpha(alpha)
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    c = np.empty(n_max + 1)
    c[0] = math.gamma(alpha + 1.0) / math.gamma(alpha / 2.0 + 1.0) ** 2
    s = np.arange(1, n_max + 1, dtype=float)
    c[1:] = c[0] * np.cumprod(1.0 - (alpha + 1.0) / (alpha / 2.0 + s))
    c += 0.0  # normalize -0.0 entries produced by the cumprod at alpha = 2
    c.setflags(write=False)
    return CoefficientTable(alpha=alpha, coeffs=c)


def averaging_weights(alpha: float) -> tuple[float, float]:
    """Center and neighbor weights ``(1 - alpha/12, alpha/24)`` of the compact average."""
    alpha = _check_alpha(alpha)
    return 1.0 - alpha / 12.0, alpha / 24.0


def apply_frac_difference(table: CoefficientTable, line: np.ndarray) -> np.ndarray:
    """Apply the fractional difference to one line.

    ``out[i] = -sum_{s=1..m-1} c_{|i-s|} line[s]`` at interior nodes; the
    boundary entries of the output are zero.  Reduces to the classical second
    difference at alpha = 2.
    """
    line = np.asarray(line, dtype=float)
    n = len(line) - 2  # interior unknowns
    if n < 1:
        raise ValueError("line must have at least one interior node")
    if n - 1 > table.n_max:
        raise ValueError(
            f"coefficient table (n_max={table.n_max}) too short for line of length {len(line)}"
        )
    c = table.coeffs
    kernel = np.concatenate([c[n - 1:0:-1], c[:n]]) if n > 1 else c[:1]
    out = np.zeros_like(line)
    out[1:-1] = -np.convolve(line[1:-1], kernel)[n - 1:2 * n - 1]
    return out


def apply_averaging(alpha: float, line: np.ndarray) -> np.ndarray:
    """Apply the compact three-point average to one line.

    Interior values are ``w1*line[i-1] + w0*line[i] + w1*line[i+1]`` with the
    weights of :func:`averaging_weights`; boundary entries of the output are
    zero.  The stencil does read the input's boundary entries, which matters
    when averaging source-term samples (nonzero on the boundary).
    """
    w0, w1 = averaging_weights(alpha)
    line = np.asarray(line, dtype=float)
    if len(line) < 3:
        raise ValueError("line must have at least one interior node")
    out = np.zeros_like(line)
    out[1:-1] = w1 * line[:-2] + w0 * line[1:-1] + w1 * line[2:]
    return out


@dataclass(frozen=True)
class DirectionOperator:
    """Assembled interior matrices for one grid direction.

    ``explicit_matrix`` is ``A + beta*C`` (order 4) or ``I + beta*C``
    (order 2); the implicit counterpart ``A - beta*C`` is kept both dense and
    LU-factorized.  ``C`` is the symmetric Toeplitz fractional-difference
    matrix with entries ``-c_{|i-j|}``, ``A`` the compact average, and
    ``beta = dt*eps^2 / (2 h^alpha)``.  Immutable after assembly; safe to
    share across workers, and one factorization serves every pencil of every
    time step.
    """

    m: int
    h: float
    alpha: float
    beta: float
    spatial_order: int
    explicit_matrix: np.ndarray
    implicit_matrix: np.ndarray
    lu: np.ndarray
    piv: np.ndarray

    @property
    def explicit_first_column(self) -> np.ndarray:
        return self.explicit_matrix[:, 0]


def assemble_direction(
    alpha: float,
    eps: float,
    dt: float,
    h: float,
    m: int,
    spatial_order: int = 4,
) -> DirectionOperator:
    """Build the per-direction explicit matrix and factorized implicit matrix.

    ``m`` is the number of grid intervals along the axis (``m - 1`` interior
    unknowns; the degenerate ``m = 2`` gives 1x1 matrices).  ``eps = 0`` is
    accepted and forces ``beta = 0``.
    """
    alpha = _check_alpha(alpha)
    m = int(m)
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if eps < 0.0:
        raise ValueError(f"eps must be non-negative, got {eps}")
    if h <= 0.0:
        raise ValueError(f"h must be positive, got {h}")
    if spatial_order not in (2, 4):
        raise ValueError(f"spatial_order must be 2 or 4, got {spatial_order}")

    n = m - 1
    beta = dt * eps * eps / (2.0 * h ** alpha)
    table = build_coefficients(alpha, max(1, n - 1))
    C = -toeplitz(table.coeffs[:n])
    if spatial_order == 4:
        w0, w1 = averaging_weights(alpha)
        A = w0 * np.eye(n)
        if n > 1:
            off = np.full(n - 1, w1)
            A += np.diag(off, 1) + np.diag(off, -1)
    else:
        A = np.eye(n)
    explicit = A + beta * C
    implicit = A - beta * C
    lu, piv = lu_factor(implicit)  # strictly diagonally dominant, never singular
    for arr in (explicit, implicit, lu, piv):
        arr.setflags(write=False)
    return DirectionOperator(
        m=m,
        h=float(h),
        alpha=alpha,
        beta=beta,
        spatial_order=spatial_order,
        explicit_matrix=explicit,
        implicit_matrix=implicit,
        lu=lu,
        piv=piv,
    )


def solve_line(op: DirectionOperator, rhs: np.ndarray) -> np.ndarray:
    """Solve ``(A - beta*C) x = rhs`` on the interior of one line.

    The rhs boundary entries must be zero; the output carries zero boundaries.
    """
    rhs = np.asarray(rhs, dtype=float)
    if len(rhs) != op.m + 1:
        raise ValueError(f"rhs length {len(rhs)} does not match operator (m={op.m})")
    if rhs[0] != 0.0 or rhs[-1] != 0.0:
        raise ValueError("rhs boundary entries must be zero")
    out = np.zeros_like(rhs)
    out[1:-1] = lu_solve((op.lu, op.piv), rhs[1:-1])
    return out


def apply_explicit(op: DirectionOperator, line: np.ndarray) -> np.ndarray:
    """Dense application of the explicit matrix to one line (boundary zero out)."""
    line = np.asarray(line, dtype=float)
    if len(line) != op.m + 1:
        raise ValueError(f"line length {len(line)} does not match operator (m={op.m})")
    out = np.zeros_like(line)
    out[1:-1] = op.explicit_matrix @ line[1:-1]
    return out


def apply_explicit_fast(op: DirectionOperator, line: np.ndarray) -> np.ndarray:
    """FFT (circulant-embedding) application of the explicit matrix.

    Same contract as :func:`apply_explicit`; the explicit matrix is symmetric
    Toeplitz, so its action is a convolution.
    """
    line = np.asarray(line, dtype=float)
    if len(line) != op.m + 1:
        raise ValueError(f"line length {len(line)} does not match operator (m={op.m})")
    col = op.explicit_first_column
    out = np.zeros_like(line)
    out[1:-1] = matmul_toeplitz((col, col), line[1:-1])
    return out


def apply_matrix_along_axis(matrix: np.ndarray, values: np.ndarray, axis: int) -> np.ndarray:
    """Apply a dense matrix to every pencil of ``values`` along ``axis``."""
    moved = np.moveaxis(values, axis, 0)
    shape = moved.shape
    out = (matrix @ moved.reshape(shape[0], -1)).reshape(shape)
    return np.moveaxis(out, 0, axis)


def apply_explicit_along_axis(
    op: DirectionOperator, values: np.ndarray, axis: int, fast: bool = False
) -> np.ndarray:
    """Apply the explicit matrix to every interior pencil along ``axis``."""
    if not fast:
        return apply_matrix_along_axis(op.explicit_matrix, values, axis)
    moved = np.moveaxis(values, axis, 0)
    shape = moved.shape
    col = op.explicit_first_column
    out = matmul_toeplitz((col, col), moved.reshape(shape[0], -1)).reshape(shape)
    return np.moveaxis(out, 0, axis)


def solve_along_axis(op: DirectionOperator, values: np.ndarray, axis: int) -> np.ndarray:
    """Solve the factorized implicit system for every pencil along ``axis``."""
    moved = np.moveaxis(values, axis, 0)
    shape = moved.shape
    out = lu_solve((op.lu, op.piv), moved.reshape(shape[0], -1)).reshape(shape)
    return np.moveaxis(out, 0, axis)


def apply_averaging_along_axis(
    alpha: float, values: np.ndarray, axis: int, spatial_order: int = 4
) -> np.ndarray:
    """Compact average along one axis of a full-grid array.

    Writes the three-point stencil at the axis' interior positions (reading
    the face samples, which may be nonzero for source terms) and zeroes the
    axis' own faces.  At order 2 the average is the identity.
    """
    if spatial_order == 2:
        return values
    w0, w1 = averaging_weights(alpha)
    moved = np.moveaxis(values, axis, 0)
    out = np.zeros_like(moved)
    out[1:-1] = w1 * moved[:-2] + w0 * moved[1:-1] + w1 * moved[2:]
    return np.moveaxis(out, 0, axis)
