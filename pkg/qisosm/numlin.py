"""Dense complex linear algebra used by all other modules.

All tensor products are row-major with the left factor major: the basis
vector e_i ⊗ e_j of C^m ⊗ C^n has the flat index i·n + j. Block matrices
follow the same convention, the block (i, j) of a matrix with block
dimension d occupies rows i·d..(i+1)·d and columns j·d..(j+1)·d.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from collections.abc import Callable, Sequence
from typing import NamedTuple, Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg

from . import common
from .log import logger


def as_cmatrix(a: npt.ArrayLike, name: str = "matrix") -> common.CMatrix:
    """Convert the argument into a finite, two-dimensional complex array.

    :param a: The matrix.
    :param name: Name used in error messages.
    :return: The matrix as array of dtype complex128.
    :raises ShapeError: If the argument is not two-dimensional.
    :raises ContractError: If an entry is not finite.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise common.ShapeError(f"{name} must be two-dimensional, got shape {m.shape}.")
    if not np.all(np.isfinite(m)):
        raise common.ContractError(f"{name} contains NaN or infinite entries.")
    return m


def frobenius(a: npt.ArrayLike) -> float:
    """Frobenius norm of an array of any shape."""
    return float(np.linalg.norm(np.ravel(a)))


def commutator(a: npt.NDArray, b: npt.NDArray) -> npt.NDArray:
    """Return ab - ba."""
    return a @ b - b @ a


def kron(*factors: npt.ArrayLike, cap: int = common.MAX_DIMENSION) -> common.CMatrix:
    """Kronecker product of any number of matrices.

    The product is folded from the left, so the result of a given list of
    factors is always computed in the same order.

    :param factors: The matrices, left factor major.
    :param cap: Largest allowed number of rows or columns of the result.
    :return: The Kronecker product.
    :raises SizeError: If the result would exceed the cap.
    """
    if not factors:
        return np.ones((1, 1), dtype=np.complex128)

    mats = [as_cmatrix(f, "Kronecker factor") for f in factors]
    rows = math.prod(m.shape[0] for m in mats)
    cols = math.prod(m.shape[1] for m in mats)
    if rows > cap or cols > cap:
        raise common.SizeError(
            f"Kronecker product of shape ({rows}, {cols}) exceeds the cap of {cap}."
        )

    return functools.reduce(np.kron, mats)


class Involutions(NamedTuple):
    """The three involutions of a complex matrix."""

    transpose: common.CMatrix
    conjugate: common.CMatrix
    adjoint: common.CMatrix


def involutions(a: npt.ArrayLike) -> Involutions:
    """Return transpose, entrywise conjugate and adjoint of a matrix."""
    m = as_cmatrix(a)
    conjugate = m.conj()
    return Involutions(m.T.copy(), conjugate, conjugate.T.copy())


def promote(s: npt.ArrayLike, d: int) -> common.CMatrix:
    """Promote a scalar matrix to a block matrix: each entry c becomes c·I_d."""
    return kron(s, np.eye(d))


def unitarity_residual(a: npt.ArrayLike) -> float:
    """Return max(‖AA* - I‖, ‖A*A - I‖)."""
    m = as_cmatrix(a)
    if m.shape[0] != m.shape[1]:
        raise common.ShapeError(f"Unitarity needs a square matrix, got {m.shape}.")
    eye = np.eye(m.shape[0])
    adj = m.conj().T
    return max(frobenius(m @ adj - eye), frobenius(adj @ m - eye))


def is_unitary(a: npt.ArrayLike, tol: float = common.DEFAULT_TOLERANCE) -> bool:
    """Check if a square matrix is unitary at the given tolerance."""
    m = as_cmatrix(a)
    return unitarity_residual(m) < common.threshold(tol, m.shape[0])


def hermiticity_residual(a: npt.ArrayLike) -> float:
    """Return ‖A - A*‖."""
    m = as_cmatrix(a)
    return frobenius(m - m.conj().T)


@dataclasses.dataclass(frozen=True, eq=False)
class BlockMatrix:
    """Matrix whose entries are elements of the algebra of d×d matrices.

    An element of M_R(B) for B = M_d(C) is stored as the matrix 'data' of
    size (R·d)×(C·d), the entry (i, j) being the block (i, j).
    """

    data: common.CMatrix

    block_rows: int

    block_cols: int

    block_dim: int

    def __post_init__(self) -> None:  # noqa: D105
        expected = (
            self.block_rows * self.block_dim,
            self.block_cols * self.block_dim,
        )
        if self.data.shape != expected:
            raise common.ShapeError(
                f"Block matrix data has shape {self.data.shape}, "
                f"expected {expected} for a {self.block_rows}×{self.block_cols} "
                f"grid of blocks of dimension {self.block_dim}."
            )

    @classmethod
    def from_blocks(cls, blocks: npt.ArrayLike) -> BlockMatrix:
        """Create a block matrix from an array of shape (R, C, d, d).

        A two-dimensional array is taken as matrix of scalars (d = 1).
        """
        arr = np.asarray(blocks, dtype=np.complex128)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis, np.newaxis]
        if arr.ndim != 4 or arr.shape[2] != arr.shape[3]:
            raise common.ShapeError(
                f"Blocks must have shape (rows, cols, d, d), got {arr.shape}."
            )
        r, c, d, _ = arr.shape
        data = arr.transpose(0, 2, 1, 3).reshape(r * d, c * d)
        return cls(as_cmatrix(data, "block matrix"), r, c, d)

    @classmethod
    def from_matrix(cls, data: npt.ArrayLike, block_dim: int) -> BlockMatrix:
        """View a matrix as grid of blocks of the given dimension."""
        m = as_cmatrix(data, "block matrix")
        rows, cols = m.shape
        if rows % block_dim or cols % block_dim:
            raise common.ShapeError(
                f"Shape {m.shape} is not divisible by the block dimension {block_dim}."
            )
        return cls(m, rows // block_dim, cols // block_dim, block_dim)

    @classmethod
    def promoted(cls, s: npt.ArrayLike, block_dim: int) -> BlockMatrix:
        """Block matrix with the scalar blocks c·I_d of a scalar matrix."""
        m = as_cmatrix(s)
        return cls(promote(m, block_dim), m.shape[0], m.shape[1], block_dim)

    @classmethod
    def identity(cls, size: int, block_dim: int) -> BlockMatrix:
        """The unit of M_size(M_d)."""
        n = size * block_dim
        return cls(np.eye(n, dtype=np.complex128), size, size, block_dim)

    @property
    def blocks(self) -> npt.NDArray[np.complex128]:
        """The blocks as array of shape (R, C, d, d)."""
        d = self.block_dim
        return self.data.reshape(self.block_rows, d, self.block_cols, d).transpose(
            0, 2, 1, 3
        )

    def block(self, i: int, j: int) -> common.CMatrix:
        """Return the block at position (i, j)."""
        d = self.block_dim
        return self.data[i * d : (i + 1) * d, j * d : (j + 1) * d]

    @property
    def is_square(self) -> bool:
        """True if the block grid is square."""
        return self.block_rows == self.block_cols

    def transpose(self) -> BlockMatrix:
        """See :func:`block_transpose`."""
        return block_transpose(self)

    def bar(self) -> BlockMatrix:
        """See :func:`block_bar`."""
        return block_bar(self)

    def adjoint(self) -> BlockMatrix:
        """Adjoint of the underlying matrix, equal to the bar of the transpose."""
        return BlockMatrix(
            self.data.conj().T.copy(), self.block_cols, self.block_rows, self.block_dim
        )

    def __matmul__(self, other: BlockMatrix) -> BlockMatrix:
        """Product in M_R(M_d)."""
        if self.block_dim != other.block_dim or self.block_cols != other.block_rows:
            raise common.ShapeError(
                f"Cannot multiply a {self.block_rows}×{self.block_cols} grid "
                f"(d={self.block_dim}) with a {other.block_rows}×{other.block_cols} "
                f"grid (d={other.block_dim})."
            )
        return BlockMatrix(
            self.data @ other.data, self.block_rows, other.block_cols, self.block_dim
        )


def block_transpose(b: BlockMatrix) -> BlockMatrix:
    """Swap the block positions without touching the block contents.

    :param b: A block matrix with a square grid.
    :return: The matrix whose block (i, j) is the block (j, i) of the input.
    :raises ShapeError: If the block grid is not square.
    """
    if not b.is_square:
        raise common.ShapeError(
            f"Block transpose needs a square grid, got {b.block_rows}×{b.block_cols}."
        )
    return BlockMatrix.from_blocks(b.blocks.transpose(1, 0, 2, 3))


def block_bar(b: BlockMatrix) -> BlockMatrix:
    """Replace every block by its adjoint, keeping the block positions."""
    return BlockMatrix.from_blocks(b.blocks.conj().transpose(0, 1, 3, 2))


@dataclasses.dataclass(frozen=True)
class BiunitarityReport:
    """Result of :func:`is_biunitary`."""

    is_unitary: bool

    is_transpose_unitary: bool

    residuals: dict[str, float]

    @property
    def is_biunitary(self) -> bool:
        """True if both the matrix and its block transpose are unitary."""
        return self.is_unitary and self.is_transpose_unitary


def is_biunitary(
    b: BlockMatrix, tol: float = common.DEFAULT_TOLERANCE
) -> BiunitarityReport:
    """Check whether a block matrix and its block transpose are unitary.

    :param b: Block matrix with a square grid.
    :param tol: Relative tolerance.
    :return: Flags and the four residuals ‖BB*-I‖, ‖B*B-I‖ and the
        same for the block transpose.
    """
    t = block_transpose(b)
    eye = np.eye(b.data.shape[0])
    residuals = {
        "unitary_left": frobenius(b.data @ b.data.conj().T - eye),
        "unitary_right": frobenius(b.data.conj().T @ b.data - eye),
        "transpose_left": frobenius(t.data @ t.data.conj().T - eye),
        "transpose_right": frobenius(t.data.conj().T @ t.data - eye),
    }
    limit = common.threshold(tol, b.data.shape[0])
    return BiunitarityReport(
        is_unitary=max(residuals["unitary_left"], residuals["unitary_right"]) < limit,
        is_transpose_unitary=max(
            residuals["transpose_left"], residuals["transpose_right"]
        )
        < limit,
        residuals=residuals,
    )


class EigenSystem(NamedTuple):
    """Eigenvalues in ascending order and the eigenvectors as columns."""

    eigenvalues: common.RealArray
    eigenvectors: common.CMatrix


def fix_column_phases(v: common.CMatrix, cutoff: float = 1e-8) -> common.CMatrix:
    """Rotate each column so that its first nonzero component is real positive."""
    if v.size == 0:
        return v
    mags = np.abs(v)
    first = np.argmax(mags > cutoff * np.max(mags, axis=0, initial=0.0), axis=0)
    cols = np.arange(v.shape[1])
    pivots = v[first, cols]
    phases = np.ones_like(pivots)
    nonzero = np.abs(pivots) > 0
    phases[nonzero] = pivots[nonzero] / np.abs(pivots[nonzero])
    return v / phases


def hermitian_eigensystem(
    a: npt.ArrayLike, tol: float = common.DEFAULT_TOLERANCE
) -> EigenSystem:
    """Diagonalize a hermitian matrix, A = V diag(λ) V*.

    :param a: A hermitian matrix.
    :param tol: Relative tolerance of the hermiticity check.
    :return: Ascending eigenvalues and eigenvectors whose first nonzero
        component is real positive.
    :raises ContractError: If the matrix is not hermitian.
    """
    m = as_cmatrix(a)
    if m.shape[0] != m.shape[1]:
        raise common.ShapeError(f"Eigensystem needs a square matrix, got {m.shape}.")
    norm = frobenius(m)
    residual = hermiticity_residual(m)
    if residual > common.threshold(tol, m.shape[0], norm):
        raise common.ContractError(
            f"Matrix is not hermitian, ‖A - A*‖ = {residual:.3e} (‖A‖ = {norm:.3e})."
        )

    w, v = scipy.linalg.eigh((m + m.conj().T) / 2)
    logger.debug(f"Diagonalized hermitian matrix of dimension {m.shape[0]}.")
    return EigenSystem(w, fix_column_phases(v))


def matrix_function(
    a: npt.ArrayLike, f: Callable[[common.RealArray], npt.ArrayLike]
) -> common.CMatrix:
    """Apply a real function to a hermitian matrix through its eigensystem."""
    w, v = hermitian_eigensystem(a)
    values = np.asarray(f(w), dtype=np.complex128)
    return (v * values) @ v.conj().T


def nullspace(a: npt.ArrayLike, tol: float = common.DEFAULT_TOLERANCE) -> npt.NDArray:
    """Orthonormal basis of the kernel of a matrix.

    Singular values below tol·σ_max count as zero, where σ_max is the
    largest singular value (or 1 if the matrix is zero). Real input yields
    a real basis.

    :param a: The matrix (real or complex).
    :param tol: Relative rank threshold.
    :return: The basis vectors as columns.
    """
    m = np.asarray(a)
    if not np.iscomplexobj(m):
        m = m.astype(np.float64)
    if m.ndim != 2:
        raise common.ShapeError(f"Nullspace needs a matrix, got shape {m.shape}.")

    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return np.eye(cols, dtype=m.dtype)

    # Only wide matrices need the full set of right singular vectors.
    _, s, vh = scipy.linalg.svd(m, full_matrices=rows < cols)
    sigma_max = s[0] if s[0] > 0 else 1.0
    rank = int(np.count_nonzero(s > tol * sigma_max))
    basis = vh[rank:].conj().T
    logger.debug(f"Nullspace of a {rows}×{cols} matrix has dimension {cols - rank}.")
    return basis


def partial_trace_left(m: npt.ArrayLike, dim_h: int, dim_k: int) -> common.CMatrix:
    """Trace out the left tensor factor of an operator on H ⊗ K.

    :param m: Operator on H ⊗ K, H-major index order.
    :param dim_h: Dimension of H.
    :param dim_k: Dimension of K.
    :return: The operator (Tr_H ⊗ id)(M) on K.
    :raises ShapeError: If the dimensions do not match.
    """
    mat = as_cmatrix(m)
    n = dim_h * dim_k
    if mat.shape != (n, n):
        raise common.ShapeError(
            f"Partial trace over {dim_h}×{dim_k} expects shape {(n, n)}, "
            f"got {mat.shape}."
        )
    return np.einsum("ikil->kl", mat.reshape(dim_h, dim_k, dim_h, dim_k))


def make_rng(seed: Optional[int] = common.DEFAULT_SEED) -> np.random.Generator:
    """Create a counter-based random generator."""
    return np.random.Generator(np.random.Philox(seed))


def spawn(rng: np.random.Generator, k: int) -> list[np.random.Generator]:
    """Split off k independent child generators."""
    return rng.spawn(k)


def complex_gaussian(
    rng: np.random.Generator, shape: Sequence[int] | int
) -> npt.NDArray[np.complex128]:
    """Array of standard complex Gaussian entries (E|z|² = 1)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(
        2
    )


def haar_phase(rng: np.random.Generator) -> complex:
    """Uniformly distributed point on the unit circle."""
    return complex(np.exp(2j * np.pi * rng.random()))


def haar_unitary(rng: np.random.Generator, n: int) -> common.CMatrix:
    """Haar distributed unitary, QR of a Gaussian matrix with phase fix."""
    z = complex_gaussian(rng, (n, n))
    q, r = scipy.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, n: int) -> common.CMatrix:
    """Hermitian matrix from the Gaussian unitary ensemble."""
    z = complex_gaussian(rng, (n, n))
    return (z + z.conj().T) / 2


def random_positive(
    rng: np.random.Generator,
    n: int,
    eigenvalues: Optional[npt.ArrayLike] = None,
) -> common.CMatrix:
    """Positive matrix W diag(λ) W* with Haar distributed W.

    Without explicit eigenvalues, n distinct values in [0.5, 2) are drawn.
    """
    if eigenvalues is None:
        lam = np.sort(rng.uniform(0.5, 2.0, n))
    else:
        lam = np.asarray(eigenvalues, dtype=np.float64)
    w = haar_unitary(rng, n)
    m = (w * lam) @ w.conj().T
    return (m + m.conj().T) / 2
