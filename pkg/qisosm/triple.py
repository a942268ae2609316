"""Finite real spectral triples, their axioms and their products."""

from __future__ import annotations

import dataclasses
import itertools
from collections.abc import Callable, Sequence
from typing import Final, Optional

import numpy as np
import numpy.typing as npt
import scipy.sparse
import scipy.sparse.linalg

from . import common, numlin
from .log import logger

# KO-dimension (mod 8) of an even triple, keyed by (ε, ε', ε'').
_EVEN_KO_DIMENSIONS: Final = {
    (1, 1, 1): 0,
    (-1, 1, -1): 2,
    (-1, 1, 1): 4,
    (1, 1, -1): 6,
}

# KO-dimension of an odd triple, keyed by (ε, ε').
_ODD_KO_DIMENSIONS: Final = {
    (1, -1): 1,
    (-1, 1): 3,
    (-1, -1): 5,
    (1, 1): 7,
}


@dataclasses.dataclass(frozen=True)
class KOSigns:
    """The signs in J² = ε, JD = ε'DJ and Jγ = ε''γJ."""

    eps: int

    eps_prime: int

    eps_double_prime: int = 1

    def __post_init__(self) -> None:  # noqa: D105
        for name, value in dataclasses.asdict(self).items():
            if value not in (1, -1):
                raise common.ContractError(f"KO sign {name} must be ±1, got {value}.")

    def as_tuple(self) -> tuple[int, int, int]:
        """Return (ε, ε', ε'')."""
        return (self.eps, self.eps_prime, self.eps_double_prime)

    def ko_dimension(self, even: bool) -> Optional[int]:
        """KO-dimension modulo 8, or None if the signs match no dimension."""
        if even:
            return _EVEN_KO_DIMENSIONS.get(self.as_tuple())
        return _ODD_KO_DIMENSIONS.get((self.eps, self.eps_prime))


@dataclasses.dataclass(frozen=True, eq=False)
class AntiUnitary:
    """Antiunitary operator v ↦ M·conj(v) given by its unitary matrix part M."""

    matrix: common.CMatrix

    @property
    def dim(self) -> int:
        """Dimension of the Hilbert space."""
        return int(self.matrix.shape[0])

    def apply(self, v: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Apply the operator to a vector (or to the columns of a matrix)."""
        return self.matrix @ np.conj(v)

    def inverse_apply(self, w: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Apply the inverse operator, v = conj(M* w)."""
        return np.conj(self.matrix.conj().T @ np.asarray(w))

    def compose(self, other: AntiUnitary) -> common.CMatrix:
        """The complex-linear product of two antiunitaries, M₁·conj(M₂)."""
        return self.matrix @ other.matrix.conj()

    def conjugate_operator(self, a: npt.ArrayLike) -> common.CMatrix:
        """Return J a J⁻¹ = M·conj(a)·M*."""
        return self.matrix @ np.conj(a) @ self.matrix.conj().T

    def tensor(self, other: AntiUnitary) -> AntiUnitary:
        """Antiunitary J₁ ⊗ J₂ on the tensor product."""
        return AntiUnitary(numlin.kron(self.matrix, other.matrix))


@dataclasses.dataclass(frozen=True, eq=False)
class BlockAlgebra:
    """Direct sum of full matrix algebras represented on a Hilbert space.

    The representation is stored through the images of all matrix units,
    'units[p]' being the image of e_ij in the summand s for the flat index
    p enumerating the summands in order and (i, j) row-major within them.
    """

    summand_dims: tuple[int, ...]

    units: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:  # noqa: D105
        expected = sum(k * k for k in self.summand_dims)
        if self.units.ndim != 3 or self.units.shape[0] != expected:
            raise common.ShapeError(
                f"Algebra with summands {self.summand_dims} needs {expected} "
                f"matrix unit images, got array of shape {self.units.shape}."
            )

    @classmethod
    def from_embedding(
        cls,
        summand_dims: Sequence[int],
        embed: Callable[[Sequence[common.CMatrix]], common.CMatrix],
    ) -> BlockAlgebra:
        """Evaluate an embedding on every matrix unit of the algebra.

        :param summand_dims: Sizes k of the summands M_k(C).
        :param embed: Maps a tuple of summand matrices to an operator on H.
        :return: The algebra.
        """
        dims = tuple(summand_dims)
        images = []
        for s, k in enumerate(dims):
            for i, j in itertools.product(range(k), repeat=2):
                parts = [np.zeros((kk, kk), dtype=np.complex128) for kk in dims]
                parts[s][i, j] = 1.0
                images.append(numlin.as_cmatrix(embed(parts)))
        return cls(dims, np.array(images))

    @property
    def dim_h(self) -> int:
        """Dimension of the Hilbert space the algebra acts on."""
        return int(self.units.shape[1])

    @property
    def size(self) -> int:
        """Number of matrix units, the complex dimension of the algebra."""
        return int(self.units.shape[0])

    def unit_index(self, summand: int, i: int, j: int) -> int:
        """Flat index of the matrix unit e_ij of a summand."""
        k = self.summand_dims[summand]
        if not (0 <= i < k and 0 <= j < k):
            raise common.RangeError(f"Unit ({i}, {j}) outside of M_{k}.")
        offset = sum(kk * kk for kk in self.summand_dims[:summand])
        return offset + i * k + j

    def unit_keys(self) -> list[tuple[int, int, int]]:
        """The (summand, i, j) triples in flat index order."""
        return [
            (s, i, j)
            for s, k in enumerate(self.summand_dims)
            for i, j in itertools.product(range(k), repeat=2)
        ]

    def labels(self) -> list[str]:
        """Human-readable names of the matrix units."""
        return [
            f"M{self.summand_dims[s]}[{s}].e{i + 1}{j + 1}"
            for s, i, j in self.unit_keys()
        ]

    def unit(self, summand: int, i: int, j: int) -> common.CMatrix:
        """Image of the matrix unit e_ij of a summand."""
        return self.units[self.unit_index(summand, i, j)]

    def coefficients(
        self, parts: Sequence[npt.ArrayLike]
    ) -> npt.NDArray[np.complex128]:
        """Flatten a tuple of summand matrices into the unit coefficient vector."""
        if len(parts) != len(self.summand_dims):
            raise common.ShapeError(
                f"Expected {len(self.summand_dims)} summand matrices, got {len(parts)}."
            )
        flat = []
        for part, k in zip(parts, self.summand_dims):
            m = np.asarray(part, dtype=np.complex128).reshape(-1)
            if m.size != k * k:
                raise common.ShapeError(f"Summand M_{k} got {m.size} coefficients.")
            flat.append(m)
        return np.concatenate(flat)

    def embed(self, parts: Sequence[npt.ArrayLike]) -> common.CMatrix:
        """Image of the algebra element given by its summand matrices."""
        return np.einsum("p,pij->ij", self.coefficients(parts), self.units)

    def random_element(self, rng: np.random.Generator) -> list[common.CMatrix]:
        """Summand matrices of a random algebra element."""
        return [numlin.complex_gaussian(rng, (k, k)) for k in self.summand_dims]

    def sparse_units(self) -> list[scipy.sparse.csr_array]:
        """The unit images as sparse matrices."""
        return [scipy.sparse.csr_array(u) for u in self.units]

    def tensor(self, other: BlockAlgebra) -> BlockAlgebra:
        """Tensor product algebra acting on H₁ ⊗ H₂.

        The summand (s, t) is M_{d_s·d_t}, ordered with s major, and its
        unit e_{(i,k),(j,l)} is represented by E_{s,i,j} ⊗ F_{t,k,l}.
        """
        n1, n2 = self.dim_h, other.dim_h
        dims = []
        images = []
        for s, ds in enumerate(self.summand_dims):
            first = self._summand_units(s)
            for t, dt in enumerate(other.summand_dims):
                second = other._summand_units(t)
                prod = np.einsum("ijab,klcd->ikjlacbd", first, second)
                prod = prod.reshape(ds * dt * ds * dt, n1 * n2, n1 * n2)
                dims.append(ds * dt)
                images.append(prod)
        return BlockAlgebra(tuple(dims), np.concatenate(images))

    def _summand_units(self, summand: int) -> npt.NDArray[np.complex128]:
        """Unit images of one summand as array of shape (k, k, N, N)."""
        k = self.summand_dims[summand]
        start = self.unit_index(summand, 0, 0)
        return self.units[start : start + k * k].reshape(k, k, self.dim_h, self.dim_h)

    def homomorphism_residual(self) -> dict[str, float]:
        """Residuals of the *-homomorphism property of the unit images.

        :return: The largest deviation from E_{s,i,j}E_{t,k,l} =
            δ_st δ_jk E_{s,i,l}, from E_{s,i,j}* = E_{s,j,i}, and of the
            sum of all diagonal units from the identity.
        """
        keys = self.unit_keys()
        sparse = self.sparse_units()
        product = 0.0
        for a, (s, i, j) in enumerate(keys):
            for b, (t, k, l) in enumerate(keys):
                lhs = (sparse[a] @ sparse[b]).toarray()
                if s == t and j == k:
                    lhs = lhs - self.units[self.unit_index(s, i, l)]
                product = max(product, numlin.frobenius(lhs))

        adjoint = max(
            numlin.frobenius(self.units[a].conj().T - self.unit(s, j, i))
            for a, (s, i, j) in enumerate(keys)
        )
        diagonal = [
            self.unit_index(s, i, i)
            for s, k in enumerate(self.summand_dims)
            for i in range(k)
        ]
        unital = numlin.frobenius(
            self.units[diagonal].sum(axis=0) - np.eye(self.dim_h)
        )
        return {"product": product, "adjoint": adjoint, "unital": unital}


@dataclasses.dataclass(frozen=True, eq=False)
class FiniteRealSpectralTriple:
    """Finite real spectral triple (A, H, D, γ, J).

    A grading of None is the literal identity of an odd triple.
    """

    algebra: BlockAlgebra

    dirac: common.CMatrix

    real_structure: AntiUnitary

    signs: KOSigns

    grading: Optional[common.CMatrix] = None

    name: str = "triple"

    def __post_init__(self) -> None:  # noqa: D105
        n = self.algebra.dim_h
        shapes = {
            "Dirac operator": self.dirac.shape,
            "real structure": self.real_structure.matrix.shape,
        }
        if self.grading is not None:
            shapes["grading"] = self.grading.shape
        for what, shape in shapes.items():
            if shape != (n, n):
                raise common.ShapeError(
                    f"The {what} of '{self.name}' has shape {shape}, "
                    f"expected {(n, n)}."
                )

    @property
    def dim_h(self) -> int:
        """Dimension of the Hilbert space."""
        return self.algebra.dim_h

    @property
    def is_even(self) -> bool:
        """True if the triple has a genuine grading."""
        return self.grading is not None

    def grading_matrix(self) -> common.CMatrix:
        """The grading, the identity matrix for odd triples."""
        if self.grading is None:
            return np.eye(self.dim_h, dtype=np.complex128)
        return self.grading


@dataclasses.dataclass
class AxiomReport(common.CheckReport):
    """Per-axiom residuals, plus the signs measured from J, D and γ."""

    measured_signs: Optional[KOSigns] = None


def _best_sign(residual: Callable[[int], float]) -> tuple[int, float]:
    """Return the sign s = ±1 with the smaller residual, preferring +1."""
    plus, minus = residual(1), residual(-1)
    if minus < plus:
        return -1, minus
    return 1, plus


def measure_signs(t: FiniteRealSpectralTriple) -> KOSigns:
    """Determine the KO signs from the operators of a triple.

    Each sign is the choice of ±1 that minimizes the residual of its
    defining relation.
    """
    m = t.real_structure.matrix
    g = t.grading_matrix()
    d = t.dirac
    eye = np.eye(t.dim_h)
    eps, _ = _best_sign(lambda s: numlin.frobenius(m @ m.conj() - s * eye))
    eps_prime, _ = _best_sign(lambda s: numlin.frobenius(m @ d.conj() - s * d @ m))
    eps_double_prime, _ = _best_sign(
        lambda s: numlin.frobenius(m @ g.conj() - s * g @ m)
    )
    return KOSigns(eps, eps_prime, eps_double_prime)


def _right_multiply(
    dense: common.CMatrix, sparse: scipy.sparse.csr_array
) -> common.CMatrix:
    """Return dense @ sparse, computed through transposes."""
    return np.asarray((sparse.T @ dense.T).T)


def check_axioms(
    t: FiniteRealSpectralTriple, tol: float = common.DEFAULT_TOLERANCE
) -> AxiomReport:
    """Check all axioms of a real spectral triple.

    The relations involving J are written with its matrix part M as
    linear identities: J² = ε reads M·conj(M) = ε, JD = ε'DJ reads
    M·conj(D) = ε'·D·M and Jγ = ε''γJ reads M·conj(γ) = ε''·γ·M.

    :param t: The triple.
    :param tol: Relative tolerance.
    :return: Residuals of every axiom, including the order-zero and
        first-order conditions over all pairs of matrix units.
    """
    n = t.dim_h
    d = t.dirac
    m = t.real_structure.matrix
    g = t.grading_matrix()
    eye = np.eye(n)
    limit = common.threshold(tol, n)
    limit_d = common.threshold(tol, n, numlin.frobenius(d))
    report = AxiomReport(tolerance=tol)
    report.info["dimension"] = n
    report.info["even"] = t.is_even

    report.add("dirac_selfadjoint", numlin.hermiticity_residual(d), limit_d)

    if t.is_even:
        report.add("grading_square", numlin.frobenius(g @ g - eye), limit)
        report.add("grading_selfadjoint", numlin.hermiticity_residual(g), limit)
        report.add(
            "grading_anticommutes_dirac", numlin.frobenius(g @ d + d @ g), limit_d
        )
        report.add(
            "grading_commutes_algebra",
            max(numlin.frobenius(numlin.commutator(g, u)) for u in t.algebra.units),
            limit,
        )

    s = t.signs
    report.add("real_structure_unitary", numlin.unitarity_residual(m), limit)
    report.add("j_square", numlin.frobenius(m @ m.conj() - s.eps * eye), limit)
    report.add(
        "j_dirac", numlin.frobenius(m @ d.conj() - s.eps_prime * d @ m), limit_d
    )
    report.add(
        "j_grading",
        numlin.frobenius(m @ g.conj() - s.eps_double_prime * g @ m),
        limit,
    )

    hom = t.algebra.homomorphism_residual()
    report.add("algebra_homomorphism", max(hom.values()), limit)

    units = t.algebra.sparse_units()
    opposite = [
        scipy.sparse.csr_array(t.real_structure.conjugate_operator(u))
        for u in t.algebra.units
    ]
    order_zero = 0.0
    first_order = 0.0
    for a in units:
        da = _right_multiply(d, a) - a @ d
        for b in opposite:
            order_zero = max(order_zero, scipy.sparse.linalg.norm(a @ b - b @ a))
            first_order = max(
                first_order,
                numlin.frobenius(_right_multiply(da, b) - b @ da),
            )
    report.add("order_zero", order_zero, limit)
    report.add("first_order", first_order, limit_d)

    measured = measure_signs(t)
    report.measured_signs = measured
    report.info["signs"] = list(s.as_tuple())
    report.info["measured_signs"] = list(measured.as_tuple())
    report.info["ko_dimension"] = s.ko_dimension(t.is_even)

    if report.passed:
        logger.debug(f"Triple '{t.name}' passes all axioms.")
    else:
        failed = ", ".join(report.failures())
        logger.warning(f"Triple '{t.name}' fails axioms: {failed}.")
    return report


def product_triple(
    t1: FiniteRealSpectralTriple, t2: FiniteRealSpectralTriple
) -> FiniteRealSpectralTriple:
    """Product of two real spectral triples, the second one even.

    D = D₁ ⊗ γ₂ + 1 ⊗ D₂, γ = γ₁ ⊗ γ₂ (γ₁ = 1 if the first triple is odd)
    and J = J₁ ⊗ J₂. The KO signs of the product are measured from these
    operators; check_axioms decides whether they are consistent.

    :param t1: The first factor.
    :param t2: The second factor, must be even.
    :return: The product triple.
    :raises ContractError: If the second factor is odd.
    """
    if not t2.is_even:
        raise common.ContractError(
            f"The second factor '{t2.name}' of a product must be even."
        )

    g2 = t2.grading_matrix()
    dirac = numlin.kron(t1.dirac, g2) + numlin.kron(np.eye(t1.dim_h), t2.dirac)
    grading = numlin.kron(t1.grading_matrix(), g2)
    real_structure = t1.real_structure.tensor(t2.real_structure)
    algebra = t1.algebra.tensor(t2.algebra)
    name = f"{t1.name}×{t2.name}"

    provisional = FiniteRealSpectralTriple(
        algebra, dirac, real_structure, KOSigns(1, 1, 1), grading, name
    )
    signs = measure_signs(provisional)
    logger.debug(
        f"Built product '{name}' of dimension {algebra.dim_h}, "
        f"signs {signs.as_tuple()}."
    )
    return dataclasses.replace(provisional, signs=signs)


def trivial_triple() -> FiniteRealSpectralTriple:
    """The triple (C, C, 0) with γ = 1 and J complex conjugation."""
    one = np.ones((1, 1), dtype=np.complex128)
    return FiniteRealSpectralTriple(
        BlockAlgebra((1,), one[np.newaxis]),
        np.zeros((1, 1), dtype=np.complex128),
        AntiUnitary(one),
        KOSigns(1, 1, 1),
        one.copy(),
        "trivial",
    )
