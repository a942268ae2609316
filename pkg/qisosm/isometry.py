"""The corepresentation U of the quantum isometry group on H_F.

Operators on H ⊗ K use the flat index h·d + a, so U is stored as a
(N·d)×(N·d) matrix whose d×d block (h, h') is the coefficient of the
matrix unit e_{hh'}. Every check in this module works on that block
structure.
"""

from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg

from . import common, cqgrep, numlin, smtriple, triple
from .log import logger
from .smtriple import Chirality

_ANTIPARTICLES = (Chirality.PBAR_R, Chirality.PBAR_L)
_PARTICLES = (Chirality.P_L, Chirality.P_R)

# Flat indices of the matrix units of B_F = C ⊕ C ⊕ M_2(C) ⊕ M_3(C).
_C_UNITS = (0, 1)
_M2_E11, _M2_E12, _M2_E21, _M2_E22 = 2, 3, 4, 5
_M3_START = 6


def _dagger(a: npt.NDArray) -> npt.NDArray:
    """Adjoint of the trailing d×d matrices of an array."""
    return np.conj(np.swapaxes(a, -1, -2))


def to_blocks(u: npt.ArrayLike, dim_h: int, d: int) -> npt.NDArray[np.complex128]:
    """The d×d blocks of an operator on H ⊗ K, shape (N, N, d, d)."""
    m = np.asarray(u, dtype=np.complex128)
    return m.reshape(dim_h, d, dim_h, d).transpose(0, 2, 1, 3)


def from_blocks(blocks: npt.ArrayLike) -> common.CMatrix:
    """Inverse of :func:`to_blocks`."""
    b = np.asarray(blocks, dtype=np.complex128)
    n, d = b.shape[0], b.shape[-1]
    return b.transpose(0, 2, 1, 3).reshape(n * d, n * d)


def lift_operator(a: npt.ArrayLike, d: int) -> common.CMatrix:
    """The operator a ⊗ 1_K."""
    return numlin.kron(a, np.eye(d))


def entrywise_star(u: npt.ArrayLike, dim_h: int, d: int) -> common.CMatrix:
    """Replace every d×d block of U by its adjoint, keeping block positions.

    This is the conjugate Ū of U as a matrix with entries in Q.
    """
    return from_blocks(_dagger(to_blocks(u, dim_h, d)))


@dataclasses.dataclass(frozen=True, eq=False)
class Corepresentation:
    """A unitary U on H ⊗ K, optionally with the generators it was built from."""

    u: common.CMatrix

    dim_h: int

    aux_dim: int

    generators: Optional[cqgrep.RepresentedGenerators] = None

    def __post_init__(self) -> None:  # noqa: D105
        size = self.dim_h * self.aux_dim
        if self.u.shape != (size, size):
            raise common.ShapeError(
                f"Corepresentation on H of dimension {self.dim_h} and K of "
                f"dimension {self.aux_dim} must have shape {(size, size)}, "
                f"got {self.u.shape}."
            )

    @property
    def blocks(self) -> npt.NDArray[np.complex128]:
        """The d×d blocks, shape (N, N, d, d)."""
        return to_blocks(self.u, self.dim_h, self.aux_dim)


def assemble_U(g: cqgrep.RepresentedGenerators) -> Corepresentation:
    """Assemble the corepresentation of the generators on H_F ⊗ K.

    Neutrinos transform with x_0x_k (p_L) and V̄ (p_R), electrons with x_k,
    up quarks with T_m and down quarks with x_0*T_m, both in generation m.
    Antiparticles carry the entrywise adjoints.
    """
    n, d = g.n, g.aux_dim
    blocks = np.zeros((2, 4, 4, n, 2, 4, 4, n, d, d), dtype=np.complex128)
    up, down = smtriple.Isospin.UP, smtriple.Isospin.DOWN
    lepton = smtriple.ColorSector.LEPTON
    x0 = g.x[0]

    for k in range(n):
        x0xk = x0 @ g.x[k + 1]
        blocks[up, lepton, Chirality.P_L, k, up, lepton, Chirality.P_L, k] = x0xk
        blocks[up, lepton, Chirality.PBAR_L, k, up, lepton, Chirality.PBAR_L, k] = (
            _dagger(x0xk)
        )
        for c in _PARTICLES:
            blocks[down, lepton, c, k, down, lepton, c, k] = g.x[k + 1]
        for c in _ANTIPARTICLES:
            blocks[down, lepton, c, k, down, lepton, c, k] = _dagger(g.x[k + 1])

    c = Chirality.PBAR_R
    blocks[up, lepton, c, :, up, lepton, c, :] = g.v
    c = Chirality.P_R
    blocks[up, lepton, c, :, up, lepton, c, :] = _dagger(g.v)

    for m in range(n):
        t = g.t[m]
        for c in _PARTICLES:
            blocks[up, 1:, c, m, up, 1:, c, m] = t
            blocks[down, 1:, c, m, down, 1:, c, m] = x0.conj().T @ t
        for c in _ANTIPARTICLES:
            blocks[up, 1:, c, m, up, 1:, c, m] = _dagger(t)
            blocks[down, 1:, c, m, down, 1:, c, m] = _dagger(t) @ x0

    size = 32 * n
    u = from_blocks(blocks.reshape(size, size, d, d))
    logger.debug(f"Assembled corepresentation of dimension {size * d}.")
    return Corepresentation(u, size, d, g)


def lift(c: Corepresentation, dim_left: int) -> Corepresentation:
    """The corepresentation 1 ⊗ U on H₁ ⊗ H ⊗ K of a product triple."""
    return Corepresentation(
        numlin.kron(np.eye(dim_left), c.u), dim_left * c.dim_h, c.aux_dim, c.generators
    )


def corep_composition(c1: Corepresentation, c2: Corepresentation) -> Corepresentation:
    """The product U_(12)·U_(13) on H ⊗ K₁ ⊗ K₂.

    Its d₁d₂×d₁d₂ block (h, h'') is Σ_h' U₁(h, h') ⊗ U₂(h', h''), the
    corepresentation of the convolved generators.
    """
    if c1.dim_h != c2.dim_h:
        raise common.ShapeError(
            f"Corepresentations on spaces of dimension {c1.dim_h} and {c2.dim_h}."
        )
    n, d1, d2 = c1.dim_h, c1.aux_dim, c2.aux_dim
    u12 = numlin.kron(c1.u, np.eye(d2))
    u2 = c2.u.reshape(n, d2, n, d2)
    u13 = np.einsum("iakb,cd->icakdb", u2, np.eye(d1)).reshape(n * d1 * d2, -1)
    return Corepresentation(u12 @ u13, n, d1 * d2)


def _expand(
    units: npt.NDArray, x: common.CMatrix, d: int
) -> tuple[npt.NDArray[np.complex128], float]:
    """Project X onto span{E_b} ⊗ M_d(C).

    The unit images are orthogonal in the Frobenius inner product, the
    coefficient of E_b is therefore ⟨E_b ⊗ 1, X⟩ / ‖E_b‖².

    :return: Coefficients of shape (P, d, d) and the norm of the remainder.
    """
    n = units.shape[1]
    x4 = x.reshape(n, d, n, d)
    norms = np.einsum("bij,bij->b", units.conj(), units).real
    coeffs = np.einsum("bij,ikjl->bkl", units.conj(), x4) / norms[:, None, None]
    rebuilt = np.einsum("bij,bkl->ikjl", units, coeffs).reshape(n * d, n * d)
    return coeffs, numlin.frobenius(x - rebuilt)


def _adjoint_images(c: Corepresentation, units: npt.NDArray) -> npt.NDArray:
    """U(E_b ⊗ 1)U* for every unit image."""
    d = c.aux_dim
    u_h = c.u.conj().T
    return np.array([c.u @ lift_operator(e, d) @ u_h for e in units])


def verify_corep_conditions(
    c: Corepresentation,
    f: triple.FiniteRealSpectralTriple,
    tol: float = common.DEFAULT_TOLERANCE,
) -> cqgrep.RelationReport:
    """Check that U is a quantum isometry of the triple.

    U must be unitary, commute with D ⊗ 1 and γ ⊗ 1, satisfy
    (J_0 ⊗ 1)Ū = U(J_0 ⊗ 1) and map every algebra element a ⊗ 1 into the
    algebra tensored with B(K).

    :param c: The corepresentation.
    :param f: The triple.
    :param tol: Relative tolerance.
    :return: One residual per condition, the containment residual is the
        largest over all matrix units of the algebra.
    :raises ShapeError: If the Hilbert space dimensions differ.
    """
    if c.dim_h != f.dim_h:
        raise common.ShapeError(
            f"Corepresentation on dimension {c.dim_h} does not act on "
            f"'{f.name}' of dimension {f.dim_h}."
        )
    d = c.aux_dim
    size = c.dim_h * d
    report = cqgrep.RelationReport(tolerance=tol)

    report.add(
        "unitary", numlin.unitarity_residual(c.u), common.threshold(tol, size)
    )
    dirac = lift_operator(f.dirac, d)
    report.add(
        "commutes_dirac",
        numlin.frobenius(numlin.commutator(c.u, dirac)),
        common.threshold(tol, size, numlin.frobenius(dirac)),
    )
    if f.is_even:
        grading = lift_operator(f.grading_matrix(), d)
        report.add(
            "commutes_grading",
            numlin.frobenius(numlin.commutator(c.u, grading)),
            common.threshold(tol, size),
        )
    j = lift_operator(f.real_structure.matrix, d)
    report.add(
        "real_structure",
        numlin.frobenius(j @ entrywise_star(c.u, c.dim_h, d) - c.u @ j),
        common.threshold(tol, size),
    )

    units = f.algebra.units
    containment = max(
        _expand(units, x, d)[1] for x in _adjoint_images(c, units)
    )
    report.add("containment", containment, common.threshold(tol, size))

    if not report.passed:
        logger.warning(
            f"Corepresentation conditions fail on '{f.name}': "
            f"{', '.join(report.failures())}."
        )
    return report


@dataclasses.dataclass(frozen=True, eq=False)
class CoactionCoefficients:
    """The coaction Ad_U(E_a) = Σ_b E_b ⊗ coefficients[a, b]."""

    keys: list[tuple[int, int, int]]
    """
    (summand, i, j) of each matrix unit, in flat index order.
    """

    coefficients: npt.NDArray[np.complex128]
    """
    Array of shape (P, P, d, d).
    """

    residual: float
    """
    Largest norm of the part of Ad_U(E_a) outside the algebra.
    """

    def of(
        self, source: tuple[int, int, int], target: tuple[int, int, int]
    ) -> common.CMatrix:
        """Coefficient of the unit 'target' in the image of the unit 'source'."""
        return self.coefficients[self.keys.index(source), self.keys.index(target)]


def adjoint_coaction_coefficients(
    c: Corepresentation,
    f: triple.FiniteRealSpectralTriple,
    tol: float = common.DEFAULT_TOLERANCE,
) -> CoactionCoefficients:
    """Expand the adjoint coaction in the matrix units of the algebra.

    :raises ContainmentError: If some Ad_U(E_a) leaves the algebra.
    """
    units = f.algebra.units
    expansions = [_expand(units, x, c.aux_dim) for x in _adjoint_images(c, units)]
    residual = max(r for _, r in expansions)
    limit = common.threshold(tol, c.dim_h * c.aux_dim)
    if not residual < limit:
        raise common.ContainmentError(
            f"Adjoint coaction leaves the algebra, residual {residual:.3e} "
            f"exceeds {limit:.3e}."
        )
    return CoactionCoefficients(
        f.algebra.unit_keys(), np.array([e for e, _ in expansions]), residual
    )


def expected_coaction(g: cqgrep.RepresentedGenerators) -> npt.NDArray[np.complex128]:
    """Coefficients of the coaction on B_F predicted by the generators.

    Both C summands and the diagonal units of M_2 are coinvariant, e₁₂ of
    M_2 picks up x_0 and e₂₁ picks up x_0*, and e_ij of M_3 maps to
    Σ e_kl ⊗ (T_1)_ki*·(T_1)_lj.
    """
    d = g.aux_dim
    eye = np.eye(d, dtype=np.complex128)
    out = np.zeros((15, 15, d, d), dtype=np.complex128)
    for a in (*_C_UNITS, _M2_E11, _M2_E22):
        out[a, a] = eye
    out[_M2_E12, _M2_E12] = g.x[0]
    out[_M2_E21, _M2_E21] = _dagger(g.x[0])

    t = g.t[0]
    m3 = np.einsum("kiba,ljbc->ijklac", t.conj(), t)
    out[_M3_START:, _M3_START:] = m3.reshape(9, 9, d, d)
    return out


def coaction_formula_check(
    coefficients: CoactionCoefficients,
    g: cqgrep.RepresentedGenerators,
    tol: float = common.DEFAULT_TOLERANCE,
) -> cqgrep.RelationReport:
    """Compare extracted coaction coefficients with the closed formulas."""
    expected = expected_coaction(g)
    actual = coefficients.coefficients
    if actual.shape != expected.shape:
        raise common.ShapeError(
            f"Coefficient array of shape {actual.shape}, expected {expected.shape}."
        )
    limit = common.threshold(tol, g.aux_dim)
    diff = np.linalg.norm(actual - expected, axis=(-2, -1))
    report = cqgrep.RelationReport(tolerance=tol)
    report.add("coinvariant_c", float(np.max(diff[list(_C_UNITS)])), limit)
    report.add("m2_diagonal", float(np.max(diff[[_M2_E11, _M2_E22]])), limit)
    report.add("m2_x0", float(np.max(diff[[_M2_E12, _M2_E21]])), limit)
    report.add("m3_t1", float(np.max(diff[_M3_START:])), limit)
    return report


def _label_image(
    g: cqgrep.RepresentedGenerators, label: smtriple.SMBasisLabel
) -> list[tuple[smtriple.SMBasisLabel, common.CMatrix]]:
    """U(v ⊗ ·) for a labeled basis vector v, as a list of (label, block)."""
    k = label.generation - 1
    chirality = label.chirality
    anti = chirality.is_antiparticle
    x0 = g.x[0]

    if label.particle == "nu":
        if chirality == Chirality.P_L:
            return [(label, x0 @ g.x[k + 1])]
        if chirality == Chirality.PBAR_L:
            return [(label, _dagger(x0 @ g.x[k + 1]))]
        # ν_R,k ↦ Σ_j ν_R,j ⊗ V̄_jk and ν̄_R,k ↦ Σ_j ν̄_R,j ⊗ V_jk.
        return [
            (
                dataclasses.replace(label, generation=j + 1),
                g.v[j, k] if anti else _dagger(g.v[j, k]),
            )
            for j in range(g.n)
        ]
    if label.particle == "e":
        return [(label, _dagger(g.x[k + 1]) if anti else g.x[k + 1])]

    c = label.color - 1
    images = []
    for c_prime in range(3):
        t = g.t[k][c_prime, c]
        if label.particle == "u":
            block = _dagger(t) if anti else t
        else:
            block = _dagger(t) @ x0 if anti else _dagger(x0) @ t
        target = dataclasses.replace(
            label, color=smtriple.ColorSector(c_prime + 1)
        )
        images.append((target, block))
    return images


def transformation_laws_check(
    c: Corepresentation, tol: float = common.DEFAULT_TOLERANCE
) -> cqgrep.RelationReport:
    """Apply U to every labeled particle and compare with the transformation laws.

    :param c: A corepresentation assembled from generators.
    :param tol: Relative tolerance.
    :return: The largest deviation of a column of U from its law, per particle.
    """
    g = c.generators
    if g is None:
        raise common.ContractError(
            "Transformation laws need the generators of the corepresentation."
        )
    n, d = g.n, g.aux_dim
    blocks = c.blocks
    worst: dict[str, float] = {"nu": 0.0, "e": 0.0, "u": 0.0, "d": 0.0}
    for h in range(c.dim_h):
        label = smtriple.label_basis(h, n)
        expected = np.zeros((c.dim_h, d, d), dtype=np.complex128)
        for target, block in _label_image(g, label):
            expected[smtriple.particle_index(target, n)] += block
        residual = numlin.frobenius(blocks[:, h] - expected)
        worst[label.particle] = max(worst[label.particle], residual)

    report = cqgrep.RelationReport(tolerance=tol)
    for particle, residual in worst.items():
        report.add(f"law.{particle}", residual, common.threshold(tol, n * d))
    return report


@dataclasses.dataclass
class CommutantReport(common.CheckReport):
    """Real basis of {X : [X, D] = 0, [X, γ] = 0, J_0·conj(X) = X·J_0}.

    The basis is orthonormal for the real inner product Re tr(X*Y).
    """

    real_dimension: int = 0

    basis: npt.NDArray[np.complex128] = dataclasses.field(
        default_factory=lambda: np.zeros((0, 0, 0), dtype=np.complex128)
    )

    def projection_residual(self, x: npt.ArrayLike) -> float:
        """Distance of X from the real span of the basis."""
        m = numlin.as_cmatrix(x)
        coeffs = np.einsum("rij,ij->r", self.basis.conj(), m).real
        return numlin.frobenius(m - np.einsum("r,rij->ij", coeffs, self.basis))


def _reduced_nullspace(a: npt.NDArray, tol: float) -> npt.NDArray:
    """Nullspace of a tall matrix, computed from the R factor of its QR."""
    if a.shape[0] > a.shape[1]:
        (r,) = scipy.linalg.qr(a, mode="r")
        a = r[: a.shape[1]]
    return numlin.nullspace(a, tol)


def classical_commutant_basis(
    f: triple.FiniteRealSpectralTriple, tol: float = common.DEFAULT_TOLERANCE
) -> CommutantReport:
    """Brute-force the real space of J-compatible operators commuting with D and γ.

    Operators commuting with D are spanned by w_i·w_j* for eigenvectors of
    D with equal eigenvalues. Within that span the grading condition is a
    complex linear system and the condition on J_0 a real linear system in
    the real and imaginary parts of the coefficients.

    :param f: The triple.
    :param tol: Relative tolerance of eigenvalue clustering and rank decisions.
    :return: The real dimension and an orthonormal basis.
    """
    n = f.dim_h
    values, vectors = numlin.hermitian_eigensystem(f.dirac, tol)
    scale = max(1.0, float(np.max(np.abs(values), initial=0.0)))
    close = np.abs(values[:, None] - values[None, :]) < tol * scale * np.sqrt(n)
    rows, cols = np.nonzero(close)
    units = np.einsum("ap,bp->pab", vectors[:, rows], vectors[:, cols].conj())
    logger.debug(f"Operators commuting with D: complex dimension {len(rows)}.")

    if f.is_even:
        gamma = f.grading_matrix()
        system = np.einsum("pab,bc->pac", units, gamma) - np.einsum(
            "ab,pbc->pac", gamma, units
        )
        z = _reduced_nullspace(system.reshape(len(rows), -1).T, tol)
        units = np.einsum("pq,pab->qab", z, units)
        logger.debug(f"... also commuting with γ: complex dimension {len(units)}.")

    m = f.real_structure.matrix
    twisted = np.einsum("ab,qbc->qac", m, units.conj())
    straight = np.einsum("qab,bc->qac", units, m)
    columns = np.concatenate(
        [twisted - straight, -1j * (twisted + straight)]
    ).reshape(2 * len(units), -1)
    real_system = np.concatenate([columns.real, columns.imag], axis=1).T
    r = _reduced_nullspace(real_system, tol)
    q = len(units)
    complex_coeffs = r[:q] + 1j * r[q:]
    basis = np.einsum("qr,qab->rab", complex_coeffs, units)

    report = CommutantReport(tolerance=tol, real_dimension=basis.shape[0], basis=basis)
    report.info["real_dimension"] = report.real_dimension
    limit = common.threshold(tol, n, numlin.frobenius(f.dirac))
    dirac = max(
        (numlin.frobenius(numlin.commutator(x, f.dirac)) for x in basis), default=0.0
    )
    report.add("dirac", dirac, limit)
    if f.is_even:
        gamma = f.grading_matrix()
        report.add(
            "grading",
            max(
                (numlin.frobenius(numlin.commutator(x, gamma)) for x in basis),
                default=0.0,
            ),
            common.threshold(tol, n),
        )
    report.add(
        "real_structure",
        max((numlin.frobenius(m @ x.conj() - x @ m) for x in basis), default=0.0),
        common.threshold(tol, n),
    )
    logger.debug(f"Commutant of '{f.name}' has real dimension {basis.shape[0]}.")
    return report


@dataclasses.dataclass(frozen=True, eq=False)
class BlockAnsatz:
    """Blocks of U on the lepton and quark parts of H_F.

    'alpha[i, j1, k1]' is the n×n block matrix (d×d entries) of U between
    the chiralities j1 and k1 of the lepton with isospin i, and
    'beta[i, j0, k0, j1, k1]' the one between the quark colors j0, k0 and
    the chiralities j1, k1. The arrays have shapes (2, 4, 4, n, n, d, d)
    and (2, 3, 3, 4, 4, n, n, d, d).
    """

    n: int

    aux_dim: int

    alpha: npt.NDArray[np.complex128]

    beta: npt.NDArray[np.complex128]

    def x_matrix(self, s: int, m: int) -> numlin.BlockMatrix:
        """X(s, m) = Σ e_ij ⊗ (β^{down,i,j}_{p_L,p_L})_{sm}."""
        return numlin.BlockMatrix.from_blocks(
            self.beta[1, :, :, Chirality.P_L, Chirality.P_L, s, m]
        )

    def t_matrix(self, m: int) -> numlin.BlockMatrix:
        """Σ e_ij ⊗ (β^{up,i,j}_{p_L,p_L})_{mm}, the generator T_m."""
        return numlin.BlockMatrix.from_blocks(
            self.beta[0, :, :, Chirality.P_L, Chirality.P_L, m, m]
        )


def extract_block_ansatz(
    c: Corepresentation, tol: float = common.DEFAULT_TOLERANCE
) -> BlockAnsatz:
    """Split U into the α and β blocks.

    :raises StructuralError: If U mixes the isospins or leptons with quarks.
    """
    if c.dim_h % 32:
        raise common.ShapeError(f"Dimension {c.dim_h} is not of the form 32n.")
    n, d = c.dim_h // 32, c.aux_dim
    b = c.blocks.reshape(2, 4, 4, n, 2, 4, 4, n, d, d)
    limit = common.threshold(tol, c.dim_h * d, numlin.frobenius(c.u))

    mixing = numlin.frobenius(b[0, :, :, :, 1]) + numlin.frobenius(b[1, :, :, :, 0])
    if not mixing < limit:
        raise common.StructuralError(
            "isospin", f"U mixes the isospins, residual {mixing:.3e}."
        )
    cross = numlin.frobenius(b[:, 0, :, :, :, 1:]) + numlin.frobenius(
        b[:, 1:, :, :, :, 0]
    )
    if not cross < limit:
        raise common.StructuralError(
            "lepton-quark", f"U mixes leptons with quarks, residual {cross:.3e}."
        )

    isospin = np.arange(2)
    same = b[isospin, :, :, :, isospin]
    alpha = same[:, 0, :, :, 0].transpose(0, 1, 3, 2, 4, 5, 6)
    beta = same[:, 1:, :, :, 1:].transpose(0, 1, 4, 2, 5, 3, 6, 7, 8)
    return BlockAnsatz(n, d, alpha, beta)


def _dirac_blocks(
    f: triple.FiniteRealSpectralTriple, n: int
) -> dict[str, common.CMatrix]:
    """Υ_ν, Υ_R and Υ_d read off the Dirac operator of the triple."""
    d = f.dirac.reshape(2, 4, 4, n, 2, 4, 4, n)
    up, down = smtriple.Isospin.UP, smtriple.Isospin.DOWN
    lepton, q1 = smtriple.ColorSector.LEPTON, smtriple.ColorSector.Q1
    pl, pbr, pr = Chirality.P_L, Chirality.PBAR_R, Chirality.P_R
    return {
        "nu": d[up, lepton, pl, :, up, lepton, pr, :],
        "r": d[up, lepton, pbr, :, up, lepton, pr, :],
        "d": d[down, q1, pl, :, down, q1, pr, :],
    }


def _block_bar(blocks: npt.NDArray) -> npt.NDArray:
    """Block bar of an n×n block matrix stored as (n, n, d, d)."""
    return _dagger(blocks)


def _diagonal_defect(blocks: npt.NDArray) -> float:
    """Norm of the off-diagonal blocks of arrays shaped (..., n, n, d, d)."""
    n = blocks.shape[-4]
    off = ~np.eye(n, dtype=bool)
    return numlin.frobenius(blocks[..., off, :, :])


def _as_matrix(blocks: npt.NDArray) -> common.CMatrix:
    return numlin.BlockMatrix.from_blocks(blocks).data


def structural_reduction_check(
    f: triple.FiniteRealSpectralTriple,
    report: Optional[CommutantReport],
    c: Corepresentation,
    tol: float = common.DEFAULT_TOLERANCE,
) -> cqgrep.RelationReport:
    """Check the block structure every quantum isometry of F must have.

    (a) Every element of the classical commutant preserves the four
    subspaces of ν, e, u and d. (b) The blocks of U satisfy the
    equalities derived from the isometry conditions: chirality-diagonal
    blocks, electrons diagonal in the generation, J-conjugate blocks,
    Υ-intertwining, C*β^{down}C diagonal, biunitary V, T_m and X(m, m),
    and a unitary x_0 with α^{up}_{11} = diag(x_0x_k), the electron
    blocks diag(x_k) and β^{down}_{11} = x_0*·β^{up}_{11}.
    (c) If U carries its generators, α^{up}_{11} = diag(x_0x_k),
    α^{down}_{22} = diag(x_k*) and β^{down}_{11} = diag(x_0*·(T_m)_{ij}).

    :param f: The Standard Model triple U acts on.
    :param report: Commutant basis for part (a), or None to skip it.
    :param c: A corepresentation passing the isometry conditions.
    :param tol: Relative tolerance.
    :return: The report.
    :raises StructuralError: If U does not have the block pattern.
    """
    result = cqgrep.RelationReport(tolerance=tol)
    n = f.dim_h // 32
    d = c.aux_dim

    if report is not None:
        invariance = 0.0
        for p in smtriple.sector_projectors(n):
            for x in report.basis:
                invariance = max(invariance, numlin.frobenius(numlin.commutator(x, p)))
        result.add("commutant.sectors", invariance, common.threshold(tol, f.dim_h))

    ansatz = extract_block_ansatz(c, tol)
    alpha, beta = ansatz.alpha, ansatz.beta
    limit = common.threshold(tol, f.dim_h * d)
    pl, pbr, pbl, pr = (int(k) for k in Chirality)
    chir = np.arange(4)
    off_chirality = chir[:, None] != chir[None, :]

    result.add("alpha.offdiagonal", numlin.frobenius(alpha[:, off_chirality]), limit)
    result.add(
        "beta.offdiagonal", numlin.frobenius(beta[:, :, :, off_chirality]), limit
    )
    result.add("alpha2.diagonal", _diagonal_defect(alpha[1, chir, chir]), limit)
    result.add("beta.diagonal", _diagonal_defect(beta[:, :, :, chir, chir]), limit)

    bar_defect = max(
        numlin.frobenius(alpha[:, pbl, pbl] - _block_bar(alpha[:, pl, pl])),
        numlin.frobenius(alpha[:, pr, pr] - _block_bar(alpha[:, pbr, pbr])),
        numlin.frobenius(
            beta[:, :, :, pbl, pbl] - _block_bar(beta[:, :, :, pl, pl])
        ),
        numlin.frobenius(
            beta[:, :, :, pr, pr] - _block_bar(beta[:, :, :, pbr, pbr])
        ),
    )
    result.add("j_conjugate", bar_defect, limit)
    result.add(
        "alpha2.bar",
        max(
            numlin.frobenius(alpha[1, pbr, pbr] - _block_bar(alpha[1, pl, pl])),
            numlin.frobenius(alpha[1, pr, pr] - alpha[1, pl, pl]),
        ),
        limit,
    )
    result.add(
        "beta_up.bar",
        numlin.frobenius(beta[0, :, :, pbr, pbr] - _block_bar(beta[0, :, :, pl, pl])),
        limit,
    )

    ups = _dirac_blocks(f, n)
    ups_nu = numlin.promote(ups["nu"], d)
    ups_r = numlin.promote(ups["r"], d)
    a11 = _as_matrix(alpha[0, pl, pl])
    a22 = _as_matrix(alpha[0, pbr, pbr])
    a44 = _as_matrix(alpha[0, pr, pr])
    a22_bar = _as_matrix(_block_bar(alpha[0, pbr, pbr]))
    result.add(
        "alpha_up.intertwining",
        max(
            numlin.frobenius(a11 @ ups_nu - ups_nu @ a44),
            numlin.frobenius(a11 @ ups_nu - ups_nu @ a11),
            numlin.frobenius(a44 @ ups_nu - ups_nu @ a11),
            numlin.frobenius(a22 @ ups_r - ups_r @ a22_bar),
        ),
        common.threshold(tol, f.dim_h * d, numlin.frobenius(f.dirac)),
    )
    result.add("alpha_up.diagonal", _diagonal_defect(alpha[0, pl, pl]), limit)

    ckm = numlin.promote(smtriple.extract_ckm(ups["d"], tol).ckm, d)
    ckm_defect = 0.0
    for j in range(3):
        for k in range(3):
            rotated = ckm.conj().T @ _as_matrix(beta[1, j, k, pl, pl]) @ ckm
            ckm_defect = max(
                ckm_defect,
                _diagonal_defect(numlin.BlockMatrix.from_matrix(rotated, d).blocks),
            )
    result.add("beta_down.ckm", ckm_defect, limit)

    v_block = numlin.BlockMatrix.from_blocks(alpha[0, pbr, pbr])
    biunitary = max(numlin.is_biunitary(v_block, tol).residuals.values())
    for m in range(n):
        for b in (ansatz.t_matrix(m), ansatz.x_matrix(m, m)):
            biunitary = max(biunitary, *numlin.is_biunitary(b, tol).residuals.values())
    result.add("biunitary", biunitary, limit)

    electron = alpha[1, pl, pl][np.arange(n), np.arange(n)]
    x0_candidates = [alpha[0, pl, pl][k, k] @ _dagger(electron[k]) for k in range(n)]
    x0 = x0_candidates[0]
    result.add(
        "x0.consistent",
        max(numlin.frobenius(xk - x0) for xk in x0_candidates),
        limit,
    )
    result.add("x0.unitary", numlin.unitarity_residual(x0), common.threshold(tol, d))
    result.add(
        "beta_down.x0",
        numlin.frobenius(
            beta[1, :, :, pl, pl]
            - np.einsum("ab,jkmnbc->jkmnac", _dagger(x0), beta[0, :, :, pl, pl])
        ),
        limit,
    )

    g = c.generators
    if g is not None:
        diag = np.arange(n)
        gx0 = g.x[0]
        result.add(
            "generators.match",
            max(
                numlin.frobenius(alpha[0, pl, pl][diag, diag] - gx0 @ g.x[1:]),
                numlin.frobenius(alpha[1, pbr, pbr][diag, diag] - _dagger(g.x[1:])),
                numlin.frobenius(
                    beta[1, :, :, pl, pl][:, :, diag, diag]
                    - np.moveaxis(_dagger(gx0) @ g.t, 0, 2)
                ),
            ),
            limit,
        )

    if not result.passed:
        logger.warning(f"Block structure violated: {', '.join(result.failures())}.")
    return result
