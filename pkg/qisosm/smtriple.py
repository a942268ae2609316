"""The finite spectral triple of the Standard Model internal space.

The Hilbert space is H_F = C² ⊗ C⁴ ⊗ C⁴ ⊗ Cⁿ with the factors

* isospin: (up, down),
* color sector: (lepton, q1, q2, q3),
* chirality sector: (p_L, p̄_R, p̄_L, p_R),
* generation: 1..n,

flattened row-major, so the chirality sector times the generation forms
the M_4(M_n) block structure the Dirac operator is written in.
"""

from __future__ import annotations

import dataclasses
import enum
import itertools
from typing import Final, NamedTuple, Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg

from . import common, numlin, triple
from .log import logger

# Real structure on the chirality sector, p_L ↔ p̄_L and p̄_R ↔ p_R.
J_CHIRALITY: Final = np.array(
    [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=np.complex128
)

GRADING_CHIRALITY: Final = np.diag([1.0, 1.0, -1.0, -1.0]).astype(np.complex128)

# Sizes of the summands of B_F = C ⊕ C ⊕ M_2(C) ⊕ M_3(C).
SUMMAND_DIMS: Final = (1, 1, 2, 3)

SM_SIGNS: Final = triple.KOSigns(1, 1, -1)

REGIMES: Final = ("generic", "minimal", "invertible")


class Isospin(enum.IntEnum):
    """First tensor factor of H_F."""

    UP = 0
    DOWN = 1


class ColorSector(enum.IntEnum):
    """Second tensor factor of H_F."""

    LEPTON = 0
    Q1 = 1
    Q2 = 2
    Q3 = 3


class Chirality(enum.IntEnum):
    """Third tensor factor of H_F."""

    P_L = 0
    PBAR_R = 1
    PBAR_L = 2
    P_R = 3

    @property
    def is_antiparticle(self) -> bool:
        """True for the two antiparticle sectors."""
        return self in (Chirality.PBAR_R, Chirality.PBAR_L)

    @property
    def handedness(self) -> str:
        """'L' or 'R'."""
        return "L" if self in (Chirality.P_L, Chirality.PBAR_L) else "R"


def _unit(k: int, i: int, j: int) -> common.CMatrix:
    """The matrix unit e_ij of M_k (zero based)."""
    e = np.zeros((k, k), dtype=np.complex128)
    e[i, j] = 1.0
    return e


@dataclasses.dataclass(frozen=True)
class SMBasisLabel:
    """Label of a basis vector of H_F, the generation is one based."""

    isospin: Isospin

    color: ColorSector

    chirality: Chirality

    generation: int

    @property
    def particle(self) -> str:
        """Particle family: 'nu', 'e', 'u' or 'd'."""
        if self.color == ColorSector.LEPTON:
            return "nu" if self.isospin == Isospin.UP else "e"
        return "u" if self.isospin == Isospin.UP else "d"

    @property
    def name(self) -> str:
        """Physics name, e.g. 'nu_{L,1}', 'ebar_{R,2}' or 'u_{L,3,1}'."""
        stem = self.particle + ("bar" if self.chirality.is_antiparticle else "")
        indices = [self.chirality.handedness]
        if self.color != ColorSector.LEPTON:
            indices.append(str(int(self.color)))
        indices.append(str(self.generation))
        return f"{stem}_{{{','.join(indices)}}}"


def basis_index(
    isospin: int, color: int, chirality: int, generation: int, n: int
) -> int:
    """Flat index of a basis vector, the generation is one based.

    :raises RangeError: If a component is out of range.
    """
    if not (
        0 <= isospin < 2
        and 0 <= color < 4
        and 0 <= chirality < 4
        and 1 <= generation <= n
    ):
        raise common.RangeError(
            f"Basis label ({isospin}, {color}, {chirality}, {generation}) "
            f"out of range for n={n}."
        )
    return ((isospin * 4 + color) * 4 + chirality) * n + generation - 1


def label_basis(index: int, n: int) -> SMBasisLabel:
    """Label of the basis vector with the given flat index.

    :param index: Flat index, 0 <= index < 32n.
    :param n: Number of generations.
    :return: The label.
    :raises RangeError: If the index is out of range.
    """
    if not 0 <= index < 32 * n:
        raise common.RangeError(f"Basis index {index} out of range [0, {32 * n}).")
    rest, gen = divmod(index, n)
    rest, chir = divmod(rest, 4)
    iso, color = divmod(rest, 4)
    return SMBasisLabel(Isospin(iso), ColorSector(color), Chirality(chir), gen + 1)


def particle_index(label: SMBasisLabel, n: int) -> int:
    """Flat index of a labeled basis vector, inverse of :func:`label_basis`."""
    return basis_index(
        label.isospin, label.color, label.chirality, label.generation, n
    )


@dataclasses.dataclass(frozen=True, eq=False)
class YukawaSet:
    """The Yukawa matrices defining D_F.

    If the CKM matrix is known, 'delta_down' holds the diagonal of δ_↓
    with Υ_d = C·δ_↓·C*.
    """

    n: int

    ups_nu: common.CMatrix

    ups_e: common.CMatrix

    ups_u: common.CMatrix

    ups_d: common.CMatrix

    ups_r: common.CMatrix

    ckm: Optional[common.CMatrix] = None

    delta_down: Optional[common.RealArray] = None

    def __post_init__(self) -> None:  # noqa: D105
        if self.n < 1:
            raise common.ShapeError(
                f"Number of generations must be positive, got {self.n}."
            )
        for field in ("ups_nu", "ups_e", "ups_u", "ups_d", "ups_r", "ckm"):
            value = getattr(self, field)
            if value is None:
                continue
            m = numlin.as_cmatrix(value, field)
            if m.shape != (self.n, self.n):
                raise common.ShapeError(
                    f"{field} must have shape {(self.n, self.n)}, got {m.shape}."
                )
            object.__setattr__(self, field, m)
        if self.delta_down is not None:
            delta = np.asarray(self.delta_down, dtype=np.float64).reshape(-1)
            if delta.shape != (self.n,):
                raise common.ShapeError(
                    f"delta_down must have {self.n} entries, got {delta.size}."
                )
            object.__setattr__(self, "delta_down", delta)

    @classmethod
    def from_ckm(
        cls,
        ups_nu: npt.ArrayLike,
        ups_e: npt.ArrayLike,
        ups_u: npt.ArrayLike,
        ckm: npt.ArrayLike,
        delta_down: npt.ArrayLike,
        ups_r: npt.ArrayLike,
    ) -> YukawaSet:
        """Create the set with Υ_d = C·diag(δ)·C*."""
        c = numlin.as_cmatrix(ckm, "ckm")
        delta = np.asarray(delta_down, dtype=np.float64)
        ups_d = (c * delta) @ c.conj().T
        return cls(
            c.shape[0], ups_nu, ups_e, ups_u, ups_d, ups_r, ckm=c, delta_down=delta
        )

    def mixing(self, tol: float = common.DEFAULT_TOLERANCE) -> CKMDecomposition:
        """The CKM matrix, as given or extracted from Υ_d."""
        if self.ckm is not None and self.delta_down is not None:
            return CKMDecomposition(self.ckm, np.diag(self.delta_down))
        return extract_ckm(self.ups_d, tol)


@dataclasses.dataclass
class ValidationReport(common.CheckReport):
    """Hypotheses on the Yukawa matrices, with the two regime flags."""

    minimal_regime: bool = False
    """
    Υ_ν = 0, the minimal Standard Model.
    """

    nu_invertible: bool = False


def _offdiagonal_norm(m: common.CMatrix) -> float:
    return numlin.frobenius(m - np.diag(np.diagonal(m)))


def _hermitian_eigenvalues(m: common.CMatrix) -> common.RealArray:
    return scipy.linalg.eigvalsh((m + m.conj().T) / 2)


def _min_gap(values: npt.ArrayLike) -> float:
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size < 2:
        return float("inf")
    return float(np.min(np.diff(v)))


def validate_params(
    p: YukawaSet, tol: float = common.DEFAULT_TOLERANCE
) -> ValidationReport:
    """Check the hypotheses on the Yukawa matrices.

    Υ_u and Υ_e must be positive and diagonal, Υ_d positive, Υ_ν positive
    (possibly zero), Υ_R symmetric. The eigenvalues of Υ_e, Υ_u and Υ_d
    must be nonzero and simple, and the spectra of different Υ matrices
    disjoint. Υ_ν = 0 is the minimal regime and not an error.

    :param p: The Yukawa matrices.
    :param tol: Relative tolerance.
    :return: The report.
    :raises ContractError: If a matrix norm exceeds 'common.MAX_MAGNITUDE'.
    """
    n = p.n
    scale = max(
        numlin.frobenius(m) for m in (p.ups_nu, p.ups_e, p.ups_u, p.ups_d, p.ups_r)
    )
    if not scale <= common.MAX_MAGNITUDE:
        raise common.ContractError(
            f"Yukawa matrices are too large to be checked, norm {scale:.3e}."
        )
    limit = common.threshold(tol, n, scale)
    report = ValidationReport(tolerance=tol)

    spectra: dict[str, common.RealArray] = {}
    for name, m in (
        ("nu", p.ups_nu),
        ("e", p.ups_e),
        ("u", p.ups_u),
        ("d", p.ups_d),
    ):
        report.add(f"ups_{name}.hermitian", numlin.hermiticity_residual(m), limit)
        w = _hermitian_eigenvalues(m)
        spectra[name] = w
        report.add(f"ups_{name}.positive", max(0.0, -float(w[0])), limit)

    for name, m in (("e", p.ups_e), ("u", p.ups_u)):
        report.add(f"ups_{name}.diagonal", _offdiagonal_norm(m), limit)

    for name in ("e", "u", "d"):
        w = spectra[name]
        smallest = float(np.min(np.abs(w)))
        report.add_condition(f"ups_{name}.nonzero", smallest, smallest > limit)
        gap = _min_gap(w)
        report.add_condition(
            f"ups_{name}.multiplicity_one",
            gap if np.isfinite(gap) else 0.0,
            gap > limit,
        )

    report.add("ups_r.symmetric", numlin.frobenius(p.ups_r - p.ups_r.T), limit)

    nu_zero = numlin.frobenius(p.ups_nu) < limit
    report.minimal_regime = bool(nu_zero)
    report.nu_invertible = bool(np.min(np.abs(spectra["nu"])) > limit)

    for x, y in itertools.combinations(("nu", "e", "u", "d"), 2):
        distance = float(np.min(np.abs(spectra[x][:, np.newaxis] - spectra[y])))
        report.add_condition(f"spectra_disjoint.{x}_{y}", distance, distance > limit)

    if p.ckm is not None:
        report.add(
            "ckm.unitary",
            numlin.unitarity_residual(p.ckm),
            common.threshold(tol, n),
        )
        if p.delta_down is not None:
            rebuilt = (p.ckm * p.delta_down) @ p.ckm.conj().T
            residual = numlin.frobenius(rebuilt - p.ups_d)
            report.add("ckm.reconstruction", residual, limit)

    report.info["minimal_regime"] = report.minimal_regime
    report.info["nu_invertible"] = report.nu_invertible
    report.info["eigenvalues"] = {k: v.tolist() for k, v in spectra.items()}

    if not report.passed:
        failed = ", ".join(report.failures())
        logger.warning(f"Yukawa parameters violate: {failed}.")
    return report


def upsilon_block(
    ups: npt.ArrayLike, ups_r: Optional[npt.ArrayLike] = None
) -> common.CMatrix:
    """The 4n×4n block of D_F for one particle family.

    Υ couples p_L with p_R and its transpose couples p̄_R with p̄_L; Υ_R
    (neutrinos only) couples p̄_R with p_R.
    """
    u = numlin.as_cmatrix(ups)
    r = np.zeros_like(u) if ups_r is None else numlin.as_cmatrix(ups_r)
    z = np.zeros_like(u)
    return np.block(
        [
            [z, z, z, u],
            [z, z, u.T, r],
            [z, u.conj(), z, z],
            [u.conj().T, r.conj().T, z, z],
        ]
    )


def build_dirac(p: YukawaSet) -> common.CMatrix:
    """The Dirac operator D_F of the Yukawa set.

    :raises ContractError: If an entry of D_F is not finite.
    """
    e11 = _unit(2, 0, 0)
    e22 = _unit(2, 1, 1)
    lepton = _unit(4, 0, 0)
    quark = np.eye(4) - lepton
    d = (
        numlin.kron(e11, lepton, upsilon_block(p.ups_nu, p.ups_r))
        + numlin.kron(e11, quark, upsilon_block(p.ups_u))
        + numlin.kron(e22, lepton, upsilon_block(p.ups_e))
        + numlin.kron(e22, quark, upsilon_block(p.ups_d))
    )
    return numlin.as_cmatrix(d, "D_F")


def build_grading(n: int) -> common.CMatrix:
    """γ_F = 1 ⊗ 1 ⊗ diag(1, 1, -1, -1) ⊗ 1."""
    return numlin.kron(np.eye(2), np.eye(4), GRADING_CHIRALITY, np.eye(n))


def build_real_structure(n: int) -> triple.AntiUnitary:
    """J_F = J_0 ∘ (complex conjugation)."""
    return triple.AntiUnitary(
        numlin.kron(np.eye(2), np.eye(4), J_CHIRALITY, np.eye(n))
    )


def build_representation(
    lam: complex,
    lam_prime: complex,
    q: npt.ArrayLike,
    m: npt.ArrayLike,
    n: int,
) -> common.CMatrix:
    """The operator ⟨λ, λ', q, m⟩ of B_F on H_F.

    q acts on the isospin of p_L, diag(λ, λ') on the isospin of p_R and
    diag(λ, m) on the color sector of both antiparticle chiralities.
    """
    q = numlin.as_cmatrix(q, "q")
    m = numlin.as_cmatrix(m, "m")
    if q.shape != (2, 2) or m.shape != (3, 3):
        raise common.ShapeError(
            f"Expected q of shape (2, 2) and m of shape (3, 3), "
            f"got {q.shape} and {m.shape}."
        )
    eye_n = np.eye(n)
    return (
        numlin.kron(q, np.eye(4), _unit(4, 0, 0), eye_n)
        + numlin.kron(np.diag([lam, lam_prime]), np.eye(4), _unit(4, 3, 3), eye_n)
        + numlin.kron(
            np.eye(2),
            scipy.linalg.block_diag([[lam]], m),
            _unit(4, 1, 1) + _unit(4, 2, 2),
            eye_n,
        )
    )


def build_real_representation(
    lam: complex, q: npt.ArrayLike, m: npt.ArrayLike, n: int
) -> common.CMatrix:
    """The representation π(λ, q, m) of the real algebra A_F."""
    return build_representation(lam, np.conj(lam), q, m, n)


def build_algebra(n: int) -> triple.BlockAlgebra:
    """B_F = C ⊕ C ⊕ M_2(C) ⊕ M_3(C) embedded through ⟨λ, λ', q, m⟩."""
    return triple.BlockAlgebra.from_embedding(
        SUMMAND_DIMS,
        lambda parts: build_representation(
            parts[0][0, 0], parts[1][0, 0], parts[2], parts[3], n
        ),
    )


def build_triple(
    p: YukawaSet, tol: float = common.DEFAULT_TOLERANCE
) -> triple.FiniteRealSpectralTriple:
    """Construct the triple F = (B_F, H_F, D_F, γ_F, J_F).

    :param p: The Yukawa matrices.
    :param tol: Tolerance of the parameter validation.
    :return: The triple of dimension 32n with KO signs (+1, +1, -1).
    :raises ParameterError: If the parameters violate a hypothesis.
    """
    report = validate_params(p, tol)
    if not report.passed:
        raise common.ParameterError(report)

    t = triple.FiniteRealSpectralTriple(
        build_algebra(p.n),
        build_dirac(p),
        build_real_structure(p.n),
        SM_SIGNS,
        build_grading(p.n),
        f"F(n={p.n})",
    )
    logger.debug(f"Built Standard Model triple with n={p.n}, dimension {t.dim_h}.")
    return t


def sector_projectors(n: int) -> list[common.CMatrix]:
    """Projectors onto the subspaces V₁..V₄ of ν, e, u and d."""
    lepton = _unit(4, 0, 0)
    quark = np.eye(4) - lepton
    eye = np.eye(4 * n)
    return [
        numlin.kron(_unit(2, 0, 0), lepton, eye),
        numlin.kron(_unit(2, 1, 1), lepton, eye),
        numlin.kron(_unit(2, 0, 0), quark, eye),
        numlin.kron(_unit(2, 1, 1), quark, eye),
    ]


class CKMDecomposition(NamedTuple):
    """Υ_d = C·δ_↓·C* with C special unitary."""

    ckm: common.CMatrix
    delta_down: common.CMatrix


def extract_ckm(
    ups_d: npt.ArrayLike, tol: float = common.DEFAULT_TOLERANCE
) -> CKMDecomposition:
    """Diagonalize the down-quark Yukawa matrix.

    The eigenvalues are ascending, each column of C is rotated so that its
    first nonzero entry is real positive and finally the common phase is
    fixed by det(C) = 1.

    :param ups_d: Positive matrix Υ_d.
    :param tol: Relative tolerance of the positivity check.
    :return: The CKM matrix C and the diagonal matrix δ_↓.
    :raises ContractError: If Υ_d is not positive.
    """
    m = numlin.as_cmatrix(ups_d, "ups_d")
    w, v = numlin.hermitian_eigensystem(m, tol)
    limit = common.threshold(tol, m.shape[0], numlin.frobenius(m))
    if w.size and w[0] < -limit:
        raise common.ContractError(
            f"Υ_d is not positive, smallest eigenvalue {w[0]:.3e}."
        )
    phase = np.angle(np.linalg.det(v))
    c = v * np.exp(-1j * phase / m.shape[0])
    return CKMDecomposition(c, np.diag(np.clip(w, 0.0, None)).astype(np.complex128))


def standard_ckm(
    theta12: float, theta13: float, theta23: float, delta: float
) -> common.CMatrix:
    """Three-angle one-phase mixing matrix.

    C = R₂₃·Δ·R₁₃·Δ*·R₁₂ with the rotations R_ij and Δ = diag(1, 1, e^{iδ}).
    """
    c12, s12 = np.cos(theta12), np.sin(theta12)
    c13, s13 = np.cos(theta13), np.sin(theta13)
    c23, s23 = np.cos(theta23), np.sin(theta23)
    r23 = np.array([[1, 0, 0], [0, c23, s23], [0, -s23, c23]], dtype=np.complex128)
    r13 = np.array([[c13, 0, s13], [0, 1, 0], [-s13, 0, c13]], dtype=np.complex128)
    r12 = np.array([[c12, s12, 0], [-s12, c12, 0], [0, 0, 1]], dtype=np.complex128)
    phases = np.diag([1.0, 1.0, np.exp(1j * delta)])
    return np.linalg.multi_dot([r23, phases, r13, phases.conj(), r12])


def random_yukawa_set(
    rng: np.random.Generator, n: int = 3, regime: str = "generic"
) -> YukawaSet:
    """Draw Yukawa matrices satisfying all hypotheses.

    The spectra are drawn from disjoint intervals: Υ_ν from [0.1, 0.9),
    Υ_e from [1, 2), Υ_u from [2, 3) and Υ_d from [3, 4). In the
    'minimal' regime Υ_ν and Υ_R vanish, otherwise Υ_ν is invertible and
    Υ_R a random complex symmetric matrix.

    :param rng: Random generator.
    :param n: Number of generations.
    :param regime: One of 'generic', 'minimal' or 'invertible'.
    :return: The Yukawa set, with the CKM matrix it was built from.
    """
    if regime not in REGIMES:
        raise common.ContractError(f"Unknown regime '{regime}', expected {REGIMES}.")

    def spectrum(low: float, high: float) -> common.RealArray:
        # Evenly spaced bins keep the eigenvalues simple.
        edges = np.linspace(low, high, n + 1)
        return edges[:-1] + rng.uniform(0.1, 0.9, n) * (edges[1] - edges[0])

    ups_e = np.diag(spectrum(1.0, 2.0)).astype(np.complex128)
    ups_u = np.diag(spectrum(2.0, 3.0)).astype(np.complex128)
    ckm = numlin.haar_unitary(rng, n)
    ckm = ckm * np.exp(-1j * np.angle(np.linalg.det(ckm)) / n)
    delta_down = spectrum(3.0, 4.0)

    if regime == "minimal":
        ups_nu = np.zeros((n, n), dtype=np.complex128)
        ups_r = np.zeros((n, n), dtype=np.complex128)
    else:
        ups_nu = numlin.random_positive(rng, n, spectrum(0.1, 0.9))
        z = numlin.complex_gaussian(rng, (n, n))
        ups_r = z + z.T

    return YukawaSet.from_ckm(ups_nu, ups_e, ups_u, ckm, delta_down, ups_r)
