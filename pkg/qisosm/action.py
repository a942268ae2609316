"""Spectral actions and their invariance under quantum isometries.

Elements of H ⊗ Q are handled as H-indexed families of d×d blocks,
arrays of shape (N, d, d). Operators on H ⊗ K act on a family by left
multiplication, and the antilinear extension J ⊗ * of the real structure
acts by J on H and by the adjoint on each block.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Sequence
from typing import Final, Optional

import numpy as np
import numpy.typing as npt

from . import common, isometry, numlin, triple
from .log import logger

VARIANTS: Final = ("real", "plain")

CUTOFF_KINDS: Final = ("gaussian", "poly", "table")


@dataclasses.dataclass(frozen=True, eq=False)
class OneForm:
    """A one-form Σ a_i[D, b_i] on the Hilbert space of a triple."""

    a: common.CMatrix

    self_adjoint: bool
    """
    Whether the form was symmetrized to (A + A*)/2.
    """


@dataclasses.dataclass(frozen=True)
class CutoffFunction:
    """Even bounded cut-off function f, evaluated as f(x/Λ).

    'gaussian' is exp(-x²). 'poly' is Σ_k c_k·x^{2k} for |x| ≤ 1 and
    constant beyond. 'table' interpolates linearly in |x| between the
    given points and is constant outside them.
    """

    kind: str = "gaussian"

    coefficients: tuple[float, ...] = ()

    points: tuple[tuple[float, float], ...] = ()

    scale: float = 1.0
    """
    The energy scale Λ.
    """

    def __post_init__(self) -> None:  # noqa: D105
        if self.kind not in CUTOFF_KINDS:
            raise common.ContractError(
                f"Unknown cut-off '{self.kind}', expected one of {CUTOFF_KINDS}."
            )
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise common.ContractError(f"Λ must be positive, got {self.scale}.")
        if self.kind == "poly" and not self.coefficients:
            raise common.ContractError("Polynomial cut-off needs coefficients.")
        if self.kind == "table":
            xs = [x for x, _ in self.points]
            if len(xs) < 2 or min(xs) < 0 or any(np.diff(xs) <= 0):
                raise common.ContractError(
                    "Table cut-off needs at least two points with strictly "
                    "increasing nonnegative abscissae."
                )

    @classmethod
    def gaussian(cls, scale: float = 1.0) -> CutoffFunction:
        """f(x) = exp(-x²)."""
        return cls("gaussian", scale=scale)

    @classmethod
    def even_polynomial(
        cls, coefficients: Sequence[float], scale: float = 1.0
    ) -> CutoffFunction:
        """f(x) = Σ_k c_k·x^{2k} on [-1, 1]."""
        coeffs = tuple(float(c) for c in coefficients)
        return cls("poly", coefficients=coeffs, scale=scale)

    @classmethod
    def table(
        cls, points: Sequence[tuple[float, float]], scale: float = 1.0
    ) -> CutoffFunction:
        """Piecewise linear f through the points (|x|, f(x))."""
        return cls(
            "table",
            points=tuple((float(x), float(y)) for x, y in points),
            scale=scale,
        )

    def __call__(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Evaluate f(x/Λ) elementwise."""
        u = np.abs(np.asarray(x, dtype=np.float64)) / self.scale
        if self.kind == "gaussian":
            return np.exp(-(u**2))
        if self.kind == "poly":
            # polyval wants the highest degree first.
            return np.polyval(self.coefficients[::-1], np.minimum(u, 1.0) ** 2)
        xs, ys = zip(*self.points)
        return np.interp(u, xs, ys)


@dataclasses.dataclass
class ActionReport(common.CheckReport):
    """Bosonic and fermionic action of a fluctuated triple."""

    sb: float = 0.0

    sf: complex = 0.0

    spectrum: list[float] = dataclasses.field(default_factory=list)


def generate_one_form(
    f: triple.FiniteRealSpectralTriple,
    pairs: Sequence[tuple[Sequence[npt.ArrayLike], Sequence[npt.ArrayLike]]],
    self_adjoint: bool = False,
) -> OneForm:
    """Build A = Σ a_i[D, b_i] from summand matrices of a_i and b_i.

    :param f: The triple.
    :param pairs: Pairs (a_i, b_i), each given by its summand matrices.
    :param self_adjoint: Symmetrize the result to (A + A*)/2.
    :return: The one-form.
    """
    a = np.zeros_like(f.dirac)
    for left, right in pairs:
        b = f.algebra.embed(right)
        a += f.algebra.embed(left) @ numlin.commutator(f.dirac, b)
    if self_adjoint:
        a = (a + a.conj().T) / 2
    return OneForm(a, self_adjoint)


def random_one_form(
    f: triple.FiniteRealSpectralTriple, rng: np.random.Generator, terms: int = 2
) -> OneForm:
    """A random self-adjoint one-form with the given number of terms."""
    pairs = [
        (f.algebra.random_element(rng), f.algebra.random_element(rng))
        for _ in range(terms)
    ]
    return generate_one_form(f, pairs, self_adjoint=True)


def _check_self_adjoint(a: OneForm, tol: float) -> None:
    residual = numlin.hermiticity_residual(a.a)
    if not residual <= common.threshold(tol, a.a.shape[0], numlin.frobenius(a.a)):
        raise common.ContractError(
            f"One-form is not self-adjoint, residual {residual:.3e}."
        )


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise common.ContractError(
            f"Unknown action variant '{variant}', expected one of {VARIANTS}."
        )


def fluctuate(
    f: triple.FiniteRealSpectralTriple,
    a: OneForm,
    variant: str = "real",
    tol: float = common.DEFAULT_TOLERANCE,
) -> common.CMatrix:
    """The fluctuated Dirac operator.

    D + A + ε'·JAJ⁻¹ for the 'real' variant and D + A for 'plain'.

    :raises ContractError: If A is not self-adjoint.
    """
    _check_variant(variant)
    _check_self_adjoint(a, tol)
    d_a = f.dirac + a.a
    if variant == "real":
        d_a = d_a + f.signs.eps_prime * f.real_structure.conjugate_operator(a.a)
    return d_a


def bosonic_action(
    d_a: npt.ArrayLike,
    cutoff: CutoffFunction,
    tol: float = common.DEFAULT_TOLERANCE,
) -> float:
    """S_b = Tr f(D_A/Λ) = Σ_k f(λ_k/Λ)."""
    values, _ = numlin.hermitian_eigensystem(d_a, tol)
    return float(np.sum(cutoff(values)))


def h_plus_projector(f: triple.FiniteRealSpectralTriple) -> common.CMatrix:
    """(1 + γ)/2, the identity for odd triples."""
    return (np.eye(f.dim_h) + f.grading_matrix()) / 2


def fermionic_action(
    f: triple.FiniteRealSpectralTriple,
    a: OneForm,
    psi: npt.ArrayLike,
    variant: str = "real",
    project: bool = True,
    tol: float = common.DEFAULT_TOLERANCE,
) -> complex:
    """S_f = ⟨Jψ, D_Aψ⟩ (real) or ⟨ψ, D_Aψ⟩ (plain).

    The inner product is conjugate linear in the first argument. With
    'project' the vector is first projected to H_+.
    """
    v = np.asarray(psi, dtype=np.complex128)
    if project:
        v = h_plus_projector(f) @ v
    d_a = fluctuate(f, a, variant, tol)
    left = f.real_structure.apply(v) if variant == "real" else v
    return complex(np.vdot(left, d_a @ v))


def action_report(
    f: triple.FiniteRealSpectralTriple,
    a: OneForm,
    psi: npt.ArrayLike,
    cutoff: CutoffFunction,
    variant: str = "real",
    tol: float = common.DEFAULT_TOLERANCE,
) -> ActionReport:
    """Evaluate both parts of the action."""
    d_a = fluctuate(f, a, variant, tol)
    values, _ = numlin.hermitian_eigensystem(d_a, tol)
    report = ActionReport(tolerance=tol)
    report.sb = float(np.sum(cutoff(values)))
    report.sf = fermionic_action(f, a, psi, variant, tol=tol)
    report.spectrum = values.tolist()
    report.add(
        "dirac_selfadjoint",
        numlin.hermiticity_residual(d_a),
        common.threshold(tol, f.dim_h, numlin.frobenius(d_a)),
    )
    report.info["sb"] = report.sb
    report.info["sf"] = [report.sf.real, report.sf.imag]
    report.info["variant"] = variant
    return report


def j_star(
    f: triple.FiniteRealSpectralTriple, family: npt.ArrayLike
) -> npt.NDArray[np.complex128]:
    """(J ⊗ *)Ψ, with components Σ_h M_fh·Ψ_h*."""
    psi = np.asarray(family, dtype=np.complex128)
    return np.einsum("fh,hba->fab", f.real_structure.matrix, psi.conj())


def j_star_inverse(
    f: triple.FiniteRealSpectralTriple, family: npt.ArrayLike
) -> npt.NDArray[np.complex128]:
    """(J ⊗ *)⁻¹Φ, with components Σ_f M_fh·Φ_f*."""
    phi = np.asarray(family, dtype=np.complex128)
    return np.einsum("fh,fba->hab", f.real_structure.matrix, phi.conj())


def q_pairing(phi: npt.ArrayLike, psi: npt.ArrayLike) -> common.CMatrix:
    """The Q-valued pairing ⟨Φ, Ψ⟩_Q = Σ_h Φ_h*·Ψ_h."""
    phi = np.asarray(phi, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    return np.einsum("hba,hbc->ac", phi.conj(), psi)


def apply_operator(
    x: npt.ArrayLike, family: npt.ArrayLike
) -> npt.NDArray[np.complex128]:
    """Apply an operator on H ⊗ K to a family of blocks."""
    psi = np.asarray(family, dtype=np.complex128)
    n, d = psi.shape[0], psi.shape[-1]
    return (np.asarray(x) @ psi.reshape(n * d, d)).reshape(n, d, d)


def lift_vector(
    c: isometry.Corepresentation, psi: npt.ArrayLike
) -> npt.NDArray[np.complex128]:
    """The family U(ψ ⊗ 1)."""
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    family = np.einsum("h,ab->hab", v, np.eye(c.aux_dim))
    return apply_operator(c.u, family)


def extended_fluctuation(
    c: isometry.Corepresentation,
    f: triple.FiniteRealSpectralTriple,
    a: OneForm,
    variant: str = "real",
    tol: float = common.DEFAULT_TOLERANCE,
) -> tuple[common.CMatrix, common.CMatrix]:
    """Ã = U(A ⊗ 1)U* and the operator D_Ã on H ⊗ K.

    The J-term of the 'real' variant is ε'·U((JAJ⁻¹) ⊗ 1)U*, for d = 1
    this equals the entrywise conjugation (J_0 ⊗ 1)·conj(Ã)·(J_0 ⊗ 1)*.

    :return: The pair (Ã, D_Ã).
    """
    _check_variant(variant)
    _check_self_adjoint(a, tol)
    d = c.aux_dim
    u_h = c.u.conj().T
    a_tilde = c.u @ isometry.lift_operator(a.a, d) @ u_h
    d_tilde = isometry.lift_operator(f.dirac, d) + a_tilde
    if variant == "real":
        j_term = f.real_structure.conjugate_operator(a.a)
        d_tilde = d_tilde + f.signs.eps_prime * (
            c.u @ isometry.lift_operator(j_term, d) @ u_h
        )
    return a_tilde, d_tilde


def extended_dirac_on_family(
    f: triple.FiniteRealSpectralTriple,
    a_tilde: npt.ArrayLike,
    family: npt.ArrayLike,
    variant: str = "real",
) -> npt.NDArray[np.complex128]:
    """D_Ã·Ψ computed literally, with the J-term ε'(J ⊗ *)Ã(J ⊗ *)⁻¹Ψ."""
    _check_variant(variant)
    psi = np.asarray(family, dtype=np.complex128)
    d = psi.shape[-1]
    out = apply_operator(isometry.lift_operator(f.dirac, d) + a_tilde, psi)
    if variant == "real":
        twisted = j_star(f, apply_operator(a_tilde, j_star_inverse(f, psi)))
        out = out + f.signs.eps_prime * twisted
    return out


@dataclasses.dataclass
class InvarianceReport(common.CheckReport):
    """Deviations of the extended actions from S·1."""

    sb_tilde: Optional[common.CMatrix] = None

    sf_tilde: Optional[common.CMatrix] = None


def extended_actions_invariance(
    c: isometry.Corepresentation,
    f: triple.FiniteRealSpectralTriple,
    a: OneForm,
    psi: npt.ArrayLike,
    cutoff: CutoffFunction,
    variant: str = "real",
    tol: float = common.DEFAULT_TOLERANCE,
) -> InvarianceReport:
    """Compare the extended actions at β(A, ψ) with the ordinary ones.

    S̃_b = (Tr_H ⊗ id) f(D_Ã/Λ) must equal S_b·1 and S̃_f, the Q-valued
    pairing of (J ⊗ *)ψ̃ (or ψ̃ for 'plain') with D_Ãψ̃, must equal S_f·1,
    where ψ̃ = U(ψ ⊗ 1) with ψ projected to H_+.

    :param c: Corepresentation passing the isometry conditions.
    :param f: The triple U acts on.
    :param a: Self-adjoint one-form.
    :param psi: Fermion vector.
    :param cutoff: The cut-off function.
    :param variant: 'real' or 'plain'.
    :param tol: Relative tolerance.
    :return: Bosonic and fermionic residuals and the spectrum comparison.
    :raises ContractError: If U fails the isometry conditions.
    """
    conditions = isometry.verify_corep_conditions(c, f, tol)
    if not conditions.passed:
        raise common.ContractError(
            f"Corepresentation is not an isometry of '{f.name}': "
            f"{', '.join(conditions.failures())}."
        )
    d = c.aux_dim
    d_a = fluctuate(f, a, variant, tol)
    values, _ = numlin.hermitian_eigensystem(d_a, tol)
    sb = float(np.sum(cutoff(values)))

    a_tilde, d_tilde = extended_fluctuation(c, f, a, variant, tol)
    tilde_values, tilde_vectors = numlin.hermitian_eigensystem(d_tilde, tol)
    f_tilde = (tilde_vectors * cutoff(tilde_values)) @ tilde_vectors.conj().T
    sb_tilde = numlin.partial_trace_left(f_tilde, f.dim_h, d)

    v = h_plus_projector(f) @ np.asarray(psi, dtype=np.complex128)
    sf = fermionic_action(f, a, v, variant, project=False, tol=tol)
    psi_tilde = lift_vector(c, v)
    image = extended_dirac_on_family(f, a_tilde, psi_tilde, variant)
    left = j_star(f, psi_tilde) if variant == "real" else psi_tilde
    sf_tilde = q_pairing(left, image)

    eye = np.eye(d)
    report = InvarianceReport(tolerance=tol, sb_tilde=sb_tilde, sf_tilde=sf_tilde)
    report.add(
        "bosonic",
        numlin.frobenius(sb_tilde - sb * eye),
        common.threshold(tol, d, 1 + abs(sb)),
    )
    report.add(
        "fermionic",
        numlin.frobenius(sf_tilde - sf * eye),
        common.threshold(tol, d, 1 + abs(sf)),
    )
    report.add(
        "spectrum",
        float(np.max(np.abs(np.repeat(values, d) - tilde_values), initial=0.0)),
        common.threshold(tol, f.dim_h * d, float(np.max(np.abs(values), initial=1.0))),
    )
    report.info["sb"] = sb
    report.info["sf"] = [sf.real, sf.imag]
    if not report.passed:
        logger.warning(f"Action invariance fails: {', '.join(report.failures())}.")
    return report


def gauge_covariance_residual(
    c: isometry.Corepresentation,
    f: triple.FiniteRealSpectralTriple,
    a: OneForm,
    variant: str = "real",
    tol: float = common.DEFAULT_TOLERANCE,
) -> float:
    """Deviation of D_{U(A⊗1)U*} from U(D_A ⊗ 1)U*.

    Checked for the operator D_Ã, for the literal action of D_Ã on every
    family U(e_h ⊗ 1) and, for d = 1, for the J-term written as entrywise
    conjugation.
    """
    d = c.aux_dim
    d_a = fluctuate(f, a, variant, tol)
    expected = c.u @ isometry.lift_operator(d_a, d) @ c.u.conj().T
    a_tilde, d_tilde = extended_fluctuation(c, f, a, variant, tol)
    residual = numlin.frobenius(d_tilde - expected)

    # Column block h of U is the family U(e_h ⊗ 1).
    families = c.u.reshape(f.dim_h, d, f.dim_h, d).transpose(2, 0, 1, 3)
    for family in families:
        image = extended_dirac_on_family(f, a_tilde, family, variant)
        target = apply_operator(expected, family)
        residual = max(residual, numlin.frobenius(image - target))

    if d == 1 and variant == "real":
        j = f.real_structure.matrix
        literal = (
            isometry.lift_operator(f.dirac, 1)
            + a_tilde
            + f.signs.eps_prime * (j @ a_tilde.conj() @ j.conj().T)
        )
        residual = max(residual, numlin.frobenius(literal - d_tilde))
    return residual


def trace_identity_check(
    b: numlin.BlockMatrix, weight: npt.ArrayLike, tol: float = common.DEFAULT_TOLERANCE
) -> common.CheckReport:
    """Residual of (Tr ⊗ id) B(L ⊗ 1)B* = Tr(L)·1.

    :raises ShapeError: If L does not match the block grid of B.
    """
    lm = numlin.as_cmatrix(weight, "L")
    if not b.is_square or lm.shape != (b.block_rows, b.block_rows):
        raise common.ShapeError(
            f"L of shape {lm.shape} does not match a {b.block_rows}×{b.block_cols} "
            f"block grid."
        )
    d = b.block_dim
    x = b.data @ numlin.kron(lm, np.eye(d)) @ b.data.conj().T
    reduced = numlin.partial_trace_left(x, b.block_rows, d)
    report = common.CheckReport(tolerance=tol)
    report.add(
        "trace_identity",
        numlin.frobenius(reduced - np.trace(lm) * np.eye(d)),
        common.threshold(tol, d, numlin.frobenius(lm)),
    )
    return report


def trace_identity_holds(
    b: numlin.BlockMatrix, tol: float = common.DEFAULT_TOLERANCE
) -> tuple[bool, float]:
    """Sweep the trace identity over all matrix units L = e_ij.

    :return: Whether it holds for every unit, and the largest residual.
    """
    r = b.block_rows
    worst = 0.0
    passed = True
    for i in range(r):
        for j in range(r):
            unit = np.zeros((r, r), dtype=np.complex128)
            unit[i, j] = 1.0
            report = trace_identity_check(b, unit, tol)
            worst = max(worst, report.max_residual)
            passed = passed and report.passed
    return passed, worst
