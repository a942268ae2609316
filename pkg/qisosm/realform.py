"""The real form A_F of B_F and coactions compatible with it.

The complexification (A_F)_C = C ⊕ C ⊕ M_2(C) ⊕ M_3(C) ⊕ M_3(C) carries
the antilinear involution σ(λ, λ', q, m, m') = (λ̄', λ̄, σ₂q̄σ₂, m̄', m̄)
whose fixed points are A_F = C ⊕ H ⊕ M_3(C). A coaction on B_F extends to
one on (A_F)_C commuting with σ exactly when its coefficients satisfy
the half-liberation relation, which this module tests numerically.
"""

from __future__ import annotations

import dataclasses
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from . import common, cqgrep, isometry, numlin


def _quaternion_part(q: npt.NDArray) -> npt.NDArray:
    """σ₂·q̄·σ₂ for a 2×2 grid of scalars or of d×d blocks (adjointed)."""
    out = np.empty_like(q)
    out[0, 0] = q[1, 1]
    out[0, 1] = -q[1, 0]
    out[1, 0] = -q[0, 1]
    out[1, 1] = q[0, 0]
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class ComplexifiedElement:
    """An element (λ, λ', q, m, m') of (A_F)_C."""

    lam: complex

    lam_prime: complex

    q: common.CMatrix

    m: common.CMatrix

    m_prime: common.CMatrix

    def __post_init__(self) -> None:  # noqa: D105
        for name, shape in (("q", (2, 2)), ("m", (3, 3)), ("m_prime", (3, 3))):
            value = numlin.as_cmatrix(getattr(self, name), name)
            if value.shape != shape:
                raise common.ShapeError(
                    f"Component '{name}' must have shape {shape}, got {value.shape}."
                )
            object.__setattr__(self, name, value)
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "lam_prime", complex(self.lam_prime))

    @classmethod
    def random(cls, rng: np.random.Generator) -> ComplexifiedElement:
        """A random element with standard complex Gaussian components."""
        scalars = numlin.complex_gaussian(rng, (2,))
        return cls(
            scalars[0],
            scalars[1],
            numlin.complex_gaussian(rng, (2, 2)),
            numlin.complex_gaussian(rng, (3, 3)),
            numlin.complex_gaussian(rng, (3, 3)),
        )

    def __matmul__(self, other: ComplexifiedElement) -> ComplexifiedElement:
        return ComplexifiedElement(
            self.lam * other.lam,
            self.lam_prime * other.lam_prime,
            self.q @ other.q,
            self.m @ other.m,
            self.m_prime @ other.m_prime,
        )

    def adjoint(self) -> ComplexifiedElement:
        """The involution of the C*-algebra."""
        return ComplexifiedElement(
            np.conj(self.lam),
            np.conj(self.lam_prime),
            self.q.conj().T,
            self.m.conj().T,
            self.m_prime.conj().T,
        )

    def distance(self, other: ComplexifiedElement) -> float:
        """Largest norm of the componentwise difference."""
        return max(
            abs(self.lam - other.lam),
            abs(self.lam_prime - other.lam_prime),
            numlin.frobenius(self.q - other.q),
            numlin.frobenius(self.m - other.m),
            numlin.frobenius(self.m_prime - other.m_prime),
        )


def sigma_map(e: ComplexifiedElement) -> ComplexifiedElement:
    """σ(λ, λ', q, m, m') = (λ̄', λ̄, σ₂q̄σ₂, m̄', m̄)."""
    return ComplexifiedElement(
        np.conj(e.lam_prime),
        np.conj(e.lam),
        _quaternion_part(e.q.conj()),
        e.m_prime.conj(),
        e.m.conj(),
    )


def is_real_element(
    e: ComplexifiedElement, tol: float = common.DEFAULT_TOLERANCE
) -> bool:
    """True if e is fixed by σ, i.e. lies in A_F."""
    norms = [numlin.frobenius(x) for x in (e.q, e.m, e.m_prime)]
    scale = max(1.0, abs(e.lam), abs(e.lam_prime), *norms)
    return sigma_map(e).distance(e) < tol * scale


def from_real(lam: complex, q: npt.ArrayLike, m: npt.ArrayLike) -> ComplexifiedElement:
    """The element (λ, λ̄, q, m, m̄) of a real element (λ, q, m) of A_F.

    :raises ContractError: If q is not a quaternion [[α, β], [-β̄, ᾱ]].
    """
    qm = numlin.as_cmatrix(q, "q")
    mm = numlin.as_cmatrix(m, "m")
    e = ComplexifiedElement(lam, np.conj(lam), qm, mm, mm.conj())
    if not numlin.frobenius(_quaternion_part(qm.conj()) - qm) < (
        common.DEFAULT_TOLERANCE * max(1.0, numlin.frobenius(qm))
    ):
        raise common.ContractError(f"q is not a quaternion: {qm.tolist()}.")
    return e


class CoactionImage(NamedTuple):
    """An element of (A_F)_C ⊗ M_d(C), each component a grid of d×d blocks."""

    lam: npt.NDArray[np.complex128]
    lam_prime: npt.NDArray[np.complex128]
    q: npt.NDArray[np.complex128]
    m: npt.NDArray[np.complex128]
    m_prime: npt.NDArray[np.complex128]

    def distance(self, other: CoactionImage) -> float:
        """Largest norm of the componentwise difference."""
        return max(numlin.frobenius(a - b) for a, b in zip(self, other))


def _coefficients(
    g: cqgrep.RepresentedGenerators, m: int
) -> tuple[npt.NDArray, npt.NDArray]:
    """a[k, l, i, j] = (T_m)_ki*(T_m)_lj and a'[k, l, i, j] = (T_m)_lj*(T_m)_ki."""
    t = g.t[m]
    a = np.einsum("kixy,ljxz->klijyz", t.conj(), t)
    a_prime = np.einsum("ljxy,kixz->klijyz", t.conj(), t)
    return a, a_prime


def extended_coaction(
    g: cqgrep.RepresentedGenerators, e: ComplexifiedElement, m: int = 0
) -> CoactionImage:
    """Apply the coaction, extended to the fifth summand, to an element.

    λ and λ' are coinvariant, e₁₂ of M_2 picks up x_0, e_ij of the first
    M_3 maps to Σ e_kl ⊗ (T_m)_ki*(T_m)_lj and e_ij of the second M_3 to
    Σ e_kl ⊗ (T_m)_lj*(T_m)_ki.
    """
    d = g.aux_dim
    eye = np.eye(d, dtype=np.complex128)
    x0 = g.x[0]
    q = np.empty((2, 2, d, d), dtype=np.complex128)
    q[0, 0] = e.q[0, 0] * eye
    q[0, 1] = e.q[0, 1] * x0
    q[1, 0] = e.q[1, 0] * x0.conj().T
    q[1, 1] = e.q[1, 1] * eye
    a, a_prime = _coefficients(g, m)
    return CoactionImage(
        e.lam * eye,
        e.lam_prime * eye,
        q,
        np.einsum("ij,klijyz->klyz", e.m, a),
        np.einsum("ij,klijyz->klyz", e.m_prime, a_prime),
    )


def star_sigma(image: CoactionImage) -> CoactionImage:
    """(σ ⊗ *) applied to an element of (A_F)_C ⊗ M_d(C)."""

    def dagger(x: npt.NDArray) -> npt.NDArray:
        return np.conj(np.swapaxes(x, -1, -2))

    return CoactionImage(
        dagger(image.lam_prime),
        dagger(image.lam),
        _quaternion_part(dagger(image.q)),
        dagger(image.m_prime),
        dagger(image.m),
    )


def sigma_compatibility_residual(
    g: cqgrep.RepresentedGenerators,
    rng: np.random.Generator,
    samples: int = 5,
) -> float:
    """Largest ‖(σ ⊗ *)α(e) - α(σ(e))‖ over random elements e."""
    worst = 0.0
    for _ in range(samples):
        e = ComplexifiedElement.random(rng)
        lhs = star_sigma(extended_coaction(g, e))
        rhs = extended_coaction(g, sigma_map(e))
        worst = max(worst, lhs.distance(rhs))
    return worst


def _multiplicativity(a: npt.NDArray) -> float:
    """Largest ‖Σ_b a^{ab}_{ij}a^{bd}_{kl} - δ_jk·a^{ad}_{il}‖."""
    products = np.einsum("abijyz,bdklzw->adijklyw", a, a)
    target = np.einsum("jk,adilyw->adijklyw", np.eye(3), a)
    return float(np.max(np.linalg.norm(products - target, axis=(-2, -1))))


def derived_relation_residual(g: cqgrep.RepresentedGenerators) -> float:
    """Largest ‖Σ_v T*_vj·T_ki·T*_ls·T_vr - δ_jr·T*_ls·T_ki‖ over all T_m."""
    worst = 0.0
    for t in g.t:
        left = np.einsum("vjxy,kixz->vjkiyz", t.conj(), t)
        lhs = np.einsum("vjkiab,lsvrbc->jkilsrac", left, left)
        target = np.einsum("jr,lskiac->jkilsrac", np.eye(3), left)
        residual = np.linalg.norm(lhs - target, axis=(-2, -1))
        worst = max(worst, float(np.max(residual)))
    return worst


def coefficient_commutativity_residual(g: cqgrep.RepresentedGenerators) -> float:
    """Largest commutator of two coefficients of the coaction on M_3."""
    d = g.aux_dim
    coefficients = isometry.expected_coaction(g)[6:, 6:].reshape(-1, d, d)
    prod = np.einsum("pij,qjk->pqik", coefficients, coefficients)
    commutators = prod - prod.transpose(1, 0, 2, 3)
    return float(np.max(np.linalg.norm(commutators, axis=(-2, -1))))


def extended_coaction_check(
    g: cqgrep.RepresentedGenerators, tol: float = common.DEFAULT_TOLERANCE
) -> cqgrep.RelationReport:
    """Test whether the extended coaction is multiplicative.

    The coaction on the first M_3 is multiplicative for every biunitary
    T_m. On the second M_3 it is multiplicative exactly when the entries
    of T_m satisfy ab*c = cb*a; the report holds both residuals, the
    half-liberation residuals and whether the two pass flags agree.

    :param g: Generators passing the defining relations.
    :param tol: Relative tolerance.
    :return: The report.
    """
    d = g.aux_dim
    limit = common.threshold(tol, d)
    report = cqgrep.RelationReport(tolerance=tol)
    plain = max(_multiplicativity(_coefficients(g, m)[0]) for m in range(g.n))
    extended = max(_multiplicativity(_coefficients(g, m)[1]) for m in range(g.n))
    report.add("multiplicative.m3", plain, limit)
    extended_passed = report.add("multiplicative.m3_prime", extended, limit)

    half = cqgrep.check_half_liberation(g, tol)
    report.merge("half", half)
    agree = extended_passed == half.checks["half_liberation"].passed
    report.info["flags_agree"] = agree
    report.add_condition("flags_agree", float(agree), agree)
    return report
