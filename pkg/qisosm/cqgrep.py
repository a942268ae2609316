"""Concrete representations of the quantum isometry generators.

A representation assigns d×d matrices to the generators x_0..x_n, to the
entries of the 3×3 biunitaries T_1..T_n and to the entries of the n×n
biunitary V. Every defining relation is then a matrix identity that can
be checked numerically, and the coproduct becomes the tensor product of
representations computed by :func:`convolve`.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Sequence
from typing import Optional

import numpy as np
import numpy.typing as npt

from . import common, numlin, smtriple
from .log import logger

# Tolerance used when constructors validate their unitary arguments.
_CONSTRUCTOR_TOLERANCE = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class RepresentedGenerators:
    """Matrices representing the generators on an auxiliary space K = C^d.

    'x' has shape (n+1, d, d), 't' has shape (n, 3, 3, d, d) with t[m]
    the blocks of T_{m+1}, and 'v' has shape (n, n, d, d).
    """

    n: int

    aux_dim: int

    x: npt.NDArray[np.complex128]

    t: npt.NDArray[np.complex128]

    v: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:  # noqa: D105
        n, d = self.n, self.aux_dim
        expected = {
            "x": (n + 1, d, d),
            "t": (n, 3, 3, d, d),
            "v": (n, n, d, d),
        }
        for name, shape in expected.items():
            value = np.asarray(getattr(self, name), dtype=np.complex128)
            if value.shape != shape:
                raise common.ShapeError(
                    f"Generator array '{name}' has shape {value.shape}, "
                    f"expected {shape}."
                )
            if not np.all(np.isfinite(value)):
                raise common.ContractError(f"Generator array '{name}' is not finite.")
            object.__setattr__(self, name, value)

    @classmethod
    def from_blocks(
        cls,
        x: Sequence[npt.ArrayLike],
        t: Sequence[numlin.BlockMatrix],
        v: numlin.BlockMatrix,
    ) -> RepresentedGenerators:
        """Create the generators from lists of matrices and block matrices."""
        xs = np.array([numlin.as_cmatrix(xk, "x") for xk in x])
        return cls(
            len(t),
            xs.shape[1],
            xs,
            np.array([tm.blocks for tm in t]),
            v.blocks,
        )

    def t_block(self, m: int) -> numlin.BlockMatrix:
        """T_{m+1} as block matrix."""
        return numlin.BlockMatrix.from_blocks(self.t[m])

    def v_block(self) -> numlin.BlockMatrix:
        """V as block matrix."""
        return numlin.BlockMatrix.from_blocks(self.v)

    def conjugated(self, w: npt.ArrayLike) -> RepresentedGenerators:
        """Unitarily equivalent representation, every generator a ↦ W a W*."""
        w = numlin.as_cmatrix(w)
        wh = w.conj().T
        return RepresentedGenerators(
            self.n,
            self.aux_dim,
            w @ self.x @ wh,
            w @ self.t @ wh,
            w @ self.v @ wh,
        )


@dataclasses.dataclass
class RelationReport(common.CheckReport):
    """Named residuals of relation families."""


def _x_diagonal(g: RepresentedGenerators) -> common.CMatrix:
    """The block matrix diag(x_0x_1, ..., x_0x_n)."""
    blocks = np.zeros(g.v.shape, dtype=np.complex128)
    for k in range(g.n):
        blocks[k, k] = g.x[0] @ g.x[k + 1]
    return numlin.BlockMatrix.from_blocks(blocks).data


def ckm_residual(g: RepresentedGenerators, ckm: npt.ArrayLike) -> float:
    """Largest ‖Σ_m conj(C_mr)·C_ms·(T_m)_jk‖ over r ≠ s."""
    c = numlin.as_cmatrix(ckm, "ckm")
    s = np.einsum("mr,ms,mjkab->rsjkab", c.conj(), c, g.t)
    off = ~np.eye(g.n, dtype=bool)
    if not off.any():
        return 0.0
    return float(np.max(np.linalg.norm(s[off], axis=(-2, -1))))


def amalgamation_residual(g: RepresentedGenerators) -> float:
    """Largest ‖(T_m*)_ij(T_m)_kl - (T_1*)_ij(T_1)_kl‖ over all m and entries."""
    products = np.einsum("mjiba,mklbc->mijklac", g.t.conj(), g.t)
    if g.n < 2:
        return 0.0
    return float(np.max(np.linalg.norm(products[1:] - products[0], axis=(-2, -1))))


def check_generator_relations(
    g: RepresentedGenerators,
    p: smtriple.YukawaSet,
    tol: float = common.DEFAULT_TOLERANCE,
) -> RelationReport:
    """Check all defining relations of the quantum isometry generators.

    Scalar matrices are promoted blockwise (entry c becomes c·I_d) and
    V̄ is the block bar of V.

    :param g: The represented generators.
    :param p: The Yukawa matrices, the CKM matrix is extracted if needed.
    :param tol: Relative tolerance.
    :return: Residuals of unitarity, biunitarity, the Υ_ν and Υ_R
        relations, the CKM relation and the amalgamation relation.
    :raises ShapeError: If the number of generations does not match.
    """
    if g.n != p.n:
        raise common.ShapeError(
            f"Generators for n={g.n} do not match Yukawa matrices with n={p.n}."
        )
    n, d = g.n, g.aux_dim
    report = RelationReport(tolerance=tol)
    report.info["n"] = n
    report.info["aux_dim"] = d

    report.add(
        "x.unitary",
        max(numlin.unitarity_residual(xk) for xk in g.x),
        common.threshold(tol, d),
    )
    t_residual = 0.0
    for m in range(n):
        bu = numlin.is_biunitary(g.t_block(m), tol)
        t_residual = max(t_residual, *bu.residuals.values())
    report.add("t.biunitary", t_residual, common.threshold(tol, 3 * d))
    bu = numlin.is_biunitary(g.v_block(), tol)
    report.add("v.biunitary", max(bu.residuals.values()), common.threshold(tol, n * d))

    x_diag = _x_diagonal(g)
    v = g.v_block().data
    v_bar = g.v_block().bar().data
    ups_nu = numlin.promote(p.ups_nu, d)
    ups_r = numlin.promote(p.ups_r, d)
    limit_nu = common.threshold(tol, n * d, numlin.frobenius(ups_nu))
    lhs = x_diag @ ups_nu
    commutes = numlin.frobenius(lhs - ups_nu @ x_diag)
    report.add("nu.diagonal_commutes", commutes, limit_nu)
    report.add("nu.vbar_left", numlin.frobenius(lhs - v_bar @ ups_nu), limit_nu)
    report.add("nu.vbar_right", numlin.frobenius(lhs - ups_nu @ v_bar), limit_nu)
    report.add(
        "r.twisted",
        numlin.frobenius(v @ ups_r - ups_r @ v_bar),
        common.threshold(tol, n * d, numlin.frobenius(ups_r)),
    )

    ckm = p.mixing(tol).ckm
    report.add("ckm", ckm_residual(g, ckm), common.threshold(tol, 3 * n * d))
    report.add("amalgamation", amalgamation_residual(g), common.threshold(tol, 9 * d))

    if not report.passed:
        logger.warning(f"Generator relations fail: {', '.join(report.failures())}.")
    return report


def check_au_r_relations(
    u: numlin.BlockMatrix,
    r: npt.ArrayLike,
    tol: float = common.DEFAULT_TOLERANCE,
) -> RelationReport:
    """Check the relations of the universal unitary quantum group A_u(R).

    uu* = u*u = 1 and u^t(RūR⁻¹) = (RūR⁻¹)u^t = 1, with ū the block bar,
    u^t the block transpose and R acting by scalar blocks.

    :param u: Block matrix with a square grid.
    :param r: Positive invertible scalar matrix of the grid size.
    :param tol: Relative tolerance.
    :return: The four residuals.
    :raises ContractError: If R is singular.
    """
    rm = numlin.as_cmatrix(r, "R")
    if rm.shape != (u.block_rows, u.block_rows):
        raise common.ShapeError(
            f"R must have shape {(u.block_rows, u.block_rows)}, got {rm.shape}."
        )
    sv = np.linalg.svd(rm, compute_uv=False)
    if sv[-1] <= tol * sv[0]:
        raise common.ContractError(
            f"R is singular, singular values range from {sv[-1]:.3e} to {sv[0]:.3e}."
        )

    d = u.block_dim
    r_hat = numlin.promote(rm, d)
    r_inv = numlin.promote(np.linalg.inv(rm), d)
    twisted = r_hat @ u.bar().data @ r_inv
    ut = u.transpose().data
    eye = np.eye(u.data.shape[0])

    report = RelationReport(tolerance=tol)
    limit = common.threshold(tol, u.data.shape[0])
    report.add("unitary_left", numlin.frobenius(u.data @ u.data.conj().T - eye), limit)
    report.add("unitary_right", numlin.frobenius(u.data.conj().T @ u.data - eye), limit)
    report.add("twisted_left", numlin.frobenius(ut @ twisted - eye), limit)
    report.add("twisted_right", numlin.frobenius(twisted @ ut - eye), limit)
    return report


def half_liberation_residuals(t: npt.ArrayLike) -> dict[str, float]:
    """Residuals of the half-liberation relations of one 3×3 block matrix.

    :param t: Array of shape (3, 3, d, d).
    :return: 'half_liberation' max ‖ab*c - cb*a‖ over all entries a, b, c,
        'projective_commutativity' max ‖[a*b, c*e]‖ and
        'noncommutativity' max ‖[a, b]‖.
    """
    blocks = np.asarray(t, dtype=np.complex128)
    d = blocks.shape[-1]
    e = blocks.reshape(-1, d, d)

    triple = np.einsum("aij,bkj,ckl->abcil", e, e.conj(), e)
    half = np.linalg.norm(triple - triple.transpose(2, 1, 0, 3, 4), axis=(-2, -1))

    pairs = np.einsum("aji,bjk->abik", e.conj(), e).reshape(-1, d, d)
    prod = np.einsum("pij,qjk->pqik", pairs, pairs)
    projective = np.linalg.norm(prod - prod.transpose(1, 0, 2, 3), axis=(-2, -1))

    plain = np.einsum("aij,bjk->abik", e, e)
    noncommutative = np.linalg.norm(plain - plain.transpose(1, 0, 2, 3), axis=(-2, -1))

    return {
        "half_liberation": float(np.max(half)),
        "projective_commutativity": float(np.max(projective)),
        "noncommutativity": float(np.max(noncommutative)),
    }


def check_half_liberation(
    g: RepresentedGenerators, tol: float = common.DEFAULT_TOLERANCE
) -> RelationReport:
    """Check ab*c = cb*a for all entries a, b, c of each T_m.

    The report also checks projective commutativity, [a*b, c*e] = 0 for all
    entries, and records the largest commutator [a, b] of plain entries.
    """
    residuals = [half_liberation_residuals(g.t[m]) for m in range(g.n)]
    report = RelationReport(tolerance=tol)
    limit = common.threshold(tol, g.aux_dim)
    for name in ("half_liberation", "projective_commutativity"):
        report.add(name, max(r[name] for r in residuals), limit)
    report.info["noncommutativity"] = max(r["noncommutativity"] for r in residuals)
    return report


def special_case_check(
    g: RepresentedGenerators,
    p: smtriple.YukawaSet,
    tol: float = common.DEFAULT_TOLERANCE,
) -> RelationReport:
    """Check the consequences of the relations in the two extreme regimes.

    With Υ_ν invertible the relations force V = diag(x_1*x_0*, ..., x_n*x_0*),
    x_i = x_j whenever (Υ_ν)_ij ≠ 0 and x_i*x_0* = x_0x_j whenever
    (Υ_R)_ij ≠ 0. With Υ_ν = 0 nothing is implied for the x_k, the report
    only records the regime.
    """
    validation = smtriple.validate_params(p, tol)
    report = RelationReport(tolerance=tol)
    report.info["minimal_regime"] = validation.minimal_regime
    report.info["nu_invertible"] = validation.nu_invertible
    if not validation.nu_invertible:
        return report

    n, d = g.n, g.aux_dim
    limit = common.threshold(tol, d)
    expected = np.zeros(g.v.shape, dtype=np.complex128)
    for k in range(n):
        expected[k, k] = (g.x[0] @ g.x[k + 1]).conj().T
    report.add(
        "v_diagonal",
        numlin.frobenius(g.v - expected),
        common.threshold(tol, n * d),
    )

    cutoff = tol * max(1.0, numlin.frobenius(p.ups_nu))
    x_equal = 0.0
    for i, j in zip(*np.nonzero(np.abs(p.ups_nu) > cutoff)):
        x_equal = max(x_equal, numlin.frobenius(g.x[i + 1] - g.x[j + 1]))
    report.add("x_equal", x_equal, limit)

    cutoff = tol * max(1.0, numlin.frobenius(p.ups_r))
    r_phases = 0.0
    for i, j in zip(*np.nonzero(np.abs(p.ups_r) > cutoff)):
        lhs = g.x[i + 1].conj().T @ g.x[0].conj().T
        r_phases = max(r_phases, numlin.frobenius(lhs - g.x[0] @ g.x[j + 1]))
    report.add("r_phases", r_phases, limit)
    return report


def _identity_blocks(size: int, d: int, count: Optional[int] = None) -> npt.NDArray:
    eye = np.einsum("ij,ab->ijab", np.eye(size), np.eye(d)).astype(np.complex128)
    if count is None:
        return eye
    return np.broadcast_to(eye, (count,) + eye.shape).copy()


def _check_unitary(name: str, a: npt.ArrayLike) -> common.CMatrix:
    m = numlin.as_cmatrix(a, name)
    if not numlin.is_unitary(m, _CONSTRUCTOR_TOLERANCE):
        raise common.ContractError(f"{name} is not unitary.")
    return m


def make_classical_point(
    n: int,
    x: Sequence[complex],
    g: Sequence[npt.ArrayLike],
    v0: npt.ArrayLike,
) -> RepresentedGenerators:
    """A one-dimensional representation, i.e. a point of the classical group.

    :param n: Number of generations.
    :param x: The n+1 values of x_0..x_n on the unit circle.
    :param g: The n unitaries T_1..T_n.
    :param v0: The n×n unitary V.
    :return: The generators with d = 1.
    :raises ContractError: If an argument is not unitary.
    """
    xs = np.asarray(x, dtype=np.complex128).reshape(-1)
    if xs.shape != (n + 1,) or len(g) != n:
        raise common.ShapeError(
            f"Expected {n + 1} values x_k and {n} matrices T_m, "
            f"got {xs.size} and {len(g)}."
        )
    if np.any(np.abs(np.abs(xs) - 1) > _CONSTRUCTOR_TOLERANCE):
        raise common.ContractError("The values x_k must lie on the unit circle.")
    ts = np.array([_check_unitary(f"T_{m + 1}", gm) for m, gm in enumerate(g)])
    v = _check_unitary("V", v0)
    if v.shape != (n, n) or ts.shape[1:] != (3, 3):
        raise common.ShapeError(
            f"Expected V of shape {(n, n)} and T_m of shape (3, 3), "
            f"got {v.shape} and {ts.shape[1:]}."
        )
    return RepresentedGenerators(
        n, 1, xs[:, None, None], ts[..., None, None], v[..., None, None]
    )


def identity_point(n: int, d: int = 1) -> RepresentedGenerators:
    """The trivial representation: every x_k, T_m and V the identity."""
    x = np.broadcast_to(np.eye(d, dtype=np.complex128), (n + 1, d, d)).copy()
    return RepresentedGenerators(
        n, d, x, _identity_blocks(3, d, n), _identity_blocks(n, d)
    )


def make_gauge_point(z: complex, t: npt.ArrayLike, n: int) -> RepresentedGenerators:
    """The point x_0 = z³, x_m = z̄³, T_m = z²T, V = 1 of the gauge group."""
    t = _check_unitary("T", t)
    x = [z**3] + [np.conj(z) ** 3] * n
    return make_classical_point(n, x, [z**2 * t] * n, np.eye(n))


def make_baryon_point(y: complex, n: int) -> RepresentedGenerators:
    """The baryon phase symmetry, x_k = 1, V = 1, T_m = y·1."""
    return make_phase_point(n, [y] * n)


def make_phase_point(n: int, omegas: Sequence[complex]) -> RepresentedGenerators:
    """The point x_k = 1, V = 1, T_m = ω_m·1.

    Equal phases give the baryon point. Distinct phases satisfy the
    amalgamation relation but generically violate the CKM relation.
    """
    return make_classical_point(
        n, [1.0] * (n + 1), [w * np.eye(3) for w in omegas], np.eye(n)
    )


def make_lepton_number_point(
    n: int, phases: Sequence[complex]
) -> RepresentedGenerators:
    """The point x_0 = 1, x_k = phases, T = V = 1.

    These separate lepton-number symmetries only satisfy the relations
    when Υ_ν = 0.
    """
    return make_classical_point(n, [1.0, *phases], [np.eye(3)] * n, np.eye(n))


def make_antidiagonal_point(
    n: int, g: npt.ArrayLike, h: npt.ArrayLike
) -> RepresentedGenerators:
    """A genuinely noncommutative half-liberated point on K = C².

    Every T_m has the entries [[0, g_jk], [h_jk, 0]] for unitaries g, h,
    while x_k = 1 and V = 1.
    """
    g = _check_unitary("g", g)
    h = _check_unitary("h", h)
    t = np.zeros((3, 3, 2, 2), dtype=np.complex128)
    t[:, :, 0, 1] = g
    t[:, :, 1, 0] = h
    x = np.broadcast_to(np.eye(2, dtype=np.complex128), (n + 1, 2, 2)).copy()
    return RepresentedGenerators(
        n, 2, x, np.broadcast_to(t, (n, 3, 3, 2, 2)).copy(), _identity_blocks(n, 2)
    )


def random_classical_point(rng: np.random.Generator, n: int) -> RepresentedGenerators:
    """A random classical point satisfying the relations for every Yukawa set.

    x_0 is a random phase, x_k = s·x̄_0 and V = s·1 for a random sign s,
    and all T_m are the same Haar distributed unitary.
    """
    x0 = numlin.haar_phase(rng)
    sign = rng.choice([-1.0, 1.0])
    g = numlin.haar_unitary(rng, 3)
    x = [x0] + [sign * np.conj(x0)] * n
    return make_classical_point(n, x, [g] * n, sign * np.eye(n))


def random_free_point(
    rng: np.random.Generator, n: int, d: int, nu_zero: bool = False
) -> RepresentedGenerators:
    """A random point with noncommuting Haar distributed entries.

    All T_m equal the biunitary with entries Σ_l g_jl h_lk W_l for Haar
    distributed g, h ∈ U(3) and W_l ∈ U(d); this is generically not
    half-liberated. With 'nu_zero' the x_k are independent Haar
    unitaries (only valid for Υ_ν = 0), otherwise x_k = x_0*.
    """
    g = numlin.haar_unitary(rng, 3)
    h = numlin.haar_unitary(rng, 3)
    w = np.array([numlin.haar_unitary(rng, d) for _ in range(3)])
    t = np.einsum("jl,lk,lab->jkab", g, h, w)
    x0 = numlin.haar_unitary(rng, d)
    if nu_zero:
        xs = [x0] + [numlin.haar_unitary(rng, d) for _ in range(n)]
    else:
        xs = [x0] + [x0.conj().T] * n
    return RepresentedGenerators(
        n,
        d,
        np.array(xs),
        np.broadcast_to(t, (n, 3, 3, d, d)).copy(),
        _identity_blocks(n, d),
    )


def random_half_liberated_point(
    rng: np.random.Generator, n: int
) -> RepresentedGenerators:
    """Antidiagonal point with Haar g, h and a random phase x_0, in a random basis."""
    g = numlin.haar_unitary(rng, 3)
    h = numlin.haar_unitary(rng, 3)
    point = make_antidiagonal_point(n, g, h)
    phase = numlin.haar_phase(rng)
    x = point.x.copy()
    x[0] *= phase
    x[1:] *= np.conj(phase)
    point = dataclasses.replace(point, x=x)
    return point.conjugated(numlin.haar_unitary(rng, 2))


def _block_diagonal(a: npt.NDArray, b: npt.NDArray) -> npt.NDArray:
    """Entrywise direct sum of two arrays of matrices with equal leading shape."""
    d1, d2 = a.shape[-1], b.shape[-1]
    out = np.zeros(a.shape[:-2] + (d1 + d2, d1 + d2), dtype=np.complex128)
    out[..., :d1, :d1] = a
    out[..., d1:, d1:] = b
    return out


def _check_same_n(g1: RepresentedGenerators, g2: RepresentedGenerators) -> None:
    if g1.n != g2.n:
        raise common.ShapeError(
            f"Cannot combine generators for n={g1.n} and n={g2.n}."
        )


def direct_sum(
    g1: RepresentedGenerators, g2: RepresentedGenerators
) -> RepresentedGenerators:
    """Direct sum of two representations on K₁ ⊕ K₂."""
    _check_same_n(g1, g2)
    return RepresentedGenerators(
        g1.n,
        g1.aux_dim + g2.aux_dim,
        _block_diagonal(g1.x, g2.x),
        _block_diagonal(g1.t, g2.t),
        _block_diagonal(g1.v, g2.v),
    )


def _convolve_matrix(b1: npt.NDArray, b2: npt.NDArray) -> npt.NDArray:
    """Entries Σ_l (B₁)_il ⊗ (B₂)_lj of the represented coproduct."""
    r = b1.shape[0]
    d = b1.shape[-1] * b2.shape[-1]
    return np.einsum("ilab,ljcd->ijacbd", b1, b2).reshape(r, r, d, d)


def convolve(
    g1: RepresentedGenerators, g2: RepresentedGenerators
) -> RepresentedGenerators:
    """The represented coproduct on K₁ ⊗ K₂.

    x_k ↦ x_k ⊗ x_k and (T_m)_ij ↦ Σ_l (T_m)_il ⊗ (T_m)_lj, V likewise.
    """
    _check_same_n(g1, g2)
    d = g1.aux_dim * g2.aux_dim
    x = np.einsum("kab,kcd->kacbd", g1.x, g2.x).reshape(g1.n + 1, d, d)
    t = np.array([_convolve_matrix(g1.t[m], g2.t[m]) for m in range(g1.n)])
    v = _convolve_matrix(g1.v, g2.v)
    logger.debug(f"Convolved generators of dimensions {g1.aux_dim} and {g2.aux_dim}.")
    return RepresentedGenerators(g1.n, d, x, t, v)
