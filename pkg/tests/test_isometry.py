"""Test the corepresentation on H_F and the isometry conditions."""

import dataclasses

import numpy as np
import pytest  # type: ignore

import qisosm
from qisosm import cqgrep, isometry, numlin, smtriple


@pytest.fixture(scope="module")
def commutant(sm_triple):
    """Return the classical commutant of the sample triple."""

    return isometry.classical_commutant_basis(sm_triple)


class TestAssembly:
    def test_identity(self):
        """The trivial point gives the identity operator."""

        c = qisosm.assemble_U(cqgrep.identity_point(3))
        assert (c.dim_h, c.aux_dim) == (96, 1)
        np.testing.assert_array_equal(c.u, np.eye(96))

        c = isometry.assemble_U(cqgrep.identity_point(2, 2))
        np.testing.assert_array_equal(c.u, np.eye(128))

    def test_blocks(self, half_liberated):
        """Blocks of U are the generators at the labeled positions."""

        g = half_liberated
        c = isometry.assemble_U(g)
        blocks = c.blocks
        assert blocks.shape == (96, 96, 2, 2)

        def index(*label):
            return smtriple.basis_index(*label, 3)

        P_L, PBAR_R = smtriple.Chirality.P_L, smtriple.Chirality.PBAR_R
        e = index(1, 0, P_L, 2)
        np.testing.assert_allclose(blocks[e, e], g.x[2])
        nu = index(0, 0, P_L, 1)
        np.testing.assert_allclose(blocks[nu, nu], g.x[0] @ g.x[1])
        u = index(0, 2, P_L, 3), index(0, 1, P_L, 3)
        np.testing.assert_allclose(blocks[u], g.t[2][1, 0])
        d = index(1, 2, P_L, 1), index(1, 3, P_L, 1)
        np.testing.assert_allclose(blocks[d], g.x[0].conj().T @ g.t[0][1, 2])
        nu_r = index(0, 0, PBAR_R, 1), index(0, 0, PBAR_R, 3)
        np.testing.assert_allclose(blocks[nu_r], g.v[0, 2])

        np.testing.assert_allclose(isometry.from_blocks(blocks), c.u)

    def test_shape(self):
        """The matrix must act on H ⊗ K."""

        with pytest.raises(qisosm.ShapeError):
            qisosm.Corepresentation(np.eye(10, dtype=np.complex128), 4, 2)

    def test_lift(self, half_liberated):
        """1 ⊗ U on H₁ ⊗ H ⊗ K."""

        c = isometry.assemble_U(half_liberated)
        lifted = isometry.lift(c, 4)
        assert (lifted.dim_h, lifted.aux_dim) == (384, 2)
        np.testing.assert_array_equal(lifted.u, numlin.kron(np.eye(4), c.u))

    def test_composition(self, rng, half_liberated):
        """The corepresentation of a convolution is U_(12)·U_(13)."""

        g1 = cqgrep.random_classical_point(rng, 3)
        g2 = half_liberated
        composed = isometry.corep_composition(
            isometry.assemble_U(g1), isometry.assemble_U(g2)
        )
        assert composed.aux_dim == 2
        expected = isometry.assemble_U(cqgrep.convolve(g1, g2))
        np.testing.assert_allclose(composed.u, expected.u, atol=1e-12)


class TestConditions:
    def test_identity(self, sm_triple):
        """The trivial corepresentation is an isometry."""

        c = isometry.assemble_U(cqgrep.identity_point(3))
        report = qisosm.verify_corep_conditions(c, sm_triple)
        assert report.passed, report.failures()
        assert set(report.checks) == {
            "unitary",
            "commutes_dirac",
            "commutes_grading",
            "real_structure",
            "containment",
        }

    def test_fixtures(self, rng, sm_triple, half_liberated):
        """Classical, gauge and half-liberated points are isometries."""

        for g in (
            cqgrep.random_classical_point(rng, 3),
            cqgrep.make_gauge_point(1j, numlin.haar_unitary(rng, 3), 3),
            half_liberated,
        ):
            report = isometry.verify_corep_conditions(isometry.assemble_U(g), sm_triple)
            assert report.passed, report.failures()

    def test_free_minimal(self, rng, minimal_triple):
        """Independent x_k are allowed without neutrino masses."""

        g = cqgrep.random_free_point(rng, 3, 2, nu_zero=True)
        c = isometry.assemble_U(g)
        report = isometry.verify_corep_conditions(c, minimal_triple)
        assert report.passed, report.failures()

    def test_violations(self, sm_triple, minimal_triple):
        """Broken relations show up as broken conditions."""

        phases = isometry.assemble_U(cqgrep.make_phase_point(3, [1, -1, 1j]))
        report = isometry.verify_corep_conditions(phases, sm_triple)
        assert "commutes_dirac" in report.failures()

        lepton = isometry.assemble_U(cqgrep.make_lepton_number_point(3, [1j, 1, 1]))
        assert not isometry.verify_corep_conditions(lepton, sm_triple).passed
        assert isometry.verify_corep_conditions(lepton, minimal_triple).passed

    def test_dimension_mismatch(self, sm_triple):
        """U must act on the Hilbert space of the triple."""

        c = isometry.assemble_U(cqgrep.identity_point(2))
        with pytest.raises(qisosm.ShapeError):
            isometry.verify_corep_conditions(c, sm_triple)


class TestCoaction:
    def test_formula(self, sm_triple, half_liberated):
        """The extracted coaction matches the closed formulas."""

        c = isometry.assemble_U(half_liberated)
        coefficients = isometry.adjoint_coaction_coefficients(c, sm_triple)
        assert coefficients.coefficients.shape == (15, 15, 2, 2)
        np.testing.assert_allclose(
            coefficients.of((2, 0, 1), (2, 0, 1)), half_liberated.x[0], atol=1e-12
        )
        np.testing.assert_allclose(
            coefficients.of((0, 0, 0), (0, 0, 0)), np.eye(2), atol=1e-12
        )

        report = isometry.coaction_formula_check(coefficients, half_liberated)
        assert report.passed, report.failures()
        assert set(report.checks) == {"coinvariant_c", "m2_diagonal", "m2_x0", "m3_t1"}

    def test_identity(self):
        """The trivial point fixes every matrix unit."""

        expected = isometry.expected_coaction(cqgrep.identity_point(3))
        np.testing.assert_array_equal(expected[:, :, 0, 0], np.eye(15))

    def test_phase_rescaling(self, rng, sm_triple):
        """The coaction only sees T_m up to a phase."""

        g = cqgrep.random_classical_point(rng, 3)
        flipped = dataclasses.replace(g, t=-g.t)
        np.testing.assert_array_equal(
            isometry.expected_coaction(flipped), isometry.expected_coaction(g)
        )
        coefficients = isometry.adjoint_coaction_coefficients(
            isometry.assemble_U(g), sm_triple
        )
        flipped_coefficients = isometry.adjoint_coaction_coefficients(
            isometry.assemble_U(flipped), sm_triple
        )
        np.testing.assert_array_equal(
            flipped_coefficients.coefficients, coefficients.coefficients
        )

        rotated = dataclasses.replace(g, t=np.exp(0.7j) * g.t)
        np.testing.assert_allclose(
            isometry.expected_coaction(rotated),
            isometry.expected_coaction(g),
            rtol=0,
            atol=1e-13,
        )

    def test_containment(self, rng, sm_triple):
        """A generic unitary does not preserve the algebra."""

        u = numlin.haar_unitary(rng, 96)
        with pytest.raises(qisosm.ContainmentError):
            isometry.adjoint_coaction_coefficients(
                qisosm.Corepresentation(u, 96, 1), sm_triple
            )

    def test_laws(self, half_liberated):
        """Each particle transforms as prescribed."""

        c = isometry.assemble_U(half_liberated)
        report = isometry.transformation_laws_check(c)
        assert report.passed, report.failures()
        assert set(report.checks) == {"law.nu", "law.e", "law.u", "law.d"}

        with pytest.raises(qisosm.ContractError):
            isometry.transformation_laws_check(isometry.Corepresentation(c.u, 96, 2))


class TestCommutant:
    def test_basis(self, commutant):
        """The basis satisfies its defining conditions."""

        assert commutant.passed, commutant.failures()
        assert commutant.real_dimension == commutant.basis.shape[0] > 0
        assert commutant.info["real_dimension"] == commutant.real_dimension

        gram = np.einsum("rij,sij->rs", commutant.basis.conj(), commutant.basis).real
        np.testing.assert_allclose(gram, np.eye(commutant.real_dimension), atol=1e-8)

    def test_classical_points(self, rng, commutant):
        """Every classical corepresentation lies in the commutant."""

        assert commutant.projection_residual(np.eye(96)) < 1e-8
        for _ in range(3):
            c = isometry.assemble_U(cqgrep.random_classical_point(rng, 3))
            assert commutant.projection_residual(c.u) < 1e-8

        outside = numlin.haar_unitary(rng, 96)
        assert commutant.projection_residual(outside) > 0.1

    def test_generic_dimension(self):
        """The dimension does not depend on generic parameters."""

        dimensions = set()
        for rng in numlin.spawn(numlin.make_rng(3), 10):
            f = smtriple.build_triple(smtriple.random_yukawa_set(rng, 3))
            report = isometry.classical_commutant_basis(f)
            assert report.passed, report.failures()
            dimensions.add(report.real_dimension)
        assert len(dimensions) == 1


class TestStructure:
    def test_reduction(self, rng, sm_triple, commutant):
        """Commutant elements keep the sectors and U has the block pattern."""

        c = isometry.assemble_U(cqgrep.random_classical_point(rng, 3))
        report = isometry.structural_reduction_check(sm_triple, commutant, c)
        assert report.passed, report.failures()
        assert "commutant.sectors" in report.checks

    def test_half_liberated(self, sm_triple, half_liberated):
        """The block pattern holds for noncommutative points as well."""

        c = isometry.assemble_U(half_liberated)
        report = isometry.structural_reduction_check(sm_triple, None, c)
        assert report.passed, report.failures()
        assert "commutant.sectors" not in report.checks
        assert {"alpha_up.diagonal", "generators.match"} <= set(report.checks)

    def test_wrong_generators(self, rng, sm_triple, half_liberated):
        """The blocks are compared with the generators U was built from."""

        c = isometry.assemble_U(half_liberated)
        other = cqgrep.random_half_liberated_point(rng, 3)
        mislabeled = qisosm.Corepresentation(c.u, 96, 2, other)
        report = isometry.structural_reduction_check(sm_triple, None, mislabeled)
        assert report.failures() == ["generators.match"]

    def test_neutrino_generations(self, sm_triple):
        """Left-handed neutrinos may not mix the generations."""

        u = np.eye(96, dtype=np.complex128)
        for chirality in (smtriple.Chirality.P_L, smtriple.Chirality.PBAR_L):
            i = smtriple.basis_index(0, 0, chirality, 1, 3)
            j = smtriple.basis_index(0, 0, chirality, 2, 3)
            u[[i, j]] = u[[j, i]]
        c = qisosm.Corepresentation(u, 96, 1)
        failures = isometry.structural_reduction_check(sm_triple, None, c).failures()
        assert "alpha_up.diagonal" in failures
        assert "alpha_up.intertwining" in failures

    def test_ansatz(self, half_liberated):
        """T_m and X(m, m) are read off the quark blocks."""

        ansatz = isometry.extract_block_ansatz(isometry.assemble_U(half_liberated))
        assert ansatz.alpha.shape == (2, 4, 4, 3, 3, 2, 2)
        assert ansatz.beta.shape == (2, 3, 3, 4, 4, 3, 3, 2, 2)
        np.testing.assert_allclose(ansatz.t_matrix(1).blocks, half_liberated.t[1])
        x0_star = half_liberated.x[0].conj().T
        np.testing.assert_allclose(
            ansatz.x_matrix(0, 0).blocks,
            np.einsum("ab,jkbc->jkac", x0_star, half_liberated.t[0]),
            atol=1e-12,
        )

    def test_mixing(self, rng):
        """A generic unitary mixes the isospins."""

        c = qisosm.Corepresentation(numlin.haar_unitary(rng, 96), 96, 1)
        with pytest.raises(qisosm.StructuralError) as excinfo:
            isometry.extract_block_ansatz(c)
        assert excinfo.value.block == "isospin"
