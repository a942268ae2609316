"""Test represented generators and their defining relations."""

import math

import numpy as np
import pytest  # type: ignore
from hypothesis import given, settings
from hypothesis import strategies as st

import qisosm
from qisosm import cqgrep, numlin


def make_fixture(name, rng):
    """One of the points that are isometries for every Yukawa set."""

    if name == "identity":
        return cqgrep.identity_point(3)
    if name == "classical":
        return cqgrep.random_classical_point(rng, 3)
    if name == "gauge":
        t = numlin.haar_unitary(rng, 3)
        return cqgrep.make_gauge_point(numlin.haar_phase(rng), t, 3)
    if name == "baryon":
        return cqgrep.make_baryon_point(numlin.haar_phase(rng), 3)
    return cqgrep.random_half_liberated_point(rng, 3)


FIXTURES = ("identity", "classical", "gauge", "baryon", "half_liberated")


class TestGenerators:
    def test_shapes(self):
        """Generator arrays must match n and the auxiliary dimension."""

        g = cqgrep.identity_point(3, 2)
        assert g.x.shape == (4, 2, 2)
        assert g.t.shape == (3, 3, 3, 2, 2)
        assert g.v.shape == (3, 3, 2, 2)

        with pytest.raises(qisosm.ShapeError):
            cqgrep.RepresentedGenerators(3, 2, g.x[:3], g.t, g.v)

        with pytest.raises(qisosm.ContractError):
            cqgrep.RepresentedGenerators(3, 2, g.x * np.nan, g.t, g.v)

    def test_blocks(self, half_liberated):
        """Block matrices and arrays describe the same generators."""

        g = half_liberated
        rebuilt = cqgrep.RepresentedGenerators.from_blocks(
            list(g.x), [g.t_block(m) for m in range(g.n)], g.v_block()
        )
        np.testing.assert_array_equal(rebuilt.t, g.t)
        np.testing.assert_array_equal(rebuilt.v, g.v)
        assert rebuilt.aux_dim == 2

    def test_classical_point_errors(self):
        """Classical points need unitary arguments of the right number."""

        with pytest.raises(qisosm.ContractError):
            cqgrep.make_classical_point(1, [1, 2], [np.eye(3)], np.eye(1))
        with pytest.raises(qisosm.ContractError):
            cqgrep.make_classical_point(1, [1, 1], [2 * np.eye(3)], np.eye(1))
        with pytest.raises(qisosm.ShapeError):
            cqgrep.make_classical_point(2, [1, 1], [np.eye(3)], np.eye(2))


class TestRelations:
    def test_identity(self, sample_params):
        """The trivial representation satisfies every relation."""

        report = qisosm.check_generator_relations(
            cqgrep.identity_point(3), sample_params
        )
        assert report.passed, report.failures()
        assert report.info == {"n": 3, "aux_dim": 1}
        assert set(report.checks) == {
            "x.unitary",
            "t.biunitary",
            "v.biunitary",
            "nu.diagonal_commutes",
            "nu.vbar_left",
            "nu.vbar_right",
            "r.twisted",
            "ckm",
            "amalgamation",
        }

    def test_classical_points(self, rng, sample_params, minimal_params):
        """Random classical and gauge points satisfy the relations."""

        for p in (sample_params, minimal_params):
            g = cqgrep.random_classical_point(rng, 3)
            report = cqgrep.check_generator_relations(g, p)
            assert report.passed, report.failures()

        g = cqgrep.make_gauge_point(
            numlin.haar_phase(rng), numlin.haar_unitary(rng, 3), 3
        )
        assert cqgrep.check_generator_relations(g, sample_params).passed
        g = cqgrep.make_baryon_point(1j, 3)
        assert cqgrep.check_generator_relations(g, sample_params).passed

    def test_distinct_phases(self, sample_params):
        """Distinct phases T_m = ω_m·1 break the CKM relation only."""

        g = cqgrep.make_phase_point(3, [1, -1, 1j])
        report = cqgrep.check_generator_relations(g, sample_params)
        assert report.failures() == ["ckm"]
        assert report.checks["amalgamation"].passed

    def test_lepton_number(self, sample_params, minimal_params):
        """Separate lepton numbers need Υ_ν = 0."""

        g = cqgrep.make_lepton_number_point(3, [1j, 1, 1])
        report = cqgrep.check_generator_relations(g, sample_params)
        assert not report.checks["nu.vbar_left"].passed
        assert report.checks["nu.diagonal_commutes"].passed

        report = cqgrep.check_generator_relations(g, minimal_params)
        assert report.passed, report.failures()

    def test_half_liberated(self, half_liberated, sample_params):
        """The antidiagonal fixture satisfies all relations."""

        report = cqgrep.check_generator_relations(half_liberated, sample_params)
        assert report.passed, report.failures()

    def test_mismatch(self, sample_params):
        """The number of generations must agree."""

        with pytest.raises(qisosm.ShapeError):
            cqgrep.check_generator_relations(cqgrep.identity_point(2), sample_params)


class TestHalfLiberation:
    def test_antidiagonal(self, antidiagonal_point):
        """Antidiagonal entries are half-commuting but not commuting."""

        report = cqgrep.check_half_liberation(antidiagonal_point)
        assert report.passed, report.failures()
        assert report.info["noncommutativity"] == pytest.approx(math.sqrt(2))

    def test_conjugated(self, half_liberated):
        """A change of basis keeps the relations."""

        assert cqgrep.check_half_liberation(half_liberated).passed

    def test_free(self, rng):
        """Generic Haar entries are not half-liberated."""

        g = cqgrep.random_free_point(rng, 3, 3)
        report = cqgrep.check_half_liberation(g)
        assert "half_liberation" in report.failures()

    def test_classical(self, rng):
        """Commuting entries satisfy everything."""

        g = cqgrep.random_classical_point(rng, 3)
        residuals = cqgrep.half_liberation_residuals(g.t[0])
        assert max(residuals.values()) < 1e-12


class TestUniversalUnitary:
    def test_biunitary(self, rng):
        """A biunitary satisfies the relations of A_u(1)."""

        g = cqgrep.random_free_point(rng, 3, 2)
        report = cqgrep.check_au_r_relations(g.t_block(0), np.eye(3))
        assert report.passed, report.failures()

    def test_twisted(self, rng):
        """A unitary that is not biunitary fails the twisted relations."""

        u = numlin.BlockMatrix.from_matrix(numlin.haar_unitary(rng, 6), 2)
        report = cqgrep.check_au_r_relations(u, np.eye(3))
        assert report.checks["unitary_left"].passed
        assert not report.checks["twisted_left"].passed

    def test_errors(self):
        """R must be invertible and match the block grid."""

        u = numlin.BlockMatrix.identity(3, 2)
        with pytest.raises(qisosm.ContractError):
            cqgrep.check_au_r_relations(u, np.diag([1.0, 1.0, 0.0]))
        with pytest.raises(qisosm.ShapeError):
            cqgrep.check_au_r_relations(u, np.eye(2))


class TestSpecialCases:
    def test_invertible(self, rng, sample_params):
        """With Υ_ν invertible V is diagonal in the x_k."""

        g = cqgrep.random_classical_point(rng, 3)
        report = cqgrep.special_case_check(g, sample_params)
        assert report.info["nu_invertible"]
        assert set(report.checks) == {"v_diagonal", "x_equal", "r_phases"}
        assert report.passed, report.failures()

        g = cqgrep.make_lepton_number_point(3, [1j, 1, 1])
        report = cqgrep.special_case_check(g, sample_params)
        assert "v_diagonal" in report.failures()
        assert "r_phases" in report.failures()

    def test_minimal(self, minimal_params):
        """Nothing is implied for Υ_ν = 0."""

        g = cqgrep.make_lepton_number_point(3, [1j, -1, 1])
        report = cqgrep.special_case_check(g, minimal_params)
        assert report.checks == {}
        assert report.info["minimal_regime"]


class TestCoproduct:
    def test_convolve(self, rng, sample_params, half_liberated):
        """Products of solutions are solutions."""

        classical = cqgrep.random_classical_point(rng, 3)
        for g1, g2 in (
            (classical, half_liberated),
            (half_liberated, half_liberated),
        ):
            g = cqgrep.convolve(g1, g2)
            assert g.aux_dim == g1.aux_dim * g2.aux_dim
            report = cqgrep.check_generator_relations(g, sample_params, 1e-8)
            assert report.passed, report.failures()

    @given(
        st.sampled_from(FIXTURES),
        st.sampled_from(FIXTURES),
        st.integers(min_value=0, max_value=2**32),
    )
    @settings(max_examples=15, deadline=None)
    def test_convolve_pairs(self, sample_params, first, second, seed):
        """The relations are closed under the coproduct."""

        rng = numlin.make_rng(seed)
        g = cqgrep.convolve(make_fixture(first, rng), make_fixture(second, rng))
        report = cqgrep.check_generator_relations(g, sample_params, 1e-8)
        assert report.passed, report.failures()

    def test_identity(self, half_liberated):
        """The trivial point is a unit for the coproduct."""

        g = cqgrep.convolve(cqgrep.identity_point(3), half_liberated)
        np.testing.assert_allclose(g.t, half_liberated.t)
        np.testing.assert_allclose(g.x, half_liberated.x)

    def test_direct_sum(self, rng, sample_params, half_liberated):
        """Direct sums of solutions are solutions."""

        g = cqgrep.direct_sum(cqgrep.random_classical_point(rng, 3), half_liberated)
        assert g.aux_dim == 3
        assert cqgrep.check_generator_relations(g, sample_params).passed

        with pytest.raises(qisosm.ShapeError):
            cqgrep.direct_sum(cqgrep.identity_point(2), half_liberated)

    def test_conjugated(self, rng, sample_params, half_liberated):
        """Unitarily equivalent representations satisfy the same relations."""

        g = half_liberated.conjugated(numlin.haar_unitary(rng, 2))
        assert cqgrep.check_generator_relations(g, sample_params).passed
