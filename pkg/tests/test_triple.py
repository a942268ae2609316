"""Test finite real spectral triples, their axioms and products."""

import dataclasses

import numpy as np
import pytest  # type: ignore

import qisosm
from qisosm import numlin, smtriple, toys, triple


class TestKOSigns:
    def test_dimensions(self):
        """Signs are mapped to the KO-dimension modulo 8."""

        assert triple.KOSigns(1, 1, -1).ko_dimension(True) == 6
        assert triple.KOSigns(1, 1, 1).ko_dimension(True) == 0
        assert triple.KOSigns(1, -1).ko_dimension(False) == 1
        assert triple.KOSigns(-1, -1).ko_dimension(False) == 5
        assert triple.KOSigns(1, -1, -1).ko_dimension(True) is None
        assert triple.KOSigns(-1, 1, 1).as_tuple() == (-1, 1, 1)

    def test_invalid(self):
        """Only ±1 are signs."""

        with pytest.raises(qisosm.ContractError):
            triple.KOSigns(2, 1)


class TestAntiUnitary:
    def test_apply(self, rng):
        """The inverse undoes the operator."""

        j = triple.AntiUnitary(toys.SWAP.copy())
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        np.testing.assert_allclose(j.inverse_apply(j.apply(v)), v)
        np.testing.assert_allclose(j.apply(v), v.conj()[[2, 3, 0, 1]])
        np.testing.assert_allclose(j.compose(j), np.eye(4))


class TestBlockAlgebra:
    def test_units(self, sm_triple):
        """Flat indices, keys and labels of the matrix units."""

        algebra = sm_triple.algebra
        assert algebra.summand_dims == (1, 1, 2, 3)
        assert algebra.size == 15
        assert algebra.dim_h == 96
        assert algebra.unit_index(2, 0, 1) == 3
        assert algebra.unit_index(3, 0, 0) == 6
        assert algebra.unit_keys()[14] == (3, 2, 2)
        assert algebra.labels()[3] == "M2[2].e12"

        with pytest.raises(qisosm.RangeError):
            algebra.unit_index(2, 2, 0)

    def test_homomorphism(self, sm_triple):
        """The unit images form a unital *-representation."""

        residuals = sm_triple.algebra.homomorphism_residual()
        assert set(residuals) == {"product", "adjoint", "unital"}
        assert max(residuals.values()) < 1e-12

    def test_embed(self, rng, sm_triple):
        """Embedding is multiplicative."""

        algebra = sm_triple.algebra
        a = algebra.random_element(rng)
        b = algebra.random_element(rng)
        ab = [x @ y for x, y in zip(a, b)]
        np.testing.assert_allclose(
            algebra.embed(a) @ algebra.embed(b), algebra.embed(ab), atol=1e-12
        )

        with pytest.raises(qisosm.ShapeError):
            algebra.embed(a[:3])

    def test_tensor(self):
        """C ⊕ C tensored with itself has four one-dimensional summands."""

        algebra = toys.even_toy_triple().algebra
        product = algebra.tensor(algebra)
        assert product.summand_dims == (1, 1, 1, 1)
        assert product.dim_h == 16
        assert max(product.homomorphism_residual().values()) < 1e-12


class TestAxioms:
    def test_even_toy(self):
        """The even toy triple has KO-dimension 6."""

        report = triple.check_axioms(toys.even_toy_triple(2.0 - 1.0j))
        assert report.passed, report.failures()
        assert report.measured_signs.as_tuple() == (1, 1, -1)
        assert report.info["ko_dimension"] == 6
        assert report.info["even"]
        assert "grading_anticommutes_dirac" in report.checks

    def test_odd_toy(self):
        """The odd toy triple has KO-dimension 1 and no grading checks."""

        t = toys.odd_toy_triple(0.5)
        assert not t.is_even
        np.testing.assert_array_equal(t.grading_matrix(), np.eye(4))

        report = triple.check_axioms(t)
        assert report.passed, report.failures()
        assert report.info["ko_dimension"] == 1
        assert report.measured_signs.as_tuple()[:2] == (1, -1)
        assert "grading_square" not in report.checks

        with pytest.raises(qisosm.ContractError):
            toys.odd_toy_triple(1j)

    def test_standard_model(self, sm_triple):
        """The Standard Model triple satisfies all axioms."""

        report = qisosm.check_axioms(sm_triple)
        assert report.passed, report.failures()
        assert report.info["dimension"] == 96
        assert report.info["signs"] == [1, 1, -1]
        assert report.info["measured_signs"] == [1, 1, -1]
        assert report.info["ko_dimension"] == 6

    @pytest.mark.parametrize("seed", range(20))
    def test_random_standard_model(self, seed):
        """Every valid Yukawa set gives a triple of KO-dimension 6."""

        p = smtriple.random_yukawa_set(numlin.make_rng(seed), 3)
        report = qisosm.check_axioms(smtriple.build_triple(p))
        assert report.passed, report.failures()
        assert report.info["measured_signs"] == [1, 1, -1]
        assert report.max_residual < 1e-11

    def test_violations(self):
        """Broken operators are reported, not raised."""

        t = toys.even_toy_triple()
        skew = np.zeros((4, 4), dtype=np.complex128)
        skew[0, 1] = 1.0
        report = triple.check_axioms(dataclasses.replace(t, dirac=t.dirac + skew))
        assert not report.passed
        assert "dirac_selfadjoint" in report.failures()

        # Without the swap the opposite algebra acts on the same vectors.
        plain = dataclasses.replace(
            t, real_structure=triple.AntiUnitary(np.eye(4, dtype=np.complex128))
        )
        report = triple.check_axioms(plain)
        assert "first_order" in report.failures()
        assert "j_square" not in report.failures()

    def test_shapes(self):
        """Operators must act on the Hilbert space of the algebra."""

        t = toys.even_toy_triple()
        with pytest.raises(qisosm.ShapeError):
            dataclasses.replace(t, dirac=np.eye(3, dtype=np.complex128))

    def test_trivial(self):
        """The trivial triple is even with all signs +1."""

        report = triple.check_axioms(triple.trivial_triple())
        assert report.passed
        assert report.info["ko_dimension"] == 0


class TestProduct:
    def test_odd_times_standard_model(self, sm_triple):
        """Odd toy × F is a consistent triple with the signs of F."""

        t = triple.product_triple(toys.odd_toy_triple(), sm_triple)
        assert t.dim_h == 384
        assert t.is_even
        assert t.signs.as_tuple() == (1, 1, -1)
        assert t.algebra.summand_dims == (1, 1, 2, 3, 1, 1, 2, 3)

        report = triple.check_axioms(t)
        assert report.passed, report.failures()

    def test_even_times_standard_model(self, sm_triple):
        """Even toy × F violates JD = ε'DJ for every choice of ε'."""

        t = triple.product_triple(toys.even_toy_triple(), sm_triple)
        report = triple.check_axioms(t)
        assert "j_dirac" in report.failures()

    def test_even_times_even(self):
        """Even toy × even toy violates JD = ε'DJ as well.

        D₁ ⊗ γ₂ is J-compatible only if ε'₁ε''₂ = ε'₂, the toy has
        ε' = 1 and ε'' = -1.
        """

        t = toys.even_toy_triple()
        report = triple.check_axioms(triple.product_triple(t, t))
        assert report.failures() == ["j_dirac"]
        assert report.info["measured_signs"] == [1, 1, 1]

    def test_odd_second_factor(self, sm_triple):
        """The second factor must be even."""

        with pytest.raises(qisosm.ContractError):
            triple.product_triple(sm_triple, toys.odd_toy_triple())

    def test_trivial_factor(self):
        """Multiplying with the trivial triple changes nothing."""

        t = toys.even_toy_triple(0.5)
        product = triple.product_triple(t, triple.trivial_triple())
        np.testing.assert_allclose(product.dirac, t.dirac)
        np.testing.assert_allclose(product.grading, t.grading)
        assert product.signs == t.signs
