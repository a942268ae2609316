import numpy as np
import pytest  # type: ignore

from qisosm import codec, cqgrep, numlin, smtriple


@pytest.fixture
def rng():
    """Return a deterministic random generator."""

    return numlin.make_rng(1234)


@pytest.fixture(scope="session")
def sample_params():
    """Return the bundled Yukawa matrices for three generations."""

    return codec.yukawa_from_json(codec.bundled("sample_params_n3.json"))


@pytest.fixture(scope="session")
def sm_triple(sample_params):
    """Return the Standard Model triple built from the sample parameters."""

    return smtriple.build_triple(sample_params)


@pytest.fixture(scope="session")
def minimal_params():
    """Return Yukawa matrices without neutrino masses."""

    return smtriple.random_yukawa_set(numlin.make_rng(7), 3, "minimal")


@pytest.fixture(scope="session")
def minimal_triple(minimal_params):
    """Return the triple of the minimal Standard Model."""

    return smtriple.build_triple(minimal_params)


@pytest.fixture
def half_liberated(rng):
    """Return a noncommutative half-liberated point for three generations."""

    return cqgrep.random_half_liberated_point(rng, 3)


@pytest.fixture
def antidiagonal_point():
    """Return an antidiagonal point built from two fixed unitaries."""

    g = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=np.complex128)
    h = np.diag([1.0, 1j, -1.0])
    return cqgrep.make_antidiagonal_point(3, g, h)
