"""Small reference triples on C⁴, used as factors of product triples."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Final

import numpy as np

from . import common, triple

# Real structure swapping particles and antiparticles, (2, 3, 0, 1).
SWAP: Final = np.array(
    [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=np.complex128
)

SIGMA_Y: Final = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


def _diagonal_algebra(pattern: Sequence[int]) -> triple.BlockAlgebra:
    """The algebra C ⊕ C acting diagonally, a basis vector with entry s
    of the pattern is multiplied by the coefficient of the summand s."""
    units = np.zeros((2, 4, 4), dtype=np.complex128)
    for k, s in enumerate(pattern):
        units[s, k, k] = 1.0
    return triple.BlockAlgebra((1, 1), units)


def even_toy_triple(y: complex = 1.0) -> triple.FiniteRealSpectralTriple:
    """Even triple on the basis (p_L, p̄_R, p̄_L, p_R).

    The coefficient a₁ acts on p_L only and a₂ on the other three vectors,
    the coupling y links p_L with p_R and p̄_R with p̄_L. The KO signs are
    (+1, +1, -1).
    """
    dirac = np.zeros((4, 4), dtype=np.complex128)
    dirac[0, 3] = dirac[1, 2] = y
    dirac[3, 0] = dirac[2, 1] = np.conj(y)
    return triple.FiniteRealSpectralTriple(
        _diagonal_algebra((0, 1, 1, 1)),
        dirac,
        triple.AntiUnitary(SWAP.copy()),
        triple.KOSigns(1, 1, -1),
        np.diag([1.0, 1.0, -1.0, -1.0]).astype(np.complex128),
        "even-toy",
    )


def odd_toy_triple(y: float = 1.0) -> triple.FiniteRealSpectralTriple:
    """Odd triple on the basis (p₁, p₂, p̄₁, p̄₂) with D = 1 ⊗ y·σ_y.

    The KO signs are (+1, -1), the grading is the literal identity.

    :raises ContractError: If the coupling is not real.
    """
    if np.imag(y) != 0:
        raise common.ContractError(f"The odd toy coupling must be real, got {y}.")
    return triple.FiniteRealSpectralTriple(
        _diagonal_algebra((0, 1, 0, 0)),
        np.kron(np.eye(2), float(np.real(y)) * SIGMA_Y),
        triple.AntiUnitary(SWAP.copy()),
        triple.KOSigns(1, -1, 1),
        None,
        "odd-toy",
    )
