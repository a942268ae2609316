"""Common constants, exceptions and report classes used in the qisosm package."""

from __future__ import annotations

import dataclasses
import math
from typing import Any, Final, Optional

import numpy as np
import numpy.typing as npt

# Default relative tolerance of all checks.
DEFAULT_TOLERANCE: Final = 1e-9

# Largest side length of a matrix built by 'numlin.kron'.
MAX_DIMENSION: Final = 100_000

# Version of the JSON report and fixture schema.
SCHEMA_VERSION: Final = 1

DEFAULT_SEED: Final = 0

# Largest Frobenius norm of a Yukawa matrix, products of D_F must stay finite.
MAX_MAGNITUDE: Final = 1e150

CMatrix = npt.NDArray[np.complex128]

RealArray = npt.NDArray[np.float64]


class QisoError(Exception):
    """Base class of all errors raised by qisosm."""


class ShapeError(QisoError):
    """Operands have inconsistent shapes or block grids."""


class SizeError(QisoError):
    """A Kronecker product would exceed the configured dimension cap."""


class ContractError(QisoError):
    """A precondition of an operation is violated."""


class RangeError(QisoError):
    """A basis index is out of range."""


class ContainmentError(QisoError):
    """An element is not contained in the expected subspace."""


class StructuralError(QisoError):
    """A corepresentation does not have the expected block pattern."""

    def __init__(self, block: str, message: str) -> None:  # noqa: D107
        super().__init__(f"{block}: {message}")
        self.block = block


class ParameterError(QisoError):
    """Construction refused because the parameters are invalid."""

    def __init__(self, report: CheckReport) -> None:  # noqa: D107
        failed = ", ".join(report.failures())
        super().__init__(f"Invalid parameters, failed checks: {failed}.")
        self.report = report


class InputError(QisoError):
    """Malformed input data (parameter or generator files)."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:  # noqa: D107
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


def threshold(tol: float, dim: int, scale: float = 1.0) -> float:
    """Return the absolute limit a residual is compared against.

    Residuals are measured in the Frobenius norm, so the relative tolerance
    is scaled by the square root of the dimension and by the norm of the
    operands (but never by less than one).

    :param tol: Relative tolerance.
    :param dim: Dimension of the space the residual lives on.
    :param scale: Norm of the operands entering the residual.
    :return: The absolute limit.
    """
    return tol * math.sqrt(max(dim, 1)) * max(1.0, scale)


@dataclasses.dataclass(frozen=True)
class Check:
    """Outcome of a single named check."""

    value: float
    """
    The measured residual (or value, for conditions).
    """

    limit: Optional[float]
    """
    Limit the residual was compared against, None for plain conditions.
    """

    passed: bool


@dataclasses.dataclass
class CheckReport:
    """Ordered collection of named residuals with pass flags.

    Operations returning a report never raise when a check fails, the
    caller decides what to do with the failures.
    """

    tolerance: float = DEFAULT_TOLERANCE

    checks: dict[str, Check] = dataclasses.field(default_factory=dict)

    info: dict[str, Any] = dataclasses.field(default_factory=dict)
    """
    Additional values that are reported but not checked.
    """

    def add(self, name: str, residual: float, limit: float) -> bool:
        """Record a residual, it passes if it is below the limit.

        :param name: Name of the check.
        :param residual: The measured residual.
        :param limit: The absolute limit.
        :return: Whether the check passed.
        """
        residual = float(residual)
        passed = bool(np.isfinite(residual) and residual < limit)
        self.checks[name] = Check(residual, float(limit), passed)
        return passed

    def add_condition(self, name: str, value: float, passed: bool) -> bool:
        """Record a check that was decided by the caller.

        :param name: Name of the check.
        :param value: A value describing the outcome.
        :param passed: Whether the check passed.
        :return: The 'passed' argument.
        """
        self.checks[name] = Check(float(value), None, bool(passed))
        return bool(passed)

    def residual(self, name: str) -> float:
        """Return the value recorded for the named check."""
        return self.checks[name].value

    @property
    def passed(self) -> bool:
        """True if all recorded checks passed."""
        return all(c.passed for c in self.checks.values())

    @property
    def max_residual(self) -> float:
        """Largest residual of all checks compared against a limit."""
        values = [c.value for c in self.checks.values() if c.limit is not None]
        return max(values, default=0.0)

    def failures(self) -> list[str]:
        """Return the names of all failed checks."""
        return [name for name, c in self.checks.items() if not c.passed]

    def merge(self, prefix: str, other: CheckReport) -> None:
        """Copy the checks and info of another report, prefixing their names."""
        for name, check in other.checks.items():
            self.checks[f"{prefix}.{name}"] = check
        for name, value in other.info.items():
            self.info[f"{prefix}.{name}"] = value

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-compatible representation of the report."""
        return {
            "passed": self.passed,
            "tolerance": self.tolerance,
            "checks": {
                name: {"value": c.value, "limit": c.limit, "passed": c.passed}
                for name, c in self.checks.items()
            },
            "info": dict(self.info),
        }
