"""Defines the commands for executing the module directly."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os.path
import sys
from typing import Callable, Optional

import numpy as np

from . import (
    action,
    codec,
    common,
    cqgrep,
    isometry,
    numlin,
    realform,
    smtriple,
    toys,
    triple,
)
from .log import logger

EXIT_PASSED = 0
EXIT_FAILED = 2
EXIT_INPUT_ERROR = 3

SAMPLE_PARAMS = "sample_params_n3.json"
IDENTITY_GENERATORS = "identity_generators.json"


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Settings shared by all commands."""

    params_path: Optional[str] = None
    """
    Parameter file, the bundled n = 3 sample if None.
    """

    generators_path: Optional[str] = None
    """
    Generator file, the bundled identity point if None.
    """

    tolerance: float = common.DEFAULT_TOLERANCE

    seed: int = common.DEFAULT_SEED

    cutoff: action.CutoffFunction = action.CutoffFunction()
    """
    Cut-off function of the spectral action, including the scale Λ.
    """

    variant: str = "real"

    out_dir: Optional[str] = None
    """
    Directory the report file is written to, no file is written if None.
    """

    output_format: str = "json"

    product: bool = False
    """
    Run the action checks on the product of a toy triple with F.
    """

    draws: int = 3
    """
    Number of random one-forms, classical points or fixtures per check.
    """

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        """Create the configuration from parsed command line arguments.

        :raises InputError: If a value is out of range.
        """
        if not (np.isfinite(args.tol) and args.tol > 0):
            raise common.InputError(f"Tolerance must be positive, got {args.tol}.")
        if not (np.isfinite(args.scale) and args.scale > 0):
            raise common.InputError(f"Λ must be positive, got {args.scale}.")
        if args.draws < 1:
            raise common.InputError(
                f"Number of draws must be positive, got {args.draws}."
            )
        return cls(
            params_path=args.params,
            generators_path=args.generators,
            tolerance=args.tol,
            seed=args.seed,
            cutoff=parse_cutoff(args.cutoff, args.scale),
            variant=args.variant,
            out_dir=args.out,
            output_format=args.format,
            product=args.product,
            draws=args.draws,
        )


def parse_cutoff(text: str, scale: float = 1.0) -> action.CutoffFunction:
    """Parse 'gaussian', 'poly:c0,c1,...' or 'table:x0:y0,x1:y1,...'.

    :raises InputError: If the text is not of one of these forms.
    """
    kind, _, rest = text.partition(":")
    try:
        if kind == "gaussian" and not rest:
            return action.CutoffFunction.gaussian(scale)
        if kind == "poly":
            coefficients = [float(c) for c in rest.split(",")]
            return action.CutoffFunction.even_polynomial(coefficients, scale)
        if kind == "table":
            points = []
            for item in rest.split(","):
                x, y = item.split(":")
                points.append((float(x), float(y)))
            return action.CutoffFunction.table(points, scale)
    except (ValueError, common.ContractError) as e:
        raise common.InputError(f'Unable to parse cut-off "{text}": {e}')
    raise common.InputError(
        f'Unknown cut-off "{text}", expected gaussian, poly:... or table:...'
    )


def _load_params(config: RunConfig) -> smtriple.YukawaSet:
    if config.params_path is None:
        return codec.yukawa_from_json(codec.bundled(SAMPLE_PARAMS))
    return codec.yukawa_from_json(codec.load_file(config.params_path))


def _load_generators(config: RunConfig, n: int) -> cqgrep.RepresentedGenerators:
    if config.generators_path is None:
        g = codec.generators_from_json(codec.bundled(IDENTITY_GENERATORS))
    else:
        g = codec.generators_from_json(codec.load_file(config.generators_path))
    if g.n != n:
        raise common.InputError(
            f"Generators are for n={g.n}, the parameters expect n={n}."
        )
    return g


def _emit(config: RunConfig, command: str, report: common.CheckReport) -> int:
    """Write the report file, print the summary and return the exit status."""
    doc = codec.report_to_json(report, command, config.seed)
    if config.out_dir is not None:
        os.makedirs(config.out_dir, exist_ok=True)
        path = os.path.join(config.out_dir, f"{command}.{config.output_format}")
        if config.output_format == "csv":
            text = codec.report_to_csv(doc)
        else:
            text = codec.dumps(doc)
        with open(path, "w", encoding="utf-8", newline="") as file:
            file.write(text)
        logger.info(f"Report written to '{path}'.")

    status = "passed" if report.passed else "FAILED"
    print(
        f"{command}: {status}, {len(report.checks)} checks, "
        f"max residual {report.max_residual:.3e}"
    )
    for name in report.failures():
        logger.warning(f"Check '{name}' failed: {report.checks[name].value:.3e}")
    return EXIT_PASSED if report.passed else EXIT_FAILED


def _validate_report(config: RunConfig) -> common.CheckReport:
    p = _load_params(config)
    tol = config.tolerance
    report = common.CheckReport(tolerance=tol)
    validation = smtriple.validate_params(p, tol)
    report.merge("params", validation)
    report.info["minimal_regime"] = validation.minimal_regime
    report.info["nu_invertible"] = validation.nu_invertible
    if validation.passed:
        f = smtriple.build_triple(p, tol)
        report.merge("axioms", triple.check_axioms(f, tol))
    return report


def _commutant_report(config: RunConfig) -> common.CheckReport:
    p = _load_params(config)
    tol = config.tolerance
    f = smtriple.build_triple(p, tol)
    commutant = isometry.classical_commutant_basis(f, tol)
    report = common.CheckReport(tolerance=tol)
    report.merge("commutant", commutant)
    report.info["real_dimension"] = commutant.real_dimension

    rng = numlin.make_rng(config.seed)
    coreps = [
        isometry.assemble_U(cqgrep.random_classical_point(rng, p.n))
        for _ in range(config.draws)
    ]
    worst = max(commutant.projection_residual(c.u) for c in coreps)
    report.add("classical_in_span", worst, common.threshold(tol, f.dim_h))
    structure = isometry.structural_reduction_check(f, commutant, coreps[0], tol)
    report.merge("structure", structure)
    return report


def _corep_report(config: RunConfig) -> common.CheckReport:
    p = _load_params(config)
    tol = config.tolerance
    g = _load_generators(config, p.n)
    f = smtriple.build_triple(p, tol)
    report = common.CheckReport(tolerance=tol)
    report.info["aux_dim"] = g.aux_dim
    report.merge("relations", cqgrep.check_generator_relations(g, p, tol))
    report.merge("special", cqgrep.special_case_check(g, p, tol))

    c = isometry.assemble_U(g)
    conditions = isometry.verify_corep_conditions(c, f, tol)
    report.merge("conditions", conditions)
    report.merge("laws", isometry.transformation_laws_check(c, tol))
    if conditions.checks["containment"].passed:
        coefficients = isometry.adjoint_coaction_coefficients(c, f, tol)
        report.merge("coaction", isometry.coaction_formula_check(coefficients, g, tol))
    if conditions.passed:
        try:
            structure = isometry.structural_reduction_check(f, None, c, tol)
            report.merge("structure", structure)
        except common.StructuralError as e:
            report.add_condition("structure", 0.0, False)
            report.info["structure"] = str(e)
    return report


def _action_report(config: RunConfig) -> common.CheckReport:
    p = _load_params(config)
    tol = config.tolerance
    g = _load_generators(config, p.n)
    f = smtriple.build_triple(p, tol)
    c = isometry.assemble_U(g)
    if config.product:
        toy = toys.odd_toy_triple()
        f = triple.product_triple(toy, f)
        c = isometry.lift(c, toy.dim_h)

    report = common.CheckReport(tolerance=tol)
    report.info["triple"] = f.name
    report.info["variant"] = config.variant
    report.info["cutoff"] = config.cutoff.kind
    report.info["lambda"] = config.cutoff.scale
    conditions = isometry.verify_corep_conditions(c, f, tol)
    report.merge("conditions", conditions)
    if not conditions.passed:
        return report

    rng = numlin.make_rng(config.seed)
    size = f.dim_h * c.aux_dim
    for i in range(config.draws):
        a = action.random_one_form(f, rng)
        psi = numlin.complex_gaussian(rng, (f.dim_h,))
        report.merge(
            f"draw{i}",
            action.action_report(f, a, psi, config.cutoff, config.variant, tol),
        )
        invariance = action.extended_actions_invariance(
            c, f, a, psi, config.cutoff, config.variant, tol
        )
        report.merge(f"draw{i}.invariance", invariance)
        d_a = action.fluctuate(f, a, config.variant, tol)
        report.add(
            f"draw{i}.gauge_covariance",
            action.gauge_covariance_residual(c, f, a, config.variant, tol),
            common.threshold(tol, size, numlin.frobenius(d_a)),
        )
    return report


def _realform_report(config: RunConfig) -> common.CheckReport:
    p = _load_params(config)
    tol = config.tolerance
    g = _load_generators(config, p.n)
    rng = numlin.make_rng(config.seed)
    report = common.CheckReport(tolerance=tol)
    report.merge("generators", realform.extended_coaction_check(g, tol))
    report.add(
        "sigma_compatibility",
        realform.sigma_compatibility_residual(g, rng),
        common.threshold(tol, g.aux_dim),
    )
    report.info["derived_relation"] = realform.derived_relation_residual(g)
    report.info["coefficient_commutativity"] = (
        realform.coefficient_commutativity_residual(g)
    )

    # A half-liberated point passes, a free point fails but satisfies A_u(1).
    for i in range(config.draws):
        half = realform.extended_coaction_check(
            cqgrep.random_half_liberated_point(rng, p.n), tol
        )
        report.add_condition(
            f"fixture{i}.half_liberated",
            half.residual("multiplicative.m3_prime"),
            half.passed,
        )
        free_point = cqgrep.random_free_point(rng, p.n, 3, nu_zero=True)
        free = realform.extended_coaction_check(free_point, tol)
        unitary = cqgrep.check_au_r_relations(free_point.t_block(0), np.eye(3), tol)
        separated = (
            unitary.passed
            and free.checks["flags_agree"].passed
            and not free.checks["multiplicative.m3_prime"].passed
        )
        report.add_condition(
            f"fixture{i}.free_separated",
            free.residual("multiplicative.m3_prime"),
            separated,
        )
    return report


def _fixture_report(config: RunConfig) -> common.CheckReport:
    """Isometry conditions and convolution closure for the standard fixtures."""
    p = _load_params(config)
    tol = config.tolerance
    n = p.n
    rng = numlin.make_rng(config.seed)
    f = smtriple.build_triple(p, tol)
    fixtures = {
        "identity": cqgrep.identity_point(n),
        "classical": cqgrep.random_classical_point(rng, n),
        "gauge": cqgrep.make_gauge_point(
            numlin.haar_phase(rng), numlin.haar_unitary(rng, 3), n
        ),
        "baryon": cqgrep.make_baryon_point(numlin.haar_phase(rng), n),
        "half_liberated": cqgrep.random_half_liberated_point(rng, n),
    }
    report = common.CheckReport(tolerance=tol)
    for name, g in fixtures.items():
        c = isometry.assemble_U(g)
        report.merge(f"{name}.relations", cqgrep.check_generator_relations(g, p, tol))
        report.merge(f"{name}.conditions", isometry.verify_corep_conditions(c, f, tol))

    # Independent x_k need Υ_ν = 0.
    minimal = smtriple.random_yukawa_set(rng, n, "minimal")
    free = cqgrep.random_free_point(rng, n, 3, nu_zero=True)
    report.merge(
        "free.conditions",
        isometry.verify_corep_conditions(
            isometry.assemble_U(free), smtriple.build_triple(minimal, tol), tol
        ),
    )

    names = list(fixtures)
    for i in range(config.draws):
        first, second = rng.choice(len(names), size=2)
        g = cqgrep.convolve(fixtures[names[first]], fixtures[names[second]])
        report.merge(f"closure{i}", cqgrep.check_generator_relations(g, p, 10 * tol))
    return report


def _suite_report(config: RunConfig) -> common.CheckReport:
    report = common.CheckReport(tolerance=config.tolerance)
    report.merge("fixtures", _fixture_report(config))
    for name, build in _REPORTS.items():
        if name == "suite":
            continue
        logger.info(f"Running '{name}'...")
        report.merge(name, build(config))
        if name == "action" and not config.product:
            logger.info("Running 'action' on the product triple...")
            product = dataclasses.replace(config, product=True, draws=1)
            report.merge("action_product", build(product))
    return report


_REPORTS: dict[str, Callable[[RunConfig], common.CheckReport]] = {
    "validate": _validate_report,
    "commutant": _commutant_report,
    "corep-check": _corep_report,
    "action": _action_report,
    "realform": _realform_report,
    "suite": _suite_report,
}


def run(command: str, config: RunConfig) -> int:
    """Run a command and emit its report.

    :param command: One of the subcommand names.
    :param config: The settings.
    :return: Exit status, 0 if all checks passed, 2 if some check failed
        and 3 for invalid input.
    """
    try:
        report = _REPORTS[command](config)
    except common.ParameterError as e:
        logger.error(f"Invalid parameters: {e}")
        report = common.CheckReport(tolerance=config.tolerance)
        report.merge("params", e.report)
    except (
        common.InputError,
        common.ShapeError,
        common.ContractError,
        common.RangeError,
    ) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT_ERROR
    return _emit(config, command, report)


_HELP = {
    "validate": "Check the parameter hypotheses and the axioms of the triple.",
    "commutant": "Compute the classical commutant of the triple by brute force.",
    "corep-check": "Check generators, the isometry conditions and the coaction.",
    "action": "Compare the extended spectral action with the ordinary one.",
    "realform": "Check the coaction on the real form (half-liberation).",
    "suite": "Run all checks.",
}


def main() -> int:
    """Entrypoint function for when the module is executed directly.

    :return: Exit status for the program.
    """
    if sys.executable:
        interpreter = os.path.basename(sys.executable)
    else:
        interpreter = "python3"  # pragma: no cover

    parser = argparse.ArgumentParser(prog=f"{interpreter} -m qisosm")
    parser.add_argument("--debug", action="store_true", help="log debug messages")
    subparsers = parser.add_subparsers()

    for command, text in _HELP.items():
        sub = subparsers.add_parser(command, help=text)
        sub.add_argument("--params", type=str, help="Yukawa parameter file (JSON)")
        sub.add_argument("--generators", type=str, help="generator file (JSON)")
        sub.add_argument(
            "--tol", type=float, default=common.DEFAULT_TOLERANCE, help="tolerance"
        )
        sub.add_argument(
            "--seed", type=int, default=common.DEFAULT_SEED, help="random seed"
        )
        sub.add_argument(
            "--lambda", dest="scale", type=float, default=1.0, help="scale Λ"
        )
        sub.add_argument(
            "--cutoff",
            type=str,
            default="gaussian",
            help="'gaussian', 'poly:c0,c1,...' or 'table:x0:y0,x1:y1,...'",
        )
        sub.add_argument(
            "--variant", choices=action.VARIANTS, default="real", help="action form"
        )
        sub.add_argument("--out", type=str, help="directory for the report file")
        sub.add_argument(
            "--format", choices=("json", "csv"), default="json", help="report format"
        )
        sub.add_argument(
            "--product", action="store_true", help="use the product with a toy triple"
        )
        sub.add_argument("--draws", type=int, default=3, help="number of random draws")
        sub.set_defaults(command=command)

    args = parser.parse_args()

    if args.debug:
        logging.basicConfig(level=logging.DEBUG)
    else:
        logging.basicConfig(level=logging.INFO)

    if not hasattr(args, "command"):
        sys.stderr.write("No command specified.\n\n")
        parser.print_help(file=sys.stderr)
        return 1

    try:
        config = RunConfig.from_args(args)
    except common.InputError as e:
        logger.error(f"Invalid arguments: {e}")
        return EXIT_INPUT_ERROR

    return run(args.command, config)
