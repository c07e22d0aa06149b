"""
Verification suites run by `anosov-lab verify`.

A suite is a list of named criteria, each a pass/fail judgement on one measured value against a
threshold. Numeric failures inside a criterion fail that criterion only; the command exits 4 when
any criterion fails.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from anosov_lab.bowen.limit_set import box_dimension, sample_limit_set
from anosov_lab.bowen.transfer import bowen_dimension
from anosov_lab.calculus.fields import GridSpectrum
from anosov_lab.calculus.forms import certify_center, master_identity_check, pluriharmonicity_residual, pressure_form
from anosov_lab.cli.commands import (
    comparison,
    output_path,
    parameter_grid,
    representation,
    schottky_data,
    settings_echo,
    write_json,
)
from anosov_lab.cli.reporter import LabReporter
from anosov_lab.configs.base import LabConfig
from anosov_lab.configs.enums import Axis
from anosov_lab.configs.run import RunConfig
from anosov_lab.exceptions import ConfigurationError, NumericError, VerificationError
from anosov_lab.matlin import ProjMatrix, cartan, jordan, sym_power, wedge
from anosov_lab.reps.base import WeightFunctional
from anosov_lab.reps.boundary import hyperconvexity_certificate, limit_cone
from anosov_lab.reps.certificates import anosov_certificate
from anosov_lab.spectrum.exponents import entropy_growth, exponent_dirichlet
from anosov_lab.spectrum.table import spectrum_table
from anosov_lab.spectrum.thermo import pressure_orbit, variance

logger = logging.getLogger(__name__)

LINALG_TOLERANCE = 1e-9
LINALG_SAMPLES = 100
EXPONENT_TOLERANCE = 2e-2
BOWEN_TOLERANCE = 1e-2
BOX_TOLERANCE = 5e-2
LIFT_TOLERANCE = 2e-2
PRESSURE_TOLERANCE = 2e-2
VARIANCE_FLOOR = -1e-3
J_FLOOR = 1.0 - 1e-3
DEGENERATE_RATIO = 0.05
PLURIHARMONIC_TOLERANCE = 0.05
MASTER_TOLERANCE = 0.1
HYPERCONVEX_GAP = 1e-8
CONE_MAX_LEN = 6

SUITE_DESCRIPTIONS = {
    "linalg": "Cartan/Jordan invariances and exterior/symmetric power identities on random matrices",
    "identities": "J >= 1, degenerate imaginary direction, pluriharmonicity and the master identity on a grid",
    "certificates": "Anosov certificates for every simple root, limit cone positivity and hyperconvexity",
    "oracles": "Exponent, Bowen and box dimension cross-checks, Sym-lift invariance and pressure calibration",
}


@dataclass
class Criterion:
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


@dataclass
class SuiteReport:
    suite: str
    criteria: List[Criterion] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def results(self) -> Dict[str, bool]:
        return {c.name: c.passed for c in self.criteria}

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "criteria": [c.to_dict() for c in self.criteria]}


def guarded(report: SuiteReport, name: str, check: Callable[[], Criterion]) -> Optional[Criterion]:
    """Run one criterion; a numeric failure fails it with the error message as detail."""
    try:
        criterion = check()
    except NumericError as e:
        logger.warning(f"Criterion {name} failed with {type(e).__name__}: {e}")
        criterion = Criterion(name, False, detail={"error": f"{type(e).__name__}: {e}"})
    report.criteria.append(criterion)
    return criterion


def _random_matrix(rng: np.random.Generator, dim: int) -> ProjMatrix:
    return ProjMatrix(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))


def _linalg_deviations(rng: np.random.Generator, dim: int) -> Dict[str, float]:
    g, h = _random_matrix(rng, dim), _random_matrix(rng, dim)
    lam = jordan(g)
    deviations = {
        "conjugation": float(np.max(np.abs(jordan(h @ g @ h.inverse()).coords - lam.coords))),
        "power": float(np.max(np.abs(jordan(g.power(3)).coords - 3.0 * lam.coords))),
        "cartan_inverse": float(np.max(np.abs(cartan(g.inverse()).coords - cartan(g).opposite().coords))),
        "jordan_inverse": float(np.max(np.abs(jordan(g.inverse()).coords - lam.opposite().coords))),
    }
    wedge_gap = 0.0
    for k in range(1, dim):
        omega = WeightFunctional.omega(k, dim)
        wedge_gap = max(wedge_gap, abs(jordan(wedge(g, k))[0] - omega(lam)), abs(cartan(wedge(g, k))[0] - omega(cartan(g))))
    deviations["wedge"] = float(wedge_gap)
    if dim == 2:
        deviations["sym"] = max(float(abs(jordan(sym_power(g, d))[0] - (d - 1) * lam[0])) for d in (3, 4, 5))
    return deviations


def linalg_suite(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> SuiteReport:
    rng = np.random.default_rng(run.seed)
    worst: Dict[str, float] = {}
    skipped = 0
    for sample in range(LINALG_SAMPLES):
        try:
            deviations = _linalg_deviations(rng, 2 + sample % 4)
        except NumericError as e:
            skipped += 1
            logger.warning(f"Skipping random sample {sample}: {e}")
            continue
        for key, value in deviations.items():
            worst[key] = max(worst.get(key, 0.0), value)
    report = SuiteReport("linalg")
    detail = {"samples": LINALG_SAMPLES, "skipped": skipped}
    for key in sorted(worst):
        report.criteria.append(Criterion(key, worst[key] <= LINALG_TOLERANCE, worst[key], LINALG_TOLERANCE, dict(detail)))
    return report


def identities_suite(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> SuiteReport:
    grid = parameter_grid(run)
    certify_center(grid, lab, threads)
    spectra = GridSpectrum(grid, run.functionals, run.max_len, lab, threads)
    report = SuiteReport("identities")

    def renormalized() -> Criterion:
        field_values = spectra.renormalized_field(0).values
        smallest = float(np.min(field_values))
        return Criterion("renormalized_at_least_one", smallest >= J_FLOOR, smallest, J_FLOOR)

    guarded(report, "renormalized_at_least_one", renormalized)

    def degenerate(index: int) -> Criterion:
        name = f"degenerate_direction[{run.functionals[index]}]"
        along_s = pressure_form(spectra, index, Axis.S, certify=False)
        along_t = pressure_form(spectra, index, Axis.T, certify=False)
        ratio = abs(along_t.value) / max(abs(along_s.value), lab.calculus.floor)
        return Criterion(name, ratio < DEGENERATE_RATIO, ratio, DEGENERATE_RATIO, {"s": along_s.value, "t": along_t.value})

    for index, name in enumerate(run.functionals):
        guarded(report, f"degenerate_direction[{name}]", partial(degenerate, index))

    def pluriharmonic() -> Criterion:
        result = pluriharmonicity_residual(spectra, 0, certify=False)
        passed = result.residual < PLURIHARMONIC_TOLERANCE and not result.flagged
        return Criterion("pluriharmonicity", passed, result.residual, PLURIHARMONIC_TOLERANCE, result.to_dict())

    guarded(report, "pluriharmonicity", pluriharmonic)

    if not (grid.conj_symmetric and grid.holomorphic):
        report.criteria.append(
            Criterion("master_identity", False, detail={"error": "grid is not conjugation-symmetric and holomorphic"})
        )
        return report

    for index, name in enumerate(run.functionals):
        identity = master_identity_check(spectra, index)
        passed = identity.residual < MASTER_TOLERANCE and identity.sign_consistent
        report.criteria.append(
            Criterion(f"master_identity[{name}]", passed, identity.residual, MASTER_TOLERANCE, identity.to_dict())
        )
        if identity.imaginary_growth is not None:
            report.criteria.append(
                Criterion(f"imaginary_growth[{name}]", identity.imaginary_growth, identity.h_tt, 0.0)
            )
    return report


def certificates_suite(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> SuiteReport:
    rep = representation(run)
    report = SuiteReport("certificates")
    for k in range(1, rep.dim):
        root = WeightFunctional.root(k, rep.dim)

        def certify(root=root) -> Criterion:
            certificate = anosov_certificate(rep, root, run.max_len, lab, threads)
            return Criterion(f"anosov[{root.name}]", certificate.passed, certificate.mu, lab.anosov.mu_min, certificate.to_dict())

        guarded(report, f"anosov[{root.name}]", certify)

    def cone() -> Criterion:
        functionals = [WeightFunctional.parse(name, rep.dim) for name in run.functionals]
        result = limit_cone(rep, min(run.max_len, CONE_MAX_LEN), functionals, lab)
        smallest = min(result.minima.values())
        return Criterion("limit_cone_positive", smallest > 0, smallest, 0.0, {"minima": result.minima})

    guarded(report, "limit_cone_positive", cone)

    if rep.dim >= 3:

        def hyperconvex() -> Criterion:
            result = hyperconvexity_certificate(rep, run.sample_size, min(run.max_len, 4), lab)
            return Criterion(
                "hyperconvexity", result.min_gap > HYPERCONVEX_GAP, result.min_gap, HYPERCONVEX_GAP, {"triples": len(result.triples)}
            )

        guarded(report, "hyperconvexity", hyperconvex)
    return report


def oracles_suite(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> SuiteReport:
    rep = representation(run)
    report = SuiteReport("oracles")
    table = spectrum_table(rep, ["a1"], run.max_len, lab, threads)
    growth = entropy_growth(table, 0, 0, lab)

    def exponents() -> Criterion:
        dirichlet = exponent_dirichlet(rep, "a1", run.max_len, lab, threads)
        delta = abs(growth.value - dirichlet.value)
        detail = {"growth": growth.value, "dirichlet": dirichlet.value}
        return Criterion("exponent_cross_method", delta < EXPONENT_TOLERANCE, delta, EXPONENT_TOLERANCE, detail)

    guarded(report, "exponent_cross_method", exponents)

    if rep.dim == 2:

        def bowen() -> Criterion:
            result = bowen_dimension(schottky_data(run, rep), m=run.bowen_cells, threads=threads)
            delta = abs(result.value - growth.value)
            detail = {"bowen": result.value, "exponent": growth.value}
            return Criterion("bowen_vs_exponent", delta < BOWEN_TOLERANCE, delta, BOWEN_TOLERANCE, detail)

        def box() -> Criterion:
            result = box_dimension(sample_limit_set(rep, run.max_len, lab, threads))
            delta = abs(result.value - growth.value)
            detail = {"box": result.value, "exponent": growth.value}
            return Criterion("box_vs_exponent", delta < BOX_TOLERANCE, delta, BOX_TOLERANCE, detail)

        def lift() -> Criterion:
            detail = {"base": growth.value}
            for d in (3, 4, 5):
                lifted = rep.map(partial(sym_power, d=d), family=f"sym{d}")
                table_d = spectrum_table(lifted, ["a1"], run.max_len, lab, threads)
                detail[f"sym{d}"] = entropy_growth(table_d, 0, 0, lab).value
            delta = max(abs(detail[f"sym{d}"] - growth.value) for d in (3, 4, 5))
            return Criterion("sym_lift_invariance", delta < LIFT_TOLERANCE, delta, LIFT_TOLERANCE, detail)

        guarded(report, "bowen_vs_exponent", bowen)
        guarded(report, "box_vs_exponent", box)
        guarded(report, "sym_lift_invariance", lift)

    periods = table.column(0, 0)

    def calibration() -> Criterion:
        pressure = pressure_orbit(table, -growth.value * periods, 0, 0, lab, h=growth.value).value
        return Criterion("pressure_at_entropy", abs(pressure) < PRESSURE_TOLERANCE, abs(pressure), PRESSURE_TOLERANCE)

    guarded(report, "pressure_at_entropy", calibration)

    other = comparison(run)
    if other is not None:
        joint = spectrum_table([rep, other], ["a1"], run.max_len, lab, threads)
        g, base_table = joint.column(1, 0), joint
    else:
        g, base_table = table.core_lengths.astype(np.float64), table

    result = variance(base_table, g, 0, 0, lab, h=growth.value)
    derivative_gap = abs(result.first_derivative - result.gibbs_mean)
    report.criteria.append(
        Criterion(
            "pressure_derivative_vs_gibbs",
            derivative_gap < PRESSURE_TOLERANCE,
            derivative_gap,
            PRESSURE_TOLERANCE,
            result.to_dict(),
        )
    )
    report.criteria.append(Criterion("variance_nonnegative", result.value >= VARIANCE_FLOOR, result.value, VARIANCE_FLOOR))
    return report


SUITES: Dict[str, Callable[[RunConfig, LabConfig, Optional[int]], SuiteReport]] = {
    "linalg": linalg_suite,
    "identities": identities_suite,
    "certificates": certificates_suite,
    "oracles": oracles_suite,
}


def cmd_verify(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> List[str]:
    if run.suite is None:
        raise ConfigurationError(f"verify needs a suite: one of {', '.join(SUITES)}")
    report = SUITES[run.suite](run, lab, threads)
    payload = {**report.to_dict(), "settings": settings_echo(run)}
    path = write_json(payload, output_path(run, f"verify_{run.suite}.json"))
    LabReporter().print_summary(report.suite, report.results())
    if not report.passed:
        failed = [name for name, passed in report.results().items() if not passed]
        raise VerificationError(f"suite {run.suite}: {len(failed)} of {len(report.criteria)} criteria failed ({', '.join(failed)})")
    return [path]
