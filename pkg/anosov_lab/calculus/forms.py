"""
Pressure forms and the identity harness over parameter grids.

Every quantity here is a finite difference of a field built from one GridSpectrum, so the
orbit-sum truncation is the same at every node of a stencil.
"""

import csv
import json
import logging
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, List, Optional, Sequence

import numpy as np

from anosov_lab.calculus.fields import GridSpectrum, ScalarField, gradient, hessian_grid, hessian_signature, second_difference
from anosov_lab.configs.base import LabConfig, resolve
from anosov_lab.configs.enums import Axis
from anosov_lab.exceptions import VerificationError
from anosov_lab.reps.base import WeightFunctional
from anosov_lab.reps.certificates import anosov_certificate
from anosov_lab.reps.grid import ParamGrid
from anosov_lab.spectrum.thermo import renormalized_intersection
from anosov_lab.words import ConjClass

logger = logging.getLogger(__name__)


def certify_center(grid: ParamGrid, config: Optional[LabConfig] = None, threads: Optional[int] = None):
    config = resolve(config)
    certificate = anosov_certificate(
        grid.center, WeightFunctional.root(1, grid.dim), config.anosov.certify_max_len, config, threads
    )
    if not certificate.passed:
        logger.error(f"Grid center failed the Anosov certificate: mu={certificate.mu:.4g}, c={certificate.c:.4g}")
        raise VerificationError(f"grid center is not Anosov-certified (mu={certificate.mu:.4g} < {config.anosov.mu_min})")
    return certificate


def _axis(axis) -> Axis:
    return axis if isinstance(axis, Axis) else Axis(str(axis).lower())


@dataclass
class PressureForm:
    value: float
    axis: str
    functional: str
    step: float
    spread: float
    j_minus: float
    j_plus: float

    def to_dict(self) -> dict:
        return asdict(self)


def pressure_form(
    spectra: GridSpectrum,
    functional=0,
    axis=Axis.S,
    certify: bool = True,
) -> PressureForm:
    """
    Second central difference of tau -> J(rho_center, rho_tau) along one grid axis.

    The spread propagates the window spreads of J at the two outer nodes.
    """
    axis = _axis(axis)
    config = spectra.config
    if certify:
        certify_center(spectra.grid, config, spectra.threads)
    index = spectra.functional_index(functional)
    plus, minus = ((1, 0), (-1, 0)) if axis is Axis.S else ((0, 1), (0, -1))
    step = spectra.geometry.ds if axis is Axis.S else spectra.geometry.dt
    base = spectra.columns[(0, 0)]
    j_plus = renormalized_intersection(spectra.spectrum, base, spectra.columns[plus], index, config)
    j_minus = renormalized_intersection(spectra.spectrum, base, spectra.columns[minus], index, config)
    value = (j_plus.value - 2.0 + j_minus.value) / step**2
    spread = (j_plus.spread + j_minus.spread) / step**2
    logger.info(f"Pressure form along {axis.value} ({spectra.functional_name(index)}): {value:.6g} (spread {spread:.3g})")
    return PressureForm(
        value=value,
        axis=axis.value,
        functional=spectra.functional_name(index),
        step=step,
        spread=spread,
        j_minus=j_minus.value,
        j_plus=j_plus.value,
    )


@dataclass
class PressureComponents:
    direct: float
    assembled: float
    assembled_measured: float
    h0: float
    h_first: float
    h_second: float
    i_first: float
    i_second: float

    def to_dict(self) -> dict:
        return asdict(self)


def pressure_form_components(spectra: GridSpectrum, functional=0, axis=Axis.S, certify: bool = True) -> PressureComponents:
    """
    The pressure form assembled from its ingredients along one axis:

        h_tau tau / h0 - 2 h_tau^2 / h0^2 + I_tau tau

    next to the direct second difference of J. `assembled_measured` uses the measured I_tau in
    place of -h_tau / h0 (h_tau tau / h0 + 2 h_tau I_tau / h0 + I_tau tau).
    """
    axis = _axis(axis)
    direct = pressure_form(spectra, functional, axis, certify)
    h_field = spectra.entropy_field(functional)
    i_field = spectra.intersection_field(functional)
    pick = 0 if axis is Axis.S else 1
    h0 = h_field.center
    h_first = float(_plain_gradient(h_field)[pick])
    i_first = float(_plain_gradient(i_field)[pick])
    h_second = second_difference(h_field, axis)
    i_second = second_difference(i_field, axis)
    assembled = h_second / h0 - 2.0 * h_first**2 / h0**2 + i_second
    measured = h_second / h0 + 2.0 * h_first * i_first / h0 + i_second
    return PressureComponents(
        direct=direct.value,
        assembled=assembled,
        assembled_measured=measured,
        h0=h0,
        h_first=h_first,
        h_second=h_second,
        i_first=i_first,
        i_second=i_second,
    )


def _plain_gradient(f: ScalarField) -> np.ndarray:
    g = f.geometry
    return np.array(
        [
            (f.at((1, 0)) - f.at((-1, 0))) / (2.0 * g.ds),
            (f.at((0, 1)) - f.at((0, -1))) / (2.0 * g.dt),
        ]
    )


@dataclass
class PluriharmonicityReport:
    residual: float
    i_ss: float
    i_tt: float
    holomorphic: bool
    flagged: bool

    def to_dict(self) -> dict:
        return asdict(self)


def pluriharmonicity_residual(spectra: GridSpectrum, functional=0, certify: bool = True) -> PluriharmonicityReport:
    """|I_ss + I_tt| / max(|I_ss|, |I_tt|, floor) at the center for I(z) = I(rho_center, rho_z)."""
    config = spectra.config
    if certify:
        certify_center(spectra.grid, config, spectra.threads)
    hessian = hessian_grid(spectra.intersection_field(functional))
    scale = max(abs(hessian.ss), abs(hessian.tt), config.calculus.floor)
    residual = abs(hessian.laplacian) / scale
    flagged = not spectra.grid.holomorphic
    if flagged:
        logger.warning(f"Grid is not holomorphic: pluriharmonicity residual {residual:.3g} is a control value")
    else:
        logger.info(f"Pluriharmonicity residual {residual:.3g} (I_ss={hessian.ss:.4g}, I_tt={hessian.tt:.4g})")
    return PluriharmonicityReport(
        residual=residual,
        i_ss=hessian.ss,
        i_tt=hessian.tt,
        holomorphic=spectra.grid.holomorphic,
        flagged=flagged,
    )


@dataclass
class MasterIdentityReport:
    residual: float
    h0: float
    h_s: float
    h_t: float
    h_ss: float
    h_tt: float
    pressure: float
    pressure_spread: float
    predicted_h_tt: float
    trusted: bool
    sign_consistent: bool
    imaginary_growth: Optional[bool]
    intersection_signature: dict
    functional: str
    settings: dict = field(default_factory=dict)
    h_field: Optional[ScalarField] = None

    def to_dict(self) -> dict:
        payload = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "h_field"}
        if self.h_field is not None:
            payload["h_grid"] = self.h_field.values.tolist()
        return payload


def master_identity_check(spectra: GridSpectrum, functional=0, sign_tolerance: float = 1e-3) -> MasterIdentityReport:
    """
    Compare h_tt with h0 P(d_s) - h_ss + 2 h_s^2 / h0 at a real, certified center.

    R = |h_tt - (h0 P - h_ss + 2 h_s^2 / h0)| / max(|h_tt|, |h0 P|, |h_ss|, floor).
    """
    grid = spectra.grid
    config = spectra.config
    if not (grid.conj_symmetric and grid.holomorphic):
        raise VerificationError("master identity needs a conjugation-symmetric holomorphic grid")
    if grid.geometry.t0 != 0.0:
        raise VerificationError("master identity needs a real grid center")
    certify_center(grid, config, spectra.threads)

    index = spectra.functional_index(functional)
    h_field = spectra.entropy_field(index)
    h0 = h_field.center
    h_t_plain = (h_field.at((0, 1)) - h_field.at((0, -1))) / (2.0 * grid.geometry.dt)
    if h_t_plain != 0.0:
        raise VerificationError(f"conjugation symmetry broken: h_t = {h_t_plain:.3e} at the center")
    h_s, h_t = gradient(h_field)
    hessian = hessian_grid(h_field)
    pressure = pressure_form(spectra, index, Axis.S, certify=False)

    predicted = h0 * pressure.value - hessian.ss + 2.0 * h_s**2 / h0
    scale = max(abs(hessian.tt), abs(h0 * pressure.value), abs(hessian.ss), config.calculus.floor)
    residual = abs(hessian.tt - predicted) / scale
    trusted = abs(h_s) * grid.geometry.ds <= config.calculus.trust_fraction * h0
    if not trusted:
        logger.warning(f"Outside the trust region: |h_s| ds = {abs(h_s) * grid.geometry.ds:.3g} vs h0 = {h0:.4g}")
    sign_consistent = bool(hessian.tt >= h0 * pressure.value - hessian.ss - sign_tolerance)
    imaginary_growth = None
    if pressure.value > 0 and hessian.ss <= 0:
        imaginary_growth = bool(hessian.tt > 0)
    signature = hessian_signature(spectra.intersection_field(index), config.calculus.floor)
    logger.info(f"Master identity ({spectra.functional_name(index)}): h_tt={hessian.tt:.6g}, predicted {predicted:.6g}, R={residual:.3g}")
    return MasterIdentityReport(
        residual=residual,
        h0=h0,
        h_s=float(h_s),
        h_t=float(h_t),
        h_ss=hessian.ss,
        h_tt=hessian.tt,
        pressure=pressure.value,
        pressure_spread=pressure.spread,
        predicted_h_tt=predicted,
        trusted=bool(trusted),
        sign_consistent=sign_consistent,
        imaginary_growth=imaginary_growth,
        intersection_signature=signature.to_dict(),
        functional=spectra.functional_name(index),
        settings={"geometry": grid.geometry.to_dict(), "max_len": spectra.spectrum.max_len},
        h_field=h_field,
    )


@dataclass
class DegenerateDirectionReport:
    max_derivative: float
    axis: str
    derivatives: Dict[str, float]

    def to_dict(self) -> dict:
        return asdict(self)


def degenerate_direction_check(
    spectra: GridSpectrum,
    functional=0,
    classes: Optional[Sequence[ConjClass]] = None,
    sample: int = 32,
    axis=Axis.T,
) -> DegenerateDirectionReport:
    """
    Central first difference of h(rho_tau) * period(rho_tau, class) along an axis, per class.

    Without an explicit list the `sample` shortest classes of the table are used.
    """
    axis = _axis(axis)
    index = spectra.functional_index(functional)
    h_field = spectra.entropy_field(index)
    plus, minus = ((1, 0), (-1, 0)) if axis is Axis.S else ((0, 1), (0, -1))
    step = spectra.geometry.ds if axis is Axis.S else spectra.geometry.dt
    table = spectra.spectrum
    rows: List[int] = [table.find(c) for c in classes] if classes is not None else list(range(min(sample, len(table))))
    column_plus = table.column(spectra.columns[plus], index)
    column_minus = table.column(spectra.columns[minus], index)
    derivatives = {}
    for row in rows:
        value = (h_field.at(plus) * column_plus[row] - h_field.at(minus) * column_minus[row]) / (2.0 * step)
        derivatives[str(table.classes[row])] = float(value)
    largest = max((abs(v) for v in derivatives.values()), default=0.0)
    logger.info(f"Largest d/d{axis.value} (h * period) over {len(rows)} classes: {largest:.3g}")
    return DegenerateDirectionReport(max_derivative=largest, axis=axis.value, derivatives=derivatives)


def export_report(report, json_path: str, csv_path: Optional[str] = None) -> None:
    """Write a report as JSON and, when it carries an h field, the field as CSV (is, it, s, t, h)."""
    with open(json_path, "w") as handle:
        json.dump(report.to_dict(), handle, indent=2, sort_keys=True)
    h_field = getattr(report, "h_field", None)
    if csv_path is None or h_field is None:
        return
    g = h_field.geometry
    with open(csv_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["is", "it", "s", "t", "h"])
        for i_s, i_t in g.nodes():
            z = g.z((i_s, i_t))
            writer.writerow([i_s, i_t, f"{z.real:.17g}", f"{z.imag:.17g}", f"{h_field.at((i_s, i_t)):.17g}"])
