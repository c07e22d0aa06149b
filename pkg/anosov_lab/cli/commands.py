"""
Batch commands behind the anosov-lab CLI.

Every command takes the validated RunConfig, the LabConfig derived from it and a worker count,
writes its outputs under run.out_dir and returns the written paths. JSON outputs are dumped with
sorted keys; floats use repr, which round-trips exactly.
"""

import json
import logging
import os
from typing import Any, Callable, Dict, List, Optional

from anosov_lab.bowen.limit_set import box_dimension, export_cloud_csv, export_ppm, sample_limit_set
from anosov_lab.bowen.schottky import SchottkyData
from anosov_lab.bowen.transfer import bowen_dimension
from anosov_lab.calculus.fields import GridSpectrum
from anosov_lab.calculus.forms import certify_center, export_report, master_identity_check, pressure_form, pressure_form_components
from anosov_lab.configs.base import LabConfig
from anosov_lab.configs.enums import Axis
from anosov_lab.configs.families.base import to_complex
from anosov_lab.configs.run import RunConfig
from anosov_lab.exceptions import ConfigurationError
from anosov_lab.families.disks import DiskSchottkyFamily
from anosov_lab.reps.base import RepPoint
from anosov_lab.reps.grid import ParamGrid, grid_builder, load_grid
from anosov_lab.spectrum.exponents import entropy_growth, exponent_dirichlet
from anosov_lab.spectrum.table import export_csv, spectrum_table
from anosov_lab.spectrum.thermo import intersection, renormalized_intersection
from anosov_lab.utils.factory import FamilyFactory

logger = logging.getLogger(__name__)

Command = Callable[[RunConfig, LabConfig, Optional[int]], List[str]]


def output_path(run: RunConfig, name: str) -> str:
    os.makedirs(run.out_dir, exist_ok=True)
    return os.path.join(run.out_dir, name)


def write_json(payload: Dict[str, Any], path: str) -> str:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def settings_echo(run: RunConfig) -> Dict[str, Any]:
    """The run settings that determine the numbers; worker count and output location are left out."""
    return run.model_dump(mode="json", exclude={"threads", "out_dir", "command"})


def build_family(raw: Optional[Dict[str, Any]]):
    if raw is None:
        raise ConfigurationError("no family given: set `family`, `fixture` or `grid_file`")
    return FamilyFactory.from_dict(raw)


def representation(run: RunConfig) -> RepPoint:
    """The representation single-point commands work on: the family at `parameter`, else the grid center."""
    if run.family is None and run.grid_file is not None:
        return load_grid(run.grid_file).center
    return build_family(run.family).at(to_complex(run.parameter))


def comparison(run: RunConfig) -> Optional[RepPoint]:
    if run.compare_family is None and run.compare_parameter is None:
        return None
    family = build_family(run.compare_family if run.compare_family is not None else run.family)
    parameter = run.compare_parameter if run.compare_parameter is not None else run.parameter
    return family.at(to_complex(parameter))


def parameter_grid(run: RunConfig) -> ParamGrid:
    if run.grid_file is not None:
        return load_grid(run.grid_file)
    if run.grid is None:
        raise ConfigurationError("this command needs a parameter grid: set `grid` or `grid_file`")
    spec = run.grid
    return grid_builder(build_family(run.family), spec.center_value, spec.ds, spec.dt, spec.n)


def cmd_spectrum(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> List[str]:
    rep = representation(run)
    other = comparison(run)
    reps, names = ([rep], ["rho"]) if other is None else ([rep, other], ["rho", "eta"])
    table = spectrum_table(reps, run.functionals, run.max_len, lab, threads, rep_names=names)
    path = output_path(run, "spectrum.csv")
    export_csv(table, path)
    logger.info(f"Wrote {len(table)} classes to {path}")
    return [path]


def cmd_exponent(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> List[str]:
    rep = representation(run)
    results = {}
    table = None
    if run.exponent_method in ("growth", "both"):
        table = spectrum_table(rep, run.functionals, run.max_len, lab, threads)
    for index, name in enumerate(run.functionals):
        entry: Dict[str, Any] = {}
        if table is not None:
            entry["growth"] = entropy_growth(table, 0, index, lab).to_dict()
        if run.exponent_method in ("dirichlet", "both"):
            entry["dirichlet"] = exponent_dirichlet(rep, name, run.max_len, lab, threads).to_dict()
        if "growth" in entry and "dirichlet" in entry:
            entry["delta"] = abs(entry["growth"]["value"] - entry["dirichlet"]["value"])
        entry["value"] = entry["growth"]["value"] if "growth" in entry else entry["dirichlet"]["value"]
        results[name] = entry
    payload = {"command": "exponent", "results": results, "settings": settings_echo(run)}
    return [write_json(payload, output_path(run, "exponent.json"))]


def cmd_intersect(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> List[str]:
    rep = representation(run)
    other = comparison(run)
    if other is None:
        table = spectrum_table(rep, run.functionals, run.max_len, lab, threads, rep_names=["rho"])
        rep_g = 0
    else:
        table = spectrum_table([rep, other], run.functionals, run.max_len, lab, threads, rep_names=["rho", "eta"])
        rep_g = 1
    results = {}
    for index, name in enumerate(run.functionals):
        inter = intersection(table, 0, rep_g, index, lab)
        renormalized = renormalized_intersection(table, 0, rep_g, index, lab)
        results[name] = {
            "value": inter.value,
            "spread": inter.spread,
            "intersection": inter.to_dict(),
            "renormalized": renormalized.to_dict(),
        }
    payload = {"command": "intersect", "classes": len(table), "results": results, "settings": settings_echo(run)}
    return [write_json(payload, output_path(run, "intersect.json"))]


def cmd_pressure(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> List[str]:
    grid = parameter_grid(run)
    certificate = certify_center(grid, lab, threads)
    spectra = GridSpectrum(grid, run.functionals, run.max_len, lab, threads)
    results = {}
    for index, name in enumerate(run.functionals):
        results[name] = {
            "s": pressure_form(spectra, index, Axis.S, certify=False).to_dict(),
            "t": pressure_form(spectra, index, Axis.T, certify=False).to_dict(),
            "components_s": pressure_form_components(spectra, index, Axis.S, certify=False).to_dict(),
        }
    outputs = []
    if grid.conj_symmetric and grid.holomorphic:
        report = master_identity_check(spectra, 0)
        results[run.functionals[0]]["master_identity"] = report.to_dict()
        csv_path = output_path(run, "pressure_h.csv")
        export_report(report, output_path(run, "master_identity.json"), csv_path)
        outputs.extend([output_path(run, "master_identity.json"), csv_path])
    payload = {
        "command": "pressure",
        "certificate": certificate.to_dict(),
        "grid": grid.geometry.to_dict(),
        "results": results,
        "settings": settings_echo(run),
    }
    return [write_json(payload, output_path(run, "pressure.json"))] + outputs


def schottky_data(run: RunConfig, rep: RepPoint) -> SchottkyData:
    """Disk data straight from a disks family; otherwise the isometric circles of the generators."""
    family = build_family(run.family) if run.family is not None else None
    if isinstance(family, DiskSchottkyFamily):
        centers, radii = family.disks()
        return SchottkyData.from_disks(centers, radii, family.rotations)
    return SchottkyData.from_rep(rep)


def cmd_dimension(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> List[str]:
    """
    Bowen dimension of the Schottky limit set next to the a1 critical exponent and the box-counting
    slope of the sampled limit set. a1 is the hyperbolic displacement for PSL2, so all three agree.
    """
    rep = representation(run)
    table = spectrum_table(rep, ["a1"], run.max_len, lab, threads)
    exponent = entropy_growth(table, 0, 0, lab)
    box = box_dimension(sample_limit_set(rep, run.max_len, lab, threads))
    payload: Dict[str, Any] = {
        "command": "dimension",
        "exponent": exponent.to_dict(),
        "box": box.to_dict(),
        "delta": {"box_vs_exponent": abs(box.value - exponent.value)},
        "settings": settings_echo(run),
    }
    if rep.dim == 2:
        bowen = bowen_dimension(schottky_data(run, rep), m=run.bowen_cells, threads=threads)
        payload["bowen"] = bowen.to_dict()
        payload["delta"]["bowen_vs_exponent"] = abs(bowen.value - exponent.value)
        payload["delta"]["bowen_vs_box"] = abs(bowen.value - box.value)
        payload["value"] = bowen.value
    else:
        logger.info(f"Bowen dimension skipped: representation has dimension {rep.dim}")
        payload["bowen"] = None
        payload["value"] = exponent.value
    return [write_json(payload, output_path(run, "dimension.json"))]


def cmd_limitset(run: RunConfig, lab: LabConfig, threads: Optional[int]) -> List[str]:
    cloud = sample_limit_set(representation(run), run.max_len, lab, threads)
    csv_path = output_path(run, "limitset.csv")
    export_cloud_csv(cloud, csv_path)
    outputs = [csv_path]
    if run.ppm is not None:
        ppm_path = output_path(run, "limitset.ppm")
        export_ppm(cloud, ppm_path, *run.ppm)
        outputs.append(ppm_path)
    logger.info(f"Limit set: {len(cloud)} points, chart {cloud.chart}")
    return outputs

