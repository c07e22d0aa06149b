from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from anosov_lab.configs.base import AnosovConfig, CalculusConfig, EnumerationConfig, LabConfig, LinalgConfig, WindowConfig
from anosov_lab.configs.families.base import Entry, to_complex

COMMANDS = ("spectrum", "exponent", "intersect", "pressure", "dimension", "verify", "limitset")
SUITES = ("linalg", "identities", "certificates", "oracles")

# tolerance override key -> (LabConfig section, field)
TOLERANCE_KEYS = {
    "condition_threshold": ("linalg", "condition_threshold"),
    "proximal_gap": ("linalg", "proximal_gap"),
    "budget": ("enumeration", "budget"),
    "max_skip_ratio": ("enumeration", "max_skip_ratio"),
    "spectrum_residual": ("linalg", "spectrum_residual"),
    "mu_min": ("anosov", "mu_min"),
    "anosov_tolerance": ("anosov", "tolerance"),
    "floor": ("calculus", "floor"),
    "variance_step": ("calculus", "variance_step"),
    "trust_fraction": ("calculus", "trust_fraction"),
}


class GridSpec(BaseModel):
    center: Entry = Field(0.0, description="Grid center z0, real or [re, im]")
    ds: float = Field(0.05, gt=0.0, description="Spacing along Re z")
    dt: float = Field(0.05, gt=0.0, description="Spacing along Im z")
    n: int = Field(2, ge=1, le=4, description="Half-width: the grid has (2n+1) x (2n+1) nodes")

    @property
    def center_value(self) -> complex:
        return to_complex(self.center)


class RunConfig(BaseModel):
    command: Optional[Literal["spectrum", "exponent", "intersect", "pressure", "dimension", "verify", "limitset"]] = Field(
        None, description="Command to run; the CLI argument takes precedence"
    )
    fixture: Optional[str] = Field(None, description="Name of a bundled fixture whose keys seed this config")
    family: Optional[Dict[str, Any]] = Field(None, description="Family config ({provider, config})")
    compare_family: Optional[Dict[str, Any]] = Field(
        None, description="Second family for intersections; defaults to the first family itself"
    )
    parameter: Entry = Field(0.0, description="Parameter z at which single-representation commands evaluate the family")
    compare_parameter: Optional[Entry] = Field(None, description="Parameter of the comparison representation")
    grid_file: Optional[str] = Field(None, description="Path of a parameter grid JSON file")
    grid: Optional[GridSpec] = Field(None, description="Grid built from the family around a center")
    max_len: int = Field(10, ge=1, le=30, description="Maximal core length L")
    functionals: List[str] = Field(["a1"], description="Weight functionals, e.g. a1, omega1, 2*a1")
    exponent_method: Literal["growth", "dirichlet", "both"] = Field("both", description="Exponent estimator")
    windows: WindowConfig = Field(default_factory=WindowConfig, description="Window parameters")
    tolerances: Dict[str, float] = Field(default_factory=dict, description="Tolerance overrides by name")
    threads: Optional[int] = Field(None, ge=1, description="Worker threads")
    out_dir: str = Field(".", description="Directory for output files")
    suite: Optional[Literal["linalg", "identities", "certificates", "oracles"]] = Field(
        None, description="Verification suite for the verify command"
    )
    ppm: Optional[Tuple[int, int]] = Field(None, description="Width and height of the optional limit-set raster")
    sample_size: int = Field(32, ge=1, description="Sampled triples or classes for sampled checks")
    bowen_cells: int = Field(243, ge=1, description="Minimal number of transfer cells per disk")
    seed: int = Field(0, description="Seed for sampled checks")

    @model_validator(mode="before")
    @classmethod
    def validate_extra_fields(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        if not isinstance(values, dict):
            return values
        allowed_fields = set(cls.model_fields.keys())
        input_fields = set(values.keys())
        extra_fields = input_fields - allowed_fields
        if extra_fields:
            raise ValueError(
                f"Extra fields not allowed: {', '.join(sorted(extra_fields))}. "
                f"Please input only the following fields: {', '.join(sorted(allowed_fields))}"
            )
        return values

    @field_validator("tolerances")
    @classmethod
    def validate_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        unknown = set(value) - set(TOLERANCE_KEYS)
        if unknown:
            raise ValueError(f"Unknown tolerance overrides: {', '.join(sorted(unknown))}")
        return value

    @field_validator("functionals")
    @classmethod
    def validate_functionals(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("At least one functional is required")
        return value

    @field_validator("ppm")
    @classmethod
    def validate_ppm(cls, value: Optional[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
        if value is not None and (value[0] < 1 or value[1] < 1 or value[0] > 8192 or value[1] > 8192):
            raise ValueError("Raster dimensions must lie in 1..8192")
        return value

    def lab_config(self) -> LabConfig:
        sections = {
            "linalg": LinalgConfig().model_dump(),
            "enumeration": EnumerationConfig().model_dump(),
            "anosov": AnosovConfig().model_dump(),
            "calculus": CalculusConfig().model_dump(),
        }
        for key, value in self.tolerances.items():
            section, name = TOLERANCE_KEYS[key]
            sections[section][name] = value
        return LabConfig(
            linalg=LinalgConfig(**sections["linalg"]),
            enumeration=EnumerationConfig(**sections["enumeration"]),
            windows=self.windows,
            anosov=AnosovConfig(**sections["anosov"]),
            calculus=CalculusConfig(**sections["calculus"]),
            seed=self.seed,
            threads=self.threads,
        )
