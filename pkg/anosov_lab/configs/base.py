import os
from typing import Optional, Tuple

from pydantic import BaseModel, Field, field_validator

# Set up the directory path
home_dir = os.path.expanduser("~")
lab_dir = os.environ.get("ANOSOV_LAB_DIR") or os.path.join(home_dir, ".anosov_lab")


class LinalgConfig(BaseModel):
    condition_threshold: float = Field(
        description="Largest condition number accepted by cartan/jordan on explicit matrices",
        default=1e12,
    )
    proximal_gap: float = Field(
        description="Minimum gap log|mu_1| - log|mu_2| for an element to count as proximal",
        default=1e-8,
    )
    renormalize_every: int = Field(
        description="Number of products between renormalizations of long word products",
        default=8,
        ge=1,
    )
    spectrum_residual: float = Field(
        description="Largest accepted |sum of uncentered log-moduli - log|det|| relative to the spectrum size",
        default=1e-8,
    )


class EnumerationConfig(BaseModel):
    budget: int = Field(
        description="Maximum number of reduced words enumerated by a single call (rank 2 up to L = 18 fits)",
        default=1_000_000_000,
        ge=1,
    )
    primitive_only: bool = Field(description="Restrict conjugacy classes to primitive ones", default=True)
    max_skip_ratio: float = Field(
        description="Largest tolerated fraction of non-proximal classes in a period table",
        default=1e-3,
    )


class WindowConfig(BaseModel):
    fractions: Tuple[float, ...] = Field(
        description="Nested fit windows: with n classes below the cut-off, window q keeps the classes of rank >= ceil(n^q)",
        default=(1 / 2, 2 / 3, 3 / 4),
    )
    extrapolate: bool = Field(description="Extrapolate window estimates linearly in 1/T", default=True)
    bins: int = Field(description="Number of period shells used by pressure fits", default=24, ge=4)
    orbit_correction: bool = Field(
        description="Add log T to counting functions (N(T) ~ e^{hT}/(hT)) and fit pressures on shell averages",
        default=True,
    )
    min_classes: int = Field(description="Minimum number of classes below the cut-off", default=500, ge=2)

    @field_validator("fractions")
    @classmethod
    def validate_fractions(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(value) < 1:
            raise ValueError("At least one window fraction is required")
        if any(not 0 < f < 1 for f in value):
            raise ValueError("Window fractions must lie in (0, 1)")
        if list(value) != sorted(value):
            raise ValueError("Window fractions must be increasing")
        return tuple(value)


class AnosovConfig(BaseModel):
    mu_min: float = Field(description="Minimal accepted slope of the root growth", default=0.05)
    tolerance: float = Field(description="Slack on the affine lower bound", default=1e-9)
    certify_max_len: int = Field(
        description="Word length used when a computation asks for a certified center",
        default=8,
        ge=2,
    )


class CalculusConfig(BaseModel):
    floor: float = Field(description="Absolute floor of relative residuals", default=1e-6)
    variance_step: float = Field(description="Step of the pressure second difference", default=1e-2, gt=0)
    trust_fraction: float = Field(
        description="Flag grids where |h_s| * ds exceeds this fraction of h",
        default=0.1,
    )


class LabConfig(BaseModel):
    linalg: LinalgConfig = Field(description="Linear algebra settings", default_factory=LinalgConfig)
    enumeration: EnumerationConfig = Field(description="Word enumeration settings", default_factory=EnumerationConfig)
    windows: WindowConfig = Field(description="Orbit-sum window settings", default_factory=WindowConfig)
    anosov: AnosovConfig = Field(description="Anosov certificate settings", default_factory=AnosovConfig)
    calculus: CalculusConfig = Field(description="Finite-difference settings", default_factory=CalculusConfig)
    seed: int = Field(description="Seed for sampled certificates", default=0)
    threads: Optional[int] = Field(
        description="Worker threads; falls back to ANOSOV_LAB_THREADS, then 1",
        default=None,
        ge=1,
    )
    history_db_path: str = Field(
        description="Path to the run history database",
        default=os.path.join(lab_dir, "history.db"),
    )


DEFAULT_CONFIG = LabConfig()


def resolve(config: Optional[LabConfig]) -> LabConfig:
    return DEFAULT_CONFIG if config is None else config
