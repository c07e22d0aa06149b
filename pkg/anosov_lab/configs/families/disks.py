import math
from typing import List, Optional

from pydantic import Field, model_validator

from anosov_lab.configs.families.base import BaseFamilyConfig, Entry


class DisksConfig(BaseFamilyConfig):
    centers: List[Entry] = Field(
        ..., description="Disk centers in code order D_a, D_A, D_b, D_B, ...; real or [re, im]"
    )
    radii: List[float] = Field(..., description="Disk radii in the same order")
    rotations: Optional[List[float]] = Field(
        None,
        description="Angle theta_i of each pairing g_i(z) = c_i + e^{i theta} r_i r_i' / (z - c_i'); default pi",
    )

    @model_validator(mode="after")
    def validate_shapes(self) -> "DisksConfig":
        if len(self.centers) % 2 or not self.centers:
            raise ValueError("Disks come in pairs: an even, non-zero number of centers is required")
        if len(self.radii) != len(self.centers):
            raise ValueError("One radius per disk is required")
        if any(r <= 0 for r in self.radii):
            raise ValueError("Disk radii must be positive")
        if self.rotations is None:
            self.rotations = [math.pi] * (len(self.centers) // 2)
        if len(self.rotations) != len(self.centers) // 2:
            raise ValueError("One rotation angle per generator is required")
        return self
