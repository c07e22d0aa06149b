from typing import Tuple

from pydantic import Field, field_validator

from anosov_lab.configs.families.base import BaseFamilyConfig


class SchottkyConfig(BaseFamilyConfig):
    lengths: Tuple[float, float] = Field((3.0, 3.0), description="Translation lengths of a and b")
    axis_ratio: float = Field(
        0.3,
        gt=0.0,
        lt=1.0,
        description="u in (0, 1): a has axis from -1/u to -u, b has axis from 1/u to u",
    )

    @field_validator("lengths")
    @classmethod
    def validate_lengths(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if any(length <= 0 for length in value):
            raise ValueError("Translation lengths must be positive")
        return value
