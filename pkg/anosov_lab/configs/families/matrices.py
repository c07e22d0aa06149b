from typing import List

from pydantic import Field, field_validator

from anosov_lab.configs.families.base import BaseFamilyConfig, RawMatrix, to_complex_matrix


class MatricesConfig(BaseFamilyConfig):
    generators: List[RawMatrix] = Field(..., description="Generator images, row-major, entries real or [re, im]")

    @field_validator("generators")
    @classmethod
    def validate_generators(cls, value: List[RawMatrix]) -> List[RawMatrix]:
        if not value:
            raise ValueError("At least one generator is required")
        shapes = {to_complex_matrix(g).shape for g in value}
        if len(shapes) != 1:
            raise ValueError(f"Generators have inconsistent shapes: {sorted(shapes)}")
        return value
