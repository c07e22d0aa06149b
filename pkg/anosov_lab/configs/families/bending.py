from typing import Any, Dict, Optional

from pydantic import Field, field_validator

from anosov_lab.configs.families.base import BaseFamilyConfig, RawMatrix


class BendingConfig(BaseFamilyConfig):
    base: Dict[str, Any] = Field(..., description="Family config ({provider, config}) of the PSL2 base representation")
    generator: int = Field(2, ge=1, description="Generator conjugated by exp(zX)")
    axis_generator: int = Field(1, ge=1, description="Generator whose axis defines X when `axis` is not given")
    axis: Optional[RawMatrix] = Field(None, description="Explicit traceless 2x2 matrix X")

    @field_validator("base")
    @classmethod
    def validate_base(cls, value: Dict[str, Any]) -> Dict[str, Any]:
        if "provider" not in value:
            raise ValueError("The bending base needs a provider")
        return value
