from typing import Any, Dict, Literal

from pydantic import Field, field_validator

from anosov_lab.configs.families.base import BaseFamilyConfig


class LiftConfig(BaseFamilyConfig):
    base: Dict[str, Any] = Field(..., description="Family config ({provider, config}) of the lifted family")
    kind: Literal["sym", "wedge"] = Field("sym", description="Symmetric power or exterior power")
    degree: int = Field(3, ge=1, description="Target dimension d for sym, exterior degree k for wedge")

    @field_validator("base")
    @classmethod
    def validate_base(cls, value: Dict[str, Any]) -> Dict[str, Any]:
        if "provider" not in value:
            raise ValueError("The lifted base needs a provider")
        return value
