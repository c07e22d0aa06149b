from typing import Dict, Optional

from pydantic import BaseModel, Field, model_validator


class FamilyConfig(BaseModel):
    provider: str = Field(
        description="Provider of the representation family (e.g., 'matrices', 'disks', 'bending')",
        default="matrices",
    )
    config: Optional[Dict] = Field(description="Configuration for the specific family", default=None)

    _provider_configs: Dict[str, str] = {
        "matrices": "MatricesConfig",
        "schottky": "SchottkyConfig",
        "disks": "DisksConfig",
        "bending": "BendingConfig",
        "lift": "LiftConfig",
    }

    @model_validator(mode="after")
    def validate_and_create_config(self) -> "FamilyConfig":
        provider = self.provider
        config = self.config

        if provider not in self._provider_configs:
            raise ValueError(f"Unsupported family provider: {provider}")

        module = __import__(
            f"anosov_lab.configs.families.{provider}",
            fromlist=[self._provider_configs[provider]],
        )
        config_class = getattr(module, self._provider_configs[provider])

        if config is None:
            config = {}

        if not isinstance(config, dict):
            if not isinstance(config, config_class):
                raise ValueError(f"Invalid config type for provider {provider}")
            return self

        self.config = config_class(**config)
        return self
