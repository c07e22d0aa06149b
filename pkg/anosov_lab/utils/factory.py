import importlib
from typing import Any, Dict, Union

from anosov_lab.families.configs import FamilyConfig


def load_class(class_type):
    module_path, class_name = class_type.rsplit(".", 1)
    module = importlib.import_module(module_path)
    return getattr(module, class_name)


class FamilyFactory:
    provider_to_class = {
        "matrices": "anosov_lab.families.matrices.ConstantFamily",
        "schottky": "anosov_lab.families.schottky.RealSchottkyFamily",
        "disks": "anosov_lab.families.disks.DiskSchottkyFamily",
        "bending": "anosov_lab.families.bending.BendingFamily",
        "lift": "anosov_lab.families.lift.LiftFamily",
    }

    @classmethod
    def create(cls, provider_name, config):
        class_type = cls.provider_to_class.get(provider_name)
        if class_type:
            if isinstance(config, dict) or config is None:
                config = FamilyConfig(provider=provider_name, config=config).config
            family_class = load_class(class_type)
            return family_class(config)
        else:
            raise ValueError(f"Unsupported family provider: {provider_name}")

    @classmethod
    def from_config(cls, family_config: FamilyConfig):
        return cls.create(family_config.provider, family_config.config)

    @classmethod
    def from_dict(cls, raw: Union[Dict[str, Any], FamilyConfig]):
        family_config = raw if isinstance(raw, FamilyConfig) else FamilyConfig(**raw)
        return cls.from_config(family_config)
