import json
from importlib import resources
from typing import Any, Dict, List

from anosov_lab.exceptions import ConfigurationError


def list_fixtures() -> List[str]:
    return sorted(entry.name[: -len(".json")] for entry in resources.files(__name__).iterdir() if entry.name.endswith(".json"))


def load_fixture(name: str) -> Dict[str, Any]:
    """Raw run-config keys of a bundled fixture."""
    resource = resources.files(__name__).joinpath(f"{name}.json")
    if not resource.is_file():
        raise ConfigurationError(f"Unknown fixture {name!r}; available: {', '.join(list_fixtures())}")
    return json.loads(resource.read_text())
