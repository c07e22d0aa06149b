from typing import Any, Dict, List, Sequence, Union

import numpy as np
from pydantic import BaseModel, model_validator

# A matrix entry is a real number or a [re, im] pair.
Entry = Union[float, List[float]]
RawMatrix = List[List[Entry]]


def to_complex_matrix(raw: Sequence[Sequence[Entry]]) -> np.ndarray:
    rows = []
    for row in raw:
        values = []
        for entry in row:
            if isinstance(entry, (list, tuple)):
                if len(entry) != 2:
                    raise ValueError(f"Complex entries must be [re, im] pairs, got {entry}")
                values.append(complex(float(entry[0]), float(entry[1])))
            else:
                values.append(complex(float(entry)))
        rows.append(values)
    matrix = np.array(rows, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {matrix.shape}")
    return matrix


def to_complex(raw: Entry) -> complex:
    if isinstance(raw, (list, tuple)):
        return complex(float(raw[0]), float(raw[1]))
    return complex(float(raw))


class BaseFamilyConfig(BaseModel):
    """Shared validation for family provider configs."""

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
