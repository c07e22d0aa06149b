import os

from anosov_lab.configs.base import lab_dir


def ensure_lab_dir() -> str:
    os.makedirs(lab_dir, exist_ok=True)
    return lab_dir
