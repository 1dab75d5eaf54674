from pathlib import Path

import pytest

from ctm import Attribute, cyclic_substrate

REPO_ROOT = Path(__file__).resolve().parent.parent
MODELS_DIR = REPO_ROOT / "models"


@pytest.fixture(scope="session")
def models_dir() -> Path:
    return MODELS_DIR


@pytest.fixture()
def counter16():
    """Bare 16-state increment substrate (no timer attributes)."""
    return cyclic_substrate("c16", tuple(range(16)))


def singleton(substrate, state, name=""):
    return Attribute(substrate, frozenset({state}), name=name or str(state))
