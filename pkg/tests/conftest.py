from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reasonweave.operators import PromptCatalog


@pytest.fixture(scope="session")
def catalog() -> PromptCatalog:
    return PromptCatalog.default()
