# SPDX-License-Identifier: Apache-2.0
import os
import shutil
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("COUPLED_RIS_CLI") or shutil.which("coupled-ris")
    if not path:
        pytest.skip("coupled-ris executable not available")
    return path


@pytest.fixture(scope="session")
def configs():
    return Path(os.environ.get("COUPLED_RIS_CONFIGS", Path(__file__).resolve().parents[2] / "configs"))
