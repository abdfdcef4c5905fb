import pytest

from src.core.config import Settings


@pytest.fixture
def lab_settings(tmp_path):
    return Settings(output_dir=tmp_path / "out", bootstrap_samples=20, jump_point_limit=2 ** 10)
