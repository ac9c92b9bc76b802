import pytest

from zfr.lfunc_model import catalog


@pytest.fixture(scope="session")
def cat():
    return catalog()


@pytest.fixture(autouse=True)
def _cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("ZFR_CACHE_DIR", str(tmp_path / "cache"))
