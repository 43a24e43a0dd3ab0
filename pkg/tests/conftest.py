import pytest
from unittest.mock import MagicMock
from dotenv import load_dotenv

from lawbench.groups import FreeBackend, SymBackend, dihedral_backend
from lawbench.wreath import WreathBackend
from lawbench.grigorchuk import GrigorchukBackend
from lawbench.words import parse_word

# Load environment variables for testing
load_dotenv()

@pytest.fixture(autouse=True)
def mock_env_vars(monkeypatch, tmp_path):
    """Pin environment variables for testing"""
    monkeypatch.setenv("LAWBENCH_THREADS", "2")
    monkeypatch.setenv("LAWBENCH_MEMORY_MB", "4096")
    monkeypatch.setenv("LAWBENCH_REPORT_DIR", str(tmp_path / "reports"))
    monkeypatch.setenv("LAWBENCH_LOG_DIR", str(tmp_path / "logs"))

@pytest.fixture
def free2():
    return FreeBackend(2)

@pytest.fixture
def sym3():
    return SymBackend(3)

@pytest.fixture
def wreath1():
    return WreathBackend(1)

@pytest.fixture
def wreath2():
    return WreathBackend(2)

@pytest.fixture
def d4():
    return dihedral_backend(4)

@pytest.fixture
def grig():
    return GrigorchukBackend()

@pytest.fixture
def word():
    """Parse a word in F_2 (or a given rank)"""
    def _parse(text, rank=2):
        return parse_word(text, rank)
    return _parse

@pytest.fixture
def report_dir(tmp_path):
    directory = tmp_path / "reports"
    directory.mkdir()
    return directory

@pytest.fixture
def mock_logger(monkeypatch):
    """Mock logger to capture error logging"""
    mock_log = MagicMock()
    for level in ["debug", "info", "warning", "error", "critical"]:
        setattr(mock_log, level, MagicMock())
    monkeypatch.setattr("lawbench.error_handler.logger", mock_log)
    return mock_log
