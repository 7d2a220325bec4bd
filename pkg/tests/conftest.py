import shutil
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]
KB = REPO / "kb"


@pytest.fixture(scope="session")
def shipped_kb() -> Path:
    return KB


@pytest.fixture()
def kb_copy(tmp_path: Path) -> Path:
    """Writable copy of the shipped demo KB."""
    target = tmp_path / "kb"
    shutil.copytree(KB, target)
    audit = target / "audit.jsonl"
    if audit.exists():
        audit.unlink()
    return target


@pytest.fixture()
def store(kb_copy):
    from aida.store import KbStore

    return KbStore(kb_copy)


@pytest.fixture(scope="session")
def shipped_store():
    """Read-only store over the shipped KB; session-scoped for speed."""
    from aida.store import KbStore

    return KbStore(KB)


@pytest.fixture()
def client(store):
    from fastapi.testclient import TestClient

    from aida.service.app import create_app

    return TestClient(create_app(store))
