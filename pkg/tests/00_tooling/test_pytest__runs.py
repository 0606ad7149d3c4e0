# tests/00_tooling/test_pytest__runs.py
"""Smoke test for the pytest setup itself; touches no application code.

Run just this test when collection fails:
    poetry run pytest tests/00_tooling/test_pytest__runs.py
"""


def test_pytest_runs() -> None:
    assert True
