"""Pytest configuration для integration тестов."""

import pytest


def pytest_collection_modifyitems(items: list[pytest.Item]) -> None:
    """Тесты из integration/ получают маркеры integration и slow."""
    for item in items:
        if "/integration/" in str(item.fspath):
            item.add_marker(pytest.mark.integration)
            item.add_marker(pytest.mark.slow)
