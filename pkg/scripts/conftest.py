import os

import pytest


def pytest_collection_modifyitems(config, items):
    if os.getenv("SYMMETRA_LONG") == "1":
        return
    skip = pytest.mark.skip(reason="long-running; set SYMMETRA_LONG=1")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)
