import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture(scope="session", autouse=True)
def isolated_cache(tmp_path_factory):
    # one graph cache per test session, shared by every test that opts in
    path = tmp_path_factory.mktemp("spinelab-cache")
    old = os.environ.get("SPINELAB_CACHE")
    os.environ["SPINELAB_CACHE"] = str(path)
    yield path
    if old is None:
        os.environ.pop("SPINELAB_CACHE", None)
    else:
        os.environ["SPINELAB_CACHE"] = old


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            for name, value in getattr(rep, "user_properties", []):
                if name == "acceptance":
                    lines.append(value)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
