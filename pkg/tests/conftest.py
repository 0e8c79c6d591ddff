import shutil
import time
from collections import OrderedDict
from pathlib import Path

import pytest

from toxtraj import cli

GOLDEN = Path(__file__).parent / "fixtures" / "golden"
GOLDEN_INPUTS = ("corpus.jsonl", "golden.conf", "kg.txt", "llm_fixtures.json", "search.json",
                 "templates.txt", "terms.tsv")

_criteria: "OrderedDict[str, list]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion this test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _criteria.setdefault(mark.args[0], [])


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        _criteria[mark.args[0]].append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in _criteria.items():
        if not results:
            status = "SKIP"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")


def copy_golden_inputs(dest: Path) -> Path:
    dest.mkdir(parents=True, exist_ok=True)
    for name in GOLDEN_INPUTS:
        shutil.copy(GOLDEN / name, dest / name)
    return dest / "golden.conf"


def run_golden(dest: Path) -> tuple[Path, float]:
    """Run every stage on a fresh copy of the golden inputs; returns (work dir, seconds)."""
    conf = copy_golden_inputs(dest)
    t0 = time.perf_counter()
    for verb in ("ingest", "extract", "check", "export"):
        code = cli.run([verb, "--config", str(conf)])
        assert code == 0, f"{verb} exited with {code}"
    return dest / "run", time.perf_counter() - t0


@pytest.fixture(scope="session")
def golden_run(tmp_path_factory):
    return run_golden(tmp_path_factory.mktemp("golden_a"))


@pytest.fixture(scope="session")
def golden_run_again(tmp_path_factory):
    return run_golden(tmp_path_factory.mktemp("golden_b"))
