import numpy as np
import pytest

from rrdh.corpus import GrayImage, bundled_corpus, synth_image


@pytest.fixture(scope="session")
def corpus():
    return bundled_corpus()


@pytest.fixture(scope="session")
def texture():
    return synth_image("texture", 64, 3)


@pytest.fixture(scope="session")
def gradient():
    return synth_image("smooth-gradient", 64, 1)


def smooth_random(size, seed, lo=40, hi=215, step=2):
    """Random image whose neighbours differ by small amounts (plenty of capacity)."""
    rng = np.random.default_rng(seed)
    walk = np.cumsum(rng.integers(-step, step + 1, size=(size, size)), axis=1)
    walk += np.cumsum(rng.integers(-1, 2, size=(size, 1)), axis=0)
    base = rng.integers(lo + 30, hi - 30)
    return GrayImage(np.clip(base + walk, lo, hi))


# --------------------------------------------------------------------------
# one summary line per acceptance criterion

_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion implemented by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not (rep.when == "setup" and rep.outcome != "passed")):
        return
    number, title = mark.args
    status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
    entry = _CRITERIA.setdefault(number, [title, []])
    entry[1].append(status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, statuses = _CRITERIA[number]
        if "FAIL" in statuses:
            status = "FAIL"
        elif all(s == "SKIP" for s in statuses):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")
