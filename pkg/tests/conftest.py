import pytest

from sampvar.process import GaussianStationary, IIDProcess, markov_to_finite_joint

MARKOV_STATES = [0.0, 1.0]
MARKOV_TRANSITION = [[0.9, 0.1], [0.2, 0.8]]


def markov_chain(n: int):
    return markov_to_finite_joint(MARKOV_STATES, MARKOV_TRANSITION, "stationary", n)


def three_point():
    return IIDProcess.discrete([-1.0, 0.0, 2.0], [0.5, 0.3, 0.2])


def ar1(phi: float = 0.5):
    """Gaussian AR(1) with unit stationary variance."""
    return GaussianStationary.ar1(phi, (1 - phi * phi) ** 0.5)


# (label, factory(n))
TEST_PROCESSES = [
    ("iid-normal", lambda n: IIDProcess.normal(1.0)),
    ("iid-normal-shifted", lambda n: IIDProcess.normal(0.7, mean=1.3)),
    ("rademacher", lambda n: IIDProcess.rademacher()),
    ("three-point", lambda n: three_point()),
    ("markov", markov_chain),
    ("ar1", lambda n: ar1(0.5)),
    ("ar1-negative", lambda n: ar1(-0.3)),
    ("constant", lambda n: IIDProcess.constant(2.5)),
]


@pytest.fixture(params=TEST_PROCESSES, ids=[p[0] for p in TEST_PROCESSES])
def process_factory(request):
    return request.param[1]


# ---------------------------------------------------------------------------
# one summary line per acceptance criterion
# ---------------------------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion implemented by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        _, prev, details = _CRITERIA.get(number, (title, "PASS", []))
        status = "FAIL" if failed or prev == "FAIL" else ("SKIP" if report.skipped else "PASS")
        details += [str(v) for k, v in report.user_properties if k == "detail" and str(v) not in details]
        _CRITERIA[number] = (title, status, details)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, details = _CRITERIA[number]
        suffix = f" | {'; '.join(details)}" if details else ""
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title}{suffix}")
