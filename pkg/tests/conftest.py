import pytest

from pisotcm import make_cm_field, make_field, parse_polynomial


@pytest.fixture(scope="session")
def golden():
    """K = Q(theta), theta^2 = theta + 1."""
    return make_field(parse_polynomial("x^2 - x - 1"))


@pytest.fixture(scope="session")
def sqrt2():
    return make_field(parse_polynomial("x^2 - 2"))


@pytest.fixture(scope="session")
def zeta5(golden):
    """E = Q(zeta_5) as K(sqrt(-theta - 2))."""
    return make_cm_field(golden, golden.element([-2, -1]))


@pytest.fixture(scope="session")
def gauss_sqrt2(sqrt2):
    """E = Q(sqrt 2, i)."""
    return make_cm_field(sqrt2, sqrt2.element([-1]))


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion; failures re-raise."""
    results = request.config.stash.setdefault(_ACCEPTANCE, {})

    class Recorder:
        def __init__(self):
            self.number = None
            self.detail = ""

        def __call__(self, number, title):
            self.number, self.title = number, title
            return self

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            ok = exc_type is None
            text = self.detail if ok else f"{exc_type.__name__}: {exc}".splitlines()[0]
            line = f"criterion {self.number} {'PASS' if ok else 'FAIL'}  {self.title}  {text}".rstrip()
            results[self.number] = line
            print(line)
            return False

    return Recorder()


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
