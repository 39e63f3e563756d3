import pytest
from hypothesis import HealthCheck, settings

from emviscosity.materials import gold_drude
from emviscosity.polarizability import rb_like

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def atom():
    return rb_like()


@pytest.fixture
def gold():
    return gold_drude()


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_checks(request):
    """Run each acceptance criterion at most once per session."""
    from emviscosity import acceptance
    cache = request.config.stash.setdefault(_ACCEPTANCE, {})

    def get(n):
        if n not in cache:
            cache[n] = acceptance.run([n])
        return cache[n]
    return get


def pytest_terminal_summary(terminalreporter, config):
    cache = config.stash.get(_ACCEPTANCE, {})
    if not cache:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(cache):
        checks = cache[n]
        tag = "PASS" if all(c.passed for c in checks) else "FAIL"
        tr.write_line(f"{tag} criterion {n}")
        for c in checks:
            tr.write_line("    " + c.line())
