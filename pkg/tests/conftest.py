import os

import hypothesis
import pytest
from mpmath import mp

from crankscope import exact_core
from crankscope.config import RunConfig, set_config

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=400, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    # reuse a cache across runs when asked to; the n=1000 expansion is the slow part
    d = os.environ.get("CRANKSCOPE_TEST_CACHE")
    return d if d else str(tmp_path_factory.mktemp("crank-cache"))


@pytest.fixture(scope="session")
def series_cache(cache_dir):
    return exact_core.SeriesCache(cache_dir, limit=1000)


@pytest.fixture(autouse=True)
def _config(cache_dir):
    set_config(RunConfig(cache_dir=cache_dir))
    exact_core.reset_default_cache()
    prec = mp.prec
    mp.prec = 256
    yield
    mp.prec = prec
    set_config(None)
    exact_core.reset_default_cache()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("tests.test_acceptance")
    lines = mod.summary_lines() if mod is not None else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
