import os

import pytest

from ahpairs import synthetic, zero_store

# height comfortably past the 2*10^4-th zero plus the widest window used
ZERO_HEIGHT = 18100.0
FIT_SEED = 1

_ACCEPTANCE: list[str] = []


def record(line: str) -> None:
    """Collect a one-line acceptance verdict for the terminal summary."""
    _ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def cache_root(tmp_path_factory):
    path = tmp_path_factory.mktemp("zero-cache")
    os.environ[zero_store.CACHE_ENV] = str(path)
    return path


@pytest.fixture(scope="session")
def zeros20k(cache_root):
    zs = zero_store.computed_zeros(ZERO_HEIGHT, cache=cache_root)
    assert len(zs) >= 20000
    return zs


@pytest.fixture(scope="session")
def fitted_gaps():
    return synthetic.fit_gap_distribution(synthetic.ah_targets(8), 4)


@pytest.fixture(scope="session")
def ah_sample(fitted_gaps):
    spec = synthetic.SyntheticSpec(100_000, fitted_gaps, jitter=0.0, seed=FIT_SEED)
    return synthetic.generate_ah_process(spec)
