import numpy as np
import pytest

from qsdentropy import from_arrays, random_chain

RANDOM_SUITE_SEED = 20240611
RANDOM_SUITE_SIZE = 100


def instance_a():
    return from_arrays([[0.0, 0.5], [0.5, 0.0]], [0.5, 0.5])


def instance_b():
    return from_arrays([[0.5]], [0.5])


def instance_c():
    return from_arrays([[0.5]], [[0.3, 0.2]], absorbing=("a", "b"))


INSTANCES = {"A": instance_a, "B": instance_b, "C": instance_c}


def random_suite(count=RANDOM_SUITE_SIZE, seed=RANDOM_SUITE_SEED):
    """Seeded random chains with |I| <= 20 and |E| <= 4."""
    ss = np.random.SeedSequence(seed)
    chains = []
    for child in ss.spawn(count):
        rng = np.random.default_rng(child)
        n = int(rng.integers(1, 21))
        k = int(rng.integers(1, 5))
        chains.append(random_chain(rng, n, k))
    return chains


@pytest.fixture(params=sorted(INSTANCES))
def instance(request):
    return INSTANCES[request.param]()


@pytest.fixture(scope="session")
def suite():
    return random_suite()


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one verdict line per acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
