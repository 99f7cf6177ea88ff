import pytest

from hyperclique.combinatorics import stream_for
from hyperclique.model import plant_clique, sample_null


@pytest.fixture
def null_graph():
    def make(n, d, trial=0, seed=0):
        return sample_null(n, d, stream_for(seed, "test/null-gen", trial))

    return make


@pytest.fixture
def planted():
    def make(n, d, kappa, trial=0, seed=0):
        g = sample_null(n, d, stream_for(seed, "test/null-gen", trial))
        return g, plant_clique(g, kappa, stream_for(seed, "test/plant", trial))

    return make


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
