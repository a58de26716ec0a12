import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from momenta.graph import CommutationGraph  # noqa: E402

RIM = [(i, i % 5 + 1) for i in range(1, 6)]
# hub-and-rim graphs keyed by spoke count
HUB = {
    "s0": RIM,
    "s3": RIM + [(0, 3), (0, 4), (0, 5)],
    "s4": RIM + [(0, 1), (0, 2), (0, 3), (0, 5)],
    "s5": RIM + [(0, i) for i in range(1, 6)],
}
HUB_ALPHA = {"s0": 3, "s3": 2, "s4": 2, "s5": 2}
HUB_THETA1 = {"s0": 3.2361, "s3": 2.2361, "s4": 2.2361, "s5": 2.2361}
HUB_THETA2 = {"s0": 3.0, "s3": 2.0, "s4": 2.0, "s5": 2.0}

# two-qubit displacement strings XX, XY, IX, YZ, YX whose commutation graph is C5
PENTAGON = [[(1, 0), (1, 0)], [(1, 0), (1, 1)], [(0, 0), (1, 0)],
            [(1, 1), (0, 1)], [(1, 1), (1, 0)]]


def cycle(n, name=None):
    return CommutationGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)],
                                       name=name or f"C{n}")


def complete(n):
    return CommutationGraph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)],
                                       name=f"K{n}")


def edgeless(n):
    return CommutationGraph.from_edges(n, [], name=f"E{n}")


def hub(key):
    return CommutationGraph.from_edges(6, HUB[key], name=key)


def qutrit_pair():
    return CommutationGraph.from_weights(2, 3, {(0, 1): 1}, name="qutrit")


@pytest.fixture
def c5():
    return cycle(5)


@pytest.fixture
def k3():
    return complete(3)


@pytest.fixture
def qutrit():
    return qutrit_pair()


DATA = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
