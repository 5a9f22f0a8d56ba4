import random

import pytest

from motifspam.canon import Color
from motifspam.motif import ColoredGraph

_ACCEPTANCE: list[tuple[str, bool, str]] = []


class AcceptanceLog:
    def record(self, name: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((name, bool(passed), detail))


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


def random_colored_graph(rng: random.Random, n: int, p: float | None = None,
                         forbid_vv: bool = True) -> ColoredGraph:
    colors = tuple(rng.randint(0, 1) for _ in range(n))
    p = rng.random() if p is None else p
    edges = frozenset(
        (i, j) for j in range(n) for i in range(j)
        if rng.random() < p and not (forbid_vv and colors[i] == colors[j] == Color.VIDEO)
    )
    return ColoredGraph(colors, edges)


def random_connected_graph(rng: random.Random, n: int, forbid_vv: bool = True) -> ColoredGraph:
    while True:
        g = random_colored_graph(rng, n, forbid_vv=forbid_vv)
        if g.is_connected():
            return g
