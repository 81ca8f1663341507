import pytest

from bidgame import AdvantageTie, RandomTie, Reachability, make_game, serialize_game
from bidgame.fixtures import fig1_game

_ACCEPTANCE_LINES = []


def record_acceptance(line: str):
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def coin_game(total_budget=0):
    """v -> {t, d}; reaching t wins for Player 1."""
    return make_game(["v", "t", "d"], [("v", "t"), ("v", "d"), ("t", "t"), ("d", "d")], total_budget,
                     Reachability(("t",)), RandomTie())


@pytest.fixture
def write_game(tmp_path):
    def write(spec, name="game.json"):
        p = tmp_path / name
        p.write_bytes(serialize_game(spec))
        return str(p)
    return write


@pytest.fixture
def fig1_file(write_game):
    return write_game(fig1_game(), "fig1.json")


@pytest.fixture
def advantage_game():
    # from v Player 1 heads for t, Player 2 for d; d leads back to v
    return make_game(["v", "t", "d"], [("v", "t"), ("v", "d"), ("t", "t"), ("d", "d"), ("d", "v")], 2,
                     Reachability(("t",)), AdvantageTie(1))
