import random

import pytest

from scrabble_lab.board import Board
from scrabble_lab.config import GameConfig, TileDistribution, TileInfo, default_config
from scrabble_lab.game import GameState, canonical_rack


@pytest.fixture(scope="session")
def config():
    return default_config()


def scaled_config(fraction: float) -> GameConfig:
    """The standard set with tile counts scaled down (min one per letter);
    keeps full rules while shortening games for heavy acceptance runs."""
    base = default_config()
    tiles = {}
    for tile, info in base.distribution.tiles.items():
        count = max(1, round(info.count * fraction)) if info.count else 0
        tiles[tile] = TileInfo(count=count, value=info.value)
    return GameConfig(distribution=TileDistribution(tiles=tiles), layout=base.layout)


def make_state(
    config: GameConfig,
    board_rows=None,
    rack: str = "",
    other_rack: str = "",
    bag: str = "",
    turn: int = 0,
    scores=(0, 0),
    seed: int = 0,
) -> GameState:
    """Hand-built game state for targeted rule tests."""
    board = Board.from_rows(board_rows) if board_rows is not None else Board.empty()
    racks = [canonical_rack(rack), canonical_rack(other_rack)]
    if turn == 1:
        racks = [canonical_rack(other_rack), canonical_rack(rack)]
    return GameState(
        config=config,
        board=board,
        racks=tuple(racks),
        scores=tuple(scores),
        bag=tuple(bag),
        rng_state=random.Random(seed).getstate(),
        turn=turn,
    )


def empty_rows():
    return ["." * 15 for _ in range(15)]


def rows_with(entries):
    """Rows from {(row, col): char} placements."""
    grid = [["."] * 15 for _ in range(15)]
    for (r, c), ch in entries.items():
        grid[r][c] = ch
    return ["".join(row) for row in grid]
