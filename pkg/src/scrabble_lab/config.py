"""Game configuration: tile distribution and premium-square layout.

The default config is the official English set (100 tiles, standard 15x15
premium pattern), shipped as a JSON asset so variants stay testable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources

BOARD_SIZE = 15
CENTER = (7, 7)
BLANK = "?"
LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
PREMIUM_CODES = ("DL", "TL", "DW", "TW")
VOWELS = frozenset("AEIOU")

CONFIG_ENV_VAR = "SCRABBLE_LAB_CONFIG"


class ConfigError(ValueError):
    """A game config file failed validation; message is path-qualified."""


@dataclass(frozen=True)
class TileInfo:
    count: int
    value: int


@dataclass(frozen=True)
class TileDistribution:
    """Per-tile counts and point values. Tiles are 'A'-'Z' plus '?' (blank)."""

    tiles: dict  # tile char -> TileInfo

    def value(self, tile: str) -> int:
        return self.tiles[tile].value

    def count(self, tile: str) -> int:
        return self.tiles[tile].count

    def total_count(self) -> int:
        return sum(info.count for info in self.tiles.values())

    def full_pool(self) -> list:
        """Expanded multiset of all tiles, in a fixed canonical order."""
        pool = []
        for tile in sorted(self.tiles):
            pool.extend(tile * self.tiles[tile].count)
        return pool


@dataclass(frozen=True)
class PremiumLayout:
    """15x15 grid of premium codes; '' means a plain square."""

    grid: tuple  # tuple of 15 tuples of 15 strings

    def at(self, row: int, col: int) -> str:
        return self.grid[row][col]

    def letter_multiplier(self, row: int, col: int) -> int:
        code = self.grid[row][col]
        return 2 if code == "DL" else 3 if code == "TL" else 1

    def word_multiplier(self, row: int, col: int) -> int:
        code = self.grid[row][col]
        return 2 if code == "DW" else 3 if code == "TW" else 1

    def premium_cells(self) -> list:
        return [
            (r, c)
            for r in range(BOARD_SIZE)
            for c in range(BOARD_SIZE)
            if self.grid[r][c]
        ]

    def transposed(self) -> "PremiumLayout":
        return PremiumLayout(tuple(zip(*self.grid)))


@dataclass(frozen=True)
class GameConfig:
    distribution: TileDistribution
    layout: PremiumLayout

    def to_dict(self) -> dict:
        tiles = {}
        for tile, info in sorted(self.distribution.tiles.items()):
            key = "BLANK" if tile == BLANK else tile
            tiles[key] = {"count": info.count, "value": info.value}
        return {"tiles": tiles, "premium": [list(row) for row in self.layout.grid]}


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"{path}: {message}")


def parse_config(data: dict) -> GameConfig:
    """Validate a raw config dict and build a GameConfig.

    Raises ConfigError with a path-qualified message on the first problem
    found (e.g. "tiles.A.count: expected a non-negative integer").
    """
    _require(isinstance(data, dict), "$", "config must be a JSON object")
    _require("tiles" in data, "$", "missing required key 'tiles'")
    _require("premium" in data, "$", "missing required key 'premium'")

    raw_tiles = data["tiles"]
    _require(isinstance(raw_tiles, dict), "tiles", "expected an object")
    tiles = {}
    for key, entry in raw_tiles.items():
        path = f"tiles.{key}"
        if key == "BLANK":
            tile = BLANK
        else:
            _require(
                isinstance(key, str) and len(key) == 1 and key in LETTERS,
                path,
                "tile keys must be 'A'-'Z' or 'BLANK'",
            )
            tile = key
        _require(isinstance(entry, dict), path, "expected an object")
        for field in ("count", "value"):
            _require(field in entry, f"{path}.{field}", "missing")
            val = entry[field]
            _require(
                isinstance(val, int) and not isinstance(val, bool) and val >= 0,
                f"{path}.{field}",
                "expected a non-negative integer",
            )
        tiles[tile] = TileInfo(count=entry["count"], value=entry["value"])
    for letter in LETTERS:
        _require(letter in tiles, f"tiles.{letter}", "missing tile entry")
    _require(BLANK in tiles, "tiles.BLANK", "missing tile entry")
    _require(tiles[BLANK].value == 0, "tiles.BLANK.value", "blank value must be 0")

    raw_premium = data["premium"]
    _require(isinstance(raw_premium, list), "premium", "expected a list of 15 rows")
    _require(len(raw_premium) == BOARD_SIZE, "premium", "expected exactly 15 rows")
    grid = []
    for r, row in enumerate(raw_premium):
        _require(isinstance(row, list), f"premium[{r}]", "expected a list of 15 cells")
        _require(len(row) == BOARD_SIZE, f"premium[{r}]", "expected exactly 15 cells")
        cells = []
        for c, code in enumerate(row):
            _require(
                code in PREMIUM_CODES or code == "",
                f"premium[{r}][{c}]",
                "expected one of '', 'DL', 'TL', 'DW', 'TW'",
            )
            cells.append(code)
        grid.append(tuple(cells))

    return GameConfig(
        distribution=TileDistribution(tiles=tiles),
        layout=PremiumLayout(grid=tuple(grid)),
    )


def load_config(path: str) -> GameConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)


def default_config() -> GameConfig:
    """The standard English config, or the file named by SCRABBLE_LAB_CONFIG."""
    override = os.environ.get(CONFIG_ENV_VAR)
    if override:
        return load_config(override)
    text = resources.files("scrabble_lab.data").joinpath("standard.json").read_text()
    return parse_config(json.loads(text))
