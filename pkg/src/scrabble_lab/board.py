"""15x15 board of placed tiles.

Cells are single characters: '.' for empty, 'A'-'Z' for natural tiles, and
'a'-'z' for blanks designated as that letter (blanks always score 0).
Once placed, a cell never changes.
"""

from __future__ import annotations

from .config import BOARD_SIZE

EMPTY = "."


class Board:
    __slots__ = ("cells",)

    def __init__(self, cells=None):
        self.cells = list(cells) if cells is not None else [EMPTY] * (BOARD_SIZE * BOARD_SIZE)

    @staticmethod
    def empty() -> "Board":
        return Board()

    @staticmethod
    def from_rows(rows) -> "Board":
        """Build from 15 strings of 15 chars ('.', 'A'-'Z', 'a'-'z')."""
        rows = list(rows)
        if len(rows) != BOARD_SIZE or any(len(r) != BOARD_SIZE for r in rows):
            raise ValueError("board must be 15 rows of 15 characters")
        cells = []
        for row in rows:
            for ch in row:
                if ch != EMPTY and not ch.isalpha():
                    raise ValueError(f"invalid board character {ch!r}")
                cells.append(ch)
        return Board(cells)

    def rows(self) -> list:
        return [
            "".join(self.cells[r * BOARD_SIZE : (r + 1) * BOARD_SIZE])
            for r in range(BOARD_SIZE)
        ]

    def at(self, row: int, col: int) -> str:
        return self.cells[row * BOARD_SIZE + col]

    def is_empty_at(self, row: int, col: int) -> bool:
        return self.cells[row * BOARD_SIZE + col] == EMPTY

    def letter_at(self, row: int, col: int) -> str:
        """Designated letter at an occupied cell (uppercase)."""
        return self.cells[row * BOARD_SIZE + col].upper()

    def is_blank_at(self, row: int, col: int) -> bool:
        return self.cells[row * BOARD_SIZE + col].islower()

    def is_board_empty(self) -> bool:
        return all(ch == EMPTY for ch in self.cells)

    def occupied_cells(self):
        return [
            (i // BOARD_SIZE, i % BOARD_SIZE)
            for i, ch in enumerate(self.cells)
            if ch != EMPTY
        ]

    def tile_chars(self) -> list:
        """Tiles consumed from the bag: '?' for each blank, letters otherwise."""
        out = []
        for ch in self.cells:
            if ch == EMPTY:
                continue
            out.append("?" if ch.islower() else ch)
        return out

    def copy(self) -> "Board":
        return Board(self.cells)

    def grid(self) -> list:
        """Cells as a list of 15 lists of chars (mutable working copy)."""
        return [
            self.cells[r * BOARD_SIZE : (r + 1) * BOARD_SIZE]
            for r in range(BOARD_SIZE)
        ]

    def __eq__(self, other):
        return isinstance(other, Board) and self.cells == other.cells

    def __hash__(self):
        return hash("".join(self.cells))

    def __repr__(self):
        return "Board([\n  " + ",\n  ".join(repr(r) for r in self.rows()) + "\n])"
