"""Move variants and the text notation used in logs.

Notation: horizontal plays are "8D WORD" (row 1-15 then column A-O),
vertical plays are "D8 WORD". The word spells the full main word including
tiles already on the board; lowercase letters mark blank designations.
Exchanges are "EXCH <tiles>" ('?' for blanks) and passes are "PASS".
"""

from __future__ import annotations

from dataclasses import dataclass

from .board import Board, EMPTY
from .config import BOARD_SIZE

ACROSS = "across"
DOWN = "down"

COLUMN_LETTERS = "ABCDEFGHIJKLMNO"


@dataclass(frozen=True)
class Place:
    row: int  # 0-based start of the main word
    col: int
    direction: str  # ACROSS or DOWN
    word: str  # full main word; lowercase = blank designation

    def cells(self):
        """(row, col, char) for every letter of the main word."""
        dr, dc = (0, 1) if self.direction == ACROSS else (1, 0)
        return [
            (self.row + i * dr, self.col + i * dc, ch)
            for i, ch in enumerate(self.word)
        ]

    def placed_cells(self, board: Board):
        """The subset of cells() that lands on empty squares."""
        return [
            (r, c, ch)
            for r, c, ch in self.cells()
            if 0 <= r < BOARD_SIZE and 0 <= c < BOARD_SIZE and board.at(r, c) == EMPTY
        ]

    def tiles_needed(self, board: Board) -> list:
        """Rack tiles this play consumes ('?' for each blank designation)."""
        return ["?" if ch.islower() else ch for _, _, ch in self.placed_cells(board)]


@dataclass(frozen=True)
class Exchange:
    tiles: str  # canonical sorted tile string, '?' for blanks

    def __post_init__(self):
        object.__setattr__(self, "tiles", "".join(sorted(self.tiles)))


@dataclass(frozen=True)
class Pass:
    pass


PASS = Pass()


def move_sort_key(move):
    """Canonical deterministic ordering: placements, then exchanges, then pass."""
    if isinstance(move, Place):
        return (0, move.row, move.col, 0 if move.direction == ACROSS else 1, move.word)
    if isinstance(move, Exchange):
        return (1, 0, 0, 0, move.tiles)
    return (2, 0, 0, 0, "")


def placement_signature(move: Place, board: Board):
    """Identity of the physical placement: the set of newly placed tiles.

    A one-tile play forming words both ways is the same physical move under
    either direction label; this signature makes the two compare equal.
    """
    return frozenset(move.placed_cells(board))


def format_move(move) -> str:
    if isinstance(move, Pass):
        return "PASS"
    if isinstance(move, Exchange):
        return f"EXCH {move.tiles}"
    col_letter = COLUMN_LETTERS[move.col]
    row_number = move.row + 1
    if move.direction == ACROSS:
        return f"{row_number}{col_letter} {move.word}"
    return f"{col_letter}{row_number} {move.word}"


def parse_move(text: str):
    """Inverse of format_move. Raises ValueError on malformed notation."""
    text = text.strip()
    if text == "PASS":
        return PASS
    if text.startswith("EXCH "):
        tiles = text[5:].strip()
        if not tiles or any(ch != "?" and not ch.isupper() for ch in tiles):
            raise ValueError(f"bad exchange notation {text!r}")
        return Exchange(tiles)
    parts = text.split()
    if len(parts) != 2:
        raise ValueError(f"bad move notation {text!r}")
    coord, word = parts
    if not word or not word.isalpha():
        raise ValueError(f"bad word in notation {text!r}")
    if coord[0].isdigit():  # "8D" -> across
        row_s, col_s = coord[:-1], coord[-1]
        direction = ACROSS
    else:  # "D8" -> down
        col_s, row_s = coord[0], coord[1:]
        direction = DOWN
    if col_s not in COLUMN_LETTERS or not row_s.isdigit():
        raise ValueError(f"bad coordinate in notation {text!r}")
    row = int(row_s) - 1
    col = COLUMN_LETTERS.index(col_s)
    if not (0 <= row < BOARD_SIZE):
        raise ValueError(f"row out of range in notation {text!r}")
    return Place(row=row, col=col, direction=direction, word=word)
