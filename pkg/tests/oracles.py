"""Independent brute-force oracles used to pin down expected values.

These deliberately avoid the anchor search: the placement oracle walks the
whole lexicon against every start square and filters with the rules
engine, so agreement with the generator is evidence, not tautology.
"""

from itertools import combinations

from scrabble_lab.board import EMPTY
from scrabble_lab.config import BOARD_SIZE
from scrabble_lab.game import check_legal
from scrabble_lab.moves import ACROSS, DOWN, Place


def _active_cells(board):
    """Cells a legal placement must intersect: occupied plus neighbors, or
    the center on an empty board."""
    active = set()
    any_tile = False
    for r in range(BOARD_SIZE):
        for c in range(BOARD_SIZE):
            if board.at(r, c) != EMPTY:
                any_tile = True
                active.add((r, c))
                for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                    if 0 <= rr < BOARD_SIZE and 0 <= cc < BOARD_SIZE:
                        active.add((rr, cc))
    if not any_tile:
        return {(7, 7)}
    return active


def naive_placements(state, lexicon):
    """Every legal placement, canonically represented, by exhaustive trial:
    each lexicon word, at each start and direction, with every blank
    designation subset, validated through check_legal."""
    board = state.board
    rack = state.rack()
    n_blanks = rack.count("?")
    active = _active_cells(board)
    found = {}

    for word in lexicon.iter_words():
        length = len(word)
        for direction in (ACROSS, DOWN):
            dr, dc = (0, 1) if direction == ACROSS else (1, 0)
            for row in range(BOARD_SIZE if dr == 0 else BOARD_SIZE - length + 1):
                for col in range(BOARD_SIZE if dc == 0 else BOARD_SIZE - length + 1):
                    span = [(row + i * dr, col + i * dc) for i in range(length)]
                    if not any(cell in active for cell in span):
                        continue
                    placed_offsets = []
                    base_chars = list(word)
                    feasible = True
                    for i, (r, c) in enumerate(span):
                        existing = board.at(r, c)
                        if existing == EMPTY:
                            placed_offsets.append(i)
                        elif existing.upper() != word[i]:
                            feasible = False
                            break
                        else:
                            # keep the board's case so blank tiles already
                            # on the board show up lowercase in the word
                            base_chars[i] = existing
                    if not feasible or not placed_offsets:
                        continue
                    for blank_count in range(0, min(n_blanks, len(placed_offsets)) + 1):
                        for blanks_at in combinations(placed_offsets, blank_count):
                            chars = list(base_chars)
                            for i in blanks_at:
                                chars[i] = chars[i].lower()
                            move = Place(row=row, col=col, direction=direction,
                                         word="".join(chars))
                            if check_legal(state, move, lexicon) is not None:
                                continue
                            signature = frozenset(
                                (r, c, move.word[i])
                                for i, (r, c) in enumerate(span)
                                if board.at(r, c) == EMPTY
                            )
                            previous = found.get(signature)
                            if previous is None:
                                found[signature] = move
                            elif len(signature) == 1:
                                # one-tile play reachable from both directions:
                                # the across representation is canonical
                                if previous.direction == DOWN and direction == ACROSS:
                                    found[signature] = move
    return sorted(found.values(), key=lambda m: (m.row, m.col, m.direction, m.word))


def naive_cross_letters(board, lexicon, row, col, direction):
    """Letters legal at an empty cell for a play in `direction`, by trying
    all 26 against the perpendicular run."""
    from scrabble_lab.config import LETTERS

    dr, dc = (1, 0) if direction == ACROSS else (0, 1)
    before = []
    r, c = row - dr, col - dc
    while 0 <= r < BOARD_SIZE and 0 <= c < BOARD_SIZE and board.at(r, c) != EMPTY:
        before.append(board.letter_at(r, c))
        r, c = r - dr, c - dc
    before.reverse()
    after = []
    r, c = row + dr, col + dc
    while 0 <= r < BOARD_SIZE and 0 <= c < BOARD_SIZE and board.at(r, c) != EMPTY:
        after.append(board.letter_at(r, c))
        r, c = r + dr, c + dc
    if not before and not after:
        return set(LETTERS)
    return {
        letter
        for letter in LETTERS
        if lexicon.contains("".join(before) + letter + "".join(after))
    }
