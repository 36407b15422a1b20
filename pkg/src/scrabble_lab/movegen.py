"""Legal-move enumeration: anchor-based placement search plus exchanges.

Placements are found with the classic crossword construction: every empty
cell adjacent to a tile is an anchor; words are grown leftward over free
non-anchor squares (or read off a forced existing prefix) and extended
rightward through the trie, pruned by per-cell cross-checks. Each play is
produced exactly once, at the leftmost anchor it covers. The down direction
reuses the same search on the transposed board.

Scores are accumulated during the search, so callers that need ranked moves
never rescore placements from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .board import Board, EMPTY
from .config import BOARD_SIZE, CENTER, LETTERS
from .game import BINGO_BONUS, EXCHANGE_MIN_BAG, GameState, RACK_SIZE
from .lexicon import Lexicon, ROOT
from .moves import ACROSS, DOWN, Exchange, PASS, Place, move_sort_key

ALL_LETTERS = frozenset(LETTERS)


@dataclass
class CrossCheckTable:
    """Per empty cell and play direction: permitted letters and the score
    the perpendicular word would contribute (existing tiles only)."""

    allowed: dict  # (row, col, direction) -> frozenset, only constrained cells
    contribution: dict  # (row, col, direction) -> int

    def allowed_letters(self, row: int, col: int, direction: str) -> frozenset:
        return self.allowed.get((row, col, direction), ALL_LETTERS)

    def cross_score(self, row: int, col: int, direction: str) -> int:
        return self.contribution.get((row, col, direction), 0)


def _column_cross_info(rows, lexicon, values):
    """Cross-check data for across plays on this grid orientation.

    Returns {(r, c): (allowed frozenset, cross_sum)} for empty cells that
    have at least one vertical neighbor; other empty cells are unconstrained.
    An empty frozenset means no letter forms a valid perpendicular word.
    """
    edges = lexicon.edges
    terminal = lexicon.terminal
    info = {}
    for c in range(BOARD_SIZE):
        r = 0
        while r < BOARD_SIZE:
            if rows[r][c] != EMPTY:
                r += 1
                continue
            above = rows[r - 1][c] != EMPTY if r > 0 else False
            below = rows[r + 1][c] != EMPTY if r + 1 < BOARD_SIZE else False
            if not above and not below:
                r += 1
                continue
            up = []
            rr = r - 1
            while rr >= 0 and rows[rr][c] != EMPTY:
                up.append(rows[rr][c])
                rr -= 1
            up.reverse()
            down = []
            rr = r + 1
            while rr < BOARD_SIZE and rows[rr][c] != EMPTY:
                down.append(rows[rr][c])
                rr += 1
            cross_sum = 0
            node = ROOT
            for ch in up:
                cross_sum += 0 if ch.islower() else values[ch]
                if node is not None:
                    node = edges[node].get(ch.upper())
            for ch in down:
                cross_sum += 0 if ch.islower() else values[ch]
            allowed = set()
            if node is not None:
                for letter, child in edges[node].items():
                    walk = child
                    ok = True
                    for ch in down:
                        walk = edges[walk].get(ch.upper())
                        if walk is None:
                            ok = False
                            break
                    if ok and terminal[walk]:
                        allowed.add(letter)
            info[(r, c)] = (frozenset(allowed), cross_sum)
            r += 1
    return info


def _anchors(rows):
    """Empty cells adjacent to a tile; the center square on an empty board."""
    anchors = set()
    empty_board = True
    for r in range(BOARD_SIZE):
        row = rows[r]
        for c in range(BOARD_SIZE):
            if row[c] != EMPTY:
                empty_board = False
                for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                    if 0 <= rr < BOARD_SIZE and 0 <= cc < BOARD_SIZE:
                        if rows[rr][cc] == EMPTY:
                            anchors.add((rr, cc))
    if empty_board:
        return {CENTER}
    return anchors


def _gen_across(rows, rack_counts, lexicon, values, lmult, wmult, cross_info, anchors, emit):
    """Emit every across play on this grid orientation as
    (row, start_col, word, score, placed_count)."""
    edges = lexicon.edges
    terminal = lexicon.terminal
    rack_total = sum(rack_counts.values())
    if rack_total == 0:
        return
    blanks = rack_counts.get("?", 0) > 0

    for r in range(BOARD_SIZE):
        row = rows[r]
        row_anchors = sorted(c for (ar, c) in anchors if ar == r)
        if not row_anchors:
            continue
        anchor_set = set(row_anchors)
        lmult_r = lmult[r]
        wmult_r = wmult[r]

        def extend_right(pos, node, word, start, main_sum, main_mult, cross_total, placed, anchor_col):
            if pos >= BOARD_SIZE or row[pos] == EMPTY:
                if terminal[node] and pos > anchor_col:
                    score = main_sum * main_mult + cross_total
                    if placed == RACK_SIZE:
                        score += BINGO_BONUS
                    emit(r, start, word, score, placed)
                if pos >= BOARD_SIZE:
                    return
                info = cross_info.get((r, pos))
                node_edges = edges[node]
                if not node_edges:
                    return
                lm = lmult_r[pos]
                wm = wmult_r[pos]
                for letter, child in node_edges.items():
                    if info is not None and letter not in info[0]:
                        continue
                    # natural tile
                    if rack_counts.get(letter, 0) > 0:
                        rack_counts[letter] -= 1
                        ls = values[letter] * lm
                        ct = cross_total if info is None else cross_total + (info[1] + ls) * wm
                        extend_right(pos + 1, child, word + letter, start,
                                     main_sum + ls, main_mult * wm, ct, placed + 1, anchor_col)
                        rack_counts[letter] += 1
                    # blank designated as this letter
                    if blanks and rack_counts.get("?", 0) > 0:
                        rack_counts["?"] -= 1
                        ct = cross_total if info is None else cross_total + (info[1] + 0) * wm
                        extend_right(pos + 1, child, word + letter.lower(), start,
                                     main_sum, main_mult * wm, ct, placed + 1, anchor_col)
                        rack_counts["?"] += 1
                return
            # occupied cell: forced traversal, no premiums, no rack use
            ch = row[pos]
            child = edges[node].get(ch.upper())
            if child is None:
                return
            add = 0 if ch.islower() else values[ch]
            extend_right(pos + 1, child, word + ch, start,
                         main_sum + add, main_mult, cross_total, placed, anchor_col)

        def left_part(anchor_col, node, word, limit):
            extend_right(anchor_col, node, word, anchor_col - len(word),
                         _prefix_sum(word, anchor_col), _prefix_mult(word, anchor_col),
                         0, len(word), anchor_col)
            if limit <= 0:
                return
            node_edges = edges[node]
            for letter, child in node_edges.items():
                if rack_counts.get(letter, 0) > 0:
                    rack_counts[letter] -= 1
                    left_part(anchor_col, child, word + letter, limit - 1)
                    rack_counts[letter] += 1
                if blanks and rack_counts.get("?", 0) > 0:
                    rack_counts["?"] -= 1
                    left_part(anchor_col, child, word + letter.lower(), limit - 1)
                    rack_counts["?"] += 1

        def _prefix_sum(word, anchor_col):
            total = 0
            for i, ch in enumerate(word):
                col = anchor_col - len(word) + i
                if not ch.islower():
                    total += values[ch] * lmult_r[col]
            return total

        def _prefix_mult(word, anchor_col):
            mult = 1
            for i in range(len(word)):
                mult *= wmult_r[anchor_col - len(word) + i]
            return mult

        for ac in row_anchors:
            if ac > 0 and row[ac - 1] != EMPTY:
                s = ac - 1
                while s > 0 and row[s - 1] != EMPTY:
                    s -= 1
                prefix = row[s:ac]
                node = ROOT
                psum = 0
                ok = True
                for ch in prefix:
                    node = edges[node].get(ch.upper())
                    if node is None:
                        ok = False
                        break
                    psum += 0 if ch.islower() else values[ch]
                if ok:
                    extend_right(ac, node, prefix, s, psum, 1, 0, 0, ac)
            else:
                limit = 0
                c = ac - 1
                while c >= 0 and row[c] == EMPTY and c not in anchor_set:
                    limit += 1
                    c -= 1
                limit = min(limit, rack_total - 1)
                left_part(ac, ROOT, "", limit)


def _letter_values(distribution):
    return {ch: distribution.value(ch) for ch in LETTERS}


def _premium_grids(layout):
    lmult = tuple(
        tuple(layout.letter_multiplier(r, c) for c in range(BOARD_SIZE))
        for r in range(BOARD_SIZE)
    )
    wmult = tuple(
        tuple(layout.word_multiplier(r, c) for c in range(BOARD_SIZE))
        for r in range(BOARD_SIZE)
    )
    return lmult, wmult


def generate_scored_placements(state: GameState, lexicon: Lexicon):
    """All legal placements with their scores, canonically ordered.

    Single-tile plays that form words in both directions are reported once,
    preferring the across representation.
    """
    board = state.board
    rack = state.rack()
    if not rack:
        return []
    values = _letter_values(state.config.distribution)
    lmult, wmult = _premium_grids(state.config.layout)
    rows = board.rows()
    rows_t = ["".join(rows[r][c] for r in range(BOARD_SIZE)) for c in range(BOARD_SIZE)]
    lmult_t = tuple(zip(*lmult))
    wmult_t = tuple(zip(*wmult))

    results = []
    single_seen = {}

    def collect(direction, rows_d):
        def emit(r, start, word, score, placed):
            if direction == ACROSS:
                move = Place(row=r, col=start, direction=ACROSS, word=word)
            else:
                move = Place(row=start, col=r, direction=DOWN, word=word)
            if placed == 1:
                # a one-tile play can be reached from both directions;
                # key it by the new tile itself and keep the first (across)
                key = None
                for rr, cc, ch in move.cells():
                    if rows[rr][cc] == EMPTY:
                        key = (rr, cc, ch)
                        break
                if key in single_seen:
                    return
                single_seen[key] = True
            results.append((move, score))

        rack_counts = {}
        for t in rack:
            rack_counts[t] = rack_counts.get(t, 0) + 1
        cross = _column_cross_info(rows_d, lexicon, values)
        anchors = _anchors(rows_d)
        lm = lmult if rows_d is rows else lmult_t
        wm = wmult if rows_d is rows else wmult_t
        _gen_across(rows_d, rack_counts, lexicon, values, lm, wm, cross, anchors, emit)

    collect(ACROSS, rows)
    collect(DOWN, rows_t)
    results.sort(key=lambda pair: move_sort_key(pair[0]))
    return results


@lru_cache(maxsize=8192)
def _exchange_options(rack: str):
    seen = set()
    for size in range(1, len(rack) + 1):
        for combo in combinations(rack, size):
            seen.add("".join(combo))
    return tuple(sorted(seen))


def generate_exchanges(state: GameState):
    """Distinct nonempty exchange multisets, only when the bag allows them."""
    if len(state.bag) < EXCHANGE_MIN_BAG:
        return []
    return [Exchange(tiles) for tiles in _exchange_options(state.rack())]


def generate_moves(state: GameState, lexicon: Lexicon):
    """Every legal move: placements, exchanges, and pass, canonically ordered."""
    moves = [move for move, _ in generate_scored_placements(state, lexicon)]
    moves.extend(generate_exchanges(state))
    moves.append(PASS)
    moves.sort(key=move_sort_key)
    return moves


def compute_cross_checks(board: Board, lexicon: Lexicon, distribution) -> CrossCheckTable:
    """Letters placeable at each empty cell, per play direction, with the
    score contribution of the perpendicular word they would complete."""
    values = _letter_values(distribution)
    rows = board.rows()
    rows_t = ["".join(rows[r][c] for r in range(BOARD_SIZE)) for c in range(BOARD_SIZE)]
    allowed = {}
    contribution = {}
    for (r, c), (letters, weight) in _column_cross_info(rows, lexicon, values).items():
        allowed[(r, c, ACROSS)] = letters
        contribution[(r, c, ACROSS)] = weight
    for (r, c), (letters, weight) in _column_cross_info(rows_t, lexicon, values).items():
        allowed[(c, r, DOWN)] = letters
        contribution[(c, r, DOWN)] = weight
    return CrossCheckTable(allowed=allowed, contribution=contribution)
