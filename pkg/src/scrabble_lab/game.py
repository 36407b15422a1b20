"""Rules engine: legality, scoring, move application, end-of-game.

GameState is a value: applying a move returns a new state and never touches
the old one, so states can be fanned out to parallel workers or rollouts.
The RNG stream is part of the state (as a captured `random` state tuple),
which makes every transition deterministic and replayable. The immutable
GameConfig rides along on the state so scoring and drawing are self-contained.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .board import Board, EMPTY
from .config import BOARD_SIZE, CENTER, GameConfig
from .lexicon import Lexicon
from .moves import ACROSS, DOWN, Exchange, Pass, Place, format_move

ZERO_TURN_LIMIT = 6  # consecutive zero-score turns that end the game
BINGO_BONUS = 50
RACK_SIZE = 7
EXCHANGE_MIN_BAG = 7


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str = ""

    def __str__(self):
        return f"{self.code}({self.detail})" if self.detail else self.code


class IllegalMove(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(str(violation))
        self.violation = violation


class GameError(ValueError):
    pass


@dataclass(frozen=True)
class MoveRecord:
    player: int
    notation: str
    score: int
    leave: str  # canonical rack leave before refilling


@dataclass
class GameState:
    config: GameConfig
    board: Board
    racks: tuple  # two canonical (sorted) tile strings
    scores: tuple
    bag: tuple  # undrawn tiles
    rng_state: tuple
    turn: int = 0
    zero_turns: int = 0
    move_log: tuple = ()
    finalized: bool = False

    def rack(self) -> str:
        return self.racks[self.turn]

    def tiles_in_bag(self) -> int:
        return len(self.bag)


def canonical_rack(tiles) -> str:
    return "".join(sorted(tiles))


def rack_remove(rack: str, tiles) -> str:
    """Remove a multiset of tiles from a rack string; raises if absent."""
    remaining = list(rack)
    for tile in tiles:
        try:
            remaining.remove(tile)
        except ValueError:
            raise GameError(f"tile {tile!r} not in rack {rack!r}") from None
    return canonical_rack(remaining)


def rack_contains(rack: str, tiles) -> bool:
    remaining = list(rack)
    for tile in tiles:
        if tile in remaining:
            remaining.remove(tile)
        else:
            return False
    return True


def rack_value(rack: str, distribution) -> int:
    return sum(distribution.value(t) for t in rack)


def _draw(bag: list, rng: random.Random, k: int) -> list:
    drawn = []
    for _ in range(min(k, len(bag))):
        drawn.append(bag.pop(rng.randrange(len(bag))))
    return drawn


def new_game(config: GameConfig, seed: int, strict: bool = True) -> GameState:
    """Deal a fresh game: shuffled bag, seven tiles each, deterministic per seed."""
    total = config.distribution.total_count()
    if strict and total != 100:
        raise GameError(f"strict config requires 100 tiles, found {total}")
    rng = random.Random(seed)
    bag = config.distribution.full_pool()
    rack0 = canonical_rack(_draw(bag, rng, RACK_SIZE))
    rack1 = canonical_rack(_draw(bag, rng, RACK_SIZE))
    return GameState(
        config=config,
        board=Board.empty(),
        racks=(rack0, rack1),
        scores=(0, 0),
        bag=tuple(bag),
        rng_state=rng.getstate(),
        turn=0,
    )


def _perpendicular_run(board: Board, row: int, col: int, direction: str):
    """Letters of the maximal perpendicular run around an empty cell.

    Returns (before, after) as board characters (case preserved); both empty
    means no cross word would be formed by a tile placed here.
    """
    dr, dc = (1, 0) if direction == ACROSS else (0, 1)
    before = []
    r, c = row - dr, col - dc
    while 0 <= r < BOARD_SIZE and 0 <= c < BOARD_SIZE and board.at(r, c) != EMPTY:
        before.append(board.at(r, c))
        r, c = r - dr, c - dc
    before.reverse()
    after = []
    r, c = row + dr, col + dc
    while 0 <= r < BOARD_SIZE and 0 <= c < BOARD_SIZE and board.at(r, c) != EMPTY:
        after.append(board.at(r, c))
        r, c = r + dr, c + dc
    return "".join(before), "".join(after)


def check_legal(state: GameState, move, lexicon: Lexicon):
    """Returns None when legal, otherwise a Violation naming the first problem."""
    if isinstance(move, Pass):
        return None

    if isinstance(move, Exchange):
        if not move.tiles:
            return Violation("MalformedMove", "empty exchange")
        if len(state.bag) < EXCHANGE_MIN_BAG:
            return Violation("ExchangeBagTooSmall", f"bag holds {len(state.bag)}")
        if not rack_contains(state.rack(), move.tiles):
            return Violation("NotInRack", move.tiles)
        return None

    if not isinstance(move, Place):
        return Violation("MalformedMove", repr(move))
    if not move.word or not move.word.isalpha():
        return Violation("MalformedMove", f"word {move.word!r}")
    if move.direction not in (ACROSS, DOWN):
        return Violation("MalformedMove", f"direction {move.direction!r}")

    cells = move.cells()
    for r, c, _ in cells:
        if not (0 <= r < BOARD_SIZE and 0 <= c < BOARD_SIZE):
            return Violation("OffBoard", format_move(move))

    board = state.board
    dr, dc = (0, 1) if move.direction == ACROSS else (1, 0)
    before_r, before_c = move.row - dr, move.col - dc
    after_r, after_c = cells[-1][0] + dr, cells[-1][1] + dc
    if 0 <= before_r < BOARD_SIZE and 0 <= before_c < BOARD_SIZE:
        if board.at(before_r, before_c) != EMPTY:
            return Violation("BoardConflict", "word does not start its run")
    if 0 <= after_r < BOARD_SIZE and 0 <= after_c < BOARD_SIZE:
        if board.at(after_r, after_c) != EMPTY:
            return Violation("BoardConflict", "word does not end its run")

    placed = []
    covers_existing = False
    for r, c, ch in cells:
        existing = board.at(r, c)
        if existing == EMPTY:
            placed.append((r, c, ch))
        else:
            covers_existing = True
            if existing.upper() != ch.upper():
                return Violation(
                    "BoardConflict", f"{existing!r} already at row {r + 1}"
                )
    if not placed:
        return Violation("NoTilesPlaced", format_move(move))

    if board.is_board_empty():
        if not any((r, c) == CENTER for r, c, _ in placed):
            return Violation("CenterNotCovered", format_move(move))
    else:
        touches = covers_existing
        if not touches:
            for r, c, _ in placed:
                for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                    if 0 <= rr < BOARD_SIZE and 0 <= cc < BOARD_SIZE:
                        if board.at(rr, cc) != EMPTY:
                            touches = True
                            break
                if touches:
                    break
        if not touches:
            return Violation("Disconnected", format_move(move))

    needed = ["?" if ch.islower() else ch.upper() for _, _, ch in placed]
    if not rack_contains(state.rack(), needed):
        return Violation("NotInRack", "".join(sorted(needed)))

    formed_any = False
    if len(move.word) >= 2:
        formed_any = True
        if not lexicon.contains(move.word.upper()):
            return Violation("InvalidWord", move.word.upper())
    for r, c, ch in placed:
        before, after = _perpendicular_run(board, r, c, move.direction)
        if before or after:
            formed_any = True
            cross = (before + ch + after).upper()
            if not lexicon.contains(cross):
                return Violation("InvalidWord", cross)
    if not formed_any:
        # A lone tile forming no word in either direction.
        return Violation("InvalidWord", move.word.upper())
    return None


def score_move(board: Board, move, distribution, layout) -> int:
    """Points for a legal move on this board (0 for pass/exchange).

    Letter and word premiums count only under newly placed tiles; blanks
    score zero; placing all seven rack tiles earns the bingo bonus.
    """
    if not isinstance(move, Place):
        return 0
    total = 0
    main_sum = 0
    main_mult = 1
    placed_count = 0
    for r, c, ch in move.cells():
        if board.at(r, c) == EMPTY:
            placed_count += 1
            value = 0 if ch.islower() else distribution.value(ch)
            letter_score = value * layout.letter_multiplier(r, c)
            word_mult = layout.word_multiplier(r, c)
            main_sum += letter_score
            main_mult *= word_mult
            before, after = _perpendicular_run(board, r, c, move.direction)
            if before or after:
                cross_sum = letter_score
                for cch in before + after:
                    cross_sum += 0 if cch.islower() else distribution.value(cch.upper())
                total += cross_sum * word_mult
        else:
            existing = board.at(r, c)
            main_sum += 0 if existing.islower() else distribution.value(existing.upper())
    if len(move.word) >= 2:
        total += main_sum * main_mult
    if placed_count == RACK_SIZE:
        total += BINGO_BONUS
    return total


def apply_move(
    state: GameState,
    move,
    lexicon: Lexicon,
    trusted: bool = False,
    score_hint=None,
    log_moves: bool = True,
) -> GameState:
    """Apply a move, returning the successor state.

    Raises IllegalMove unless `trusted` is set (used for moves that come
    straight out of the generator, which only emits legal moves). The mover
    refills to seven tiles (or as many as remain); the zero-score-turn
    counter resets on a scoring placement and increments otherwise.
    `score_hint` reuses a score the generator already computed; rollouts
    pass log_moves=False to skip building move records.
    """
    if state.finalized:
        raise GameError("game already finalized")
    if not trusted:
        violation = check_legal(state, move, lexicon)
        if violation is not None:
            raise IllegalMove(violation)
        score_hint = None

    rng = random.Random(0)
    rng.setstate(state.rng_state)
    bag = list(state.bag)
    racks = list(state.racks)
    scores = list(state.scores)
    player = state.turn
    board = state.board
    score = 0

    if isinstance(move, Place):
        if score_hint is not None:
            score = score_hint
        else:
            score = score_move(board, move, state.config.distribution, state.config.layout)
        cells = list(board.cells)
        placed_tiles = []
        for r, c, ch in move.cells():
            idx = r * BOARD_SIZE + c
            if cells[idx] == EMPTY:
                cells[idx] = ch.lower() if ch.islower() else ch.upper()
                placed_tiles.append("?" if ch.islower() else ch.upper())
        board = Board(cells)
        leave = rack_remove(racks[player], placed_tiles)
        drawn = _draw(bag, rng, RACK_SIZE - len(leave))
        racks[player] = canonical_rack(leave + "".join(drawn))
        scores[player] += score
    elif isinstance(move, Exchange):
        leave = rack_remove(racks[player], move.tiles)
        drawn = _draw(bag, rng, RACK_SIZE - len(leave))
        bag.extend(move.tiles)
        racks[player] = canonical_rack(leave + "".join(drawn))
    else:
        leave = racks[player]

    zero_turns = 0 if score > 0 else state.zero_turns + 1
    if log_moves:
        record = MoveRecord(player=player, notation=format_move(move), score=score, leave=leave)
        move_log = state.move_log + (record,)
    else:
        move_log = state.move_log
    return GameState(
        config=state.config,
        board=board,
        racks=tuple(racks),
        scores=tuple(scores),
        bag=tuple(bag),
        rng_state=rng.getstate(),
        turn=1 - player,
        zero_turns=zero_turns,
        move_log=move_log,
    )


def is_over(state: GameState) -> bool:
    if len(state.bag) == 0 and (state.racks[0] == "" or state.racks[1] == ""):
        return True
    return state.zero_turns >= ZERO_TURN_LIMIT


def finalize(state: GameState) -> GameState:
    """Apply end-of-game rack adjustments.

    Each player loses the value of their leftover tiles; a player who went
    out additionally gains the opponent's leftover value.
    """
    if not is_over(state):
        raise GameError("finalize called on a non-terminal state")
    if state.finalized:
        return state
    dist = state.config.distribution
    v0 = rack_value(state.racks[0], dist)
    v1 = rack_value(state.racks[1], dist)
    s0, s1 = state.scores
    if state.racks[0] == "" and len(state.bag) == 0:
        s0 += v1
        s1 -= v1
    elif state.racks[1] == "" and len(state.bag) == 0:
        s1 += v0
        s0 -= v0
    else:
        s0 -= v0
        s1 -= v1
    return GameState(
        config=state.config,
        board=state.board,
        racks=state.racks,
        scores=(s0, s1),
        bag=state.bag,
        rng_state=state.rng_state,
        turn=state.turn,
        zero_turns=state.zero_turns,
        move_log=state.move_log,
        finalized=True,
    )
