"""Static move evaluation: features, leave values, and scoring models.

The baseline evaluator ranks by move score plus rack-leave value with unit
weights (the classic Quackle heuristic); richer models add leave
playability, consonant/vowel balance, blanks, premium-opening counts, and
board-level extras, scored by a linear form or a small MLP, optionally
switched by game phase (tiles left in the bag).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .board import Board, EMPTY
from .config import BLANK, BOARD_SIZE, LETTERS, VOWELS, GameConfig, default_config
from .game import GameState, RACK_SIZE, canonical_rack, rack_remove, score_move
from .lexicon import Lexicon, ROOT
from .moves import PASS, Exchange, Pass, Place, move_sort_key
from .movegen import generate_exchanges, generate_scored_placements
from .nnet import Mlp

MOVE_FEATURE_NAMES = (
    "move_score",
    "leave_value",
    "leave_playability",
    "cv_diff",
    "blanks_left",
    "open_dl",
    "open_tl",
    "open_dw",
    "open_tw",
    "leave_length",
    "board_vc_diff",
    "board_blanks",
)

LINEAR_DEFAULT_FEATURES = (
    "move_score",
    "leave_value",
    "leave_playability",
    "cv_diff",
    "blanks_left",
)

BASELINE_FEATURES = ("move_score", "leave_value")

# Game-phase boundaries on tiles left in the bag (half-open): early is
# >= 80, endgame is < 20, mid-game is everything between.
EARLY_MIN_BAG = 80
END_MAX_BAG = 20

# Fallback single-tile leave values (points-equivalent). Rough folk values;
# only used when a leave is missing from the learned table.
DEFAULT_TILE_VALUES = {
    "?": 24.0, "A": 1.0, "B": -1.5, "C": 0.0, "D": 0.0, "E": 4.0,
    "F": -1.5, "G": -2.0, "H": 1.0, "I": -0.5, "J": -2.0, "K": 0.0,
    "L": 0.5, "M": 0.5, "N": 0.5, "O": -1.0, "P": 0.0, "Q": -6.5,
    "R": 1.5, "S": 8.0, "T": 0.5, "U": -3.0, "V": -4.5, "W": -3.5,
    "X": 3.0, "Y": 0.0, "Z": 3.0,
}


@dataclass
class MoveFeatures:
    move_score: float = 0.0
    leave_value: float = 0.0
    leave_playability: float = 0.0
    cv_diff: float = 0.0
    blanks_left: float = 0.0
    open_dl: float = 0.0
    open_tl: float = 0.0
    open_dw: float = 0.0
    open_tw: float = 0.0
    leave_length: float = 0.0
    board_vc_diff: float = 0.0
    board_blanks: float = 0.0
    leave: str = ""

    def vector(self, names):
        return [getattr(self, name) for name in names]

    def to_dict(self):
        out = {name: getattr(self, name) for name in MOVE_FEATURE_NAMES}
        out["leave"] = self.leave
        return out

    @staticmethod
    def from_dict(data):
        return MoveFeatures(**data)


# ---------------------------------------------------------------------------
# Leave values
# ---------------------------------------------------------------------------


@dataclass
class LeaveValueTable:
    """Canonical leave string -> value, with a per-tile fallback sum."""

    values: dict = field(default_factory=dict)
    tile_defaults: dict = field(default_factory=lambda: dict(DEFAULT_TILE_VALUES))
    source: str = "builtin-static"

    def to_dict(self):
        return {
            "source": self.source,
            "values": dict(sorted(self.values.items())),
            "tile_defaults": dict(sorted(self.tile_defaults.items())),
        }

    @staticmethod
    def from_dict(data):
        return LeaveValueTable(
            values=dict(data.get("values", {})),
            tile_defaults=dict(data.get("tile_defaults", DEFAULT_TILE_VALUES)),
            source=data.get("source", "unknown"),
        )


def default_leave_table() -> LeaveValueTable:
    return LeaveValueTable()


def leave_value(leave: str, table: LeaveValueTable) -> float:
    """Value of a rack leave; empty leaves are worth 0.

    Missing leaves fall back to the sum of per-tile values (table entries
    for single tiles first, then the built-in defaults).
    """
    if not leave:
        return 0.0
    key = canonical_rack(leave)
    hit = table.values.get(key)
    if hit is not None:
        return hit
    total = 0.0
    for tile in key:
        single = table.values.get(tile)
        if single is None:
            single = table.tile_defaults.get(tile, 0.0)
        total += single
    return total


def build_leave_table(move_logs, max_leave_size: int = 6, min_support: int = 2) -> LeaveValueTable:
    """Estimate leave values from completed-game move logs.

    A leave's value is the mean next-turn score of the player who held it,
    centered by the global mean next-turn score. Leaves seen fewer than
    `min_support` times are left to the per-tile fallback.
    """
    sums: dict = {}
    counts: dict = {}
    total = 0.0
    n = 0
    for log in move_logs:
        per_player: dict = {}
        for record in log:
            per_player.setdefault(record.player, []).append(record)
        for records in per_player.values():
            for current, nxt in zip(records, records[1:]):
                leave = canonical_rack(current.leave)
                if len(leave) > max_leave_size:
                    continue
                sums[leave] = sums.get(leave, 0.0) + nxt.score
                counts[leave] = counts.get(leave, 0) + 1
                total += nxt.score
                n += 1
    if n == 0:
        raise ValueError("no usable leave observations in the provided logs")
    global_mean = total / n
    values = {
        leave: sums[leave] / counts[leave] - global_mean
        for leave in sums
        if counts[leave] >= min_support
    }
    return LeaveValueTable(values=values, source=f"selfplay(n={n})")


_PLAYABILITY_RNG_STATE = random.Random(0).getstate()


def leave_playability(
    leave: str,
    bag_contents,
    lexicon: Lexicon,
    samples: int,
    seed: int,
    config: GameConfig | None = None,
) -> float:
    """Expected best first-move score after completing the leave to a full
    rack with random bag tiles, played on an empty board.

    The empty-board model makes the value rack-intrinsic rather than tied
    to the live position. Deterministic per seed.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if config is None:
        config = default_config()
    rng = random.Random(seed)
    pool = list(bag_contents)
    need = max(0, RACK_SIZE - len(leave))
    total = 0.0
    for _ in range(samples):
        drawn = rng.sample(pool, need) if len(pool) >= need else list(pool)
        rack = canonical_rack(leave + "".join(drawn))
        state = GameState(
            config=config,
            board=Board.empty(),
            racks=(rack, ""),
            scores=(0, 0),
            bag=(),
            rng_state=_PLAYABILITY_RNG_STATE,
            turn=0,
        )
        placements = generate_scored_placements(state, lexicon)
        if placements:
            total += max(score for _, score in placements)
    return total / samples


# ---------------------------------------------------------------------------
# Premium openings
# ---------------------------------------------------------------------------


def _hook_letters(board: Board, row: int, col: int, lexicon: Lexicon):
    """Letters whose one-tile placement at (row, col) makes every word it
    forms valid; None when no word would be formed at all."""
    edges = lexicon.edges
    terminal = lexicon.terminal
    candidate = None
    for dr, dc in ((0, 1), (1, 0)):
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
            continue
        node = ROOT
        for ch in before:
            node = edges[node].get(ch)
            if node is None:
                break
        allowed = set()
        if node is not None:
            for letter, child in edges[node].items():
                walk = child
                for ch in after:
                    walk = edges[walk].get(ch)
                    if walk is None:
                        break
                else:
                    if terminal[walk]:
                        allowed.add(letter)
        candidate = allowed if candidate is None else candidate & allowed
    return candidate


def opening_features(board_before: Board, board_after: Board, lexicon: Lexicon, layout):
    """New premium openings created by a move: per premium kind, the count
    of premium cells next to the new tiles that a single hooked tile could
    now legally reach but could not before. Order: (DL, TL, DW, TW)."""
    new_cells = [
        (i // BOARD_SIZE, i % BOARD_SIZE)
        for i, (a, b) in enumerate(zip(board_before.cells, board_after.cells))
        if a != b
    ]
    if not new_cells:
        return (0, 0, 0, 0)
    neighbors = set()
    for r, c in new_cells:
        for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= rr < BOARD_SIZE and 0 <= cc < BOARD_SIZE:
                if board_after.at(rr, cc) == EMPTY:
                    neighbors.add((rr, cc))
    counts = {"DL": 0, "TL": 0, "DW": 0, "TW": 0}
    for r, c in neighbors:
        code = layout.at(r, c)
        if not code:
            continue
        now = _hook_letters(board_after, r, c, lexicon)
        if not now:
            continue
        before = _hook_letters(board_before, r, c, lexicon)
        if before:
            continue
        counts[code] += 1
    return (counts["DL"], counts["TL"], counts["DW"], counts["TW"])


# ---------------------------------------------------------------------------
# Feature extraction
# ---------------------------------------------------------------------------


def board_after_move(board: Board, move) -> Board:
    if not isinstance(move, Place):
        return board
    cells = list(board.cells)
    for r, c, ch in move.cells():
        idx = r * BOARD_SIZE + c
        if cells[idx] == EMPTY:
            cells[idx] = ch
    return Board(cells)


def _leave_after(state: GameState, move) -> str:
    rack = state.rack()
    if isinstance(move, Place):
        return rack_remove(rack, move.tiles_needed(state.board))
    if isinstance(move, Exchange):
        return rack_remove(rack, move.tiles)
    return rack


def extract_features(
    state: GameState,
    move,
    leave_table: LeaveValueTable,
    lexicon: Lexicon,
    playability_samples: int = 0,
    seed: int = 0,
    needed=None,
    move_score_hint=None,
) -> MoveFeatures:
    """All move features; pass/exchange have move_score 0 and keep their
    leave from the remaining rack.

    `needed` (a set of feature names) skips the expensive features when the
    model does not read them; `move_score_hint` reuses a score the move
    generator already computed.
    """
    want = (lambda name: True) if needed is None else (lambda name: name in needed)

    if move_score_hint is not None:
        score = move_score_hint
    else:
        score = score_move(state.board, move, state.config.distribution, state.config.layout)
    leave = _leave_after(state, move)
    vowels = consonants = blanks = 0
    for tile in leave:
        if tile == BLANK:
            blanks += 1
        elif tile in VOWELS:
            vowels += 1
        else:
            consonants += 1

    features = MoveFeatures(
        move_score=float(score),
        leave_value=leave_value(leave, leave_table),
        cv_diff=float(consonants - vowels),
        blanks_left=float(blanks),
        leave_length=float(len(leave)),
        leave=leave,
    )

    if playability_samples >= 1 and want("leave_playability"):
        unseen = _unseen_pool(state)
        features.leave_playability = leave_playability(
            leave, unseen, lexicon, playability_samples, seed, config=state.config
        )

    if isinstance(move, Place) and any(
        want(n) for n in ("open_dl", "open_tl", "open_dw", "open_tw")
    ):
        after = board_after_move(state.board, move)
        dl, tl, dw, tw = opening_features(state.board, after, lexicon, state.config.layout)
        features.open_dl, features.open_tl = float(dl), float(tl)
        features.open_dw, features.open_tw = float(dw), float(tw)

    if want("board_vc_diff") or want("board_blanks"):
        bv = bc = bb = 0
        for ch in state.board.cells:
            if ch == EMPTY:
                continue
            if ch.islower():
                bb += 1
            if ch.upper() in VOWELS:
                bv += 1
            else:
                bc += 1
        features.board_vc_diff = float(bv - bc)
        features.board_blanks = float(bb)
    return features


def _unseen_pool(state: GameState) -> list:
    """Tiles not visible to the mover: the bag plus the opponent's rack."""
    pool = list(state.bag)
    pool.extend(state.racks[1 - state.turn])
    return pool


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------


@dataclass
class LinearModel:
    feature_names: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.feature_names) != len(self.weights):
            raise ValueError("weight vector length must match feature count")
        self.feature_names = tuple(self.feature_names)
        self.weights = tuple(float(w) for w in self.weights)


@dataclass
class MlpModel:
    feature_names: tuple
    net: Mlp

    def __post_init__(self):
        self.feature_names = tuple(self.feature_names)
        if self.net.sizes[0] != len(self.feature_names):
            raise ValueError("network input size must match feature count")


@dataclass
class PhaseSplitModel:
    early: object
    mid: object
    end: object


def quackle_baseline() -> LinearModel:
    """Move score plus leave value, unit weights."""
    return LinearModel(feature_names=BASELINE_FEATURES, weights=(1.0, 1.0))


def required_features(model) -> frozenset:
    if isinstance(model, PhaseSplitModel):
        return (
            required_features(model.early)
            | required_features(model.mid)
            | required_features(model.end)
        )
    return frozenset(model.feature_names)


def evaluate(model, features: MoveFeatures, tiles_in_bag: int = 0) -> float:
    """Model value of a move's features; higher is better."""
    if isinstance(model, LinearModel):
        value = 0.0
        for name, weight in zip(model.feature_names, model.weights):
            value += weight * getattr(features, name)
        return value
    if isinstance(model, MlpModel):
        return model.net.forward(features.vector(model.feature_names))
    if isinstance(model, PhaseSplitModel):
        if tiles_in_bag >= EARLY_MIN_BAG:
            sub = model.early
        elif tiles_in_bag < END_MAX_BAG:
            sub = model.end
        else:
            sub = model.mid
        return evaluate(sub, features, tiles_in_bag)
    raise TypeError(f"unknown model type {type(model).__name__}")


def model_to_dict(model) -> dict:
    if isinstance(model, LinearModel):
        return {
            "type": "linear",
            "feature_names": list(model.feature_names),
            "weights": list(model.weights),
        }
    if isinstance(model, MlpModel):
        return {
            "type": "mlp",
            "feature_names": list(model.feature_names),
            "net": model.net.to_dict(),
        }
    if isinstance(model, PhaseSplitModel):
        return {
            "type": "phase_split",
            "early": model_to_dict(model.early),
            "mid": model_to_dict(model.mid),
            "end": model_to_dict(model.end),
        }
    raise TypeError(f"unknown model type {type(model).__name__}")


def model_from_dict(data: dict):
    kind = data.get("type")
    if kind == "linear":
        return LinearModel(tuple(data["feature_names"]), tuple(data["weights"]))
    if kind == "mlp":
        return MlpModel(tuple(data["feature_names"]), Mlp.from_dict(data["net"]))
    if kind == "phase_split":
        return PhaseSplitModel(
            early=model_from_dict(data["early"]),
            mid=model_from_dict(data["mid"]),
            end=model_from_dict(data["end"]),
        )
    raise ValueError(f"unknown model type {kind!r}")


# ---------------------------------------------------------------------------
# Ranking
# ---------------------------------------------------------------------------


def rank_scored_moves(
    model,
    state: GameState,
    scored_moves,
    k: int,
    leave_table: LeaveValueTable,
    lexicon: Lexicon,
    playability_samples: int = 0,
    seed: int = 0,
):
    """Rank (move, score) pairs; returns [(move, value, features)] sorted by
    value descending, ties broken by canonical move order, truncated to k."""
    needed = required_features(model)
    tiles_in_bag = state.tiles_in_bag()
    ranked = []
    for move, score in scored_moves:
        features = extract_features(
            state,
            move,
            leave_table,
            lexicon,
            playability_samples=playability_samples,
            seed=seed,
            needed=needed,
            move_score_hint=score,
        )
        ranked.append((move, evaluate(model, features, tiles_in_bag), features))
    ranked.sort(key=lambda item: (-item[1], move_sort_key(item[0])))
    return ranked[: max(0, k)]


def all_scored_moves(state: GameState, lexicon: Lexicon, prefer_fast: bool = True):
    """Every legal move paired with its score (0 for exchanges/pass).

    Uses the compiled enumerator when available; both routes produce the
    identical canonical list (covered by equivalence tests).
    """
    scored = None
    if prefer_fast:
        from .fastgen import fast_scored_placements

        scored = fast_scored_placements(state, lexicon)
    if scored is None:
        scored = list(generate_scored_placements(state, lexicon))
    scored.extend((move, 0) for move in generate_exchanges(state))
    scored.append((PASS, 0))
    return scored


def rank_moves(
    model,
    state: GameState,
    moves,
    k: int,
    leave_table: LeaveValueTable,
    lexicon: Lexicon,
    playability_samples: int = 0,
    seed: int = 0,
):
    """Top-k moves by model value (descending; canonical order on ties)."""
    if not moves:
        raise ValueError("rank_moves requires at least one move")
    scored = [
        (move, score_move(state.board, move, state.config.distribution, state.config.layout))
        for move in moves
    ]
    ranked = rank_scored_moves(
        model, state, scored, k, leave_table, lexicon, playability_samples, seed
    )
    return [move for move, _, _ in ranked]
