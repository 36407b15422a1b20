"""Objective functions over candidate evaluation models.

Three ways to judge a model: self-play win rate against a fixed opponent
(the ground truth, but noisy and slow), agreement with a simulation
player's ranked move lists (cheap, needs a dataset), and summed final
score differences (a denser but more biased signal than wins).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .board import Board
from .config import GameConfig
from .evaluation import LeaveValueTable, default_leave_table, rank_scored_moves
from .game import GameState
from .lexicon import Lexicon
from .players import SpeedySpec
from .selfplay import run_match


@dataclass
class FTrueSpec:
    opponent: object
    n_games: int = 1000
    delta: float = 0.001

    def __post_init__(self):
        if self.n_games < 1:
            raise ValueError("n_games must be >= 1")


@dataclass
class FSimSpec:
    dataset: list
    top_k: int = 10


@dataclass
class FScoreSpec:
    opponent: object
    n_games: int = 1000

    def __post_init__(self):
        if self.n_games < 1:
            raise ValueError("n_games must be >= 1")


def f_true(
    candidate,
    spec: FTrueSpec,
    master_seed: int,
    *,
    lexicon: Lexicon,
    config: GameConfig,
    leave_table: LeaveValueTable | None = None,
    workers: int = 1,
):
    """Win rate of a Speedy player using `candidate` against the fixed
    opponent, over seat-alternated games (even game index: candidate
    first). Returns (win_rate, MatchStats)."""
    stats = run_match(
        SpeedySpec(model=candidate),
        spec.opponent,
        spec.n_games,
        delta=spec.delta,
        master_seed=master_seed,
        workers=workers,
        seat_swap=True,
        lexicon=lexicon,
        config=config,
        leave_table=leave_table,
    )
    return stats.win_rate, stats


def _rebuild_state(position, config: GameConfig) -> GameState:
    """A playable stand-in for a stored position: same board, rack, and
    bag size (bag contents only gate exchange legality)."""
    board = Board.from_rows(position.board_rows)
    racks = ["", ""]
    racks[position.turn] = position.rack
    return GameState(
        config=config,
        board=board,
        racks=tuple(racks),
        scores=tuple(position.scores),
        bag=("A",) * position.bag_count,
        rng_state=random.Random(0).getstate(),
        turn=position.turn,
    )


def best_move_rank(
    candidate,
    position,
    top_k: int,
    *,
    lexicon: Lexicon,
    config: GameConfig,
    leave_table: LeaveValueTable,
) -> int:
    """1-based rank of the stored best move within the candidate's own
    top-k list over all legal moves at the position; 0 when absent."""
    from .evaluation import all_scored_moves

    state = _rebuild_state(position, config)
    scored = all_scored_moves(state, lexicon)
    ranked = rank_scored_moves(candidate, state, scored, top_k, leave_table, lexicon)
    target = position.moves[0].move
    for index, (move, _, _) in enumerate(ranked):
        if move == target:
            return index + 1
    return 0


def sim_score_from_ranks(ranks) -> float:
    """Sum of 1/rank with absent moves (rank 0) scoring nothing."""
    return float(sum(1.0 / r for r in ranks if r > 0))


def f_sim(
    candidate,
    dataset,
    top_k: int = 10,
    *,
    lexicon: Lexicon,
    config: GameConfig,
    leave_table: LeaveValueTable | None = None,
):
    """Agreement with the simulation player: for each position, 1/k where
    k is the rank of the simulation player's best move in the candidate's
    top-k list (0 if missing). Returns (total, mean, ranks)."""
    if not dataset:
        raise ValueError("dataset must be nonempty")
    if leave_table is None:
        leave_table = default_leave_table()
    ranks = [
        best_move_rank(
            candidate, position, top_k,
            lexicon=lexicon, config=config, leave_table=leave_table,
        )
        for position in dataset
    ]
    total = sim_score_from_ranks(ranks)
    return total, total / len(dataset), ranks


def f_score(
    candidate,
    spec: FScoreSpec,
    master_seed: int,
    *,
    lexicon: Lexicon,
    config: GameConfig,
    leave_table: LeaveValueTable | None = None,
    workers: int = 1,
):
    """Sum over seat-alternated games of the candidate's final score minus
    the opponent's. Returns (total, mean, MatchStats-like results)."""
    stats, results = run_match(
        SpeedySpec(model=candidate),
        spec.opponent,
        spec.n_games,
        master_seed=master_seed,
        workers=workers,
        seat_swap=True,
        lexicon=lexicon,
        config=config,
        leave_table=leave_table,
        collect_results=True,
    )
    total = 0
    for index, result in enumerate(results):
        candidate_seat = 0 if index % 2 == 0 else 1
        total += result.scores[candidate_seat] - result.scores[1 - candidate_seat]
    return float(total), total / spec.n_games, stats
