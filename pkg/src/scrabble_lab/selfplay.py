"""Seeded matches between player specs, with confidence bounds.

Games are embarrassingly parallel: game i always plays under seed
mix_seed(master_seed, i) and results are aggregated in index order, so
MatchStats are bit-identical for any worker count. Win rates count draws
as half a win, keeping them Bernoulli-like means in [0, 1].
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .config import GameConfig, parse_config
from .evaluation import LeaveValueTable, default_leave_table
from .game import GameState, apply_move, finalize, is_over, new_game
from .lexicon import Lexicon, build_lexicon
from .players import choose_move, spec_from_dict, spec_to_dict
from .seeds import mix_seed

MAX_TURNS = 1000  # hard safety stop; unreachable under the zero-turn rule


@dataclass(frozen=True)
class GameResult:
    seed: int
    scores: tuple  # finalized (first mover, second mover)
    winner: object  # 0, 1, or None for a draw
    move_records: tuple

    def notation_lines(self):
        return [
            f"{rec.player}:{rec.notation}:{rec.score}" for rec in self.move_records
        ]


@dataclass(frozen=True)
class MatchStats:
    n_games: int
    wins: tuple  # (wins for A, wins for B)
    draws: int
    win_rate: float  # for player A, draws counted as half
    hoeffding_half_width: float
    kl_interval: tuple
    delta: float

    def to_dict(self):
        return {
            "n_games": self.n_games,
            "wins_a": self.wins[0],
            "wins_b": self.wins[1],
            "draws": self.draws,
            "win_rate_a": self.win_rate,
            "delta": self.delta,
            "hoeffding_half_width": self.hoeffding_half_width,
            "kl_lower": self.kl_interval[0],
            "kl_upper": self.kl_interval[1],
        }


def play_game(
    spec_a,
    spec_b,
    config: GameConfig,
    seed: int,
    lexicon: Lexicon,
    leave_table: LeaveValueTable | None = None,
) -> GameResult:
    """One full game, spec_a moving first. Deterministic per seed."""
    if leave_table is None:
        leave_table = default_leave_table()
    state = new_game(config, seed, strict=False)
    rngs = (random.Random(mix_seed(seed, 101)), random.Random(mix_seed(seed, 202)))
    specs = (spec_a, spec_b)
    turns = 0
    while not is_over(state) and turns < MAX_TURNS:
        mover = state.turn
        move = choose_move(specs[mover], state, lexicon, rngs[mover], leave_table)
        state = apply_move(state, move, lexicon, trusted=True)
        turns += 1
    state = finalize(state)
    s0, s1 = state.scores
    winner = None if s0 == s1 else (0 if s0 > s1 else 1)
    return GameResult(seed=seed, scores=(s0, s1), winner=winner, move_records=state.move_log)


# -- worker plumbing for run_match ------------------------------------------

_WORKER = {}


def _worker_init(spec_a_data, spec_b_data, config_data, words, leave_data):
    _WORKER["spec_a"] = spec_from_dict(spec_a_data)
    _WORKER["spec_b"] = spec_from_dict(spec_b_data)
    _WORKER["config"] = parse_config(config_data)
    _WORKER["lexicon"] = build_lexicon(words)
    _WORKER["leave_table"] = LeaveValueTable.from_dict(leave_data)


def _worker_play(task):
    index, seed, a_first = task
    first = _WORKER["spec_a"] if a_first else _WORKER["spec_b"]
    second = _WORKER["spec_b"] if a_first else _WORKER["spec_a"]
    result = play_game(
        first, second, _WORKER["config"], seed, _WORKER["lexicon"], _WORKER["leave_table"]
    )
    return index, result


def run_match(
    spec_a,
    spec_b,
    n: int,
    delta: float = 0.001,
    master_seed: int = 0,
    workers: int = 1,
    seat_swap: bool = False,
    *,
    lexicon: Lexicon,
    config: GameConfig,
    leave_table: LeaveValueTable | None = None,
    collect_results: bool = False,
):
    """Play n seeded games and aggregate win counts with confidence bounds.

    With seat_swap, games are scheduled in mirrored pairs sharing a seed
    (game 2k: A first, game 2k+1: B first), which removes first-move bias
    from pooled rates. Returns MatchStats, or (MatchStats, results) when
    collect_results is set.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if leave_table is None:
        leave_table = default_leave_table()

    tasks = []
    for i in range(n):
        if seat_swap:
            tasks.append((i, mix_seed(master_seed, i // 2), i % 2 == 0))
        else:
            tasks.append((i, mix_seed(master_seed, i), True))

    results: list = [None] * n
    if workers <= 1:
        specs = {True: (spec_a, spec_b), False: (spec_b, spec_a)}
        for index, seed, a_first in tasks:
            first, second = specs[a_first]
            results[index] = play_game(first, second, config, seed, lexicon, leave_table)
    else:
        payload = (
            spec_to_dict(spec_a),
            spec_to_dict(spec_b),
            config.to_dict(),
            tuple(lexicon.iter_words()),
            leave_table.to_dict(),
        )
        with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init, initargs=payload) as pool:
            for index, result in pool.map(_worker_play, tasks, chunksize=8):
                results[index] = result

    wins_a = wins_b = draws = 0
    for (index, _, a_first), result in zip(tasks, results):
        if result.winner is None:
            draws += 1
        else:
            a_won = (result.winner == 0) == a_first
            if a_won:
                wins_a += 1
            else:
                wins_b += 1
    win_rate = (wins_a + 0.5 * draws) / n
    stats = MatchStats(
        n_games=n,
        wins=(wins_a, wins_b),
        draws=draws,
        win_rate=win_rate,
        hoeffding_half_width=hoeffding_half_width(delta, n),
        kl_interval=kl_confidence_interval(win_rate, delta, n),
        delta=delta,
    )
    if collect_results:
        return stats, results
    return stats


# ---------------------------------------------------------------------------
# Confidence bounds
# ---------------------------------------------------------------------------


def hoeffding_half_width(delta: float, n: int) -> float:
    """Half-width of the two-sided Hoeffding interval for a Bernoulli mean:
    sqrt(ln(2/delta) / (2n))."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def bernoulli_kl(p: float, q: float) -> float:
    """KL(Bernoulli(p) || Bernoulli(q)), with the usual 0 ln 0 = 0 limits."""
    if not 0.0 <= p <= 1.0 or not 0.0 <= q <= 1.0:
        raise ValueError("p and q must be in [0, 1]")
    if p == q:
        return 0.0
    if q in (0.0, 1.0):
        return math.inf
    total = 0.0
    if p > 0.0:
        total += p * math.log(p / q)
    if p < 1.0:
        total += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return total


_BISECT_STEPS = 200  # converges to adjacent floats long before this


def kl_confidence_interval(p_hat: float, delta: float, n: int):
    """Interval around an empirical Bernoulli mean from the divergence bound
    n * KL(p_hat, q) <= ln(1/delta), one side at a time.

    The upper endpoint is the largest q in [p_hat, 1] satisfying the bound
    and the lower endpoint the smallest q in [0, p_hat]; each is found by
    bisection (the divergence is monotone on each side).
    """
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError("p_hat must be in [0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    target = math.log(1.0 / delta) / n

    if bernoulli_kl(p_hat, 1.0) <= target:
        hi = 1.0
    else:
        lo_b, hi_b = p_hat, 1.0
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo_b + hi_b)
            if bernoulli_kl(p_hat, mid) <= target:
                lo_b = mid
            else:
                hi_b = mid
        hi = lo_b

    if bernoulli_kl(p_hat, 0.0) <= target:
        lo = 0.0
    else:
        lo_b, hi_b = 0.0, p_hat
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo_b + hi_b)
            if bernoulli_kl(p_hat, mid) <= target:
                hi_b = mid
            else:
                lo_b = mid
        lo = hi_b

    return (lo, hi)
