"""Decision policies over the move generator.

Speedy plays the static-evaluation argmax. Championship re-ranks the static
top candidates by truncated Monte-Carlo rollouts: the opponent rack is
resampled from unseen tiles, both sides then play greedily for a fixed
number of plies, and the candidate with the best mean outcome is chosen.
Rollout index i uses the same substream for every candidate (common random
numbers), which sharpens the comparison without extra games.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .evaluation import (
    LeaveValueTable,
    all_scored_moves,
    default_leave_table,
    evaluate,
    leave_value,
    model_from_dict,
    model_to_dict,
    quackle_baseline,
    rank_scored_moves,
)
from .fastgen import best_static_move, fast_linear_params
from .game import GameState, apply_move, finalize, is_over
from .lexicon import Lexicon
from .moves import PASS
from .seeds import mix_seed


@dataclass
class SpeedySpec:
    model: object
    playability_samples: int = 0


@dataclass
class ChampionshipSpec:
    model: object
    candidates: int = 10
    plies: int = 2
    rollouts_per_candidate: int | None = 50
    time_budget_ms: int | None = None
    leave_weight: float = 1.0
    playability_samples: int = 0

    def __post_init__(self):
        if self.candidates < 1:
            raise ValueError("candidates must be >= 1")
        if self.plies < 1:
            raise ValueError("plies must be >= 1")
        if (self.rollouts_per_candidate is None) == (self.time_budget_ms is None):
            raise ValueError("exactly one of rollouts/time budget must be set")


@dataclass
class RandomSpec:
    pass


@dataclass
class PassSpec:
    """Always passes; useful as a floor baseline in tests and sanity runs."""


def _speedy_best(model, state, lexicon, leave_table, playability_samples, seed=0):
    params = fast_linear_params(model, leave_table, playability_samples)
    if params is not None:
        return best_static_move(state, lexicon, params[0], params[1])
    scored = all_scored_moves(state, lexicon)
    ranked = rank_scored_moves(
        model, state, scored, 1, leave_table, lexicon, playability_samples, seed
    )
    return ranked[0][0]


def _leave_after_move(rack: str, move, board) -> str:
    from .game import rack_remove
    from .moves import Exchange, Place

    if isinstance(move, Place):
        return rack_remove(rack, move.tiles_needed(board))
    if isinstance(move, Exchange):
        return rack_remove(rack, move.tiles)
    return rack


def rollout_value(
    state: GameState,
    candidate,
    plies: int,
    model,
    rng: random.Random,
    lexicon: Lexicon,
    leave_table: LeaveValueTable,
    leave_weight: float = 1.0,
    playability_samples: int = 0,
    candidate_score=None,
) -> float:
    """One simulated continuation of `candidate` from the mover's view.

    The opponent's hidden rack is replaced by a uniform draw from the
    unseen pool (bag plus opponent rack); both sides then play greedy
    static moves for `plies` plies. The value is the score spread plus a
    weighted static value of the leave of the mover's last simulated move,
    or the finalized spread if the game ends inside the rollout.
    """
    mover = state.turn
    opp = 1 - mover
    pool = list(state.bag) + list(state.racks[opp])
    k = len(state.racks[opp])
    idxs = rng.sample(range(len(pool)), k) if k else []
    chosen = set(idxs)
    sampled = "".join(sorted(pool[i] for i in idxs))
    sim_bag = tuple(pool[i] for i in range(len(pool)) if i not in chosen)
    racks = list(state.racks)
    racks[opp] = sampled
    sim_rng = random.Random(rng.getrandbits(64))
    sim = GameState(
        config=state.config,
        board=state.board,
        racks=tuple(racks),
        scores=state.scores,
        bag=sim_bag,
        rng_state=sim_rng.getstate(),
        turn=mover,
        zero_turns=state.zero_turns,
    )
    params = fast_linear_params(model, leave_table, playability_samples)
    mover_leave = _leave_after_move(state.racks[mover], candidate, state.board)
    sim = apply_move(
        sim, candidate, lexicon, trusted=True,
        score_hint=candidate_score, log_moves=False,
    )
    for _ in range(plies):
        if is_over(sim):
            break
        if params is not None:
            move, score = best_static_move(sim, lexicon, params[0], params[1], with_score=True)
        else:
            move = _speedy_best(model, sim, lexicon, leave_table, playability_samples)
            score = None
        if sim.turn == mover:
            mover_leave = _leave_after_move(sim.rack(), move, sim.board)
        sim = apply_move(sim, move, lexicon, trusted=True, score_hint=score, log_moves=False)
    if is_over(sim):
        final = finalize(sim)
        return float(final.scores[mover] - final.scores[opp])
    spread = sim.scores[mover] - sim.scores[opp]
    return spread + leave_weight * leave_value(mover_leave, leave_table)


def choose_move(
    spec,
    state: GameState,
    lexicon: Lexicon,
    rng: random.Random,
    leave_table: LeaveValueTable | None = None,
):
    """Pick a move for the player described by `spec`. Deterministic given
    (spec, state, rng stream position)."""
    if leave_table is None:
        leave_table = default_leave_table()

    if isinstance(spec, PassSpec):
        return PASS

    if isinstance(spec, RandomSpec):
        from .movegen import generate_moves

        moves = generate_moves(state, lexicon)
        return moves[rng.randrange(len(moves))]

    if isinstance(spec, SpeedySpec):
        return _speedy_best(
            spec.model, state, lexicon, leave_table, spec.playability_samples
        )

    if isinstance(spec, ChampionshipSpec):
        return championship_ranking(spec, state, lexicon, rng, leave_table)[0][0]

    raise TypeError(f"unknown player spec {type(spec).__name__}")


def championship_ranking(
    spec: ChampionshipSpec,
    state: GameState,
    lexicon: Lexicon,
    rng: random.Random,
    leave_table: LeaveValueTable | None = None,
):
    """The static top candidates reordered by mean rollout value.

    Returns [(move, rollout_mean, features)] best first; ties keep the
    higher static rank. With zero rollouts (or a single candidate) the
    static order stands and the static value doubles as the mean.
    """
    if leave_table is None:
        leave_table = default_leave_table()
    scored = all_scored_moves(state, lexicon)
    ranked = rank_scored_moves(
        spec.model,
        state,
        scored,
        spec.candidates,
        leave_table,
        lexicon,
        spec.playability_samples,
    )
    rollouts = spec.rollouts_per_candidate
    if len(ranked) == 1 or rollouts == 0:
        return [(move, value, feats) for move, value, feats in ranked]
    decision_seed = rng.getrandbits(64)

    def run_rollout(move, rollout_index, move_score):
        # same substream per rollout index for every candidate (common
        # random numbers), so candidates face the same opponent draws
        sub = random.Random(mix_seed(decision_seed, rollout_index))
        return rollout_value(
            state,
            move,
            spec.plies,
            spec.model,
            sub,
            lexicon,
            leave_table,
            spec.leave_weight,
            spec.playability_samples,
            candidate_score=move_score,
        )

    scores = [int(feats.move_score) for _, _, feats in ranked]
    totals = [0.0] * len(ranked)
    counts = [0] * len(ranked)
    if rollouts is not None:
        for rollout_index in range(rollouts):
            for ci, (move, _, _) in enumerate(ranked):
                totals[ci] += run_rollout(move, rollout_index, scores[ci])
                counts[ci] += 1
    else:
        deadline = time.monotonic() + spec.time_budget_ms / 1000.0
        rollout_index = 0
        while True:
            for ci, (move, _, _) in enumerate(ranked):
                totals[ci] += run_rollout(move, rollout_index, scores[ci])
                counts[ci] += 1
            rollout_index += 1
            if time.monotonic() >= deadline:
                break
    means = [totals[ci] / counts[ci] for ci in range(len(ranked))]
    # stable sort by descending mean keeps static order among exact ties
    order = sorted(range(len(ranked)), key=lambda ci: -means[ci])
    return [(ranked[ci][0], means[ci], ranked[ci][2]) for ci in order]


# ---------------------------------------------------------------------------
# Spec serialization (player spec files for the CLI)
# ---------------------------------------------------------------------------


def spec_to_dict(spec) -> dict:
    if isinstance(spec, RandomSpec):
        return {"type": "random"}
    if isinstance(spec, PassSpec):
        return {"type": "pass_only"}
    if isinstance(spec, SpeedySpec):
        return {
            "type": "speedy",
            "model": model_to_dict(spec.model),
            "playability_samples": spec.playability_samples,
        }
    if isinstance(spec, ChampionshipSpec):
        return {
            "type": "championship",
            "model": model_to_dict(spec.model),
            "candidates": spec.candidates,
            "plies": spec.plies,
            "rollouts": spec.rollouts_per_candidate,
            "time_budget_ms": spec.time_budget_ms,
            "leave_weight": spec.leave_weight,
            "playability_samples": spec.playability_samples,
        }
    raise TypeError(f"unknown player spec {type(spec).__name__}")


def _model_from_field(value):
    if value == "baseline" or value is None:
        return quackle_baseline()
    return model_from_dict(value)


def spec_from_dict(data: dict):
    kind = data.get("type")
    if kind == "random":
        return RandomSpec()
    if kind == "pass_only":
        return PassSpec()
    if kind == "speedy":
        return SpeedySpec(
            model=_model_from_field(data.get("model")),
            playability_samples=int(data.get("playability_samples", 0)),
        )
    if kind == "championship":
        rollouts = data.get("rollouts", 50)
        time_budget = data.get("time_budget_ms")
        if time_budget is not None:
            rollouts = None
        return ChampionshipSpec(
            model=_model_from_field(data.get("model")),
            candidates=int(data.get("candidates", 10)),
            plies=int(data.get("plies", 2)),
            rollouts_per_candidate=rollouts,
            time_budget_ms=time_budget,
            leave_weight=float(data.get("leave_weight", 1.0)),
            playability_samples=int(data.get("playability_samples", 0)),
        )
    raise ValueError(f"unknown player spec type {kind!r}")
