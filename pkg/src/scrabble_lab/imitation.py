"""Imitating the simulation player's move ranking with a static scorer.

The dataset pairs self-play positions with the candidate list a
simulation (Championship) player produces, best move first. A small MLP
is trained on the pairwise logistic loss - for each position, the top
move is pushed above every other listed move - and scorers are compared
by pairwise accuracy against the same lists.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .board import Board
from .config import GameConfig, parse_config
from .evaluation import (
    LeaveValueTable,
    MOVE_FEATURE_NAMES,
    MoveFeatures,
    all_scored_moves,
    default_leave_table,
    rank_scored_moves,
)
from .game import GameState, apply_move, is_over, new_game
from .lexicon import Lexicon, build_lexicon
from .moves import format_move, parse_move
from .nnet import Mlp
from .players import championship_ranking, choose_move, spec_from_dict, spec_to_dict
from .seeds import mix_seed

MAX_LIST = 10
TRAIN_FRACTION = 0.97


@dataclass
class RankedMove:
    move: object
    features: MoveFeatures
    input2: tuple  # (move score, leave value)

    def to_dict(self):
        return {
            "move": format_move(self.move),
            "input2": [float(self.input2[0]), float(self.input2[1])],
            "features": self.features.to_dict(),
        }

    @staticmethod
    def from_dict(data):
        return RankedMove(
            move=parse_move(data["move"]),
            features=MoveFeatures.from_dict(data["features"]),
            input2=(float(data["input2"][0]), float(data["input2"][1])),
        )


@dataclass
class RankedPosition:
    board_rows: tuple
    rack: str
    bag_count: int
    scores: tuple
    turn: int
    moves: list  # RankedMove, best first, length 1..10

    def key(self):
        return ("".join(self.board_rows), self.rack, self.turn)

    def to_dict(self):
        return {
            "board": list(self.board_rows),
            "rack": self.rack,
            "bag_count": self.bag_count,
            "scores": list(self.scores),
            "turn": self.turn,
            "moves": [m.to_dict() for m in self.moves],
        }

    @staticmethod
    def from_dict(data):
        return RankedPosition(
            board_rows=tuple(data["board"]),
            rack=data["rack"],
            bag_count=int(data["bag_count"]),
            scores=tuple(data["scores"]),
            turn=int(data["turn"]),
            moves=[RankedMove.from_dict(m) for m in data["moves"]],
        )


def write_positions_jsonl(records, path: str) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
            count += 1
    return count


def read_positions_jsonl(path: str):
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(RankedPosition.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad dataset record ({exc})") from exc
    return records


# ---------------------------------------------------------------------------
# Dataset generation
# ---------------------------------------------------------------------------


def _label_position(state: GameState, championship_spec, lexicon, leave_table, rng):
    ranking = championship_ranking(championship_spec, state, lexicon, rng, leave_table)
    moves = []
    for move, _, feats in ranking[:MAX_LIST]:
        moves.append(
            RankedMove(
                move=move,
                features=feats,
                input2=(feats.move_score, feats.leave_value),
            )
        )
    return RankedPosition(
        board_rows=tuple(state.board.rows()),
        rack=state.rack(),
        bag_count=state.tiles_in_bag(),
        scores=state.scores,
        turn=state.turn,
        moves=moves,
    )


def _game_positions(game_seed, championship_spec, sampler_spec, lexicon, config,
                    leave_table, inclusion_prob, skip_final_turns):
    """Sampled, labeled positions from one self-play game (deterministic)."""
    include_rng = random.Random(mix_seed(game_seed, 7))
    label_rng = random.Random(mix_seed(game_seed, 13))
    state = new_game(config, game_seed, strict=False)
    rngs = (random.Random(mix_seed(game_seed, 101)), random.Random(mix_seed(game_seed, 202)))
    snapshots = []
    turns = 0
    while not is_over(state) and turns < 500:
        include = include_rng.random() < inclusion_prob
        snapshots.append((state, include))
        move = choose_move(sampler_spec, state, lexicon, rngs[state.turn], leave_table)
        state = apply_move(state, move, lexicon, trusted=True)
        turns += 1
    if skip_final_turns:
        snapshots = snapshots[: max(0, len(snapshots) - skip_final_turns)]
    labeled = []
    for snap, include in snapshots:
        if include:
            labeled.append(_label_position(snap, championship_spec, lexicon, leave_table, label_rng))
    return labeled


_GEN_WORKER = {}


def _gen_worker_init(champ_data, sampler_data, config_data, words, leave_data, options):
    _GEN_WORKER["champ"] = spec_from_dict(champ_data)
    _GEN_WORKER["sampler"] = spec_from_dict(sampler_data)
    _GEN_WORKER["config"] = parse_config(config_data)
    _GEN_WORKER["lexicon"] = build_lexicon(words)
    _GEN_WORKER["leave"] = LeaveValueTable.from_dict(leave_data)
    _GEN_WORKER["options"] = options


def _gen_worker_run(game_seed):
    opts = _GEN_WORKER["options"]
    return _game_positions(
        game_seed,
        _GEN_WORKER["champ"],
        _GEN_WORKER["sampler"],
        _GEN_WORKER["lexicon"],
        _GEN_WORKER["config"],
        _GEN_WORKER["leave"],
        opts["inclusion_prob"],
        opts["skip_final_turns"],
    )


def generate_dataset(
    n_positions: int,
    championship_spec,
    sampler_spec,
    seed: int,
    *,
    lexicon: Lexicon,
    config: GameConfig,
    leave_table: LeaveValueTable | None = None,
    inclusion_prob: float = 0.25,
    skip_final_turns: int = 2,
    workers: int = 1,
    max_games: int | None = None,
):
    """Collect n labeled positions from sampler-vs-sampler self-play.

    Each game turn enters the dataset with probability `inclusion_prob`
    (the last `skip_final_turns` turns are never used, which keeps
    degenerate end positions out). Duplicates (same board, rack, and
    mover) are dropped. Deterministic per seed and worker count.
    """
    if n_positions < 1:
        raise ValueError("n_positions must be >= 1")
    if leave_table is None:
        leave_table = default_leave_table()
    if max_games is None:
        max_games = max(50, n_positions * 4)

    records = []
    seen = set()

    def absorb(batch) -> bool:
        for record in batch:
            if not record.moves:
                continue
            key = record.key()
            if key in seen:
                continue
            seen.add(key)
            records.append(record)
            if len(records) >= n_positions:
                return True
        return False

    if workers <= 1:
        for game_index in range(max_games):
            batch = _game_positions(
                mix_seed(seed, game_index), championship_spec, sampler_spec,
                lexicon, config, leave_table, inclusion_prob, skip_final_turns,
            )
            if absorb(batch):
                return records
    else:
        payload = (
            spec_to_dict(championship_spec),
            spec_to_dict(sampler_spec),
            config.to_dict(),
            tuple(lexicon.iter_words()),
            leave_table.to_dict(),
            {"inclusion_prob": inclusion_prob, "skip_final_turns": skip_final_turns},
        )
        seeds = [mix_seed(seed, i) for i in range(max_games)]
        with ProcessPoolExecutor(max_workers=workers, initializer=_gen_worker_init,
                                 initargs=payload) as pool:
            for batch in pool.map(_gen_worker_run, seeds, chunksize=1):
                if absorb(batch):
                    pool.shutdown(cancel_futures=True)
                    return records
    raise RuntimeError(
        f"collected only {len(records)}/{n_positions} positions from {max_games} games"
    )


def split_dataset(records, seed: int):
    """Uniform random 97:3 train/validation split, deterministic per seed."""
    records = list(records)
    if len(records) < 2:
        raise ValueError("need at least two records to split")
    indices = list(range(len(records)))
    random.Random(seed).shuffle(indices)
    val_count = max(1, round(len(records) * (1.0 - TRAIN_FRACTION)))
    val_idx = set(indices[:val_count])
    train = [records[i] for i in range(len(records)) if i not in val_idx]
    val = [records[i] for i in range(len(records)) if i in val_idx]
    return train, val


# ---------------------------------------------------------------------------
# RankNet loss / training
# ---------------------------------------------------------------------------


def _softplus(x):
    return np.log1p(np.exp(-np.abs(x))) + np.maximum(x, 0.0)


def ranknet_loss_from_scores(scores) -> float:
    """Sum over non-best moves of -ln sigmoid(s_best - s_other)."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size < 2:
        return 0.0
    diffs = scores[0] - scores[1:]
    return float(np.sum(_softplus(-diffs)))


def ranknet_loss(scorer, position: RankedPosition) -> float:
    """Pairwise logistic loss of a scorer on one ranked position."""
    scores = [scorer(move) for move in position.moves]
    return ranknet_loss_from_scores(scores)


@dataclass
class RanknetMlp:
    feature_names: tuple
    net: Mlp

    def score_features(self, features: MoveFeatures) -> float:
        return self.net.forward(features.vector(self.feature_names))

    def scorer(self):
        return lambda move: self.score_features(move.features)

    def to_dict(self):
        return {"feature_names": list(self.feature_names), "net": self.net.to_dict()}

    @staticmethod
    def from_dict(data):
        return RanknetMlp(tuple(data["feature_names"]), Mlp.from_dict(data["net"]))


def _position_matrix(position: RankedPosition, feature_names):
    return np.array(
        [move.features.vector(feature_names) for move in position.moves],
        dtype=np.float64,
    )


def position_loss_and_grads(net: Mlp, matrix: np.ndarray):
    """Loss and parameter gradients of the pairwise loss on one position.

    The gradient flows through every move's score: the best move gets the
    summed negative sigmoid complements, each other move its own.
    """
    scores, cache = net.forward_cached(matrix)
    diffs = scores[0] - scores[1:]
    loss = float(np.sum(_softplus(-diffs)))
    sig = 1.0 / (1.0 + np.exp(-diffs))
    dscores = np.empty_like(scores)
    dscores[0] = np.sum(sig - 1.0)
    dscores[1:] = 1.0 - sig
    dws, dbs = net.backward(cache, dscores)
    return loss, dws, dbs


def train_ranknet_mlp(train, val, arch=None, hyper=None):
    """Momentum-SGD training of the pairwise ranker.

    arch: {"feature_names": ..., "hidden": [16], "activation": "tanh"}
    hyper: {"lr": 0.01, "momentum": 0.9, "batch_size": 8, "epochs": 30,
            "seed": 0}
    Returns (RanknetMlp, curves) where curves maps metric name to a
    per-epoch list. Aborts with epoch context if the loss diverges.
    """
    arch = dict(arch or {})
    hyper = dict(hyper or {})
    feature_names = tuple(arch.get("feature_names", MOVE_FEATURE_NAMES))
    hidden = list(arch.get("hidden", [16]))
    if not 1 <= len(hidden) <= 2:
        raise ValueError("need one or two hidden layers")
    activation = arch.get("activation", "tanh")
    lr = float(hyper.get("lr", 0.01))
    momentum = float(hyper.get("momentum", 0.9))
    batch_size = int(hyper.get("batch_size", 8))
    epochs = int(hyper.get("epochs", 30))
    seed = int(hyper.get("seed", 0))

    train_mats = [_position_matrix(p, feature_names) for p in train if len(p.moves) >= 2]
    val_mats = [_position_matrix(p, feature_names) for p in val if len(p.moves) >= 2]
    if not train_mats:
        raise ValueError("no trainable positions (all have fewer than two moves)")

    net = Mlp([len(feature_names)] + hidden + [1], activation=activation, seed=seed)
    vel_w = [np.zeros_like(w) for w in net.weights]
    vel_b = [np.zeros_like(b) for b in net.biases]
    rng = np.random.default_rng(seed)

    def split_metrics(mats):
        if not mats:
            return float("nan"), float("nan")
        total = 0.0
        correct = 0
        pairs = 0
        for matrix in mats:
            scores = net.forward(matrix)
            total += ranknet_loss_from_scores(scores)
            correct += int(np.sum(scores[0] > scores[1:]))
            pairs += scores.size - 1
        return total / len(mats), correct / pairs

    curves = {"train_loss": [], "val_loss": [], "train_acc": [], "val_acc": []}
    for epoch in range(epochs):
        order = rng.permutation(len(train_mats))
        for start in range(0, len(order), batch_size):
            batch = order[start : start + batch_size]
            grads_w = [np.zeros_like(w) for w in net.weights]
            grads_b = [np.zeros_like(b) for b in net.biases]
            batch_loss = 0.0
            for index in batch:
                loss, dws, dbs = position_loss_and_grads(net, train_mats[index])
                batch_loss += loss
                for g, d in zip(grads_w, dws):
                    g += d
                for g, d in zip(grads_b, dbs):
                    g += d
            if not np.isfinite(batch_loss):
                raise RuntimeError(f"training diverged (non-finite loss) at epoch {epoch}")
            scale = 1.0 / len(batch)
            for w, v, g in zip(net.weights, vel_w, grads_w):
                v *= momentum
                v -= lr * scale * g
                w += v
            for b, v, g in zip(net.biases, vel_b, grads_b):
                v *= momentum
                v -= lr * scale * g
                b += v
        train_loss, train_acc = split_metrics(train_mats)
        val_loss, val_acc = split_metrics(val_mats)
        if not np.isfinite(train_loss):
            raise RuntimeError(f"training diverged (non-finite loss) at epoch {epoch}")
        curves["train_loss"].append(train_loss)
        curves["val_loss"].append(val_loss)
        curves["train_acc"].append(train_acc)
        curves["val_acc"].append(val_acc)
    return RanknetMlp(feature_names=feature_names, net=net), curves


# ---------------------------------------------------------------------------
# Scorers and evaluation
# ---------------------------------------------------------------------------


def baseline_scorer(move: RankedMove) -> float:
    """Score-plus-leave baseline read straight from the stored inputs."""
    return float(move.input2[0]) + float(move.input2[1])


def model_scorer(model, feature_names=None):
    from .evaluation import evaluate

    def score(move: RankedMove) -> float:
        return evaluate(model, move.features, tiles_in_bag=0)

    return score


def pairwise_accuracy(scorer, records) -> float:
    """Fraction of (best, other) pairs the scorer orders correctly; ties
    count as wrong."""
    correct = 0
    pairs = 0
    for position in records:
        if len(position.moves) < 2:
            continue
        scores = [scorer(move) for move in position.moves]
        best = scores[0]
        for other in scores[1:]:
            pairs += 1
            if best > other:
                correct += 1
    if pairs == 0:
        return 0.0
    return correct / pairs


# ---------------------------------------------------------------------------
# Bridge to the binary tensor format
# ---------------------------------------------------------------------------


def position_tensor_record(position: RankedPosition, config: GameConfig):
    """(base_tensor, [(after_tensor, input2), ...]) for the binary export."""
    from .encoding import encode_board
    from .evaluation import board_after_move

    board = Board.from_rows(position.board_rows)
    base = encode_board(board, config.layout, config.distribution)
    moves = []
    for ranked in position.moves:
        after_board = board_after_move(board, ranked.move)
        if after_board is board:
            after = base
        else:
            after = encode_board(after_board, config.layout, config.distribution)
        input2 = np.array([ranked.input2[0], ranked.input2[1]], dtype=np.float32)
        moves.append((after, input2))
    return base, moves


def export_tensor_dataset(records, path: str, config: GameConfig) -> int:
    """Encode a ranked-position dataset into the binary tensor format."""
    from .encoding import write_tensor_dataset

    return write_tensor_dataset(
        (position_tensor_record(p, config) for p in records), path
    )
