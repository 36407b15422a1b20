"""Raw board tensors and the binary dataset format for CNN training.

A board becomes a 15x15x28 float array: channel 0 flags empty squares,
channels 1-26 one-hot the letter on occupied squares (blanks included,
under their designated letter), and channel 27 carries the point value of
the placed tile - zero for blanks and plain empty squares, -1 for empty
premium squares.

A move is encoded as the concatenation of the before/after board tensors
(15x15x56) plus the two baseline evaluator inputs (move score, leave
value). The on-disk dataset is a little-endian binary stream:

    magic "SBT1" | u32 version=1 | u32 n_positions
    per position: f32[6300] base tensor (row, col, channel order)
                  u32 n_moves (1..10, best first)
    per move:     f32[6300] after-move tensor | f32[2] (score, leave value)
"""

from __future__ import annotations

import struct

import numpy as np

from .board import Board, EMPTY
from .config import BOARD_SIZE, GameConfig
from .evaluation import LeaveValueTable, board_after_move, leave_value
from .game import GameState
from .moves import Place

MAGIC = b"SBT1"
VERSION = 1
CHANNELS = 28
TENSOR_SHAPE = (BOARD_SIZE, BOARD_SIZE, CHANNELS)
TENSOR_FLOATS = BOARD_SIZE * BOARD_SIZE * CHANNELS


def encode_board(board: Board, layout, distribution) -> np.ndarray:
    """15x15x28 float32 tensor of the position (see module docstring)."""
    tensor = np.zeros(TENSOR_SHAPE, dtype=np.float32)
    for r in range(BOARD_SIZE):
        for c in range(BOARD_SIZE):
            ch = board.at(r, c)
            if ch == EMPTY:
                tensor[r, c, 0] = 1.0
                if layout.at(r, c):
                    tensor[r, c, 27] = -1.0
            else:
                letter = ch.upper()
                tensor[r, c, ord(letter) - 64] = 1.0
                if not ch.islower():
                    tensor[r, c, 27] = float(distribution.value(letter))
    return tensor


def encode_move_pairinput(
    state: GameState,
    move,
    leave_table: LeaveValueTable,
    move_score: float,
    base_tensor: np.ndarray | None = None,
):
    """(input1, input2) for a move: input1 stacks the before and after
    board tensors along channels (15x15x56); input2 is (move score, value
    of the rack leave). Pass/exchange leave the board half unchanged."""
    layout = state.config.layout
    distribution = state.config.distribution
    if base_tensor is None:
        base_tensor = encode_board(state.board, layout, distribution)
    after_board = board_after_move(state.board, move)
    if after_board is state.board:
        after_tensor = base_tensor
    else:
        after_tensor = encode_board(after_board, layout, distribution)
    input1 = np.concatenate([base_tensor, after_tensor], axis=2)
    from .evaluation import _leave_after  # shared leave computation

    leave = _leave_after(state, move)
    input2 = np.array([float(move_score), leave_value(leave, leave_table)], dtype=np.float32)
    return input1, input2


def write_tensor_dataset(records, path: str) -> int:
    """Write encoded positions to `path`; returns the number of positions.

    `records` yields (base_tensor, [(after_tensor, input2), ...]) tuples in
    ranked order (best move first). The writer streams and patches the
    position count into the header at the end, so datasets larger than
    memory are fine.
    """
    count = 0
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, 0))
        for base, moves in records:
            if not 1 <= len(moves) <= 10:
                raise ValueError(f"positions must carry 1..10 moves, got {len(moves)}")
            _write_tensor(fh, base)
            fh.write(struct.pack("<I", len(moves)))
            for after, input2 in moves:
                _write_tensor(fh, after)
                arr = np.asarray(input2, dtype="<f4")
                if arr.shape != (2,):
                    raise ValueError("input2 must have exactly two entries")
                fh.write(arr.tobytes())
            count += 1
        fh.seek(4)
        fh.write(struct.pack("<II", VERSION, count))
    return count


def _write_tensor(fh, tensor):
    arr = np.ascontiguousarray(tensor, dtype="<f4")
    if arr.shape != TENSOR_SHAPE:
        raise ValueError(f"tensor shape {arr.shape} != {TENSOR_SHAPE}")
    fh.write(arr.tobytes())


def read_tensor_dataset(path: str):
    """Read back a dataset written by write_tensor_dataset (bit-exact)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        header = fh.read(8)
        if len(header) != 8:
            raise ValueError(f"{path}: truncated header")
        version, n_positions = struct.unpack("<II", header)
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        records = []
        for index in range(n_positions):
            base = _read_tensor(fh, path)
            raw = fh.read(4)
            if len(raw) != 4:
                raise ValueError(f"{path}: truncated at position {index}")
            (n_moves,) = struct.unpack("<I", raw)
            if not 1 <= n_moves <= 10:
                raise ValueError(f"{path}: position {index} claims {n_moves} moves")
            moves = []
            for _ in range(n_moves):
                after = _read_tensor(fh, path)
                pair = fh.read(8)
                if len(pair) != 8:
                    raise ValueError(f"{path}: truncated move payload")
                moves.append((after, np.frombuffer(pair, dtype="<f4").copy()))
            records.append((base, moves))
        if fh.read(1):
            raise ValueError(f"{path}: trailing bytes after {n_positions} positions")
    return records


def _read_tensor(fh, path):
    raw = fh.read(TENSOR_FLOATS * 4)
    if len(raw) != TENSOR_FLOATS * 4:
        raise ValueError(f"{path}: truncated tensor")
    return np.frombuffer(raw, dtype="<f4").reshape(TENSOR_SHAPE).copy()


def dataset_file_size(n_positions: int, moves_per_position) -> int:
    """Exact file size for given per-position move counts."""
    counts = list(moves_per_position)
    if len(counts) != n_positions:
        raise ValueError("need one move count per position")
    size = 4 + 8  # magic + version + count
    for n_moves in counts:
        size += TENSOR_FLOATS * 4 + 4 + n_moves * (TENSOR_FLOATS * 4 + 8)
    return size
