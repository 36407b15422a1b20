import json
import math
import random
from collections import Counter

import pytest

from scrabble_lab.board import Board
from scrabble_lab.config import ConfigError, parse_config
from scrabble_lab.game import (
    GameError,
    IllegalMove,
    apply_move,
    check_legal,
    finalize,
    is_over,
    new_game,
    score_move,
)
from scrabble_lab.lexicon import build_lexicon
from scrabble_lab.movegen import generate_moves
from scrabble_lab.moves import (
    ACROSS,
    DOWN,
    Exchange,
    PASS,
    Place,
    format_move,
    parse_move,
)
from scrabble_lab.players import RandomSpec, choose_move

from conftest import make_state, rows_with


@pytest.fixture(scope="module")
def lex_ab():
    return build_lexicon(["AB", "BA", "AA"])


class TestNewGame:
    def test_bag_size_after_deal(self, config):
        state = new_game(config, 42)
        assert len(state.bag) == 86
        assert len(state.racks[0]) == 7
        assert len(state.racks[1]) == 7
        assert state.scores == (0, 0)

    def test_same_seed_same_racks(self, config):
        a = new_game(config, 123)
        b = new_game(config, 123)
        assert a.racks == b.racks
        assert a.bag == b.bag

    def test_different_seeds_differ(self, config):
        assert new_game(config, 1).racks != new_game(config, 2).racks

    def test_strict_mode_rejects_bad_total(self, config):
        from scrabble_lab.config import GameConfig, TileDistribution, TileInfo

        tiles = dict(config.distribution.tiles)
        tiles["Z"] = TileInfo(count=5, value=10)
        bad = GameConfig(TileDistribution(tiles), config.layout)
        with pytest.raises(GameError):
            new_game(bad, 0, strict=True)
        new_game(bad, 0, strict=False)  # permissive mode works

    def test_first_rack_frequencies_match_distribution(self, config):
        # multinomial check: letter frequency of first racks over many seeds
        draws = Counter()
        n_seeds = 1000
        for seed in range(n_seeds):
            draws.update(new_game(config, seed).racks[0])
        total_tiles = 7 * n_seeds
        for tile, info in config.distribution.tiles.items():
            p = info.count / 100.0
            expected = total_tiles * p
            sd = math.sqrt(total_tiles * p * (1 - p))
            assert abs(draws[tile] - expected) <= 3 * sd + 1e-9, tile


class TestCheckLegal:
    def test_first_move_must_cover_center(self, config, lex_ab):
        state = make_state(config, rack="AB")
        violation = check_legal(state, Place(0, 0, ACROSS, "AB"), lex_ab)
        assert violation.code == "CenterNotCovered"

    def test_invalid_cross_word_reported(self, config):
        lex = build_lexicon(["AB", "BA"])  # no AA
        rows = rows_with({(7, 7): "A", (7, 8): "B"})
        state = make_state(config, board_rows=rows, rack="AB")
        violation = check_legal(state, Place(8, 7, ACROSS, "AB"), lex)
        assert violation.code == "InvalidWord"
        assert violation.detail == "AA"

    def test_pass_always_ok(self, config, lex_ab):
        state = make_state(config, rack="AB")
        assert check_legal(state, PASS, lex_ab) is None

    def test_off_board(self, config, lex_ab):
        state = make_state(config, rack="AB")
        violation = check_legal(state, Place(14, 14, ACROSS, "AB"), lex_ab)
        assert violation.code == "OffBoard"

    def test_disconnected(self, config, lex_ab):
        rows = rows_with({(7, 7): "A", (7, 8): "B"})
        state = make_state(config, board_rows=rows, rack="AB")
        violation = check_legal(state, Place(0, 0, ACROSS, "AB"), lex_ab)
        assert violation.code == "Disconnected"

    def test_not_in_rack(self, config, lex_ab):
        state = make_state(config, rack="CC")
        violation = check_legal(state, Place(7, 7, ACROSS, "AB"), lex_ab)
        assert violation.code == "NotInRack"

    def test_exchange_needs_full_bag(self, config, lex_ab):
        state = make_state(config, rack="AB", bag="ABCDE")
        violation = check_legal(state, Exchange("A"), lex_ab)
        assert violation.code == "ExchangeBagTooSmall"
        state = make_state(config, rack="AB", bag="ABCDEFG")
        assert check_legal(state, Exchange("A"), lex_ab) is None

    def test_word_conflicts_with_board(self, config, lex_ab):
        rows = rows_with({(7, 7): "A", (7, 8): "B"})
        state = make_state(config, board_rows=rows, rack="AB")
        violation = check_legal(state, Place(7, 7, ACROSS, "BA"), lex_ab)
        assert violation.code == "BoardConflict"


class TestScoring:
    def test_opening_word_doubled_on_center(self, config, lex_ab):
        # A=1, B=3, center is a double-word square: (1+3)*2 = 8
        board = Board.empty()
        move = Place(7, 7, ACROSS, "AB")
        assert score_move(board, move, config.distribution, config.layout) == 8

    def test_blank_scores_zero(self, config):
        board = Board.empty()
        move = Place(7, 7, ACROSS, "aB")  # blank designated A
        assert score_move(board, move, config.distribution, config.layout) == 6

    def test_pass_and_exchange_score_zero(self, config):
        board = Board.empty()
        assert score_move(board, PASS, config.distribution, config.layout) == 0
        assert score_move(board, Exchange("AB"), config.distribution, config.layout) == 0

    def test_cross_word_scored(self, config, lex_ab):
        # existing AB across; placing A above the A forms AA vertically
        rows = rows_with({(7, 7): "A", (7, 8): "B"})
        board = Board.from_rows(rows)
        move = Place(6, 7, DOWN, "AA")
        # new tile A at (6,7): main word AA (vertical) = 1+1 = 2, no premium at (6,7)...
        score = score_move(board, move, config.distribution, config.layout)
        assert score == 2

    def test_bingo_bonus_applied_iff_seven_placed(self, config):
        lex = build_lexicon(["ABABABA", "AB"])
        board = Board.empty()
        move = Place(7, 1, ACROSS, "ABABABA")  # covers center (7,7)
        score = score_move(board, move, config.distribution, config.layout)
        # letters: A1*4 + B3*3 = 13; premiums on row 7: (7,3) DL doubles a B? -> cells (7,1..7,7)
        # (7,3)=DL on B: +3; (7,7)=DW doubles the word: (13+3)*2 = 32; +50 bingo
        assert score == 32 + 50

    def test_premium_consumed_once(self, config, lex_ab):
        # center DW already covered: playing across it later must not double
        rows = rows_with({(7, 7): "A", (7, 8): "B"})
        board = Board.from_rows(rows)
        move = Place(6, 7, DOWN, "AA")
        untouched = score_move(board, move, config.distribution, config.layout)
        assert untouched == 2  # would be 4 if the covered DW still counted

    def test_triple_word_corner(self, config):
        lex = build_lexicon(["AB"])
        rows = rows_with({(0, 1): "A"})
        board = Board.from_rows(rows)
        # place B at (0,2)? word AB starting (0,1)... use fresh: word at row 0 col 0 TW
        board = Board.empty()
        move = Place(0, 0, ACROSS, "AB")
        score = score_move(board, move, config.distribution, config.layout)
        assert score == (1 + 3) * 3  # (0,0) is TW


class TestApplyAndEnd:
    def test_apply_pass_increments_counter(self, config, lex_ab):
        state = make_state(config, rack="AB", other_rack="BA", bag="AABB" * 5)
        nxt = apply_move(state, PASS, lex_ab)
        assert nxt.scores == state.scores
        assert nxt.zero_turns == state.zero_turns + 1
        assert nxt.turn == 1 - state.turn

    def test_apply_scoring_move_updates(self, config, lex_ab):
        state = make_state(config, rack="AB", other_rack="BA", bag="AABBAABB")
        nxt = apply_move(state, Place(7, 7, ACROSS, "AB"), lex_ab)
        assert nxt.scores[0] == 8
        assert len(nxt.racks[0]) == 7 or len(nxt.bag) == 0
        assert nxt.zero_turns == 0
        assert nxt.board.at(7, 7) == "A"

    def test_apply_illegal_raises(self, config, lex_ab):
        state = make_state(config, rack="AB")
        with pytest.raises(IllegalMove) as exc:
            apply_move(state, Place(0, 0, ACROSS, "AB"), lex_ab)
        assert exc.value.violation.code == "CenterNotCovered"

    def test_exchange_keeps_bag_size(self, config, lex_ab):
        state = make_state(config, rack="AABB", bag="CCDDEEFFGG")
        nxt = apply_move(state, Exchange("AA"), lex_ab)
        assert len(nxt.bag) == len(state.bag)
        assert sorted(nxt.bag + tuple(nxt.racks[0])) == sorted(state.bag + tuple(state.racks[0]))

    def test_tile_conservation_random_playouts(self, config):
        lex = build_lexicon(
            ["AB", "BA", "AA", "AE", "EA", "ET", "TE", "TA", "AT", "ERA", "TEA", "EAT"]
        )
        full = sorted(config.distribution.full_pool())
        spec = RandomSpec()
        for seed in (1, 2, 3):
            state = new_game(config, seed)
            rng = random.Random(seed)
            for _ in range(20):
                if is_over(state):
                    break
                move = choose_move(spec, state, lex, rng)
                state = apply_move(state, move, lex)
                observed = sorted(
                    list(state.bag)
                    + list(state.racks[0])
                    + list(state.racks[1])
                    + state.board.tile_chars()
                )
                assert observed == full

    def test_zero_turn_game_end(self, config, lex_ab):
        state = make_state(config, rack="AB", other_rack="BA", bag="AABB" * 5)
        for _ in range(6):
            assert not is_over(state)
            state = apply_move(state, PASS, lex_ab)
        assert is_over(state)

    def test_finalize_going_out_gains_opponent_leftovers(self, config, lex_ab):
        state = make_state(config, rack="", other_rack="QI", bag="", scores=(50, 60))
        assert is_over(state)
        final = finalize(state)
        # Q=10, I=1 -> 11 transferred
        assert final.scores == (50 + 11, 60 - 11)

    def test_finalize_both_stuck_subtract_own(self, config, lex_ab):
        state = make_state(config, rack="AB", other_rack="Q", bag="")
        state.zero_turns = 6
        final = finalize(state)
        assert final.scores == (-4, -10)

    def test_finalize_non_terminal_errors(self, config):
        state = make_state(config, rack="AB", other_rack="BA", bag="AABB")
        with pytest.raises(GameError):
            finalize(state)

    def test_apply_deterministic_given_state(self, config, lex_ab):
        state = new_game(config, 5)
        a = apply_move(state, PASS, lex_ab)
        b = apply_move(state, PASS, lex_ab)
        assert a.bag == b.bag and a.racks == b.racks and a.rng_state == b.rng_state


class TestNotation:
    @pytest.mark.parametrize(
        "move,text",
        [
            (Place(7, 3, ACROSS, "WORD"), "8D WORD"),
            (Place(7, 3, DOWN, "WORD"), "D8 WORD"),
            (Place(0, 0, ACROSS, "AB"), "1A AB"),
            (Place(14, 14, DOWN, "Oz"), "O15 Oz"),
            (Exchange("BA?"), "EXCH ?AB"),
            (PASS, "PASS"),
        ],
    )
    def test_round_trip(self, move, text):
        assert format_move(move) == text
        assert parse_move(text) == move

    @pytest.mark.parametrize("bad", ["8D", "WORD", "Z8 CAT", "8P CAT", "16A CAT", "EXCH", "8D W0RD"])
    def test_bad_notation_rejected(self, bad):
        with pytest.raises(ValueError):
            parse_move(bad)


class TestConfigValidation:
    def test_path_qualified_errors(self, config):
        data = config.to_dict()
        data["tiles"]["A"]["count"] = -1
        with pytest.raises(ConfigError, match=r"tiles\.A\.count"):
            parse_config(data)

    def test_premium_cell_validated(self, config):
        data = config.to_dict()
        data["premium"][3][4] = "XX"
        with pytest.raises(ConfigError, match=r"premium\[3\]\[4\]"):
            parse_config(data)

    def test_missing_tile_entry(self, config):
        data = config.to_dict()
        del data["tiles"]["Q"]
        with pytest.raises(ConfigError, match=r"tiles\.Q"):
            parse_config(data)

    def test_round_trip(self, config):
        again = parse_config(json.loads(json.dumps(config.to_dict())))
        assert again.distribution.total_count() == 100
        assert again.layout.at(7, 7) == "DW"
        assert again.layout.at(0, 0) == "TW"
