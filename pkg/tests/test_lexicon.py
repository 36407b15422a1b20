import random

import pytest

from scrabble_lab.lexicon import (
    ROOT,
    Lexicon,
    WordListError,
    build_lexicon,
    load_word_list,
    synthetic_word_list,
)


def test_membership_of_inserted_words():
    lex = build_lexicon(["AB", "BA"])
    assert lex.contains("AB")
    assert lex.contains("BA")


def test_non_inserted_word_absent():
    lex = build_lexicon(["AB", "BA"])
    assert not lex.contains("AA")


def test_empty_lexicon_contains_nothing():
    lex = build_lexicon([])
    assert not lex.contains("CAT")


def test_lowercase_input_uppercased():
    lex = build_lexicon(["cat"])
    assert lex.contains("CAT")


def test_non_alpha_query_is_false():
    lex = build_lexicon(["CAT"])
    assert not lex.contains("C4T")
    assert not lex.contains("")


@pytest.mark.parametrize("bad", ["A", "X" * 16, "CA-T", "C4T", "É", ""])
def test_invalid_words_rejected(bad):
    with pytest.raises(WordListError):
        build_lexicon([bad])


def test_duplicates_deduplicated():
    lex = build_lexicon(["CAT", "CAT", "cat"])
    assert lex.word_count == 1


def test_step_traversal():
    lex = build_lexicon(["AB"])
    step_a = lex.step(ROOT, "A")
    assert step_a is not None
    node, terminal = step_a
    assert not terminal
    node_b, terminal_b = lex.step(node, "B")
    assert terminal_b
    assert lex.step(ROOT, "Z") is None


def test_step_invalid_node():
    lex = build_lexicon(["AB"])
    with pytest.raises(ValueError):
        lex.step(10_000, "A")


def _naive_trie_node_count(words):
    # independent counter: plain dict-trie, no sharing
    root = {}
    count = 1
    for word in sorted(set(words)):
        node = root
        for ch in word:
            if ch not in node:
                node[ch] = {}
                count += 1
            node = node[ch]
    return count


def test_node_count_not_above_naive_trie():
    words = synthetic_word_list(20, seed=3, min_len=2, max_len=6)
    lex = build_lexicon(words)
    assert lex.node_count() <= _naive_trie_node_count(words)
    # the plain-trie implementation matches the naive count exactly
    assert lex.node_count() == _naive_trie_node_count(words)


def test_round_trip_enumeration_random_lists():
    rng = random.Random(11)
    for trial in range(5):
        n = rng.choice([10, 200, 1000, 5000])
        words = synthetic_word_list(n, seed=trial * 7 + 1, min_len=2, max_len=8)
        lex = build_lexicon(words)
        assert sorted(lex.iter_words()) == sorted(set(words))


def test_every_node_reaches_a_terminal():
    lex = build_lexicon(synthetic_word_list(300, seed=5))
    reachable = [False] * lex.node_count()

    def walk(node):
        terminal_below = lex.terminal[node]
        for child in lex.edges[node].values():
            terminal_below = walk(child) or terminal_below
        reachable[node] = terminal_below
        return terminal_below

    walk(ROOT)
    assert all(reachable), "step must never lead to a dead-end node"


def test_load_word_list_reports_line_numbers(tmp_path):
    path = tmp_path / "words.txt"
    path.write_text("CAT\ndog\nx\n\nHELLO\nB@D\n")
    with pytest.raises(WordListError) as exc:
        load_word_list(str(path))
    message = str(exc.value)
    assert "line 3" in message
    assert "line 6" in message


def test_load_word_list_accepts_clean_file(tmp_path):
    path = tmp_path / "words.txt"
    path.write_text("CAT\ndog\nHELLO\n")
    lex = load_word_list(str(path))
    assert lex.word_count == 3
    assert lex.contains("DOG")
