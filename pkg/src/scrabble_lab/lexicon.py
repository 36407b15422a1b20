"""Word list stored as a prefix trie with incremental traversal.

The automaton exposes exactly what move generation needs: membership tests
and single-letter steps from a node id. Suffix sharing (DAWG minimization)
is deliberately left out; the membership/traversal contract is identical
and the plain trie keeps the structure easy to verify.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .config import LETTERS

WORD_RE = re.compile(r"^[A-Z]{2,15}$")

ROOT = 0


class WordListError(ValueError):
    """A word list contained invalid entries."""


@dataclass
class Lexicon:
    """Trie over uppercase words of length 2..15.

    Nodes are integer ids; `edges[node]` maps a letter to the child id and
    `terminal[node]` marks ends of stored words. Immutable after build.
    """

    edges: list = field(default_factory=lambda: [{}])
    terminal: list = field(default_factory=lambda: [False])
    word_count: int = 0

    def contains(self, word: str) -> bool:
        node = ROOT
        for ch in word:
            nxt = self.edges[node].get(ch)
            if nxt is None:
                return False
            node = nxt
        return self.terminal[node]

    def step(self, node: int, letter: str):
        """Follow one edge; returns (child, is_terminal) or None if absent."""
        if not 0 <= node < len(self.edges):
            raise ValueError(f"invalid lexicon node id {node}")
        child = self.edges[node].get(letter)
        if child is None:
            return None
        return child, self.terminal[child]

    def node_count(self) -> int:
        return len(self.edges)

    def iter_words(self):
        """Yield every stored word in lexicographic order."""
        stack = [(ROOT, "")]
        while stack:
            node, prefix = stack.pop()
            if self.terminal[node]:
                yield prefix
            for letter in sorted(self.edges[node], reverse=True):
                stack.append((self.edges[node][letter], prefix + letter))

    def __contains__(self, word: str) -> bool:
        return self.contains(word)

    def __len__(self) -> int:
        return self.word_count


def build_lexicon(words) -> Lexicon:
    """Build a lexicon from an iterable of words (lowercase is uppercased).

    Raises WordListError for any word not matching [A-Z]{2,15} after
    uppercasing. Duplicates are deduplicated.
    """
    lex = Lexicon()
    seen = set()
    for word in words:
        word = word.upper()
        if not WORD_RE.match(word):
            raise WordListError(f"invalid word {word!r}: must match [A-Z]{{2,15}}")
        if word in seen:
            continue
        seen.add(word)
        node = ROOT
        for ch in word:
            nxt = lex.edges[node].get(ch)
            if nxt is None:
                nxt = len(lex.edges)
                lex.edges[node][ch] = nxt
                lex.edges.append({})
                lex.terminal.append(False)
            node = nxt
        lex.terminal[node] = True
        lex.word_count += 1
    return lex


def load_word_list(path: str) -> Lexicon:
    """Load a one-word-per-line UTF-8 file.

    Empty lines are ignored; any other invalid line aborts the load, and
    the error reports every offending line number.
    """
    words = []
    bad = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            word = line.strip().upper()
            if not word:
                continue
            if not WORD_RE.match(word):
                bad.append((lineno, line.rstrip("\n")))
            else:
                words.append(word)
    if bad:
        detail = "; ".join(f"line {n}: {text!r}" for n, text in bad[:20])
        more = "" if len(bad) <= 20 else f" (+{len(bad) - 20} more)"
        raise WordListError(f"{path}: {len(bad)} invalid line(s): {detail}{more}")
    return build_lexicon(words)


def synthetic_word_list(
    n_words: int,
    seed: int,
    min_len: int = 2,
    max_len: int = 5,
    letter_weights=None,
) -> list:
    """Deterministic stand-in word list for experiments without a dictionary.

    Words are sampled letter-by-letter, weighted so they look roughly like
    tile draws (vowel-heavy), which keeps random racks playable.
    """
    rng = random.Random(seed)
    if letter_weights is None:
        # Default English tile counts double as letter weights.
        letter_weights = {
            "A": 9, "B": 2, "C": 2, "D": 4, "E": 12, "F": 2, "G": 3,
            "H": 2, "I": 9, "J": 1, "K": 1, "L": 4, "M": 2, "N": 6,
            "O": 8, "P": 2, "Q": 1, "R": 6, "S": 4, "T": 6, "U": 4,
            "V": 2, "W": 2, "X": 1, "Y": 2, "Z": 1,
        }
    letters = sorted(letter_weights)
    weights = [letter_weights[ch] for ch in letters]
    words = set()
    while len(words) < n_words:
        length = rng.randint(min_len, max_len)
        words.add("".join(rng.choices(letters, weights=weights, k=length)))
    return sorted(words)


__all__ = [
    "Lexicon",
    "WordListError",
    "build_lexicon",
    "load_word_list",
    "synthetic_word_list",
    "ROOT",
    "LETTERS",
]
