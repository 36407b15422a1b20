"""Scrabble self-play workbench.

Modules build on each other in roughly this order: config/board/moves/game
(rules engine), lexicon, movegen, evaluation, players, selfplay, fitness,
the optimizers (cmaes, bayesopt), the imitation pipeline (encoding,
imitation), and the command-line front end (cli).
"""

__version__ = "0.1.0"
