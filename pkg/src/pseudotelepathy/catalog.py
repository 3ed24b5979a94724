"""Built-in games and expressions addressable by id from the command line."""

from __future__ import annotations

from .bell import BellExpression, magic_square_inequality, zero_expression
from .games import GameRelation, chsh_game, magic_square_game, restrict_inputs
from .polytope import PolytopeParams
from .quantum import QuantumStrategy, chsh_quantum_strategy, magic_square_quantum_strategy

GAMES = {
    "magic-square-r4": lambda: magic_square_game("restricted4"),
    "magic-square-f8": lambda: magic_square_game("full8"),
    "magic-square-r4-rows01": lambda: restrict_inputs(magic_square_game("restricted4"), [0, 1]),
    "chsh": chsh_game,
}

EXPRESSIONS = {
    "magic-square-r4": lambda: magic_square_inequality("restricted4"),
    "magic-square-a4": lambda: magic_square_inequality("abstract4"),
    "magic-square-f8": lambda: magic_square_inequality("full8"),
    # CHSH as a game expression: at most 3 of 4 input pairs won locally
    "chsh": lambda: BellExpression.from_game(chsh_game(), 3),
    "zero": lambda: zero_expression(PolytopeParams(3, 3, 4, 4)),
}

QUANTUM = {
    "magic-square-r4": magic_square_quantum_strategy,
    "chsh": chsh_quantum_strategy,
}


def builtin_game(name: str) -> GameRelation:
    return GAMES[name]()


def builtin_expression(name: str) -> BellExpression:
    return EXPRESSIONS[name]()


def builtin_quantum(name: str) -> QuantumStrategy:
    return QUANTUM[name]()
