"""Built-in example channels.

`toy3` is a three-level model: levels 1 and 2 swap with probability g1
(and idle with probability g0), and level 3 decays to level 1 with
probability g2.  `seven_level` is a seven-level cascade: a swap between
the pairs (1,3) and (2,4), decay of 3 to 1 and 4 to 2, decay of 5 to an
equal mixture over 3 and 4, and decays of 6 and 7 to 5.  Both are
trace-preserving exactly when the probabilities sum to one; each decay
process contributes a jump operator and its no-jump complement.
"""

import numpy as np

from .channel import KrausMap

__all__ = ["GammaConstraintError", "toy3", "seven_level", "EXAMPLES"]

TOY3_DEFAULT_GAMMAS = (0.5, 0.3, 0.2)
SEVEN_LEVEL_DEFAULT_GAMMAS = (0.3, 0.3, 0.05, 0.15, 0.2)


class GammaConstraintError(ValueError):
    """A probability vector violates the constraints of a generator."""


def _check_sum_one(gammas, name: str) -> None:
    total = float(sum(gammas))
    if abs(total - 1.0) > 1e-9:
        raise GammaConstraintError(
            f"{name}: probabilities must sum to 1 (got {total!r})"
        )


def toy3(gammas=TOY3_DEFAULT_GAMMAS) -> tuple[KrausMap, dict]:
    """Three-level swap-and-decay channel.

    Constraints: three probabilities g0, g1, g2 >= 0 with g0+g1+g2 = 1.
    """
    gammas = tuple(float(g) for g in gammas)
    if len(gammas) != 3:
        raise GammaConstraintError(f"toy3: expected 3 probabilities, got {len(gammas)}")
    if any(g < 0 for g in gammas):
        raise GammaConstraintError("toy3: probabilities must be nonnegative")
    _check_sum_one(gammas, "toy3")
    g0, g1, g2 = gammas
    eye = np.eye(3, dtype=complex)
    swap = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    decay = np.zeros((3, 3), dtype=complex)
    decay[0, 2] = 1.0
    nojump = np.diag([1.0, 1.0, 0.0]).astype(complex)
    ops = [
        np.sqrt(g0) * eye,
        np.sqrt(g1) * swap,
        np.sqrt(g2) * decay,
        np.sqrt(g2) * nojump,
    ]
    meta = {"name": "toy3", "gammas": list(gammas)}
    return KrausMap.from_matrices(ops), meta


def _seven_level_generators() -> list[np.ndarray]:
    s2 = 1.0 / np.sqrt(2.0)
    n = [np.zeros((7, 7), dtype=complex) for _ in range(9)]
    # Swap of 1<->3 and 2<->4; identity elsewhere.
    n[0][2, 0] = n[0][3, 1] = n[0][0, 2] = n[0][1, 3] = 1.0
    n[0][4, 4] = n[0][5, 5] = n[0][6, 6] = 1.0
    # Decay 3->1 and 4->2, with its complement.
    n[1][0, 2] = n[1][1, 3] = 1.0
    n[1][4, 4] = n[1][5, 5] = n[1][6, 6] = s2
    n[2][0, 0] = n[2][1, 1] = 1.0
    n[2][4, 4] = n[2][5, 5] = n[2][6, 6] = s2
    # Decay 5 -> (3, 4) in equal proportion, with its complement.
    n[3][2, 4] = n[3][3, 4] = s2
    n[4][0, 0] = n[4][1, 1] = n[4][2, 2] = n[4][3, 3] = 1.0
    n[4][5, 5] = n[4][6, 6] = 1.0
    # Decay 6 -> 5, with its complement.
    n[5][4, 5] = 1.0
    n[6][0, 0] = n[6][1, 1] = n[6][2, 2] = n[6][3, 3] = n[6][4, 4] = 1.0
    n[6][6, 6] = 1.0
    # Decay 7 -> 5, with its complement.
    n[7][4, 6] = 1.0
    n[8][0, 0] = n[8][1, 1] = n[8][2, 2] = n[8][3, 3] = 1.0
    n[8][4, 4] = n[8][5, 5] = 1.0
    return n


def seven_level(gammas=SEVEN_LEVEL_DEFAULT_GAMMAS) -> tuple[KrausMap, dict]:
    """Seven-level cascade channel.

    Constraints: five probabilities with sum 1, all strictly positive,
    and g3 < g4 < g5.
    """
    gammas = tuple(float(g) for g in gammas)
    if len(gammas) != 5:
        raise GammaConstraintError(
            f"seven_level: expected 5 probabilities, got {len(gammas)}"
        )
    if any(g <= 0 for g in gammas):
        raise GammaConstraintError("seven_level: probabilities must be positive")
    _check_sum_one(gammas, "seven_level")
    g1, g2, g3, g4, g5 = gammas
    if not (g3 < g4 < g5):
        raise GammaConstraintError(
            f"seven_level: requires g3 < g4 < g5 (got {g3!r}, {g4!r}, {g5!r})"
        )
    weights = [g1, g2, g2, g3, g3, g4, g4, g5, g5]
    gens = _seven_level_generators()
    ops = [np.sqrt(w) * n for w, n in zip(weights, gens)]
    meta = {"name": "seven_level", "gammas": list(gammas)}
    return KrausMap.from_matrices(ops), meta


EXAMPLES = {"toy3": toy3, "seven_level": seven_level}
