"""Seeded random inputs shared by the property and acceptance suites."""

import random
from fractions import Fraction

from tatelab.abeloid import PeriodMatrix
from tatelab.linalg import det_rational


def entry_text(rng: random.Random, ord_exp: int) -> str:
    """zeta^a * p^b * (1+p)^c with b = ord_exp."""
    a, c = rng.randrange(0, 6), rng.randrange(-4, 5)
    return f"zeta^{a} * p^({ord_exp}) * (1+p)^({c})"


def random_ord(rng: random.Random, g: int, lo: int = -3, hi: int = 4) -> list[list[int]]:
    while True:
        M = [[rng.randint(lo, hi) for _ in range(g)] for _ in range(g)]
        if det_rational(M) != 0:
            return M


def random_lattice(rng: random.Random, ctx, g: int) -> PeriodMatrix:
    O = random_ord(rng, g)
    return PeriodMatrix.parse(ctx, [[entry_text(rng, O[i][j]) for j in range(g)] for i in range(g)])


def random_unimodular(rng: random.Random, g: int, steps: int = 6) -> list[list[int]]:
    M = [[int(i == j) for j in range(g)] for i in range(g)]
    if g == 1:
        return [[rng.choice((1, -1))]]
    for _ in range(steps):
        i, j = rng.sample(range(g), 2)
        f = rng.choice((-2, -1, 1, 2))
        M[i] = [x + f * y for x, y in zip(M[i], M[j])]
    if rng.random() < 0.5:
        i, j = rng.sample(range(g), 2)
        M[i], M[j] = M[j], M[i]
    return M


def random_tate_parameter(rng: random.Random) -> str:
    """An element of the group generated by p, zeta and 1+p with positive valuation."""
    return entry_text(rng, rng.randint(1, 4))


def random_isotropic_vector(rng: random.Random, gram) -> list[Fraction]:
    """Random rational v with c-coordinate 1 and Q(v, v) = 0, solved for a."""
    v = [Fraction(0)] + [Fraction(rng.randint(-30, 30), rng.randint(1, 9)) for _ in range(4)] + [Fraction(1)]
    q0 = sum(v[i] * v[j] * gram[i][j] for i in range(6) for j in range(6))
    lin = 2 * sum(gram[0][j] * v[j] for j in range(6))
    v[0] = -q0 / lin
    return v
