import random

import pytest

from paretocount.model import Card, Formula, Xor, build_space, lit


def random_formula(rnd: random.Random, n: int | None = None) -> Formula:
    """Small random clause/parity/at-least formula over one latent block."""
    n = n if n is not None else rnd.randint(1, 8)
    sp = build_space(0, [n])
    clauses = []
    for _ in range(rnd.randint(0, 2 * n)):
        w = min(rnd.randint(1, 3), n)
        vs = rnd.sample(range(n), w)
        clauses.append(tuple(lit(v, rnd.random() < 0.5) for v in vs))
    xors = [
        Xor(tuple(rnd.sample(range(n), rnd.randint(0, n))), rnd.getrandbits(1))
        for _ in range(rnd.randint(0, 2))
    ]
    cards = []
    for _ in range(rnd.randint(0, 2)):
        w = rnd.randint(1, n)
        lits = tuple(lit(v, rnd.random() < 0.5) for v in rnd.sample(range(n), w))
        cards.append(Card(lits, rnd.randint(0, w)))
    return Formula(sp, tuple(clauses), tuple(xors), tuple(cards))


@pytest.fixture
def rnd():
    return random.Random(0xC0FFEE)
