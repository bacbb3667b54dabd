"""Shared random generators for the test suite (seeded by each test)."""

from odosym.intmat import IntMatrix


def rand_unimodular_steps(rng, d=2, steps=6):
    """Random unimodular matrix as a product of elementary operations."""
    m = IntMatrix.identity(d)
    for _ in range(steps):
        i, j = rng.sample(range(d), 2)
        rows = [list(r) for r in m.rows]
        c = rng.choice([-2, -1, 1, 2])
        for k in range(d):
            rows[i][k] += c * rows[j][k]
        m = IntMatrix.from_rows(rows)
        if rng.random() < 0.25:
            m = -m
    return m


def rand_unimodular_small(rng, bound=3):
    """Rejection-sampled unimodular matrix with bounded entries."""
    while True:
        m = IntMatrix(
            (
                (rng.randint(-bound, bound), rng.randint(-bound, bound)),
                (rng.randint(-bound, bound), rng.randint(-bound, bound)),
            )
        )
        if m.det() in (1, -1):
            return m


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    adj = m.adjugate()
    return adj if m.det() == 1 else -adj
