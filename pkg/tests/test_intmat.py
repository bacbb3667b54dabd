import random
from itertools import product

import pytest

from odosym.errors import (
    DomainCardinalityError,
    DomainCosetCollisionError,
    DomainMissingZeroError,
    MatrixParseError,
    RadicalDomainError,
    SingularMatrixError,
)
from odosym.intmat import (
    IntMatrix,
    char_poly,
    enumerate_subgroups,
    format_matrix,
    fundamental_domain,
    hnf,
    hnf_from_generators,
    integer_eigenvalues,
    is_expansion,
    lattice_intersection,
    parse_matrix,
    parse_vector,
    radical,
    reduce_vec,
    validate_domain,
)

ID2 = IntMatrix.identity(2)


def rand_matrix(rng, d, lo=-5, hi=5):
    return IntMatrix.from_rows(
        [[rng.randint(lo, hi) for _ in range(d)] for _ in range(d)]
    )


def rand_unimodular(rng, d=2, steps=6):
    m = IntMatrix.identity(d)
    for _ in range(steps):
        i, j = rng.sample(range(d), 2)
        rows = [list(r) for r in m.rows]
        c = rng.choice([-2, -1, 1, 2])
        for k in range(d):
            rows[i][k] += c * rows[j][k]
        m = IntMatrix.from_rows(rows)
        if rng.random() < 0.3:
            m = -m
    return m


# ---------------------------------------------------------------------------
# adjugate
# ---------------------------------------------------------------------------


def test_adjugate_examples():
    assert IntMatrix.scalar(2, 2).adjugate() == IntMatrix.scalar(2, 2)
    assert ID2.adjugate() == ID2
    m = parse_matrix("2,-1;1,3")
    a = m.adjugate()
    assert a == parse_matrix("3,1;-1,2")
    assert a * m == IntMatrix.scalar(2, 7)


def test_adjugate_identity_random():
    rng = random.Random(1)
    for _ in range(80):
        d = rng.choice([1, 2, 3, 4])
        m = rand_matrix(rng, d)
        det = m.det()
        a = m.adjugate()
        assert a * m == IntMatrix.scalar(d, det)
        assert m * a == IntMatrix.scalar(d, det)


def test_char_poly_matches_det_and_trace():
    rng = random.Random(2)
    for _ in range(40):
        d = rng.choice([2, 3])
        m = rand_matrix(rng, d)
        coeffs = char_poly(m)
        assert coeffs[0] == 1
        assert coeffs[1] == -m.trace()
        assert coeffs[-1] == (-1) ** d * m.det()


# ---------------------------------------------------------------------------
# radical
# ---------------------------------------------------------------------------


def test_radical_examples():
    assert radical(12) == 6
    assert radical(-8) == 2
    assert radical(11) == 11


@pytest.mark.parametrize("bad", [0, 1, -1])
def test_radical_domain(bad):
    with pytest.raises(RadicalDomainError):
        radical(bad)


# ---------------------------------------------------------------------------
# hnf
# ---------------------------------------------------------------------------


def test_hnf_examples():
    assert hnf(parse_matrix("1,2;0,1")).matrix == ID2
    assert hnf(parse_matrix("2,0;0,2")).matrix == parse_matrix("2,0;0,2")
    h = hnf(parse_matrix("0,2;3,0"))
    assert abs(h.matrix.det()) == 6


def test_hnf_lattice_equality_bruteforce():
    # membership oracle over a box: same lattice as the source columns
    m = parse_matrix("0,2;3,0")
    h = hnf(m)
    for v in product(range(-6, 7), repeat=2):
        in_src = any(
            tuple(m.mul_vec((a, b))) == v for a in range(-9, 10) for b in range(-9, 10)
        )
        assert h.contains(v) == in_src


def test_hnf_convention_and_idempotence():
    rng = random.Random(3)
    for _ in range(60):
        m = rand_matrix(rng, rng.choice([1, 2, 3]))
        if m.det() == 0:
            continue
        h = hnf(m).matrix
        d = h.dim
        for i in range(d):
            assert h.rows[i][i] > 0
            for j in range(d):
                if j > i:
                    assert h.rows[i][j] == 0
                elif j < i:
                    assert 0 <= h.rows[i][j] < h.rows[i][i]
        assert hnf(h).matrix == h
        assert abs(h.det()) == abs(m.det())


def test_hnf_invariant_under_unimodular_column_change():
    rng = random.Random(4)
    for _ in range(50):
        m = rand_matrix(rng, 2)
        if m.det() == 0:
            continue
        u = rand_unimodular(rng, 2)
        assert hnf(m * u).matrix == hnf(m).matrix


def test_hnf_singular_rejected():
    with pytest.raises(SingularMatrixError):
        hnf(parse_matrix("1,2;2,4"))


def test_lattice_intersection_bruteforce():
    rng = random.Random(5)
    for _ in range(40):
        d = rng.choice([1, 2, 3])
        mats = []
        while len(mats) < 2:
            m = rand_matrix(rng, d, -3, 3)
            if m.det() != 0 and abs(m.det()) <= 8:
                mats.append(hnf(m))
        a, b = mats
        c = lattice_intersection(a, b)
        for t in product(range(-4, 5), repeat=d):
            assert c.contains(t) == (a.contains(t) and b.contains(t))


# ---------------------------------------------------------------------------
# fundamental domains
# ---------------------------------------------------------------------------


def test_fundamental_domain_examples():
    f = fundamental_domain(IntMatrix.scalar(2, 2))
    assert set(f.reps) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    f2 = fundamental_domain(parse_matrix("2,0;0,4"))
    assert set(f2.reps) == {(a, b) for a in range(2) for b in range(4)}
    f3 = fundamental_domain(parse_matrix("2,-1;1,3"))
    assert len(f3.reps) == 7
    assert (0, 0) in f3.reps
    basis = hnf(parse_matrix("2,-1;1,3"))
    for i, a in enumerate(f3.reps):
        for b in f3.reps[i + 1 :]:
            assert not basis.contains(tuple(x - y for x, y in zip(a, b)))


def test_fundamental_domain_passes_validate_random():
    rng = random.Random(6)
    checked = 0
    while checked < 40:
        m = rand_matrix(rng, 2, -4, 4)
        if m.det() == 0 or abs(m.det()) > 30:
            continue
        f = fundamental_domain(m)
        v = validate_domain(m, f.reps)
        assert set(v.reps) == set(f.reps)
        checked += 1


def test_validate_domain_half_hex_and_errors():
    two = IntMatrix.scalar(2, 2)
    hh = validate_domain(two, [(0, 0), (1, 0), (0, 1), (1, -1)])
    assert len(hh.reps) == 4
    validate_domain(two, [(0, 0), (1, 0), (0, 1), (1, 1)])
    with pytest.raises(DomainCosetCollisionError):
        validate_domain(two, [(0, 0), (2, 0), (0, 1), (1, 1)])
    with pytest.raises(DomainCardinalityError):
        validate_domain(two, [(0, 0), (1, 0), (0, 1)])
    with pytest.raises(DomainMissingZeroError):
        validate_domain(two, [(1, 1), (1, 0), (0, 1), (2, 2)])


def test_reduce_examples():
    two = IntMatrix.scalar(2, 2)
    hh = validate_domain(two, [(0, 0), (1, 0), (0, 1), (1, -1)])
    assert reduce_vec((3, 1), hh) == ((1, -1), (1, 1))
    assert reduce_vec((0, 0), hh) == ((0, 0), (0, 0))
    box = fundamental_domain(parse_matrix("2,0;0,4"))
    assert reduce_vec((5, 2), box) == ((1, 2), (2, 0))


def test_reduce_is_bijection_on_box():
    rng = random.Random(7)
    for _ in range(10):
        m = rand_matrix(rng, 2, -3, 3)
        if m.det() == 0 or abs(m.det()) > 12:
            continue
        f = fundamental_domain(m)
        seen = set()
        for v in product(range(-5, 6), repeat=2):
            digit, quot = reduce_vec(v, f)
            assert tuple(m.mul_vec(quot)) == tuple(
                x - y for x, y in zip(v, digit)
            )
            assert (digit, quot) not in seen
            seen.add((digit, quot))


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


def test_integer_eigenvalues_examples():
    assert integer_eigenvalues(parse_matrix("3,1;0,5")) == [3, 5]
    assert integer_eigenvalues(parse_matrix("2,-1;1,3")) == []
    assert integer_eigenvalues(ID2) == [1, 1]


def test_is_expansion_examples():
    assert is_expansion(IntMatrix.scalar(2, 2))
    assert not is_expansion(parse_matrix("1,1;0,1"))
    assert is_expansion(parse_matrix("2,-1;1,3"))
    assert is_expansion(parse_matrix("0,2;3,0"))  # eigenvalues +-sqrt(6)
    assert not is_expansion(parse_matrix("0,1;1,0"))
    assert not is_expansion(parse_matrix("3,0;0,1"))


def test_is_expansion_dim3():
    assert is_expansion(IntMatrix.from_rows([[2, 0, 0], [0, 2, 0], [0, 0, 3]]))
    assert is_expansion(IntMatrix.from_rows([[0, 0, -2], [1, 0, 0], [0, 1, 0]]))
    assert not is_expansion(IntMatrix.from_rows([[1, 1, 0], [0, 1, 1], [0, 0, 2]]))
    assert not is_expansion(IntMatrix.from_rows([[2, 0, 0], [0, 0, -1], [0, 1, 0]]))


def test_is_expansion_dim3_against_modulus_oracle():
    # cross-check the exact test against floating eigenvalues (non-boundary)
    rng = random.Random(8)
    checked = 0
    while checked < 60:
        m = rand_matrix(rng, 3, -3, 3)
        coeffs = char_poly(m)
        # roots of x^3 + a x^2 + b x + c
        a, b, c = coeffs[1], coeffs[2], coeffs[3]
        roots = _cubic_roots(a, b, c)
        if any(abs(abs(r) - 1) < 1e-6 for r in roots):
            continue  # too close to the boundary for a float oracle
        expected = all(abs(r) > 1 for r in roots)
        assert is_expansion(m) == expected
        checked += 1


def _cubic_roots(a, b, c):
    import numpy.polynomial.polynomial as npoly  # test-only oracle

    return npoly.polyroots([c, b, a, 1])


# ---------------------------------------------------------------------------
# subgroup enumeration
# ---------------------------------------------------------------------------


def test_enumerate_subgroups_examples():
    subs = enumerate_subgroups(1, 3)
    assert [h.matrix.rows for h in subs] == [((1,),), ((2,),), ((3,),)]
    idx2 = [h for h in enumerate_subgroups(2, 2) if h.index() == 2]
    assert len(idx2) == 3
    idx4 = [h for h in enumerate_subgroups(2, 4) if h.index() == 4]
    assert len(idx4) == 7


def sigma_divisors(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def test_enumerate_subgroups_counts_and_distinct():
    subs = enumerate_subgroups(2, 12)
    by_index = {}
    for h in subs:
        by_index.setdefault(h.index(), []).append(h)
    for n, hs in by_index.items():
        assert len(hs) == sigma_divisors(n)
        # pairwise distinct as lattices: membership signature over a box
        sigs = set()
        for h in hs:
            sig = tuple(h.contains(v) for v in product(range(n + 1), repeat=2))
            assert sig not in sigs
            sigs.add(sig)


def test_hnf_from_generators_rank_check():
    with pytest.raises(SingularMatrixError):
        hnf_from_generators(2, [(1, 0), (2, 0)])


# ---------------------------------------------------------------------------
# text syntax
# ---------------------------------------------------------------------------


def test_parse_and_format_roundtrip():
    m = parse_matrix("2,-1;1,3")
    assert m.rows == ((2, -1), (1, 3))
    assert parse_matrix(format_matrix(m)) == m
    assert parse_vector("(3,1)") == (3, 1)
    assert parse_vector("3,1") == (3, 1)


def test_parse_errors_cite_token():
    with pytest.raises(MatrixParseError) as err:
        parse_matrix("2,x;1,3")
    assert err.value.token == "x"
    assert err.value.position is not None
    with pytest.raises(MatrixParseError):
        parse_matrix("1,2,3;4,5,6")
