"""Exact integer matrix and lattice arithmetic.

Everything here works over plain Python integers (arbitrary precision).
Floating point is never used: expansion tests, Hermite forms and coset
reductions are all decided by exact sign and divisibility analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import isqrt

from .errors import (
    DomainCardinalityError,
    DomainCosetCollisionError,
    DomainMissingZeroError,
    MatrixParseError,
    RadicalDomainError,
    SingularMatrixError,
)

Vec = tuple[int, ...]


def vec(*xs) -> Vec:
    return tuple(int(x) for x in xs)


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def zero_vec(d: int) -> Vec:
    return (0,) * d


@dataclass(frozen=True)
class IntMatrix:
    """Square integer matrix, immutable and hashable."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = len(self.rows)
        if d < 1 or any(len(r) != d for r in self.rows):
            raise ValueError("IntMatrix must be square with dim >= 1")
        object.__setattr__(
            self, "rows", tuple(tuple(int(x) for x in r) for r in self.rows)
        )

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, d: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d)))

    @classmethod
    def scalar(cls, d: int, c: int) -> "IntMatrix":
        return cls(tuple(tuple(c if i == j else 0 for j in range(d)) for i in range(d)))

    # -- basic queries -----------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> Vec:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vec]:
        return [self.column(j) for j in range(self.dim)]

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.dim))

    def det(self) -> int:
        return _det(self.rows)

    def is_unimodular(self) -> bool:
        return self.det() in (1, -1)

    def max_abs(self) -> int:
        return max(abs(x) for r in self.rows for x in r)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            )
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(
            tuple(
                tuple(a - b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            )
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(c * a for a in r) for r in self.rows))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if not isinstance(other, IntMatrix):
            return NotImplemented
        d = self.dim
        cols = list(zip(*other.rows))
        return IntMatrix(
            tuple(
                tuple(sum(ra[k] * col[k] for k in range(d)) for col in cols)
                for ra in self.rows
            )
        )

    def mul_vec(self, v: Vec) -> Vec:
        return tuple(sum(r[k] * v[k] for k in range(self.dim)) for r in self.rows)

    def __pow__(self, n: int) -> "IntMatrix":
        if n < 0:
            raise ValueError("only nonnegative integer powers")
        result = IntMatrix.identity(self.dim)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def adjugate(self) -> "IntMatrix":
        """Matrix A with A*M = M*A = det(M)*Id."""
        d = self.dim
        if d == 1:
            return IntMatrix(((1,),))
        if d == 2:
            (a, b), (c, e) = self.rows
            return IntMatrix(((e, -b), (-c, a)))
        cof = [
            [(-1) ** (i + j) * _det(_minor(self.rows, i, j)) for j in range(d)]
            for i in range(d)
        ]
        return IntMatrix(tuple(zip(*cof)))

    def solve_exact(self, v: Vec) -> Vec | None:
        """Integer solution x of M x = v, or None if none exists."""
        det = self.det()
        if det == 0:
            raise SingularMatrixError("cannot solve with a singular matrix")
        w = self.adjugate().mul_vec(v)
        out = []
        for x in w:
            q, r = divmod(x, det)
            if r:
                return None
            out.append(q)
        return tuple(out)

    def __str__(self) -> str:
        return format_matrix(self)


def _minor(rows, i, j):
    return tuple(
        tuple(x for jj, x in enumerate(r) if jj != j)
        for ii, r in enumerate(rows)
        if ii != i
    )


def _det(rows) -> int:
    d = len(rows)
    if d == 1:
        return rows[0][0]
    if d == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if d == 3:
        (a, b, c), (p, q, r), (x, y, z) = rows
        return a * (q * z - r * y) - b * (p * z - r * x) + c * (p * y - q * x)
    # Bareiss fraction-free elimination for larger d.
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(d - 1):
        if m[k][k] == 0:
            for i in range(k + 1, d):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, d):
            for j in range(k + 1, d):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[d - 1][d - 1]


def char_poly(m: IntMatrix) -> list[int]:
    """Coefficients [a_d=1, a_{d-1}, ..., a_0] of det(x*Id - M).

    Faddeev-LeVerrier recursion; all divisions are exact over Z.
    """
    d = m.dim
    coeffs = [1]
    mk = m
    for k in range(1, d + 1):
        tr = mk.trace()
        assert tr % k == 0
        ck = -tr // k
        coeffs.append(ck)
        if k < d:
            mk = m * (mk + IntMatrix.scalar(d, ck))
    return coeffs


def commutes(a: IntMatrix, b: IntMatrix) -> bool:
    return a * b == b * a


# ---------------------------------------------------------------------------
# radical
# ---------------------------------------------------------------------------


def radical(n: int) -> int:
    """Product of the distinct primes dividing |n|; needs |n| > 1."""
    if abs(n) <= 1:
        raise RadicalDomainError(f"radical undefined for n={n}")
    n = abs(n)
    rad = 1
    for p in _prime_factors(n):
        rad *= p
    return rad


def _prime_factors(n: int) -> list[int]:
    out = []
    for p in (2, 3):
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            if n % p == 0:
                out.append(p)
                while n % p == 0:
                    n //= p
        f += 6
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# Hermite normal form (column style, lower triangular)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HnfBasis:
    """Canonical basis of a finite-index sublattice of Z^d.

    Convention: columns generate the lattice; the matrix is lower
    triangular with positive diagonal and, within row i, entries left of
    the diagonal reduced into [0, h_ii).
    """

    matrix: IntMatrix

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def index(self) -> int:
        """Index of the lattice in Z^d (= |det|)."""
        d = 1
        for i in range(self.dim):
            d *= self.matrix.rows[i][i]
        return d

    def reduce_vec(self, v: Vec) -> Vec:
        """Canonical representative of v modulo the lattice."""
        h = self.matrix.rows
        w = list(v)
        for i in range(self.dim):
            q = w[i] // h[i][i]
            if q:
                for k in range(i, self.dim):
                    w[k] -= q * h[k][i]
        return tuple(w)

    def contains(self, v: Vec) -> bool:
        return self.reduce_vec(v) == zero_vec(self.dim)

    def contains_lattice(self, other: "HnfBasis") -> bool:
        return all(self.contains(c) for c in other.matrix.columns())

    def box_reps(self) -> list[Vec]:
        """All canonical representatives (the half-open HNF box)."""
        h = self.matrix.rows
        ranges = [range(h[i][i]) for i in range(self.dim)]
        return [tuple(t) for t in product(*ranges)]


def hnf_from_generators(d: int, gens) -> HnfBasis:
    """Column HNF of the lattice spanned by the given integer vectors.

    Raises SingularMatrixError when the span has rank < d.
    """
    cols = [list(g) for g in gens]
    lower = []
    for i in range(d):
        cols = [c for c in cols if any(c[i:])]
        live = [c for c in cols if c[i] != 0]
        if not live:
            raise SingularMatrixError("generators do not span a finite-index lattice")
        piv = live[0]
        for c in live[1:]:
            # column xgcd step: combine piv and c to clear c[i]
            a, b = piv[i], c[i]
            x, y, g = _xgcd(a, b)
            u, v = a // g, b // g
            new_piv = [x * pa + y * ca for pa, ca in zip(piv, c)]
            new_c = [-v * pa + u * ca for pa, ca in zip(piv, c)]
            piv[:] = new_piv
            c[:] = new_c
        if piv[i] < 0:
            piv[:] = [-x for x in piv]
        lower.append(piv)
        cols = [c for c in cols if c is not piv]
    # lower[i] is the column with pivot at row i; reduce off-diagonals.
    for i in range(d):
        for j in range(i):
            q = lower[j][i] // lower[i][i]
            if q:
                for k in range(d):
                    lower[j][k] -= q * lower[i][k]
    mat = IntMatrix(tuple(tuple(lower[j][i] for j in range(d)) for i in range(d)))
    return HnfBasis(mat)


def _xgcd(a: int, b: int):
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def hnf(m: IntMatrix) -> HnfBasis:
    """Canonical HNF basis of the lattice M(Z^d)."""
    if m.det() == 0:
        raise SingularMatrixError("hnf needs a nonsingular matrix")
    return hnf_from_generators(m.dim, m.columns())


def lattice_intersection(a: HnfBasis, b: HnfBasis) -> HnfBasis:
    """Intersection of two finite-index lattices via duality.

    (L1 cap L2)* = L1* + L2*, and sums of lattices are just concatenated
    generators.  Duals are kept integral by scaling with N = index(a) *
    index(b); all divisions at the end are exact.
    """
    d = a.dim
    n1, n2 = a.index(), b.index()
    n = n1 * n2
    g1 = a.matrix.adjugate().transpose().scale(n // n1)  # N * H1^{-T}
    g2 = b.matrix.adjugate().transpose().scale(n // n2)  # N * H2^{-T}
    s = hnf_from_generators(d, g1.columns() + g2.columns())
    ds = s.index()
    scaled = s.matrix.adjugate().transpose().scale(n)  # N * ds * S^{-T}
    rows = []
    for r in scaled.rows:
        row = []
        for x in r:
            q, rem = divmod(x, ds)
            assert rem == 0
            row.append(q)
        rows.append(tuple(row))
    return hnf(IntMatrix(tuple(rows)))


# ---------------------------------------------------------------------------
# fundamental domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FundamentalDomain:
    """A full set of coset representatives of L(Z^d) in Z^d, with 0 in it."""

    base: IntMatrix
    reps: tuple[Vec, ...]
    hnf_basis: HnfBasis
    _rep_of_key: dict

    def __post_init__(self):
        object.__setattr__(self, "reps", tuple(tuple(v) for v in self.reps))

    @property
    def dim(self) -> int:
        return self.base.dim

    def size(self) -> int:
        return len(self.reps)

    def digit_of(self, v: Vec) -> Vec:
        """The representative of this domain congruent to v."""
        return self._rep_of_key[self.hnf_basis.reduce_vec(v)]

    def __contains__(self, v) -> bool:
        return tuple(v) in set(self.reps)

    def __iter__(self):
        return iter(self.reps)


def fundamental_domain(base: IntMatrix) -> FundamentalDomain:
    """Canonical fundamental domain: the half-open HNF box representatives."""
    if base.det() == 0:
        raise SingularMatrixError("fundamental domain needs det != 0")
    h = hnf(base)
    reps = sorted(h.box_reps())
    reps.sort(key=lambda v: (v != zero_vec(base.dim), v))
    table = {r: r for r in reps}
    return FundamentalDomain(base, tuple(reps), h, table)


def validate_domain(base: IntMatrix, candidates) -> FundamentalDomain:
    """Accepts exactly the full transversals of Z^d / base(Z^d) containing 0."""
    if base.det() == 0:
        raise SingularMatrixError("fundamental domain needs det != 0")
    cands = [tuple(int(x) for x in v) for v in candidates]
    h = hnf(base)
    want = abs(base.det())
    if len(cands) != want:
        raise DomainCardinalityError(
            f"expected {want} representatives, got {len(cands)}"
        )
    if zero_vec(base.dim) not in cands:
        raise DomainMissingZeroError("the zero vector must be a representative")
    table = {}
    for v in cands:
        key = h.reduce_vec(v)
        if key in table:
            raise DomainCosetCollisionError(
                f"representatives {table[key]} and {v} are congruent mod the lattice"
            )
        table[key] = v
    return FundamentalDomain(base, tuple(cands), h, table)


def reduce_vec(v: Vec, domain: FundamentalDomain) -> tuple[Vec, Vec]:
    """Unique (digit, quotient) with v = L(quotient) + digit, digit in the domain."""
    digit = domain.digit_of(tuple(v))
    quotient = domain.base.solve_exact(vec_sub(tuple(v), digit))
    assert quotient is not None
    return digit, quotient


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


def integer_eigenvalues(m: IntMatrix) -> list[int]:
    """Integer roots (with multiplicity) of the characteristic polynomial, 2x2."""
    if m.dim != 2:
        raise ValueError("integer_eigenvalues is for 2x2 matrices")
    t, d = m.trace(), m.det()
    disc = t * t - 4 * d
    if disc < 0:
        return []
    r = isqrt(disc)
    if r * r != disc:
        return []
    if (t - r) % 2 != 0:
        return []
    return sorted([(t - r) // 2, (t + r) // 2])


def is_expansion(m: IntMatrix) -> bool:
    """True iff every eigenvalue has modulus strictly greater than 1.

    d <= 2 is decided by sign analysis of the characteristic polynomial;
    larger d uses an exact Schur-Cohn test on the reversed polynomial.
    """
    d = m.dim
    if d == 1:
        return abs(m.rows[0][0]) > 1
    if d == 2:
        t, det = m.trace(), m.det()
        disc = t * t - 4 * det
        if disc < 0:
            return det > 1
        p1 = 1 - t + det
        p_1 = 1 + t + det
        if p1 == 0 or p_1 == 0:
            return False
        if p1 < 0 and p_1 < 0:
            return True
        return p1 > 0 and p_1 > 0 and abs(t) > 2
    coeffs = char_poly(m)
    if coeffs[-1] == 0:  # zero eigenvalue
        return False
    if sum(coeffs) == 0:  # p(1) = 0
        return False
    if sum(c * (-1) ** (d - i) for i, c in enumerate(coeffs)) == 0:  # p(-1) = 0
        return False
    return _all_roots_in_open_unit_disk(list(reversed(coeffs)))


def _all_roots_in_open_unit_disk(coeffs: list[int]) -> bool:
    """Exact Schur-Cohn recursion; coeffs[0] is the leading coefficient."""
    c = [x for x in coeffs]
    while c and c[0] == 0:
        c.pop(0)
    if not c:
        return False
    while len(c) > 1:
        an, a0 = c[0], c[-1]
        if abs(a0) >= abs(an):
            return False
        # T[f](x) = (an*f(x) - a0*f*(x)) / x has degree one less
        nxt = [an * c[i] - a0 * c[len(c) - 1 - i] for i in range(len(c) - 1)]
        while nxt and nxt[0] == 0:
            nxt.pop(0)
        if not nxt:
            return False  # self-inversive remainder: roots not strictly inside
        c = nxt
    return True


# ---------------------------------------------------------------------------
# subgroup enumeration
# ---------------------------------------------------------------------------


def enumerate_subgroups(d: int, max_index: int) -> list[HnfBasis]:
    """All finite-index subgroups of Z^d with index <= max_index, canonical HNF.

    Ordered by (index, flattened entries) so enumerations are reproducible.
    """
    if d not in (1, 2, 3):
        raise ValueError("subgroup enumeration supports d in {1, 2, 3}")
    if max_index < 1:
        raise ValueError("max_index must be >= 1")
    found = []
    if d == 1:
        for a in range(1, max_index + 1):
            found.append(IntMatrix(((a,),)))
    elif d == 2:
        for a in range(1, max_index + 1):
            for c in range(1, max_index // a + 1):
                for b in range(c):
                    found.append(IntMatrix(((a, 0), (b, c))))
    else:
        for a in range(1, max_index + 1):
            for c in range(1, max_index // a + 1):
                for f in range(1, max_index // (a * c) + 1):
                    for b in range(c):
                        for e1 in range(f):
                            for e2 in range(f):
                                found.append(
                                    IntMatrix(((a, 0, 0), (b, c, 0), (e1, e2, f)))
                                )
    found.sort(key=lambda m: (abs(m.det()), m.rows))
    return [HnfBasis(m) for m in found]


# ---------------------------------------------------------------------------
# text syntax: rows split by ';', entries by ','
# ---------------------------------------------------------------------------


def _parse_int(token: str, pos: int) -> int:
    tok = token.strip()
    try:
        return int(tok)
    except ValueError:
        raise MatrixParseError(
            f"bad integer {tok!r} at position {pos}", token=tok, position=pos
        ) from None


def parse_matrix(text: str) -> IntMatrix:
    rows = []
    pos = 0
    for chunk in text.strip().split(";"):
        row = []
        for token in chunk.split(","):
            row.append(_parse_int(token, pos))
            pos += len(token) + 1
        rows.append(tuple(row))
    if len(set(len(r) for r in rows)) != 1 or len(rows) != len(rows[0]):
        raise MatrixParseError(f"not a square matrix: {text!r}", token=text, position=0)
    return IntMatrix(tuple(rows))


def parse_vector(text: str) -> Vec:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    out = []
    pos = 0
    for token in body.split(","):
        out.append(_parse_int(token, pos))
        pos += len(token) + 1
    return tuple(out)


def format_matrix(m: IntMatrix) -> str:
    return ";".join(",".join(str(x) for x in r) for r in m.rows)


def format_vector(v: Vec) -> str:
    return ",".join(str(x) for x in v)
