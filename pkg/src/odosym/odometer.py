"""Truncated inverse-limit arithmetic for Z^d odometers.

A constant-base odometer is the inverse limit of Z^d / L^n(Z^d) for an
expansion matrix L; a chain base is an explicit nested list of lattices.
Digits are stored as canonical HNF-box representatives at every level, so
equality of truncated points is plain tuple equality.

The normalizer condition at depth n asks for an exponent m with

    adj(L^n) * M * L^m == 0  (mod det(L^n)).

The key facts that make this decidable exactly: the condition is upward
closed in m (multiply by L), and the power sequence L^m modulo det(L^n)
is eventually periodic.  So existence is settled by one evaluation inside
the detected cycle and the least witness by binary search below it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    BaseMismatchError,
    DepthError,
    MissingCertificateError,
    NotExpansionError,
    SizeGuardError,
)
from .intmat import (
    HnfBasis,
    IntMatrix,
    Vec,
    enumerate_subgroups,
    hnf,
    is_expansion,
    lattice_intersection,
    vec_add,
    zero_vec,
)

# ---------------------------------------------------------------------------
# bases and points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantBase:
    """Levels Z_n = L^n(Z^d) for a fixed expansion matrix L."""

    matrix: IntMatrix
    max_depth: int = 24

    def __post_init__(self):
        if not is_expansion(self.matrix):
            raise NotExpansionError(f"not an expansion matrix: {self.matrix}")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def level_basis(self, n: int) -> HnfBasis:
        if n < 0 or n > self.max_depth:
            raise DepthError(f"level {n} outside supported range")
        return _power_hnf(self.matrix, n)

    def capability(self) -> int:
        return self.max_depth


@dataclass(frozen=True)
class ChainBase:
    """An explicit strictly nested chain of finite-index lattices."""

    bases: tuple[HnfBasis, ...]

    def __post_init__(self):
        for a, b in zip(self.bases, self.bases[1:]):
            if not a.contains_lattice(b):
                raise ValueError("chain levels must be nested")
            if a.matrix == b.matrix:
                raise ValueError("chain levels must be strictly nested")

    @property
    def dim(self) -> int:
        return self.bases[0].dim

    def level_basis(self, n: int) -> HnfBasis:
        if n < 0 or n >= len(self.bases):
            raise DepthError(f"level {n} outside chain of length {len(self.bases)}")
        return self.bases[n]

    def capability(self) -> int:
        return len(self.bases) - 1


OdometerBase = ConstantBase | ChainBase


@lru_cache(maxsize=None)
def _power_hnf_cached(rows: tuple, n: int) -> HnfBasis:
    return hnf(IntMatrix(rows) ** n)


def _power_hnf(m: IntMatrix, n: int) -> HnfBasis:
    return _power_hnf_cached(m.rows, n)


@dataclass(frozen=True)
class OdometerPoint:
    """Digits g_0..g_N, each the canonical representative mod level n."""

    base: OdometerBase
    digits: tuple[Vec, ...]

    def __post_init__(self):
        for n in range(len(self.digits) - 1):
            basis = self.base.level_basis(n)
            diff = tuple(a - b for a, b in zip(self.digits[n + 1], self.digits[n]))
            if not basis.contains(diff):
                raise ValueError(f"digit compatibility broken between levels {n},{n+1}")

    @property
    def depth(self) -> int:
        return len(self.digits) - 1

    def digit(self, n: int) -> Vec:
        return self.digits[n]


def kappa_embed(v: Vec, base: OdometerBase, depth: int) -> OdometerPoint:
    """Embed an integer vector: digits are v mod Z_n for n = 0..depth."""
    if depth > base.capability():
        raise DepthError(f"depth {depth} exceeds base capability")
    v = tuple(int(x) for x in v)
    digits = tuple(base.level_basis(n).reduce_vec(v) for n in range(depth + 1))
    return OdometerPoint(base, digits)


def add(p: OdometerPoint, q: OdometerPoint) -> OdometerPoint:
    """Group law: digit-wise sum, re-reduced to canonical representatives."""
    if p.base != q.base or p.depth != q.depth:
        raise BaseMismatchError("points must share base and depth")
    digits = tuple(
        p.base.level_basis(n).reduce_vec(vec_add(p.digits[n], q.digits[n]))
        for n in range(p.depth + 1)
    )
    return OdometerPoint(p.base, digits)


def return_time_check(
    base: OdometerBase, level: int, digit: Vec, probes
) -> bool:
    """Verify the return-time law at one cylinder.

    For each probe m, translating a point of the cylinder [digit]_level by
    m stays in the cylinder exactly when m lies in Z_level.
    """
    basis = base.level_basis(level)
    a = basis.reduce_vec(tuple(digit))
    for m in probes:
        m = tuple(int(x) for x in m)
        stays = basis.reduce_vec(vec_add(a, m)) == a
        member = basis.contains(m)
        if stays != member:
            return False
    return True


# ---------------------------------------------------------------------------
# normalizer condition for constant bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NcCertificate:
    """Outcome of the depth-n normalizer-condition search.

    m is the least witness exponent, or None when no exponent works; the
    cycle of L^m mod det(L^n) starts at period_start with the recorded
    period_length, which is what makes the Absent verdict exact.
    """

    n: int
    m: int | None
    period_start: int
    period_length: int

    @property
    def present(self) -> bool:
        return self.m is not None

    def to_payload(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "period_start": self.period_start,
            "period_length": self.period_length,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "NcCertificate":
        return cls(
            n=payload["n"],
            m=payload["m"],
            period_start=payload["period_start"],
            period_length=payload["period_length"],
        )


_MAX_CYCLE_STEPS = 8_000_000


def _mat_mul_mod(a, b, mod, d):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(d)) % mod for j in range(d))
        for i in range(d)
    )


def _mat_mod(m: IntMatrix, mod: int):
    return tuple(tuple(x % mod for x in r) for r in m.rows)


@lru_cache(maxsize=None)
def _power_cycle(rows: tuple, mod: int) -> tuple[int, int]:
    """(preperiod, period) of the sequence m -> L^m mod `mod`, by Brent.

    L^m lies in the ring spanned by Id, L, ..., L^{d-1}, so the cycle is
    tracked through its coordinates in that basis (the Cayley-Hamilton
    recurrence), which is much cheaper than full matrix states and gives
    a valid cycle of the power sequence itself.
    """
    from .intmat import char_poly

    d = len(rows)
    coeffs = char_poly(IntMatrix(rows))  # [1, c_{d-1}, ..., c_0]
    p = [c % mod for c in reversed(coeffs[1:])]  # p[i] multiplies L^i

    if d == 2:
        p0, p1 = p

        def step(s):
            a, b = s  # L^m = a*Id + b*L
            return ((-p0 * b) % mod, (a - p1 * b) % mod)

        start = (1, 0)
    else:

        def step(s):
            top = s[d - 1]
            out = [(-p[0] * top) % mod]
            for i in range(1, d):
                out.append((s[i - 1] - p[i] * top) % mod)
            return tuple(out)

        start = tuple(1 if i == 0 else 0 for i in range(d))

    power = lam = 1
    tortoise = start
    hare = step(start)
    steps = 0
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        lam += 1
        steps += 1
        if steps > _MAX_CYCLE_STEPS:
            raise SizeGuardError("power-cycle detection exceeded desk-scale guard")
    tortoise = hare = start
    for _ in range(lam):
        hare = step(hare)
    mu = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        mu += 1
        if mu > _MAX_CYCLE_STEPS:
            raise SizeGuardError("power-cycle detection exceeded desk-scale guard")
    return mu, lam


@lru_cache(maxsize=None)
def _binary_powers(rows: tuple, mod: int, upto_bit: int):
    d = len(rows)
    out = [tuple(tuple(x % mod for x in r) for r in rows)]
    for _ in range(upto_bit):
        out.append(_mat_mul_mod(out[-1], out[-1], mod, d))
    return tuple(out)


def _pow_mod(rows: tuple, e: int, mod: int):
    d = len(rows)
    acc = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
    if e == 0:
        return acc
    bits = e.bit_length()
    table = _binary_powers(rows, mod, bits)
    k = 0
    while e:
        if e & 1:
            acc = _mat_mul_mod(acc, table[k], mod, d)
        e >>= 1
        k += 1
    return acc


def nc_search(L: IntMatrix, M: IntMatrix, n: int) -> NcCertificate:
    """Decide the depth-n normalizer condition for an integer matrix M.

    Exact for the fixed n: returns the least witness exponent, or Absent
    together with the detected cycle of L^m mod det(L^n).
    """
    if n < 1:
        raise ValueError("depth n must be >= 1")
    if not is_expansion(L):
        raise NotExpansionError(f"not an expansion matrix: {L}")
    d = L.dim
    ln = L**n
    mod = abs(ln.det())
    a_rows = (ln.adjugate() * M).rows

    def cond(m: int) -> bool:
        lm = _pow_mod(L.rows, m, mod)
        prod = _mat_mul_mod(tuple(tuple(x % mod for x in r) for r in a_rows), lm, mod, d)
        return all(x == 0 for r in prod for x in r)

    mu, lam = _power_cycle(L.rows, mod)
    if not cond(mu):
        return NcCertificate(n=n, m=None, period_start=mu, period_length=lam)
    lo, hi = 0, mu  # least witness is <= mu since cond is upward closed
    while lo < hi:
        mid = (lo + hi) // 2
        if cond(mid):
            hi = mid
        else:
            lo = mid + 1
    return NcCertificate(n=n, m=lo, period_start=mu, period_length=lam)


def nc_bounded_check(L: IntMatrix, M: IntMatrix, n_max: int = 6) -> list[NcCertificate]:
    """Certificates for n = 1..n_max; M passes at depth n_max iff all present."""
    return [nc_search(L, M, n) for n in range(1, n_max + 1)]


def nc_decide(L: IntMatrix, M: IntMatrix, n: int) -> bool:
    """Exact depth-n verdict without cycle detection.

    Per prime p dividing det(L), the condition at depth n only depends on
    the lattice L^m(Z^d) + p^a Z^d (a = v_p(det L^n)), which evolves by a
    deterministic map on a finite poset and is strictly decreasing until
    stationary, so it is constant from d*a on.  One evaluation past the
    bound therefore settles existence.
    """
    if n < 1:
        raise ValueError("depth n must be >= 1")
    if not is_expansion(L):
        raise NotExpansionError(f"not an expansion matrix: {L}")
    d = L.dim
    ln = L**n
    mod = abs(ln.det())
    a = tuple(tuple(x % mod for x in r) for r in (ln.adjugate() * M).rows)
    m_star = d * n * abs(L.det()).bit_length()
    prod = _mat_mul_mod(a, _pow_mod(L.rows, m_star, mod), mod, d)
    return all(x == 0 for r in prod for x in r)


def nc_passes(L: IntMatrix, M: IntMatrix, n_max: int = 6) -> bool:
    """True iff the condition holds at every depth 1..n_max (lean route)."""
    return all(nc_decide(L, M, n) for n in range(1, n_max + 1))


def verify_nc_certificate(L: IntMatrix, M: IntMatrix, cert: NcCertificate) -> bool:
    """Re-check a certificate from scratch (full-period scan for Absent)."""
    d = L.dim
    ln = L**cert.n
    mod = abs(ln.det())
    a = _mat_mod(ln.adjugate() * M, mod)

    def cond(m):
        prod = _mat_mul_mod(a, _pow_mod(L.rows, m, mod), mod, d)
        return all(x == 0 for r in prod for x in r)

    if cert.present:
        if not cond(cert.m):
            return False
        return cert.m == 0 or not cond(cert.m - 1)
    return not any(
        cond(m) for m in range(cert.period_start, cert.period_start + cert.period_length)
    )


# ---------------------------------------------------------------------------
# the epimorphism digit map
# ---------------------------------------------------------------------------


def epimorphism_digits(
    M: IntMatrix,
    p: OdometerPoint,
    certs: list[NcCertificate],
    out_depth: int | None = None,
) -> OdometerPoint:
    """Digit map of the M-epimorphism: level n reads M * g_{m(n)} mod Z_n.

    certs must witness the normalizer condition at every output level; the
    witness exponents decide which input digit feeds each output level, so
    the input must be at least as deep as the largest witness used.
    out_depth defaults to the input depth (enough whenever M commutes with
    the base, where every witness is m(n) = n).
    """
    base = p.base
    if out_depth is None:
        out_depth = p.depth
    witness = {c.n: c.m for c in certs if c.m is not None}
    out = [zero_vec(base.dim)]
    for n in range(1, out_depth + 1):
        if n not in witness:
            raise MissingCertificateError(f"no witness certificate at level {n}")
        m = witness[n]
        if m > p.depth:
            raise DepthError(
                f"witness exponent {m} at level {n} exceeds point depth {p.depth}"
            )
        moved = M.mul_vec(p.digit(m))
        out.append(base.level_basis(n).reduce_vec(moved))
    return OdometerPoint(base, tuple(out))


# ---------------------------------------------------------------------------
# chains and the universal odometer
# ---------------------------------------------------------------------------


def universal_chain(max_index: int, d: int) -> ChainBase:
    """Intersect the enumeration of all subgroups of index <= max_index.

    Consecutive repeats are dropped so the stored chain is strictly nested;
    the inverse limit is unchanged.
    """
    levels = []
    current = None
    for sub in enumerate_subgroups(d, max_index):
        current = sub if current is None else lattice_intersection(current, sub)
        if not levels or levels[-1].matrix != current.matrix:
            levels.append(current)
    return ChainBase(tuple(levels))


@dataclass(frozen=True)
class ChainNcResult:
    """Bounded normalizer-condition search along an explicit chain."""

    n: int
    m: int | None
    searched_to: int

    @property
    def present(self) -> bool:
        return self.m is not None


def chain_nc_check(chain: ChainBase, M: IntMatrix, n: int) -> ChainNcResult:
    """Least m <= chain length with M * Z_m inside Z_n, if any."""
    target = chain.level_basis(n)
    for m in range(len(chain.bases)):
        cols = chain.level_basis(m).matrix.columns()
        if all(target.contains(M.mul_vec(c)) for c in cols):
            return ChainNcResult(n=n, m=m, searched_to=chain.capability())
    return ChainNcResult(n=n, m=None, searched_to=chain.capability())
