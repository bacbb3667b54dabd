"""Constant-shape substitutions and their digit combinatorics.

Letters of the self-similar family built here are the nonzero digits of
the fundamental domain themselves, so patches print as digit vectors and
no arbitrary letter coding is needed.  Patches are sparse coordinate
maps; supports like the half-hex iterates are not boxes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SizeGuardError, WrongBranchError
from .intmat import (
    FundamentalDomain,
    IntMatrix,
    Vec,
    fundamental_domain,
    hnf,
    reduce_vec,
    validate_domain,
    vec_add,
    vec_sub,
    zero_vec,
)

Letter = Vec

HALF_HEX_BASE = IntMatrix(((2, 0), (0, 2)))
HALF_HEX_SUPPORT = ((0, 0), (1, 0), (0, 1), (1, -1))


class Patch:
    """Finite coordinate -> letter map, immutable after construction."""

    __slots__ = ("_cells",)

    def __init__(self, cells):
        self._cells = dict(cells)

    @property
    def support(self) -> frozenset:
        return frozenset(self._cells)

    def __getitem__(self, pos: Vec) -> Letter:
        return self._cells[tuple(pos)]

    def __contains__(self, pos) -> bool:
        return tuple(pos) in self._cells

    def __len__(self) -> int:
        return len(self._cells)

    def items(self):
        return sorted(self._cells.items())

    def shift(self, z: Vec) -> "Patch":
        """The patch of the translated point: new[k] = old[k + z]."""
        return Patch({vec_sub(pos, z): a for pos, a in self._cells.items()})

    def restrict(self, positions) -> "Patch":
        keep = {tuple(p) for p in positions}
        return Patch({p: a for p, a in self._cells.items() if p in keep})

    def agrees_with(self, other: "Patch") -> bool:
        common = self.support & other.support
        return all(self[p] == other[p] for p in common)

    def __eq__(self, other):
        return isinstance(other, Patch) and self._cells == other._cells

    def __hash__(self):
        return hash(frozenset(self._cells.items()))

    def __repr__(self):
        return f"Patch({len(self._cells)} cells)"

    def to_payload(self) -> list:
        return [[list(p), list(a)] for p, a in self.items()]

    @classmethod
    def from_payload(cls, payload) -> "Patch":
        return cls({tuple(p): tuple(a) for p, a in payload})


@dataclass(frozen=True)
class ConstantShapeSubstitution:
    """Rule letter -> pattern supported on a fixed fundamental domain."""

    base: IntMatrix
    domain: FundamentalDomain
    alphabet: frozenset
    table: dict

    def __post_init__(self):
        support = set(self.domain.reps)
        for letter in self.alphabet:
            if letter not in self.table:
                raise ValueError(f"no image pattern for letter {letter}")
            if set(self.table[letter]) != support:
                raise ValueError("image patterns must be supported exactly on F1")

    @property
    def dim(self) -> int:
        return self.base.dim

    def image(self, letter: Letter) -> dict:
        return self.table[letter]

    def is_self_similar(self) -> bool:
        """True when letters are the nonzero digits and images follow them."""
        digits = set(self.domain.reps) - {zero_vec(self.dim)}
        if self.alphabet != frozenset(digits):
            return False
        for a in self.alphabet:
            img = self.table[a]
            if img[zero_vec(self.dim)] != a:
                return False
            if any(img[f] != f for f in digits):
                return False
        return True


def sigma_L(base: IntMatrix, domain: FundamentalDomain | None = None) -> ConstantShapeSubstitution:
    """The self-similar rule: keep the letter at the origin, write the digit
    elsewhere.  Needs |det| >= 3 so the alphabet has at least two letters."""
    if abs(base.det()) < 3:
        raise WrongBranchError(f"|det| = {abs(base.det())} < 3: alphabet too small")
    if domain is None:
        domain = fundamental_domain(base)
    if domain.base != base:
        domain = validate_domain(base, domain.reps)
    zero = zero_vec(base.dim)
    digits = [f for f in domain.reps if f != zero]
    table = {}
    for a in digits:
        img = {zero: a}
        img.update({f: f for f in digits})
        table[a] = img
    return ConstantShapeSubstitution(
        base=base, domain=domain, alphabet=frozenset(digits), table=table
    )


def half_hex() -> ConstantShapeSubstitution:
    """The lattice recoding of the half-hexagon inflation."""
    return sigma_L(HALF_HEX_BASE, validate_domain(HALF_HEX_BASE, HALF_HEX_SUPPORT))


# ---------------------------------------------------------------------------
# supports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportCache:
    """Supports F_0 = {0}, F_{n+1} = L(F_n) + F_1 of the iterated rule."""

    substitution: ConstantShapeSubstitution
    levels: tuple[frozenset, ...]

    def level(self, n: int) -> frozenset:
        return self.levels[n]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1


_SUPPORT_GUARD = 4_000_000


def supports(s: ConstantShapeSubstitution, n: int) -> SupportCache:
    det = abs(s.base.det())
    if det**n > _SUPPORT_GUARD:
        raise SizeGuardError(f"|F_{n}| = {det}^{n} exceeds the size guard")
    levels = [frozenset({zero_vec(s.dim)})]
    for _ in range(n):
        prev = levels[-1]
        nxt = set()
        for j in prev:
            lj = s.base.mul_vec(j)
            for f in s.domain.reps:
                nxt.add(vec_add(lj, f))
        levels.append(frozenset(nxt))
    for k, lv in enumerate(levels):
        assert len(lv) == det**k, "supports must have |det|^n points"
    return SupportCache(substitution=s, levels=tuple(levels))


def folner_defect(cache: SupportCache, n: int, directions) -> Fraction:
    """max over v of |F_n symmetric-difference (F_n + v)| / |F_n|, exact."""
    fn = cache.level(n)
    worst = Fraction(0)
    for v in directions:
        v = tuple(int(x) for x in v)
        shifted = {vec_add(p, v) for p in fn}
        worst = max(worst, Fraction(len(fn ^ shifted), len(fn)))
    return worst


def folner_trend_ok(s: ConstantShapeSubstitution, n_max: int = 5, directions=None) -> bool:
    """Monotone-decrease diagnostic for the support boundary ratio.

    The library's subshift guarantees are stated for rules whose defect
    sequence is non-increasing over the tested range; this is a bounded
    surrogate for the amenability hypothesis on the supports, not a
    proof of it.
    """
    if directions is None:
        directions = [
            tuple(1 if i == j else 0 for i in range(s.dim)) for j in range(s.dim)
        ]
    cache = supports(s, n_max)
    seq = [folner_defect(cache, n, directions) for n in range(1, n_max + 1)]
    return all(a >= b for a, b in zip(seq, seq[1:]))


# ---------------------------------------------------------------------------
# digits of positions and fixed points
# ---------------------------------------------------------------------------


def valuation(s: ConstantShapeSubstitution, v: Vec) -> int:
    """Largest p with v in L^p(Z^d); v must be nonzero."""
    v = tuple(int(x) for x in v)
    if v == zero_vec(s.dim):
        raise ValueError("valuation undefined at the origin")
    p = 0
    while True:
        w = s.base.solve_exact(v)
        if w is None:
            return p
        v = w
        p += 1


def tau(s: ConstantShapeSubstitution, v: Vec) -> Letter:
    """First nonzero digit of v: v = L^{p+1}(z) + L^p(f) with minimal p."""
    v = tuple(int(x) for x in v)
    if v == zero_vec(s.dim):
        raise ValueError("tau undefined at the origin")
    while True:
        w = s.base.solve_exact(v)
        if w is None:
            digit, _ = reduce_vec(v, s.domain)
            assert digit != zero_vec(s.dim)
            return digit
        v = w


def fixed_point_patch(s: ConstantShapeSubstitution, seed: Letter, region) -> Patch:
    """Letters of the fixed point with the given origin letter, on the region."""
    seed = tuple(seed)
    if seed not in s.alphabet:
        raise ValueError(f"seed {seed} is not a letter")
    zero = zero_vec(s.dim)
    cells = {}
    for pos in region:
        pos = tuple(int(x) for x in pos)
        cells[pos] = seed if pos == zero else tau(s, pos)
    return Patch(cells)


def substitute(s: ConstantShapeSubstitution, p: Patch) -> Patch:
    """One application of the rule: letter at L(j) + f is image(p_j) at f."""
    cells = {}
    for j, a in p.items():
        lj = s.base.mul_vec(j)
        for f, b in s.image(a).items():
            cells[vec_add(lj, f)] = b
    return Patch(cells)


def fixed_point_count(s: ConstantShapeSubstitution) -> int:
    """Number of fixed points of the rule.

    A letter fixed at the origin of its own image generates a nested
    sequence of patches, hence a fixed point; distinct seeds give points
    differing at the origin.
    """
    zero = zero_vec(s.dim)
    return sum(1 for a in s.alphabet if s.image(a)[zero] == a)


# ---------------------------------------------------------------------------
# the covering rest set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KSetReport:
    points: frozenset
    stable_from: int | None
    m_max: int
    coverage_ok: bool
    coverage_radius: int
    coverage_depth: int

    def to_payload(self) -> dict:
        return {
            "points": sorted(list(p) for p in self.points),
            "stable_from": self.stable_from,
            "m_max": self.m_max,
            "coverage_ok": self.coverage_ok,
            "coverage_radius": self.coverage_radius,
            "coverage_depth": self.coverage_depth,
        }


def k_set(
    s: ConstantShapeSubstitution,
    m_max: int,
    coverage_radius: int = 8,
    coverage_depth: int | None = None,
) -> KSetReport:
    """Union over m <= m_max of (Id - L^m)^{-1}(F_m) intersected with Z^d.

    Also reports the first m from which the union stops growing and
    whether translates L^n(K) + F_n cover a centered test box.
    """
    cache = supports(s, m_max)
    ident = IntMatrix.identity(s.dim)
    stages = []
    points: set = set()
    for m in range(1, m_max + 1):
        mat = ident - (s.base**m)
        for f in cache.level(m):
            x = mat.solve_exact(f)
            if x is not None:
                points.add(x)
        stages.append(frozenset(points))
    stable_from = None
    for m in range(len(stages) - 1, 0, -1):
        if stages[m - 1] == stages[-1]:
            stable_from = m
        else:
            break
    cov_depth = coverage_depth
    if cov_depth is None:
        cov_depth = m_max + 1
        while abs(s.base.det()) ** cov_depth < (4 * coverage_radius) ** s.dim:
            cov_depth += 1
    covered: set = set()
    cov_cache = supports(s, cov_depth)
    for n in range(cov_depth + 1):
        ln = s.base**n
        for k in points:
            lk = ln.mul_vec(k)
            for f in cov_cache.level(n):
                covered.add(vec_add(lk, f))
    box = _box(s.dim, coverage_radius)
    ok = all(p in covered for p in box)
    return KSetReport(
        points=frozenset(points),
        stable_from=stable_from,
        m_max=m_max,
        coverage_ok=ok,
        coverage_radius=coverage_radius,
        coverage_depth=cov_depth,
    )


def _box(d: int, radius: int):
    from itertools import product

    return [tuple(t) for t in product(range(-radius, radius + 1), repeat=d)]


# ---------------------------------------------------------------------------
# recognizability
# ---------------------------------------------------------------------------


def recognizability_check(
    s: ConstantShapeSubstitution,
    n: int,
    window_radius: int,
    seed: Letter | None = None,
) -> tuple[bool, tuple | None]:
    """Windowed check that equal F_n-patches force congruence mod L^n(Z^d).

    Returns (True, None) or (False, (a, b)) with a counterexample pair.
    Equal windows always force congruent positions for the self-similar
    family, so any counterexample signals an implementation bug; the check
    doubles as a self-test.
    """
    if seed is None:
        seed = min(s.alphabet)
    cache = supports(s, n)
    fn = sorted(cache.level(n))
    basis = hnf(s.base**n)
    box = _box(s.dim, window_radius)
    patches: dict = {}
    zero = zero_vec(s.dim)
    for a in box:
        sig = []
        for f in fn:
            pos = vec_add(a, f)
            sig.append(seed if pos == zero else tau(s, pos))
        sig = tuple(sig)
        if sig in patches:
            b = patches[sig]
            if not basis.contains(vec_sub(a, b)):
                return False, (a, b)
        else:
            patches[sig] = a
    return True, None


def primitivity_witness(s: ConstantShapeSubstitution, n_max: int = 2) -> int | None:
    """Least n <= n_max with every letter occurring in every n-th image."""
    patches = {a: Patch({zero_vec(s.dim): a}) for a in s.alphabet}
    for n in range(1, n_max + 1):
        patches = {a: substitute(s, p) for a, p in patches.items()}
        if all(
            {letter for _, letter in p.items()} == s.alphabet for p in patches.values()
        ):
            return n
    return None
