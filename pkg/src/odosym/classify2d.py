"""Complete classification of the symmetry group of a constant-base Z^2 odometer.

classify(L) names the group of unimodular matrices satisfying the
normalizer condition for the base L, and is_member(L, M) decides
membership of a single matrix exactly.  The branches:

  * rad(det L) divides trace L: the full group GL(2,Z).
  * no integer eigenvalue: the GL(2,Z) centralizer of L, finite when the
    spectrum is complex, infinite (fundamental automorph) when it is real
    irrational.
  * integer eigenvalues: L is conjugate over GL(2,Z) to an upper
    triangular matrix, and the group is read off the triangular
    arithmetic of (p, q, s): a Klein four-group, the two-element group
    {+-Id}, or a virtually-Z group of (conjugated) upper triangular
    unimodular matrices.

Everything is exact integer arithmetic; the Pell machinery for the real
irrational case runs on continued fractions of the discriminant surd.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from .errors import NotExpansionError, PellDomainError, WrongBranchError
from .intmat import (
    IntMatrix,
    commutes,
    integer_eigenvalues,
    is_expansion,
    radical,
)

_ID = IntMatrix.identity(2)
_SWAP = IntMatrix(((0, 1), (1, 0)))


# ---------------------------------------------------------------------------
# class descriptions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FullGL2:
    """The whole group GL(2,Z)."""

    tag = "full-gl2"
    finite = False

    def generators(self):
        return (_SWAP, IntMatrix(((1, 1), (0, 1))), -_ID)


@dataclass(frozen=True)
class CentralizerFinite:
    """Finite centralizer, listed exhaustively."""

    elements: tuple[IntMatrix, ...]
    tag = "centralizer-finite"
    finite = True

    def generators(self):
        return self.elements


@dataclass(frozen=True)
class CentralizerInfinite:
    """Infinite centralizer: -Id together with a fundamental automorph."""

    automorph: IntMatrix
    tag = "centralizer-infinite"
    finite = False

    def generators(self):
        return (-_ID, self.automorph)


@dataclass(frozen=True)
class KleinFour:
    """Four involutions (including +-Id), isomorphic to (Z/2Z)^2."""

    elements: tuple[IntMatrix, ...]
    tag = "klein-four"
    finite = True

    def generators(self):
        return self.elements


@dataclass(frozen=True)
class OrderTwo:
    """Just {Id, -Id}."""

    tag = "order-two"
    finite = True
    elements = (_ID, -_ID)

    def generators(self):
        return self.elements


@dataclass(frozen=True)
class ParamFamily:
    """q = k (p - s): four explicit one-parameter families of matrices."""

    k: int
    kind = "param-family"


@dataclass(frozen=True)
class UpperTriangularUnimodular:
    """All upper triangular unimodular matrices in the adapted basis."""

    kind = "upper-triangular-unimodular"


@dataclass(frozen=True)
class VirtuallyZ:
    """Infinite group with a finite-index Z subgroup.

    conjugator P maps members to upper triangular matrices
    (P M P^{-1}); basis_change W carries the original base to its upper
    triangular form T = W^{-1} L W whose entries (p, q, s) drive the
    membership relation.
    """

    conjugator: IntMatrix
    description: ParamFamily | UpperTriangularUnimodular
    generator: IntMatrix
    basis_change: IntMatrix
    tri: tuple[int, int, int]  # (p, q, s) of the adapted triangular form
    relation_case: str  # "relation" or "upper-triangular"
    derived_witness: IntMatrix | None
    tag = "virtually-z"
    finite = False

    def generators(self):
        return (-_ID, self.generator)


NormalizerClass = (
    FullGL2 | CentralizerFinite | CentralizerInfinite | KleinFour | OrderTwo | VirtuallyZ
)


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    reason: str
    witness: tuple | None = None

    def to_payload(self) -> dict:
        return {
            "member": self.member,
            "reason": self.reason,
            "witness": list(self.witness) if self.witness is not None else None,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "MembershipVerdict":
        w = payload.get("witness")
        return cls(
            member=payload["member"],
            reason=payload["reason"],
            witness=None if w is None else tuple(w),
        )


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _require_expansion_2x2(L: IntMatrix):
    if L.dim != 2:
        raise ValueError("classification is for 2x2 bases")
    if not is_expansion(L):
        raise NotExpansionError(f"not an expansion matrix: {L}")


def _xgcd(a: int, b: int):
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def _primitive(v: tuple[int, int]) -> tuple[int, int]:
    a, b = v
    g = gcd(a, b)
    a, b = a // g, b // g
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    return a, b


def _eigenvector(L: IntMatrix, t: int) -> tuple[int, int]:
    """Primitive integer eigenvector for the integer eigenvalue t."""
    (p, q), (r, s) = L.rows
    if q != 0 or p != t:
        v = (q, t - p) if (q, t - p) != (0, 0) else (t - s, r)
    else:
        v = (1, 0)
    assert v != (0, 0)
    v = _primitive(v)
    assert L.mul_vec(v) == (t * v[0], t * v[1])
    return v


def _extend_unimodular(v: tuple[int, int]) -> IntMatrix:
    """Unimodular matrix whose first column is the primitive vector v."""
    a, b = v
    x, y, g = _xgcd(a, b)
    assert g == 1
    return IntMatrix(((a, -y), (b, x)))


def _inv_unimodular(u: IntMatrix) -> IntMatrix:
    d = u.det()
    adj = u.adjugate()
    return adj if d == 1 else -adj


@dataclass(frozen=True)
class _Triangular:
    """Adapted basis data: T = W^{-1} L W upper triangular."""

    W: IntMatrix
    p: int
    q: int
    s: int

    def pull(self, M: IntMatrix) -> IntMatrix:
        return _inv_unimodular(self.W) * M * self.W

    def push(self, M: IntMatrix) -> IntMatrix:
        return self.W * M * _inv_unimodular(self.W)


def _triangular_form(L: IntMatrix) -> _Triangular:
    (p, q), (r, s) = L.rows
    if r == 0:
        return _Triangular(_ID, p, q, s)
    if q == 0:
        return _Triangular(_SWAP, s, r, p)
    t1, t2 = integer_eigenvalues(L)
    w = _extend_unimodular(_eigenvector(L, t1))
    t = _inv_unimodular(w) * L * w
    assert t.rows[1][0] == 0 and t.rows[0][0] == t1 and t.rows[1][1] == t2
    return _Triangular(w, t.rows[0][0], t.rows[0][1], t.rows[1][1])


def eigenvector_matrix(L: IntMatrix) -> IntMatrix:
    """Columns: primitive eigenvectors for the sorted integer eigenvalues."""
    t1, t2 = integer_eigenvalues(L)
    c1 = _eigenvector(L, t1)
    c2 = _eigenvector(L, t2)
    return IntMatrix(((c1[0], c2[0]), (c1[1], c2[1])))


# ---------------------------------------------------------------------------
# Pell machinery: x^2 - D y^2 = +-4
# ---------------------------------------------------------------------------


def _pell_pm4(D: int) -> tuple[int, int]:
    """Minimal (x, y) with y > 0 and x >= 0 solving x^2 - D y^2 = +-4."""
    if D <= 0 or isqrt(D) ** 2 == D:
        raise PellDomainError(f"discriminant must be positive non-square, got {D}")
    for y in range(1, 2001):
        dy = D * y * y
        hits = []
        for target in (dy - 4, dy + 4):
            if target >= 0:
                x = isqrt(target)
                if x * x == target:
                    hits.append(x)
        if hits:
            return min(hits), y
    # continued fraction of sqrt(D); convergents catch big fundamental units
    a0 = isqrt(D)
    m, dd, a = 0, 1, a0
    p_prev, p_cur = 1, a0
    q_prev, q_cur = 0, 1
    candidates = []
    for _ in range(600):
        v = p_cur * p_cur - D * q_cur * q_cur
        if v in (4, -4):
            candidates.append((abs(p_cur), q_cur))
        if v in (1, -1):
            candidates.append((2 * abs(p_cur), 2 * q_cur))
        if candidates and len(candidates) >= 2:
            break
        m = dd * a - m
        dd = (D - m * m) // dd
        a = (a0 + m) // dd
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    if not candidates:
        raise PellDomainError(f"no fundamental solution found for D={D}")
    return min(candidates, key=lambda t: t[1])


def _pell_mul(D, a, b):
    """Product in the quadratic order: (x + y sqrt(D))/2 composition."""
    x = (a[0] * b[0] + D * a[1] * b[1])
    y = (a[0] * b[1] + a[1] * b[0])
    assert x % 2 == 0 and y % 2 == 0
    return x // 2, y // 2


def _canonical_pick(cands):
    """Deterministic tie-break: small entries, then large trace, then lex."""
    return min(cands, key=lambda m: (m.max_abs(), -m.trace(), m.rows))


def pell_fundamental_automorph(tr: int, det: int) -> IntMatrix:
    """Nontrivial unimodular matrix commuting with the companion of (tr, det).

    Solves x^2 - (tr^2 - 4 det) y^2 = +-4 and returns u*Id + y*C for the
    companion matrix C; minimal in max-entry absolute value.
    """
    disc = tr * tr - 4 * det
    if disc <= 0 or isqrt(disc) ** 2 == disc:
        raise PellDomainError(
            f"trace {tr}, det {det}: discriminant {disc} is not positive non-square"
        )
    x, y = _pell_pm4(disc)
    comp = IntMatrix(((0, -det), (1, tr)))
    cands = []
    for xs in (x, -x):
        if (xs - y * tr) % 2 == 0:
            u = (xs - y * tr) // 2
            m = IntMatrix.scalar(2, u) + comp.scale(y)
            assert m.det() in (1, -1)
            cands.append(m)
    return _canonical_pick(cands)


def _candidates_from_solution(L, g, x, y):
    (p, q), (r, s) = L.rows
    out = []
    for xs in (x, -x):
        delta, num12, num21 = (p - s) * y, q * y, r * y
        if delta % g or num12 % g or num21 % g:
            continue
        delta, m12, m21 = delta // g, num12 // g, num21 // g
        if (xs - delta) % 2:
            continue
        m22 = (xs - delta) // 2
        m = IntMatrix(((m22 + delta, m12), (m21, m22)))
        if m.det() in (1, -1):
            out.extend((m, -m))
    return out


def _centralizer_automorph(L: IntMatrix) -> IntMatrix:
    """Fundamental automorph of L itself (real irrational spectrum).

    Scans the Pell solutions x^2 - D' k^2 = +-4 in order of k, so the
    returned matrix is entry-minimal among nontrivial commuting
    unimodular matrices; falls back to powers of the continued-fraction
    fundamental solution when the scan range is exceeded.
    """
    (p, q), (r, s) = L.rows
    tr, det = L.trace(), L.det()
    disc = tr * tr - 4 * det
    g = gcd(gcd(abs(q), abs(r)), abs(p - s))
    assert g > 0 and disc % (g * g) == 0
    dp = disc // (g * g)
    for k in range(1, 2001):
        dk = dp * k * k
        cands = []
        for target in (dk - 4, dk + 4):
            if target >= 0:
                x = isqrt(target)
                if x * x == target:
                    cands.extend(_candidates_from_solution(L, g, x, k))
        if cands:
            best = _canonical_pick(cands)
            assert commutes(L, best) and best not in (_ID, -_ID)
            return best
    sol = _pell_pm4(dp)
    base = sol
    for _ in range(64):
        cands = _candidates_from_solution(L, g, *sol)
        if cands:
            best = _canonical_pick(cands)
            assert commutes(L, best) and best not in (_ID, -_ID)
            return best
        sol = _pell_mul(dp, sol, base)
    raise PellDomainError(f"automorph search failed for base {L}")


# ---------------------------------------------------------------------------
# finite centralizer enumeration
# ---------------------------------------------------------------------------


def _centralizer_finite_elements(L: IntMatrix) -> tuple[IntMatrix, ...]:
    """All unimodular matrices commuting with L, when that set is finite.

    The bound on m11 - m22 comes from the determinant constraint
    m11 m22 - (m11 - m22)^2 qr/(p-s)^2 = +-1, which is definite for a
    complex spectrum and factors over the integers for a square
    discriminant.
    """
    (p, q), (r, s) = L.rows
    tr, det = L.trace(), L.det()
    disc = tr * tr - 4 * det
    out = {(_ID).rows, (-_ID).rows}
    if p == s:
        # relations force m11 = m22 = u and m21 = m12 * r / q, with
        # u^2 - m12^2 r/q = +-1; qr < 0 gives a definite bound, qr a
        # perfect square factors as (qu - w m12)(qu + w m12) = +-q^2
        if q != 0:
            if disc < 0:
                bound = isqrt(abs(q) // max(1, abs(r))) + 1
            else:
                w = isqrt(q * r)
                assert w * w == q * r
                bound = q * q // max(1, w) + 1
            for m12 in range(-bound, bound + 1):
                if m12 == 0 or (m12 * r) % q:
                    continue
                m21 = m12 * r // q
                for unit in (1, -1):
                    usq = unit + m12 * m21
                    if usq < 0:
                        continue
                    u = isqrt(usq)
                    if u * u != usq:
                        continue
                    for uu in {u, -u}:
                        m = IntMatrix(((uu, m12), (m21, uu)))
                        if m.det() in (1, -1):
                            assert commutes(L, m)
                            out.add(m.rows)
        return _sorted_elements(out)
    if disc < 0:
        dbound = isqrt(4 * (p - s) ** 2 // abs(disc)) + 1
    else:
        w = isqrt(disc)
        assert w * w == disc
        dbound = (4 * (p - s) ** 2) // max(1, w) + 2
    for delta in range(-dbound, dbound + 1):
        if delta == 0:
            continue
        if (q * delta) % (p - s) or (r * delta) % (p - s):
            continue
        m12 = q * delta // (p - s)
        m21 = r * delta // (p - s)
        for unit in (1, -1):
            # m22^2 + delta m22 - (unit + m12 m21) = 0
            disc2 = delta * delta + 4 * (unit + m12 * m21)
            if disc2 < 0:
                continue
            rt = isqrt(disc2)
            if rt * rt != disc2:
                continue
            for sign in (1, -1):
                num = -delta + sign * rt
                if num % 2:
                    continue
                m22 = num // 2
                m = IntMatrix(((m22 + delta, m12), (m21, m22)))
                if m.det() in (1, -1):
                    assert commutes(L, m)
                    out.add(m.rows)
    return _sorted_elements(out)


def _sorted_elements(rows_set) -> tuple[IntMatrix, ...]:
    return tuple(IntMatrix(r) for r in sorted(rows_set))


def centralizer(L: IntMatrix) -> NormalizerClass:
    """GL(2,Z) centralizer of L: full group, finite list, or automorph pair."""
    _require_expansion_2x2(L)
    (p, q), (r, s) = L.rows
    if q == 0 and r == 0 and p == s:
        return FullGL2()
    tr, det = L.trace(), L.det()
    disc = tr * tr - 4 * det
    if disc > 0 and isqrt(disc) ** 2 != disc:
        return CentralizerInfinite(_centralizer_automorph(L))
    return CentralizerFinite(_centralizer_finite_elements(L))


# ---------------------------------------------------------------------------
# the classification
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _classify_cached(rows: tuple) -> NormalizerClass:
    L = IntMatrix(rows)
    tr, det = L.trace(), L.det()
    if tr % radical(det) == 0:
        return FullGL2()
    eig = integer_eigenvalues(L)
    if not eig:
        disc = tr * tr - 4 * det
        if disc < 0:
            return CentralizerFinite(_centralizer_finite_elements(L))
        return CentralizerInfinite(_centralizer_automorph(L))
    return _classify_triangular(L, _triangular_form(L))


def classify(L: IntMatrix) -> NormalizerClass:
    """Name the group of unimodular matrices admissible for the base L."""
    _require_expansion_2x2(L)
    return _classify_cached(L.rows)


def _derived_witness(conjugator: IntMatrix) -> IntMatrix:
    """Commutator-subgroup member: the conjugate of [[1,2],[0,1]].

    Members map to upper triangular unimodular matrices under the
    conjugator, whose commutator subgroup is the even unipotents.
    """
    c_inv = _inv_unimodular(conjugator)
    return c_inv * IntMatrix(((1, 2), (0, 1))) * conjugator


def _classify_triangular(L: IntMatrix, td: _Triangular) -> NormalizerClass:
    p, q, s = td.p, td.q, td.s
    rp, rs = radical(p), radical(s)
    case1 = s % rp != 0 and p % rs == 0
    case2 = s % rp == 0 and p % rs != 0
    if case1 and q == 0:
        # diagonal: members are lower triangular here, upper after a swap
        td = _Triangular(td.W * _SWAP, s, 0, p)
        p, q, s = td.p, td.q, td.s
        case1, case2 = False, True
    if case1:
        if q % (p - s) == 0:
            k = q // (p - s)
            gen_t = IntMatrix(((1 - k, -(k * k)), (1, 1 + k)))
            u_inv = IntMatrix(((1, k), (0, 1)))
            conj = _SWAP * u_inv * _inv_unimodular(td.W)
            return VirtuallyZ(
                conjugator=conj,
                description=ParamFamily(k),
                generator=td.push(gen_t),
                basis_change=td.W,
                tri=(p, q, s),
                relation_case="relation",
                derived_witness=_derived_witness(conj),
            )
        c = gcd(abs(p - s), abs(q))
        g, h = (p - s) // c, q // c
        e0, f0, gg = _xgcd(h, -g)
        assert gg == 1
        e = e0 % abs(g)
        f = (e * h - 1) // g
        bez = IntMatrix(((e, f), (g, h)))
        assert bez.det() == 1
        bez_inv = _inv_unimodular(bez)
        gen_t = bez_inv * IntMatrix(((1, 1), (0, 1))) * bez
        conj = bez * _inv_unimodular(td.W)
        return VirtuallyZ(
            conjugator=conj,
            description=UpperTriangularUnimodular(),
            generator=td.push(gen_t),
            basis_change=td.W,
            tri=(p, q, s),
            relation_case="relation",
            derived_witness=_derived_witness(conj),
        )
    if case2:
        conj = _inv_unimodular(td.W)
        return VirtuallyZ(
            conjugator=conj,
            description=UpperTriangularUnimodular(),
            generator=td.push(IntMatrix(((1, 1), (0, 1)))),
            basis_change=td.W,
            tri=(p, q, s),
            relation_case="upper-triangular",
            derived_witness=_derived_witness(conj),
        )
    # neither radical divides across: the finite branches
    assert s % rp != 0 and p % rs != 0
    if (2 * q) % (p - s) == 0:
        off = 2 * q // (p - s)
        elems = {(_ID).rows, (-_ID).rows}
        for m11 in (1, -1):
            m = IntMatrix(((m11, m11 * off), (0, -m11)))
            elems.add(td.push(m).rows)
            elems.add(td.push(-m).rows)
        elements = _sorted_elements(elems)
        assert len(elements) == 4
        return KleinFour(elements)
    return OrderTwo()


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


def is_member(L: IntMatrix, M: IntMatrix) -> MembershipVerdict:
    """Exact membership of M in the symmetry group of the base L."""
    _require_expansion_2x2(L)
    if M.det() not in (1, -1):
        raise ValueError(f"matrix must be unimodular, det = {M.det()}")
    cls = classify(L)
    if isinstance(cls, FullGL2):
        return MembershipVerdict(True, "full-gl2")
    if isinstance(cls, (CentralizerFinite, CentralizerInfinite)):
        ok = commutes(L, M)
        return MembershipVerdict(ok, "centralizer-commutes")
    if isinstance(cls, KleinFour):
        return MembershipVerdict(M in cls.elements, "klein-four")
    if isinstance(cls, OrderTwo):
        return MembershipVerdict(M in cls.elements, "order-two")
    assert isinstance(cls, VirtuallyZ)
    td = _Triangular(cls.basis_change, *cls.tri)
    mt = td.pull(M)
    (m11, m12), (m21, m22) = mt.rows
    p, q, s = cls.tri
    if cls.relation_case == "upper-triangular":
        return MembershipVerdict(m21 == 0, "upper-triangular-adapted", witness=(m21,))
    lhs = (p - s) ** 2 * m12
    rhs = m21 * q * q + (p - s) * (m11 - m22) * q
    return MembershipVerdict(lhs == rhs, "triangular-relation", witness=(lhs, rhs))


# ---------------------------------------------------------------------------
# relation-route description for non-triangular bases with integer spectrum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationGroup:
    """Linear relation cutting out the group, in the original coordinates.

    With mb12 = r m12 - q m21 and mb22 = r m22 - s m21 - r m11 + p m21,
    membership of a unimodular M is mb12 * cg == mb22 * ce.  The group
    structure bound: finite abelianization, cyclic commutator subgroup.
    """

    eigenvectors: IntMatrix
    ce: int
    cg: int
    note: str = "finite abelianization, cyclic commutator subgroup"


def integer_spectrum_relation(L: IntMatrix) -> RelationGroup:
    """Relation data for a non-triangular base with integer eigenvalues.

    Only meaningful in the mixed-radical cases; the relation uses the
    eigenvector of the eigenvalue whose radical divides the other.
    """
    (p, q), (r, s) = L.rows
    if q == 0 or r == 0:
        raise WrongBranchError("relation route needs a non-triangular base")
    eig = integer_eigenvalues(L)
    if not eig:
        raise WrongBranchError("relation route needs integer eigenvalues")
    t1, t2 = eig
    pmat = eigenvector_matrix(L)
    if t2 % radical(t1) == 0 and t1 % radical(t2) != 0:
        ce, cg = pmat.rows[0][0], pmat.rows[1][0]
    elif t1 % radical(t2) == 0 and t2 % radical(t1) != 0:
        ce, cg = pmat.rows[0][1], pmat.rows[1][1]
    else:
        raise WrongBranchError("one radical must divide across, the other not")
    return RelationGroup(pmat, ce, cg)


def relation_member(L: IntMatrix, rel: RelationGroup, M: IntMatrix) -> bool:
    (p, q), (r, s) = L.rows
    (m11, m12), (m21, m22) = M.rows
    mb12 = r * m12 - q * m21
    mb22 = r * m22 - s * m21 - r * m11 + p * m21
    return mb12 * rel.cg == mb22 * rel.ce


def relation_derived_witness(L: IntMatrix) -> IntMatrix:
    """Unipotent conjugated along the eigenvector matrix P of L.

    P [[1, det P],[0,1]] P^{-1} in closed form: [[1 - eg, e^2],
    [-g^2, 1 + eg]] with (e, g) the first eigenvector column.  Integral,
    parabolic, and a nontrivial member of the derived subgroup in the
    mixed-radical cases (checked against the relation and the normalizer
    condition in the tests).
    """
    pmat = eigenvector_matrix(IntMatrix(L.rows))
    (e, _), (g, _) = pmat.rows
    return IntMatrix(((1 - e * g, e * e), (-g * g, 1 + e * g)))


# ---------------------------------------------------------------------------
# the parameterized family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VirtuallyZFamily:
    """The four one-parameter families when q = k (p - s), k != 0."""

    k: int
    basis_change: IntMatrix
    generator: IntMatrix

    def members(self, m: int) -> tuple[IntMatrix, ...]:
        k = self.k
        raw = (
            ((1 - m * k, -m * k * k), (m, 1 + m * k)),
            ((1 - m * k, 2 * k - m * k * k), (m, m * k - 1)),
            ((-1 - m * k, -2 * k - m * k * k), (m, 1 + m * k)),
            ((-1 - m * k, -m * k * k), (m, -1 + m * k)),
        )
        w = self.basis_change
        w_inv = _inv_unimodular(w)
        return tuple(w * IntMatrix(rows) * w_inv for rows in raw)


def virtually_z_family(L: IntMatrix) -> VirtuallyZFamily:
    """Family data for the q = k (p - s) branch; errors on any other branch."""
    cls = classify(L)
    if not isinstance(cls, VirtuallyZ) or not isinstance(cls.description, ParamFamily):
        raise WrongBranchError(f"base {L} is not in the parameterized family branch")
    if cls.description.k == 0:
        raise WrongBranchError("degenerate k = 0 family")
    return VirtuallyZFamily(
        k=cls.description.k,
        basis_change=cls.basis_change,
        generator=cls.generator,
    )


# ---------------------------------------------------------------------------
# payloads
# ---------------------------------------------------------------------------


def class_to_payload(cls: NormalizerClass) -> dict:
    from .intmat import format_matrix

    payload = {"branch": cls.tag, "finite": cls.finite}
    if isinstance(cls, (CentralizerFinite, KleinFour)):
        payload["elements"] = [format_matrix(m) for m in cls.elements]
    if isinstance(cls, OrderTwo):
        payload["elements"] = [format_matrix(m) for m in cls.elements]
    if isinstance(cls, CentralizerInfinite):
        payload["automorph"] = format_matrix(cls.automorph)
    if isinstance(cls, VirtuallyZ):
        payload["conjugator"] = format_matrix(cls.conjugator)
        payload["generator"] = format_matrix(cls.generator)
        payload["adapted_triangular"] = list(cls.tri)
        if isinstance(cls.description, ParamFamily):
            payload["description"] = {"kind": cls.description.kind, "k": cls.description.k}
        else:
            payload["description"] = {"kind": cls.description.kind}
        if cls.derived_witness is not None:
            payload["derived_witness"] = format_matrix(cls.derived_witness)
    payload["generators"] = [format_matrix(m) for m in cls.generators()]
    return payload
