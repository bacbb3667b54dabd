"""Symmetry group of the self-similar subshift: membership, local rules.

A unimodular M acts on the subshift when the conjugates C_n = L^{-n} M L^n
are eventually integral unimodular and their action on the nonzero digit
cosets is eventually constant.  Both conditions are verified up to an
explicit bound recorded in the certificate; acceptance is bounded
verification, not a proof for all n.

The sliding-block realization reads, at each position, the truncated
digit level of the window pattern (not of the coordinates, so shifted
patches evaluate correctly) and applies the per-level coset permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    MarginError,
    MissingCertificateError,
    NotExpansionError,
    WindowError,
    WrongBranchError,
)
from .intmat import (
    FundamentalDomain,
    IntMatrix,
    Vec,
    fundamental_domain,
    hnf,
    is_expansion,
    vec_add,
    zero_vec,
)
from .odometer import OdometerPoint
from .substitution import (
    ConstantShapeSubstitution,
    Patch,
    SupportCache,
    fixed_point_patch,
    sigma_L,
    supports,
    tau,
    valuation,
)

# ---------------------------------------------------------------------------
# conjugate powers and certificates
# ---------------------------------------------------------------------------


def conjugate_power(L: IntMatrix, M: IntMatrix, n: int) -> IntMatrix | None:
    """L^{-n} M L^n when integral (checked by L^n C = M L^n), else None."""
    if n < 0:
        raise ValueError("n must be >= 0")
    ln = L**n
    det = ln.det()
    num = ln.adjugate() * M * ln
    rows = []
    for r in num.rows:
        row = []
        for x in r:
            q, rem = divmod(x, det)
            if rem:
                return None
            row.append(q)
        rows.append(tuple(row))
    c = IntMatrix(tuple(rows))
    assert ln * c == M * ln
    return c


@dataclass(frozen=True)
class NLCertificate:
    """Bounded evidence that M acts on the subshift of base L.

    conjugates[n] is C_n or None; k is the first level from which every
    recorded conjugate is integral, n0 the first level from which the
    digit-coset action is constant through n_max.  residue_permutation
    maps nonzero digits to nonzero digits.
    """

    L: IntMatrix
    M: IntMatrix
    n_max: int
    conjugates: tuple[IntMatrix | None, ...]
    k: int
    n0: int
    residue_permutation: tuple[tuple[Vec, Vec], ...]

    def permutation_map(self) -> dict:
        return dict(self.residue_permutation)

    def to_payload(self) -> dict:
        from .intmat import format_matrix, format_vector

        return {
            "accepted": True,
            "L": format_matrix(self.L),
            "M": format_matrix(self.M),
            "n_max": self.n_max,
            "k": self.k,
            "n0": self.n0,
            "conjugates": [
                None if c is None else format_matrix(c) for c in self.conjugates
            ],
            "residue_permutation": [
                [format_vector(a), format_vector(b)]
                for a, b in self.residue_permutation
            ],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "NLCertificate":
        from .intmat import parse_matrix, parse_vector

        return cls(
            L=parse_matrix(payload["L"]),
            M=parse_matrix(payload["M"]),
            n_max=payload["n_max"],
            k=payload["k"],
            n0=payload["n0"],
            conjugates=tuple(
                None if c is None else parse_matrix(c) for c in payload["conjugates"]
            ),
            residue_permutation=tuple(
                (parse_vector(a), parse_vector(b))
                for a, b in payload["residue_permutation"]
            ),
        )


@dataclass(frozen=True)
class NLRejection:
    """Why bounded verification failed: the two failure shapes differ."""

    L: IntMatrix
    M: IntMatrix
    n_max: int
    reason: str  # "non-integral-conjugate" or "residue-unstable"
    detail: str

    accepted = False

    def to_payload(self) -> dict:
        from .intmat import format_matrix

        return {
            "accepted": False,
            "L": format_matrix(self.L),
            "M": format_matrix(self.M),
            "n_max": self.n_max,
            "reason": self.reason,
            "detail": self.detail,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "NLRejection":
        from .intmat import parse_matrix

        return cls(
            L=parse_matrix(payload["L"]),
            M=parse_matrix(payload["M"]),
            n_max=payload["n_max"],
            reason=payload["reason"],
            detail=payload["detail"],
        )


def _residue_action(
    c: IntMatrix, domain: FundamentalDomain
) -> tuple[tuple[Vec, Vec], ...]:
    zero = zero_vec(c.dim)
    pairs = []
    for f in domain.reps:
        if f == zero:
            continue
        pairs.append((f, domain.digit_of(c.mul_vec(f))))
    return tuple(sorted(pairs))


def nl_membership(
    L: IntMatrix,
    M: IntMatrix,
    n_max: int = 8,
    domain: FundamentalDomain | None = None,
) -> NLCertificate | NLRejection:
    """Bounded verification of the two defining conditions.

    Accepts iff the conjugates C_k..C_{n_max} are all integral unimodular
    for some k <= n_max/2 and the digit-coset action stabilizes at some
    n0 <= n_max - 2 and stays constant through n_max.
    """
    if M.det() not in (1, -1):
        raise ValueError(f"matrix must be unimodular, det = {M.det()}")
    if not is_expansion(L):
        raise NotExpansionError(f"not an expansion matrix: {L}")
    if n_max < 4:
        raise ValueError("n_max must be >= 4")
    if domain is None:
        domain = fundamental_domain(L)
    conj = tuple(conjugate_power(L, M, n) for n in range(n_max + 1))
    k = None
    for start in range(n_max + 1):
        if all(c is not None for c in conj[start:]):
            k = start
            break
    if k is None or k > n_max // 2:
        first_bad = next(n for n in range(n_max + 1) if conj[n] is None)
        return NLRejection(
            L=L,
            M=M,
            n_max=n_max,
            reason="non-integral-conjugate",
            detail=f"conjugate at level {first_bad} is not integral"
            + ("" if k is None else f"; integral tail only from level {k}"),
        )
    actions = {n: _residue_action(conj[n], domain) for n in range(k, n_max + 1)}
    n0 = None
    for start in range(k, n_max - 1):
        if all(actions[n] == actions[start] for n in range(start, n_max + 1)):
            n0 = start
            break
    if n0 is None:
        return NLRejection(
            L=L,
            M=M,
            n_max=n_max,
            reason="residue-unstable",
            detail=f"digit action not constant on any window [n0, {n_max}] "
            f"with n0 <= {n_max - 2}",
        )
    perm = actions[n0]
    images = {b for _, b in perm}
    zero = zero_vec(L.dim)
    if zero in images or len(images) != len(perm):
        return NLRejection(
            L=L,
            M=M,
            n_max=n_max,
            reason="residue-unstable",
            detail="stabilized digit action is not a permutation of the nonzero digits",
        )
    return NLCertificate(
        L=L,
        M=M,
        n_max=n_max,
        conjugates=conj,
        k=k,
        n0=n0,
        residue_permutation=perm,
    )


# ---------------------------------------------------------------------------
# local rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalRule:
    """Sliding-block realization of the action of M.

    per_level[v] is the digit permutation used at truncated level v; the
    window pattern over F_{n0} decides v, positions deeper than n0
    (including the origin of a fixed point) all use the stabilized
    permutation.
    """

    certificate: NLCertificate
    substitution: ConstantShapeSubstitution
    window: SupportCache
    n0: int
    per_level: tuple[dict, ...]
    _class_table: tuple

    def m_inverse(self) -> IntMatrix:
        m = self.certificate.M
        adj = m.adjugate()
        return adj if m.det() == 1 else -adj


def build_local_rule(
    cert: NLCertificate, domain: FundamentalDomain | None = None
) -> LocalRule:
    """Assemble the per-level permutations and the window classifier."""
    L = cert.L
    if domain is None:
        domain = fundamental_domain(L)
    subst = sigma_L(L, domain)
    n0 = cert.n0
    per_level = []
    for v in range(n0 + 1):
        c = cert.conjugates[v]
        if c is None:
            raise MissingCertificateError(f"no integral conjugate at level {v}")
        per_level.append(dict(_residue_action(c, domain)))
    window = supports(subst, n0)
    table = _valuation_class_table(subst, n0, window)
    return LocalRule(
        certificate=cert,
        substitution=subst,
        window=window,
        n0=n0,
        per_level=tuple(per_level),
        _class_table=table,
    )


def _valuation_class_table(subst, n0, window):
    """For each coset of L^{n0}(Z^d): the window letters it forces.

    Entries are (class representative, truncated level, {offset: letter}),
    with offsets congruent to 0 mod L^{n0} left undetermined.
    """
    if n0 == 0:
        return ((zero_vec(subst.dim), 0, {}),)
    basis = hnf(subst.base**n0)
    fn0 = sorted(window.level(n0))
    out = []
    for c in basis.box_reps():
        forced = {}
        for f in fn0:
            y = vec_add(c, f)
            if basis.contains(y):
                continue  # letter not determined by the coset
            forced[f] = tau(subst, y)
        if basis.contains(c):
            level = n0
        else:
            level = min(valuation(subst, c), n0)
        out.append((c, level, forced))
    return tuple(out)


def _truncated_level(rule: LocalRule, patch: Patch, pos: Vec) -> int:
    """Truncated digit level of the window pattern at pos."""
    if rule.n0 == 0:
        return 0
    window = sorted(rule.window.level(rule.n0))
    pattern = {}
    for f in window:
        p = vec_add(pos, f)
        if p not in patch:
            raise MarginError(f"window at {pos} leaves the patch support")
        pattern[f] = patch[p]
    matches = []
    for c, level, forced in rule._class_table:
        if all(pattern[f] == letter for f, letter in forced.items()):
            matches.append(level)
    if not matches:
        raise WindowError(f"window pattern at {pos} matches no digit coset")
    if len(set(matches)) > 1:
        raise WindowError(f"window pattern at {pos} is ambiguous")
    return matches[0]


def apply_endomorphism(
    rule: LocalRule, patch: Patch, region=None
) -> Patch:
    """Evaluate the rule on a patch.

    Output letter at t reads the source at u = M^{-1} t: the truncated
    level of the window at u picks the permutation applied to the letter.
    When region is given, every requested position must be computable or
    a margin error is raised; otherwise all computable positions are
    produced.
    """
    m = rule.certificate.M
    m_inv = rule.m_inverse()
    window = sorted(rule.window.level(rule.n0))
    out = {}
    if region is not None:
        targets = [tuple(int(x) for x in t) for t in region]
    else:
        targets = []
        for u in patch.support:
            if all(vec_add(u, f) in patch for f in window):
                targets.append(m.mul_vec(u))
    for t in targets:
        u = m_inv.mul_vec(t)
        if u not in patch:
            raise MarginError(f"source position {u} missing from the patch")
        level = _truncated_level(rule, patch, u)
        out[t] = rule.per_level[level][patch[u]]
    return Patch(out)


def pullback_positions(rule: LocalRule, region) -> set:
    """Source positions needed to evaluate the rule on the region."""
    m_inv = rule.m_inverse()
    window = sorted(rule.window.level(rule.n0))
    needed = set()
    for t in region:
        u = m_inv.mul_vec(tuple(int(x) for x in t))
        needed.add(u)
        for f in window:
            needed.add(vec_add(u, f))
    return needed


def composition_check(
    L: IntMatrix,
    M1: IntMatrix,
    M2: IntMatrix,
    region,
    domain: FundamentalDomain | None = None,
    seed=None,
) -> bool:
    """The rule of M1 M2 equals rule(M1) after rule(M2) on the region.

    Both sides are evaluated on a fixed-point patch built just large
    enough for the two evaluation chains.
    """
    if domain is None:
        domain = fundamental_domain(L)
    cert12 = nl_membership(L, M1 * M2, domain=domain)
    cert1 = nl_membership(L, M1, domain=domain)
    cert2 = nl_membership(L, M2, domain=domain)
    for c in (cert12, cert1, cert2):
        if isinstance(c, NLRejection):
            raise ValueError(f"matrix not accepted: {c.to_payload()}")
    rule12 = build_local_rule(cert12, domain)
    rule1 = build_local_rule(cert1, domain)
    rule2 = build_local_rule(cert2, domain)
    subst = rule12.substitution
    if seed is None:
        seed = min(subst.alphabet)
    region = [tuple(int(x) for x in t) for t in region]
    mid = sorted(pullback_positions(rule1, region))
    source = pullback_positions(rule2, mid) | pullback_positions(rule12, region)
    patch = fixed_point_patch(subst, seed, source)
    lhs = apply_endomorphism(rule12, patch, region)
    rhs = apply_endomorphism(rule1, apply_endomorphism(rule2, patch, mid), region)
    return all(lhs[t] == rhs[t] for t in region)


# ---------------------------------------------------------------------------
# fibers over the base odometer and the defactorization digit
# ---------------------------------------------------------------------------


def fiber_points(
    s: ConstantShapeSubstitution,
    at,
    depth: int,
    window_radius: int = 8,
) -> tuple[frozenset, str]:
    """Letters the projection cannot pin down over the given base point.

    An integer vector a names the orbit point embedding -a: the fiber
    keeps all letters at the coordinate a, so every letter is possible.
    An OdometerPoint is scanned for an integer lift inside the test
    window; with no lift the central letter is forced and the count is 1,
    exact at the tested depth.
    """
    if not s.is_self_similar():
        raise WrongBranchError("fiber analysis needs the self-similar family")
    if isinstance(at, OdometerPoint):
        point = at
        n = min(depth, point.depth)
        basis = hnf(s.base**n)
        target = point.digit(n)
        from itertools import product

        lifts = [
            v
            for v in product(range(-window_radius, window_radius + 1), repeat=s.dim)
            if basis.reduce_vec(v) == target
        ]
        if lifts:
            return frozenset(s.alphabet), f"orbit-like: lift {lifts[0]} in window"
        if target == zero_vec(s.dim):
            return frozenset(s.alphabet), "all digits zero to tested depth"
        note = f"exact at tested depth {n}, window radius {window_radius}"
        return frozenset({tau(s, target)}), note
    a = tuple(int(x) for x in at)
    return frozenset(s.alphabet), f"orbit point: letters at coordinate {a} are free"


def pi_factor(s: ConstantShapeSubstitution, p: Patch, n: int) -> Vec:
    """The unique digit f in F_n with p inside the shifted n-th image set.

    Matches the patch against the letters forced by each candidate digit;
    recognizability makes the consistent digit unique once the window is
    large enough.
    """
    cache = supports(s, n)
    basis = hnf(s.base**n)
    consistent = []
    for f in sorted(cache.level(n)):
        ok = True
        determined = 0
        for j, letter in p.items():
            y = vec_add(j, f)
            if basis.contains(y):
                continue
            determined += 1
            if tau(s, y) != letter:
                ok = False
                break
        if ok and determined > 0:
            consistent.append(f)
    if not consistent:
        raise WindowError("patch matches no shifted image: not in the language form")
    if len(consistent) > 1:
        raise WindowError(f"window too small: {len(consistent)} digits consistent")
    return consistent[0]
