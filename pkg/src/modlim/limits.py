"""Finite posets, direct and inverse systems, and their limits.

The colimit is built literally as ``(⊕ A^α) / N`` where ``N`` is spanned by
``c^β(φ^α_β(x)) - c^α(x)`` over generators ``x``; the limit is the
submodule of compatible tuples inside ``Π A_α``.  Both keep that ambient
presentation next to the canonical form of the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .audit import AuditResult, Verdict
from .diagram import Diagram
from .errors import InputError, InternalError, PreconditionError, ValidationError
from .linalg import IntMatrix, span_membership
from .modules import (
    Element,
    FPModule,
    ModHom,
    canonical_form,
    cokernel,
    direct_sum,
    factor_through,
    free,
    identity,
    is_exact_at,
    kernel,
)


class Poset:
    """Finite partial order on ``range(size)`` given by its full ``leq`` relation."""

    def __init__(self, leq: Sequence[Sequence[bool]]):
        k = len(leq)
        self.size = k
        self.leq = tuple(tuple(bool(x) for x in row) for row in leq)
        if any(len(row) != k for row in self.leq):
            raise InputError("poset relation must be square")
        for a in range(k):
            if not self.leq[a][a]:
                raise InputError(f"poset relation not reflexive at {a}")
            for b in range(k):
                if a != b and self.leq[a][b] and self.leq[b][a]:
                    raise InputError(f"poset relation not antisymmetric at ({a}, {b})")
                if self.leq[a][b]:
                    for c in range(k):
                        if self.leq[b][c] and not self.leq[a][c]:
                            raise InputError(f"poset relation not transitive at {a}<={b}<={c}")

    @classmethod
    def from_pairs(cls, size: int, pairs) -> "Poset":
        """Reflexive-transitive closure of the given ``(a, b)`` meaning ``a <= b``."""
        leq = [[a == b for b in range(size)] for a in range(size)]
        for a, b in pairs:
            leq[a][b] = True
        for m in range(size):
            for a in range(size):
                if leq[a][m]:
                    for b in range(size):
                        if leq[m][b]:
                            leq[a][b] = True
        return cls(leq)

    @classmethod
    def chain(cls, size: int) -> "Poset":
        return cls([[a <= b for b in range(size)] for a in range(size)])

    @classmethod
    def discrete(cls, size: int) -> "Poset":
        return cls([[a == b for b in range(size)] for a in range(size)])

    def le(self, a: int, b: int) -> bool:
        return self.leq[a][b]

    def strict_pairs(self) -> list:
        return [(a, b) for a in range(self.size) for b in range(self.size) if a != b and self.leq[a][b]]

    def upper_bounds(self, nodes) -> list:
        return [c for c in range(self.size) if all(self.leq[a][c] for a in nodes)]

    def is_directed(self) -> bool:
        return all(self.upper_bounds((a, b)) for a in range(self.size) for b in range(a + 1, self.size))

    def maximum(self) -> Optional[int]:
        ub = self.upper_bounds(range(self.size))
        return ub[0] if ub else None

    def __eq__(self, other):
        return isinstance(other, Poset) and self.leq == other.leq

    def __hash__(self):
        return hash(self.leq)

    def __repr__(self):
        return f"Poset(size={self.size}, strict={self.strict_pairs()})"


class _System:
    kind = ""

    def __init__(self, poset: Poset, modules: Sequence[FPModule], maps: dict, labels: Optional[Sequence[str]] = None):
        if len(modules) != poset.size:
            raise InputError(f"{len(modules)} modules for a poset of size {poset.size}")
        if poset.size == 0:
            raise InputError("systems over the empty poset carry no modulus")
        self.poset = poset
        self.modules = tuple(modules)
        self.n = modules[0].n
        self._labels = list(labels) if labels is not None else [str(i) for i in range(poset.size)]
        full = {}
        for a in range(poset.size):
            full[(a, a)] = maps.get((a, a)) or identity(modules[a])
        L = self._labels
        for (a, b), h in maps.items():
            if not poset.le(a, b):
                raise ValidationError(f"map given for {L[a]}<={L[b]}, which is not in the order")
            full[(a, b)] = h
        for a, b in poset.strict_pairs():
            if (a, b) not in full:
                raise ValidationError(f"missing map for {L[a]}<={L[b]}")
        self._maps = full
        self._validate()

    def map(self, a: int, b: int) -> ModHom:
        """The structure map attached to ``a <= b`` (direction depends on the system kind)."""
        return self._maps[(a, b)]

    def _validate(self):
        P = self.poset
        L = self._labels
        for a in range(P.size):
            if self.modules[a].n != self.n:
                raise InputError("modulus mismatch inside system")
            if self._maps[(a, a)] != identity(self.modules[a]):
                raise ValidationError(f"map {L[a]}<={L[a]} is not the identity")
        for a, b in P.strict_pairs():
            src, dst = self._ends(a, b)
            h = self._maps[(a, b)]
            if h.src != self.modules[src] or h.dst != self.modules[dst]:
                raise ValidationError(f"map {L[a]}<={L[b]} has the wrong source or target")
        for a, b in P.strict_pairs():
            for c in range(P.size):
                if c != b and P.le(b, c):
                    if self._compose(a, b, c) != self._maps[(a, c)]:
                        raise ValidationError(f"square {L[a]}<={L[b]}<={L[c]} does not commute")


class DirectSystem(_System):
    """``φ^α_β = map(α, β): A^α -> A^β`` for ``α <= β``."""

    kind = "direct"

    def _ends(self, a, b):
        return a, b

    def _compose(self, a, b, c):
        return self._maps[(b, c)].compose(self._maps[(a, b)])


class InverseSystem(_System):
    """``ψ^β_α = map(α, β): A_β -> A_α`` for ``α <= β``."""

    kind = "inverse"

    def _ends(self, a, b):
        return b, a

    def _compose(self, a, b, c):
        return self._maps[(a, b)].compose(self._maps[(b, c)])


def system_from_generators(kind: str, poset: Poset, modules, cover_maps: dict, labels=None):
    """Build a system from maps on some pairs, composing along chains for the rest.

    Every strict pair must be reachable by composing given maps; commutativity
    is still validated by the system constructor.
    """
    maps = dict(cover_maps)
    for _ in range(poset.size):
        for a, b in poset.strict_pairs():
            if (a, b) in maps:
                continue
            for m in range(poset.size):
                if (a, m) in maps and (m, b) in maps and m not in (a, b):
                    if kind == "direct":
                        maps[(a, b)] = maps[(m, b)].compose(maps[(a, m)])
                    else:
                        maps[(a, b)] = maps[(a, m)].compose(maps[(m, b)])
                    break
    cls = DirectSystem if kind == "direct" else InverseSystem
    return cls(poset, modules, maps, labels)


def _check_family(src, dst, family):
    if src.poset != dst.poset:
        raise InputError("systems live over different posets")
    if len(family) != src.poset.size:
        raise InputError("system hom needs one component per node")
    for a, f in enumerate(family):
        if f.src != src.modules[a] or f.dst != dst.modules[a]:
            raise InputError(f"component {a} has the wrong source or target")
    for a, b in src.poset.strict_pairs():
        if src.kind == "direct":
            lhs = family[b].compose(src.map(a, b))
            rhs = dst.map(a, b).compose(family[a])
        else:
            lhs = family[a].compose(src.map(a, b))
            rhs = dst.map(a, b).compose(family[b])
        if lhs != rhs:
            raise InputError(f"naturality square at {a}<={b} does not commute")


# -- colimits -------------------------------------------------------------

@dataclass(frozen=True)
class ColimitData:
    system: DirectSystem
    C: FPModule
    sigma: tuple          # σ^α: A^α -> C
    big_sum: FPModule     # ⊕ A^α
    injections: tuple     # c^α: A^α -> ⊕
    N: IntMatrix          # columns spanning N inside ⊕
    proj: ModHom          # ⊕ -> C
    lift: IntMatrix       # canonical generators of C -> coordinates in ⊕


def colimit(S: DirectSystem) -> ColimitData:
    ds = direct_sum(*S.modules)
    big = ds.module
    cols = []
    for a, b in S.poset.strict_pairs():
        phi = S.map(a, b)
        ca, cb = ds.injections[a].matrix, ds.injections[b].matrix
        for x in range(S.modules[a].g):
            e = [int(i == x) for i in range(S.modules[a].g)]
            lhs = cb.apply(phi.matrix.apply(e))
            rhs = ca.apply(e)
            col = tuple((u - v) % S.n for u, v in zip(lhs, rhs))
            if any(col):
                cols.append(col)
    N = IntMatrix.from_columns(cols, big.g)
    quotient = FPModule(S.n, big.relations.hstack(N))
    cf = canonical_form(quotient)
    proj = ModHom(big, cf.module, cf.to_canonical.matrix, check=False)
    sigma = tuple(proj.compose(c) for c in ds.injections)
    return ColimitData(S, cf.module, sigma, big, ds.injections, N, proj, cf.from_canonical.matrix)


def _check_cocone(S: DirectSystem, cocone):
    if len(cocone) != S.poset.size:
        raise InputError("cocone needs one map per node")
    X = cocone[0].dst
    for a, f in enumerate(cocone):
        if f.src != S.modules[a] or f.dst != X:
            raise InputError(f"cocone map {a} has the wrong source or target")
    for a, b in S.poset.strict_pairs():
        if cocone[b].compose(S.map(a, b)) != cocone[a]:
            raise InputError(f"cocone not compatible at {a}<={b}")
    return X


def colimit_mediating(cd: ColimitData, cocone: Sequence[ModHom]) -> ModHom:
    """The unique ``θ: C -> X`` with ``θ ∘ σ^α == f^α``."""
    S = cd.system
    X = _check_cocone(S, cocone)
    stacked = cocone[0].matrix.hstack(*[f.matrix for f in cocone[1:]])
    theta = ModHom(cd.C, X, stacked @ cd.lift)
    for a, f in enumerate(cocone):
        if theta.compose(cd.sigma[a]) != f:
            raise InternalError(f"mediating map fails to factor the cocone at node {a}")
    return theta


def _require_directed(poset: Poset):
    if not poset.is_directed():
        raise PreconditionError("operation requires a directed poset")


def colimit_normal_form(cd: ColimitData, x: Element):
    """``(γ, a)`` with ``σ^γ(a) == x``; ``γ`` is the smallest-index upper bound of the support of ``x``."""
    S = cd.system
    _require_directed(S.poset)
    if x.parent != cd.C:
        raise InputError("element is not in the colimit")
    z = cd.lift.apply(x.coords)
    support, parts = [], []
    for a in range(S.poset.size):
        part = cd.injections[a].matrix.transpose().apply(z)
        if not S.modules[a].in_relations(part):
            support.append(a)
            parts.append((a, part))
    gamma = S.poset.upper_bounds(support)[0]
    target = S.modules[gamma]
    acc = [0] * target.g
    for a, part in parts:
        img = S.map(a, gamma).matrix.apply(part)
        acc = [u + v for u, v in zip(acc, img)]
    rep = target.element(acc)
    if cd.sigma[gamma](rep) != x:
        raise InternalError("normal form does not map back to the element")
    return gamma, rep


def vanishing_witness(S: DirectSystem, a: int, x: Element) -> Optional[int]:
    """Smallest ``β >= α`` with ``φ^α_β(x) == 0``, or None."""
    for b in range(S.poset.size):
        if S.poset.le(a, b) and S.map(a, b)(x).is_zero():
            return b
    return None


def colimit_vanishes(S: DirectSystem, a: int, x: Element, cd: Optional[ColimitData] = None) -> bool:
    """Whether ``σ^α(x) == 0``; cross-checked against the transition-map characterization."""
    _require_directed(S.poset)
    cd = cd or colimit(S)
    in_colimit = cd.sigma[a](x).is_zero()
    by_transition = vanishing_witness(S, a, x) is not None
    if in_colimit != by_transition:
        raise InternalError(f"vanishing characterizations disagree at node {a} for {x!r}")
    return in_colimit


def induced_colimit_map(family: Sequence[ModHom], src: ColimitData, dst: ColimitData) -> ModHom:
    """``F`` with ``F ∘ σ'^α == σ^α ∘ f^α`` for a system hom ``f: S' -> S``."""
    _check_family(src.system, dst.system, family)
    return colimit_mediating(src, [dst.sigma[a].compose(f) for a, f in enumerate(family)])


def _check_nodewise_ses(Sp, S, Spp, f_family, g_family):
    for a in range(S.poset.size):
        f, g = f_family[a], g_family[a]
        if not (f.is_injective() and is_exact_at(f, g) and g.is_surjective()):
            raise InputError(f"sequence is not short exact at node {a}")


def _ses_certificate(kind, systems, f_family, g_family, command):
    Sp, S, Spp = systems
    labels = [str(i) for i in range(S.poset.size)]
    d = Diagram(S.n, command=command)
    d.set_poset(S.poset, labels)
    for name, sys_ in zip(("Sp", "S", "Spp"), systems):
        d.add_system(name, sys_, labels)
    d.add_morphism("f", "Sp", "S", f_family, labels)
    d.add_morphism("g", "S", "Spp", g_family, labels)
    d.sequences.append({"f": "f", "g": "g"})
    return d


def check_colimit_right_exact(Sp: DirectSystem, S: DirectSystem, Spp: DirectSystem,
                              f_family: Sequence[ModHom], g_family: Sequence[ModHom]) -> AuditResult:
    """Exactness of ``colim A' -> colim A -> colim A'' -> 0`` for a node-wise short exact sequence."""
    _check_family(Sp, S, f_family)
    _check_family(S, Spp, g_family)
    _check_nodewise_ses(Sp, S, Spp, f_family, g_family)
    cp, c, cpp = colimit(Sp), colimit(S), colimit(Spp)
    F = induced_colimit_map(f_family, cp, c)
    G = induced_colimit_map(g_family, c, cpp)
    surjective = G.is_surjective()
    middle = is_exact_at(F, G)
    details = {"exact_at_middle": middle, "surjective_right": surjective,
               "factors": [list(x.C.invariant_factors) for x in (cp, c, cpp)]}
    if middle and surjective:
        return AuditResult("colimit_right_exact", Verdict.CONFIRMED, details)
    if not surjective:
        Q, q = cokernel(G)
        details["witness"] = list(Q.from_coords([1] + [0] * (len(Q.invariant_factors) - 1)))
    else:
        K, incl = kernel(G)
        span = F.matrix.hstack(c.C.relations)
        for col in incl.matrix.columns():
            if not span_membership(span, col, S.n):
                details["witness"] = list(col)
                break
    cert = _ses_certificate("direct", (Sp, S, Spp), f_family, g_family, "colimit")
    return AuditResult("colimit_right_exact", Verdict.REFUTED, details, cert)


# -- limits ---------------------------------------------------------------

@dataclass(frozen=True)
class LimitData:
    system: InverseSystem
    L: FPModule
    xi: tuple             # ξ_α: L -> A_α
    product: FPModule     # Π A_α
    projections: tuple    # p_α
    incl: ModHom          # L -> Π


def limit(S: InverseSystem) -> LimitData:
    ds = direct_sum(*S.modules)
    prod_ = ds.module
    pairs = S.poset.strict_pairs()
    if pairs:
        target = direct_sum(*[S.modules[a] for a, _ in pairs])
        rows = []
        for (a, b), p_ab in zip(pairs, target.projections):
            # block row: ψ^b_a ∘ p_b - p_a
            psi = S.map(a, b).matrix
            block = psi @ ds.projections[b].matrix - ds.projections[a].matrix
            rows.append(block)
        delta = ModHom(prod_, target.module, rows[0].vstack(*rows[1:]), check=False)
    else:
        delta = ModHom(prod_, free(S.n, 0), IntMatrix.zeros(0, prod_.g), check=False)
    L, incl = kernel(delta)
    xi = tuple(p.compose(incl) for p in ds.projections)
    return LimitData(S, L, xi, prod_, ds.projections, incl)


def _check_cone(S: InverseSystem, cone):
    if len(cone) != S.poset.size:
        raise InputError("cone needs one map per node")
    X = cone[0].src
    for a, f in enumerate(cone):
        if f.dst != S.modules[a] or f.src != X:
            raise InputError(f"cone map {a} has the wrong source or target")
    for a, b in S.poset.strict_pairs():
        if S.map(a, b).compose(cone[b]) != cone[a]:
            raise InputError(f"cone not compatible at {a}<={b}")
    return X


def limit_mediating(ld: LimitData, cone: Sequence[ModHom]) -> ModHom:
    """The unique ``θ: X -> L`` with ``ξ_α ∘ θ == f_α``."""
    X = _check_cone(ld.system, cone)
    stacked = ModHom(X, ld.product, cone[0].matrix.vstack(*[f.matrix for f in cone[1:]]), check=False)
    theta = factor_through(stacked, ld.incl)
    if theta is None:
        raise InternalError("compatible cone does not land in the limit")
    for a, f in enumerate(cone):
        if ld.xi[a].compose(theta) != f:
            raise InternalError(f"mediating map fails to factor the cone at node {a}")
    return theta


def induced_limit_map(family: Sequence[ModHom], src: LimitData, dst: LimitData) -> ModHom:
    """``F`` with ``ξ_α ∘ F == f_α ∘ ξ'_α``."""
    _check_family(src.system, dst.system, family)
    return limit_mediating(dst, [f.compose(src.xi[a]) for a, f in enumerate(family)])


def check_limit_left_exact(Sp: InverseSystem, S: InverseSystem, Spp: InverseSystem,
                           f_family: Sequence[ModHom], g_family: Sequence[ModHom]) -> AuditResult:
    """Exactness of ``0 -> lim A' -> lim A -> lim A''``; surjectivity on the right is reported, not required."""
    _check_family(Sp, S, f_family)
    _check_family(S, Spp, g_family)
    _check_nodewise_ses(Sp, S, Spp, f_family, g_family)
    lp, l, lpp = limit(Sp), limit(S), limit(Spp)
    F = induced_limit_map(f_family, lp, l)
    G = induced_limit_map(g_family, l, lpp)
    injective = F.is_injective()
    middle = is_exact_at(F, G)
    details = {"injective_left": injective, "exact_at_middle": middle,
               "surjective_right": G.is_surjective(),
               "factors": [list(x.L.invariant_factors) for x in (lp, l, lpp)]}
    if injective and middle:
        return AuditResult("limit_left_exact", Verdict.CONFIRMED, details)
    if not injective:
        K, incl = kernel(F)
        details["witness"] = list(incl.matrix.column(0))
    else:
        K, incl = kernel(G)
        span = F.matrix.hstack(l.L.relations)
        for col in incl.matrix.columns():
            if not span_membership(span, col, S.n):
                details["witness"] = list(col)
                break
    cert = _ses_certificate("inverse", (Sp, S, Spp), f_family, g_family, "limit")
    return AuditResult("limit_left_exact", Verdict.REFUTED, details, cert)
