"""Baer's criterion over Z/n and the one-step injective extension D(A).

Homs from the ideal ``(d)`` into ``A`` are encoded by the image ``a`` of
``d``; since ``(d) ≅ Λ/(n/d)`` these are exactly the ``a`` with
``(n/d)·a = 0``.  ``D(A)`` adjoins one generator ``e`` per such pair and the
relation ``ι(a) = d·e``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, prod
from typing import Optional

from .audit import AuditResult, Verdict
from .diagram import Diagram
from .errors import CapacityError, InputError, InternalError, PreconditionError
from .functors import ext1
from .limits import ColimitData, Poset, colimit, system_from_generators
from .linalg import IntMatrix, divisors, solve_mod
from .modules import (
    Element,
    FPModule,
    ModHom,
    cyclic,
    hom_module,
    is_exact_at,
    is_isomorphic,
    kernel,
    multiplication,
)

DEFAULT_PHI_CAP = 10_000
LITERAL_BAER_CAP = 64


@dataclass(frozen=True)
class PhiEntry:
    d: int
    a: Element

    @property
    def key(self) -> tuple:
        return (self.d, self.a.canonical())


def phi_count(A: FPModule, reduced: bool = False) -> int:
    """``|Φ(A)|`` from the invariant factors alone."""
    n = A.n
    total = 0
    for d in divisors(n):
        if reduced and d == n:
            continue
        size = prod(gcd(m, n // d) for m in A.invariant_factors)
        total += size - 1 if reduced else size
    return total


def _torsion_coords(A: FPModule, k: int):
    """Canonical coordinates of ``A[k]`` in lexicographic order."""
    ranges = []
    for m in A.invariant_factors:
        step = m // gcd(m, k)
        ranges.append(range(0, m, step))
    return itertools.product(*ranges)


def phi_index(A: FPModule, reduced: bool = False, cap: int = DEFAULT_PHI_CAP) -> list:
    """Entries ``(d, a)`` ordered by ``d`` then by canonical coordinates of ``a``.

    ``reduced`` drops the zero ideal and the zero homs.
    """
    size = phi_count(A, reduced)
    if size > cap:
        raise CapacityError(f"|Φ(A)| = {size} exceeds cap {cap}", cap=cap, size=size)
    n = A.n
    out = []
    for d in divisors(n):
        if reduced and d == n:
            continue
        for y in _torsion_coords(A, n // d):
            if reduced and not any(y):
                continue
            out.append(PhiEntry(d, Element(A, A.from_coords(y))))
    return out


# -- injectivity ---------------------------------------------------------------

def injectivity_oracle(A) -> bool:
    """Injective iff ``A[n/d] ⊆ dA`` for all ``d | n``, decided per cyclic factor.

    Accepts a module or a pair ``(n, factors)``.
    """
    if isinstance(A, FPModule):
        n, factors = A.n, A.invariant_factors
    else:
        n, factors = A
    for m in factors:
        for d in divisors(n):
            if (m // gcd(d, m)) % gcd(n // d, m):
                return False
    return True


def _divisible_by(A: FPModule, vec, d: int) -> bool:
    system = IntMatrix.identity(A.g, d).hstack(A.relations)
    return solve_mod(system, vec, A.n) is not None


def _baer_by_torsion(A: FPModule) -> bool:
    for d in divisors(A.n):
        _, incl = kernel(multiplication(A, A.n // d))
        if not all(_divisible_by(A, c, d) for c in incl.matrix.columns()):
            return False
    return True


def _baer_literal(A: FPModule) -> bool:
    # every hom from every ideal, every candidate x, every λ in the ideal
    n, fac = A.n, A.invariant_factors
    elts = list(itertools.product(*[range(m) for m in fac]))
    for d in divisors(n):
        ideal = cyclic(n, n // d)             # generator corresponds to d ∈ Λ
        H = hom_module(ideal, A)
        for f in H.homs():
            fgen = A.coords(f.matrix.column(0)) if ideal.g else tuple(0 for _ in fac)
            ok = False
            for x in elts:
                if all(all((mu * fgen[i] - d * mu * x[i]) % fac[i] == 0 for i in range(len(fac)))
                       for mu in range(n // d)):
                    ok = True
                    break
            if not ok:
                return False
    return True


def baer_is_injective(A: FPModule, cap: int = 10**6, literal_cap: int = LITERAL_BAER_CAP) -> bool:
    """Baer's test over Z/n: every hom from an ideal extends to Λ.

    Decided through ``A[n/d] ⊆ dA``; modules of order at most ``literal_cap``
    are also checked by enumerating every hom and every extension candidate.
    """
    if A.order > cap:
        raise CapacityError(f"module of order {A.order} exceeds cap {cap}", cap=cap, size=A.order)
    verdict = _baer_by_torsion(A)
    if A.order <= literal_cap and _baer_literal(A) != verdict:
        raise InternalError(f"Baer test disagrees with literal enumeration on {A!r}")
    return verdict


# -- D(A) ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DConstruction:
    base: FPModule
    entries: tuple
    D: FPModule
    iota: ModHom
    reduced: bool = False
    _lookup: dict = field(default_factory=dict, repr=False)

    def e_gen(self, k: int) -> int:
        return self.base.g + k

    def entry_index(self, d: int, a: Element) -> Optional[int]:
        return self._lookup.get((d, a.canonical()))


def build_D(A: FPModule, reduced: bool = False, cap_phi: int = DEFAULT_PHI_CAP) -> DConstruction:
    entries = tuple(phi_index(A, reduced, cap_phi))
    g, k = A.g, len(entries)
    cols = [list(c) + [0] * k for c in A.relations.columns()]
    for j, ent in enumerate(entries):
        col = list(ent.a.coords) + [0] * k
        col[g + j] = -ent.d
        cols.append(col)
    D = FPModule(A.n, IntMatrix.from_columns(cols, g + k))
    iota = ModHom(A, D, IntMatrix.identity(g).vstack(IntMatrix.zeros(k, g)), check=False)
    lookup = {ent.key: j for j, ent in enumerate(entries)}
    return DConstruction(A, entries, D, iota, reduced, lookup)


def D_on_hom(phi: ModHom, src: DConstruction, dst: DConstruction) -> ModHom:
    """``D(φ)``: ι∘φ on the base block, ``e(δ, a) -> e(δ, φ(a))`` on the rest."""
    if src.base != phi.src or dst.base != phi.dst:
        raise InputError("D constructions do not match the hom")
    if src.reduced != dst.reduced:
        raise InputError("cannot map between literal and reduced D constructions")
    G = dst.D.g
    cols = [list(c) + [0] * len(dst.entries) for c in phi.matrix.columns()]
    for ent in src.entries:
        col = [0] * G
        image = phi(ent.a)
        j = dst.entry_index(ent.d, image)
        if j is None:
            if not (dst.reduced and image.is_zero()):
                raise InternalError(f"φ(a) for entry {ent.key} is missing from the target index")
        else:
            col[dst.e_gen(j)] = 1
        cols.append(col)
    return ModHom(src.D, dst.D, IntMatrix.from_columns(cols, G), check=False)


def extension_witness(dc: DConstruction, entry: PhiEntry) -> Element:
    """The class ``x`` of ``e(d, a)``; checks ``ι(f(λ)) = λx`` for every ``λ`` in ``(d)``."""
    j = dc.entry_index(entry.d, entry.a)
    if j is None:
        raise InputError(f"entry {entry.key} is not in this construction")
    x = dc.D.gen(dc.e_gen(j))
    n = dc.base.n
    for mu in range(n // entry.d):
        lam = (entry.d * mu) % n
        if dc.iota(mu * entry.a) != lam * x:
            raise InternalError(f"extension property fails for entry {entry.key} at λ = {lam}")
    return x


def _smallest_division(A: FPModule, a: Element, d: int) -> Optional[tuple]:
    """Lexicographically smallest canonical ``y`` with ``d·y = a``."""
    target = a.canonical()
    y = []
    for m, t in zip(A.invariant_factors, target):
        for c in range(m):
            if (d * c - t) % m == 0:
                y.append(c)
                break
        else:
            return None
    return tuple(y)


def retraction_for_injective(dc: DConstruction):
    """``(s, t)`` with ``s = ι`` and ``t∘s = id``; needs an injective base."""
    A = dc.base
    if not baer_is_injective(A):
        raise PreconditionError("base not injective")
    cols = [list(c) for c in IntMatrix.identity(A.g).columns()]
    for ent in dc.entries:
        if ent.d == A.n:
            cols.append([0] * A.g)
            continue
        y = _smallest_division(A, ent.a, ent.d)
        if y is None:
            raise InternalError(f"no division of entry {ent.key} in an injective module")
        cols.append(list(A.from_coords(y)))
    t = ModHom(dc.D, A, IntMatrix.from_columns(cols, A.g))
    if t.compose(dc.iota) != ModHom(A, A, IntMatrix.identity(A.g)):
        raise InternalError("t∘s is not the identity")
    return dc.iota, t


def _d_certificate(command: str, note: str, modules=(), sequence=None) -> Diagram:
    n = modules[0].n if modules else sequence[0].n
    cert = Diagram(n, command=command, note=note)
    for i, A in enumerate(modules):
        cert.add_module("A" if i == 0 else f"A{i}", A)
    if sequence is not None:
        f, g = sequence
        cert.add_hom("f", f)
        cert.add_hom("g", g)
        cert.sequences.append({"f": "f", "g": "g"})
    return cert


def audit_D_iso_on_injective(A: FPModule, reduced: bool = False) -> AuditResult:
    """Compare ``D(A)`` with ``A`` for injective ``A``; the retraction is checked either way."""
    if not baer_is_injective(A):
        raise PreconditionError("base not injective")
    dc = build_D(A, reduced)
    _, t = retraction_for_injective(dc)
    iso = is_isomorphic(dc.D, A)
    details = {"A": list(A.invariant_factors), "D(A)": list(dc.D.invariant_factors),
               "phi_size": len(dc.entries), "retraction_identity": True, "reduced": reduced}
    if iso:
        return AuditResult("D_iso_on_injective", Verdict.CONFIRMED, details)
    cert = _d_certificate("dfun", "D(A) is not isomorphic to the injective module A", [A])
    return AuditResult("D_iso_on_injective", Verdict.REFUTED, details, cert)


def _check_ses(f: ModHom, g: ModHom):
    if f.dst != g.src:
        raise InputError("sequence maps are not composable")
    if not (f.is_injective() and g.is_surjective() and is_exact_at(f, g)):
        raise InputError("input sequence is not short exact")


def _exactness_witness(Df: ModHom, Dg: ModHom) -> Optional[list]:
    from .linalg import span_membership
    _, incl = kernel(Dg)
    span = Df.matrix.hstack(Df.dst.relations)
    for c in incl.matrix.columns():
        if not span_membership(span, c, Df.n):
            return [x % Df.n for x in c]
    return None


def _failure_witness(Df, Dg, ker_f, injective, witness) -> dict:
    if not injective:
        return {"kind": "kernel_of_D(f')", "vector": [x % Df.n for x in ker_f[1].matrix.column(0)]}
    comp = Dg.compose(Df)
    for i, col in enumerate(comp.matrix.columns()):
        if not comp.dst.in_relations(col):
            return {"kind": "D(g)∘D(f) nonzero on generator", "generator": i,
                    "image": [x % Df.n for x in col]}
    return {"kind": "kernel_of_D(g)_outside_image", "vector": witness}


def _D_of_ses(f, g, reduced):
    dA1, dA, dA2 = (build_D(M, reduced) for M in (f.src, f.dst, g.dst))
    return D_on_hom(f, dA1, dA), D_on_hom(g, dA, dA2)


def check_D_left_exact(f: ModHom, g: ModHom, reduced: bool = False) -> AuditResult:
    """``0 -> D(A') -> D(A) -> D(A'')`` exact for a short exact input."""
    _check_ses(f, g)
    Df, Dg = _D_of_ses(f, g, reduced)
    ker_f = kernel(Df)
    injective = ker_f[0].is_zero()
    witness = _exactness_witness(Df, Dg) if Dg.compose(Df).is_zero() else None
    middle = Dg.compose(Df).is_zero() and witness is None
    details = {"D_injective_left": injective, "exact_middle": middle,
               "D_surjective_right": Dg.is_surjective(),
               "factors": [list(M.invariant_factors) for M in (Df.src, Df.dst, Dg.dst)]}
    if injective and middle:
        return AuditResult("D_left_exact", Verdict.CONFIRMED, details)
    details["witness"] = _failure_witness(Df, Dg, ker_f, injective, witness)
    cert = _d_certificate("dfun", "D fails left exactness on this sequence", sequence=(f, g))
    return AuditResult("D_left_exact", Verdict.REFUTED, details, cert)


def check_right_balanced(f: ModHom, g: ModHom, reduced: bool = False) -> AuditResult:
    """Full exactness of ``0 -> D(Q') -> D(Q) -> D(Q'') -> 0`` for injective ``Q', Q, Q''``."""
    for M in (f.src, f.dst, g.dst):
        if not baer_is_injective(M):
            raise PreconditionError(f"module {list(M.invariant_factors)} is not injective")
    _check_ses(f, g)
    Df, Dg = _D_of_ses(f, g, reduced)
    injective = kernel(Df)[0].is_zero()
    middle = Dg.compose(Df).is_zero() and _exactness_witness(Df, Dg) is None
    surjective = Dg.is_surjective()
    details = {"D_injective_left": injective, "exact_middle": middle, "D_surjective_right": surjective,
               "factors": [list(M.invariant_factors) for M in (Df.src, Df.dst, Dg.dst)]}
    if injective and middle and surjective:
        return AuditResult("D_right_balanced", Verdict.CONFIRMED, details)
    cert = _d_certificate("dfun", "D is not exact on this sequence of injectives", sequence=(f, g))
    return AuditResult("D_right_balanced", Verdict.REFUTED, details, cert)


@dataclass
class ExtCriterion:
    baer: bool
    ext_vanishes_A: bool
    ext_vanishes_D: bool
    table: dict

    @property
    def verdict(self) -> Verdict:
        # vanishing Ext into D(A) is supposed to force A injective
        if self.ext_vanishes_D and not self.baer:
            return Verdict.REFUTED
        return Verdict.CONFIRMED


def ext_vanishing_criterion(A: FPModule, reduced: bool = False) -> ExtCriterion:
    """``Ext¹(Λ/(d), X)`` for every ``d | n`` and ``X ∈ {A, D(A)}``, beside the Baer verdict."""
    D = build_D(A, reduced).D
    table = {"A": {}, "D(A)": {}}
    for d in divisors(A.n):
        Q = cyclic(A.n, d)
        table["A"][d] = list(ext1(Q, A).invariant_factors)
        table["D(A)"][d] = list(ext1(Q, D).invariant_factors)
    van_A = all(not v for v in table["A"].values())
    van_D = all(not v for v in table["D(A)"].values())
    return ExtCriterion(baer_is_injective(A), van_A, van_D, table)


# -- iteration -------------------------------------------------------------------

@dataclass
class DChain:
    stages: list                 # D_0 = A, D_1, ...
    embeddings: list             # ι_k: D_k -> D_{k+1}
    injective: list              # Baer verdict per stage
    phi_sizes: list              # |Φ(D_k)| for each stage that was expanded
    status: str                  # "injective" | "step_cap" | "phi_cap"
    composites_injective: bool = True
    extension_checks: int = 0

    @property
    def verdict(self) -> Verdict:
        return Verdict.CONFIRMED if self.status == "injective" else Verdict.TRUNCATED


def iterate_D(A: FPModule, cap_steps: int = 4, cap_phi: int = DEFAULT_PHI_CAP, reduced: bool = False) -> DChain:
    """``D_0 = A``, ``D_{k+1} = D(D_k)`` until a stage is injective or a cap is reached."""
    if cap_steps < 1 or cap_phi < 1:
        raise InputError("caps must be positive")
    chain = DChain([A], [], [], [], "step_cap")
    while True:
        k = len(chain.stages) - 1
        cur = chain.stages[-1]
        chain.injective.append(baer_is_injective(cur))
        if chain.injective[-1]:
            chain.status = "injective"
            break
        if k >= cap_steps:
            break
        size = phi_count(cur, reduced)
        chain.phi_sizes.append(size)
        if size > cap_phi:
            chain.status = "phi_cap"
            break
        dc = build_D(cur, reduced, cap_phi)
        for ent in dc.entries:
            extension_witness(dc, ent)
            chain.extension_checks += 1
        chain.stages.append(dc.D)
        chain.embeddings.append(dc.iota)
        comp = dc.iota
        for j in range(k, -1, -1):
            if j < k:
                comp = comp.compose(chain.embeddings[j])
            if not kernel(comp)[0].is_zero():
                chain.composites_injective = False
    return chain


def omega_truncation_colimit(chain: DChain, length: Optional[int] = None) -> ColimitData:
    """Colimit of the first ``length`` stages; on a finite chain it is the last stage."""
    m = len(chain.stages) if length is None else length
    if m < 1 or m > len(chain.stages):
        raise InputError(f"prefix length must be between 1 and {len(chain.stages)}")
    covers = {(k, k + 1): chain.embeddings[k] for k in range(m - 1)}
    S = system_from_generators("direct", Poset.chain(m), chain.stages[:m], covers)
    cd = colimit(S)
    if not cd.sigma[m - 1].is_iso():
        raise InternalError("colimit of a finite chain is not its last stage")
    return cd
