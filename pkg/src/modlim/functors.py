"""Additive functors on Z/n-modules, comparison maps with (co)limits, and left satellites."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .audit import AuditResult, Verdict
from .diagram import Diagram
from .errors import ContractError, InputError, InternalError, PreconditionError, ValidationError
from .linalg import IntMatrix, divisors
from .limits import (
    DirectSystem,
    InverseSystem,
    colimit,
    colimit_mediating,
    limit,
    limit_mediating,
)
from .modules import (
    FPModule,
    FreePresentation,
    ModHom,
    cokernel,
    cyclic,
    elements,
    factor_through,
    free,
    free_presentation,
    hom_module,
    identity,
    kernel,
    tensor,
)

COVARIANT = "covariant"
CONTRAVARIANT = "contravariant"


@dataclass(frozen=True, eq=False)
class FunctorSpec:
    """An additive functor given by its action on modules and on homs.

    ``recipe`` is the CLI spelling (``"tensor:B"``) when the functor can be
    rebuilt from a diagram document; certificates use it.
    """

    name: str
    variance: str
    n: int
    on_module: Callable[[FPModule], FPModule]
    on_hom: Callable[[ModHom], ModHom]
    recipe: Optional[tuple] = None

    def __call__(self, x):
        if isinstance(x, ModHom):
            return self.on_hom(x)
        return self.on_module(x)

    @property
    def covariant(self) -> bool:
        return self.variance == COVARIANT


def _cached(fn):
    return lru_cache(maxsize=512)(fn)


def identity_functor(n: int) -> FunctorSpec:
    return FunctorSpec("id", COVARIANT, n, lambda A: A, lambda f: f, ("identity", None))


def tensor_by(B: FPModule) -> FunctorSpec:
    """``- ⊗ B``."""

    @_cached
    def on_module(A):
        return tensor(A, B).module

    def on_hom(f):
        mat = f.matrix.kron(IntMatrix.identity(B.g))
        return ModHom(on_module(f.src), on_module(f.dst), mat, check=False)

    return FunctorSpec(f"-⊗{list(B.invariant_factors)}", COVARIANT, B.n, on_module, on_hom, ("tensor", B))


@lru_cache(maxsize=1024)
def _hom(A, B):
    return hom_module(A, B)


def hom_from(B: FPModule) -> FunctorSpec:
    """``Hom(B, -)``, covariant."""

    def on_module(A):
        return _hom(B, A).module

    def on_hom(f):
        H, H2 = _hom(B, f.src), _hom(B, f.dst)
        cols = [H2.encode(f.compose(H.decode(x))).coords for x in H.module.gens()]
        return ModHom(H.module, H2.module, IntMatrix.from_columns(cols, H2.module.g), check=False)

    return FunctorSpec(f"Hom({list(B.invariant_factors)},-)", COVARIANT, B.n, on_module, on_hom, ("hom_from", B))


def hom_into(C: FPModule) -> FunctorSpec:
    """``Hom(-, C)``, contravariant."""

    def on_module(A):
        return _hom(A, C).module

    def on_hom(f):
        # f: A -> A' gives Hom(A', C) -> Hom(A, C), h |-> h ∘ f
        H, H2 = _hom(f.dst, C), _hom(f.src, C)
        cols = [H2.encode(H.decode(x).compose(f)).coords for x in H.module.gens()]
        return ModHom(H.module, H2.module, IntMatrix.from_columns(cols, H2.module.g), check=False)

    return FunctorSpec(f"Hom(-,{list(C.invariant_factors)})", CONTRAVARIANT, C.n, on_module, on_hom,
                       ("hom_into", C))


def check_functor_laws(T: FunctorSpec, pairs: Sequence[tuple], sums: Sequence[tuple] = ()) -> None:
    """Identity, composition and additivity on sampled homs; raises :class:`ContractError` on the first failure.

    ``pairs`` holds composable ``(f, g)`` with ``f: A -> B``, ``g: B -> C``;
    ``sums`` holds parallel ``(f1, f2)``.
    """
    for f, g in pairs:
        for A in (f.src, f.dst, g.dst):
            if T(identity(A)) != identity(T(A)):
                raise ContractError(f"{T.name} does not preserve the identity of {A!r}")
        lhs = T(g.compose(f))
        rhs = T(g).compose(T(f)) if T.covariant else T(f).compose(T(g))
        if lhs != rhs:
            raise ContractError(f"{T.name} does not preserve the composition {g!r} ∘ {f!r}")
    for f1, f2 in sums:
        if T(f1 + f2) != T(f1) + T(f2):
            raise ContractError(f"{T.name} is not additive on {f1!r} + {f2!r}")


def register_functor(T: FunctorSpec, pairs: Sequence[tuple], sums: Sequence[tuple] = ()) -> FunctorSpec:
    """Return ``T`` once it has passed :func:`check_functor_laws` on the given samples."""
    if T.variance not in (COVARIANT, CONTRAVARIANT):
        raise InputError(f"unknown variance {T.variance!r}")
    check_functor_laws(T, pairs, sums)
    return T


# -- systems and comparison maps ------------------------------------------

def map_system(T: FunctorSpec, S):
    """Apply ``T`` node-wise; a contravariant functor flips the system kind."""
    modules = [T(A) for A in S.modules]
    maps = {(a, b): T(S.map(a, b)) for a, b in S.poset.strict_pairs()}
    flips = not T.covariant
    direct = (S.kind == "direct") != flips
    cls = DirectSystem if direct else InverseSystem
    try:
        return cls(S.poset, modules, maps)
    except ValidationError as exc:
        raise ContractError(f"{T.name} broke functoriality: {exc}") from exc


def _is_iso(h: ModHom) -> bool:
    if h.src.invariant_factors != h.dst.invariant_factors:
        return False
    return kernel(h)[0].is_zero()


def _directed(S):
    if not S.poset.is_directed():
        raise PreconditionError("comparison maps require a directed poset")


def sigma_hat(T: FunctorSpec, S) -> ModHom:
    """``colim T(A^α) -> T(colim A^α)``, or ``colim T(A_α) -> T(lim A_α)`` for contravariant ``T``."""
    _directed(S)
    TS = map_system(T, S)
    cdT = colimit(TS)
    if T.covariant:
        if S.kind != "direct":
            raise InputError("sigma_hat of a covariant functor needs a direct system")
        cocone = [T(s) for s in colimit(S).sigma]
    else:
        if S.kind != "inverse":
            raise InputError("sigma_hat of a contravariant functor needs an inverse system")
        cocone = [T(x) for x in limit(S).xi]
    try:
        hat = colimit_mediating(cdT, cocone)
    except InputError as exc:
        raise ContractError(f"{T.name}: comparison cocone is incompatible ({exc})") from exc
    except InternalError as exc:
        raise ContractError(f"{T.name}: comparison map failed its defining identity ({exc})") from exc
    return hat


def xi_hat(T: FunctorSpec, S) -> ModHom:
    """``T(lim A_α) -> lim T(A_α)``, or ``T(colim A^α) -> lim T(A^α)`` for contravariant ``T``."""
    _directed(S)
    TS = map_system(T, S)
    ldT = limit(TS)
    if T.covariant:
        if S.kind != "inverse":
            raise InputError("xi_hat of a covariant functor needs an inverse system")
        cone = [T(x) for x in limit(S).xi]
    else:
        if S.kind != "direct":
            raise InputError("xi_hat of a contravariant functor needs a direct system")
        cone = [T(s) for s in colimit(S).sigma]
    try:
        hat = limit_mediating(ldT, cone)
    except InputError as exc:
        raise ContractError(f"{T.name}: comparison cone is incompatible ({exc})") from exc
    except InternalError as exc:
        raise ContractError(f"{T.name}: comparison map failed its defining identity ({exc})") from exc
    return hat


def is_L_sigma_star(T: FunctorSpec, S) -> bool:
    return _is_iso(sigma_hat(T, S))


def is_R_sigma_star(T: FunctorSpec, S) -> bool:
    return _is_iso(xi_hat(T, S))


# -- satellites --------------------------------------------------------------

@dataclass(frozen=True)
class SatelliteValue:
    object: FPModule
    witness_incl: ModHom         # S_1T(A) -> T(M)
    presentation: FreePresentation


def satellite(T: FunctorSpec, A: FPModule, mode: str = "economical", cap: int = 4096) -> SatelliteValue:
    """``S_1T(A) = ker(T(M) -> T(P))`` for the chosen free presentation ``0 -> M -> P -> A -> 0``."""
    if not T.covariant:
        raise InputError("left satellites are defined here for covariant functors")
    pres = free_presentation(A, mode, cap)
    K, incl = kernel(T(pres.incl))
    return SatelliteValue(K, incl, pres)


def _satellite_map(T, f: ModHom, src: SatelliteValue, dst: SatelliteValue) -> ModHom:
    # f: P' -> P over g; restrict to M' -> M, apply T, restrict to the satellites
    f_res = factor_through(f.compose(src.presentation.incl), dst.presentation.incl)
    if f_res is None:
        raise InternalError("lift of the presentation does not preserve the relation modules")
    out = factor_through(T(f_res).compose(src.witness_incl), dst.witness_incl)
    if out is None:
        raise InternalError("T(f') does not map S_1T(A') into S_1T(A)")
    return out


def satellite_hom(T: FunctorSpec, g: ModHom, src: SatelliteValue, dst: SatelliteValue) -> ModHom:
    """``S_1T(g)``, computed from one lift of ``g`` and confirmed against a second, different lift."""
    pp, p = src.presentation, dst.presentation
    if pp.q.dst != g.src or p.q.dst != g.dst:
        raise InputError("presentations do not match the hom")
    f = factor_through(g.compose(pp.q), p.q)
    if f is None:
        raise InternalError("no lift of g to the free modules: P' is not free?")
    result = _satellite_map(T, f, src, dst)
    if p.M.g and pp.P.g:
        # q ∘ incl = 0, so adding incl ∘ h to f gives another lift of g
        h = ModHom(pp.P, p.M, IntMatrix(p.M.g, pp.P.g, [[int(i == 0)] * pp.P.g for i in range(p.M.g)]),
                   check=False)
        other = _satellite_map(T, f + p.incl.compose(h), src, dst)
        if other != result:
            raise InternalError("satellite map depends on the chosen lift")
    return result


def satellite_functor(T: FunctorSpec, mode: str = "economical") -> FunctorSpec:
    """``S_1T`` as a functor; the presentation of each module is fixed and cached."""

    @lru_cache(maxsize=512)
    def value(A):
        return satellite(T, A, mode)

    def on_module(A):
        return value(A).object

    def on_hom(g):
        return satellite_hom(T, g, value(g.src), value(g.dst))

    recipe = None
    if T.recipe is not None:
        recipe = ("satellite", T.recipe)
    return FunctorSpec(f"S1({T.name})", COVARIANT, T.n, on_module, on_hom, recipe)


def satellite_iterate(T: FunctorSpec, A: FPModule, k: int) -> FPModule:
    """``S_kT(A)`` with ``S_0T = T`` and ``S_{k+1}T = S_1(S_kT)``."""
    if k < 0:
        raise InputError("satellite order must be >= 0")
    F = T
    for _ in range(k):
        F = satellite_functor(F)
    return F(A)


def tor1(B: FPModule, A: FPModule) -> FPModule:
    return satellite(tensor_by(B), A).object


def ext1(B: FPModule, A: FPModule) -> FPModule:
    """Cokernel of ``Hom(P, A) -> Hom(M, A)`` for the economical presentation ``M -> P -> B``."""
    if A.n != B.n:
        raise InputError(f"modulus mismatch: {B.n} vs {A.n}")
    pres = free_presentation(B)
    return cokernel(hom_into(A)(pres.incl))[0]


# -- theorem audits -----------------------------------------------------------

def _functor_certificate(T: FunctorSpec, A: FPModule, note: str) -> Diagram:
    d = Diagram(T.n, command=None, note=note)
    d.add_module("A", A)
    if T.recipe is not None:
        kind, B = T.recipe if T.recipe[0] != "satellite" else T.recipe[1]
        if B is not None:
            d.add_module("B", B)
        d.command = {"tensor": "tensor", "hom_from": "hom", "hom_into": "hom", "identity": "describe"}.get(kind)
    return d


def _theorem1(T: FunctorSpec, corpus, test_modules, label) -> AuditResult:
    hyp = {str(key): list(T(M).invariant_factors) for key, M in test_modules}
    hyp_holds = all(not v for v in hyp.values())
    values = [(A, T(A)) for A in corpus]
    nonzero = [(A, TA) for A, TA in values if not TA.is_zero()]
    details = {"hypothesis": hyp, "hypothesis_holds": hyp_holds,
               "corpus_size": len(corpus), "nonzero_values": len(nonzero)}
    if not hyp_holds:
        return AuditResult(label, Verdict.SKIPPED, details, note="hypothesis not met")
    if not nonzero:
        return AuditResult(label, Verdict.CONFIRMED, details)
    A, TA = nonzero[0]
    details["counterexample"] = {"module": list(A.invariant_factors), "value": list(TA.invariant_factors)}
    cert = _functor_certificate(T, A, f"{T.name} vanishes on the hypothesis modules but not on A")
    return AuditResult(label, Verdict.REFUTED, details, cert)


def theorem1_covariant_audit(T: FunctorSpec, corpus: Sequence[FPModule]) -> AuditResult:
    """Hypothesis ``T(Λ/(d)) = 0`` for every ``d | n``; conclusion ``T(A) = 0`` on the corpus."""
    if not T.covariant:
        raise InputError("covariant audit needs a covariant functor")
    tests = [(f"Λ/({d})", cyclic(T.n, d)) for d in divisors(T.n)]
    return _theorem1(T, corpus, tests, "theorem1_covariant")


def theorem1_contravariant_audit(T: FunctorSpec, corpus: Sequence[FPModule]) -> AuditResult:
    """Hypothesis ``T((d)) = 0`` for every ideal ``(d)``; conclusion ``T(A) = 0`` on the corpus."""
    if T.covariant:
        raise InputError("contravariant audit needs a contravariant functor")
    # the ideal (d) of Z/n is cyclic of order n/d
    tests = [(f"({d})", cyclic(T.n, T.n // d)) for d in divisors(T.n)]
    return _theorem1(T, corpus, tests, "theorem1_contravariant")


def elementwise_free_system(S: DirectSystem, cap: int = 256) -> Optional[DirectSystem]:
    """``P^α`` free on the elements of ``A^α`` with ``e_a -> e_{φ(a)}``; None if over ``cap`` elements in total."""
    if sum(A.order for A in S.modules) > cap:
        return None
    elts = [elements(A) for A in S.modules]
    index = [{e.canonical(): i for i, e in enumerate(es)} for es in elts]
    frees = [free(S.n, len(es)) for es in elts]
    maps = {}
    for a, b in S.poset.strict_pairs():
        phi = S.map(a, b)
        cols = []
        for e in elts[a]:
            j = index[b][phi(e).canonical()]
            cols.append([int(i == j) for i in range(len(elts[b]))])
        maps[(a, b)] = ModHom(frees[a], frees[b], IntMatrix.from_columns(cols, len(elts[b])), check=False)
    return DirectSystem(S.poset, frees, maps)


def theorem2_audit(T: FunctorSpec, systems: Sequence[DirectSystem], free_cap: int = 256) -> AuditResult:
    """Audit both implications of the satellite criterion on each system.

    (i): T is LΣ* ⇒ S_1T is LΣ*.  (ii): S_1T is LΣ* and T commutes with the
    colimit of the element-wise free system ⇒ T is LΣ*.  On finite directed
    posets every colimit is the value at the maximum, so both sides are
    usually true; the report says so rather than claiming more.
    """
    if not T.covariant:
        raise InputError("theorem 2 audit needs a covariant functor")
    S1 = satellite_functor(T)
    rows = []
    violations = []
    truncated = 0
    for idx, S in enumerate(systems):
        t_l = is_L_sigma_star(T, S)
        s_l = is_L_sigma_star(S1, S)
        P = elementwise_free_system(S, free_cap)
        p_l = None if P is None else is_L_sigma_star(T, P)
        if P is None:
            truncated += 1
        impl_i = (not t_l) or s_l
        impl_ii = True if p_l is None else (not (s_l and p_l)) or t_l
        rows.append({"system": idx, "T": t_l, "S1T": s_l, "T_on_free": p_l,
                     "implication_i": impl_i, "implication_ii": impl_ii})
        if not (impl_i and impl_ii):
            violations.append(idx)
    details = {"functor": T.name, "systems": len(systems), "violations": violations,
               "free_checks_truncated": truncated, "rows": rows,
               "evidence": "finite posets: every colimit is the value at the maximum node"}
    if violations:
        S = systems[violations[0]]
        labels = [str(i) for i in range(S.poset.size)]
        cert = Diagram(S.n, command="satellite", note=f"theorem 2 implication fails for {T.name}")
        cert.set_poset(S.poset, labels)
        cert.add_system("S", S, labels)
        if T.recipe and T.recipe[0] != "satellite" and T.recipe[1] is not None:
            cert.add_module("B", T.recipe[1])
        return AuditResult("theorem2", Verdict.REFUTED, details, cert)
    return AuditResult("theorem2", Verdict.CONFIRMED, details)
