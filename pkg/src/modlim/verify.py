"""Property suites and theorem audits behind ``modlim verify``.

Each check yields one row: ``property``, ``status`` (PASS/FAIL for
properties, a verdict for audits), ``cases`` and JSON-ready ``details``.
Failing rows carry a certificate document when the failure can be replayed
with ``modlim compute``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from . import functors as fn
from . import injectives as inj
from .audit import AuditResult
from .diagram import Diagram
from .errors import CapacityError
from .generators import DEFAULT_MODULI, random_composable_pair, random_module, random_system, split_system_sequence
from .limits import (
    check_colimit_right_exact,
    check_limit_left_exact,
    colimit,
    colimit_mediating,
    colimit_vanishes,
    limit,
    limit_mediating,
)
from .linalg import IntMatrix, kernel_mod, snf, solve_mod, span_membership
from .modules import (
    cyclic,
    direct_sum,
    elements,
    free,
    hom_module,
    identity,
    is_isomorphic,
    module_corpus,
    random_hom,
)
from .serialize import diagram_to_obj

SUITES = ("linalg", "limits", "functors", "injectives")


@dataclass
class Config:
    seed: int = 0
    max_order: int = 16
    moduli: tuple = DEFAULT_MODULI
    count: int = 10


def _row(suite, prop, status, cases, details=None, certificate: Optional[Diagram] = None) -> dict:
    row = {"suite": suite, "property": prop, "status": status, "cases": cases, "details": details or {}}
    if certificate is not None:
        row["certificate"] = diagram_to_obj(certificate)
    return row


def _audit_row(suite, res: AuditResult, cases: int = 1) -> dict:
    details = dict(res.details)
    if res.note:
        details["note"] = res.note
    return _row(suite, res.name, res.verdict.value, cases, details, res.certificate)


def _prop(suite, name, cases, failure) -> dict:
    if failure is None:
        return _row(suite, name, "PASS", cases)
    details, cert = failure if isinstance(failure, tuple) else (failure, None)
    return _row(suite, name, "FAIL", cases, details, cert)


def _system_doc(S, command: str, note: str) -> Diagram:
    labels = [str(i) for i in range(S.poset.size)]
    d = Diagram(S.n, command=command, note=note)
    d.set_poset(S.poset, labels)
    d.add_system("S", S, labels)
    return d


def _systems(cfg: Config, kind: str, salt: int) -> list:
    rng = random.Random(cfg.seed * 1000 + salt)
    return [random_system(rng, None, kind, 5, max(cfg.max_order, 1), cfg.moduli) for _ in range(cfg.count)]


# -- linalg ---------------------------------------------------------------------

def suite_linalg(cfg: Config) -> list:
    rng = random.Random(cfg.seed * 1000 + 1)
    rows = []
    fail = None
    for _ in range(cfg.count):
        r, c = rng.randint(0, 6), rng.randint(0, 6)
        M = IntMatrix(r, c, [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)])
        res = snf(M)
        diag = res.diagonal
        chain_ok = all(diag[i + 1] % diag[i] == 0 for i in range(len(diag) - 1) if diag[i])
        if res.U @ M @ res.V != res.S or not chain_ok:
            fail = {"matrix": M.tolist()}
            break
    rows.append(_prop("linalg", "snf_reconstruction_and_divisibility", cfg.count, fail))

    fail, cases = None, 0
    for n in [m for m in cfg.moduli if m <= 12]:
        for _ in range(max(1, cfg.count // 2)):
            r, c = rng.randint(1, 3), rng.randint(1, 3)
            M = IntMatrix(r, c, [[rng.randrange(n) for _ in range(c)] for _ in range(r)])
            K = kernel_mod(M, n)
            b = [rng.randrange(n) for _ in range(r)]
            images = {}
            for x in itertools.product(range(n), repeat=c):
                images.setdefault(tuple(v % n for v in M.apply(x)), x)
            kernel_ok = all(not any(v % n for v in M.apply(col)) for col in K.columns())
            kernel_ok = kernel_ok and all(
                span_membership(K, x, n) for x in itertools.product(range(n), repeat=c) if not any(
                    v % n for v in M.apply(x)))
            sol = solve_mod(M, b, n)
            solve_ok = (sol is not None) == (tuple(b) in images)
            if sol is not None:
                solve_ok = solve_ok and [v % n for v in M.apply(sol)] == b
            cases += 1
            if not (kernel_ok and solve_ok) and fail is None:
                fail = {"modulus": n, "matrix": M.tolist(), "rhs": b}
    rows.append(_prop("linalg", "kernel_and_solve_match_enumeration", cases, fail))
    return rows


# -- limits ---------------------------------------------------------------------

def suite_limits(cfg: Config) -> list:
    rows = []
    direct = _systems(cfg, "direct", 2)
    inverse = _systems(cfg, "inverse", 3)

    fail = None
    for S in direct:
        cd, t = colimit(S), S.poset.maximum()
        compat = all(cd.sigma[b].compose(S.map(a, b)) == cd.sigma[a] for a, b in S.poset.strict_pairs())
        if not (compat and is_isomorphic(cd.C, S.modules[t]) and cd.sigma[t].is_iso()):
            fail = ({"C": list(cd.C.invariant_factors)}, _system_doc(S, "colimit", "maximum-node oracle fails"))
            break
    rows.append(_prop("limits", "colimit_maximum_node_oracle", len(direct), fail))

    fail = None
    for S in inverse:
        ld, t = limit(S), S.poset.maximum()
        compat = all(S.map(a, b).compose(ld.xi[b]) == ld.xi[a] for a, b in S.poset.strict_pairs())
        if not (compat and is_isomorphic(ld.L, S.modules[t]) and ld.xi[t].is_iso()):
            fail = ({"L": list(ld.L.invariant_factors)}, _system_doc(S, "limit", "maximum-node oracle fails"))
            break
    rows.append(_prop("limits", "limit_maximum_node_oracle", len(inverse), fail))

    fail, cases = None, 0
    for S in direct:
        if sum(A.order for A in S.modules) > 4096:
            continue
        cd = colimit(S)
        for a, A in enumerate(S.modules):
            for x in elements(A):
                colimit_vanishes(S, a, x, cd)     # raises if the two tests disagree
                cases += 1
    rows.append(_prop("limits", "vanishing_characterizations_agree", cases, fail))

    rng = random.Random(cfg.seed * 1000 + 4)
    fail, cases = None, 0
    for S in direct:
        cd = colimit(S)
        X = random_module(rng, S.n, max(cfg.max_order, 1))
        if cd.C.order > 64 or X.order > 64:
            continue
        t = random_hom(cd.C, X, rng)
        cocone = [t.compose(s) for s in cd.sigma]
        theta = colimit_mediating(cd, cocone)
        hits = [h for h in hom_module(cd.C, X).homs()
                if all(h.compose(s) == f for s, f in zip(cd.sigma, cocone))]
        cases += 1
        if len(hits) != 1 or hits[0] != theta:
            fail = ({"solutions": len(hits)}, _system_doc(S, "colimit", "mediating map not unique"))
            break
    for S in inverse:
        ld = limit(S)
        X = random_module(rng, S.n, max(cfg.max_order, 1))
        if ld.L.order > 64 or X.order > 64:
            continue
        t = random_hom(X, ld.L, rng)
        cone = [x.compose(t) for x in ld.xi]
        theta = limit_mediating(ld, cone)
        hits = [h for h in hom_module(X, ld.L).homs() if all(x.compose(h) == f for x, f in zip(ld.xi, cone))]
        cases += 1
        if len(hits) != 1 or hits[0] != theta:
            fail = ({"solutions": len(hits)}, _system_doc(S, "limit", "mediating map not unique"))
            break
    rows.append(_prop("limits", "mediating_map_unique", cases, fail))

    for idx, (S1, S2) in enumerate(zip(direct[::2], direct[1::2])):
        if S1.poset == S2.poset and S1.n == S2.n:
            S, f, g = split_system_sequence(S1, S2)
            rows.append(_audit_row("limits", check_colimit_right_exact(S1, S, S2, f, g)))
    for idx, (S1, S2) in enumerate(zip(inverse[::2], inverse[1::2])):
        if S1.poset == S2.poset and S1.n == S2.n:
            S, f, g = split_system_sequence(S1, S2)
            rows.append(_audit_row("limits", check_limit_left_exact(S1, S, S2, f, g)))
    return rows


# -- functors -------------------------------------------------------------------

def suite_functors(cfg: Config) -> list:
    rows = []
    rng = random.Random(cfg.seed * 1000 + 5)
    mo = max(cfg.max_order, 1)

    fail, cases = None, 0
    for n in cfg.moduli:
        B = random_module(rng, n, min(mo, 16))
        for T in (fn.identity_functor(n), fn.tensor_by(B), fn.hom_from(B), fn.hom_into(B)):
            pairs = [random_composable_pair(rng, n, min(mo, 16)) for _ in range(max(1, cfg.count // 4))]
            sums = [(f, random_hom(f.src, f.dst, rng)) for f, _ in pairs]
            try:
                fn.check_functor_laws(T, pairs, sums)
            except Exception as exc:   # noqa: BLE001 - reported as a row
                fail = fail or {"functor": T.name, "modulus": n, "error": str(exc)}
            cases += len(pairs)
    rows.append(_prop("functors", "builtin_functor_laws", cases, fail))

    direct = _systems(cfg, "direct", 2)
    inverse = _systems(cfg, "inverse", 3)
    fail, cases = None, 0
    for S in direct:
        B = random_module(rng, S.n, min(mo, 16))
        cases += 1
        if not fn.is_L_sigma_star(fn.tensor_by(B), S):
            cert = _system_doc(S, "satellite", "tensor does not commute with this colimit")
            cert.add_module("B", B)
            fail = ({"B": list(B.invariant_factors)}, cert)
            break
    rows.append(_prop("functors", "tensor_commutes_with_colimits", cases, fail))

    fail, cases = None, 0
    for S in inverse:
        B = random_module(rng, S.n, min(mo, 16))
        cases += 1
        if not fn.is_R_sigma_star(fn.hom_from(B), S):
            fail = {"B": list(B.invariant_factors)}
            break
    rows.append(_prop("functors", "hom_commutes_with_limits", cases, fail))

    fail, cases = None, 0
    for n in cfg.moduli:
        corpus = [A for A in module_corpus(n, min(mo, 16))]
        for A in corpus:
            B = rng.choice(corpus)
            T = fn.tensor_by(B)
            e1 = fn.satellite(T, A).object
            e2 = fn.satellite(T, A, "elementwise").object
            cases += 1
            if not is_isomorphic(e1, e2):
                fail = fail or {"A": list(A.invariant_factors), "B": list(B.invariant_factors)}
            if not is_isomorphic(fn.tor1(A, B), fn.tor1(B, A)):
                fail = fail or {"tor_asymmetric": [list(A.invariant_factors), list(B.invariant_factors)]}
    rows.append(_prop("functors", "satellite_presentation_independent_and_tor_balanced", cases, fail))

    corpus4 = module_corpus(4, mo)
    rows.append(_audit_row("functors", fn.theorem1_covariant_audit(fn.tensor_by(free(4, 0)), corpus4),
                           len(corpus4)))
    rows.append(_audit_row("functors", fn.theorem1_covariant_audit(fn.tensor_by(cyclic(4, 2)), corpus4),
                           len(corpus4)))
    rows.append(_audit_row("functors", fn.theorem1_contravariant_audit(fn.hom_into(free(4, 0)), corpus4),
                           len(corpus4)))
    for n in sorted({S.n for S in direct}):
        systems = [S for S in direct if S.n == n]
        B = random_module(rng, n, min(mo, 16))
        rows.append(_audit_row("functors", fn.theorem2_audit(fn.tensor_by(B), systems), len(systems)))
    return rows


# -- injectives ---------------------------------------------------------------------

def suite_injectives(cfg: Config) -> list:
    rows = []
    rng = random.Random(cfg.seed * 1000 + 6)
    mo = max(cfg.max_order, 1)
    corpora = {n: module_corpus(n, mo) for n in cfg.moduli}

    fail, cases = None, 0
    for n, corpus in corpora.items():
        for A in corpus:
            cases += 1
            if inj.baer_is_injective(A) != inj.injectivity_oracle(A):
                fail = fail or ({"A": list(A.invariant_factors), "n": n},
                                inj._d_certificate("baer", "Baer test disagrees with the oracle", [A]))
    rows.append(_prop("injectives", "baer_matches_oracle", cases, fail))

    fail, cases = None, 0
    for n, corpus in corpora.items():
        for A in corpus:
            cases += 1
            if inj.phi_count(A) > 200:
                continue
            if len(inj.phi_index(A)) != inj.phi_count(A):
                fail = fail or {"A": list(A.invariant_factors), "n": n}
    rows.append(_prop("injectives", "phi_count_formula", cases, fail))

    fail, cases = None, 0
    for n, corpus in corpora.items():
        for A in corpus:
            if inj.phi_count(A) > 200:
                continue
            dc = inj.build_D(A)
            for ent in dc.entries:
                inj.extension_witness(dc, ent)
                cases += 1
            if not dc.iota.is_injective():
                fail = fail or ({"A": list(A.invariant_factors)},
                                inj._d_certificate("dfun", "ι is not injective", [A]))
    rows.append(_prop("injectives", "extension_property_and_iota_injective", cases, fail))

    fail, cases = None, 0
    for n in cfg.moduli:
        for _ in range(max(1, cfg.count // 2)):
            f, g = random_composable_pair(rng, n, min(mo, 16))
            if any(inj.phi_count(M) > 200 for M in (f.src, f.dst, g.dst)):
                continue
            dA, dB, dC = (inj.build_D(M) for M in (f.src, f.dst, g.dst))
            Df, Dg = inj.D_on_hom(f, dA, dB), inj.D_on_hom(g, dB, dC)
            ok = inj.D_on_hom(identity(f.src), dA, dA) == identity(dA.D)
            ok = ok and inj.D_on_hom(g.compose(f), dA, dC) == Dg.compose(Df)
            ok = ok and Df.compose(dA.iota) == dB.iota.compose(f)
            cases += 1
            if not ok:
                fail = fail or {"f": f.matrix.tolist(), "g": g.matrix.tolist(), "n": n}
    rows.append(_prop("injectives", "D_functorial_and_natural", cases, fail))

    fail, cases = None, 0
    injective = [A for corpus in corpora.values() for A in corpus
                 if inj.phi_count(A) <= 200 and inj.baer_is_injective(A)]
    for A in injective:
        inj.retraction_for_injective(inj.build_D(A))     # raises unless t∘s = id
        cases += 1
    rows.append(_prop("injectives", "retraction_identity", cases, fail))

    for A in injective:
        if A.n == 4 or A.is_zero():
            rows.append(_audit_row("injectives", inj.audit_D_iso_on_injective(A)))
            rows.append(_audit_row("injectives", inj.audit_D_iso_on_injective(A, reduced=True)))
    for n in cfg.moduli:
        corpus = [A for A in corpora[n] if A.order <= 4]
        for A1, A2 in itertools.islice(itertools.product(corpus, corpus), 3):
            ds = direct_sum(A1, A2)
            rows.append(_audit_row("injectives", inj.check_D_left_exact(ds.inj_a, ds.proj_b)))
        if n <= 6 and n in corpora and any(not A.is_zero() for A in corpora[n]):
            L = free(n, 1)
            ds = direct_sum(L, L)
            if max(inj.phi_count(M) for M in (L, ds.module)) <= 200:
                rows.append(_audit_row("injectives", inj.check_right_balanced(ds.inj_a, ds.proj_b)))
    for A in corpora.get(4, []):
        if A.order <= 8:
            crit = inj.ext_vanishing_criterion(A)
            rows.append(_row("injectives", "ext_vanishing_criterion", crit.verdict.value, 1,
                             {"A": list(A.invariant_factors), "baer": crit.baer,
                              "ext_vanishes_A": crit.ext_vanishes_A, "ext_vanishes_D": crit.ext_vanishes_D,
                              "table": crit.table}))
    chain = inj.iterate_D(cyclic(4, 2) if mo >= 2 else free(4, 0), cap_steps=2, cap_phi=200)
    rows.append(_row("injectives", "iterate_D", chain.verdict.value, len(chain.stages),
                     {"stages": [list(D.invariant_factors) for D in chain.stages],
                      "phi_sizes": chain.phi_sizes, "status": chain.status,
                      "composites_injective": chain.composites_injective}))
    return rows


RUNNERS: dict = {"linalg": suite_linalg, "limits": suite_limits,
                 "functors": suite_functors, "injectives": suite_injectives}


def run_suite(suite: str, cfg: Config) -> list:
    names = SUITES if suite == "all" else (suite,)
    rows = []
    for name in names:
        try:
            rows.extend(RUNNERS[name](cfg))
        except CapacityError as exc:
            rows.append(_row(name, "suite", "TRUNCATED", 0, {"error": str(exc)}))
    return rows


def summarize(rows: Sequence[dict]) -> dict:
    out: dict = {}
    for r in rows:
        out[r["status"]] = out.get(r["status"], 0) + 1
    return out
