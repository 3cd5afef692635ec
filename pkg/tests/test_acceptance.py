"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import json
import random
from functools import lru_cache

import pytest

import oracles
from modlim.audit import Verdict
from modlim.cli import run
from modlim.diagram import Diagram
from modlim.functors import (
    hom_from,
    is_L_sigma_star,
    is_R_sigma_star,
    satellite,
    tensor_by,
    theorem2_audit,
    tor1,
)
from modlim.generators import DEFAULT_MODULI, random_composable_pair, random_presented_module, random_system, system_batch
from modlim.injectives import (
    D_on_hom,
    audit_D_iso_on_injective,
    baer_is_injective,
    build_D,
    check_D_left_exact,
    check_right_balanced,
    ext_vanishing_criterion,
    extension_witness,
    injectivity_oracle,
    iterate_D,
    omega_truncation_colimit,
    phi_count,
    retraction_for_injective,
)
from modlim.limits import colimit, colimit_mediating, colimit_vanishes, limit, limit_mediating
from modlim.modules import (
    cyclic,
    direct_sum,
    elements,
    free,
    from_factors,
    hom_module,
    identity,
    is_isomorphic,
    module_corpus,
    random_hom,
)
from modlim.serialize import serialize, parse

ALL_MODULI = (2, 3, 4, 5, 6, 8, 9, 12)
SEED = 20240


@pytest.fixture
def report(capsys):
    def emit(number, ok, summary):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {summary}")
        assert ok, summary
    return emit


@lru_cache(maxsize=None)
def direct_systems():
    return tuple(system_batch(SEED, 200, "direct", max_nodes=5, max_order=64))


@lru_cache(maxsize=None)
def inverse_systems():
    return tuple(system_batch(SEED + 1, 200, "inverse", max_nodes=5, max_order=64))


def corpus(n, max_order=16):
    return module_corpus(n, max_order)


def test_01_baer_matches_oracle(report):
    cases = mismatches = 0
    for n in ALL_MODULI:
        divs = [d for d in oracles.divisors(n) if d > 1]
        for r in range(4):
            for fac in itertools.combinations_with_replacement(divs, r):
                A = from_factors(n, list(fac))
                cases += 1
                if baer_is_injective(A) != injectivity_oracle(A):
                    mismatches += 1
                elif A.order <= 64 and baer_is_injective(A) != oracles.baer_literal(n, list(fac)):
                    mismatches += 1
        # the same classes again, through random non-diagonal presentations on <= 3 generators
        rng = random.Random(SEED + n)
        for _ in range(40):
            A = random_presented_module(rng, n, 3, 3)
            cases += 1
            expected = oracles.baer_literal(n, list(A.invariant_factors)) if A.order <= 64 else injectivity_oracle(A)
            mismatches += baer_is_injective(A) != expected
    report(1, mismatches == 0 and cases >= 300, f"Baer vs oracle on {cases} modules, {mismatches} mismatches")


def test_02_maximum_node_oracle(report):
    bad = 0
    for S in direct_systems():
        cd, top = colimit(S), S.poset.maximum()
        bad += not (is_isomorphic(cd.C, S.modules[top]) and cd.sigma[top].is_iso())
    for S in inverse_systems():
        ld, top = limit(S), S.poset.maximum()
        bad += not (is_isomorphic(ld.L, S.modules[top]) and ld.xi[top].is_iso())
    report(2, bad == 0, f"colimit/limit equals the top value on 400 systems, {bad} failures")


def test_03_vanishing_characterizations_agree(report):
    systems = [S for S in direct_systems() if colimit(S).big_sum.order <= 4096]
    checks = 0
    for S in systems:
        cd = colimit(S)
        for a, A in enumerate(S.modules):
            for x in elements(A):
                colimit_vanishes(S, a, x, cd)      # raises if the two tests disagree
                checks += 1
    report(3, len(systems) > 0, f"{checks} elements over {len(systems)} systems, characterizations agree")


def test_04_mediating_hom_unique(report):
    rng = random.Random(SEED + 4)
    cases = 0
    bad = 0
    for S in direct_systems():
        cd = colimit(S)
        if cd.C.order > 64:
            continue
        X = rng.choice([M for M in corpus(S.n, 64)])
        H = hom_module(cd.C, X)
        if H.module.order > 4096:
            continue
        h = random_hom(cd.C, X, rng)
        cocone = [h.compose(s) for s in cd.sigma]
        hits = [t for t in H.homs() if all(t.compose(s) == f for s, f in zip(cd.sigma, cocone))]
        bad += not (len(hits) == 1 and hits[0] == colimit_mediating(cd, cocone) == h)
        cases += 1
    for S in inverse_systems():
        ld = limit(S)
        if ld.L.order > 64:
            continue
        X = rng.choice([M for M in corpus(S.n, 64)])
        H = hom_module(X, ld.L)
        if H.module.order > 4096:
            continue
        h = random_hom(X, ld.L, rng)
        cone = [x.compose(h) for x in ld.xi]
        hits = [t for t in H.homs() if all(x.compose(t) == f for x, f in zip(ld.xi, cone))]
        bad += not (len(hits) == 1 and hits[0] == limit_mediating(ld, cone) == h)
        cases += 1
    report(4, bad == 0 and cases > 100, f"exactly one mediating hom in {cases} enumerated cases, {bad} failures")


def test_05_tensor_and_hom_commute_with_limits(report):
    checks = bad = 0
    for S in direct_systems():
        for B in corpus(S.n):
            bad += not is_L_sigma_star(tensor_by(B), S)
            checks += 1
    for S in inverse_systems():
        for B in corpus(S.n):
            bad += not is_R_sigma_star(hom_from(B), S)
            checks += 1
    report(5, bad == 0, f"{checks} comparison maps are isomorphisms, {bad} failures")


def test_06_satellite_values(report):
    ok = list(tor1(cyclic(4, 2), cyclic(4, 2)).invariant_factors) == [2]
    checks = 0
    for n in DEFAULT_MODULI:
        mods = corpus(n)
        for B in mods:
            T = tensor_by(B)
            for r in range(3):
                ok &= satellite(T, free(n, r)).object.is_zero()
            for A in mods:
                eco = satellite(T, A, "economical").object
                elt = satellite(T, A, "elementwise").object
                ok &= eco.invariant_factors == elt.invariant_factors
                ok &= tor1(A, B).invariant_factors == tor1(B, A).invariant_factors
                checks += 1
    report(6, bool(ok), f"Tor1(Z/2,Z/2)=[2], free satellites vanish, {checks} presentation/symmetry pairs agree")


def test_07_satellite_of_tensor_is_colimit_preserving(report):
    by_n = {}
    for S in direct_systems():
        by_n.setdefault(S.n, []).append(S)
    violations = 0
    rows = 0
    for n, systems in sorted(by_n.items()):
        p = min(d for d in oracles.divisors(n) if d > 1)
        res = theorem2_audit(tensor_by(cyclic(n, p)), systems)
        rows += len(res.details["rows"])
        violations += len(res.details["violations"])
        violations += sum(not (r["T"] and r["S1T"]) for r in res.details["rows"])
    report(7, violations == 0 and rows == 200, f"{rows} systems over {len(by_n)} moduli, {violations} violations")


def test_08_extension_property(report):
    entries = 0
    for n in DEFAULT_MODULI:
        for A in corpus(n, 64):
            if phi_count(A) > 200:
                continue
            dc = build_D(A)
            for e in dc.entries:
                extension_witness(dc, e)          # raises on failure
                entries += 1
    report(8, entries > 0, f"ι(f(λ)) = λx verified for {entries} entries over the full ideal")


def test_09_D_functorial_and_natural(report):
    built = {}

    def D(A):
        if id(A) not in built:
            built[id(A)] = (A, build_D(A))
        return built[id(A)][1]

    bad = cases = 0
    for n in DEFAULT_MODULI:
        rng = random.Random(SEED + n)
        for _ in range(100):
            f, g = random_composable_pair(rng, n, 16)
            dA, dB, dC = D(f.src), D(f.dst), D(g.dst)
            Df, Dg = D_on_hom(f, dA, dB), D_on_hom(g, dB, dC)
            bad += not (D_on_hom(identity(f.src), dA, dA) == identity(dA.D)
                        and D_on_hom(g.compose(f), dA, dC) == Dg.compose(Df)
                        and Df.compose(dA.iota) == dB.iota.compose(f))
            cases += 1
    report(9, bad == 0, f"{cases} composable pairs, {bad} failures")


def test_10_retraction_identity(report):
    count = bad = 0
    for n in ALL_MODULI:
        for A in corpus(n, 64):
            if not baer_is_injective(A) or phi_count(A) > 2000:
                continue
            s, t = retraction_for_injective(build_D(A))
            bad += t.compose(s) != identity(A)
            count += 1
    report(10, bad == 0 and count > 0, f"t∘s = id on {count} injective modules, {bad} failures")


def _audit_fingerprint():
    Z4, Z0 = free(4, 1), free(4, 0)
    out = []
    for reduced in (False, True):
        for A in (Z4, Z0):
            r = audit_D_iso_on_injective(A, reduced)
            out.append((r.verdict.value, json.dumps(r.details, sort_keys=True),
                        serialize(r.certificate) if r.certificate else None))
        s = direct_sum(Z4, Z4)
        for check in (check_D_left_exact, check_right_balanced):
            r = check(s.inj_a, s.proj_b, reduced)
            out.append((r.verdict.value, json.dumps(r.details, sort_keys=True),
                        serialize(r.certificate) if r.certificate else None))
        c = ext_vanishing_criterion(cyclic(4, 2), reduced)
        out.append((c.verdict.value, json.dumps(c.table, sort_keys=True)))
    return out


def test_11_injective_audits_deterministic(report, tmp_path, capsys):
    first, second = _audit_fingerprint(), _audit_fingerprint()
    literal_L = list(build_D(free(4, 1)).D.invariant_factors)
    literal_0 = list(build_D(free(4, 0)).D.invariant_factors)
    reduced = audit_D_iso_on_injective(free(4, 1), reduced=True)
    # every certificate replays through the CLI with the same verdict
    replayed = True
    for verdict, _, cert in (row for row in first if len(row) == 3):
        if cert is None:
            continue
        path = tmp_path / "cert.json"
        path.write_text(cert)
        obj = parse(cert)
        flags = ["--reduced"] if "reduced" in (obj.note or "") else []
        assert run(["compute", obj.command, "-i", str(path)] + flags) == 0
        rep = json.loads(capsys.readouterr().out)["results"]
        verdicts = [m["iso_audit"]["verdict"] for m in rep["modules"].values() if "iso_audit" in m]
        verdicts += [s[k]["verdict"] for s in rep.get("sequences", []) for k in ("left_exact", "right_balanced") if k in s]
        replayed &= "REFUTED" in verdicts
    ok = first == second and literal_L == [2, 2, 4, 4] and literal_0 == [2, 4] and replayed
    report(11, ok, f"deterministic audits, D(Λ)={literal_L}, D(0)={literal_0}, "
                   f"reduced D(Λ)={reduced.details['D(A)']} ({reduced.verdict.value}), certificates replay")


def test_12_iteration_bookkeeping(report):
    chain = iterate_D(cyclic(4, 2), cap_steps=2, cap_phi=100)
    D1 = list(chain.stages[1].invariant_factors)
    phi1 = chain.phi_sizes[1]
    prefixes = all(is_isomorphic(omega_truncation_colimit(chain, m).C, chain.stages[m - 1])
                   for m in range(1, len(chain.stages) + 1))
    ok = D1 == [2, 4, 4] and phi1 == 41 and chain.composites_injective and prefixes
    report(12, ok, f"D1={D1}, |Φ(D1)|={phi1}, {len(chain.stages)} stages, embeddings injective, prefixes match")


def test_13_round_trip_and_verify_determinism(report, tmp_path):
    rng = random.Random(SEED + 13)
    stable = 0
    for _ in range(50):
        S = random_system(rng, None, rng.choice(["direct", "inverse"]), 5, 64)
        labels = [f"n{i}" for i in range(S.poset.size)]
        d = Diagram(S.n)
        d.set_poset(S.poset, labels)
        d.add_system("S", S, labels)
        text = serialize(d)
        stable += serialize(parse(text)) == text
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["verify", "all", "--seed", "11", "-o", str(a)])
    run(["verify", "all", "--seed", "11", "-o", str(b)])
    same = a.read_bytes() == b.read_bytes()
    report(13, stable == 50 and same, f"{stable}/50 documents byte-stable, verify all reports identical: {same}")
