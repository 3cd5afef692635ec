import itertools
import random

import pytest
from hypothesis import given, strategies as st

import oracles
from modlim.audit import Verdict
from modlim.errors import CapacityError, InputError, PreconditionError
from modlim.generators import random_composable_pair, random_module
from modlim.injectives import (
    D_on_hom,
    PhiEntry,
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
    phi_index,
    retraction_for_injective,
)
from modlim.linalg import IntMatrix
from modlim.modules import (
    FPModule,
    ModHom,
    cyclic,
    direct_sum,
    free,
    from_factors,
    identity,
    is_isomorphic,
    zero_hom,
)

Z4, Z2, ZERO4 = cyclic(4, 4), cyclic(4, 2), free(4, 0)


def factors(M):
    return list(M.invariant_factors)


def test_baer_examples():
    assert baer_is_injective(Z4)
    assert not baer_is_injective(Z2)
    assert baer_is_injective(ZERO4)
    assert injectivity_oracle((4, [4])) and not injectivity_oracle((4, [2, 4])) and injectivity_oracle((4, []))


def test_phi_examples():
    assert [(e.d, e.a.canonical()) for e in phi_index(Z2)] == [(1, (0,)), (1, (1,)), (2, (0,)), (2, (1,)), (4, (0,))]
    assert len(phi_index(ZERO4)) == 3
    assert len(phi_index(free(2, 0))) == 2
    assert phi_count(Z2, reduced=True) == 2
    with pytest.raises(CapacityError):
        phi_index(from_factors(4, [4, 4, 4]), cap=10)


def test_D_examples():
    assert factors(build_D(ZERO4).D) == [2, 4]
    dc = build_D(Z2)
    assert factors(dc.D) == [2, 4, 4]
    j = dc.entry_index(2, Z2.gen(0))
    assert dc.iota(Z2.gen(0)) == 2 * dc.D.gen(dc.e_gen(j))
    assert factors(build_D(Z4).D) == [2, 2, 4, 4]
    assert factors(build_D(Z4, reduced=True).D) == [2, 4]
    assert dc.D.g == Z2.g + len(dc.entries)


def test_D_on_hom_examples():
    inc = ModHom(Z2, Z4, IntMatrix.from_rows([[2]]))
    s, t = build_D(Z2), build_D(Z4)
    Di = D_on_hom(inc, s, t)
    x = s.D.gen(s.e_gen(s.entry_index(2, Z2.gen(0))))
    y = t.D.gen(t.e_gen(t.entry_index(2, 2 * Z4.gen(0))))
    assert Di(x) == y
    assert D_on_hom(identity(Z2), s, s) == identity(s.D)
    Dz = D_on_hom(zero_hom(Z2, Z4), s, t)
    for ent in s.entries:
        src = s.D.gen(s.e_gen(s.entry_index(ent.d, ent.a)))
        dst = t.D.gen(t.e_gen(t.entry_index(ent.d, Z4.zero())))
        assert Dz(src) == dst
    assert Di.compose(s.iota) == t.iota.compose(inc)


def test_extension_witness_examples():
    dc = build_D(Z2)
    x = extension_witness(dc, PhiEntry(2, Z2.gen(0)))
    assert 2 * x == dc.iota(Z2.gen(0))
    x0 = extension_witness(dc, PhiEntry(4, Z2.zero()))
    assert not x0.is_zero()
    x1 = extension_witness(dc, PhiEntry(1, Z2.gen(0)))
    assert x1 == dc.iota(Z2.gen(0))
    with pytest.raises(InputError):
        extension_witness(build_D(ZERO4), PhiEntry(2, Z2.gen(0)))


def test_retraction_examples():
    dc = build_D(Z4)
    s, t = retraction_for_injective(dc)
    j = dc.entry_index(2, 2 * Z4.gen(0))
    assert t(dc.D.gen(dc.e_gen(j))) == Z4.gen(0)
    assert t.compose(s) == identity(Z4)
    dz = build_D(ZERO4)
    s, t = retraction_for_injective(dz)
    assert t.is_zero() and t.compose(s) == identity(ZERO4)
    with pytest.raises(PreconditionError, match="base not injective"):
        retraction_for_injective(build_D(Z2))


def test_iso_audit_examples():
    r = audit_D_iso_on_injective(Z4)
    assert r.verdict == Verdict.REFUTED and r.details["D(A)"] == [2, 2, 4, 4]
    r = audit_D_iso_on_injective(ZERO4)
    assert r.verdict == Verdict.REFUTED and r.details["D(A)"] == [2, 4]
    r = audit_D_iso_on_injective(free(2, 0))
    assert r.details["D(A)"] == [2]
    assert audit_D_iso_on_injective(ZERO4, reduced=True).verdict == Verdict.CONFIRMED
    with pytest.raises(PreconditionError):
        audit_D_iso_on_injective(Z2)


def split(A, B):
    s = direct_sum(A, B)
    return s.inj_a, s.proj_b


def test_left_exact_examples():
    f, g = split(Z2, Z4)
    r = check_D_left_exact(f, g)
    assert r.verdict in (Verdict.CONFIRMED, Verdict.REFUTED)
    assert r.details["D_injective_left"]
    r = check_D_left_exact(identity(Z4), zero_hom(Z4, ZERO4))
    assert r.details["D_injective_left"]
    with pytest.raises(InputError):
        check_D_left_exact(zero_hom(Z2, Z4), identity(Z4))


def test_literal_D_is_not_left_exact_on_split_sequence():
    # an entry (d, (a, b)) with a, b both nonzero is one generator of D(A' ⊕ A''),
    # so D is not additive and a split sequence does not stay exact
    f, g = split(Z2, Z4)
    for reduced in (False, True):
        r = check_D_left_exact(f, g, reduced=reduced)
        assert r.verdict == Verdict.REFUTED and r.certificate is not None
        assert r.details["D_injective_left"] and not r.details["exact_middle"]


def test_right_balanced_examples():
    f, g = split(Z4, Z4)
    r = check_right_balanced(f, g)
    assert r.verdict == Verdict.REFUTED
    assert check_right_balanced(f, g, reduced=True).details["factors"] == [[2, 4], [2, 2, 2, 4, 4], [2, 4]]
    with pytest.raises(PreconditionError):
        check_right_balanced(*split(Z2, Z4))


def test_ext_criterion_examples():
    c = ext_vanishing_criterion(Z4)
    assert c.baer and c.table["A"][2] == []
    c = ext_vanishing_criterion(Z2)
    assert not c.baer and c.table["A"][2] == [2]
    c = ext_vanishing_criterion(ZERO4)
    assert c.baer and c.ext_vanishes_A
    # D(0) = Z/2 ⊕ Z/4 is not injective, so Ext into it does not vanish
    assert c.table["D(A)"][2] == [2] and c.verdict == Verdict.CONFIRMED


def test_iterate_examples():
    ch = iterate_D(Z4)
    assert len(ch.stages) == 1 and ch.verdict == Verdict.CONFIRMED
    ch = iterate_D(Z2, cap_steps=1)
    assert factors(ch.stages[1]) == [2, 4, 4] and not ch.injective[1] if len(ch.injective) > 1 else True
    assert ch.phi_sizes[0] == 5 and ch.verdict == Verdict.TRUNCATED
    assert phi_count(ch.stages[1]) == 41
    ch = iterate_D(ZERO4, cap_steps=1)
    assert ch.injective[0] and ch.status == "injective"


def test_omega_truncation_examples():
    ch = iterate_D(Z2, cap_steps=2, cap_phi=100)
    assert is_isomorphic(omega_truncation_colimit(ch, 1).C, Z2)
    cd = omega_truncation_colimit(ch, 2)
    assert is_isomorphic(cd.C, ch.stages[1]) and cd.sigma[1].is_iso()
    assert cd.sigma[0] == cd.sigma[1].compose(ch.embeddings[0])
    cd = omega_truncation_colimit(ch, 3)
    assert factors(cd.C) == factors(ch.stages[2])
    with pytest.raises(InputError):
        omega_truncation_colimit(ch, 0)


def test_relation_at_ideal_generator_spans_all_multiples():
    for A in (Z2, Z4, from_factors(4, [2, 4]), from_factors(6, [3])):
        dc = build_D(A)
        n, g, k = A.n, A.g, len(dc.entries)
        cols = [list(c) + [0] * k for c in A.relations.columns()]
        for j, e in enumerate(dc.entries):
            for mu in range(n // e.d):
                col = [mu * x for x in e.a.coords] + [0] * k
                col[g + j] = -mu * e.d
                cols.append(col)
        full = FPModule(n, IntMatrix.from_columns(cols, g + k))
        same = ModHom(dc.D, full, IntMatrix.identity(g + k))
        back = ModHom(full, dc.D, IntMatrix.identity(g + k))
        assert same.compose(back) == identity(full)


ALL_N = [2, 3, 4, 5, 6, 8, 9, 12]


def small_factor_lists(n, size=3):
    divs = [d for d in oracles.divisors(n) if d > 1]
    out = [[]]
    for r in range(1, size + 1):
        out += [list(c) for c in itertools.combinations_with_replacement(divs, r)]
    return out


@pytest.mark.parametrize("n", ALL_N)
def test_baer_matches_oracles(n):
    for fac in small_factor_lists(n, 2):
        A = from_factors(n, fac)
        expected = oracles.baer_literal(n, sorted(fac))
        assert baer_is_injective(A) == expected == injectivity_oracle(A)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_phi_and_D_match_oracles(n):
    for fac in small_factor_lists(n, 2):
        if oracles.phi_size(n, fac) > 40:
            continue
        A = from_factors(n, fac)
        assert phi_count(A) == len(phi_index(A)) == oracles.phi_size(n, fac)
        rows, G = oracles.d_construction_rows(n, sorted(fac))
        if G <= 5:
            assert factors(build_D(A).D) == oracles.invariant_factors(n, rows, G)


N = st.sampled_from([2, 3, 4, 6, 8, 9, 12])


@given(N, st.integers(0, 10**9))
def test_D_functorial_and_natural(n, seed):
    rng = random.Random(seed)
    f, g = random_composable_pair(rng, n, 8)
    A, B, C = f.src, f.dst, g.dst
    dA, dB, dC = build_D(A), build_D(B), build_D(C)
    Df, Dg = D_on_hom(f, dA, dB), D_on_hom(g, dB, dC)
    assert D_on_hom(g.compose(f), dA, dC) == Dg.compose(Df)
    assert D_on_hom(identity(A), dA, dA) == identity(dA.D)
    assert Df.compose(dA.iota) == dB.iota.compose(f)
    assert dA.iota.is_injective()


@given(N, st.integers(0, 10**9))
def test_extension_property_every_entry(n, seed):
    A = random_module(random.Random(seed), n, 16)
    dc = build_D(A)
    for e in dc.entries:
        extension_witness(dc, e)


@given(N, st.integers(0, 10**9))
def test_retraction_identity_on_injectives(n, seed):
    rng = random.Random(seed)
    fac = [n] * rng.randint(0, 2)
    A = from_factors(n, fac)
    s, t = retraction_for_injective(build_D(A))
    assert t.compose(s) == identity(A)
