import random

import pytest
from hypothesis import given, strategies as st

import oracles
from modlim.errors import InputError, PreconditionError, ValidationError
from modlim.generators import random_system, split_system_sequence
from modlim.limits import (
    DirectSystem,
    InverseSystem,
    Poset,
    check_colimit_right_exact,
    check_limit_left_exact,
    colimit,
    colimit_mediating,
    colimit_normal_form,
    colimit_vanishes,
    induced_colimit_map,
    induced_limit_map,
    limit,
    limit_mediating,
)
from modlim.linalg import IntMatrix
from modlim.modules import (
    ModHom,
    cyclic,
    direct_sum,
    elements,
    free,
    from_factors,
    identity,
    is_isomorphic,
    multiplication,
    zero_hom,
)

Z4, Z2 = cyclic(4, 4), cyclic(4, 2)


def chain2(A, phi, kind="direct"):
    cls = DirectSystem if kind == "direct" else InverseSystem
    return cls(Poset.chain(2), [A, A], {(0, 1): phi})


def test_poset_validation():
    with pytest.raises(InputError):
        Poset([[True, True], [True, True]])
    with pytest.raises(InputError):
        Poset([[False]])
    with pytest.raises(InputError):
        Poset([[True, True, False], [False, True, True], [False, False, True]])
    P = Poset.from_pairs(3, [(0, 1), (1, 2)])
    assert P.le(0, 2) and P.is_directed() and P.maximum() == 2
    assert not Poset.discrete(2).is_directed() and Poset.discrete(2).maximum() is None


def test_system_validation_names_square():
    P = Poset.chain(3)
    m = multiplication(Z4, 2)
    with pytest.raises(ValidationError, match="square"):
        DirectSystem(P, [Z4] * 3, {(0, 1): m, (1, 2): m, (0, 2): identity(Z4)})
    with pytest.raises(ValidationError):
        DirectSystem(P, [Z4] * 3, {(0, 1): m})


def test_colimit_examples():
    cd = colimit(DirectSystem(Poset.chain(1), [Z4], {}))
    assert is_isomorphic(cd.C, Z4) and cd.sigma[0].is_iso()
    S = chain2(Z4, multiplication(Z4, 2))
    cd = colimit(S)
    assert list(cd.C.invariant_factors) == [4]
    assert cd.sigma[0] == cd.sigma[1].compose(multiplication(Z4, 2)) and cd.sigma[1].is_iso()
    theta = colimit_mediating(cd, [multiplication(Z4, 2), identity(Z4)])
    assert theta.compose(cd.sigma[1]) == identity(Z4) and theta.is_iso()
    assert colimit_mediating(cd, list(cd.sigma)) == identity(cd.C)
    disc = colimit(DirectSystem(Poset.discrete(2), [Z2, Z4], {}))
    assert list(disc.C.invariant_factors) == [2, 4]


def test_normal_form_and_vanishing():
    S = chain2(Z4, multiplication(Z4, 2))
    cd = colimit(S)
    x = cd.sigma[0](Z4.gen(0)) + cd.sigma[1](Z4.gen(0))
    node, a = colimit_normal_form(cd, x)
    assert node == 1 and a == Z4.element([3])
    node, a = colimit_normal_form(cd, cd.C.zero())
    assert cd.sigma[node](a).is_zero()
    zero_chain = chain2(Z2, zero_hom(Z2, Z2))
    assert colimit_vanishes(zero_chain, 0, Z2.gen(0))
    assert colimit_vanishes(zero_chain, 0, Z2.zero())
    assert not colimit_vanishes(chain2(Z2, identity(Z2)), 0, Z2.gen(0))
    disc = DirectSystem(Poset.discrete(2), [Z2, Z2], {})
    with pytest.raises(PreconditionError):
        colimit_vanishes(disc, 0, Z2.gen(0))
    with pytest.raises(PreconditionError):
        colimit_normal_form(colimit(disc), colimit(disc).C.zero())


def test_mediating_rejects_incompatible_cocone():
    cd = colimit(chain2(Z4, multiplication(Z4, 2)))
    with pytest.raises(InputError):
        colimit_mediating(cd, [identity(Z4), identity(Z4)])


def test_induced_maps():
    S = chain2(Z4, multiplication(Z4, 2))
    cd = colimit(S)
    assert induced_colimit_map([identity(Z4)] * 2, cd, cd) == identity(cd.C)
    assert induced_colimit_map([zero_hom(Z4, Z4)] * 2, cd, cd).is_zero()
    F = induced_colimit_map([multiplication(Z4, 2)] * 2, cd, cd)
    assert F == multiplication(cd.C, 2)
    I = chain2(Z4, multiplication(Z4, 2), "inverse")
    ld = limit(I)
    assert induced_limit_map([identity(Z4)] * 2, ld, ld) == identity(ld.L)
    assert induced_limit_map([zero_hom(Z4, Z4)] * 2, ld, ld).is_zero()
    assert induced_limit_map([multiplication(Z4, 2)] * 2, ld, ld) == multiplication(ld.L, 2)
    with pytest.raises(InputError):
        induced_colimit_map([identity(Z4), zero_hom(Z4, Z4)], cd, cd)


def test_limit_examples():
    ld = limit(InverseSystem(Poset.chain(1), [Z2], {}))
    assert is_isomorphic(ld.L, Z2)
    I = chain2(Z4, multiplication(Z4, 2), "inverse")
    ld = limit(I)
    assert list(ld.L.invariant_factors) == [4] and ld.xi[1].is_iso()
    assert limit_mediating(ld, list(ld.xi)) == identity(ld.L)
    assert limit_mediating(ld, [zero_hom(free(4, 0), Z4)] * 2).is_zero()
    disc = limit(InverseSystem(Poset.discrete(2), [Z2, Z4], {}))
    assert list(disc.L.invariant_factors) == [2, 4]
    const = InverseSystem(Poset.chain(2), [Z2, Z2], {(0, 1): identity(Z2)})
    ld = limit(const)
    theta = limit_mediating(ld, [identity(Z2), identity(Z2)])
    assert all(x.compose(theta) == identity(Z2) for x in ld.xi)
    for v in elements(ld.L):
        coords = [x(v) for x in ld.xi]
        assert coords[0] == coords[1]


def test_exactness_examples():
    inc = ModHom(Z2, Z4, IntMatrix.from_rows([[2]]))
    proj = ModHom(Z4, Z2, IntMatrix.from_rows([[1]]))
    P = Poset.chain(2)
    Sp = DirectSystem(P, [Z2, Z2], {(0, 1): identity(Z2)})
    S = DirectSystem(P, [Z4, Z4], {(0, 1): identity(Z4)})
    Spp = DirectSystem(P, [Z2, Z2], {(0, 1): identity(Z2)})
    assert check_colimit_right_exact(Sp, S, Spp, [inc] * 2, [proj] * 2).holds
    Ip = InverseSystem(P, [Z2, Z2], {(0, 1): identity(Z2)})
    I = InverseSystem(P, [Z4, Z4], {(0, 1): identity(Z4)})
    Ipp = InverseSystem(P, [Z2, Z2], {(0, 1): identity(Z2)})
    assert check_limit_left_exact(Ip, I, Ipp, [inc] * 2, [proj] * 2).holds
    with pytest.raises(InputError):
        check_colimit_right_exact(Sp, S, Spp, [inc] * 2, [zero_hom(Z4, Z2)] * 2)


def systems(kind):
    return st.integers(0, 10**9).map(lambda s: random_system(random.Random(s), None, kind, 4, 32))


@given(systems("direct"))
def test_colimit_properties(S):
    cd = colimit(S)
    for a, b in S.poset.strict_pairs():
        assert cd.sigma[b].compose(S.map(a, b)) == cd.sigma[a]
    assert cd.proj.is_surjective()
    top = S.poset.maximum()
    assert is_isomorphic(cd.C, S.modules[top]) and cd.sigma[top].is_iso()
    if cd.big_sum.order <= 4096:
        rows = [M.relations.tolist() for M in S.modules]
        maps = {(a, b): S.map(a, b).matrix.tolist() for a, b in S.poset.strict_pairs()}
        if all(M.g for M in S.modules) and sum(M.g for M in S.modules) <= 5:
            assert oracles.colimit_order(S.n, rows, maps) == cd.C.order
    for a, A in enumerate(S.modules):
        for x in elements(A)[:8]:
            colimit_vanishes(S, a, x, cd)
            node, rep = colimit_normal_form(cd, cd.sigma[a](x))
            assert cd.sigma[node](rep) == cd.sigma[a](x)


@given(systems("inverse"))
def test_limit_properties(S):
    ld = limit(S)
    for a, b in S.poset.strict_pairs():
        assert S.map(a, b).compose(ld.xi[b]) == ld.xi[a]
    top = S.poset.maximum()
    assert is_isomorphic(ld.L, S.modules[top]) and ld.xi[top].is_iso()
    assert ld.incl.is_injective()


@given(systems("direct"), systems("direct"))
def test_split_sequences_exact(S1, S2):
    if S1.poset != S2.poset or S1.n != S2.n:
        return
    S, f, g = split_system_sequence(S1, S2)
    assert check_colimit_right_exact(S1, S, S2, f, g).holds


def test_non_directed_colimit_is_direct_sum_when_discrete():
    A, B = from_factors(6, [2]), from_factors(6, [3, 6])
    cd = colimit(DirectSystem(Poset.discrete(2), [A, B], {}))
    assert is_isomorphic(cd.C, direct_sum(A, B).module)
