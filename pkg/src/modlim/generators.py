"""Seeded random inputs: posets with a maximum, direct and inverse systems, hom pairs."""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Optional, Sequence

from .limits import DirectSystem, InverseSystem, Poset, system_from_generators
from .linalg import IntMatrix, block_diag, kernel_mod
from .modules import FPModule, ModHom, direct_sum, module_corpus, random_hom

DEFAULT_MODULI = (2, 3, 4, 6, 8, 9, 12)


@lru_cache(maxsize=64)
def _corpus(n: int, max_order: int) -> tuple:
    return tuple(module_corpus(n, max_order))


def random_module(rng: random.Random, n: int, max_order: int = 64) -> FPModule:
    return rng.choice(_corpus(n, max_order))


def random_presented_module(rng: random.Random, n: int, max_gens: int = 3, max_rels: int = 3) -> FPModule:
    """A module given by a random (generally non-diagonal) relation matrix."""
    g = rng.randint(0, max_gens)
    r = rng.randint(0, max_rels) if g else 0
    rows = [[rng.randrange(n) for _ in range(r)] for _ in range(g)]
    return FPModule(n, IntMatrix(g, r, rows))


def random_tree_poset(rng: random.Random, size: int) -> tuple:
    """A rooted tree ordered towards its root ``size - 1``; returns ``(poset, parent)``."""
    parent = {i: rng.randrange(i + 1, size) for i in range(size - 1)}
    return Poset.from_pairs(size, list(parent.items())), parent


def random_directed_poset(rng: random.Random, size: int, density: float = 0.4) -> Poset:
    """Random order on ``0..size-1`` refining the index order, with maximum ``size - 1``."""
    pairs = [(i, j) for i in range(size) for j in range(i + 1, size) if rng.random() < density]
    pairs += [(i, size - 1) for i in range(size - 1)]
    return Poset.from_pairs(size, pairs)


def _tree_system(rng, n, size, max_order, kind):
    poset, parent = random_tree_poset(rng, size)
    modules = [random_module(rng, n, max_order) for _ in range(size)]
    covers = {}
    for child, par in parent.items():
        if kind == "direct":
            covers[(child, par)] = random_hom(modules[child], modules[par], rng)
        else:
            covers[(child, par)] = random_hom(modules[par], modules[child], rng)
    return system_from_generators(kind, poset, modules, covers)


def _subquotient_system(rng, n, size, max_order, kind):
    # A node is span(U_j) + span(K_j) modulo span(K_j) inside a fixed X, with j over the
    # node's downset (direct) or upset (inverse); maps are induced by the identity of X.
    poset = random_directed_poset(rng, size)
    X = random_module(rng, n, max_order)
    U = [[tuple(rng.randrange(n) for _ in range(X.g)) for _ in range(rng.randint(0, 2))] for _ in range(size)]
    K = [[tuple(rng.randrange(n) for _ in range(X.g)) for _ in range(int(rng.random() < 0.4))] for _ in range(size)]

    def region(a):
        if kind == "direct":
            return [j for j in range(size) if poset.le(j, a)]
        return [j for j in range(size) if poset.le(a, j)]

    gens, modules = [], []
    for a in range(size):
        us = [(j, t) for j in region(a) for t in range(len(U[j]))]
        ks = [v for j in region(a) for v in K[j]]
        cols = [U[j][t] for j, t in us] + ks
        span = IntMatrix.from_columns(cols, X.g).hstack(X.relations)
        rel = kernel_mod(span, n).select_rows(range(len(us))) if us else IntMatrix(0, 0)
        gens.append(us)
        modules.append(FPModule(n, rel))
    maps = {}
    for a, b in poset.strict_pairs():
        src, dst = (a, b) if kind == "direct" else (b, a)
        where = {key: i for i, key in enumerate(gens[dst])}
        cols = [[int(i == where[key]) for i in range(len(gens[dst]))] for key in gens[src]]
        maps[(a, b)] = ModHom(modules[src], modules[dst], IntMatrix.from_columns(cols, len(gens[dst])))
    cls = DirectSystem if kind == "direct" else InverseSystem
    return cls(poset, modules, maps)


def random_system(rng: random.Random, n: Optional[int] = None, kind: str = "direct", max_nodes: int = 5,
                  max_order: int = 64, moduli: Sequence[int] = DEFAULT_MODULI):
    """A random system over a directed poset (tree or general) with at most ``max_nodes`` nodes."""
    if n is None:
        n = rng.choice(list(moduli))
    size = rng.randint(1, max_nodes)
    if rng.random() < 0.5:
        return _tree_system(rng, n, size, max_order, kind)
    return _subquotient_system(rng, n, size, max_order, kind)


def system_batch(seed: int, count: int, kind: str = "direct", moduli: Sequence[int] = DEFAULT_MODULI,
                 max_nodes: int = 5, max_order: int = 64) -> list:
    rng = random.Random(seed)
    return [random_system(rng, None, kind, max_nodes, max_order, moduli) for _ in range(count)]


def random_composable_pair(rng: random.Random, n: int, max_order: int = 16) -> tuple:
    A, B, C = (random_module(rng, n, max_order) for _ in range(3))
    return random_hom(A, B, rng), random_hom(B, C, rng)


def split_system_sequence(S1, S2):
    """``0 -> S1 -> S1 ⊕ S2 -> S2 -> 0`` node-wise; returns ``(S, inclusions, projections)``."""
    if S1.poset != S2.poset or S1.kind != S2.kind:
        raise ValueError("systems must share poset and kind")
    sums = [direct_sum(A, B) for A, B in zip(S1.modules, S2.modules)]
    maps = {}
    for a, b in S1.poset.strict_pairs():
        f, g = S1.map(a, b), S2.map(a, b)
        src, dst = (a, b) if S1.kind == "direct" else (b, a)
        maps[(a, b)] = ModHom(sums[src].module, sums[dst].module, block_diag(f.matrix, g.matrix), check=False)
    cls = DirectSystem if S1.kind == "direct" else InverseSystem
    S = cls(S1.poset, [s.module for s in sums], maps)
    return S, [s.inj_a for s in sums], [s.proj_b for s in sums]
