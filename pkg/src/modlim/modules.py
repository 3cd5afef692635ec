"""Finitely presented modules over Z/n and their homomorphisms.

A module is stored as a relation matrix whose *columns* are relations among
``g`` generators; the module is ``(Z/n)^g`` modulo the column span.  A hom
``A -> B`` is a ``B.g x A.g`` matrix acting on coordinate columns, so
composition is plain matrix product.

Each module caches the Smith data of its relation matrix at construction.
That data gives the invariant factors, a canonical coordinate system
(``A.coords``), and the change of basis used by :func:`elements`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod
from typing import Iterator, Optional, Sequence

from .errors import CapacityError, InputError
from .linalg import IntMatrix, block_diag, kernel_mod, lifted_snf, solve_mod, span_membership

DEFAULT_ELEMENT_CAP = 1 << 16


class FPModule:
    """Finitely presented Z/n-module ``(Z/n)^g / span(relations)``."""

    __slots__ = ("n", "relations", "invariant_factors", "_to_canon", "_from_canon", "_hash")

    def __init__(self, n: int, relations: IntMatrix):
        if n < 2:
            raise InputError(f"modulus must be >= 2, got {n}")
        self.n = n
        self.relations = relations.mod(n)
        snf = lifted_snf(self.relations, n)
        keep = [i for i, d in enumerate(snf.diagonal) if d != 1]
        self.invariant_factors = tuple(snf.diagonal[i] for i in keep)
        self._to_canon = snf.U.select_rows(keep)
        self._from_canon = snf.U_inv.select_columns(keep)
        self._hash = None

    @property
    def g(self) -> int:
        return self.relations.rows

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    def is_zero(self) -> bool:
        return not self.invariant_factors

    def __eq__(self, other):
        if not isinstance(other, FPModule):
            return NotImplemented
        return self.n == other.n and self.relations == other.relations

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.relations))
        return self._hash

    def __repr__(self):
        return f"FPModule(n={self.n}, g={self.g}, factors={list(self.invariant_factors)})"

    # -- coordinates -----------------------------------------------------
    def in_relations(self, vec: Sequence[int]) -> bool:
        """True iff the coordinate vector is zero in the module."""
        return span_membership(self.relations, vec, self.n)

    def coords(self, vec: Sequence[int]) -> tuple:
        """Canonical coordinates of a class: one residue mod each invariant factor."""
        y = self._to_canon.apply(vec)
        return tuple(v % d for v, d in zip(y, self.invariant_factors))

    def from_coords(self, coords: Sequence[int]) -> tuple:
        """Generator coordinates of the class with the given canonical coordinates."""
        return tuple(x % self.n for x in self._from_canon.apply(coords))

    def element(self, vec: Sequence[int]) -> "Element":
        if len(vec) != self.g:
            raise InputError(f"element needs {self.g} coordinates, got {len(vec)}")
        return Element(self, tuple(int(x) % self.n for x in vec))

    def zero(self) -> "Element":
        return Element(self, (0,) * self.g)

    def gen(self, i: int) -> "Element":
        return Element(self, tuple(int(i == j) for j in range(self.g)))

    def gens(self) -> list:
        return [self.gen(i) for i in range(self.g)]


@dataclass(frozen=True, eq=False)
class Element:
    parent: FPModule
    coords: tuple

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if self.parent != other.parent:
            return False
        return self.parent.in_relations([a - b for a, b in zip(self.coords, other.coords)])

    def __hash__(self):
        return hash((self.parent, self.parent.coords(self.coords)))

    def is_zero(self) -> bool:
        return self.parent.in_relations(self.coords)

    def canonical(self) -> tuple:
        return self.parent.coords(self.coords)

    def _check(self, other):
        if not isinstance(other, Element) or other.parent != self.parent:
            raise InputError("elements of different modules")

    def __add__(self, other):
        self._check(other)
        n = self.parent.n
        return Element(self.parent, tuple((a + b) % n for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        n = self.parent.n
        return Element(self.parent, tuple((a - b) % n for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        n = self.parent.n
        return Element(self.parent, tuple((-a) % n for a in self.coords))

    def __rmul__(self, k: int):
        n = self.parent.n
        return Element(self.parent, tuple((k * a) % n for a in self.coords))

    __mul__ = __rmul__

    def __repr__(self):
        return f"Element({list(self.coords)})"


class ModHom:
    """Z/n-linear map ``src -> dst``; ``matrix`` has ``dst.g`` rows and ``src.g`` columns."""

    __slots__ = ("src", "dst", "matrix")

    def __init__(self, src: FPModule, dst: FPModule, matrix: IntMatrix, check: bool = True):
        if src.n != dst.n:
            raise InputError(f"modulus mismatch: {src.n} vs {dst.n}")
        if matrix.shape != (dst.g, src.g):
            raise InputError(f"hom matrix has shape {matrix.shape}, expected {(dst.g, src.g)}")
        self.src = src
        self.dst = dst
        self.matrix = matrix.mod(src.n)
        if check:
            image_of_relations = self.matrix @ src.relations
            for j in range(image_of_relations.cols):
                if not dst.in_relations(image_of_relations.column(j)):
                    raise InputError(f"ill-formed hom: relation {j} of the source does not map to zero")

    @property
    def n(self) -> int:
        return self.src.n

    def __repr__(self):
        return f"ModHom({self.src!r} -> {self.dst!r}, {self.matrix.tolist()})"

    def __call__(self, x: Element) -> Element:
        if x.parent != self.src:
            raise InputError("element is not in the source of the hom")
        return self.dst.element(self.matrix.apply(x.coords))

    def image_of(self, vec: Sequence[int]) -> tuple:
        return tuple(v % self.n for v in self.matrix.apply(vec))

    def compose(self, inner: "ModHom") -> "ModHom":
        """``self ∘ inner``."""
        if inner.dst != self.src:
            raise InputError("homs are not composable")
        return ModHom(inner.src, self.dst, self.matrix @ inner.matrix, check=False)

    __matmul__ = compose

    def _same_shape(self, other: "ModHom"):
        if self.src != other.src or self.dst != other.dst:
            raise InputError("homs have different source or target")

    def __add__(self, other: "ModHom") -> "ModHom":
        self._same_shape(other)
        return ModHom(self.src, self.dst, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "ModHom") -> "ModHom":
        self._same_shape(other)
        return ModHom(self.src, self.dst, self.matrix - other.matrix, check=False)

    def __neg__(self) -> "ModHom":
        return ModHom(self.src, self.dst, -self.matrix, check=False)

    def scale(self, k: int) -> "ModHom":
        return ModHom(self.src, self.dst, self.matrix.scale(k), check=False)

    def is_zero(self) -> bool:
        return all(self.dst.in_relations(c) for c in self.matrix.columns())

    def __eq__(self, other):
        if not isinstance(other, ModHom):
            return NotImplemented
        if self.src != other.src or self.dst != other.dst:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def is_injective(self) -> bool:
        return kernel(self)[0].is_zero()

    def is_surjective(self) -> bool:
        return cokernel(self)[0].is_zero()

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()


# -- constructors --------------------------------------------------------

def free(n: int, g: int) -> FPModule:
    return FPModule(n, IntMatrix.zeros(g, 0))


def cyclic(n: int, d: int) -> FPModule:
    """``Z/d`` as a Z/n-module (``d`` must divide ``n``); ``cyclic(n, n)`` is the ring itself."""
    if d < 1 or n % d:
        raise InputError(f"{d} does not divide {n}")
    return FPModule(n, IntMatrix.from_rows([[d]]))


def from_factors(n: int, factors: Sequence[int]) -> FPModule:
    """Diagonal presentation ``⊕ Z/d_i``."""
    for d in factors:
        if d < 1 or n % d:
            raise InputError(f"{d} does not divide {n}")
    return FPModule(n, IntMatrix.diagonal(list(factors)))


def identity(A: FPModule) -> ModHom:
    return ModHom(A, A, IntMatrix.identity(A.g), check=False)


def zero_hom(A: FPModule, B: FPModule) -> ModHom:
    return ModHom(A, B, IntMatrix.zeros(B.g, A.g), check=False)


def multiplication(A: FPModule, k: int) -> ModHom:
    return ModHom(A, A, IntMatrix.identity(A.g, k), check=False)


@dataclass(frozen=True)
class DirectSum:
    module: FPModule
    injections: tuple
    projections: tuple

    # two-summand accessors
    @property
    def inj_a(self):
        return self.injections[0]

    @property
    def inj_b(self):
        return self.injections[1]

    @property
    def proj_a(self):
        return self.projections[0]

    @property
    def proj_b(self):
        return self.projections[1]

    def __iter__(self):
        if len(self.injections) != 2:
            raise TypeError("only binary direct sums unpack")
        return iter((self.module, self.inj_a, self.inj_b, self.proj_a, self.proj_b))


def direct_sum(*summands: FPModule) -> DirectSum:
    if not summands:
        raise InputError("direct sum of nothing: modulus unknown")
    n = summands[0].n
    for s in summands:
        if s.n != n:
            raise InputError(f"modulus mismatch: {s.n} vs {n}")
    total = FPModule(n, block_diag(*[s.relations for s in summands]))
    injections, projections = [], []
    offset = 0
    for s in summands:
        emb = IntMatrix(total.g, s.g, [[int(i == offset + j) for j in range(s.g)] for i in range(total.g)])
        injections.append(ModHom(s, total, emb, check=False))
        projections.append(ModHom(total, s, emb.transpose(), check=False))
        offset += s.g
    return DirectSum(total, tuple(injections), tuple(projections))


def stack_homs(homs: Sequence[ModHom], target: FPModule) -> ModHom:
    """``[h_1 | h_2 | ...]``: the map out of the direct sum of the sources (in order)."""
    src = direct_sum(*[h.src for h in homs]).module
    mat = homs[0].matrix.hstack(*[h.matrix for h in homs[1:]])
    return ModHom(src, target, mat, check=False)


# -- canonical form, kernels, images, cokernels --------------------------

def invariant_factors(A: FPModule) -> list:
    return list(A.invariant_factors)


def is_isomorphic(A: FPModule, B: FPModule) -> bool:
    if A.n != B.n:
        raise InputError(f"modulus mismatch: {A.n} vs {B.n}")
    return A.invariant_factors == B.invariant_factors


@dataclass(frozen=True)
class CanonicalForm:
    module: FPModule
    to_canonical: ModHom
    from_canonical: ModHom


def canonical_form(A: FPModule) -> CanonicalForm:
    """``A ≅ ⊕ Z/d_i`` with the two mutually inverse isomorphisms."""
    C = from_factors(A.n, A.invariant_factors)
    return CanonicalForm(C, ModHom(A, C, A._to_canon, check=False),
                         ModHom(C, A, A._from_canon, check=False))


def _trim(columns: IntMatrix) -> IntMatrix:
    keep = [j for j in range(columns.cols) if any(columns.column(j))]
    return columns.select_columns(keep)


def _submodule(gens: IntMatrix, ambient: FPModule):
    """Submodule of ``ambient`` generated by the columns of ``gens``, in canonical form, with its inclusion."""
    n = ambient.n
    s = gens.cols
    rel = kernel_mod(gens.hstack(ambient.relations), n).select_rows(range(s))
    raw = FPModule(n, rel)
    cf = canonical_form(raw)
    incl = ModHom(raw, ambient, gens, check=False).compose(cf.from_canonical)
    return cf.module, incl


def kernel(f: ModHom):
    """``(K, incl)`` with ``incl: K -> f.src`` injective onto ``ker f``; ``K`` in canonical form."""
    A, B = f.src, f.dst
    sol = kernel_mod(f.matrix.hstack(B.relations), f.n)
    gens = _trim(sol.select_rows(range(A.g)))
    return _submodule(gens, A)


def image(f: ModHom):
    """``(I, incl)`` with ``incl: I -> f.dst`` injective onto ``f(src)``."""
    return _submodule(_trim(f.matrix), f.dst)


def cokernel(f: ModHom):
    """``(C, proj)`` with ``proj: f.dst -> C`` surjective and ``ker proj = im f``."""
    B = f.dst
    raw = FPModule(f.n, B.relations.hstack(f.matrix))
    cf = canonical_form(raw)
    proj = ModHom(B, raw, IntMatrix.identity(B.g), check=False)
    return cf.module, cf.to_canonical.compose(proj)


def is_exact_at(f: ModHom, g: ModHom) -> bool:
    """``im f == ker g`` inside ``f.dst``."""
    if f.dst != g.src:
        raise InputError("is_exact_at needs f.dst == g.src")
    if not g.compose(f).is_zero():
        return False
    _, incl = kernel(g)
    span = f.matrix.hstack(f.dst.relations)
    return all(span_membership(span, c, f.n) for c in incl.matrix.columns())


def factor_through(f: ModHom, g: ModHom) -> Optional[ModHom]:
    """Some ``h`` with ``g ∘ h == f`` (``f: X -> Z``, ``g: Y -> Z``), or None if no generator lifts.

    The result is a valid hom whenever ``g`` is injective or ``X`` is free;
    otherwise an ill-formed lift raises :class:`InputError`.
    """
    if f.dst != g.dst:
        raise InputError("factor_through needs a common target")
    Y, Z = g.src, g.dst
    system = g.matrix.hstack(Z.relations)
    cols = []
    for c in f.matrix.columns():
        sol = solve_mod(system, c, f.n)
        if sol is None:
            return None
        cols.append(sol[:Y.g])
    return ModHom(f.src, Y, IntMatrix.from_columns(cols, Y.g))


# -- enumeration ------------------------------------------------------------

def elements(A: FPModule, cap: int = DEFAULT_ELEMENT_CAP) -> list:
    """One representative per class, ordered lexicographically by canonical coordinates."""
    if A.order > cap:
        raise CapacityError(f"module of order {A.order} exceeds element cap {cap}", cap="elements", size=A.order)
    return [Element(A, A.from_coords(y)) for y in itertools.product(*[range(d) for d in A.invariant_factors])]


def iter_elements(A: FPModule) -> Iterator[Element]:
    for y in itertools.product(*[range(d) for d in A.invariant_factors]):
        yield Element(A, A.from_coords(y))


# -- Hom and tensor ---------------------------------------------------------

@dataclass(frozen=True)
class HomModule:
    """``Hom(src, dst)`` as a module; ``decode``/``encode`` translate elements and homs."""

    module: FPModule
    src: FPModule
    dst: FPModule
    _pairs: tuple  # (i, j, step) per generator: canonical gen i of src -> step * canonical gen j of dst

    def decode(self, x) -> ModHom:
        coords = x.coords if isinstance(x, Element) else tuple(x)
        p, q = len(self.src.invariant_factors), len(self.dst.invariant_factors)
        X = [[0] * p for _ in range(q)]
        for c, (i, j, step) in zip(coords, self._pairs):
            X[j][i] += c * step
        mid = IntMatrix(q, p, X)
        mat = self.dst._from_canon @ mid @ self.src._to_canon
        return ModHom(self.src, self.dst, mat, check=False)

    def encode(self, h: ModHom) -> Element:
        if h.src != self.src or h.dst != self.dst:
            raise InputError("hom does not belong to this Hom module")
        X = self.dst._to_canon @ h.matrix @ self.src._from_canon
        bf = self.dst.invariant_factors
        coords = []
        for i, j, step in self._pairs:
            v = X[j, i] % bf[j]
            if v % step:
                raise InputError("matrix does not describe a hom between these modules")
            coords.append(v // step)
        return self.module.element(coords)

    def homs(self) -> Iterator[ModHom]:
        for x in iter_elements(self.module):
            yield self.decode(x)


def hom_module(A: FPModule, B: FPModule) -> HomModule:
    if A.n != B.n:
        raise InputError(f"modulus mismatch: {A.n} vs {B.n}")
    pairs, orders = [], []
    for i, a in enumerate(A.invariant_factors):
        for j, b in enumerate(B.invariant_factors):
            g = gcd(a, b)
            if g > 1:
                pairs.append((i, j, b // g))
                orders.append(g)
    return HomModule(from_factors(A.n, orders), A, B, tuple(pairs))


@dataclass(frozen=True)
class TensorProduct:
    module: FPModule
    left: FPModule
    right: FPModule

    def pure(self, a: Element, b: Element) -> Element:
        if a.parent != self.left or b.parent != self.right:
            raise InputError("pure tensor factors from the wrong modules")
        return self.module.element([x * y for x in a.coords for y in b.coords])


def tensor(A: FPModule, B: FPModule) -> TensorProduct:
    """``A ⊗ B`` on ``A.g * B.g`` generators (index ``i * B.g + j``)."""
    if A.n != B.n:
        raise InputError(f"modulus mismatch: {A.n} vs {B.n}")
    rel = A.relations.kron(IntMatrix.identity(B.g)).hstack(IntMatrix.identity(A.g).kron(B.relations))
    return TensorProduct(FPModule(A.n, rel), A, B)


# -- free presentations -----------------------------------------------------

@dataclass(frozen=True)
class FreePresentation:
    """``0 -> M --incl--> P --q--> A -> 0`` with ``P`` free."""

    P: FPModule
    q: ModHom
    M: FPModule
    incl: ModHom
    mode: str


def free_presentation(A: FPModule, mode: str = "economical", cap: int = 4096) -> FreePresentation:
    """Economical: ``P`` free on ``A``'s generators.  Elementwise: ``P`` free on the element list of ``A``."""
    if mode == "economical":
        P = free(A.n, A.g)
        q = ModHom(P, A, IntMatrix.identity(A.g), check=False)
    elif mode == "elementwise":
        elts = elements(A, cap)
        P = free(A.n, len(elts))
        q = ModHom(P, A, IntMatrix.from_columns([e.coords for e in elts], A.g), check=False)
    else:
        raise InputError(f"unknown presentation mode {mode!r}")
    M, incl = kernel(q)
    return FreePresentation(P, q, M, incl, mode)


def random_hom(A: FPModule, B: FPModule, rng) -> ModHom:
    H = hom_module(A, B)
    coords = [rng.randrange(d) for d in H.module.invariant_factors]
    return H.decode(H.module.from_coords(coords))


def module_corpus(n: int, max_order: int, max_factors: int = 3) -> list:
    """Every module of order ``<= max_order`` with at most ``max_factors`` invariant factors, canonically presented."""
    divs = [d for d in range(2, n + 1) if n % d == 0]
    out = []

    def extend(chain, order):
        out.append(from_factors(n, chain))
        if len(chain) == max_factors:
            return
        for d in divs:
            if (not chain or d % chain[-1] == 0) and order * d <= max_order:
                extend(chain + [d], order * d)

    extend([], 1)
    out.sort(key=lambda M: (M.order, len(M.invariant_factors), M.invariant_factors))
    return out
