"""Finite-dimensional C*-algebras with exact arithmetic.

A multi-matrix algebra is an ordered list of full matrix blocks; its
canonical basis is the family of matrix units e_(k,i,j).  Elements,
linear functionals, unital *-homomorphisms and slice maps are all exact
(Gaussian-rational coefficients), so algebraic identities are decided
by equality, never by tolerance.
"""

import itertools
from random import Random

from .scalars import GQ_ONE, GQ_ZERO, GaussianRational, gq

UnitIndex = tuple[int, int, int]


class ShapeError(ValueError):
    """Invalid block specification."""


class AlgebraMismatchError(ValueError):
    """Operands live in incompatible algebras."""


class HomViolationError(ValueError):
    """A candidate map fails one of the *-homomorphism axioms."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotUnitalError(HomViolationError):
    pass


class NotMultiplicativeError(HomViolationError):
    pass


class NotStarPreservingError(HomViolationError):
    pass


class SquareCommutationError(ValueError):
    """The square (id⊗Γ)Φ = Φ'Λ fails on a basis element."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class FdAlgebra:
    """Multi-matrix algebra given by an ordered tuple of block sizes.

    Matrix units are indexed by (k, i, j): block k, row i, column j,
    all 0-based, enumerated lexicographically.  Instances produced by
    :func:`tensor` / :func:`direct_sum` remember their factors or
    summands so index bijections and slice maps can be resolved;
    equality and hashing ignore that provenance.
    """

    def __init__(self, blocks):
        blocks = tuple(int(b) for b in blocks)
        if not blocks:
            raise ShapeError("block list must be nonempty")
        if any(b < 1 for b in blocks):
            raise ShapeError(f"block sizes must be >= 1, got {blocks}")
        self.blocks = blocks
        self.dimension = sum(b * b for b in blocks)
        self._units = tuple(
            (k, i, j)
            for k, b in enumerate(blocks)
            for i in range(b)
            for j in range(b)
        )
        self.factors = None  # set by tensor()
        self.summands = None  # set by direct_sum()

    def units(self) -> tuple[UnitIndex, ...]:
        return self._units

    def diagonal_units(self) -> tuple[UnitIndex, ...]:
        return tuple(u for u in self._units if u[1] == u[2])

    def is_commutative(self) -> bool:
        return all(b == 1 for b in self.blocks)

    def unit_product(self, a: UnitIndex, b: UnitIndex):
        """e_a * e_b, either a unit index or None (zero)."""
        if a[0] != b[0] or a[2] != b[1]:
            return None
        return (a[0], a[1], b[2])

    def unit_adjoint(self, a: UnitIndex) -> UnitIndex:
        return (a[0], a[2], a[1])

    def basis_elem(self, idx: UnitIndex) -> "FdElement":
        if idx not in set(self._units):
            raise AlgebraMismatchError(f"no matrix unit {idx} in {self}")
        return FdElement(self, {idx: GQ_ONE})

    def element(self, coords) -> "FdElement":
        return FdElement(self, coords)

    def zero(self) -> "FdElement":
        return FdElement(self, {})

    def one(self) -> "FdElement":
        return FdElement(self, {u: GQ_ONE for u in self.diagonal_units()})

    def __eq__(self, other):
        return isinstance(other, FdAlgebra) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"FdAlgebra{list(self.blocks)}"


def make_algebra(blocks) -> FdAlgebra:
    """Build a multi-matrix algebra from a list of block sizes."""
    return FdAlgebra(blocks)


class FdElement:
    """Element of an FdAlgebra as a sparse matrix-unit expansion."""

    def __init__(self, algebra: FdAlgebra, coords):
        self.algebra = algebra
        clean = {}
        for idx, c in coords.items():
            c = gq(c) if not isinstance(c, GaussianRational) else c
            if not c.is_zero():
                clean[idx] = c
        self.coords = clean

    def _check(self, other):
        if self.algebra != other.algebra:
            raise AlgebraMismatchError(
                f"elements of {self.algebra} and {other.algebra}"
            )

    def __add__(self, other):
        self._check(other)
        out = dict(self.coords)
        for idx, c in other.coords.items():
            out[idx] = out.get(idx, GQ_ZERO) + c
        return FdElement(self.algebra, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FdElement(self.algebra, {i: -c for i, c in self.coords.items()})

    def __mul__(self, other):
        if isinstance(other, (int, GaussianRational)):
            return self.scale(other)
        self._check(other)
        out = {}
        alg = self.algebra
        for a, ca in self.coords.items():
            for b, cb in other.coords.items():
                p = alg.unit_product(a, b)
                if p is not None:
                    out[p] = out.get(p, GQ_ZERO) + ca * cb
        return FdElement(alg, out)

    def __rmul__(self, other):
        if isinstance(other, (int, GaussianRational)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "FdElement":
        c = gq(c)
        return FdElement(self.algebra, {i: v * c for i, v in self.coords.items()})

    def adjoint(self) -> "FdElement":
        return FdElement(
            self.algebra,
            {
                self.algebra.unit_adjoint(i): c.conjugate()
                for i, c in self.coords.items()
            },
        )

    def is_zero(self) -> bool:
        return not self.coords

    def __eq__(self, other):
        if not isinstance(other, FdElement):
            return NotImplemented
        return self.algebra == other.algebra and self.coords == other.coords

    def __hash__(self):
        return hash((self.algebra, frozenset(self.coords.items())))

    def __repr__(self):
        if not self.coords:
            return "0"
        parts = [f"({c})e{list(i)}" for i, c in sorted(self.coords.items())]
        return " + ".join(parts)


class Functional:
    """Linear functional given by its values on matrix units."""

    def __init__(self, algebra: FdAlgebra, coeffs):
        self.algebra = algebra
        self.coeffs = {
            i: gq(c) for i, c in coeffs.items() if not gq(c).is_zero()
        }

    @classmethod
    def dual(cls, algebra: FdAlgebra, idx: UnitIndex) -> "Functional":
        """Dual-basis functional: 1 on e_idx, 0 on the other units."""
        return cls(algebra, {idx: GQ_ONE})

    def __call__(self, x: FdElement) -> GaussianRational:
        if x.algebra != self.algebra:
            raise AlgebraMismatchError("functional applied across algebras")
        total = GQ_ZERO
        for idx, c in x.coords.items():
            w = self.coeffs.get(idx)
            if w is not None:
                total = total + w * c
        return total

    def after(self, h: "StarHom") -> "Functional":
        """Pullback along a hom: (self.after(h))(x) = self(h(x))."""
        if h.target != self.algebra:
            raise AlgebraMismatchError("pullback target mismatch")
        return Functional(
            h.source, {u: self(h.images[u]) for u in h.source.units()}
        )

    def __repr__(self):
        return f"Functional({self.algebra}, {self.coeffs})"


class StarHom:
    """Verified unital *-homomorphism between multi-matrix algebras.

    Construct through :func:`make_hom`, which checks unitality,
    multiplicativity and *-preservation on the matrix-unit basis and
    raises a named violation with a witnessing basis pair otherwise.
    """

    def __init__(self, source, target, images, _verified=False):
        self.source = source
        self.target = target
        self.images = images
        if not _verified:
            _verify_hom(self)

    @classmethod
    def identity(cls, algebra: FdAlgebra) -> "StarHom":
        onto = algebra
        return cls(
            algebra,
            onto,
            {u: onto.basis_elem(u) for u in algebra.units()},
            _verified=True,
        )

    def __call__(self, x: FdElement) -> FdElement:
        if x.algebra != self.source:
            raise AlgebraMismatchError("element not in hom source")
        out = self.target.zero()
        for idx, c in x.coords.items():
            out = out + self.images[idx].scale(c)
        return out

    def compose(self, inner: "StarHom") -> "StarHom":
        """self ∘ inner."""
        if inner.target != self.source:
            raise AlgebraMismatchError("composition mismatch")
        return StarHom(
            inner.source,
            self.target,
            {u: self(inner.images[u]) for u in inner.source.units()},
            _verified=True,
        )

    def image_matrix(self):
        """Column-per-source-unit matrix of image coordinates."""
        cols = self.source.units()
        rows = self.target.units()
        return [
            [self.images[c].coords.get(r, GQ_ZERO) for c in cols] for r in rows
        ]

    def is_surjective(self) -> bool:
        return matrix_rank(self.image_matrix()) == self.target.dimension

    def solve_preimage(self, y: FdElement):
        """An exact x with self(x) = y, or None if y is not in the image."""
        if y.algebra != self.target:
            raise AlgebraMismatchError("element not in hom target")
        rows = self.target.units()
        rhs = [y.coords.get(r, GQ_ZERO) for r in rows]
        sol = solve_linear(self.image_matrix(), rhs)
        if sol is None:
            return None
        return FdElement(
            self.source, dict(zip(self.source.units(), sol))
        )

    def __repr__(self):
        return f"StarHom({self.source} -> {self.target})"


def _verify_hom(h: StarHom):
    src, tgt = h.source, h.target
    for u in src.units():
        if u not in h.images:
            raise HomViolationError(f"missing image for unit {u}")
        if h.images[u].algebra != tgt:
            raise AlgebraMismatchError(f"image of {u} not in target")
    one = tgt.zero()
    for u in src.diagonal_units():
        one = one + h.images[u]
    if one != tgt.one():
        raise NotUnitalError(
            "image of the unit differs from the target unit", witness=one
        )
    for a in src.units():
        ia = h.images[a]
        if ia.adjoint() != h.images[src.unit_adjoint(a)]:
            raise NotStarPreservingError(
                f"adjoint of image of {a} is not the image of the adjoint",
                witness=a,
            )
        for b in src.units():
            p = src.unit_product(a, b)
            expect = h.images[p] if p is not None else tgt.zero()
            if ia * h.images[b] != expect:
                raise NotMultiplicativeError(
                    f"images of {a} and {b} do not multiply like the units",
                    witness=(a, b),
                )


def make_hom(source: FdAlgebra, target: FdAlgebra, images) -> StarHom:
    """Build and verify a unital *-homomorphism from unit images."""
    return StarHom(source, target, dict(images))


# ---------------------------------------------------------------------------
# tensor products and direct sums
# ---------------------------------------------------------------------------


def tensor(a: FdAlgebra, b: FdAlgebra) -> FdAlgebra:
    """Tensor product; block (k,l) sits at position k*len(b.blocks)+l.

    The result keeps (a, b) in ``factors`` so unit indices can be
    paired and split exactly.
    """
    out = FdAlgebra(
        [x * y for x in a.blocks for y in b.blocks]
    )
    out.factors = (a, b)
    return out


def tensor_unit_index(a, b, alpha: UnitIndex, beta: UnitIndex) -> UnitIndex:
    k, i, j = alpha
    l, s, t = beta
    nb = b.blocks[l]
    return (k * len(b.blocks) + l, i * nb + s, j * nb + t)


def tensor_split_index(a, b, gamma: UnitIndex):
    m, r, c = gamma
    k, l = divmod(m, len(b.blocks))
    nb = b.blocks[l]
    i, s = divmod(r, nb)
    j, t = divmod(c, nb)
    return (k, i, j), (l, s, t)


def tensor_elem(x: FdElement, y: FdElement, t: FdAlgebra | None = None):
    """x ⊗ y inside tensor(x.algebra, y.algebra)."""
    if t is None:
        t = tensor(x.algebra, y.algebra)
    coords = {}
    for a, ca in x.coords.items():
        for b, cb in y.coords.items():
            coords[tensor_unit_index(x.algebra, y.algebra, a, b)] = ca * cb
    return FdElement(t, coords)


def tensor_hom(f: StarHom, g: StarHom) -> StarHom:
    """f ⊗ g on the tensor algebras."""
    src = tensor(f.source, g.source)
    tgt = tensor(f.target, g.target)
    images = {}
    for a in f.source.units():
        for b in g.source.units():
            idx = tensor_unit_index(f.source, g.source, a, b)
            images[idx] = tensor_elem(f.images[a], g.images[b], tgt)
    return StarHom(src, tgt, images, _verified=True)


def direct_sum(a: FdAlgebra, b: FdAlgebra) -> FdAlgebra:
    """Direct sum; blocks concatenate, summands recorded."""
    out = FdAlgebra(a.blocks + b.blocks)
    out.summands = (a, b)
    return out


def direct_sum_many(parts) -> FdAlgebra:
    parts = list(parts)
    out = FdAlgebra(tuple(itertools.chain(*(p.blocks for p in parts))))
    out.summands = tuple(parts)
    return out


def summand_unit_index(parts, slot: int, idx: UnitIndex) -> UnitIndex:
    offset = sum(len(p.blocks) for p in parts[:slot])
    return (idx[0] + offset, idx[1], idx[2])


def summand_of_unit(parts, idx: UnitIndex):
    """(slot, local index) of a unit of the direct sum."""
    k = idx[0]
    for slot, p in enumerate(parts):
        if k < len(p.blocks):
            return slot, (k, idx[1], idx[2])
        k -= len(p.blocks)
    raise AlgebraMismatchError(f"unit {idx} outside the direct sum")


def direct_sum_hom(f: StarHom, g: StarHom) -> StarHom:
    src = direct_sum(f.source, g.source)
    tgt = direct_sum(f.target, g.target)
    sparts, tparts = (f.source, g.source), (f.target, g.target)
    images = {}
    for slot, h in enumerate((f, g)):
        for u in h.source.units():
            img = {
                summand_unit_index(tparts, slot, v): c
                for v, c in h.images[u].coords.items()
            }
            images[summand_unit_index(sparts, slot, u)] = FdElement(tgt, img)
    return StarHom(src, tgt, images, _verified=True)


# ---------------------------------------------------------------------------
# slice maps
# ---------------------------------------------------------------------------


def slice_map(omega: Functional, x: FdElement) -> FdElement:
    """(ω ⊗ id): C⊗A → A, pairing ω against the left tensor leg."""
    t = x.algebra
    if t.factors is None:
        raise AlgebraMismatchError("element does not live in a tensor algebra")
    c_alg, a_alg = t.factors
    if c_alg != omega.algebra:
        raise AlgebraMismatchError(
            "functional algebra is not the left tensor factor"
        )
    out = {}
    for gamma, coeff in x.coords.items():
        alpha, beta = tensor_split_index(c_alg, a_alg, gamma)
        w = omega.coeffs.get(alpha)
        if w is not None:
            out[beta] = out.get(beta, GQ_ZERO) + w * coeff
    return FdElement(a_alg, out)


def check_slice_identity(
    lam: StarHom,
    gam: StarHom,
    phi: StarHom,
    phi_prime: StarHom,
    omega: Functional,
) -> bool:
    """Check Γ(ω⊗id)Φ(b) = (ω⊗id)Φ'Λ(b) on every basis element.

    Requires the square (id_C⊗Γ)Φ = Φ'Λ to commute; that precondition
    is checked first on the basis of Φ's source and raising
    SquareCommutationError on failure.  Given the precondition, a False
    return indicates a bug in the slice machinery, not in the inputs.
    """
    t = phi.target
    if t.factors is None or phi_prime.target.factors is None:
        raise AlgebraMismatchError("Φ targets must be tensor algebras")
    c_alg, a_alg = t.factors
    if c_alg != omega.algebra:
        raise AlgebraMismatchError("ω does not act on the left factor")
    if gam.source != a_alg:
        raise AlgebraMismatchError("Γ source must be the right factor")
    idc_gam = tensor_hom(StarHom.identity(c_alg), gam)
    for u in phi.source.units():
        b = phi.source.basis_elem(u)
        lhs = idc_gam(phi(b))
        rhs = phi_prime(lam(b))
        if lhs.coords != rhs.coords:
            raise SquareCommutationError(
                f"(id⊗Γ)Φ and Φ'Λ differ on basis element {u}", witness=u
            )
    for u in phi.source.units():
        b = phi.source.basis_elem(u)
        left = gam(slice_map(omega, phi(b)))
        right = slice_map(omega, phi_prime(lam(b)))
        if left != right:
            return False
    return True


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------


def _echelon(matrix):
    """Row-reduce a copy of `matrix` over Q(i); returns (rows, pivots)."""
    rows = [list(r) for r in matrix]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next(
            (k for k in range(r, len(rows)) if not rows[k][c].is_zero()), None
        )
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [v / inv for v in rows[r]]
        for k in range(len(rows)):
            if k != r and not rows[k][c].is_zero():
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def matrix_rank(matrix) -> int:
    if not matrix:
        return 0
    return len(_echelon(matrix)[1])


def solve_linear(matrix, rhs):
    """Solve matrix · x = rhs exactly; None when inconsistent."""
    if not matrix:
        return []
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = _echelon(aug)
    ncols = len(matrix[0])
    if ncols in pivots:
        return None  # pivot in the rhs column: inconsistent
    sol = [GQ_ZERO] * ncols
    for r, c in enumerate(pivots):
        sol[c] = rows[r][-1]
    return sol


# ---------------------------------------------------------------------------
# randomized test material (seeded, exact)
# ---------------------------------------------------------------------------

_BLOCK_CHOICES = [
    (1,),
    (2,),
    (1, 1),
    (1, 2),
    (1, 1, 1),
    (1, 1, 2),
    (1, 1, 1, 1),
    (4,),
]

_PHASES = (gq(1), gq(-1), gq(0, 1), gq(0, -1))


def random_algebra(rng: Random, max_dim: int = 4) -> FdAlgebra:
    choices = [b for b in _BLOCK_CHOICES if sum(x * x for x in b) <= max_dim]
    return FdAlgebra(rng.choice(choices))


def _random_block_unitary(rng: Random, size: int):
    """A signed-permutation unitary: exact, with exact inverse."""
    perm = list(range(size))
    rng.shuffle(perm)
    phase = [rng.choice(_PHASES) for _ in range(size)]
    return perm, phase


def conjugation_hom(algebra: FdAlgebra, rng: Random) -> StarHom:
    """Inner automorphism by a random signed permutation per block."""
    data = [_random_block_unitary(rng, b) for b in algebra.blocks]
    images = {}
    for (k, i, j) in algebra.units():
        perm, phase = data[k]
        # U e_(i,j) U* with U_{a,b} = phase[a]·[b == perm[a]]
        a = perm.index(i)
        b = perm.index(j)
        images[(k, i, j)] = FdElement(
            algebra,
            {(k, a, b): phase[a] * phase[b].conjugate()},
        )
    return StarHom(algebra, algebra, images)


def random_unital_hom(rng: Random, source: FdAlgebra, target: FdAlgebra):
    """A random unital *-hom source → target, or None if none exists.

    Each target block is filled by a random sequence of source blocks
    (block-diagonal embedding), then twisted by a random inner
    automorphism of the target.
    """
    fillings = []
    for tsize in target.blocks:
        options = _compositions(tsize, sorted(set(source.blocks)))
        if not options:
            return None
        fillings.append(rng.choice(options))
    images = {u: target.zero() for u in source.units()}
    for t, sizes in enumerate(fillings):
        offset = 0
        for size in sizes:
            ks = [k for k, b in enumerate(source.blocks) if b == size]
            k = rng.choice(ks)
            for i in range(size):
                for j in range(size):
                    images[(k, i, j)] = images[(k, i, j)] + target.basis_elem(
                        (t, offset + i, offset + j)
                    )
            offset += size
    base = StarHom(source, target, images)
    return conjugation_hom(target, rng).compose(base)


def _compositions(total: int, parts):
    """All ordered tuples from `parts` (with repetition) summing to total."""
    if total == 0:
        return [()]
    out = []
    for p in parts:
        if p <= total:
            out.extend((p,) + rest for rest in _compositions(total - p, parts))
    return out


def random_functional(rng: Random, algebra: FdAlgebra) -> Functional:
    coeffs = {
        u: gq(rng.randint(-2, 2), rng.randint(-2, 2))
        for u in algebra.units()
    }
    return Functional(algebra, coeffs)


def random_commuting_square(rng: Random, max_dim: int = 4):
    """A random exact instance (Λ, Γ, Φ, Φ', ω) of a commuting square.

    Γ: A → A' and Φ: B → C⊗A are random verified homs, Λ is a random
    inner automorphism of B, and Φ' := (id_C⊗Γ)Φ Λ⁻¹, so the square
    (id_C⊗Γ)Φ = Φ'Λ commutes by construction.
    """
    while True:
        b_alg = random_algebra(rng, max_dim)
        c_alg = random_algebra(rng, max_dim)
        a_alg = random_algebra(rng, max_dim)
        a_prime = random_algebra(rng, max_dim)
        gam = random_unital_hom(rng, a_alg, a_prime)
        if gam is None:
            continue
        phi = random_unital_hom(rng, b_alg, tensor(c_alg, a_alg))
        if phi is None:
            continue
        lam = conjugation_hom(b_alg, rng)
        lam_inv = StarHom(
            b_alg,
            b_alg,
            {u: lam.solve_preimage(b_alg.basis_elem(u)) for u in b_alg.units()},
        )
        idc_gam = tensor_hom(StarHom.identity(c_alg), gam)
        phi_prime = idc_gam.compose(phi.compose(lam_inv))
        omega = random_functional(rng, c_alg)
        return lam, gam, phi, phi_prime, omega
