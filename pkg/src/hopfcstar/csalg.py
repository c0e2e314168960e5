"""Finite-dimensional C*-algebras as direct sums of complex matrix blocks.

Elements are stored as one matrix per block.  Every algebra carries a fixed
ordered basis: the matrix units of each block ordered by (block, row,
column), or an explicitly declared linearly independent *-closed family
(e.g. the translation operators spanning a group algebra inside M_n).
Linear maps between algebras are plain matrices over these bases.

Tensor products order their coordinates factor-major, so that

    vec(a (x) b) == kron(vec(a), vec(b))

holds for all nestings.  This makes Kronecker products of operator
matrices act correctly on tensor products and turns slice maps and leg
permutations into tensordot/transpose on the coordinate tensor.  The
ordering is a fixed permutation of the lexicographic matrix-unit order of
the product blocks, under which ranks and norms are invariant.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .config import DEFAULT_TOL, RANK_CUTOFF

__all__ = [
    "InvalidInputError",
    "CStarAlgebra",
    "AlgebraElement",
    "Functional",
    "LinearOperator",
    "build_algebra",
    "operator_norm",
    "tensor_algebra",
    "tensor_power",
    "elementary_tensor",
    "slice_tensor",
    "slice_leg",
    "permute_legs",
    "place_legs",
    "multiplication_operator",
    "star_matrix",
    "check_star_hom",
    "same_space",
    "random_element",
]


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


def _frozen(m) -> np.ndarray:
    out = np.ascontiguousarray(m, dtype=np.complex128)
    out.setflags(write=False)
    return out


class CStarAlgebra:
    """Direct sum of full matrix blocks with a fixed ordered basis."""

    def __init__(self, block_dims, basis=None, label: str = ""):
        dims = tuple(int(n) for n in block_dims)
        if not dims or any(n < 1 for n in dims):
            raise InvalidInputError(
                "block dimensions must be a nonempty list of positive integers, got %r"
                % (block_dims,)
            )
        self.block_dims = dims
        self.ambient_dim = sum(n * n for n in dims)
        self.label = label or "(+)".join("M%d" % n for n in dims)
        self.factors: tuple[CStarAlgebra, CStarAlgebra] | None = None
        self._block_offsets = np.cumsum([0] + [n * n for n in dims])
        if basis is None:
            self.dim = self.ambient_dim
            self._basis_mat = sp.identity(self.ambient_dim, dtype=np.complex128, format="csc")
        else:
            cols = []
            for blocks in basis:
                cols.append(self._ravel_blocks([np.asarray(b, dtype=np.complex128) for b in blocks]))
            self.dim = len(cols)
            self._basis_mat = sp.csc_matrix(np.column_stack(cols))
            if np.linalg.matrix_rank(self._basis_mat.toarray()) != self.dim:
                raise InvalidInputError("declared basis is linearly dependent")

    # -- coordinates ----------------------------------------------------

    def _ravel_blocks(self, blocks) -> np.ndarray:
        return np.concatenate([np.asarray(b, dtype=np.complex128).ravel() for b in blocks])

    def _unravel(self, v) -> tuple[np.ndarray, ...]:
        out = []
        for k, n in enumerate(self.block_dims):
            lo, hi = self._block_offsets[k], self._block_offsets[k + 1]
            out.append(v[lo:hi].reshape(n, n))
        return tuple(out)

    @functools.cached_property
    def _basis_mat_h(self):
        return self._basis_mat.getH().tocsr()

    @functools.cached_property
    def _gram_cho(self):
        gram = (self._basis_mat_h @ self._basis_mat).toarray()
        return scipy.linalg.cho_factor(gram)

    @functools.cached_property
    def _basis_is_units(self) -> bool:
        b = self._basis_mat
        return b.shape[0] == b.shape[1] and (b != sp.identity(b.shape[0], format="csc")).nnz == 0

    def to_vec(self, element: "AlgebraElement") -> np.ndarray:
        raveled = self._ravel_blocks(element.blocks)
        if self._basis_is_units:
            return raveled
        return scipy.linalg.cho_solve(self._gram_cho, self._basis_mat_h @ raveled)

    def from_vec(self, v) -> "AlgebraElement":
        v = np.asarray(v, dtype=np.complex128).ravel()
        if v.shape != (self.dim,):
            raise InvalidInputError("coordinate vector has length %d, expected %d" % (v.size, self.dim))
        return AlgebraElement(self, self._unravel(self._basis_mat @ v))

    # -- distinguished elements -----------------------------------------

    @functools.cached_property
    def _unit(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.eye(n, dtype=np.complex128) for n in self.block_dims))

    def unit(self) -> "AlgebraElement":
        return self._unit

    @functools.cached_property
    def _unit_vec(self) -> np.ndarray:
        return self._unit.vec()

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.zeros((n, n), dtype=np.complex128) for n in self.block_dims))

    def element(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self, blocks)

    def basis_element(self, i: int) -> "AlgebraElement":
        v = np.zeros(self.dim, dtype=np.complex128)
        v[i] = 1.0
        return self.from_vec(v)

    def basis(self):
        return [self.basis_element(i) for i in range(self.dim)]

    # -- tensor structure ------------------------------------------------

    @functools.cached_property
    def legs(self) -> tuple["CStarAlgebra", ...]:
        if self.factors is None:
            return (self,)
        return self.factors[0].legs + self.factors[1].legs

    @property
    def leg_dims(self) -> tuple[int, ...]:
        return tuple(leg.dim for leg in self.legs)

    def __repr__(self):
        return "CStarAlgebra(%s, dim=%d)" % (self.label, self.dim)


class AlgebraElement:
    """Element of a :class:`CStarAlgebra`, stored blockwise."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: CStarAlgebra, blocks):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != len(algebra.block_dims) or any(
            b.shape != (n, n) for b, n in zip(blocks, algebra.block_dims)
        ):
            raise InvalidInputError("block shapes do not match the algebra")
        self.algebra = algebra
        self.blocks = blocks

    def _check_same(self, other):
        if not same_space(self.algebra, other.algebra):
            raise InvalidInputError("elements live in different algebras")

    def __add__(self, other):
        self._check_same(other)
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        self._check_same(other)
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return AlgebraElement(self.algebra, tuple(-a for a in self.blocks))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check_same(other)
            return AlgebraElement(self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))
        return AlgebraElement(self.algebra, tuple(complex(other) * a for a in self.blocks))

    def __rmul__(self, scalar):
        return AlgebraElement(self.algebra, tuple(complex(scalar) * a for a in self.blocks))

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(a.conj().T for a in self.blocks))

    def norm(self) -> float:
        out = 0.0
        for b in self.blocks:
            if b.shape[0] == 1:
                out = max(out, abs(b[0, 0]))
            else:
                out = max(out, float(np.linalg.svd(b, compute_uv=False)[0]))
        return out

    def inner(self, other) -> complex:
        """Trace pairing sum_k tr(self_k* other_k); linear in ``other``."""
        self._check_same(other)
        return complex(sum(np.trace(a.conj().T @ b) for a, b in zip(self.blocks, other.blocks)))

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def vec(self) -> np.ndarray:
        return self.algebra.to_vec(self)

    def coords_tensor(self) -> np.ndarray:
        return self.vec().reshape(self.algebra.leg_dims)

    def __repr__(self):
        return "AlgebraElement(%s)" % self.algebra.label


class Functional:
    """Linear functional omega(a) = sum_k tr(rho_k* a_k) given by a density."""

    def __init__(self, algebra: CStarAlgebra, density: AlgebraElement):
        if not same_space(algebra, density.algebra):
            raise InvalidInputError("density does not belong to the functional's algebra")
        self.algebra = algebra
        self.density = density

    def __call__(self, a: AlgebraElement) -> complex:
        if not same_space(a.algebra, self.algebra):
            raise InvalidInputError("functional applied to an element of a different algebra")
        return self.density.inner(a)

    def norm(self) -> float:
        """Trace norm of the density, summed over blocks."""
        return float(sum(np.linalg.svd(b, compute_uv=False).sum() if b.size else 0.0
                         for b in self.density.blocks))

    @functools.cached_property
    def values(self) -> np.ndarray:
        """omega evaluated on the algebra basis."""
        return np.array([self(self.algebra.basis_element(j)) for j in range(self.algebra.dim)])

    @classmethod
    def from_density_blocks(cls, algebra, blocks):
        return cls(algebra, AlgebraElement(algebra, blocks))

    @classmethod
    def vector(cls, algebra, xi, eta):
        """Vector functional a -> <a xi, eta> on the concrete block representation.

        ``xi`` and ``eta`` are coordinate vectors in the direct sum of the
        block spaces; the density is the blockwise outer product eta xi*.
        """
        xi = np.asarray(xi, dtype=np.complex128).ravel()
        eta = np.asarray(eta, dtype=np.complex128).ravel()
        total = sum(algebra.block_dims)
        if xi.size != total or eta.size != total:
            raise InvalidInputError("vectors must have length %d" % total)
        blocks, lo = [], 0
        for n in algebra.block_dims:
            blocks.append(np.outer(eta[lo:lo + n], xi[lo:lo + n].conj()))
            lo += n
        return cls(algebra, AlgebraElement(algebra, blocks))

    @classmethod
    def dual_basis(cls, algebra):
        """Functionals with the basis elements as densities; they span the dual."""
        return [cls(algebra, algebra.basis_element(i)) for i in range(algebra.dim)]

    @classmethod
    def trace(cls, algebra, normalized=False):
        rho = algebra.unit()
        if normalized:
            rho = (1.0 / sum(algebra.block_dims)) * rho
        return cls(algebra, rho)


class LinearOperator:
    """Linear map between algebras, stored as a matrix over the fixed bases."""

    def __init__(self, source: CStarAlgebra, target: CStarAlgebra, matrix):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (target.dim, source.dim):
            raise InvalidInputError(
                "operator matrix has shape %r, expected (%d, %d)"
                % (matrix.shape, target.dim, source.dim)
            )
        self.source = source
        self.target = target
        self.matrix = _frozen(matrix)

    def __call__(self, x: AlgebraElement) -> AlgebraElement:
        if not same_space(x.algebra, self.source):
            raise InvalidInputError("operator applied outside its source algebra")
        return self.target.from_vec(self.matrix @ x.vec())

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        if not same_space(other.target, self.source):
            raise InvalidInputError("operators are not composable")
        return LinearOperator(other.source, self.target, self.matrix @ other.matrix)

    def tensor(self, other: "LinearOperator") -> "LinearOperator":
        return LinearOperator(
            tensor_algebra(self.source, other.source),
            tensor_algebra(self.target, other.target),
            np.kron(self.matrix, other.matrix),
        )

    @functools.cached_property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    def rank(self) -> int:
        s = self.singular_values
        if s.size == 0 or s[0] == 0.0:
            return 0
        return int(np.sum(s > max(self.matrix.shape) * s[0] * RANK_CUTOFF))

    def kernel_basis(self) -> list[np.ndarray]:
        """Orthonormal coordinate vectors spanning the kernel."""
        _, s, vh = np.linalg.svd(self.matrix)
        r = self.rank()
        return [vh[k].conj() for k in range(r, self.source.dim)]

    @functools.cached_property
    def pinv_matrix(self) -> np.ndarray:
        return np.linalg.pinv(self.matrix)

    def solve(self, target_element: AlgebraElement) -> AlgebraElement:
        """Minimum-norm least-squares preimage."""
        return self.source.from_vec(self.pinv_matrix @ target_element.vec())

    @classmethod
    def identity(cls, algebra):
        return cls(algebra, algebra, np.eye(algebra.dim))

    @classmethod
    def from_columns(cls, source, target, columns):
        return cls(source, target, np.column_stack([c.vec() for c in columns]))

    def __repr__(self):
        return "LinearOperator(%s -> %s)" % (self.source.label, self.target.label)


# -- constructors and module operations ---------------------------------


def build_algebra(block_dims) -> CStarAlgebra:
    """Direct sum of full matrix blocks of the given dimensions."""
    return CStarAlgebra(block_dims)


def operator_norm(a: AlgebraElement) -> float:
    """C*-norm: the maximum over blocks of the largest singular value."""
    return a.norm()


def same_space(x: CStarAlgebra, y: CStarAlgebra) -> bool:
    if x is y:
        return True
    if x.block_dims != y.block_dims or x.dim != y.dim:
        return False
    return (x._basis_mat != y._basis_mat).nnz == 0


@functools.lru_cache(maxsize=None)
def _kron_reorder(block_dims_a, block_dims_b) -> np.ndarray:
    """Index map from pair-raveled coordinates to the product's canonical ravel.

    Entry (i1,j1) of block k tensored with entry (i2,j2) of block l sits at
    row i1*m_l+i2, column j1*m_l+j2 of product block (k,l).
    """
    offs_a = np.cumsum([0] + [n * n for n in block_dims_a])
    offs_b = np.cumsum([0] + [m * m for m in block_dims_b])
    ambient_b = offs_b[-1]
    nblocks_b = len(block_dims_b)
    out_offsets = np.cumsum(
        [0] + [(n * m) ** 2 for n in block_dims_a for m in block_dims_b]
    )
    idx = np.empty(offs_a[-1] * ambient_b, dtype=np.int64)
    for k, n in enumerate(block_dims_a):
        i1, j1 = np.divmod(np.arange(n * n), n)
        for l, m in enumerate(block_dims_b):
            i2, j2 = np.divmod(np.arange(m * m), m)
            rows = i1[:, None] * m + i2[None, :]
            cols = j1[:, None] * m + j2[None, :]
            canon = out_offsets[k * nblocks_b + l] + rows * (n * m) + cols
            pair = (offs_a[k] + np.arange(n * n))[:, None] * ambient_b + (offs_b[l] + np.arange(m * m))[None, :]
            idx[pair.ravel()] = canon.ravel()
    return idx


@functools.lru_cache(maxsize=None)
def tensor_algebra(a: CStarAlgebra, b: CStarAlgebra) -> CStarAlgebra:
    """Minimal C*-tensor product: blocks are all pairwise Kronecker blocks.

    For finite-dimensional algebras this is the algebraic tensor product
    with block dimensions n_i * m_j in lexicographic pair order.
    """
    out = CStarAlgebra.__new__(CStarAlgebra)
    dims = tuple(n * m for n in a.block_dims for m in b.block_dims)
    out.block_dims = dims
    out.ambient_dim = sum(d * d for d in dims)
    out.label = "(%s)x(%s)" % (a.label, b.label)
    out.factors = (a, b)
    out._block_offsets = np.cumsum([0] + [d * d for d in dims])
    out.dim = a.dim * b.dim
    idx = _kron_reorder(a.block_dims, b.block_dims)
    perm = sp.csc_matrix(
        (np.ones(idx.size), (idx, np.arange(idx.size))),
        shape=(idx.size, idx.size),
        dtype=np.complex128,
    )
    out._basis_mat = (perm @ sp.kron(a._basis_mat, b._basis_mat, format="csc")).tocsc()
    return out


@functools.lru_cache(maxsize=None)
def tensor_power(a: CStarAlgebra, n: int) -> CStarAlgebra:
    if n < 1:
        raise InvalidInputError("tensor power requires n >= 1")
    if n == 1:
        return a
    return tensor_algebra(tensor_power(a, n - 1), a)


def elementary_tensor(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    target = tensor_algebra(a.algebra, b.algebra)
    return target.from_vec(np.kron(a.vec(), b.vec()))


@functools.lru_cache(maxsize=None)
def _fold(legs: tuple[CStarAlgebra, ...]) -> CStarAlgebra:
    out = legs[0]
    for leg in legs[1:]:
        out = tensor_algebra(out, leg)
    return out


def slice_leg(x: AlgebraElement, leg: int, omega: Functional) -> AlgebraElement | complex:
    """Apply ``omega`` to one tensor leg, extending omega(e_J)-weighting linearly."""
    legs = x.algebra.legs
    if not same_space(omega.algebra, legs[leg]):
        raise InvalidInputError("functional does not match the sliced tensor leg")
    contracted = np.tensordot(x.coords_tensor(), omega.values, axes=([leg], [0]))
    rest = legs[:leg] + legs[leg + 1:]
    if not rest:
        return complex(contracted)
    return _fold(rest).from_vec(contracted.ravel())


def slice_tensor(side: str, omega: Functional, x: AlgebraElement) -> AlgebraElement:
    """Slice map on a twofold tensor: side 'left' is omega (x) id, 'right' is id (x) omega."""
    if len(x.algebra.legs) != 2:
        raise InvalidInputError("slice_tensor expects an element of a twofold tensor product")
    if side not in ("left", "right"):
        raise InvalidInputError("side must be 'left' or 'right'")
    return slice_leg(x, 0 if side == "left" else 1, omega)


def permute_legs(x: AlgebraElement, perm) -> AlgebraElement:
    """Reorder tensor legs; leg t of the result is leg perm[t] of ``x``."""
    legs = x.algebra.legs
    arr = x.coords_tensor().transpose(perm)
    return _fold(tuple(legs[p] for p in perm)).from_vec(arr.ravel())


def place_legs(x: AlgebraElement, positions, target_legs) -> AlgebraElement:
    """Embed ``x`` into a larger tensor product with units on the other legs.

    ``positions`` are the (strictly increasing) target slots receiving the
    legs of ``x`` in order; e.g. placing u in slots (0, 2) of a threefold
    product realizes the leg-numbered element u_13.
    """
    target_legs = tuple(target_legs)
    positions = tuple(positions)
    xlegs = x.algebra.legs
    if len(positions) != len(xlegs) or list(positions) != sorted(set(positions)):
        raise InvalidInputError("positions must be strictly increasing, one per leg")
    for p, leg in zip(positions, xlegs):
        if not same_space(target_legs[p], leg):
            raise InvalidInputError("leg %d does not match the target slot" % p)
    arr = x.coords_tensor()
    axis_slots = list(positions)
    for slot, leg in enumerate(target_legs):
        if slot not in positions:
            arr = np.multiply.outer(arr, leg._unit_vec)
            axis_slots.append(slot)
    inverse = np.argsort(axis_slots)
    return _fold(target_legs).from_vec(arr.transpose(inverse).ravel())


@functools.lru_cache(maxsize=None)
def multiplication_operator(a: CStarAlgebra) -> LinearOperator:
    """m : A (x) A -> A, p (x) q -> pq, as a matrix over the pair basis."""
    basis = a.basis()
    cols = [(basis[i] * basis[j]).vec() for i in range(a.dim) for j in range(a.dim)]
    return LinearOperator(tensor_power(a, 2), a, np.column_stack(cols))


@functools.lru_cache(maxsize=None)
def star_matrix(a: CStarAlgebra) -> np.ndarray:
    """Matrix S with vec(x*) = S conj(vec(x))."""
    return np.column_stack([a.basis_element(i).star().vec() for i in range(a.dim)])


@dataclass(frozen=True)
class StarHomReport:
    multiplicative_defect: float
    adjoint_defect: float
    unital_defect: float

    @property
    def max_defect(self) -> float:
        return max(self.multiplicative_defect, self.adjoint_defect, self.unital_defect)

    def passed(self, tol: float = DEFAULT_TOL) -> bool:
        return self.max_defect <= tol


def check_star_hom(f: LinearOperator, source: CStarAlgebra | None = None,
                   target: CStarAlgebra | None = None) -> StarHomReport:
    """Maximal unital-*-homomorphism defects of ``f`` over basis pairs."""
    if source is not None and not same_space(f.source, source):
        raise InvalidInputError("operator source does not match the given algebra")
    if target is not None and not same_space(f.target, target):
        raise InvalidInputError("operator target does not match the given algebra")
    a = f.source
    basis = a.basis()
    images = [f(e) for e in basis]
    mult = 0.0
    for i, ei in enumerate(basis):
        for j, ej in enumerate(basis):
            mult = max(mult, (f(ei * ej) - images[i] * images[j]).norm())
    adj = max((f(e.star()) - im.star()).norm() for e, im in zip(basis, images))
    unital = (f(a.unit()) - f.target.unit()).norm()
    return StarHomReport(mult, adj, unital)


def random_element(a: CStarAlgebra, rng: np.random.Generator, unit_norm: bool = False) -> AlgebraElement:
    v = rng.standard_normal(a.dim) + 1j * rng.standard_normal(a.dim)
    x = a.from_vec(v)
    if unit_norm:
        n = x.norm()
        if n > 0:
            x = (1.0 / n) * x
    return x
