"""Finite groups, their dual pairs of Hopf C*-algebras, and reconstruction.

Two families realize every finite group G:

* ``function_algebra(G)``: the functions on G with the dualized product,
  phi(delta_r) = sum over pq = r of delta_p (x) delta_q.  The counit is
  evaluation at the identity and the antipode is pullback of inversion.
* ``group_algebra(G)``: the span of the left translation operators
  lambda_p inside M_n, phi(lambda_p) = lambda_p (x) lambda_p.  The concrete
  regular-representation image is kept, with the translations as the
  declared basis; all operations only need a faithful *-closed matrix
  realization, so no block decomposition into irreducibles is computed.

The module also provides the negative-control monoid construction, the
invariant-state (Haar) search, and recovery of a group table from an
abelian pair whose comultiplication dualizes a product.
"""

from __future__ import annotations

import itertools

import numpy as np

from .config import DEFAULT_TOL, HAAR_FAITHFUL_EIG
from .csalg import (
    AlgebraElement,
    CStarAlgebra,
    Functional,
    InvalidInputError,
    LinearOperator,
    tensor_power,
)
from .hopf import (
    Comultiplication,
    InternalConsistencyError,
    PreconditionError,
    is_hopf,
)

__all__ = [
    "GroupValidationError",
    "ReconstructionError",
    "FiniteGroup",
    "finite_group",
    "cyclic_group",
    "dihedral_group",
    "symmetric_group_3",
    "quaternion_group",
    "direct_product",
    "klein_four_group",
    "all_groups_up_to",
    "is_isomorphic",
    "function_algebra",
    "group_algebra",
    "regular_representation",
    "pi_map",
    "convolution_element",
    "monoid_function_algebra",
    "HaarState",
    "haar_state",
    "reconstruct_group",
]


class GroupValidationError(ValueError):
    """The multiplication table fails a group law."""


class ReconstructionError(RuntimeError):
    """The comultiplication is not of dualized-product form."""


class FiniteGroup:
    """A finite group given by its multiplication table over indices 0..n-1."""

    def __init__(self, table, name: str = "G"):
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        if table.shape != (n, n) or n == 0:
            raise GroupValidationError("table must be a nonempty square matrix")
        if table.min() < 0 or table.max() >= n:
            raise GroupValidationError("table entries must be indices in range 0..%d" % (n - 1))
        self.table = table
        self.order = n
        self.name = name
        _validate_monoid(table)
        self.identity = _find_identity(table)
        inverses = np.full(n, -1, dtype=np.int64)
        for p in range(n):
            hits = np.where(table[p] == self.identity)[0]
            for q in hits:
                if table[q, p] == self.identity:
                    inverses[p] = q
                    break
            if inverses[p] < 0:
                raise GroupValidationError("element %d has no inverse" % p)
        self.inverses = inverses
        self.is_abelian = bool(np.array_equal(table, table.T))

    def mul(self, p: int, q: int) -> int:
        return int(self.table[p, q])

    def inv(self, p: int) -> int:
        return int(self.inverses[p])

    def element_order(self, p: int) -> int:
        x, k = p, 1
        while x != self.identity:
            x, k = self.mul(x, p), k + 1
        return k

    def order_profile(self) -> tuple[int, ...]:
        return tuple(sorted(self.element_order(p) for p in range(self.order)))

    def __repr__(self):
        return "FiniteGroup(%s, order=%d)" % (self.name, self.order)


def _validate_monoid(table: np.ndarray):
    n = table.shape[0]
    assoc = table[table, :][:, :, :]  # (pq) r over all p,q,r
    # assoc[p,q,r] = table[table[p,q], r]; compare with table[p, table[q,r]]
    lhs = table[table[:, :, None], np.arange(n)[None, None, :]]
    rhs = table[np.arange(n)[:, None, None], table[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        p, q, r = bad[0]
        raise GroupValidationError("associativity fails at triple (%d, %d, %d)" % (p, q, r))
    _find_identity(table)


def _find_identity(table: np.ndarray) -> int:
    n = table.shape[0]
    for e in range(n):
        if np.array_equal(table[e], np.arange(n)) and np.array_equal(table[:, e], np.arange(n)):
            return e
    raise GroupValidationError("table has no two-sided identity")


def finite_group(order: int, table, name: str = "G") -> FiniteGroup:
    """Validated group from a multiplication table; derives identity and inverses."""
    table = np.asarray(table, dtype=np.int64)
    if table.shape != (order, order):
        raise GroupValidationError("table shape %r does not match order %d" % (table.shape, order))
    return FiniteGroup(table, name=name)


# -- standard groups -------------------------------------------------------


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, name="Z%d" % n)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    n, m = g.order, h.order
    table = np.empty((n * m, n * m), dtype=np.int64)
    for (a, b), (c, d) in itertools.product(itertools.product(range(n), range(m)), repeat=2):
        table[a * m + b, c * m + d] = g.mul(a, c) * m + h.mul(b, d)
    return FiniteGroup(table, name="%sx%s" % (g.name, h.name))


def klein_four_group() -> FiniteGroup:
    return direct_product(cyclic_group(2), cyclic_group(2))


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; elements r^i and s r^i."""
    order = 2 * n

    def mul(a, b):
        fa, ia = divmod(a, n)
        fb, ib = divmod(b, n)
        if fa == 0:
            return fb * n + (ia + ib) % n if fb == 0 else n + (ib - ia) % n
        return n + (ia + ib) % n if fb == 0 else ((ib - ia) % n)

    table = [[mul(a, b) for b in range(order)] for a in range(order)]
    return FiniteGroup(table, name="D%d" % n)


def symmetric_group_3() -> FiniteGroup:
    g = dihedral_group(3)
    g.name = "S3"
    return g


def quaternion_group() -> FiniteGroup:
    """Order 8: indices 0..7 = 1, -1, i, -i, j, -j, k, -k."""
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]

    def mul(a, b):
        sa, ua = (1 if a % 2 == 0 else -1), a // 2
        sb, ub = (1 if b % 2 == 0 else -1), b // 2
        prod = {
            (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
            (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
            (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
            (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
        }[(ua, ub)]
        sign = sa * sb * prod[0]
        return prod[1] * 2 + (0 if sign == 1 else 1)

    table = [[mul(a, b) for b in range(8)] for a in range(8)]
    g = FiniteGroup(table, name="Q8")
    g.element_names = names
    return g


def all_groups_up_to(n: int) -> list[FiniteGroup]:
    """One representative per isomorphism type of order <= n (n <= 8 supported)."""
    if n > 8:
        raise InvalidInputError("group catalogue covers orders up to 8")
    catalogue = [
        cyclic_group(1), cyclic_group(2), cyclic_group(3), cyclic_group(4),
        klein_four_group(), cyclic_group(5), cyclic_group(6), symmetric_group_3(),
        cyclic_group(7), cyclic_group(8),
        direct_product(cyclic_group(4), cyclic_group(2)),
        direct_product(klein_four_group(), cyclic_group(2)),
        dihedral_group(4), quaternion_group(),
    ]
    return [g for g in catalogue if g.order <= n]


def is_isomorphic(g: FiniteGroup, h: FiniteGroup) -> bool:
    """Order-profile filter followed by a backtracking bijection search."""
    if g.order != h.order:
        return False
    if g.order_profile() != h.order_profile():
        return False
    n = g.order
    orders_g = [g.element_order(p) for p in range(n)]
    orders_h = [h.element_order(p) for p in range(n)]
    mapping = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=bool)
    mapping[g.identity] = h.identity
    used[h.identity] = True
    todo = sorted((p for p in range(n) if p != g.identity), key=lambda p: -orders_g[p])

    def consistent(p, q):
        for r in range(n):
            if mapping[r] < 0:
                continue
            pr, qmr = g.mul(p, r), h.mul(q, mapping[r])
            if mapping[pr] >= 0 and mapping[pr] != qmr:
                return False
            rp, mrq = g.mul(r, p), h.mul(mapping[r], q)
            if mapping[rp] >= 0 and mapping[rp] != mrq:
                return False
        return True

    def extend(k):
        if k == len(todo):
            for p in range(n):
                for q in range(n):
                    if mapping[g.mul(p, q)] != h.mul(mapping[p], mapping[q]):
                        return False
            return True
        p = todo[k]
        if mapping[p] >= 0:
            return extend(k + 1)
        for q in range(n):
            if used[q] or orders_h[q] != orders_g[p] or not consistent(p, q):
                continue
            mapping[p] = q
            used[q] = True
            if extend(k + 1):
                return True
            mapping[p] = -1
            used[q] = False
        return False

    return extend(0)


# -- the two dual families -------------------------------------------------


def _dualized_product_operator(algebra: CStarAlgebra, table: np.ndarray) -> LinearOperator:
    n = table.shape[0]
    mat = np.zeros((n * n, n), dtype=np.complex128)
    for p in range(n):
        for q in range(n):
            mat[p * n + q, table[p, q]] = 1.0
    return LinearOperator(algebra, tensor_power(algebra, 2), mat)


def function_algebra(g: FiniteGroup) -> tuple[CStarAlgebra, Comultiplication]:
    """C(G) with phi(f)(p, q) = f(pq); a Hopf pair for every group."""
    algebra = CStarAlgebra([1] * g.order, label="C(%s)" % g.name)
    return algebra, Comultiplication(algebra, _dualized_product_operator(algebra, g.table))


def regular_representation(g: FiniteGroup) -> list[np.ndarray]:
    """Left translation permutation matrices lambda_p with lambda_p e_q = e_pq."""
    n = g.order
    out = []
    for p in range(n):
        m = np.zeros((n, n), dtype=np.complex128)
        for q in range(n):
            m[g.mul(p, q), q] = 1.0
        out.append(m)
    return out


def group_algebra(g: FiniteGroup) -> tuple[CStarAlgebra, Comultiplication]:
    """Span of the left translations inside M_n with phi(lambda_p) = lambda_p (x) lambda_p."""
    lams = regular_representation(g)
    algebra = CStarAlgebra((g.order,), basis=[[m] for m in lams], label="C*[%s]" % g.name)
    n = g.order
    mat = np.zeros((n * n, n), dtype=np.complex128)
    for p in range(n):
        mat[p * n + p, p] = 1.0
    return algebra, Comultiplication(algebra, LinearOperator(algebra, tensor_power(algebra, 2), mat))


def pi_map(algebra: CStarAlgebra, f) -> AlgebraElement:
    """pi(f) = sum_p f(p) lambda_p for a group algebra with the translation basis."""
    return algebra.from_vec(np.asarray(f, dtype=np.complex128))


def convolution_element(g: FiniteGroup, f, h) -> tuple[AlgebraElement, AlgebraElement]:
    """h(p) = sum_q f(pq) h(q) on C(G), with the witness k(p, q) = sum_r f(pr) h(qr).

    The witness satisfies T_left(k) = h (x) 1, so h lies in the left domain
    with eps(h) = h(identity) and (S h)(p) = h(p^-1).
    """
    f = np.asarray(f, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if f.shape != (g.order,) or h.shape != (g.order,):
        raise InvalidInputError("functions must be coordinate lists of length %d" % g.order)
    algebra, _ = function_algebra(g)
    conv = np.array([sum(f[g.mul(p, q)] * h[q] for q in range(g.order)) for p in range(g.order)])
    witness = np.zeros((g.order, g.order), dtype=np.complex128)
    for p in range(g.order):
        for q in range(g.order):
            witness[p, q] = sum(f[g.mul(p, r)] * h[g.mul(q, r)] for r in range(g.order))
    pair = tensor_power(algebra, 2)
    return algebra.from_vec(conv), pair.from_vec(witness.ravel())


def monoid_function_algebra(table) -> tuple[CStarAlgebra, Comultiplication]:
    """C(M) with the dualized product of an associative monoid with identity.

    Passes the comultiplication checks for any monoid; the Hopf verdict is
    negative exactly when the table is not a group (a galois map acquires
    a kernel).
    """
    table = np.asarray(table, dtype=np.int64)
    _validate_monoid(table)
    algebra = CStarAlgebra([1] * table.shape[0], label="C(M%d)" % table.shape[0])
    return algebra, Comultiplication(algebra, _dualized_product_operator(algebra, table))


# -- Haar states -----------------------------------------------------------


class HaarState:
    """A bi-invariant state, with its faithfulness flag and residual."""

    def __init__(self, functional: Functional, faithful: bool, residual: float):
        self.functional = functional
        self.faithful = faithful
        self.residual = residual

    def __call__(self, a: AlgebraElement) -> complex:
        return self.functional(a)

    def __repr__(self):
        return "HaarState(faithful=%s, residual=%.2e)" % (self.faithful, self.residual)


def haar_state(comult: Comultiplication, tol: float = DEFAULT_TOL) -> HaarState | None:
    """Solve the two invariance systems for a normalized positive functional.

    Returns None when no bi-invariant state exists.  A bi-invariant
    normalized functional is unique as soon as one bi-invariant state
    exists (apply the state on one leg and the candidate on the other), so
    the minimum-norm hermitian solution decides existence.  When the state
    is faithful the pair is necessarily Hopf; that cross-check is enforced.
    """
    algebra = comult.algebra
    d = algebra.dim
    coords_phi = comult.operator.matrix.T.reshape(d, d, d)  # [I, J, K]
    unit = algebra.unit().vec()

    rows = []
    # left invariance: (id (x) h) phi(e_I) = h(e_I) 1
    for i in range(d):
        for j in range(d):
            row = coords_phi[i, j, :].copy()
            row[i] -= unit[j]
            rows.append(row)
    # right invariance: (h (x) id) phi(e_I) = h(e_I) 1
    for i in range(d):
        for k in range(d):
            row = coords_phi[i, :, k].copy()
            row[i] -= unit[k]
            rows.append(row)
    a_cplx = np.array(rows)

    star = np.column_stack([algebra.basis_element(i).star().vec() for i in range(d)])
    # real-linear system over (Re eta, Im eta)
    blocks = [
        np.hstack([a_cplx.real, -a_cplx.imag]),
        np.hstack([a_cplx.imag, a_cplx.real]),
        # hermitianity: sum_J star[J, I] eta_J = conj(eta_I)
        np.hstack([star.T.real - np.eye(d), -star.T.imag]),
        np.hstack([star.T.imag, star.T.real + np.eye(d)]),
        # normalization h(1) = 1
        np.hstack([unit.real, -unit.imag])[None, :],
        np.hstack([unit.imag, unit.real])[None, :],
    ]
    lhs = np.vstack(blocks)
    rhs = np.zeros(lhs.shape[0])
    rhs[-2] = 1.0
    sol, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    eta = sol[:d] + 1j * sol[d:]

    inv_rows = a_cplx @ eta
    residual = float(np.max(np.abs(inv_rows))) if inv_rows.size else 0.0
    if residual > tol or abs(complex(np.dot(unit, eta)) - 1.0) > tol:
        return None

    # orthogonal representer of the functional inside the algebra's span
    gram = np.array([[algebra.basis_element(i).inner(algebra.basis_element(j))
                      for j in range(d)] for i in range(d)])
    coeffs = np.conj(np.linalg.solve(gram.T, eta))
    density = algebra.from_vec(coeffs)
    density = 0.5 * (density + density.star())
    eigs = np.concatenate([np.linalg.eigvalsh(b) for b in density.blocks])
    if eigs.min() < -tol:
        return None
    faithful = bool(eigs.min() > HAAR_FAITHFUL_EIG)
    state = HaarState(Functional(algebra, density), faithful, residual)
    if faithful and not is_hopf(comult, tol).is_hopf:
        raise InternalConsistencyError(
            "a faithful bi-invariant state forces injective galois maps"
        )
    return state


# -- reconstruction ----------------------------------------------------------


def reconstruct_group(comult: Comultiplication, tol: float = DEFAULT_TOL) -> FiniteGroup:
    """Recover the group table from an abelian pair with a dualized product.

    Points of the underlying set are the basis indices.  Requires the two
    one-sided injectivity hypotheses on elementary tensors: neither
    phi(a)(1 (x) b) nor phi(a)(b (x) 1) may vanish for basis a, b.
    """
    algebra = comult.algebra
    if any(n != 1 for n in algebra.block_dims):
        raise PreconditionError("reconstruction requires an abelian algebra (all blocks 1x1)")
    if not comult.defects.passed(tol):
        raise PreconditionError("comultiplication checks fail")
    n = algebra.dim
    basis = algebra.basis()
    pair = tensor_power(algebra, 2)
    for p in range(n):
        for q in range(n):
            t = pair.from_vec(np.kron(basis[p].vec(), basis[q].vec()))
            if comult.galois.left(t).norm() <= tol:
                raise ReconstructionError(
                    "injectivity hypothesis fails: phi(e_%d)(1 (x) e_%d) = 0" % (p, q)
                )
            if comult.galois.antipode_right(t).norm() <= tol:
                raise ReconstructionError(
                    "injectivity hypothesis fails: phi(e_%d)(e_%d (x) 1) = 0" % (p, q)
                )

    coords = comult.operator.matrix.T.reshape(n, n, n)  # [r, p, q]
    table = np.full((n, n), -1, dtype=np.int64)
    for p in range(n):
        for q in range(n):
            col = coords[:, p, q]
            ones = np.where(np.abs(col - 1.0) <= tol)[0]
            zeros = np.where(np.abs(col) <= tol)[0]
            if len(ones) != 1 or len(ones) + len(zeros) != n:
                raise ReconstructionError(
                    "coefficients at point pair (%d, %d) are not of 0/1 product form" % (p, q)
                )
            table[p, q] = ones[0]
    try:
        return FiniteGroup(table, name="reconstructed")
    except GroupValidationError as exc:
        raise ReconstructionError("recovered table is not a group: %s" % exc) from exc
