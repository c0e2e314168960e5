"""Comultiplication checks, galois maps, Hopf verdicts, counit and antipode.

A pair (A, phi) of a matrix-block algebra with a coassociative unital
*-homomorphism phi : A -> A (x) A is a Hopf C*-algebra when the galois
maps

    T_left (a (x) b)  = phi(a)(1 (x) b)
    T_right(a (x) b)  = (a (x) 1) phi(b)

are injective.  In finite dimensions injectivity on the Haagerup
completion reduces to full matrix rank, since the algebraic and completed
tensor products coincide as sets and the multiplier algebra of a unital
algebra is the algebra itself.

The counit and antipode are synthesized from witnesses: for a in the left
domain there is x with T_left(x) = a (x) 1, and then eps(a) 1 = m(x) and
S(a) (x) 1 = (the antipode galois map applied to x).  Right-handed twins
use T_right.  The two-sided machinery uses the threefold galois map
T(p (x) q (x) r) = (p (x) 1 (x) 1) phi2(q) (1 (x) 1 (x) r) and the
evaluation formulas returning eps(a)(b (x) c) and b S(a) c.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .csalg import (
    AlgebraElement,
    CStarAlgebra,
    Functional,
    InvalidInputError,
    LinearOperator,
    check_star_hom,
    elementary_tensor,
    multiplication_operator,
    place_legs,
    same_space,
    slice_leg,
    star_matrix,
    tensor_power,
)

__all__ = [
    "PreconditionError",
    "DomainError",
    "InternalConsistencyError",
    "Comultiplication",
    "ComultDefects",
    "GaloisMaps",
    "HopfReport",
    "check_comultiplication",
    "galois_maps",
    "is_hopf",
    "domain_left",
    "domain_right",
    "left_witness",
    "right_witness",
    "counit",
    "antipode",
    "right_counit_antipode",
    "split_coproduct",
    "slice_identities",
    "two_sided",
    "two_sided_identities",
    "agreement",
    "full_report",
]


class PreconditionError(RuntimeError):
    """An operation was invoked on a pair that fails its prerequisites."""


class DomainError(ValueError):
    """The element is outside the domain on which the map is defined."""


class InternalConsistencyError(RuntimeError):
    """A derived identity failed; signals a broken comultiplication."""


def _leg_permutation_matrix(legs, perm) -> np.ndarray:
    dims = tuple(leg.dim for leg in legs)
    total = int(np.prod(dims))
    idx = np.arange(total).reshape(dims).transpose(perm).ravel()
    return np.eye(total)[idx]


@dataclass(frozen=True)
class ComultDefects:
    multiplicative: float
    adjoint: float
    unital: float
    coassociative: float

    @property
    def max_defect(self) -> float:
        return max(self.multiplicative, self.adjoint, self.unital, self.coassociative)

    def passed(self, tol: float = DEFAULT_TOL) -> bool:
        return self.max_defect <= tol


@dataclass(frozen=True)
class GaloisMaps:
    left: LinearOperator           # a (x) b -> phi(a)(1 (x) b)
    right: LinearOperator          # a (x) b -> (a (x) 1) phi(b)
    antipode_left: LinearOperator  # p (x) q -> (1 (x) p) phi(q)
    antipode_right: LinearOperator  # p (x) q -> phi(p)(q (x) 1)


class Comultiplication:
    """A linear map A -> A (x) A together with its cached derived operators."""

    def __init__(self, algebra: CStarAlgebra, operator: LinearOperator):
        pair = tensor_power(algebra, 2)
        if not same_space(operator.source, algebra) or not same_space(operator.target, pair):
            raise InvalidInputError("comultiplication must map the algebra into its tensor square")
        self.algebra = algebra
        self.operator = LinearOperator(algebra, pair, operator.matrix)

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return self.operator(a)

    @property
    def pair(self) -> CStarAlgebra:
        return tensor_power(self.algebra, 2)

    @property
    def triple(self) -> CStarAlgebra:
        return tensor_power(self.algebra, 3)

    @functools.cached_property
    def coproduct_square(self) -> LinearOperator:
        """phi2 = (phi (x) id) phi, equal to (id (x) phi) phi by coassociativity."""
        d = self.algebra.dim
        mat = np.kron(self.operator.matrix, np.eye(d)) @ self.operator.matrix
        return LinearOperator(self.algebra, self.triple, mat)

    @functools.cached_property
    def defects(self) -> ComultDefects:
        hom = check_star_hom(self.operator)
        d = self.algebra.dim
        left2 = np.kron(self.operator.matrix, np.eye(d)) @ self.operator.matrix
        right2 = np.kron(np.eye(d), self.operator.matrix) @ self.operator.matrix
        coassoc = 0.0
        for i in range(d):
            delta = self.triple.from_vec(left2[:, i] - right2[:, i])
            coassoc = max(coassoc, delta.norm())
        return ComultDefects(hom.multiplicative_defect, hom.adjoint_defect, hom.unital_defect, coassoc)

    @functools.cached_property
    def galois(self) -> GaloisMaps:
        a = self.algebra
        d = a.dim
        pair = self.pair
        m = multiplication_operator(a).matrix
        phi = self.operator.matrix
        eye = np.eye(d)
        left = np.kron(eye, m) @ np.kron(phi, eye)
        right = np.kron(m, eye) @ np.kron(eye, phi)
        swap12 = _leg_permutation_matrix(self.triple.legs, (1, 0, 2))
        swap23 = _leg_permutation_matrix(self.triple.legs, (0, 2, 1))
        antipode_left = np.kron(eye, m) @ swap12 @ np.kron(eye, phi)
        antipode_right = np.kron(m, eye) @ swap23 @ np.kron(phi, eye)
        return GaloisMaps(
            LinearOperator(pair, pair, left),
            LinearOperator(pair, pair, right),
            LinearOperator(pair, pair, antipode_left),
            LinearOperator(pair, pair, antipode_right),
        )

    @functools.cached_property
    def split_coproduct_operator(self) -> LinearOperator:
        """p (x) q -> phi_13(p) phi_23(q) on the threefold product."""
        a, triple = self.algebra, self.triple
        basis_images = [self(e) for e in a.basis()]
        leg13 = [place_legs(img, (0, 2), triple.legs) for img in basis_images]
        leg23 = [place_legs(img, (1, 2), triple.legs) for img in basis_images]
        cols = [(leg13[i] * leg23[j]).vec() for i in range(a.dim) for j in range(a.dim)]
        return LinearOperator(self.pair, triple, np.column_stack(cols))

    @functools.cached_property
    def triple_galois(self) -> LinearOperator:
        """T = (T_right (x) id)(id (x) T_left) on the threefold product."""
        d = self.algebra.dim
        g = self.galois
        mat = np.kron(g.right.matrix, np.eye(d)) @ np.kron(np.eye(d), g.left.matrix)
        return LinearOperator(self.triple, self.triple, mat)

    @functools.cached_property
    def two_sided_formulas(self) -> "TwoSidedFormulas":
        return _two_sided_formulas(self)

    def __repr__(self):
        return "Comultiplication(%s)" % self.algebra.label


def check_comultiplication(comult: Comultiplication, tol: float = DEFAULT_TOL) -> ComultDefects:
    """Homomorphism, adjoint, unitality and coassociativity defects of phi."""
    return comult.defects


def _require_comultiplication(comult: Comultiplication, tol: float):
    if not comult.defects.passed(tol):
        raise PreconditionError(
            "comultiplication checks fail (max defect %.3e)" % comult.defects.max_defect
        )


def galois_maps(comult: Comultiplication, tol: float = DEFAULT_TOL) -> GaloisMaps:
    _require_comultiplication(comult, tol)
    return comult.galois


def _subspace_basis_from_conditions(conditions: np.ndarray, dim: int, tol: float):
    """Orthonormal basis of { v : conditions @ v = 0 } with a relative cutoff."""
    if conditions.size == 0:
        return [np.eye(dim)[:, i] for i in range(dim)]
    full = conditions.shape[0] < conditions.shape[1]
    _, s, vh = np.linalg.svd(conditions, full_matrices=full)
    cut = tol * max(1.0, s[0] if s.size else 0.0)
    r = int(np.sum(s > cut))
    return [vh[k].conj() for k in range(r, dim)]


def _range_projector_complement(op: LinearOperator) -> np.ndarray:
    u, _, _ = np.linalg.svd(op.matrix, full_matrices=False)
    ur = u[:, :op.rank()]
    return np.eye(op.target.dim) - ur @ ur.conj().T


def is_hopf(comult: Comultiplication, tol: float = DEFAULT_TOL) -> "HopfReport":
    """Verdict: both galois maps injective, i.e. of full rank dim(A)^2.

    The algebraic and Haagerup tensor products coincide as sets in finite
    dimensions, so injectivity on the completion is matrix injectivity.
    """
    _require_comultiplication(comult, tol)
    g = comult.galois
    d2 = comult.pair.dim
    rank_left, rank_right = g.left.rank(), g.right.rank()
    verdict = rank_left == d2 and rank_right == d2
    return HopfReport(
        comult_defects=comult.defects,
        rank_left=rank_left,
        rank_right=rank_right,
        full_rank=d2,
        is_hopf=verdict,
        kernel_left=None if rank_left == d2 else g.left.kernel_basis(),
        kernel_right=None if rank_right == d2 else g.right.kernel_basis(),
        notes=(
            "injectivity on the completed tensor product reduces to matrix "
            "injectivity: the algebraic and Haagerup tensor products coincide "
            "in finite dimensions",
        ),
    )


def _require_hopf(comult: Comultiplication, tol: float):
    report = is_hopf(comult, tol)
    if not report.is_hopf:
        raise PreconditionError(
            "pair is not Hopf: galois ranks (%d, %d) of %d"
            % (report.rank_left, report.rank_right, report.full_rank)
        )


def _embed_first(a: AlgebraElement, comult: Comultiplication) -> AlgebraElement:
    return place_legs(a, (0,), comult.pair.legs)


def _embed_second(a: AlgebraElement, comult: Comultiplication) -> AlgebraElement:
    return place_legs(a, (1,), comult.pair.legs)


def domain_left(comult: Comultiplication, tol: float = DEFAULT_TOL):
    """Basis of { a : a (x) 1 in range(T_left) } plus the witness map a -> x."""
    _require_hopf(comult, tol)
    a = comult.algebra
    proj = _range_projector_complement(comult.galois.left)
    embed = np.column_stack([_embed_first(e, comult).vec() for e in a.basis()])
    basis_vecs = _subspace_basis_from_conditions(proj @ embed, a.dim, tol)
    return [a.from_vec(v) for v in basis_vecs], lambda elt: left_witness(comult, elt, tol)


def domain_right(comult: Comultiplication, tol: float = DEFAULT_TOL):
    """Basis of { a : 1 (x) a in range(T_right) } plus the witness map."""
    _require_hopf(comult, tol)
    a = comult.algebra
    proj = _range_projector_complement(comult.galois.right)
    embed = np.column_stack([_embed_second(e, comult).vec() for e in a.basis()])
    basis_vecs = _subspace_basis_from_conditions(proj @ embed, a.dim, tol)
    return [a.from_vec(v) for v in basis_vecs], lambda elt: right_witness(comult, elt, tol)


def left_witness(comult: Comultiplication, a: AlgebraElement, tol: float = DEFAULT_TOL) -> AlgebraElement:
    """Minimum-norm x with T_left(x) = a (x) 1 (unique when T_left is injective)."""
    target = _embed_first(a, comult)
    x = comult.galois.left.solve(target)
    residual = (comult.galois.left(x) - target).norm()
    if residual > tol * (1.0 + a.norm()):
        raise DomainError("element is outside the left domain (residual %.3e)" % residual)
    return x


def right_witness(comult: Comultiplication, a: AlgebraElement, tol: float = DEFAULT_TOL) -> AlgebraElement:
    """Minimum-norm x with T_right(x) = 1 (x) a."""
    target = _embed_second(a, comult)
    x = comult.galois.right.solve(target)
    residual = (comult.galois.right(x) - target).norm()
    if residual > tol * (1.0 + a.norm()):
        raise DomainError("element is outside the right domain (residual %.3e)" % residual)
    return x


@functools.lru_cache(maxsize=None)
def _normalized_trace(algebra: CStarAlgebra) -> Functional:
    f = Functional.trace(algebra, normalized=True)
    f.values  # precompute
    return f


def _scalar_part(y: AlgebraElement) -> tuple[complex, float]:
    """Best scalar c with y = c 1, and the residual norm."""
    one = y.algebra.unit()
    c = one.inner(y) / one.inner(one)
    return c, (y - c * one).norm()


def counit(comult: Comultiplication, a: AlgebraElement, tol: float = DEFAULT_TOL) -> complex:
    """eps(a) with eps(a) 1 = m(x), T_left(x) = a (x) 1; multiplicative on its domain."""
    x = left_witness(comult, a, tol)
    value, residual = _scalar_part(multiplication_operator(comult.algebra)(x))
    if residual > tol * (1.0 + abs(value)):
        raise InternalConsistencyError(
            "m(witness) is not scalar (residual %.3e); the comultiplication is broken" % residual
        )
    return value


def antipode(comult: Comultiplication, a: AlgebraElement, tol: float = DEFAULT_TOL) -> AlgebraElement:
    """S(a) with S(a) (x) 1 = (1 (x) p) phi(q)-map applied to the witness of a."""
    x = left_witness(comult, a, tol)
    y = comult.galois.antipode_left(x)
    s = slice_leg(y, 1, _normalized_trace(comult.algebra))
    residual = (y - _embed_first(s, comult)).norm()
    if residual > tol * (1.0 + s.norm()):
        raise InternalConsistencyError(
            "antipode image is not of the form s (x) 1 (residual %.3e)" % residual
        )
    return s


def right_counit_antipode(comult: Comultiplication, a: AlgebraElement,
                          tol: float = DEFAULT_TOL) -> tuple[complex, AlgebraElement]:
    """Right-handed twins: eps'(a) 1 = m(x), 1 (x) S'(a) = phi(p)(q (x) 1)-map of x."""
    x = right_witness(comult, a, tol)
    value, residual = _scalar_part(multiplication_operator(comult.algebra)(x))
    if residual > tol * (1.0 + abs(value)):
        raise InternalConsistencyError("m(right witness) is not scalar (residual %.3e)" % residual)
    y = comult.galois.antipode_right(x)
    s = slice_leg(y, 0, _normalized_trace(comult.algebra))
    sres = (y - _embed_second(s, comult)).norm()
    if sres > tol * (1.0 + s.norm()):
        raise InternalConsistencyError("right antipode image is not of the form 1 (x) s")
    return value, s


def split_coproduct(comult: Comultiplication, x: AlgebraElement) -> AlgebraElement:
    """Linear extension of p (x) q -> phi_13(p) phi_23(q).

    For every a in the left domain with witness x the fundamental identity
    split_coproduct(x) = x (x) 1 holds.
    """
    return comult.split_coproduct_operator(x)


@dataclass(frozen=True)
class SliceIdentityReport:
    antipode_of_left_slice: float   # S((w (x) i) phi(a)) = (w (x) i)(x)
    antipode_of_right_slice: float  # S((i (x) w)(x)) = (w (x) i) phi(S(a))
    counit_recovers: float          # (i (x) eps) phi(a) = a
    counit_star_antipode: float     # eps(S(a)*) = conj(eps(a))
    counit_of_right_slice: float    # eps((i (x) w)(x)) = w(S(a))

    @property
    def max_residual(self) -> float:
        return max(
            self.antipode_of_left_slice,
            self.antipode_of_right_slice,
            self.counit_recovers,
            self.counit_star_antipode,
            self.counit_of_right_slice,
        )


def slice_identities(comult: Comultiplication, a: AlgebraElement, omega: Functional,
                     tol: float = DEFAULT_TOL) -> SliceIdentityReport:
    """Evaluate the slice identities tying witnesses, counit and antipode."""
    x = left_witness(comult, a, tol)
    s_a = antipode(comult, a, tol)
    eps_a = counit(comult, a, tol)

    left_slice = slice_leg(comult(a), 0, omega)
    r1 = (antipode(comult, left_slice, tol) - slice_leg(x, 0, omega)).norm()

    right_slice = slice_leg(x, 1, omega)
    r2 = (antipode(comult, right_slice, tol) - slice_leg(comult(s_a), 0, omega)).norm()

    eps_values = np.array([counit(comult, e, tol) for e in comult.algebra.basis()])
    phi_coords = comult(a).coords_tensor()
    recovered = comult.algebra.from_vec(phi_coords @ eps_values)
    r3 = (recovered - a).norm()

    r4 = abs(counit(comult, s_a.star(), tol) - np.conj(eps_a))
    r5 = abs(counit(comult, right_slice, tol) - omega(s_a))
    return SliceIdentityReport(r1, r2, r3, r4, r5)


@dataclass(frozen=True)
class TwoSidedFormulas:
    counit_pair: LinearOperator      # (p (x) 1) phi(q) (1 (x) r)          -> eps(a)(b (x) c)
    antipode_triple: LinearOperator  # (p (x) 1 (x) 1) phi_13(q) phi_23(r)
    antipode_cotriple: LinearOperator  # (phi(p) (x) 1) phi2(q) (1 (x) phi(r))
    antipode_pair: LinearOperator    # p (x) qr                            -> b S(a) (x) c
    antipode_full: LinearOperator    # pqr                                 -> b S(a) c


@dataclass
class TwoSidedData:
    galois_triple: LinearOperator
    domain_basis: list
    formulas: TwoSidedFormulas


def _two_sided_formulas(comult: Comultiplication) -> TwoSidedFormulas:
    a = comult.algebra
    d = a.dim
    eye = np.eye(d)
    m = multiplication_operator(a).matrix
    g = comult.galois
    pair, triple = comult.pair, comult.triple

    counit_pair = np.kron(eye, m) @ np.kron(g.right.matrix, eye)
    antipode_pair = np.kron(eye, m)
    antipode_full = m @ np.kron(eye, m)
    antipode_triple = np.kron(m, np.eye(d * d)) @ np.kron(eye, comult.split_coproduct_operator.matrix)

    basis = a.basis()
    phi_of = [comult(e) for e in basis]
    phi2_of = [comult.coproduct_square(e) for e in basis]
    left_fac = [place_legs(img, (0, 1), triple.legs) for img in phi_of]
    right_fac = [place_legs(img, (1, 2), triple.legs) for img in phi_of]
    cols = []
    for i in range(d):
        for j in range(d):
            mid = left_fac[i] * phi2_of[j]
            for k in range(d):
                cols.append((mid * right_fac[k]).vec())
    antipode_cotriple = np.column_stack(cols)

    return TwoSidedFormulas(
        LinearOperator(triple, pair, counit_pair),
        LinearOperator(triple, triple, antipode_triple),
        LinearOperator(triple, triple, antipode_cotriple),
        LinearOperator(triple, pair, antipode_pair),
        LinearOperator(triple, a, antipode_full),
    )


def two_sided(comult: Comultiplication, tol: float = DEFAULT_TOL) -> TwoSidedData:
    """Threefold galois map, its two-sided domain, and the evaluation formulas."""
    _require_hopf(comult, tol)
    a = comult.algebra
    t = comult.triple_galois
    if t.rank() != comult.triple.dim:
        raise InternalConsistencyError("threefold galois map is not injective on a Hopf pair")
    proj = _range_projector_complement(t)
    basis_vecs = [e.vec() for e in a.basis()]
    stacks = []
    for b in basis_vecs:
        for c in basis_vecs:
            cols = np.kron(b.reshape(-1, 1), np.kron(np.eye(a.dim), c.reshape(-1, 1)))
            stacks.append(proj @ cols)
    domain_vecs = _subspace_basis_from_conditions(np.vstack(stacks), a.dim, tol)
    return TwoSidedData(
        galois_triple=t,
        domain_basis=[a.from_vec(v) for v in domain_vecs],
        formulas=comult.two_sided_formulas,
    )


def two_sided_identities(comult: Comultiplication, a: AlgebraElement,
                         b: AlgebraElement | None = None, c: AlgebraElement | None = None,
                         tol: float = DEFAULT_TOL) -> dict[str, float]:
    """Residuals of the five evaluation identities for T(x) = b (x) a (x) c."""
    alg = comult.algebra
    b = alg.unit() if b is None else b
    c = alg.unit() if c is None else c
    t = comult.triple_galois
    triple = comult.triple
    goal = triple.from_vec(np.kron(np.kron(b.vec(), a.vec()), c.vec()))
    x = t.solve(goal)
    if (t(x) - goal).norm() > tol * (1.0 + goal.norm()):
        raise InternalConsistencyError("threefold galois system is inconsistent")

    eps_a = counit(comult, a, tol)
    s_a = antipode(comult, a, tol)
    f = comult.two_sided_formulas

    pair = comult.pair
    bc = pair.from_vec(np.kron(b.vec(), c.vec()))
    res = {}
    res["counit_pair"] = (f.counit_pair(x) - eps_a * bc).norm()

    b_leg = place_legs(b, (0,), triple.legs)
    s_leg = place_legs(s_a, (1,), triple.legs)
    phi_c23 = place_legs(comult(c), (1, 2), triple.legs)
    res["antipode_triple"] = (f.antipode_triple(x) - b_leg * s_leg * phi_c23).norm()

    phi_b12 = place_legs(comult(b), (0, 1), triple.legs)
    res["antipode_cotriple"] = (f.antipode_cotriple(x) - phi_b12 * s_leg * phi_c23).norm()

    bs = b * s_a
    res["antipode_pair"] = (f.antipode_pair(x) - pair.from_vec(np.kron(bs.vec(), c.vec()))).norm()
    res["antipode_full"] = (f.antipode_full(x) - bs * c).norm()
    return res


@dataclass(frozen=True)
class AgreementReport:
    intersection_dim: int
    empty: bool
    counit_residual: float
    antipode_residual: float
    left_right_dim: int
    left_right_counit_residual: float
    left_right_antipode_residual: float


def _span_projector(vectors: list[np.ndarray], dim: int) -> np.ndarray:
    if not vectors:
        return np.zeros((dim, dim))
    q, _ = np.linalg.qr(np.column_stack(vectors))
    return q @ q.conj().T


def agreement(comult: Comultiplication, tol: float = DEFAULT_TOL) -> AgreementReport:
    """Max |eps - eps'| and ||S - S'|| over the two-sided domain intersection.

    The residuals over the plain left/right intersection are reported as
    well but carry no claim: equality there is only known for pairs with
    invariant weights.
    """
    left_basis, _ = domain_left(comult, tol)
    right_basis, _ = domain_right(comult, tol)
    ts = two_sided(comult, tol)
    d = comult.algebra.dim

    def intersect(parts):
        conditions = np.vstack([np.eye(d) - _span_projector([e.vec() for e in basis], d)
                                for basis in parts])
        return _subspace_basis_from_conditions(conditions, d, tol)

    def residuals(vectors):
        eps_r, s_r = 0.0, 0.0
        for v in vectors:
            a = comult.algebra.from_vec(v)
            eps_l = counit(comult, a, tol)
            s_l = antipode(comult, a, tol)
            eps_rt, s_rt = right_counit_antipode(comult, a, tol)
            eps_r = max(eps_r, abs(eps_l - eps_rt))
            s_r = max(s_r, (s_l - s_rt).norm())
        return eps_r, s_r

    three = intersect([left_basis, right_basis, ts.domain_basis])
    pairwise = intersect([left_basis, right_basis])
    eps3, s3 = residuals(three)
    eps2, s2 = residuals(pairwise)
    return AgreementReport(
        intersection_dim=len(three),
        empty=not three,
        counit_residual=eps3,
        antipode_residual=s3,
        left_right_dim=len(pairwise),
        left_right_counit_residual=eps2,
        left_right_antipode_residual=s2,
    )


@dataclass
class HopfReport:
    """Verdict record for a pair (A, phi)."""

    comult_defects: ComultDefects
    rank_left: int
    rank_right: int
    full_rank: int
    is_hopf: bool
    notes: tuple = ()
    kernel_left: list | None = None
    kernel_right: list | None = None
    left_domain_dim: int | None = None
    right_domain_dim: int | None = None
    two_sided_domain_dim: int | None = None
    left_domain_basis: list | None = None
    right_domain_basis: list | None = None
    two_sided_domain_basis: list | None = None
    counit_table: list | None = None
    antipode_table: list | None = None
    agreement_report: AgreementReport | None = None
    two_sided_closed: bool | None = None
    two_sided_closure_residual: float | None = None
    identity_residuals: dict | None = None


def _closure_residual(basis: list, tol: float) -> tuple[bool, float]:
    if not basis:
        return True, 0.0
    dim = basis[0].algebra.dim
    proj = _span_projector([e.vec() for e in basis], dim)
    worst = 0.0
    for x in basis:
        for y in basis:
            v = (x * y).vec()
            worst = max(worst, float(np.linalg.norm(v - proj @ v)))
    return worst <= tol, worst


def full_report(comult: Comultiplication, tol: float = DEFAULT_TOL) -> HopfReport:
    """Run the whole verification battery and assemble the verdict record."""
    report = is_hopf(comult, tol)
    if not report.is_hopf:
        return report
    left_basis, _ = domain_left(comult, tol)
    right_basis, _ = domain_right(comult, tol)
    ts = two_sided(comult, tol)
    agree = agreement(comult, tol)
    closed, closure_res = _closure_residual(ts.domain_basis, tol)

    basis = comult.algebra.basis()
    counit_table = [counit(comult, e, tol) for e in basis]
    antipode_table = [antipode(comult, e, tol) for e in basis]

    duals = Functional.dual_basis(comult.algebra)
    psi_res, slice_res, mult_res, anti_res, square_res = 0.0, 0.0, 0.0, 0.0, 0.0
    for i, e in enumerate(basis):
        x = left_witness(comult, e, tol)
        psi_res = max(psi_res, (split_coproduct(comult, x)
                                - place_legs(x, (0, 1), comult.triple.legs)).norm())
        square_res = max(square_res,
                         (antipode(comult, antipode_table[i].star(), tol).star() - e).norm())
        for omega in duals:
            slice_res = max(slice_res, slice_identities(comult, e, omega, tol).max_residual)
        for j, e2 in enumerate(basis):
            prod = e * e2
            mult_res = max(mult_res, abs(counit(comult, prod, tol)
                                         - counit_table[i] * counit_table[j]))
            anti_res = max(anti_res, (antipode(comult, prod, tol)
                                      - antipode_table[j] * antipode_table[i]).norm())

    two_res = 0.0
    for e in ts.domain_basis:
        for key, val in two_sided_identities(comult, e, tol=tol).items():
            two_res = max(two_res, val)

    report.left_domain_dim = len(left_basis)
    report.right_domain_dim = len(right_basis)
    report.two_sided_domain_dim = len(ts.domain_basis)
    report.left_domain_basis = left_basis
    report.right_domain_basis = right_basis
    report.two_sided_domain_basis = ts.domain_basis
    report.counit_table = counit_table
    report.antipode_table = antipode_table
    report.agreement_report = agree
    report.two_sided_closed = closed
    report.two_sided_closure_residual = closure_res
    report.identity_residuals = {
        "fundamental_identity": psi_res,
        "slice_identities": slice_res,
        "counit_multiplicative": mult_res,
        "antipode_antimultiplicative": anti_res,
        "antipode_star_square": square_res,
        "two_sided_formulas": two_res,
    }
    return report
