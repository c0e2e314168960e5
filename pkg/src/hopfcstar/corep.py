"""Unitary corepresentations and the domain elements their slices produce.

A corepresentation of a pair (A, phi) on C^k is a unitary u in A (x) M_k
with (phi (x) id)(u) = u_13 u_23.  Slicing the matrix leg with a
functional omega produces an element a = (id (x) omega)(u) of the left
and right counit/antipode domains, with

    eps(a) = omega(1)        S(a) = (id (x) omega)(u*)

and an explicit witness x = sum_i p_i (x) q_i built from the standard
orthonormal basis of C^k, which satisfies T_left(x) = a (x) 1 exactly.
Products of slices of two corepresentations lie in the two-sided domain,
certified by an explicit threefold witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .csalg import (
    AlgebraElement,
    CStarAlgebra,
    Functional,
    InvalidInputError,
    build_algebra,
    permute_legs,
    place_legs,
    same_space,
    slice_leg,
    tensor_algebra,
)
from .hopf import (
    Comultiplication,
    PreconditionError,
    antipode,
    counit,
    is_hopf,
    left_witness,
    right_counit_antipode,
    two_sided,
)

__all__ = [
    "Corepresentation",
    "CorepDefects",
    "SliceCertificate",
    "ProductCertificate",
    "check_corep",
    "corep_slice",
    "tensor_corep",
    "product_in_scriptA",
    "regular_corepresentation",
]


class Corepresentation:
    """A unitary u in A (x) M_k intertwining phi with the leg-split product."""

    def __init__(self, comult: Comultiplication, u: AlgebraElement):
        legs = u.algebra.legs
        if len(legs) != 2 or not same_space(legs[0], comult.algebra):
            raise InvalidInputError("corepresentation element must live in A (x) M_k")
        if len(legs[1].block_dims) != 1:
            raise InvalidInputError("the carrier leg must be a single full matrix block")
        self.comult = comult
        self.u = u
        self.space_dim = legs[1].block_dims[0]

    @property
    def algebra(self) -> CStarAlgebra:
        return self.comult.algebra

    @property
    def matrix_algebra(self) -> CStarAlgebra:
        return self.u.algebra.legs[1]

    def __repr__(self):
        return "Corepresentation(%s, k=%d)" % (self.algebra.label, self.space_dim)


@dataclass(frozen=True)
class CorepDefects:
    unitary_left: float   # ||u* u - 1||
    unitary_right: float  # ||u u* - 1||
    law: float            # ||(phi (x) id)(u) - u_13 u_23||

    @property
    def max_defect(self) -> float:
        return max(self.unitary_left, self.unitary_right, self.law)

    def passed(self, tol: float = DEFAULT_TOL) -> bool:
        return self.max_defect <= tol


def check_corep(corep: Corepresentation) -> CorepDefects:
    u = corep.u
    one = u.algebra.unit()
    mk = corep.matrix_algebra
    triple_legs = (corep.algebra, corep.algebra, mk)
    d = corep.algebra.dim
    lifted = np.kron(corep.comult.operator.matrix, np.eye(mk.dim)) @ u.vec()
    from .csalg import _fold  # shared fold cache keeps leg algebras identical

    law_lhs = _fold(triple_legs).from_vec(lifted)
    u13 = place_legs(u, (0, 2), triple_legs)
    u23 = place_legs(u, (1, 2), triple_legs)
    return CorepDefects(
        (u.star() * u - one).norm(),
        (u * u.star() - one).norm(),
        (law_lhs - u13 * u23).norm(),
    )


def _require_corep(corep: Corepresentation, tol: float):
    defects = check_corep(corep)
    if not defects.passed(tol):
        raise PreconditionError("corepresentation checks fail (max defect %.3e)" % defects.max_defect)
    if not is_hopf(corep.comult, tol).is_hopf:
        raise PreconditionError("the underlying pair is not Hopf")


def _vector_slice(u: AlgebraElement, xi: np.ndarray, eta: np.ndarray) -> AlgebraElement:
    """(id (x) omega_{xi,eta})(u) for the vector functional <. xi, eta>."""
    algebra = u.algebra.legs[0]
    k = u.algebra.legs[1].block_dims[0]
    coeff = u.coords_tensor().reshape(algebra.dim, k * k)
    return algebra.from_vec(coeff @ np.kron(np.conj(eta), xi))


def _vector_witness(corep: Corepresentation, xi: np.ndarray, eta: np.ndarray) -> AlgebraElement:
    """Left witness sum_i p_i (x) q_i over the standard basis of C^k."""
    k = corep.space_dim
    ustar = corep.u.star()
    basis = np.eye(k)
    pair = corep.comult.pair
    v = np.zeros(pair.dim, dtype=np.complex128)
    for i in range(k):
        p = _vector_slice(corep.u, basis[i], eta)
        q = _vector_slice(ustar, xi, basis[i])
        v += np.kron(p.vec(), q.vec())
    return pair.from_vec(v)


def _density_pairs(omega: Functional):
    """Decompose omega = sum_t s_t omega_{v_t, u_t} via the density's SVD."""
    rho = omega.density.blocks[0]
    u, s, vh = np.linalg.svd(rho)
    if s.size == 0 or s[0] == 0.0:
        return []
    cut = rho.shape[0] * s[0] * 1e-13
    return [(s[t], vh[t].conj(), u[:, t]) for t in range(s.size) if s[t] > cut]


@dataclass
class SliceCertificate:
    element: AlgebraElement
    witness: AlgebraElement
    counit_value: complex
    antipode_value: AlgebraElement
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def corep_slice(corep: Corepresentation, omega: Functional,
                tol: float = DEFAULT_TOL) -> SliceCertificate:
    """Slice a = (id (x) omega)(u) with its witness and all derived identities."""
    _require_corep(corep, tol)
    if not same_space(omega.algebra, corep.matrix_algebra):
        raise InvalidInputError("functional must live on the carrier matrix algebra")
    comult = corep.comult
    a = slice_leg(corep.u, 1, omega)

    witness = comult.pair.zero()
    for weight, xi, eta in _density_pairs(omega):
        witness = witness + weight * _vector_witness(corep, xi, eta)

    target = place_legs(a, (0,), comult.pair.legs)
    res = {}
    res["witness_identity"] = (comult.galois.left(witness) - target).norm()
    res["domain"] = (comult.galois.left(left_witness(comult, a, tol)) - target).norm()

    eps_a = counit(comult, a, tol)
    s_a = antipode(comult, a, tol)
    res["counit"] = abs(eps_a - omega(corep.matrix_algebra.unit()))
    res["antipode"] = (s_a - slice_leg(corep.u.star(), 1, omega)).norm()

    eps_r, s_r = right_counit_antipode(comult, a, tol)
    res["right_counit"] = abs(eps_a - eps_r)
    res["right_antipode"] = (s_a - s_r).norm()
    return SliceCertificate(a, witness, eps_a, s_a, res)


def tensor_corep(left: Corepresentation, right: Corepresentation,
                 tol: float = DEFAULT_TOL) -> Corepresentation:
    """Product corepresentation w = u_12 v_13 on C^k (x) C^l, i.e. on M_{k l}.

    Slices multiply: (id (x) omega1 (x) omega2)(w) is the product of the
    individual slices.
    """
    if left.comult is not right.comult and not same_space(left.algebra, right.algebra):
        raise InvalidInputError("corepresentations must share the underlying pair")
    legs = (left.algebra, left.matrix_algebra, right.matrix_algebra)
    u12 = place_legs(left.u, (0, 1), legs)
    v13 = place_legs(right.u, (0, 2), legs)
    w = u12 * v13
    target = tensor_algebra(left.algebra, build_algebra([left.space_dim * right.space_dim]))
    if target.block_dims != w.algebra.block_dims:
        raise InvalidInputError("carrier dimensions do not multiply consistently")
    return Corepresentation(left.comult, target.element(w.blocks))


def product_functional(omega1: Functional, omega2: Functional) -> Functional:
    """omega1 (x) omega2 on M_{k l}, with density kron(rho1, rho2)."""
    k = omega1.algebra.block_dims[0]
    l = omega2.algebra.block_dims[0]
    target = build_algebra([k * l])
    rho = np.kron(omega1.density.blocks[0], omega2.density.blocks[0])
    return Functional(target, target.element([rho]))


@dataclass
class ProductCertificate:
    left_slice: AlgebraElement
    right_slice: AlgebraElement
    product: AlgebraElement
    witness: AlgebraElement
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _triple_witness_vectors(u_corep: Corepresentation, w_corep: Corepresentation,
                            xi, eta, xi2, eta2) -> np.ndarray:
    """Coordinates of the threefold witness for a = slice(u), b = slice(w)."""
    ku, kw = u_corep.space_dim, w_corep.space_dim
    u, w = u_corep.u, w_corep.u
    ustar, wstar = u.star(), w.star()
    eu, ew = np.eye(ku), np.eye(kw)
    d = u_corep.algebra.dim

    # slices of w through its flip v = sigma(w): (omega (x) id)(v) = (id (x) omega)(w)
    p2 = [_vector_slice(wstar, ew[k], eta2) for k in range(kw)]
    q2 = [[_vector_slice(w, ew[l], ew[k]) for l in range(kw)] for k in range(kw)]
    r2 = [_vector_slice(wstar, xi2, ew[l]) for l in range(kw)]
    p1 = [_vector_slice(ustar, eu[i], eta) for i in range(ku)]
    q1 = [[_vector_slice(u, eu[j], eu[i]) for j in range(ku)] for i in range(ku)]
    r1 = [_vector_slice(ustar, xi, eu[j]) for j in range(ku)]

    left = np.stack([[(p2[k] * p1[i]).vec() for i in range(ku)] for k in range(kw)])
    mid = np.stack([[[[(q1[i][j] * q2[k][l]).vec() for l in range(kw)]
                      for k in range(kw)] for j in range(ku)] for i in range(ku)])
    rightv = np.stack([[(r2[l] * r1[j]).vec() for j in range(ku)] for l in range(kw)])
    return np.einsum("kiI,ijklJ,ljK->IJK", left, mid, rightv).reshape(d ** 3)


def product_in_scriptA(u_corep: Corepresentation, w_corep: Corepresentation,
                       omega1: Functional, omega2: Functional,
                       tol: float = DEFAULT_TOL) -> ProductCertificate:
    """Certify that slices of two corepresentations multiply into the
    two-sided domain, by exhibiting a threefold witness x with
    T(c (x) 1 (x) 1) x (1 (x) 1 (x) d)) = c (x) ab (x) d for basis c, d."""
    for corep in (u_corep, w_corep):
        defects = check_corep(corep)
        if defects.max_defect > tol:
            raise PreconditionError("corepresentation is not fully unitary")
    _require_corep(u_corep, tol)
    comult = u_corep.comult

    a = slice_leg(u_corep.u, 1, omega1)
    b = slice_leg(w_corep.u, 1, omega2)
    ab = a * b

    triple = comult.triple
    coords = np.zeros(triple.dim, dtype=np.complex128)
    for s1, xi, eta in _density_pairs(omega1):
        for s2, xi2, eta2 in _density_pairs(omega2):
            coords += s1 * s2 * _triple_witness_vectors(u_corep, w_corep, xi, eta, xi2, eta2)
    witness = triple.from_vec(coords)

    t = comult.triple_galois
    res = {}
    unit_goal = place_legs(ab, (1,), triple.legs)
    res["witness_identity"] = (t(witness) - unit_goal).norm()

    worst = 0.0
    basis = comult.algebra.basis()
    for c in basis:
        for dd in basis:
            shifted = place_legs(c, (0,), triple.legs) * witness * place_legs(dd, (2,), triple.legs)
            goal = triple.from_vec(np.kron(np.kron(c.vec(), ab.vec()), dd.vec()))
            worst = max(worst, (t(shifted) - goal).norm())
    res["membership"] = worst

    ts = two_sided(comult, tol)
    span = np.column_stack([e.vec() for e in ts.domain_basis]) if ts.domain_basis else None
    if span is None:
        res["two_sided_span"] = float(np.linalg.norm(ab.vec()))
    else:
        q, _ = np.linalg.qr(span)
        v = ab.vec()
        res["two_sided_span"] = float(np.linalg.norm(v - q @ (q.conj().T @ v)))
    return ProductCertificate(a, b, ab, witness, res)


def regular_corepresentation(group, pair=None) -> Corepresentation:
    """u = sum_p lambda_p (x) e_pp for a group algebra pair (built if absent)."""
    from .groups import group_algebra

    if pair is None:
        algebra, comult = group_algebra(group)
    else:
        algebra, comult = pair
    n = group.order
    carrier = build_algebra([n])
    total = tensor_algebra(algebra, carrier)
    v = np.zeros(total.dim, dtype=np.complex128)
    for p in range(n):
        diag = np.zeros(n * n)
        diag[p * n + p] = 1.0
        lam = np.zeros(n)
        lam[p] = 1.0
        v += np.kron(lam, diag)
    return Corepresentation(comult, total.from_vec(v))
