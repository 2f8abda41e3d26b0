"""Conjugating quasi-tori in the torus normalizer into the standard torus.

Conventions: the operator matrix M of a linear ContAut has column j equal
to the coordinates of psi(x_j).  If P has joint eigenvectors as columns
then psi = P^-1 conjugates each generator g to P^-1 G P, which is diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from . import linalg
from .autgrp import (
    ContAut,
    conjugate,
    flag_layers,
    flag_levels,
    in_aut_group,
    is_admissible,
    is_monomial,
    k_shape_data,
    normalizes_torus,
    pairing,
    respects_flag,
    symplectic_multiplier,
)
from .dpa import DpaElement, Shape
from .errors import (
    FormMultiplierMismatch,
    NonCommuting,
    NotInAutGroup,
    NotInNormalizer,
    NotMonomial,
    NotSymplectic,
    WrongShape,
)
from .field import FieldCtx, degree_for_orders, get_field, root_of_unity
from .forms import omega, omega_H_on, pullback
from .grading import (
    FgAbelianGroup,
    Grading,
    GroupHom,
    QuasiTorusRep,
    grading_from_quasitorus,
    gradings_isomorphic,
    lift_aut,
    standard_grading,
)
from .liealg import AlgebraKind, build_algebra, prime, sigma


@dataclass
class SymplecticBasis:
    ctx: FieldCtx
    r: int
    vectors: list
    characters: list

    def gram(self):
        return [[pairing(self.ctx, self.r, u, v) for v in self.vectors] for u in self.vectors]


@dataclass
class ConjugationResult:
    conjugator: ContAut
    images: list
    kind: object
    alphas: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)
    original: Grading | None = None

    @property
    def shape(self) -> Shape:
        return self.conjugator.shape


# -- helpers --------------------------------------------------------------------

def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def _roots_dividing(ctx: FieldCtx, e: int) -> list:
    z = root_of_unity(ctx, e)
    return [ctx.pow(z, j) for j in range(e)]


def working_field(ctx: FieldCtx, orders) -> FieldCtx:
    """Smallest extension of ctx holding every root of unity the eigenvalues need."""
    k = degree_for_orders(ctx.p, [_lcm(orders)])
    k = ctx.k * k // gcd(ctx.k, k)
    return ctx if k == ctx.k else get_field(ctx.p, k)


def symplectic_field(gens, orders, restrict: bool = False) -> FieldCtx:
    """Working field for H/K: eigenvalues plus square roots of the form multipliers."""
    ctx = working_field(gens[0].shape.ctx, orders)
    for g in _lift_gens(gens, ctx):
        M = g.operator_matrix()
        if restrict:
            M = [row[:-1] for row in M[:-1]]
        c = symplectic_multiplier(ctx, M)
        if c is not None and ctx.sqrt(c) is None:
            return get_field(ctx.p, 2 * ctx.k)
    return ctx


def _lift_gens(gens, ctx: FieldCtx):
    if gens[0].shape.ctx == ctx:
        return list(gens)
    return [lift_aut(g, ctx) for g in gens]


def _check_commuting(gens) -> None:
    for i, g in enumerate(gens):
        for h in gens[i + 1:]:
            if linalg.matmul(g.shape.ctx, g.operator_matrix(), h.operator_matrix()) != \
                    linalg.matmul(h.shape.ctx, h.operator_matrix(), g.operator_matrix()):
                raise NonCommuting(f"{g} and {h} do not commute")


def _matrix_order(ctx: FieldCtx, A, cap: int = 100000) -> int:
    n = len(A)
    one = linalg.identity(n)
    acc = A
    for e in range(1, cap + 1):
        if acc == one:
            return e
        acc = linalg.matmul(ctx, acc, A)
    raise ValueError("matrix order exceeds cap")


def flag_eigenbasis(ctx: FieldCtx, mats, n):
    """Joint eigenvectors y_j of commuting semisimple mats, with span{y_j : j in Xi_i} = V_i.

    Each flag level extends the eigenbasis of the previous one inside every
    joint eigenspace.  Returns ({j: vector}, {j: eigenvalue tuple}).
    """
    dim = len(n)
    cands = [_roots_dividing(ctx, _matrix_order(ctx, A)) for A in mats]
    vecs, chars, have = {}, {}, {}
    for layer, level in zip(flag_layers(n), flag_levels(n)):
        sub = [[1 if i == j else 0 for i in range(dim)] for j in sorted(level)]
        fresh = []
        for lam, basis in sorted(linalg.joint_eigenspaces(ctx, mats, cands, sub).items()):
            ech = have.setdefault(lam, linalg.Echelon(ctx))
            for v in basis:
                if ech.add(_sparse(v)):
                    fresh.append((lam, v))
        if len(fresh) != len(layer):
            raise ValueError("flag layer is not spanned by joint eigenvectors")
        # leading coefficient 1; a coordinate eigenvector keeps its own slot,
        # so an already diagonal action gives the standard basis back
        fresh = [(lam, _monic(ctx, v)) for lam, v in fresh]
        slots = list(layer)
        placed, used = {}, set()
        for idx, (lam, v) in enumerate(fresh):
            support = [i for i, c in enumerate(v) if c]
            if len(support) == 1 and support[0] in slots and support[0] not in placed:
                placed[support[0]] = fresh[idx]
                used.add(idx)
        rest = [fv for idx, fv in enumerate(fresh) if idx not in used]
        for j in slots:
            if j not in placed:
                placed[j] = rest.pop(0)
        for j, (lam, v) in placed.items():
            vecs[j] = v
            chars[j] = lam
    return vecs, chars


def _monic(ctx: FieldCtx, v):
    lead = next(c for c in v if c)
    inv = ctx.inv(lead)
    return [ctx.mul(inv, c) for c in v]


def _sparse(v) -> dict:
    return {i: c for i, c in enumerate(v) if c}


def _conjugation(gens, P, kind) -> ConjugationResult:
    shape = gens[0].shape
    ctx = shape.ctx
    psi = ContAut.from_operator(shape, linalg.inverse(ctx, P))
    images = [conjugate(psi, g) for g in gens]
    for g in images:
        if not g.is_diagonal():
            raise AssertionError(f"conjugated generator {g} is not diagonal")
    return ConjugationResult(psi, images, kind)


# -- W and S --------------------------------------------------------------------

def diagonalize_WS(Q: QuasiTorusRep, require_monomial: bool = True) -> ConjugationResult:
    """Block-diagonal change of basis along the flag layers."""
    gens = Q.gens
    for g in gens:
        if not g.is_linear():
            raise NotMonomial(f"{g} is not linear")
        if require_monomial and not is_monomial(g):
            raise NotMonomial(f"{g} is not a flag-respecting monomial automorphism")
        if not respects_flag(g.operator_matrix(), g.shape.n):
            raise NotMonomial(f"{g} does not respect the flag")
    ctx = working_field(Q.shape.ctx, Q.orders)
    gens = _lift_gens(gens, ctx)
    _check_commuting(gens)
    n = gens[0].shape.n
    vecs, _ = flag_eigenbasis(ctx, [g.operator_matrix() for g in gens], n)
    P = linalg.transpose([vecs[j] for j in range(len(n))])
    return _conjugation(gens, P, Q.kind)


# -- symplectic -----------------------------------------------------------------

def _axpy_list(ctx, terms):
    """sum of c * v over (c, v) pairs, dense."""
    out = None
    for c, v in terms:
        if not c:
            continue
        if out is None:
            out = [ctx.mul(c, x) for x in v]
        else:
            out = [ctx.add(x, ctx.mul(c, y)) for x, y in zip(out, v)]
    return out if out is not None else [0] * len(terms[0][1])


def z_update(ctx: FieldCtx, r: int, ys, yt, yj):
    """z_j = <y_s,y_t> y_j - <y_s,y_j> y_t + <y_t,y_j> y_s, orthogonal to y_s and y_t."""
    st = pairing(ctx, r, ys, yt)
    sj = pairing(ctx, r, ys, yj)
    tj = pairing(ctx, r, yt, yj)
    return _axpy_list(ctx, [(st, yj), (ctx.neg(sj), yt), (tj, ys)])


def symplectic_eigenbasis(ctx: FieldCtx, mats, n) -> SymplecticBasis:
    """Joint eigenvectors e_j with <e_j, e_k> = sigma(j) delta_{j,k'} respecting the flag.

    mats are the operator matrices of commuting symplectic semisimple maps
    on V = span(x_1..x_2r); n gives the flag on V.
    """
    dim = len(n)
    r = dim // 2
    if dim % 2:
        raise NotSymplectic("odd dimensional space")
    for A in mats:
        if symplectic_multiplier(ctx, A) != 1:
            raise NotSymplectic("generator does not preserve the pairing")
    layer_of = {}
    for idx, lay in enumerate(flag_layers(n)):
        for j in lay:
            layer_of[j] = idx
    w, chars = flag_eigenbasis(ctx, mats, n)
    final: dict = {}
    final_chars: dict = {}
    J = set(range(dim))
    while J:
        i0 = min(layer_of[j] for j in J)
        ones = sorted(j for j in J if layer_of[j] == i0)
        best = None
        for s in ones:
            for t in sorted(J):
                if pairing(ctx, r, w[s], w[t]):
                    key = (layer_of[t], s, t)
                    if best is None or key < best:
                        best = key
        if best is None:
            raise AssertionError("degenerate pairing on the remaining subspace")
        l, s, t = best
        for gs, gt in zip(chars[s], chars[t]):
            if ctx.mul(gs, gt) != 1:
                raise AssertionError("paired eigenvalues are not inverse")
        choices = [q for q in sorted(J) if layer_of[q] == i0 and prime(q, r) in J
                   and layer_of[prime(q, r)] == l]
        if not choices:
            raise AssertionError("no label pair available at the pivot levels")
        q = choices[0]
        qp = prime(q, r)
        rest_idx = sorted(j for j in J if j not in (s, t))
        zs = {j: z_update(ctx, r, w[s], w[t], w[j]) for j in rest_idx}
        rest_labels = sorted(j for j in J if j not in (q, qp))
        new_w, new_chars = {}, {}
        for lay in sorted({layer_of[j] for j in rest_idx}):
            src = [j for j in rest_idx if layer_of[j] == lay]
            dst = [j for j in rest_labels if layer_of[j] == lay]
            assert len(src) == len(dst)
            for a, b in zip(src, dst):
                new_w[b] = zs[a]
                new_chars[b] = chars[a]
        final[q], final[qp] = w[s], w[t]
        final_chars[q], final_chars[qp] = chars[s], chars[t]
        w, chars = new_w, new_chars
        J = set(rest_labels)
    vectors, characters = [], []
    for j in range(dim):
        if j < r:
            c = ctx.div(sigma(j, r) % ctx.p, pairing(ctx, r, final[j], final[prime(j, r)]))
            vectors.append([ctx.mul(c, x) for x in final[j]])
        else:
            vectors.append(final[j])
        characters.append(final_chars[j])
    return SymplecticBasis(ctx, r, vectors, characters)


def check_symplectic_basis(basis: SymplecticBasis, mats, n) -> list:
    """Violations of the three basis invariants (empty when all hold)."""
    ctx, r = basis.ctx, basis.r
    errs = []
    dim = 2 * r
    for j in range(dim):
        for k in range(dim):
            want = (sigma(j, r) % ctx.p) if k == prime(j, r) else 0
            if pairing(ctx, r, basis.vectors[j], basis.vectors[k]) != want:
                errs.append(f"pairing <e{j + 1}, e{k + 1}>")
    for j, v in enumerate(basis.vectors):
        for A, lam in zip(mats, basis.characters[j]):
            if linalg.matvec(ctx, A, v) != [ctx.mul(lam, x) for x in v]:
                errs.append(f"e{j + 1} is not an eigenvector")
    for lev in flag_levels(n):
        span = linalg.Echelon(ctx, [_sparse(basis.vectors[j]) for j in lev])
        coord = linalg.Echelon(ctx, [{j: 1} for j in lev])
        if span.rank != len(lev) or span.canonical() != coord.canonical():
            errs.append(f"flag level {sorted(lev)} not spanned")
    return errs


def _factor_scalar(ctx, M):
    """alpha with M = alpha * S, S symplectic; alpha the least-dlog root of the multiplier."""
    c = symplectic_multiplier(ctx, M)
    if c is None:
        raise NotInAutGroup("generator does not scale the symplectic form")
    alpha = ctx.sqrt(c)
    if alpha is None:
        raise AssertionError("working field lacks a square root of the multiplier")
    ainv = ctx.inv(alpha)
    return alpha, [[ctx.mul(ainv, x) for x in row] for row in M]


def _symplectic_conjugator(gens, kind):
    """P with symplectic eigenvector columns, plus the alpha choices."""
    shape = gens[0].shape
    ctx = shape.ctx
    alphas, mats = [], []
    for g in gens:
        a, S = _factor_scalar(ctx, g.operator_matrix())
        alphas.append(a)
        mats.append(S)
    basis = symplectic_eigenbasis(ctx, mats, shape.n)
    return linalg.transpose(basis.vectors), alphas


def diagonalize_H(Q: QuasiTorusRep) -> ConjugationResult:
    gens = Q.gens
    for g in gens:
        if not normalizes_torus(g, "H"):
            raise NotInNormalizer(f"{g} does not normalize the torus")
        if not is_monomial(g):
            raise NotMonomial(f"{g} is not monomial")
        if not in_aut_group(g, "H"):
            raise NotInAutGroup(f"{g} does not scale omega_H")
    ctx = symplectic_field(gens, Q.orders)
    gens = _lift_gens(gens, ctx)
    _check_commuting(gens)
    P, alphas = _symplectic_conjugator(gens, Q.kind)
    res = _conjugation(gens, P, Q.kind)
    res.alphas = alphas
    om = omega("H", res.shape)
    if pullback(res.conjugator, om) != om:
        raise AssertionError("conjugator does not fix omega_H")
    return res


# -- K --------------------------------------------------------------------------

def _pad(f: DpaElement, shape: Shape) -> DpaElement:
    return DpaElement._raw(shape, {a + (0,) * (shape.m - len(a)): c for a, c in f.terms.items()})


def extend_to_contact(psi: ContAut, alpha, shape: Shape) -> ContAut:
    """psi on the first 2r variables, x_m -> alpha x_m; checks psi(omega_K) = alpha omega_K."""
    m = shape.m
    if psi.shape.m != m - 1 or m % 2 == 0:
        raise WrongShape("extension needs 2r variables into 2r+1")
    ctx = shape.ctx
    alpha = ctx.coerce(alpha)
    small_om = omega_H_on(psi.shape, m // 2)
    if pullback(psi, small_om) != small_om.scale(alpha):
        raise FormMultiplierMismatch("psi does not scale omega_H by alpha")
    images = [_pad(y, shape) for y in psi.images] + [DpaElement.var(shape, m - 1, alpha)]
    out = ContAut(shape, images)
    om = omega("K", shape)
    if pullback(out, om) != om.scale(alpha):
        raise FormMultiplierMismatch("extension does not scale omega_K by alpha")
    return out


def restrict_to_symplectic(g: ContAut) -> ContAut:
    shape = g.shape
    small = shape.restrict(shape.m - 1)
    images = []
    for y in g.images[:-1]:
        images.append(DpaElement._raw(small, {a[:-1]: c for a, c in y.terms.items()}))
    return ContAut(small, images)


def diagonalize_K(Q: QuasiTorusRep) -> ConjugationResult:
    gens = Q.gens
    for g in gens:
        if k_shape_data(g) is None:
            raise WrongShape(f"{g} is not of the contact normalizer shape")
    ctx = symplectic_field(gens, Q.orders, restrict=True)
    gens = _lift_gens(gens, ctx)
    shape = gens[0].shape
    small = [restrict_to_symplectic(g) for g in gens]
    for g, h in zip(gens, small):
        _, _, alpha_m, _ = k_shape_data(g)
        om = omega_H_on(h.shape, shape.m // 2)
        if pullback(h, om) != om.scale(alpha_m):
            raise NotInAutGroup(f"{g} restricted does not scale omega_H by alpha_m")
    _check_commuting(small)
    P, alphas = _symplectic_conjugator(small, Q.kind)
    psi_small = ContAut.from_operator(small[0].shape, linalg.inverse(ctx, P))
    psi = extend_to_contact(psi_small, 1, shape)
    images = [conjugate(psi, g) for g in gens]
    for g in images:
        perm, coeffs, alpha_m, betas = k_shape_data(g)
        if any(betas):
            raise AssertionError("residual beta terms after conjugation")
        if not g.is_diagonal():
            raise AssertionError(f"conjugated generator {g} is not diagonal")
    return ConjugationResult(psi, images, Q.kind, alphas)


# -- pipeline -------------------------------------------------------------------

def _family(kind) -> str:
    return kind.family if isinstance(kind, AlgebraKind) else str(kind)[0]


def diagonalize(Q: QuasiTorusRep, require_monomial: bool = True) -> ConjugationResult:
    fam = _family(Q.kind)
    if fam in ("W", "S"):
        return diagonalize_WS(Q, require_monomial)
    if fam == "H":
        return diagonalize_H(Q)
    return diagonalize_K(Q)


def torus_hom(images, orders, ctx: FieldCtx, group: FgAbelianGroup) -> GroupHom:
    """Hom Z^m -> prod Z/e_l read off the diagonal images: t_j = zeta_l^{hom(eps_j)_l}."""
    m = images[0].shape.m
    cols = []
    for g, e in zip(images, orders):
        if e == 1:
            continue
        zlog = ctx.dlog(root_of_unity(ctx, e))
        t = g.diagonal_entries()
        cols.append([(ctx.dlog(c) // zlog) % e for c in t])
    return GroupHom(group, tuple(tuple(col[j] for col in cols) for j in range(m)))


def standardize(Q: QuasiTorusRep, require_monomial: bool = True):
    """Conjugate Q into the torus and return (result, standard grading).

    Certificates: the conjugated quasi-torus is diagonal and admissible,
    its eigenspace grading equals a standard grading, and the conjugator
    carries the original grading onto it.
    """
    fam = _family(Q.kind)
    if require_monomial:
        for g in Q.gens:
            if fam == "K":
                ok = k_shape_data(g) is not None and normalizes_torus(g, "K")
            else:
                ok = normalizes_torus(g, fam)
            if not ok:
                raise NotInNormalizer(f"{g} does not normalize the torus")
    res = diagonalize(Q, require_monomial)
    shape = res.shape
    ctx = shape.ctx
    alg = build_algebra(Q.kind, shape)
    gens = _lift_gens(Q.gens, ctx)
    original_Q = QuasiTorusRep(gens, Q.kind, check=False, orders=Q.orders)
    conj_Q = QuasiTorusRep(res.images, Q.kind, check=False, orders=Q.orders)
    original = grading_from_quasitorus(original_Q, alg)
    diag_gr = grading_from_quasitorus(conj_Q, alg)
    hom = torus_hom(res.images, Q.orders, ctx, diag_gr.group)
    std = standard_grading(alg, diag_gr.group, hom)
    certs = {
        "in_aut_group": in_aut_group(res.conjugator, Q.kind),
        "in_torus": all(g.is_diagonal() and is_admissible(ctx, g.diagonal_entries(), Q.kind)
                        for g in res.images),
        "standard": diag_gr.same_as(std),
        "isomorphic": gradings_isomorphic(original, std, res.conjugator),
    }
    res.certificates.update(certs)
    if not all(certs.values()):
        failed = [k for k, v in certs.items() if not v]
        raise AssertionError(f"standardization certificates failed: {failed}")
    res.original = original
    return res, std
