"""Continuous automorphisms of O(m; n), their action on W, tori and normalizers.

A ContAut is the tuple (y_1, ..., y_m) of images of the generators; it acts by
x^(a) -> prod_i y_i^(a_i).  Linear automorphisms are described either by the
substitution matrix A (y_i = sum_j A[i][j] x_j) or by the operator matrix
M = A^T on V = span(x_1, ..., x_m); M composes like the automorphisms do.
"""

from __future__ import annotations

from functools import reduce

from . import linalg
from .dpa import DpaElement, Shape, divided_powers, monomials, multiply, partial
from .errors import (
    ExcludedConfiguration,
    InvalidAutomorphism,
    KindConstraintViolation,
    NotSemisimple,
    ShapeMismatch,
)
from .liealg import AlgebraKind, Derivation, char_label, multidegree, prime
from .linalg import vaxpy


class ContAut:
    __slots__ = ("shape", "images", "_dp", "_mono", "_inverse", "_witt", "_dw")

    def __init__(self, shape: Shape, images):
        images = tuple(images)
        if len(images) != shape.m or any(y.shape != shape for y in images):
            raise ShapeMismatch("need m images in the same shape")
        self.shape = shape
        self.images = images
        self._dp = None
        self._mono = {}
        self._inverse = None
        self._witt = {}
        self._dw = {}

    # -- constructors --
    @classmethod
    def identity(cls, shape):
        return cls(shape, [DpaElement.var(shape, i) for i in range(shape.m)])

    @classmethod
    def diagonal(cls, shape, t):
        """lambda(t): x_i -> t_i x_i."""
        return cls(shape, [DpaElement.var(shape, i, c) for i, c in enumerate(t)])

    @classmethod
    def linear(cls, shape, A):
        """y_i = sum_j A[i][j] x_j."""
        out = []
        for row in A:
            out.append(DpaElement(shape, {shape.eps(j): c for j, c in enumerate(row) if c}))
        return cls(shape, out)

    @classmethod
    def from_operator(cls, shape, M):
        return cls.linear(shape, linalg.transpose(M))

    @classmethod
    def monomial(cls, shape, perm, coeffs):
        """x_i -> coeffs[i] * x_{perm[i]}."""
        return cls(shape, [DpaElement.var(shape, perm[i], coeffs[i]) for i in range(shape.m)])

    # -- equality --
    def __eq__(self, other):
        return isinstance(other, ContAut) and self.shape == other.shape and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return "ContAut(" + ", ".join(f"x{i + 1}->{y.to_text()}" for i, y in enumerate(self.images)) + ")"

    # -- structure --
    def linear_part(self):
        """Substitution matrix of the degree-one part."""
        m = self.shape.m
        return [[y.coeff(self.shape.eps(j)) for j in range(m)] for y in self.images]

    def operator_matrix(self):
        return linalg.transpose(self.linear_part())

    def is_linear(self) -> bool:
        return all(sum(a) == 1 for y in self.images for a in y.terms)

    def is_diagonal(self) -> bool:
        return all(set(y.terms) <= {self.shape.eps(i)} for i, y in enumerate(self.images))

    def diagonal_entries(self):
        return tuple(y.coeff(self.shape.eps(i)) for i, y in enumerate(self.images))

    def validity_errors(self) -> list[str]:
        """Violations of membership in A(m; n)."""
        shape = self.shape
        ctx, p, n = shape.ctx, shape.p, shape.n
        errs = []
        for i, y in enumerate(self.images):
            if y.constant_term():
                errs.append(f"y{i + 1} has a constant term")
            for a in y.terms:
                nz = [j for j, x in enumerate(a) if x]
                if len(nz) != 1:
                    continue
                j = nz[0]
                l, v = 0, a[j]
                while v % p == 0:
                    v //= p
                    l += 1
                if v == 1 and n[i] + l > n[j]:
                    errs.append(f"y{i + 1} has x^({p}^{l} e{j + 1}) term but n{i + 1}+{l} > n{j + 1}")
        if linalg.det(ctx, self.linear_part()) == 0:
            errs.append("Jacobian is not invertible")
        return errs

    def is_valid(self) -> bool:
        return not self.validity_errors()

    def check(self) -> "ContAut":
        errs = self.validity_errors()
        if errs:
            raise InvalidAutomorphism("; ".join(errs))
        return self

    # -- action on O(m; n) --
    def _divided_powers(self):
        if self._dp is None:
            self._dp = [divided_powers(y, t) for y, t in zip(self.images, self.shape.tau)]
        return self._dp

    def act_monomial(self, a) -> DpaElement:
        a = tuple(a)
        hit = self._mono.get(a)
        if hit is not None:
            return hit
        nz = [j for j, x in enumerate(a) if x]
        if not nz:
            res = DpaElement.one(self.shape)
        else:
            j = nz[-1]
            dp = self._divided_powers()[j][a[j]]
            rest = nz[:-1]
            if not rest:
                res = dp
            else:
                head = self.act_monomial(a[:j] + (0,) * (len(a) - j))
                res = multiply(head, dp)
        self._mono[a] = res
        return res

    def act(self, f: DpaElement) -> DpaElement:
        if f.shape != self.shape:
            raise ShapeMismatch(f"{f.shape} vs {self.shape}")
        ctx = self.shape.ctx
        out: dict = {}
        for a, c in f.terms.items():
            vaxpy(ctx, out, self.act_monomial(a).terms, c)
        return DpaElement._raw(self.shape, out)

    __call__ = act

    # -- group structure --
    def compose(self, other: "ContAut") -> "ContAut":
        """(self o other)(x_i) = self(other(x_i))."""
        return compose(self, other)

    def inverse(self) -> "ContAut":
        if self._inverse is None:
            self._inverse = invert(self)
            self._inverse._inverse = self
        return self._inverse

    def power(self, e: int) -> "ContAut":
        if e < 0:
            return self.inverse().power(-e)
        out = ContAut.identity(self.shape)
        base = self
        while e:
            if e & 1:
                out = compose(out, base)
            base = compose(base, base)
            e >>= 1
        return out

    def order(self, cap: int = 100000) -> int:
        if self.is_linear():
            ctx = self.shape.ctx
            M = self.operator_matrix()
            one = linalg.identity(self.shape.m)
            acc, n = M, 1
            while acc != one:
                acc = linalg.matmul(ctx, acc, M)
                n += 1
                if n > cap:
                    raise NotSemisimple(f"order exceeds {cap}")
            return n
        ident = ContAut.identity(self.shape)
        g = self
        n = 1
        while g != ident:
            g = compose(g, self)
            n += 1
            if n > cap:
                raise NotSemisimple(f"order exceeds {cap}")
        return n


def compose(psi: ContAut, phi: ContAut) -> ContAut:
    if psi.shape != phi.shape:
        raise ShapeMismatch(f"{psi.shape} vs {phi.shape}")
    if psi.is_linear() and phi.is_linear():
        M = linalg.matmul(psi.shape.ctx, psi.operator_matrix(), phi.operator_matrix())
        return ContAut.from_operator(psi.shape, M)
    return ContAut(psi.shape, [psi.act(y) for y in phi.images])


def conjugate(psi: ContAut, g: ContAut) -> ContAut:
    """psi g psi^-1."""
    return compose(compose(psi, g), psi.inverse())


def invert(psi: ContAut) -> ContAut:
    """Solve psi(w_i) = x_i degree by degree; the augmentation ideal is nilpotent."""
    shape = psi.shape
    ctx = shape.ctx
    A = psi.linear_part()
    try:
        B = linalg.inverse(ctx, A)
    except ZeroDivisionError:
        raise InvalidAutomorphism("linear part is singular") from None
    lin_inv = ContAut.linear(shape, B)
    if psi.is_linear():
        return lin_inv
    w = list(lin_inv.images)
    xs = [DpaElement.var(shape, i) for i in range(shape.m)]
    for _ in range(sum(shape.tau) + 2):
        errs = [x - psi.act(wi) for x, wi in zip(xs, w)]
        degs = [e.min_degree() for e in errs if e]
        if not degs:
            return ContAut(shape, w)
        d = min(degs)
        w = [wi + lin_inv.act(e.degree_part(d)) for wi, e in zip(w, errs)]
    raise InvalidAutomorphism("inverse did not converge")


def _check_phi_config(shape: Shape):
    if shape.p == 3 and shape.n == (1,):
        raise ExcludedConfiguration("Phi is not an isomorphism for (m; n) = (1; 1) at p = 3")


def witt_image(psi: ContAut, a, k) -> dict:
    """Coordinates of psi o x^(a) d_k o psi^-1."""
    key = (a, k)
    hit = psi._witt.get(key)
    if hit is not None:
        return hit
    shape = psi.shape
    ctx = shape.ctx
    inv = psi.inverse()
    cache = psi._dw
    out: dict = {}
    pa = psi.act_monomial(a)
    for j in range(shape.m):
        dkw = cache.get((k, j))
        if dkw is None:
            dkw = psi.act(partial(inv.images[j], k))
            cache[(k, j)] = dkw
        if not dkw:
            continue
        for b, c in multiply(pa, dkw).terms.items():
            out[(b, j)] = c
    psi._witt[key] = out
    return out


def phi_conjugate(psi: ContAut, D: Derivation) -> Derivation:
    """Phi(psi)(D) = psi o D o psi^-1 as an element of W."""
    if psi.shape != D.shape:
        raise ShapeMismatch(f"{psi.shape} vs {D.shape}")
    _check_phi_config(psi.shape)
    ctx = psi.shape.ctx
    out: dict = {}
    for (a, k), c in D.coeffs.items():
        vaxpy(ctx, out, witt_image(psi, a, k), c)
    return Derivation._raw(D.shape, out)


# -- tori -------------------------------------------------------------------

def lam(shape: Shape, t) -> ContAut:
    return ContAut.diagonal(shape, t)


def is_admissible(ctx, t, kind) -> bool:
    """X-admissibility of t in (F^x)^m."""
    fam = kind.family if isinstance(kind, AlgebraKind) else str(kind)[0]
    t = list(t)
    if any(c == 0 for c in t):
        return False
    if fam in ("W", "S"):
        return True
    m = len(t)
    r = m // 2
    prods = {ctx.mul(t[i], t[prime(i, r)]) for i in range(r)}
    if len(prods) > 1:
        return False
    if fam == "K":
        return prods == {t[m - 1]}
    return True


def torus_multiplier(a, k, t, ctx) -> int:
    """t^a t_k^-1, the eigenvalue of lambda(t) on x^(a) d_k."""
    v = 1
    for ti, ai in zip(t, a):
        if ai:
            v = ctx.mul(v, ctx.pow(ti, ai))
    return ctx.div(v, t[k])


def _family(kind) -> str:
    return kind.family if isinstance(kind, AlgebraKind) else str(kind)[0]


def in_aut_group(psi: ContAut, kind) -> bool:
    """Membership in the subgroup of Aut_c O(m; n) matching the algebra kind."""
    from .forms import omega, proportional_to, pullback
    fam = _family(kind)
    m = psi.shape.m
    if fam == "S" and m < 3 or fam == "H" and m % 2 or fam == "K" and (m % 2 == 0 or m < 3):
        raise KindConstraintViolation(f"kind {fam} incompatible with m={m}")
    if not psi.is_valid():
        return False
    if fam == "W":
        return True
    om = omega(fam, psi.shape)
    return proportional_to(pullback(psi, om), om, unit=(fam == "K")) is not None


def form_multiplier(psi: ContAut, kind):
    """The c (or unit u for K) with psi(omega) = c omega, else None."""
    from .forms import omega, proportional_to, pullback
    fam = _family(kind)
    om = omega(fam, psi.shape)
    return proportional_to(pullback(psi, om), om, unit=(fam == "K"))


# -- flag and monomial subgroup ---------------------------------------------

def flag_levels(n) -> list[frozenset]:
    """Xi_1 < Xi_2 < ...: axes grouped by descending n value, cumulative."""
    levels = []
    acc: set = set()
    for v in sorted(set(n), reverse=True):
        acc |= {j for j, x in enumerate(n) if x == v}
        levels.append(frozenset(acc))
    return levels


def flag_layers(n) -> list[list[int]]:
    """U_i index sets: Xi_i minus Xi_{i-1}."""
    return [sorted(j for j, x in enumerate(n) if x == v) for v in sorted(set(n), reverse=True)]


def respects_flag(M, n) -> bool:
    """Operator matrix M maps each V_i into itself."""
    m = len(n)
    for j in range(m):
        for i in range(m):
            if M[i][j] and n[i] < n[j]:
                return False
    return True


def gram_matrix(r: int, ctx):
    """<x_j, x_k> = sigma(j) delta_{j, k'}."""
    m = 2 * r
    J = linalg.zeros(m, m)
    for j in range(m):
        J[j][prime(j, r)] = 1 if j < r else ctx.neg(1)
    return J


def pairing(ctx, r: int, u, v) -> int:
    """<u, v> for coordinate vectors in the x-basis."""
    s = 0
    for j in range(r):
        if u[j] and v[j + r]:
            s = ctx.add(s, ctx.mul(u[j], v[j + r]))
        if u[j + r] and v[j]:
            s = ctx.sub(s, ctx.mul(u[j + r], v[j]))
    return s


def symplectic_multiplier(ctx, M):
    """c with M^T J M = c J, or None."""
    r = len(M) // 2
    J = gram_matrix(r, ctx)
    G = linalg.matmul(ctx, linalg.matmul(ctx, linalg.transpose(M), J), M)
    c = G[0][r]
    if c and linalg.mat_eq(G, [[ctx.mul(c, x) for x in row] for row in J]):
        return c
    return None


def is_symplectic(ctx, M) -> bool:
    return symplectic_multiplier(ctx, M) == 1


def monomial_data(psi: ContAut):
    """(perm, coeffs) if psi(x_i) = alpha_i x_{j_i} with j a permutation, else None."""
    perm, coeffs = [], []
    for y in psi.images:
        if len(y.terms) != 1:
            return None
        (a, c), = y.terms.items()
        if sum(a) != 1:
            return None
        perm.append(a.index(1))
        coeffs.append(c)
    if sorted(perm) != list(range(psi.shape.m)):
        return None
    return perm, coeffs


def is_monomial(psi: ContAut) -> bool:
    """Membership in M(m; n): monomial and respecting the flag."""
    data = monomial_data(psi)
    if data is None:
        return False
    n = psi.shape.n
    return all(n[i] == n[j] for i, j in enumerate(data[0]))


def k_shape_data(psi: ContAut):
    """Decompose psi per the normalizer shape for K, or None.

    x_i -> alpha_i x_{j_i} (i < 2r, j_i < 2r) and
    x_m -> alpha_m x_m + sum_l beta_l x_l x_{l'}.
    Returns (perm, alphas, alpha_m, betas).
    """
    shape = psi.shape
    m = shape.m
    r = m // 2
    perm, alphas = [], []
    for y in psi.images[: 2 * r]:
        if len(y.terms) != 1:
            return None
        (a, c), = y.terms.items()
        if sum(a) != 1 or a[m - 1]:
            return None
        perm.append(a.index(1))
        alphas.append(c)
    if sorted(perm) != list(range(2 * r)):
        return None
    ym = psi.images[m - 1]
    alpha_m = ym.coeff(shape.eps(m - 1))
    betas = []
    allowed = {shape.eps(m - 1)}
    for l in range(r):
        a = tuple(1 if j in (l, l + r) else 0 for j in range(m))
        allowed.add(a)
        betas.append(ym.coeff(a))
    if not alpha_m or set(ym.terms) - allowed:
        return None
    return perm, alphas, alpha_m, betas


def eigenspaces_of_torus(shape: Shape, kind) -> dict:
    """Monomials of O(m; n) grouped by their character on the admissible torus."""
    fam = _family(kind)
    out: dict = {}
    for a in monomials(shape):
        out.setdefault(char_label(a, fam), []).append(a)
    return out


def normalizes_torus(psi: ContAut, kind) -> bool:
    """psi lambda(t) psi^-1 lies in the X-torus for every X-admissible t.

    Decided exactly over the lattice of torus characters: each psi^-1(x_i)
    must be a weight vector, and the induced weights must be admissible.
    """
    fam = _family(kind)
    m = psi.shape.m
    inv = psi.inverse()
    weights = []
    for w in inv.images:
        labs = {char_label(a, fam) for a in w.terms}
        if len(labs) != 1:
            return False
        weights.append(labs.pop())
    if fam in ("W", "S"):
        return True
    r = m // 2
    sums = {tuple(x + y for x, y in zip(weights[i], weights[prime(i, r)])) for i in range(r)}
    if len(sums) != 1:
        return False
    if fam == "K":
        return sums == {weights[m - 1]}
    return True


def torus_character(t, ctx, zeta, e):
    """Exponents h with t_i = zeta^h_i, zeta of order e."""
    out = []
    lz = ctx.dlog(zeta)
    q1 = ctx.q - 1
    for c in t:
        lc = ctx.dlog(c)
        # c = zeta^h  <=>  lc = h * lz mod q-1
        h = next((h for h in range(e) if (h * lz - lc) % q1 == 0), None)
        if h is None:
            return None
        out.append(h)
    return tuple(out)


def product(auts) -> ContAut:
    return reduce(compose, auts)
