"""The truncated divided power algebra O(m; n) over a finite field.

Basis x^(a), 0 <= a <= tau, tau_i = p^{n_i} - 1, with
x^(a) x^(b) = C(a+b, a) x^(a+b) and products leaving the box dropped.
Axes are 0-based in the Python API and 1-based in text output.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import AxisOutOfRange, NonzeroConstantTerm, NotAUnit, ShapeMismatch
from .field import FieldCtx, Scalar, binom_mod_p


class Shape:
    """Number of variables and truncation heights, bound to a field."""

    def __init__(self, ctx: FieldCtx, n):
        n = tuple(int(v) for v in n)
        if not n or any(v < 1 for v in n):
            raise ValueError(f"n must be a non-empty tuple of positive ints, got {n}")
        self.ctx = ctx
        self.p = ctx.p
        self.n = n
        self.m = len(n)
        self.tau = tuple(self.p ** v - 1 for v in n)

    def __eq__(self, other):
        return isinstance(other, Shape) and self.ctx == other.ctx and self.n == other.n

    def __hash__(self):
        return hash((self.ctx, self.n))

    def __repr__(self):
        return f"Shape(p={self.p}, k={self.ctx.k}, n={self.n})"

    @property
    def dim(self) -> int:
        return self.p ** sum(self.n)

    def eps(self, i: int) -> tuple:
        return tuple(1 if j == i else 0 for j in range(self.m))

    def in_range(self, a) -> bool:
        return all(0 <= x <= t for x, t in zip(a, self.tau))

    def restrict(self, m: int) -> "Shape":
        """Shape on the first m variables."""
        return Shape(self.ctx, self.n[:m])

    def with_field(self, ctx: FieldCtx) -> "Shape":
        return Shape(ctx, self.n)


@lru_cache(maxsize=None)
def monomials(shape: Shape) -> tuple:
    """All multi-indices of O(m; n), ordered by total degree then lexicographically."""
    idx = itertools.product(*(range(t + 1) for t in shape.tau))
    return tuple(sorted(idx, key=lambda a: (sum(a), a)))


@lru_cache(maxsize=None)
def _binom_multi(a: tuple, b: tuple, p: int) -> int:
    c = 1
    for x, y in zip(a, b):
        c = c * binom_mod_p(x + y, x, p) % p
        if not c:
            return 0
    return c


def _legendre(n: int, p: int) -> int:
    e = 0
    while n:
        n //= p
        e += n
    return e


@lru_cache(maxsize=None)
def _fact_unit(n: int, p: int) -> int:
    """n! with all factors p removed, mod p."""
    if n < p:
        r = 1
        for j in range(2, n + 1):
            r = r * j % p
        return r
    sign = -1 if (n // p) % 2 else 1
    return sign * _fact_unit(n % p, p) * _fact_unit(n // p, p) % p


@lru_cache(maxsize=None)
def monomial_dp_coeff(b: tuple, q: int, p: int) -> int:
    """(qb)! / (q! (b!)^q) mod p, the coefficient of (x^(b))^(q)."""
    val = sum(_legendre(q * x, p) for x in b) - _legendre(q, p) - q * sum(_legendre(x, p) for x in b)
    if val > 0:
        return 0
    num = 1
    for x in b:
        num = num * _fact_unit(q * x, p) % p
    den = _fact_unit(q, p)
    for x in b:
        den = den * pow(_fact_unit(x, p), q, p) % p
    return num * pow(den, p - 2, p) % p


def _scalar(ctx: FieldCtx, c) -> int:
    if isinstance(c, Scalar):
        if c.ctx != ctx:
            from .errors import ContextMismatch
            raise ContextMismatch(f"{c.ctx} vs {ctx}")
        return c.value
    c = int(c)
    if 0 <= c < ctx.q:
        return c
    return c % ctx.p


class DpaElement:
    """Sparse element of O(m; n): dict multi-index -> nonzero field int."""

    __slots__ = ("shape", "terms")

    def __init__(self, shape: Shape, terms=None):
        self.shape = shape
        clean = {}
        if terms:
            for a, c in terms.items():
                a = tuple(a)
                if c:
                    if len(a) != shape.m or not shape.in_range(a):
                        raise ValueError(f"multi-index {a} outside {shape}")
                    clean[a] = c
        self.terms = clean

    # -- constructors --
    @classmethod
    def zero(cls, shape):
        return cls(shape)

    @classmethod
    def one(cls, shape):
        return cls(shape, {(0,) * shape.m: 1})

    @classmethod
    def monomial(cls, shape, a, c=1):
        return cls(shape, {tuple(a): _scalar(shape.ctx, c)})

    @classmethod
    def var(cls, shape, i, c=1):
        """c * x_i (0-based i)."""
        return cls.monomial(shape, shape.eps(i), c)

    @classmethod
    def constant(cls, shape, c):
        return cls(shape, {(0,) * shape.m: _scalar(shape.ctx, c)})

    @classmethod
    def _raw(cls, shape, terms):
        obj = cls.__new__(cls)
        obj.shape = shape
        obj.terms = terms
        return obj

    # -- basic protocol --
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, DpaElement) and self.shape == other.shape and self.terms == other.terms

    def __hash__(self):
        return hash((self.shape, frozenset(self.terms.items())))

    def __repr__(self):
        return f"DpaElement({self.to_text()})"

    def _same(self, other):
        if not isinstance(other, DpaElement) or other.shape != self.shape:
            raise ShapeMismatch(f"{getattr(other, 'shape', other)} vs {self.shape}")

    def __add__(self, other):
        self._same(other)
        ctx = self.shape.ctx
        out = dict(self.terms)
        for a, c in other.terms.items():
            s = ctx.add(out.get(a, 0), c)
            if s:
                out[a] = s
            else:
                out.pop(a, None)
        return DpaElement._raw(self.shape, out)

    def __neg__(self):
        ctx = self.shape.ctx
        return DpaElement._raw(self.shape, {a: ctx.neg(c) for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DpaElement":
        ctx = self.shape.ctx
        c = _scalar(ctx, c)
        if not c:
            return DpaElement._raw(self.shape, {})
        return DpaElement._raw(self.shape, {a: ctx.mul(c, v) for a, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DpaElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def coeff(self, a) -> int:
        return self.terms.get(tuple(a), 0)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.shape.m, 0)

    def degree_part(self, d: int) -> "DpaElement":
        return DpaElement._raw(self.shape, {a: c for a, c in self.terms.items() if sum(a) == d})

    def min_degree(self):
        return min((sum(a) for a in self.terms), default=None)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        ctx = self.shape.ctx
        parts = []
        for a in sorted(self.terms, key=lambda a: (sum(a), a)):
            c = self.terms[a]
            cs = str(c) if ctx.k == 1 else "[" + ",".join(map(str, ctx.to_coeffs(c))) + "]"
            parts.append(f"{cs}*x^({','.join(map(str, a))})")
        return " + ".join(parts)


_PRODUCT_ROWS: dict = {}


def _product_row(shape: Shape, a: tuple) -> dict:
    """b -> (a + b, C(a + b, a) mod p) for the monomials b with a nonzero product."""
    rows = _PRODUCT_ROWS.setdefault((shape.p, shape.n), {})
    row = rows.get(a)
    if row is None:
        row = {}
        p = shape.p
        for b in itertools.product(*(range(t - x + 1) for x, t in zip(a, shape.tau))):
            bc = _binom_multi(a, b, p)
            if bc:
                row[b] = (tuple(x + y for x, y in zip(a, b)), bc)
        rows[a] = row
    return row


def multiply(f: DpaElement, g: DpaElement) -> DpaElement:
    f._same(g)
    shape = f.shape
    ctx = shape.ctx
    add, mul = ctx.add, ctx.mul
    out: dict = {}
    get = out.get
    gterms = g.terms
    for a, ca in f.terms.items():
        row = _product_row(shape, a)
        if len(row) < len(gterms):
            pairs = ((row[b], cb) for b, cb in gterms.items() if b in row)
        else:
            pairs = ((sb, gterms[b]) for b, sb in row.items() if b in gterms)
        for (s, bc), cb in pairs:
            nv = add(get(s, 0), mul(mul(ca, cb), bc))
            if nv:
                out[s] = nv
            else:
                del out[s]
    return DpaElement._raw(shape, out)


def power(f: DpaElement, q: int) -> DpaElement:
    """Ordinary associative power f^q."""
    out = DpaElement.one(f.shape)
    for _ in range(q):
        out = multiply(out, f)
    return out


def _monomial_dp(shape: Shape, b: tuple, c: int, q: int) -> DpaElement:
    ctx = shape.ctx
    qb = tuple(q * x for x in b)
    if not shape.in_range(qb):
        return DpaElement._raw(shape, {})
    k = monomial_dp_coeff(b, q, shape.p)
    v = ctx.mul(ctx.pow(c, q), k)
    return DpaElement._raw(shape, {qb: v} if v else {})


def divided_powers(y: DpaElement, qmax: int) -> list[DpaElement]:
    """[y^(0), ..., y^(qmax)] for y without constant term.

    Built term by term from (u + v)^(q) = sum_i u^(i) v^(q-i) and the
    closed form for a single scaled monomial.
    """
    shape = y.shape
    if y.constant_term():
        raise NonzeroConstantTerm("divided powers need zero constant term")
    one = DpaElement.one(shape)
    zero = DpaElement._raw(shape, {})
    acc = [one] + [zero] * qmax
    for b, c in sorted(y.terms.items()):
        tp = [one] + [_monomial_dp(shape, b, c, i) for i in range(1, qmax + 1)]
        new = []
        for q in range(qmax + 1):
            s = zero
            for i in range(q + 1):
                if tp[i] and acc[q - i]:
                    s = s + multiply(tp[i], acc[q - i])
            new.append(s)
        acc = new
    return acc


def divided_power(y: DpaElement, q: int) -> DpaElement:
    if q < 0:
        raise ValueError("q must be non-negative")
    return divided_powers(y, q)[q]


def partial(f: DpaElement, i: int) -> DpaElement:
    """The standard derivation d_i: x^(a) -> x^(a - eps_i)."""
    m = f.shape.m
    if not 0 <= i < m:
        raise AxisOutOfRange(f"axis {i} not in 0..{m - 1}")
    out = {}
    for a, c in f.terms.items():
        if a[i]:
            b = a[:i] + (a[i] - 1,) + a[i + 1:]
            out[b] = c
    return DpaElement._raw(f.shape, out)


def is_unit(f: DpaElement) -> bool:
    return f.constant_term() != 0


def invert(f: DpaElement) -> DpaElement:
    if not is_unit(f):
        raise NotAUnit(f.to_text())
    ctx = f.shape.ctx
    c0 = f.constant_term()
    c0inv = ctx.inv(c0)
    # f = c0 (1 + u), u nilpotent
    u = f.scale(c0inv) - DpaElement.one(f.shape)
    neg_u = -u
    out = DpaElement.one(f.shape)
    term = out
    while True:
        term = multiply(term, neg_u)
        if not term:
            break
        out = out + term
    return out.scale(c0inv)


def basis_elements(shape: Shape) -> list[DpaElement]:
    return [DpaElement.monomial(shape, a) for a in monomials(shape)]
