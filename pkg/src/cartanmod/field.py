"""Finite fields F_p and F_{p^k}.

Elements are plain ints: the coefficient vector c_0 + c_1 x + ... of the
residue polynomial, packed base p.  Prime-field elements 0..p-1 therefore
embed into every extension without conversion.  Multiplication and addition
in proper extensions go through discrete-log (Zech) tables.
"""

from __future__ import annotations

import random
from functools import lru_cache
from math import gcd

from .errors import ContextMismatch, OrderUnavailable


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def binom_mod_p(a: int, b: int, p: int) -> int:
    """C(a, b) mod p via Lucas' theorem."""
    if b < 0 or a < 0 or b > a:
        return 0
    result = 1
    while a or b:
        ad, bd = a % p, b % p
        if bd > ad:
            return 0
        result = result * _small_binom(ad, bd, p) % p
        a //= p
        b //= p
    return result


@lru_cache(maxsize=None)
def _small_binom(a: int, b: int, p: int) -> int:
    num = den = 1
    for j in range(b):
        num = num * (a - j) % p
        den = den * (j + 1) % p
    return num * pow(den, p - 2, p) % p


# -- polynomials over F_p, coefficient lists low -> high --------------------

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(f, g, p):
    f = list(f)
    inv = pow(g[-1], p - 2, p)
    dg = len(g) - 1
    while len(_trim(f)) - 1 >= dg:
        c = f[-1] * inv % p
        shift = len(f) - 1 - dg
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gi) % p
    return f


def _poly_mulmod(f, g, mod, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] = (out[i + j] + fi * gj) % p
    return _poly_mod(out, mod, p)


def _poly_powmod(f, e, mod, p):
    result = [1]
    base = _poly_mod(f, mod, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_sub(f, g, p):
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_gcd(f, g, p):
    f, g = _trim(list(f)), _trim(list(g))
    while g:
        f, g = g, _trim(_poly_mod(f, g, p))
    return f


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial f of degree k over F_p."""
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p ** k, f, p), x, p):
        return False
    for d in prime_factors(k):
        h = _poly_sub(_poly_powmod(x, p ** (k // d), f, p), x, p)
        if len(_poly_gcd(f, h, p)) != 1:
            return False
    return True


def find_irreducible(p: int, k: int, seed: int = 0) -> tuple[int, ...]:
    if k == 1:
        return (0, 1)
    rng = random.Random(seed)
    while True:
        f = [rng.randrange(p) for _ in range(k)] + [1]
        if f[0] and is_irreducible(f, p):
            return tuple(f)


class FieldCtx:
    """The field F_p[x]/(modulus) with q = p^k elements."""

    def __init__(self, p: int, k: int = 1, modulus: tuple[int, ...] | None = None, seed: int = 0):
        if p <= 2 or not is_prime(p):
            raise ValueError(f"characteristic must be an odd prime, got {p}")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        if modulus is None:
            modulus = find_irreducible(p, k, seed)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1 or not is_irreducible(list(modulus), p):
            raise ValueError(f"modulus {modulus} is not monic irreducible of degree {k}")
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = modulus
        self._build_tables()

    def _build_tables(self):
        p, q = self.p, self.q
        if self.k == 1:
            g = next(c for c in range(1, p) if self._order_naive(c) == p - 1)
        else:
            g = next(c for c in range(2, q) if self._order_naive(c) == q - 1)
        self.generator = g
        exp = [0] * (q - 1)
        log = [-1] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._slow_mul(x, g)
        self._exp = exp
        self._log = log
        if self.k > 1:
            # zech[n] = log(1 + g^n), -1 when 1 + g^n == 0
            zech = [0] * (q - 1)
            for n in range(q - 1):
                s = self._slow_add(1, exp[n])
                zech[n] = log[s]
            self._zech = zech

    def _slow_mul(self, a, b):
        if self.k == 1:
            return a * b % self.p
        r = _poly_mulmod(self.to_coeffs(a), self.to_coeffs(b), list(self.modulus), self.p)
        return self.from_coeffs(r)

    def _slow_add(self, a, b):
        ca, cb = self.to_coeffs(a), self.to_coeffs(b)
        return self.from_coeffs([(x + y) % self.p for x, y in zip(ca, cb)])

    def _order_naive(self, a):
        x, n = a, 1
        while x != 1:
            x = self._slow_mul(x, a)
            n += 1
            if n > self.q:
                return 0
        return n

    # -- encoding --
    def to_coeffs(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return out

    def from_coeffs(self, coeffs) -> int:
        v = 0
        for c in reversed(list(coeffs)[: self.k]):
            v = v * self.p + int(c) % self.p
        return v

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"FieldCtx(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    # -- arithmetic on encoded ints --
    def coerce(self, c: int) -> int:
        """Integer -> prime-field element."""
        return c % self.p

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self._log[a], self._log[b]
        z = self._zech[(lb - la) % (self.q - 1)]
        if z < 0:
            return 0
        return self._exp[(la + z) % (self.q - 1)]

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self.from_coeffs([-c % self.p for c in self.to_coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[-self._log[a] % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 if e == 0 else 0
        if self.k == 1:
            return pow(a, e % (self.p - 1), self.p)
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def dlog(self, a: int) -> int:
        """Discrete log to the fixed primitive element."""
        if a == 0:
            raise ValueError("log of zero")
        return self._log[a]

    def order(self, a: int) -> int:
        return (self.q - 1) // gcd(self.q - 1, self.dlog(a))

    def elements(self):
        return range(self.q)

    def root_of_unity(self, e: int) -> int:
        return root_of_unity(self, e)

    def sqrt(self, a: int) -> int | None:
        """A square root, or None; picks the root with smaller discrete log."""
        if a == 0:
            return 0
        la = self.dlog(a)
        if la % 2:
            return None
        r1 = self._exp[la // 2]
        r2 = self.neg(r1)
        return min((r1, r2), key=self.dlog)

    def embedding_into(self, other: "FieldCtx"):
        """Field embedding self -> other as a function on encoded ints."""
        return _embedding(self, other)


@lru_cache(maxsize=None)
def _embedding(src: FieldCtx, dst: FieldCtx):
    if src.p != dst.p or dst.k % src.k:
        raise ContextMismatch(f"cannot embed {src} into {dst}")
    if src == dst:
        return lambda a: a
    mod = src.modulus
    beta = None
    for cand in dst.elements():
        acc = 0
        for c in reversed(mod):
            acc = dst.add(dst.mul(acc, cand), c)
        if acc == 0:
            beta = cand
            break
    powers = [dst.pow(beta, i) for i in range(src.k)]
    table = []
    for a in src.elements():
        v = 0
        for c, bp in zip(src.to_coeffs(a), powers):
            if c:
                v = dst.add(v, dst.mul(c, bp))
        table.append(v)
    return table.__getitem__


def root_of_unity(ctx: FieldCtx, e: int) -> int:
    """An element of multiplicative order exactly e."""
    if e < 1 or (ctx.q - 1) % e:
        raise OrderUnavailable(f"no element of order {e} in F_{ctx.p}^{ctx.k}")
    return ctx._exp[((ctx.q - 1) // e) % (ctx.q - 1)]


def degree_for_orders(p: int, orders) -> int:
    """Least k with every order dividing p^k - 1."""
    k = 1
    orders = [e for e in orders if e > 1]
    for e in orders:
        if gcd(e, p) != 1:
            raise OrderUnavailable(f"order {e} is divisible by p={p}")
    while any((p ** k - 1) % e for e in orders):
        k += 1
    return k


_CTX_CACHE: dict[tuple[int, int, int], FieldCtx] = {}


def get_field(p: int, k: int = 1, seed: int = 0) -> FieldCtx:
    key = (p, k, seed)
    if key not in _CTX_CACHE:
        _CTX_CACHE[key] = FieldCtx(p, k, seed=seed)
    return _CTX_CACHE[key]


class Scalar:
    """A field element bound to its context."""

    __slots__ = ("ctx", "value")

    def __init__(self, ctx: FieldCtx, value: int):
        self.ctx = ctx
        self.value = value

    @classmethod
    def from_coeffs(cls, ctx, coeffs):
        return cls(ctx, ctx.from_coeffs(coeffs))

    def _check(self, other):
        if isinstance(other, int):
            return self.ctx.coerce(other)
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
        return other.value

    def __add__(self, other):
        return Scalar(self.ctx, self.ctx.add(self.value, self._check(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.ctx, self.ctx.sub(self.value, self._check(other)))

    def __rsub__(self, other):
        return Scalar(self.ctx, self.ctx.sub(self._check(other), self.value))

    def __mul__(self, other):
        return Scalar(self.ctx, self.ctx.mul(self.value, self._check(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.ctx, self.ctx.div(self.value, self._check(other)))

    def __neg__(self):
        return Scalar(self.ctx, self.ctx.neg(self.value))

    def __pow__(self, e: int):
        return Scalar(self.ctx, self.ctx.pow(self.value, e))

    def inverse(self):
        return Scalar(self.ctx, self.ctx.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == self.ctx.coerce(other)
        return isinstance(other, Scalar) and self.ctx == other.ctx and self.value == other.value

    def __hash__(self):
        return hash((self.ctx, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        if self.ctx.k == 1:
            return str(self.value)
        return f"Scalar({self.ctx.to_coeffs(self.value)})"

    def to_json(self) -> dict:
        return {"p": self.ctx.p, "k": self.ctx.k, "coeffs": self.ctx.to_coeffs(self.value)}
