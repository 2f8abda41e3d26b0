"""Differential forms over O(m; n).

A form is a dict from strictly increasing axis tuples S to DpaElement
coefficients, meaning the sum of f_S dx_{s1} ^ ... ^ dx_{sk}.
"""

from __future__ import annotations

from .dpa import DpaElement, Shape, invert, is_unit, multiply, partial
from .errors import NoFormForW, ParityMismatch, ShapeMismatch
from .liealg import Derivation, apply, prime, sigma


def _sort_sign(axes):
    """Sign of the permutation sorting axes, or 0 on a repeated axis."""
    axes = list(axes)
    if len(set(axes)) != len(axes):
        return 0, ()
    sign = 1
    for i in range(len(axes)):
        for j in range(i + 1, len(axes)):
            if axes[i] > axes[j]:
                sign = -sign
    return sign, tuple(sorted(axes))


class DifferentialForm:
    __slots__ = ("shape", "terms")

    def __init__(self, shape: Shape, terms=None):
        self.shape = shape
        self.terms = {}
        for axes, f in (terms or {}).items():
            axes = tuple(axes)
            if list(axes) != sorted(set(axes)):
                raise ValueError(f"axes {axes} must be strictly increasing")
            if f.shape != shape:
                raise ShapeMismatch(f"{f.shape} vs {shape}")
            if f:
                self.terms[axes] = f

    @classmethod
    def zero(cls, shape):
        return cls(shape)

    @classmethod
    def dx(cls, shape, *axes):
        """dx_{a1} ^ ... ^ dx_{ak} for 0-based axes in any order."""
        sign, srt = _sort_sign(axes)
        if not sign:
            return cls(shape)
        f = DpaElement.one(shape)
        return cls(shape, {srt: f if sign > 0 else -f})

    @classmethod
    def function(cls, f: DpaElement):
        return cls(f.shape, {(): f})

    def _same(self, other):
        if not isinstance(other, DifferentialForm) or other.shape != self.shape:
            raise ShapeMismatch(f"{getattr(other, 'shape', other)} vs {self.shape}")

    def __add__(self, other):
        self._same(other)
        out = dict(self.terms)
        for axes, f in other.terms.items():
            s = out[axes] + f if axes in out else f
            if s:
                out[axes] = s
            else:
                out.pop(axes, None)
        return DifferentialForm(self.shape, out)

    def __neg__(self):
        return DifferentialForm(self.shape, {k: -f for k, f in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DifferentialForm":
        return DifferentialForm(self.shape, {k: f.scale(c) for k, f in self.terms.items()})

    def scale_by(self, u: DpaElement) -> "DifferentialForm":
        """u * omega for a function u."""
        return DifferentialForm(self.shape, {k: multiply(u, f) for k, f in self.terms.items()})

    def coeff(self, axes) -> DpaElement:
        return self.terms.get(tuple(axes), DpaElement.zero(self.shape))

    def coordinates(self) -> dict:
        return {(axes, a): c for axes, f in self.terms.items() for a, c in f.terms.items()}

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, DifferentialForm) and self.shape == other.shape and self.terms == other.terms

    def __hash__(self):
        return hash((self.shape, frozenset((k, hash(f)) for k, f in self.terms.items())))

    def __repr__(self):
        return f"DifferentialForm({self.to_text()})"

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for axes in sorted(self.terms, key=lambda s: (len(s), s)):
            f = self.terms[axes]
            d = "^".join(f"dx{i + 1}" for i in axes)
            parts.append(f"({f.to_text()}) {d}" if d else f"({f.to_text()})")
        return " + ".join(parts)

    def degree(self):
        degs = {len(s) for s in self.terms}
        return degs.pop() if len(degs) == 1 else None


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    a._same(b)
    out = DifferentialForm.zero(a.shape)
    acc: dict = {}
    for s, f in a.terms.items():
        for t, g in b.terms.items():
            sign, axes = _sort_sign(s + t)
            if not sign:
                continue
            h = multiply(f, g)
            if sign < 0:
                h = -h
            acc[axes] = acc[axes] + h if axes in acc else h
    out = DifferentialForm(a.shape, {k: v for k, v in acc.items() if v})
    return out


def exterior_d(w: DifferentialForm) -> DifferentialForm:
    shape = w.shape
    out = DifferentialForm.zero(shape)
    for axes, f in w.terms.items():
        for i in range(shape.m):
            df = partial(f, i)
            if df:
                out = out + wedge(DifferentialForm(shape, {(i,): df}), DifferentialForm.dx(shape, *axes))
    return out


def d_function(f: DpaElement) -> DifferentialForm:
    return exterior_d(DifferentialForm.function(f))


def _wedge_all(shape, factors) -> DifferentialForm:
    acc = DifferentialForm.function(DpaElement.one(shape))
    for fac in factors:
        acc = wedge(acc, fac)
    return acc


def derivation_action(D: Derivation, w: DifferentialForm) -> DifferentialForm:
    """Lie derivative of w along D: D acts on coefficients and dx_i -> d(D(x_i))."""
    if D.shape != w.shape:
        raise ShapeMismatch(f"{D.shape} vs {w.shape}")
    shape = w.shape
    comps = D.components()
    out = DifferentialForm.zero(shape)
    for axes, f in w.terms.items():
        Df = apply(D, f)
        if Df:
            out = out + DifferentialForm(shape, {axes: Df})
        for j, s in enumerate(axes):
            dfs = d_function(comps[s])
            if not dfs:
                continue
            factors = [DifferentialForm.dx(shape, t) for t in axes[:j]] + [dfs] + \
                      [DifferentialForm.dx(shape, t) for t in axes[j + 1:]]
            out = out + _wedge_all(shape, factors).scale_by(f)
    return out


def pullback(psi, w: DifferentialForm) -> DifferentialForm:
    """psi(w): coefficients through psi, dx_i -> d(psi(x_i))."""
    if psi.shape != w.shape:
        raise ShapeMismatch(f"{psi.shape} vs {w.shape}")
    shape = w.shape
    dys = [d_function(y) for y in psi.images]
    out = DifferentialForm.zero(shape)
    for axes, f in w.terms.items():
        out = out + _wedge_all(shape, [dys[s] for s in axes]).scale_by(psi.act(f))
    return out


def omega(kind: str, shape: Shape) -> DifferentialForm:
    """The defining form of S, H or K."""
    fam = kind[0]
    m = shape.m
    if fam == "W":
        raise NoFormForW("W has no defining form")
    if fam == "S":
        if m < 3:
            raise ParityMismatch("omega_S needs m >= 3")
        return DifferentialForm.dx(shape, *range(m))
    if fam == "H":
        if m % 2:
            raise ParityMismatch("omega_H needs even m")
        r = m // 2
        out = DifferentialForm.zero(shape)
        for i in range(r):
            out = out + DifferentialForm.dx(shape, i, prime(i, r))
        return out
    if fam == "K":
        if m % 2 == 0:
            raise ParityMismatch("omega_K needs odd m")
        r = m // 2
        out = DifferentialForm.dx(shape, m - 1)
        for i in range(2 * r):
            xi = DpaElement.var(shape, i, 1 if sigma(i, r) > 0 else shape.ctx.neg(1))
            out = out + DifferentialForm(shape, {(prime(i, r),): xi})
        return out
    raise ValueError(f"unknown kind {kind!r}")


def omega_H_on(shape: Shape, r: int) -> DifferentialForm:
    """sum_{i<r} dx_i ^ dx_{i+r} inside a shape with m >= 2r."""
    out = DifferentialForm.zero(shape)
    for i in range(r):
        out = out + DifferentialForm.dx(shape, i, i + r)
    return out


def proportional_to(w1: DifferentialForm, w2: DifferentialForm, unit: bool = False):
    """c in F^x (or, with unit=True, u in O^x) with w1 = c*w2; None if none exists.

    The unit is read off the coefficient of dx_m, then checked on every term.
    """
    w1._same(w2)
    if not w2:
        return None
    if not unit:
        ctx = w1.shape.ctx
        key, val = min(w2.coordinates().items())
        c = ctx.div(w1.coordinates().get(key, 0), val)
        if c and w1 == w2.scale(c):
            return c
        return None
    u = multiple_of(w1, w2)
    if u is None or not is_unit(u):
        return None
    return u


def multiple_of(w1: DifferentialForm, w2: DifferentialForm):
    """u in O with w1 = u*w2, solved from the dx_m coefficient; None if none."""
    m = w1.shape.m
    top = w2.coeff((m - 1,))
    if not top or not is_unit(top):
        return None
    u = multiply(w1.coeff((m - 1,)), invert(top))
    if w1 == w2.scale_by(u):
        return u
    return None
