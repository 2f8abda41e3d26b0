"""The Witt algebra W(m; n) and its subalgebras S, H, K and their derived algebras.

A Derivation is stored by its coordinates over the monomial basis
x^(a) d_i of W, as a sparse dict (a, i) -> field int.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .dpa import DpaElement, Shape, monomials, multiply, partial
from .errors import DimensionCapExceeded, KindConstraintViolation, ShapeMismatch
from .linalg import Echelon, nullspace, vaxpy, vscale

KINDS = ("W", "S", "S1", "H", "H2", "K", "K1")


@dataclass(frozen=True)
class AlgebraKind:
    tag: str
    m: int

    def __post_init__(self):
        if self.tag not in KINDS:
            raise KindConstraintViolation(f"unknown kind {self.tag!r}")
        if self.m < 1:
            raise KindConstraintViolation("m must be positive")
        fam = self.family
        if fam == "S" and self.m < 3:
            raise KindConstraintViolation("special algebras need m >= 3")
        if fam == "H" and (self.m % 2 or self.m < 2):
            raise KindConstraintViolation("Hamiltonian algebras need even m")
        if fam == "K" and (self.m % 2 == 0 or self.m < 3):
            raise KindConstraintViolation("contact algebras need odd m >= 3")

    @property
    def family(self) -> str:
        return self.tag[0]

    @property
    def r(self) -> int:
        return self.m // 2

    @property
    def derived_depth(self) -> int:
        return {"S1": 1, "H2": 2, "K1": 1}.get(self.tag, 0)

    @property
    def base(self) -> str:
        return self.family


def prime(i: int, r: int) -> int:
    """i' for 0-based i < 2r."""
    if not 0 <= i < 2 * r:
        raise ValueError(f"i' undefined for i={i}, r={r}")
    return i + r if i < r else i - r


def sigma(i: int, r: int) -> int:
    if not 0 <= i < 2 * r:
        raise ValueError(f"sigma undefined for i={i}, r={r}")
    return 1 if i < r else -1


def char_label(v, family: str) -> tuple:
    """Exponent of t -> t^v restricted to the admissible tori, as an int vector.

    W/S: t free, label = v.  H (m = 2r): t_i = s_i, t_{i'} = c/s_i.
    K (m = 2r+1): same, and t_m = c.
    """
    v = tuple(v)
    if family in ("W", "S"):
        return v
    m = len(v)
    r = m // 2
    diffs = tuple(v[i] - v[i + r] for i in range(r))
    c = sum(v[i + r] for i in range(r))
    if family == "K":
        c += v[m - 1]
    return diffs + (c,)


def multidegree(a, i) -> tuple:
    return tuple(x - (1 if j == i else 0) for j, x in enumerate(a))


def canonical_degree(a, i: int, kind) -> int:
    tag = kind.tag if isinstance(kind, AlgebraKind) else str(kind)
    m = len(a)
    if tag.startswith("K"):
        return sum(a[: m - 1]) + 2 * a[m - 1] - 1 - (1 if i == m - 1 else 0)
    return sum(a) - 1


def canonical_multidegree(a, i) -> tuple:
    return multidegree(a, i)


class Derivation:
    """sum_i f_i d_i, stored as {(a, i): coefficient}."""

    __slots__ = ("shape", "coeffs")

    def __init__(self, shape: Shape, coeffs=None):
        self.shape = shape
        self.coeffs = {k: c for k, c in (coeffs or {}).items() if c}

    @classmethod
    def _raw(cls, shape, coeffs):
        obj = cls.__new__(cls)
        obj.shape = shape
        obj.coeffs = coeffs
        return obj

    @classmethod
    def monomial(cls, shape, a, i, c=1):
        return cls(shape, {(tuple(a), i): c})

    @classmethod
    def d(cls, shape, i):
        return cls.monomial(shape, (0,) * shape.m, i)

    @classmethod
    def from_components(cls, fs) -> "Derivation":
        fs = list(fs)
        shape = fs[0].shape
        out = {}
        for i, f in enumerate(fs):
            if f.shape != shape:
                raise ShapeMismatch("components must share a shape")
            for a, c in f.terms.items():
                out[(a, i)] = c
        return cls._raw(shape, out)

    def components(self) -> tuple:
        terms = [dict() for _ in range(self.shape.m)]
        for (a, i), c in self.coeffs.items():
            terms[i][a] = c
        return tuple(DpaElement._raw(self.shape, t) for t in terms)

    def component(self, i) -> DpaElement:
        return DpaElement._raw(self.shape, {a: c for (a, j), c in self.coeffs.items() if j == i})

    def _same(self, other):
        if not isinstance(other, Derivation) or other.shape != self.shape:
            raise ShapeMismatch(f"{getattr(other, 'shape', other)} vs {self.shape}")

    def __add__(self, other):
        self._same(other)
        out = dict(self.coeffs)
        vaxpy(self.shape.ctx, out, other.coeffs)
        return Derivation._raw(self.shape, out)

    def __neg__(self):
        ctx = self.shape.ctx
        return Derivation._raw(self.shape, {k: ctx.neg(c) for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Derivation":
        return Derivation._raw(self.shape, vscale(self.shape.ctx, self.coeffs, c))

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        return isinstance(other, Derivation) and other.shape == self.shape and other.coeffs == self.coeffs

    def __hash__(self):
        return hash((self.shape, frozenset(self.coeffs.items())))

    def __repr__(self):
        return f"Derivation({self.to_text()})"

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        ctx = self.shape.ctx
        parts = []
        for (a, i) in sorted(self.coeffs, key=lambda k: (k[1], sum(k[0]), k[0])):
            c = self.coeffs[(a, i)]
            cs = str(c) if ctx.k == 1 else "[" + ",".join(map(str, ctx.to_coeffs(c))) + "]"
            parts.append(f"{cs}*x^({','.join(map(str, a))})d{i + 1}")
        return " + ".join(parts)

    def labels(self, family: str) -> set:
        return {char_label(multidegree(a, i), family) for (a, i) in self.coeffs}


_MONO_BRACKET: dict = {}


def _mono_bracket(shape: Shape, a, i, b, j) -> dict:
    """[x^(a) d_i, x^(b) d_j] = x^(a) d_i(x^(b)) d_j - x^(b) d_j(x^(a)) d_i."""
    cache = _MONO_BRACKET.setdefault(shape, {})
    key = (a, i, b, j)
    hit = cache.get(key)
    if hit is not None:
        return hit
    ctx = shape.ctx
    fa = DpaElement._raw(shape, {a: 1})
    fb = DpaElement._raw(shape, {b: 1})
    out: dict = {}
    left = multiply(fa, partial(fb, i))
    for c, v in left.terms.items():
        out[(c, j)] = v
    right = multiply(fb, partial(fa, j))
    for c, v in right.terms.items():
        s = ctx.sub(out.get((c, i), 0), v)
        if s:
            out[(c, i)] = s
        else:
            out.pop((c, i), None)
    cache[key] = out
    return out


def bracket(D: Derivation, E: Derivation) -> Derivation:
    """[D, E] = sum_j (D(E_j) - E(D_j)) d_j.

    Sparse inputs go through cached monomial brackets; denser ones through
    componentwise products, which keeps the inner loop inside multiply.
    """
    D._same(E)
    shape = D.shape
    ctx = shape.ctx
    if len(D.coeffs) * len(E.coeffs) <= 64:
        mul = ctx.mul
        out: dict = {}
        for (a, i), c in D.coeffs.items():
            for (b, j), d in E.coeffs.items():
                br = _mono_bracket(shape, a, i, b, j)
                if br:
                    vaxpy(ctx, out, br, mul(c, d))
        return Derivation._raw(shape, out)
    Dc, Ec = D.components(), E.components()
    out = {}
    for j in range(shape.m):
        acc: dict = {}
        for i in range(shape.m):
            if Dc[i].terms and Ec[j].terms:
                g = partial(Ec[j], i)
                if g.terms:
                    vaxpy(ctx, acc, multiply(Dc[i], g).terms)
            if Ec[i].terms and Dc[j].terms:
                g = partial(Dc[j], i)
                if g.terms:
                    vaxpy(ctx, acc, multiply(Ec[i], g).terms, ctx.neg(1))
        for a, c in acc.items():
            out[(a, j)] = c
    return Derivation._raw(shape, out)


def apply(D: Derivation, f: DpaElement) -> DpaElement:
    """D(f) = sum_i f_i d_i(f)."""
    if f.shape != D.shape:
        raise ShapeMismatch(f"{f.shape} vs {D.shape}")
    out = DpaElement.zero(D.shape)
    for i, fi in enumerate(D.components()):
        if fi:
            out = out + multiply(fi, partial(f, i))
    return out


def witt_basis(shape: Shape) -> list[Derivation]:
    return [Derivation.monomial(shape, a, i) for i in range(shape.m) for a in monomials(shape)]


class Algebra:
    """A graded subalgebra of W(m; n) with a basis split by torus character."""

    def __init__(self, kind: AlgebraKind, shape: Shape, components: dict):
        self.kind = kind
        self.shape = shape
        self.components = {lab: vecs for lab, vecs in components.items() if vecs}
        self.basis = [D for lab in sorted(self.components) for D in self.components[lab]]
        self._echelons: dict = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def family(self) -> str:
        return self.kind.family

    def label_of(self, key) -> tuple:
        a, i = key
        return char_label(multidegree(a, i), self.family)

    def echelon(self, label) -> Echelon:
        e = self._echelons.get(label)
        if e is None:
            e = Echelon(self.shape.ctx, [D.coeffs for D in self.components.get(label, [])])
            self._echelons[label] = e
        return e

    def split(self, D: Derivation) -> dict:
        """Decompose D into its torus-character components."""
        parts: dict = {}
        for key, c in D.coeffs.items():
            parts.setdefault(self.label_of(key), {})[key] = c
        return parts

    def contains(self, D: Derivation) -> bool:
        if D.shape != self.shape:
            return False
        for lab, part in self.split(D).items():
            if lab not in self.components or not self.echelon(lab).contains(part):
                return False
        return True

    def random_element(self, rng: random.Random) -> Derivation:
        ctx = self.shape.ctx
        out: dict = {}
        for D in self.basis:
            c = rng.randrange(ctx.q)
            if c:
                vaxpy(ctx, out, D.coeffs, c)
        return Derivation._raw(self.shape, out)

    def __repr__(self):
        return f"Algebra({self.kind.tag}, n={self.shape.n}, p={self.shape.p}, dim={self.dim})"


def _witt_components(shape: Shape, family: str) -> dict:
    comps: dict = {}
    for i in range(shape.m):
        for a in monomials(shape):
            lab = char_label(multidegree(a, i), family)
            comps.setdefault(lab, []).append((a, i))
    return comps


def _form_condition(D: Derivation, family: str, omega):
    """Coordinates of the linear condition cutting S, H or K out of W."""
    from .forms import derivation_action
    res = derivation_action(D, omega)
    if family == "K":
        m = D.shape.m
        u = res.coeff((m - 1,))
        res = res - omega.scale_by(u)
    return res.coordinates()


def _annihilator_components(shape: Shape, family: str) -> dict:
    from .forms import omega
    om = omega(family, shape)
    ctx = shape.ctx
    comps = {}
    for lab, keys in _witt_components(shape, family).items():
        conds = [_form_condition(Derivation._raw(shape, {k: 1}), family, om) for k in keys]
        rows_keys = sorted({rk for c in conds for rk in c})
        if not rows_keys:
            comps[lab] = [Derivation._raw(shape, {k: 1}) for k in keys]
            continue
        mat = [[c.get(rk, 0) for c in conds] for rk in rows_keys]
        vecs = []
        for x in nullspace(ctx, mat, len(keys)):
            vecs.append(Derivation._raw(shape, {k: c for k, c in zip(keys, x) if c}))
        if vecs:
            comps[lab] = _canonical_basis(ctx, shape, vecs)
    return comps


def _canonical_basis(ctx, shape, vecs) -> list[Derivation]:
    e = Echelon(ctx, [v.coeffs for v in vecs])
    return [Derivation._raw(shape, row) for row in e.basis()]


def _add_labels(a, b):
    return tuple(x + y for x, y in zip(a, b))


def derived_components(shape: Shape, comps: dict) -> dict:
    """Components of [L, L] from those of L, by graded span closure with early stop."""
    ctx = shape.ctx
    labels = sorted(comps)
    targets: dict = {}
    for x, la in enumerate(labels):
        for lb in labels[x:]:
            lc = _add_labels(la, lb)
            if lc in comps:
                targets.setdefault(lc, []).append((la, lb))
    out = {}
    for lc, pairs in targets.items():
        cap = len(comps[lc])
        ech = Echelon(ctx)
        for la, lb in pairs:
            if ech.rank == cap:
                break
            A, B = comps[la], comps[lb]
            for s, D in enumerate(A):
                if ech.rank == cap:
                    break
                for E in (B[s + 1:] if la == lb else B):
                    br = bracket(D, E)
                    if br:
                        ech.add(br.coeffs)
                        if ech.rank == cap:
                            break
        if ech.rank:
            out[lc] = [Derivation._raw(shape, row) for row in ech.basis()]
    return out


_ALGEBRA_CACHE: dict = {}


def member_basis(kind: AlgebraKind, shape: Shape) -> list[Derivation]:
    return build_algebra(kind, shape).basis


def build_algebra(kind, shape: Shape) -> Algebra:
    if isinstance(kind, str):
        kind = AlgebraKind(kind, shape.m)
    if kind.m != shape.m:
        raise KindConstraintViolation(f"kind has m={kind.m}, shape has m={shape.m}")
    key = (kind, shape)
    if key in _ALGEBRA_CACHE:
        return _ALGEBRA_CACHE[key]
    fam = kind.family
    if kind.tag == fam:
        if fam == "W":
            comps = {lab: [Derivation._raw(shape, {k: 1}) for k in keys]
                     for lab, keys in _witt_components(shape, "W").items()}
        else:
            comps = _annihilator_components(shape, fam)
    else:
        comps = build_algebra(AlgebraKind(fam, kind.m), shape).components
        for _ in range(kind.derived_depth):
            comps = derived_components(shape, comps)
    alg = Algebra(kind, shape, comps)
    _ALGEBRA_CACHE[key] = alg
    return alg


def ideal_closure(alg: Algebra, v: Derivation, stop=None) -> dict:
    """Graded span of v, [L, v], [L, [L, v]], ...; v must be homogeneous.

    Returns label -> Echelon.  If stop(echelons) becomes true the search ends early.
    """
    ctx = alg.shape.ctx
    order = sorted(alg.basis, key=lambda D: min(canonical_degree(a, i, alg.kind) for (a, i) in D.coeffs))
    ech: dict = {}
    queue = [v]
    lab0 = next(iter(alg.split(v)))
    ech[lab0] = Echelon(ctx, [v.coeffs])
    while queue:
        w = queue.pop()
        for D in order:
            br = bracket(D, w)
            if not br:
                continue
            lab = next(iter(alg.split(br)))
            e = ech.setdefault(lab, Echelon(ctx))
            if e.add(br.coeffs):
                queue.append(br)
                if stop is not None and stop(ech):
                    return ech
    return ech


def is_ideal_free(alg: Algebra, cap: int = 2000) -> bool:
    """True iff the ideal generated by each basis vector is the whole algebra."""
    if alg.dim > cap:
        raise DimensionCapExceeded(f"dim {alg.dim} exceeds cap {cap}")
    if alg.dim == 0:
        return False
    v0 = min(alg.basis, key=lambda D: min(canonical_degree(a, i, alg.kind) for (a, i) in D.coeffs))
    full = ideal_closure(alg, v0)
    if sum(e.rank for e in full.values()) != alg.dim:
        return False
    lab0 = next(iter(alg.split(v0)))

    def reached(ech):
        e = ech.get(lab0)
        return e is not None and e.contains(v0.coeffs)

    def degree(D):
        return min(canonical_degree(a, i, alg.kind) for (a, i) in D.coeffs)

    lowering = [D for D in alg.basis if degree(D) < 0]
    for v in alg.basis:
        # [D, v] with D of negative degree stays in the ideal of v
        w = v
        while True:
            for D in lowering:
                br = bracket(D, w)
                if br:
                    w = br
                    break
            else:
                break
        got = ideal_closure(alg, w, stop=reached)
        if not reached(got):
            return False
    return True
