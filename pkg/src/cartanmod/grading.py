"""Group gradings on Cartan type algebras and the quasi-torus dictionary."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .autgrp import ContAut, compose, in_aut_group, phi_conjugate
from .dpa import DpaElement, Shape
from .errors import (
    GroupMismatch,
    NonCommuting,
    NonfiniteGroup,
    NotInAutGroup,
    NotSemisimple,
    RelationViolation,
    TorsionIncompatible,
)
from .field import FieldCtx, degree_for_orders, get_field, root_of_unity
from .liealg import (
    Algebra,
    Derivation,
    bracket,
    build_algebra,
    canonical_degree,
    multidegree,
    prime,
)
from .linalg import Echelon, vaxpy, vscale


@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^rank x Z/d_1 x ... x Z/d_s with every d_j > 1 prime to p."""

    rank: int = 0
    torsion: tuple = ()
    p: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.rank < 0:
            raise TorsionIncompatible("rank must be non-negative")
        for d in self.torsion:
            if d < 2:
                raise TorsionIncompatible(f"torsion orders must exceed 1, got {d}")
            if self.p is not None and gcd(d, self.p) != 1:
                raise TorsionIncompatible(f"Z/{d} has elements of order p={self.p}")

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def exponent(self) -> int:
        e = 1
        for d in self.torsion:
            e = e * d // gcd(e, d)
        return e

    def normalize(self, g) -> tuple:
        g = tuple(int(x) for x in g)
        if len(g) != self.ngens:
            raise TorsionIncompatible(f"element {g} has wrong length for {self}")
        return g[: self.rank] + tuple(x % d for x, d in zip(g[self.rank:], self.torsion))

    def zero(self) -> tuple:
        return (0,) * self.ngens

    def add(self, g, h) -> tuple:
        return self.normalize(tuple(x + y for x, y in zip(g, h)))

    def neg(self, g) -> tuple:
        return self.normalize(tuple(-x for x in g))

    def mul_int(self, k: int, g) -> tuple:
        return self.normalize(tuple(k * x for x in g))

    def same_as(self, other) -> bool:
        return self.rank == other.rank and self.torsion == other.torsion

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


@dataclass
class GroupHom:
    """Homomorphism Z^m -> G given by the images of eps_1, ..., eps_m."""

    group: FgAbelianGroup
    images: tuple

    def __post_init__(self):
        self.images = tuple(self.group.normalize(g) for g in self.images)

    @property
    def m(self) -> int:
        return len(self.images)

    def __call__(self, v) -> tuple:
        acc = self.group.zero()
        for c, g in zip(v, self.images):
            if c:
                acc = self.group.add(acc, self.group.mul_int(c, g))
        return acc

    def check_relations(self, family: str) -> None:
        """Raise RelationViolation unless the hom factors through the H/K quotient."""
        if family in ("W", "S"):
            return
        m = self.m
        r = m // 2
        G = self.group
        sums = {G.add(self.images[i], self.images[prime(i, r)]) for i in range(r)}
        if len(sums) > 1:
            raise RelationViolation("images of eps_i + eps_i' differ")
        if family == "K" and sums != {self.images[m - 1]}:
            raise RelationViolation("eps_i + eps_i' must map to the image of eps_m")


@dataclass
class GroupMap:
    """Homomorphism between FgAbelianGroups, given on the generators of the source."""

    source: FgAbelianGroup
    target: FgAbelianGroup
    images: tuple

    def __post_init__(self):
        self.images = tuple(self.target.normalize(g) for g in self.images)
        if len(self.images) != self.source.ngens:
            raise TorsionIncompatible("need one image per source generator")
        for d, g in zip(self.source.torsion, self.images[self.source.rank:]):
            if self.target.mul_int(d, g) != self.target.zero():
                raise TorsionIncompatible(f"image {g} of a Z/{d} generator has wrong order")

    def __call__(self, g) -> tuple:
        acc = self.target.zero()
        for c, img in zip(g, self.images):
            if c:
                acc = self.target.add(acc, self.target.mul_int(c, img))
        return acc


@dataclass
class Grading:
    algebra: Algebra
    group: FgAbelianGroup
    components: dict
    hom: GroupHom | None = None
    quasitorus: "QuasiTorusRep | None" = None
    _echelons: dict = field(default_factory=dict, repr=False)

    @property
    def shape(self) -> Shape:
        return self.algebra.shape

    @property
    def support(self) -> list:
        return sorted(self.components)

    def dims(self) -> dict:
        return {g: len(b) for g, b in sorted(self.components.items())}

    @property
    def dim(self) -> int:
        return sum(len(b) for b in self.components.values())

    def echelon(self, g) -> Echelon:
        e = self._echelons.get(g)
        if e is None:
            e = Echelon(self.shape.ctx, [D.coeffs for D in self.components.get(g, [])])
            self._echelons[g] = e
        return e

    def canonical(self) -> dict:
        return {g: self.echelon(g).canonical() for g in self.components}

    def same_as(self, other: "Grading") -> bool:
        return self.group.same_as(other.group) and self.canonical() == other.canonical()

    def degree_of(self, D: Derivation):
        """Degree of a homogeneous element, or None."""
        for g in self.components:
            if self.echelon(g).contains(D.coeffs):
                return g
        return None


def _make_grading(alg, group, buckets, **kw) -> Grading:
    ctx = alg.shape.ctx
    comps = {}
    for g, vecs in buckets.items():
        e = Echelon(ctx, [v.coeffs for v in vecs])
        if e.rank:
            comps[g] = [Derivation._raw(alg.shape, row) for row in e.basis()]
    return Grading(alg, group, comps, **kw)


def class_representative(alg: Algebra, label) -> tuple:
    D = alg.components[label][0]
    a, i = next(iter(D.coeffs))
    return multidegree(a, i)


def standard_grading(alg: Algebra, group: FgAbelianGroup, hom: GroupHom) -> Grading:
    """x^(a) d_k gets degree hom(a - eps_k); intersected with the algebra."""
    if hom.group is not group and not hom.group.same_as(group):
        raise GroupMismatch("hom lands in a different group")
    if hom.m != alg.shape.m:
        raise TorsionIncompatible(f"hom has {hom.m} images, algebra has m={alg.shape.m}")
    hom.check_relations(alg.family)
    buckets: dict = {}
    for label, vecs in alg.components.items():
        g = hom(class_representative(alg, label))
        buckets.setdefault(g, []).extend(vecs)
    return _make_grading(alg, group, buckets, hom=hom)


def canonical_grading(alg: Algebra) -> Grading:
    """The Z^m grading by multidegree a - eps_k (W and S only)."""
    m = alg.shape.m
    group = FgAbelianGroup(m, (), alg.shape.p)
    hom = GroupHom(group, tuple(tuple(1 if j == i else 0 for j in range(m)) for i in range(m)))
    return standard_grading(alg, group, hom)


def canonical_z_grading(alg: Algebra) -> Grading:
    group = FgAbelianGroup(1, (), alg.shape.p)
    buckets: dict = {}
    for D in alg.basis:
        parts: dict = {}
        for (a, i), c in D.coeffs.items():
            parts.setdefault((canonical_degree(a, i, alg.kind),), {})[(a, i)] = c
        for g, part in parts.items():
            buckets.setdefault(g, []).append(Derivation._raw(alg.shape, part))
    return _make_grading(alg, group, buckets)


def coarsen(gr: Grading, q: GroupMap) -> Grading:
    if not q.source.same_as(gr.group):
        raise GroupMismatch("map source differs from the grading group")
    buckets: dict = {}
    for g, vecs in gr.components.items():
        buckets.setdefault(q(g), []).extend(vecs)
    hom = None
    if gr.hom is not None:
        hom = GroupHom(q.target, tuple(q(g) for g in gr.hom.images))
    return _make_grading(gr.algebra, q.target, buckets, hom=hom)


@dataclass
class Certificate:
    ok: bool
    reason: str = ""
    pair: tuple | None = None

    def __bool__(self):
        return self.ok


def verify_grading(gr: Grading) -> Certificate:
    """Direct-sum decomposition of the algebra plus [L_g, L_h] in L_{g+h}."""
    alg = gr.algebra
    ctx = alg.shape.ctx
    G = gr.group
    total = Echelon(ctx)
    for g, vecs in gr.components.items():
        if gr.group.normalize(g) != g:
            return Certificate(False, f"degree {g} is not reduced")
        for D in vecs:
            if not alg.contains(D):
                return Certificate(False, f"component {g} leaves the algebra", (g, D.to_text()))
            if not total.add(D.coeffs):
                return Certificate(False, f"component {g} is not independent of the others", (g, D.to_text()))
    if total.rank != alg.dim:
        return Certificate(False, f"components span {total.rank} of {alg.dim} dimensions")
    degs = sorted(gr.components)
    for x, g in enumerate(degs):
        for h in degs[x:]:
            gh = G.add(g, h)
            target = gr.echelon(gh) if gh in gr.components else None
            A, B = gr.components[g], gr.components[h]
            for s, D in enumerate(A):
                for E in (B[s:] if g == h else B):
                    br = bracket(D, E)
                    if not br:
                        continue
                    if target is None or not target.contains(br.coeffs):
                        return Certificate(False, f"[L_{g}, L_{h}] not in L_{gh}", (D.to_text(), E.to_text()))
    return Certificate(True, "ok")


# -- quasi-tori -----------------------------------------------------------------

class QuasiTorusRep:
    """Commuting automorphisms of finite order prime to p, acting on one algebra kind."""

    def __init__(self, gens, kind, check: bool = True, orders=None):
        """orders, if given, are the orders of the abstract generators; each
        automorphism's own order must divide the declared one."""
        self.gens = list(gens)
        if not self.gens:
            raise ValueError("need at least one generator; use the identity for the trivial group")
        self.shape = self.gens[0].shape
        self.kind = kind
        actual = [g.order() for g in self.gens]
        if orders is None:
            self.orders = actual
        else:
            self.orders = [int(e) for e in orders]
            if len(self.orders) != len(self.gens) or any(e % a for e, a in zip(self.orders, actual)):
                raise NotSemisimple(f"declared orders {self.orders} are not multiples of {actual}")
        if check:
            self.validate()

    def validate(self) -> None:
        p = self.shape.p
        for g, e in zip(self.gens, self.orders):
            if gcd(e, p) != 1:
                raise NotSemisimple(f"generator of order {e} is not semisimple in characteristic {p}")
            if not in_aut_group(g, self.kind):
                raise NotInAutGroup(f"{g} is not in the automorphism group of type {self.kind}")
        for i, g in enumerate(self.gens):
            for h in self.gens[i + 1:]:
                if compose(g, h) != compose(h, g):
                    raise NonCommuting(f"{g} and {h} do not commute")

    @property
    def group(self) -> FgAbelianGroup:
        return FgAbelianGroup(0, tuple(e for e in self.orders if e > 1), self.shape.p)

    def active(self):
        return [(g, e) for g, e in zip(self.gens, self.orders) if e > 1]


def field_with_roots(ctx: FieldCtx, orders) -> FieldCtx:
    """Smallest extension of ctx holding roots of unity of every given order."""
    k = degree_for_orders(ctx.p, orders)
    k = k * ctx.k // gcd(k, ctx.k)
    return ctx if k == ctx.k else get_field(ctx.p, k)


def quasitorus_from_grading(gr: Grading) -> QuasiTorusRep:
    """The diagonal quasi-torus eta(G^) of a finite standard grading.

    Lives over the least extension of the base field containing the needed
    roots of unity.
    """
    if not gr.group.is_finite:
        raise NonfiniteGroup("free factors are not realised by roots of unity")
    if gr.quasitorus is not None:
        return gr.quasitorus
    if gr.hom is None:
        raise ValueError("only standard gradings (with a hom) can be realised")
    ctx = field_with_roots(gr.shape.ctx, gr.group.torsion)
    shape = gr.shape.with_field(ctx)
    gens = []
    for l, d in enumerate(gr.group.torsion):
        zeta = root_of_unity(ctx, d)
        t = [ctx.pow(zeta, g[l]) for g in gr.hom.images]
        gens.append(ContAut.diagonal(shape, t))
    if not gens:
        return QuasiTorusRep([ContAut.identity(shape)], gr.algebra.kind)
    return QuasiTorusRep(gens, gr.algebra.kind, orders=gr.group.torsion)


def _orbit_projections(ctx: FieldCtx, g: ContAut, e: int, zeta: int, vecs):
    """Project each vector onto the zeta^k eigenspaces of Phi(g), k < e."""
    inv_e = ctx.inv(e % ctx.p)
    zpows = [ctx.pow(zeta, j) for j in range(e)]
    out = {k: [] for k in range(e)}
    shape = g.shape
    for v in vecs:
        orbit = [v]
        for _ in range(e - 1):
            orbit.append(phi_conjugate(g, Derivation._raw(shape, orbit[-1])).coeffs)
        back = phi_conjugate(g, Derivation._raw(shape, orbit[-1])).coeffs
        if back != v:
            raise NotSemisimple("generator order does not match its action")
        for k in range(e):
            acc: dict = {}
            for j, w in enumerate(orbit):
                vaxpy(ctx, acc, w, zpows[(-k * j) % e])
            if acc:
                out[k].append(vscale(ctx, acc, inv_e))
    return out


def grading_from_quasitorus(Q: QuasiTorusRep, alg: Algebra | None = None) -> Grading:
    """Simultaneous eigenspace decomposition under Phi of the generators.

    The degree of a joint eigenvector is the tuple of exponents k_l with
    eigenvalue zeta_l^{k_l}, zeta_l the fixed primitive root of order e_l.
    Eigenspaces are computed over a field holding the zeta_l; when every
    component is defined over the field of alg (or of Q) the result is
    brought back down to it.
    """
    base = alg.shape.ctx if alg is not None else Q.shape.ctx
    ctx = field_with_roots(Q.shape.ctx, [e for _, e in Q.active()])
    if base.k > ctx.k:
        ctx = field_with_roots(base, [e for _, e in Q.active()])
    if ctx != Q.shape.ctx:
        Q = QuasiTorusRep([lift_aut(g, ctx) for g in Q.gens], Q.kind, check=False, orders=Q.orders)
    work = alg if alg is not None and alg.shape == Q.shape else build_algebra(
        alg.kind if alg is not None else Q.kind, Q.shape)
    pieces = {(): [D.coeffs for D in work.basis]}
    for g, e in Q.active():
        zeta = root_of_unity(ctx, e)
        nxt = {}
        for label, vecs in pieces.items():
            for k, proj in _orbit_projections(ctx, g, e, zeta, vecs).items():
                ech = Echelon(ctx, proj)
                if ech.rank:
                    nxt[label + (k,)] = ech.basis()
        pieces = nxt
    if sum(len(v) for v in pieces.values()) != work.dim:
        raise NotSemisimple("eigenspaces do not fill the algebra")
    buckets = {g: [Derivation._raw(work.shape, v) for v in vecs] for g, vecs in pieces.items()}
    gr = _make_grading(work, Q.group, buckets, quasitorus=Q)
    if ctx != base:
        target = alg if alg is not None else build_algebra(Q.kind, Q.shape.with_field(base))
        try:
            return descend_grading(gr, target)
        except NotRational:
            return gr
    return gr


def gradings_isomorphic(gr1: Grading, gr2: Grading, psi: ContAut) -> bool:
    """Phi(psi) carries each component of gr1 onto the same-degree component of gr2."""
    return gradings_equivalent(gr1, gr2, psi, None)


def gradings_equivalent(gr1: Grading, gr2: Grading, psi: ContAut, theta: GroupMap | None) -> bool:
    if not gr1.group.same_as(gr2.group):
        raise GroupMismatch(f"{gr1.group} vs {gr2.group}")
    ctx = gr1.shape.ctx
    relabel = (lambda g: g) if theta is None else theta
    if sorted(relabel(g) for g in gr1.components) != sorted(gr2.components):
        return False
    for g, vecs in gr1.components.items():
        imgs = [phi_conjugate(psi, D).coeffs for D in vecs]
        if Echelon(ctx, imgs).canonical() != gr2.echelon(relabel(g)).canonical():
            return False
    return True


# -- field lifting --------------------------------------------------------------

def lift_element(f: DpaElement, shape: Shape) -> DpaElement:
    emb = f.shape.ctx.embedding_into(shape.ctx)
    return DpaElement._raw(shape, {a: emb(c) for a, c in f.terms.items()})


def lift_aut(psi: ContAut, ctx: FieldCtx) -> ContAut:
    shape = psi.shape.with_field(ctx)
    return ContAut(shape, [lift_element(y, shape) for y in psi.images])


def lift_derivation(D: Derivation, shape: Shape) -> Derivation:
    emb = D.shape.ctx.embedding_into(shape.ctx)
    return Derivation._raw(shape, {k: emb(c) for k, c in D.coeffs.items()})


class NotRational(ValueError):
    pass


def descend_grading(gr: Grading, alg: Algebra) -> Grading:
    """Rewrite gr over the smaller field of alg; NotRational if a component is not defined there."""
    small = alg.shape.ctx
    emb = small.embedding_into(gr.shape.ctx)
    back = {emb(a): a for a in small.elements()}
    buckets = {}
    for g, vecs in gr.components.items():
        out = []
        for D in vecs:
            coeffs = {}
            for key, c in D.coeffs.items():
                if c not in back:
                    raise NotRational(f"component {g} is not defined over {small}")
                coeffs[key] = back[c]
            out.append(Derivation._raw(alg.shape, coeffs))
        buckets[g] = out
    return _make_grading(alg, gr.group, buckets, hom=gr.hom, quasitorus=gr.quasitorus)


def lift_grading(gr: Grading, ctx: FieldCtx) -> Grading:
    shape = gr.shape.with_field(ctx)
    alg = build_algebra(gr.algebra.kind, shape)
    buckets = {g: [lift_derivation(D, shape) for D in vecs] for g, vecs in gr.components.items()}
    return _make_grading(alg, gr.group, buckets, hom=gr.hom)
