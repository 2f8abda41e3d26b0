"""Random test inputs: admissible tori, normalizer elements, homs, quasi-tori."""

from __future__ import annotations

import random
from math import gcd

from .autgrp import ContAut, compose, conjugate
from .dpa import DpaElement, Shape
from .grading import FgAbelianGroup, GroupHom
from .liealg import AlgebraKind, prime


def _family(kind) -> str:
    return kind.family if isinstance(kind, AlgebraKind) else str(kind)[0]


def _nonzero(ctx, rng: random.Random) -> int:
    return rng.randrange(1, ctx.q)


def random_admissible(ctx, m: int, kind, rng: random.Random, multiplier=None) -> tuple:
    """Random X-admissible t; for H/K, multiplier fixes the common value of t_i t_i'."""
    fam = _family(kind)
    if fam in ("W", "S"):
        return tuple(_nonzero(ctx, rng) for _ in range(m))
    r = m // 2
    c = _nonzero(ctx, rng) if multiplier is None else multiplier
    t = [0] * m
    for i in range(r):
        t[i] = _nonzero(ctx, rng)
        t[i + r] = ctx.div(c, t[i])
    if fam == "K":
        t[m - 1] = c
    return tuple(t)


def _class_perm(values, idx, rng):
    """Random permutation of idx that preserves values[i]."""
    out = {}
    for v in sorted({values[i] for i in idx}):
        cls = [i for i in idx if values[i] == v]
        img = cls[:]
        rng.shuffle(img)
        out.update(zip(cls, img))
    return out


def random_monomial(shape: Shape, kind, rng: random.Random, multiplier=None) -> ContAut:
    """Random element of the torus normalizer (flag-respecting monomial shape).

    For H/K, multiplier fixes the scalar by which omega_H is rescaled.
    """
    ctx, n, m = shape.ctx, shape.n, shape.m
    fam = _family(kind)
    if fam in ("W", "S"):
        perm = _class_perm(n, range(m), rng)
        return ContAut.monomial(shape, [perm[i] for i in range(m)],
                                [_nonzero(ctx, rng) for _ in range(m)])
    r = m // 2
    pairs = [(n[i], n[i + r]) for i in range(r)]
    # permute pairs with equal (n_i, n_i') and optionally swap inside a pair
    keyed = [tuple(sorted(pp)) for pp in pairs]
    pperm = _class_perm(keyed, range(r), rng)
    perm = [0] * m
    flips = []
    for i in range(r):
        j = pperm[i]
        flip = False
        if (n[i], n[i + r]) != (n[j], n[j + r]):
            flip = True
        elif n[i] == n[i + r]:
            flip = rng.random() < 0.5
        perm[i], perm[i + r] = (j + r, j) if flip else (j, j + r)
        flips.append(flip)
    c = _nonzero(ctx, rng) if multiplier is None else multiplier
    coeffs = [0] * m
    for i in range(r):
        coeffs[i] = _nonzero(ctx, rng)
        want = ctx.neg(c) if flips[i] else c
        coeffs[i + r] = ctx.div(want, coeffs[i])
    if fam == "K":
        perm[m - 1] = m - 1
        coeffs[m - 1] = c
    return ContAut.monomial(shape, perm, coeffs)


def _perm_order(perm) -> int:
    seen, out = set(), 1
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        out = out * length // gcd(out, length)
    return out


def centralizing_torus_element(g: ContAut, kind, rng: random.Random, multiplier=None) -> ContAut:
    """Product of the g-conjugates of a random admissible torus element."""
    shape = g.shape
    s = ContAut.diagonal(shape, random_admissible(shape.ctx, shape.m, kind, rng, multiplier))
    perm = [next(iter(y.terms)).index(1) for y in g.images]
    acc = ContAut.identity(shape)
    cur = s
    for _ in range(_perm_order(perm)):
        acc = compose(acc, cur)
        cur = conjugate(g, cur)
    return acc


def random_quasitorus_gens(shape: Shape, kind, rng: random.Random, ngens: int = 2, max_order: int = 1000,
                           multiplier=None):
    """Commuting normalizer elements of order prime to p.

    The first is a random monomial; the rest are torus elements fixed by it.
    With multiplier=1 and kind H every generator is symplectic.
    """
    p = shape.p
    while True:
        g = random_monomial(shape, kind, rng, multiplier)
        e = g.order(cap=max_order * 10)
        if gcd(e, p) == 1 and e <= max_order:
            break
    gens = [g]
    for _ in range(ngens - 1):
        gens.append(centralizing_torus_element(g, kind, rng, multiplier))
    return gens


def random_hom(m: int, kind, group: FgAbelianGroup, rng: random.Random, span: int = 5) -> GroupHom:
    """Random hom Z^m -> group satisfying the H/K relations."""
    fam = _family(kind)

    def rnd():
        return tuple(rng.randrange(-span, span + 1) for _ in range(group.ngens))

    if fam in ("W", "S"):
        return GroupHom(group, tuple(rnd() for _ in range(m)))
    r = m // 2
    c = rnd()
    imgs = [None] * m
    for i in range(r):
        imgs[i] = rnd()
        imgs[prime(i, r)] = tuple(a - b for a, b in zip(c, imgs[i]))
    if fam == "K":
        imgs[m - 1] = c
    return GroupHom(group, tuple(imgs))


def random_group(p: int, rng: random.Random, finite: bool = False) -> FgAbelianGroup:
    orders = [d for d in range(2, 9) if gcd(d, p) == 1]
    choice = rng.randrange(3) if not finite else 1 + rng.randrange(2)
    if choice == 0:
        return FgAbelianGroup(1, (), p)
    if choice == 1:
        return FgAbelianGroup(0, (rng.choice(orders),), p)
    if finite:
        return FgAbelianGroup(0, (rng.choice(orders), rng.choice(orders)), p)
    return FgAbelianGroup(1, (rng.choice(orders),), p)


def unipotent(shape: Shape, i: int, j: int) -> ContAut:
    """x_i -> x_i + x_j, an automorphism of order p (when n_i <= n_j)."""
    images = [DpaElement.var(shape, k) for k in range(shape.m)]
    images[i] = images[i] + DpaElement.var(shape, j)
    return ContAut(shape, images)
