"""JSON encoding for field elements, O(m; n), derivations, automorphisms and gradings.

Axes are 1-based in JSON.  Coefficients are always coefficient arrays over F_p.
"""

from __future__ import annotations

import re

from .autgrp import ContAut
from .dpa import DpaElement, Shape
from .field import FieldCtx, get_field
from .grading import FgAbelianGroup, Grading, GroupHom
from .liealg import Derivation

SCHEMA = "cartan-mod/1"


def field_to_json(ctx: FieldCtx) -> dict:
    out = {"p": ctx.p, "k": ctx.k}
    if ctx.k > 1:
        out["modulus"] = list(ctx.modulus)
    return out


def field_from_json(d: dict) -> FieldCtx:
    p, k = int(d["p"]), int(d.get("k", 1))
    if k == 1 or "modulus" not in d:
        return get_field(p, k)
    ctx = get_field(p, k)
    if list(ctx.modulus) == list(d["modulus"]):
        return ctx
    return FieldCtx(p, k, modulus=tuple(d["modulus"]))


def scalar_to_json(ctx: FieldCtx, c: int) -> list:
    coeffs = ctx.to_coeffs(c)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def scalar_from_json(ctx: FieldCtx, c) -> int:
    if isinstance(c, int):
        return c % ctx.p
    coeffs = list(c) + [0] * (ctx.k - len(c))
    if len(coeffs) > ctx.k:
        raise ValueError(f"coefficient array {c} too long for {ctx}")
    return ctx.from_coeffs([x % ctx.p for x in coeffs])


def shape_to_json(shape: Shape) -> dict:
    out = field_to_json(shape.ctx)
    out["n"] = list(shape.n)
    return out


def shape_from_json(d: dict) -> Shape:
    return Shape(field_from_json(d), d["n"])


def dpa_to_json(f: DpaElement, with_shape: bool = True) -> dict:
    ctx = f.shape.ctx
    terms = [{"a": list(a), "c": scalar_to_json(ctx, c)}
             for a, c in sorted(f.terms.items(), key=lambda t: (sum(t[0]), t[0]))]
    out = {"terms": terms}
    if with_shape:
        out = {"shape": shape_to_json(f.shape), **out}
    return out


def dpa_from_json(d: dict, shape: Shape | None = None) -> DpaElement:
    if shape is None:
        shape = shape_from_json(d["shape"])
    ctx = shape.ctx
    return DpaElement(shape, {tuple(t["a"]): scalar_from_json(ctx, t["c"]) for t in d["terms"]})


def derivation_to_json(D: Derivation) -> dict:
    ctx = D.shape.ctx
    keys = sorted(D.coeffs, key=lambda k: (k[1], sum(k[0]), k[0]))
    return {"terms": [{"a": list(a), "d": i + 1, "c": scalar_to_json(ctx, D.coeffs[(a, i)])} for a, i in keys]}


def derivation_from_json(d: dict, shape: Shape) -> Derivation:
    ctx = shape.ctx
    return Derivation(shape, {(tuple(t["a"]), int(t["d"]) - 1): scalar_from_json(ctx, t["c"]) for t in d["terms"]})


def aut_to_json(psi: ContAut) -> dict:
    return {"shape": shape_to_json(psi.shape), "tuple": [dpa_to_json(y, with_shape=False) for y in psi.images]}


def aut_from_json(d: dict, shape: Shape | None = None) -> ContAut:
    if shape is None:
        shape = shape_from_json(d["shape"])
    return ContAut(shape, [dpa_from_json(y, shape) for y in d["tuple"]])


_MONO = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*(?::\s*(-?\d+))?\s*$")


def parse_monomial(text: str, shape: Shape) -> ContAut:
    """Compact form "1->2:3, 2->1:2": x_1 -> 3 x_2, x_2 -> 2 x_1; unlisted axes fixed."""
    ctx = shape.ctx
    perm = list(range(shape.m))
    coeffs = [1] * shape.m
    for part in text.split(","):
        if not part.strip():
            continue
        mt = _MONO.match(part)
        if not mt:
            raise ValueError(f"cannot parse monomial map {part!r}")
        i, j = int(mt.group(1)) - 1, int(mt.group(2)) - 1
        if not (0 <= i < shape.m and 0 <= j < shape.m):
            raise ValueError(f"axis out of range in {part!r}")
        perm[i] = j
        coeffs[i] = int(mt.group(3) or 1) % ctx.p
    if sorted(perm) != list(range(shape.m)):
        raise ValueError(f"{text!r} does not define a permutation")
    if not all(coeffs):
        raise ValueError(f"zero coefficient in {text!r}")
    return ContAut.monomial(shape, perm, coeffs)


def aut_from_any(item, shape: Shape) -> ContAut:
    if isinstance(item, str):
        return parse_monomial(item, shape)
    if "tuple" in item:
        return aut_from_json(item, shape)
    raise ValueError("generator must be a compact monomial string or {\"tuple\": [...]}")


def group_to_json(G: FgAbelianGroup) -> dict:
    return G.to_json()


def group_from_json(d: dict, p: int | None = None) -> FgAbelianGroup:
    return FgAbelianGroup(int(d.get("rank", 0)), tuple(d.get("torsion", ())), p)


def grading_to_json(gr: Grading) -> dict:
    comps = [{"degree": list(g), "basis": [derivation_to_json(D) for D in gr.components[g]]}
             for g in sorted(gr.components)]
    out = {
        "kind": gr.algebra.kind.tag,
        "shape": shape_to_json(gr.shape),
        "group": group_to_json(gr.group),
        "components": comps,
    }
    if gr.hom is not None:
        out["hom"] = [list(g) for g in gr.hom.images]
    return out


def grading_from_json(d: dict) -> Grading:
    from .liealg import build_algebra
    shape = shape_from_json(d["shape"])
    alg = build_algebra(d["kind"], shape)
    group = group_from_json(d["group"], shape.p)
    comps = {}
    for c in d["components"]:
        comps[group.normalize(c["degree"])] = [derivation_from_json(b, shape) for b in c["basis"]]
    hom = GroupHom(group, tuple(tuple(g) for g in d["hom"])) if "hom" in d else None
    return Grading(alg, group, comps, hom=hom)
