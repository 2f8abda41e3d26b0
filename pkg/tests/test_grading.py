import random

import pytest
from hypothesis import given, strategies as st

from cartanmod import linalg
from cartanmod.autgrp import ContAut, lam
from cartanmod.dpa import DpaElement
from cartanmod.errors import (
    GroupMismatch,
    NonfiniteGroup,
    NotSemisimple,
    RelationViolation,
    TorsionIncompatible,
)
from cartanmod.field import get_field, root_of_unity
from cartanmod.grading import (
    FgAbelianGroup,
    Grading,
    GroupHom,
    GroupMap,
    QuasiTorusRep,
    canonical_grading,
    canonical_z_grading,
    coarsen,
    grading_from_quasitorus,
    gradings_equivalent,
    gradings_isomorphic,
    lift_grading,
    quasitorus_from_grading,
    standard_grading,
    verify_grading,
)
from cartanmod.liealg import Derivation, apply, build_algebra
from cartanmod.sampling import random_group, random_hom

from conftest import shape_of


def conjugated_operator(psi, D):
    """Coordinates of psi o D o psi^-1, read off from its values on x_1..x_m."""
    shape = psi.shape
    inv = psi.inverse()
    comps = [psi.act(apply(D, inv.act(DpaElement.var(shape, j)))) for j in range(shape.m)]
    return Derivation.from_components(comps)


def eigenspace_dims(alg, psi, e):
    """dim ker(Phi(psi) - zeta^k) for k < e, by plain linear algebra on the W-coordinates."""
    ctx = alg.shape.ctx
    keys = sorted({k for D in alg.basis for k in D.coeffs})
    col = {k: i for i, k in enumerate(keys)}
    # matrix of Phi(psi) restricted to the algebra, in the algebra basis
    B = [[D.coeffs.get(k, 0) for k in keys] for D in alg.basis]
    images = [[conjugated_operator(psi, D).coeffs.get(k, 0) for k in keys] for D in alg.basis]
    zeta = root_of_unity(ctx, e)
    dims = {}
    for k in range(e):
        lam_k = ctx.pow(zeta, k)
        rows = [[ctx.sub(x, ctx.mul(lam_k, y)) for x, y in zip(img, b)] for img, b in zip(images, B)]
        # kernel of the map c -> sum_i c_i (Phi(D_i) - lam D_i)
        dims[k] = len(alg.basis) - linalg.rank(ctx, rows)
    return {k: v for k, v in dims.items() if v}


def test_z4_grading_of_witt_matches_eigenspaces():
    shape = shape_of(5, (1, 1))
    alg = build_algebra("W", shape)
    G = FgAbelianGroup(0, (4,), 5)
    hom = GroupHom(G, ((1,), (3,)))
    gr = standard_grading(alg, G, hom)
    assert verify_grading(gr)
    zeta = root_of_unity(shape.ctx, 4)
    psi = lam(shape, (zeta, shape.ctx.pow(zeta, 3)))
    oracle = eigenspace_dims(alg, psi, 4)
    assert {g[0]: d for g, d in gr.dims().items()} == oracle
    assert sum(oracle.values()) == 50


def test_z4_on_wide_flag():
    shape = shape_of(5, (2, 1))
    alg = build_algebra("W", shape)
    G = FgAbelianGroup(0, (4,), 5)
    gr = standard_grading(alg, G, GroupHom(G, ((1,), (2,))))
    assert verify_grading(gr)
    assert sum(gr.dims().values()) == alg.dim == 2 * 125


@pytest.mark.parametrize("tag,n", [("W", (1, 1)), ("S1", (1, 1, 1)), ("H2", (1, 1)), ("K1", (1, 1, 1))])
def test_random_standard_gradings_verify(tag, n):
    rng = random.Random(7)
    shape = shape_of(5, n)
    alg = build_algebra(tag, shape)
    for _ in range(3):
        G = random_group(5, rng)
        gr = standard_grading(alg, G, random_hom(shape.m, tag, G, rng))
        assert verify_grading(gr)
        assert gr.dim == alg.dim


def test_moved_vector_fails_verification():
    shape = shape_of(5, (1, 1))
    alg = build_algebra("W", shape)
    G = FgAbelianGroup(1, (), 5)
    gr = standard_grading(alg, G, GroupHom(G, ((1,), (1,))))
    comps = {g: list(v) for g, v in gr.components.items()}
    d1 = Derivation.d(shape, 0)
    comps[(-1,)] = [D for D in comps[(-1,)] if D != d1]
    comps[(0,)] = comps[(0,)] + [d1]
    cert = verify_grading(Grading(alg, G, comps))
    assert not cert
    assert "not in" in cert.reason


def test_incomplete_and_dependent_components_fail():
    shape = shape_of(5, (1, 1))
    alg = build_algebra("W", shape)
    G = FgAbelianGroup(1, (), 5)
    gr = canonical_z_grading(alg)
    comps = dict(gr.components)
    dropped = comps.pop((0,))
    assert "span" in verify_grading(Grading(alg, G, comps)).reason
    comps[(0,)] = dropped
    comps[(1,)] = comps[(1,)] + [dropped[0]]
    assert not verify_grading(Grading(alg, G, comps))


@pytest.mark.parametrize("tag,n", [("W", (1, 1)), ("H2", (1, 1)), ("K1", (1, 1, 1))])
def test_canonical_z_grading(tag, n):
    alg = build_algebra(tag, shape_of(5, n))
    gr = canonical_z_grading(alg)
    assert verify_grading(gr)
    assert min(g[0] for g in gr.support) == (-2 if tag.startswith("K") else -1)


def test_canonical_multigrading():
    alg = build_algebra("S1", shape_of(5, (1, 1, 1)))
    gr = canonical_grading(alg)
    assert verify_grading(gr)
    assert gr.group.rank == 3


def test_coarsen_matches_composed_hom():
    shape = shape_of(5, (1, 1))
    alg = build_algebra("W", shape)
    Z2 = FgAbelianGroup(2, (), 5)
    gr = canonical_grading(alg)
    Z4 = FgAbelianGroup(0, (4,), 5)
    q = GroupMap(Z2, Z4, ((1,), (3,)))
    coarse = coarsen(gr, q)
    direct = standard_grading(alg, Z4, GroupHom(Z4, ((1,), (3,))))
    assert coarse.same_as(direct)
    with pytest.raises(GroupMismatch):
        coarsen(gr, GroupMap(Z4, Z4, ((1,),)))


@given(seed=st.integers(0, 10 ** 6))
def test_round_trip_through_quasitorus(seed):
    rng = random.Random(seed)
    tag, n = rng.choice([("W", (1, 1)), ("H2", (1, 1)), ("K1", (1, 1, 1))])
    shape = shape_of(5, n)
    alg = build_algebra(tag, shape)
    G = random_group(5, rng, finite=True)
    gr = standard_grading(alg, G, random_hom(shape.m, tag, G, rng))
    back = grading_from_quasitorus(quasitorus_from_grading(gr), alg)
    assert back.group.same_as(G)
    assert back.same_as(gr)


def test_round_trip_when_images_generate_subgroup():
    shape = shape_of(5, (1, 1))
    alg = build_algebra("W", shape)
    G = FgAbelianGroup(0, (4,), 5)
    gr = standard_grading(alg, G, GroupHom(G, ((2,), (0,))))
    Q = quasitorus_from_grading(gr)
    assert Q.orders == [4] and Q.gens[0].order() == 2
    assert grading_from_quasitorus(Q, alg).same_as(gr)


def test_declared_orders_must_be_multiples():
    shape = shape_of(5, (1, 1))
    with pytest.raises(NotSemisimple):
        QuasiTorusRep([ContAut.diagonal(shape, (2, 1))], "W", orders=[2])


def test_free_group_has_no_quasitorus():
    alg = build_algebra("W", shape_of(5, (1, 1)))
    with pytest.raises(NonfiniteGroup):
        quasitorus_from_grading(canonical_z_grading(alg))


def test_relations_enforced():
    G = FgAbelianGroup(1, (), 5)
    alg = build_algebra("H2", shape_of(5, (1, 1)))
    GroupHom(G, ((1,), (2,))).check_relations("H")
    with pytest.raises(RelationViolation):
        GroupHom(G, ((1,), (2,), (1,), (1,))).check_relations("H")
    with pytest.raises(RelationViolation):
        GroupHom(G, ((1,), (2,), (4,))).check_relations("K")
    kalg = build_algebra("K1", shape_of(5, (1, 1, 1)))
    with pytest.raises(RelationViolation):
        standard_grading(kalg, G, GroupHom(G, ((1,), (2,), (4,))))
    assert verify_grading(standard_grading(alg, G, GroupHom(G, ((1,), (2,)))))


def test_group_arithmetic():
    G = FgAbelianGroup(1, (4, 3), 5)
    assert G.add((1, 3, 2), (2, 3, 2)) == (3, 2, 1)
    assert G.neg((1, 1, 1)) == (-1, 3, 2)
    assert G.mul_int(4, (1, 1, 1)) == (4, 0, 1)
    assert G.exponent == 12 and not G.is_finite
    with pytest.raises(TorsionIncompatible):
        FgAbelianGroup(0, (5,), 5)
    with pytest.raises(TorsionIncompatible):
        G.normalize((1, 2))


def test_isomorphism_certificates():
    shape = shape_of(5, (1, 1))
    alg = build_algebra("W", shape)
    G = FgAbelianGroup(1, (), 5)
    gr1 = standard_grading(alg, G, GroupHom(G, ((1,), (0,))))
    gr2 = standard_grading(alg, G, GroupHom(G, ((0,), (1,))))
    swap = ContAut.monomial(shape, [1, 0], [1, 1])
    assert gradings_isomorphic(gr1, gr2, swap)
    assert not gradings_isomorphic(gr1, gr2, ContAut.identity(shape))
    assert gradings_isomorphic(gr1, gr1, lam(shape, (2, 3)))
    neg = GroupMap(G, G, ((-1,),))
    gr3 = standard_grading(alg, G, GroupHom(G, ((-1,), (0,))))
    assert gradings_equivalent(gr1, gr3, ContAut.identity(shape), neg)
    with pytest.raises(GroupMismatch):
        gradings_isomorphic(gr1, canonical_grading(alg), swap)


def test_lifted_grading_verifies():
    shape = shape_of(5, (1, 1))
    alg = build_algebra("H2", shape)
    G = FgAbelianGroup(0, (3,), 5)
    gr = standard_grading(alg, G, GroupHom(G, ((1,), (2,))))
    up = lift_grading(gr, get_field(5, 2))
    assert verify_grading(up)
    assert up.dims() == gr.dims()
    Q = quasitorus_from_grading(up)
    assert grading_from_quasitorus(Q).same_as(up)


def test_witt_line_identity_hom():
    alg = build_algebra("W", shape_of(5, (1,)))
    Z = FgAbelianGroup(1, (), 5)
    gr = standard_grading(alg, Z, GroupHom(Z, ((1,),)))
    assert gr.support == [(d,) for d in range(-1, 4)]
    assert set(gr.dims().values()) == {1}


def test_zero_hom_gives_trivial_grading():
    alg = build_algebra("H2", shape_of(5, (1, 1)))
    G = FgAbelianGroup(0, (3,), 5)
    gr = standard_grading(alg, G, GroupHom(G, ((0,), (0,))))
    assert gr.dims() == {(0,): alg.dim}


def test_coarsen_line_mod_two():
    alg = build_algebra("W", shape_of(5, (1,)))
    Z = FgAbelianGroup(1, (), 5)
    gr = standard_grading(alg, Z, GroupHom(Z, ((1,),)))
    Z2 = FgAbelianGroup(0, (2,), 5)
    coarse = coarsen(gr, GroupMap(Z, Z2, ((1,),)))
    # degrees -1..3: odd ones are -1, 1, 3
    assert coarse.dims() == {(1,): 3, (0,): 2}
    assert verify_grading(coarse)


def test_summing_coordinates_gives_canonical_z_grading():
    alg = build_algebra("W", shape_of(5, (1, 1)))
    Z = FgAbelianGroup(1, (), 5)
    gr = coarsen(canonical_grading(alg), GroupMap(FgAbelianGroup(2, (), 5), Z, ((1,), (1,))))
    assert gr.same_as(canonical_z_grading(alg))


def test_order_four_torus_on_witt_line():
    shape = shape_of(5, (1,))
    alg = build_algebra("W", shape)
    zeta = root_of_unity(shape.ctx, 4)
    gr = grading_from_quasitorus(QuasiTorusRep([lam(shape, (zeta,))], "W"), alg)
    Z = FgAbelianGroup(1, (), 5)
    line = standard_grading(alg, Z, GroupHom(Z, ((1,),)))
    Z4 = FgAbelianGroup(0, (4,), 5)
    assert gr.same_as(coarsen(line, GroupMap(Z, Z4, ((1,),))))
    assert len(gr.components) == 4


def test_swap_quasitorus_matches_eigenspaces():
    shape = shape_of(5, (1, 1))
    alg = build_algebra("W", shape)
    swap = ContAut.monomial(shape, [1, 0], [1, 1])
    gr = grading_from_quasitorus(QuasiTorusRep([swap], "W"), alg)
    assert verify_grading(gr)
    assert {g[0]: d for g, d in gr.dims().items()} == eigenspace_dims(alg, swap, 2)


@pytest.mark.parametrize("p", [3, 5])
def test_support_generates_hom_image(p):
    rng = random.Random(p)
    alg = build_algebra("W", shape_of(p, (1, 1)))
    G = FgAbelianGroup(0, (4,) if p != 3 else (2,), p)
    for _ in range(5):
        hom = random_hom(2, "W", G, rng)
        gr = standard_grading(alg, G, hom)
        assert verify_grading(gr)
        d = G.torsion[0]
        reach = {0}
        for g in gr.support:
            reach = {(x + k * g[0]) % d for x in reach for k in range(d)}
        image = {(a * hom.images[0][0] + b * hom.images[1][0]) % d for a in range(d) for b in range(d)}
        assert reach == image
