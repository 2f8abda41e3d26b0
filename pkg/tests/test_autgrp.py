import random

import pytest
from hypothesis import given, strategies as st

from cartanmod.autgrp import (
    ContAut,
    compose,
    conjugate,
    flag_layers,
    flag_levels,
    form_multiplier,
    in_aut_group,
    is_admissible,
    is_monomial,
    k_shape_data,
    lam,
    normalizes_torus,
    pairing,
    phi_conjugate,
    respects_flag,
    symplectic_multiplier,
    torus_multiplier,
)
from cartanmod.dpa import DpaElement, monomials
from cartanmod.errors import ExcludedConfiguration, InvalidAutomorphism, KindConstraintViolation
from cartanmod.liealg import Derivation, apply, bracket, build_algebra, witt_basis
from cartanmod.sampling import random_admissible, random_monomial, unipotent

from conftest import shape_of


def x(shape, i, c=1):
    return DpaElement.var(shape, i, c)


def random_aut(shape, rng):
    """Random element of A(m; n) with n = (1, ..., 1): invertible linear part plus higher terms."""
    ctx = shape.ctx
    m = shape.m
    while True:
        A = [[rng.randrange(ctx.q) for _ in range(m)] for _ in range(m)]
        images = []
        for i in range(m):
            y = DpaElement(shape, {shape.eps(j): A[i][j] for j in range(m)})
            for a in monomials(shape):
                if sum(a) >= 2 and rng.random() < 0.15:
                    y = y + DpaElement.monomial(shape, a, rng.randrange(ctx.q))
            images.append(y)
        psi = ContAut(shape, images)
        if psi.is_valid():
            return psi


def test_action_on_divided_square():
    shape = shape_of(5, (1, 1))
    psi = ContAut(shape, [x(shape, 0) + x(shape, 1), x(shape, 1)])
    # (x1 + x2)^2 / 2 = x1^2/2 + x1 x2 + x2^2/2
    want = DpaElement(shape, {(2, 0): 1, (1, 1): 1, (0, 2): 1})
    assert psi.act(DpaElement.monomial(shape, (2, 0))) == want


def test_action_preserves_products():
    rng = random.Random(3)
    shape = shape_of(3, (1, 1))
    psi = random_aut(shape, rng)
    ms = monomials(shape)
    for a in ms:
        for b in ms:
            f, g = DpaElement.monomial(shape, a), DpaElement.monomial(shape, b)
            assert psi.act(f * g) == psi.act(f) * psi.act(g)


@given(seed=st.integers(0, 10 ** 6))
def test_inverse_and_composition(seed):
    rng = random.Random(seed)
    shape = shape_of(5, (1, 1))
    psi, phi = random_aut(shape, rng), random_aut(shape, rng)
    ident = ContAut.identity(shape)
    assert compose(psi, psi.inverse()) == ident
    assert compose(psi.inverse(), psi) == ident
    f = DpaElement(shape, {a: rng.randrange(5) for a in monomials(shape)})
    assert compose(psi, phi).act(f) == psi.act(phi.act(f))


def test_linear_compose_matches_operator_product():
    shape = shape_of(5, (1, 1))
    psi = ContAut.linear(shape, [[1, 1], [1, 4]])
    phi = ContAut.linear(shape, [[2, 0], [3, 1]])
    general = ContAut(shape, [psi.act(y) for y in phi.images])
    assert compose(psi, phi) == general


def test_phi_swap_sends_d1_to_d2():
    shape = shape_of(5, (1, 1))
    swap = ContAut.monomial(shape, [1, 0], [1, 1])
    assert phi_conjugate(swap, Derivation.d(shape, 0)) == Derivation.d(shape, 1)


@given(seed=st.integers(0, 10 ** 6))
def test_phi_is_conjugation_of_operators(seed):
    rng = random.Random(seed)
    shape = shape_of(5, (1, 1))
    psi = random_aut(shape, rng)
    D = Derivation(shape, {(a, i): rng.randrange(5) for a in monomials(shape) for i in range(2)
                           if rng.random() < 0.2})
    image = phi_conjugate(psi, D)
    inv = psi.inverse()
    for a in monomials(shape):
        f = DpaElement.monomial(shape, a)
        assert apply(image, f) == psi.act(apply(D, inv.act(f)))


@given(seed=st.integers(0, 10 ** 6))
def test_phi_preserves_bracket(seed):
    rng = random.Random(seed)
    shape = shape_of(3, (1, 1))
    psi = random_aut(shape, rng)
    W = witt_basis(shape)
    D, E = rng.choice(W), rng.choice(W)
    assert phi_conjugate(psi, bracket(D, E)) == bracket(phi_conjugate(psi, D), phi_conjugate(psi, E))


def test_phi_excluded_at_p3_rank_one():
    shape = shape_of(3, (1,))
    with pytest.raises(ExcludedConfiguration):
        phi_conjugate(ContAut.diagonal(shape, [2]), Derivation.d(shape, 0))


@pytest.mark.parametrize("tag,n", [("W", (1, 1)), ("S", (1, 1, 1)), ("H", (1, 1)), ("K", (1, 1, 1))])
def test_torus_multiplier_on_basis(tag, n):
    shape = shape_of(5, n)
    ctx = shape.ctx
    rng = random.Random(11)
    t = random_admissible(ctx, shape.m, tag, rng)
    assert is_admissible(ctx, t, tag)
    psi = lam(shape, t)
    for (a, i) in [(a, i) for a in monomials(shape) for i in range(shape.m)]:
        D = Derivation.monomial(shape, a, i)
        c = 1
        for tj, aj in zip(t, a):
            c = c * tj ** aj % 5
        c = c * pow(t[i], 3, 5) % 5
        assert torus_multiplier(a, i, t, ctx) == c
        assert phi_conjugate(psi, D) == D.scale(c)


def test_admissibility():
    ctx = shape_of(5, (1,)).ctx
    assert is_admissible(ctx, (2, 3), "H")
    assert is_admissible(ctx, (2, 2), "H")
    assert not is_admissible(ctx, (2, 3, 4, 4), "H")
    assert is_admissible(ctx, (2, 3, 1), "K")
    assert not is_admissible(ctx, (2, 3, 2), "K")
    assert not is_admissible(ctx, (0, 1), "W")


def test_kind_membership():
    shape = shape_of(5, (1, 1, 1))
    assert in_aut_group(ContAut.diagonal(shape, [2, 3, 4]), "S")
    assert not in_aut_group(ContAut.diagonal(shape, [2, 3, 4]), "K")
    assert in_aut_group(ContAut.diagonal(shape, [2, 3, 1]), "K")
    assert form_multiplier(ContAut.diagonal(shape, [2, 3, 4]), "S") == 4
    h = shape_of(5, (1, 1))
    assert in_aut_group(ContAut.monomial(h, [1, 0], [2, 2]), "H")
    assert symplectic_multiplier(h.ctx, ContAut.monomial(h, [1, 0], [2, 2]).operator_matrix()) == 1
    with pytest.raises(KindConstraintViolation):
        in_aut_group(ContAut.identity(h), "K")


def test_contact_shape_with_beta_term_is_not_contact():
    shape = shape_of(5, (1, 1, 1))
    ym = x(shape, 2) + DpaElement.monomial(shape, (1, 1, 0), 3)
    psi = ContAut(shape, [x(shape, 0), x(shape, 1), ym])
    perm, alphas, alpha_m, betas = k_shape_data(psi)
    assert (perm, alphas, alpha_m, betas) == ([0, 1], [1, 1], 1, [3])
    assert psi.is_valid()
    assert not in_aut_group(psi, "K")


def test_flag_structure():
    n = (2, 1, 2, 1)
    assert flag_levels(n) == [frozenset({0, 2}), frozenset({0, 1, 2, 3})]
    assert flag_layers(n) == [[0, 2], [1, 3]]
    # operator column j holds psi(x_j): x_2 -> x_1 is fine, x_1 -> x_2 is not
    assert respects_flag([[1, 1], [0, 1]], (2, 1))
    assert not respects_flag([[1, 0], [1, 1]], (2, 1))


def test_validity_rules():
    shape = shape_of(5, (1, 2))
    ok = ContAut(shape, [x(shape, 0) + DpaElement.monomial(shape, (0, 5)), x(shape, 1)])
    assert ok.is_valid()
    bad_shape = shape_of(5, (2, 1))
    bad = ContAut(bad_shape, [x(bad_shape, 0) + x(bad_shape, 1), x(bad_shape, 1)])
    assert not bad.is_valid()
    with pytest.raises(InvalidAutomorphism):
        bad.check()
    const = ContAut(shape, [x(shape, 0) + DpaElement.one(shape), x(shape, 1)])
    assert "constant" in " ".join(const.validity_errors())
    singular = ContAut(shape, [x(shape, 0), x(shape, 0)])
    assert not singular.is_valid()


def test_monomial_membership():
    shape = shape_of(5, (1, 1))
    assert is_monomial(ContAut.monomial(shape, [1, 0], [2, 3]))
    assert not is_monomial(ContAut(shape, [x(shape, 0) + x(shape, 1), x(shape, 1)]))
    mixed = shape_of(5, (2, 1))
    assert not is_monomial(ContAut.monomial(mixed, [1, 0], [1, 1]))


def test_orders():
    shape = shape_of(5, (1, 1))
    assert ContAut.diagonal(shape, [2, 1]).order() == 4
    assert ContAut.monomial(shape, [1, 0], [1, 1]).order() == 2
    assert unipotent(shape, 0, 1).order() == 5
    psi = ContAut.diagonal(shape, [2, 3])
    assert psi.power(4) == ContAut.identity(shape)
    assert psi.power(-1) == psi.inverse()


@given(seed=st.integers(0, 10 ** 6))
def test_normalizer_elements(seed):
    rng = random.Random(seed)
    for tag, n in [("W", (1, 1)), ("H", (1, 1, 1, 1)), ("K", (1, 1, 1))]:
        shape = shape_of(5, n)
        g = random_monomial(shape, tag, rng)
        assert normalizes_torus(g, tag)
        assert in_aut_group(g, tag)
        t = random_admissible(shape.ctx, shape.m, tag, rng)
        image = conjugate(g, lam(shape, t))
        assert image.is_diagonal()
        assert is_admissible(shape.ctx, image.diagonal_entries(), tag)


def test_unipotent_does_not_normalize():
    shape = shape_of(5, (1, 1))
    assert not normalizes_torus(unipotent(shape, 0, 1), "W")


def test_pairing_values():
    ctx = shape_of(5, (1,)).ctx
    e = lambda i: [1 if j == i else 0 for j in range(4)]
    assert pairing(ctx, 2, e(0), e(2)) == 1
    assert pairing(ctx, 2, e(2), e(0)) == 4
    assert pairing(ctx, 2, e(0), e(1)) == 0


def test_torus_preserves_subalgebra():
    shape = shape_of(5, (1, 1))
    alg = build_algebra("H2", shape)
    psi = lam(shape, (2, 3))
    for D in alg.basis:
        assert alg.contains(phi_conjugate(psi, D))
