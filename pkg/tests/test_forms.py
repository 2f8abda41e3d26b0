import random

import pytest
from hypothesis import given, strategies as st

from cartanmod.autgrp import ContAut
from cartanmod.dpa import DpaElement, monomials
from cartanmod.errors import NoFormForW, ParityMismatch
from cartanmod.forms import (
    DifferentialForm,
    d_function,
    derivation_action,
    exterior_d,
    multiple_of,
    omega,
    omega_H_on,
    proportional_to,
    pullback,
    wedge,
)
from cartanmod.liealg import Derivation, apply, build_algebra

from conftest import shape_of


def random_function(shape, rng, density=0.4):
    ctx = shape.ctx
    return DpaElement(shape, {a: rng.randrange(ctx.q) for a in monomials(shape) if rng.random() < density})


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("r", [1, 2])
def test_d_omega_K_is_twice_omega_H(p, r):
    shape = shape_of(p, (1,) * (2 * r + 1))
    got = exterior_d(omega("K", shape))
    # by hand: d(sigma(i) x_i dx_i') summed over i gives 2 sum_{i<r} dx_i ^ dx_{i+r}
    want = DifferentialForm.zero(shape)
    for i in range(r):
        want = want + DifferentialForm.dx(shape, i, i + r).scale(2)
    assert got == want
    assert got == omega_H_on(shape, r).scale(2)


def test_omega_coordinates():
    shape = shape_of(5, (1, 1, 1))
    assert omega("S", shape) == DifferentialForm.dx(shape, 0, 1, 2)
    wk = omega("K", shape)
    assert wk.coeff((2,)) == DpaElement.one(shape)
    assert wk.coeff((1,)) == DpaElement.var(shape, 0)
    assert wk.coeff((0,)) == DpaElement.var(shape, 1, 4)


def test_form_kind_errors():
    with pytest.raises(NoFormForW):
        omega("W", shape_of(5, (1, 1)))
    with pytest.raises(ParityMismatch):
        omega("H", shape_of(5, (1, 1, 1)))
    with pytest.raises(ParityMismatch):
        omega("K", shape_of(5, (1, 1)))
    with pytest.raises(ParityMismatch):
        omega("S", shape_of(5, (1, 1)))


def test_dx_antisymmetric():
    shape = shape_of(5, (1, 1, 1))
    assert DifferentialForm.dx(shape, 1, 0) == -DifferentialForm.dx(shape, 0, 1)
    assert not DifferentialForm.dx(shape, 1, 1)


@given(seed=st.integers(0, 10 ** 6))
def test_d_squared_is_zero(seed):
    rng = random.Random(seed)
    shape = shape_of(3, (1, 2))
    f = random_function(shape, rng)
    assert not exterior_d(d_function(f))


@given(seed=st.integers(0, 10 ** 6))
def test_d_of_function_matches_partials(seed):
    rng = random.Random(seed)
    shape = shape_of(5, (1, 1))
    f = random_function(shape, rng)
    df = d_function(f)
    from cartanmod.dpa import partial
    for i in range(2):
        assert df.coeff((i,)) == partial(f, i)


@given(seed=st.integers(0, 10 ** 6))
def test_lie_derivative_commutes_with_d(seed):
    rng = random.Random(seed)
    shape = shape_of(3, (1, 1, 1))
    D = Derivation.from_components([random_function(shape, rng, 0.2) for _ in range(3)])
    f = random_function(shape, rng, 0.3)
    w = wedge(DifferentialForm.function(f), DifferentialForm.dx(shape, 0))
    assert derivation_action(D, exterior_d(w)) == exterior_d(derivation_action(D, w))
    # on functions the Lie derivative is D itself
    assert derivation_action(D, DifferentialForm.function(f)) == DifferentialForm.function(apply(D, f))


@pytest.mark.parametrize("tag,n", [("S", (1, 1, 1)), ("H", (1, 1)), ("H", (1, 1, 1, 1))])
def test_basis_annihilates_form(tag, n):
    shape = shape_of(5, n)
    alg = build_algebra(tag, shape)
    om = omega(tag, shape)
    for D in alg.basis:
        assert not derivation_action(D, om)


def test_contact_basis_rescales_form():
    shape = shape_of(5, (1, 1, 1))
    alg = build_algebra("K", shape)
    om = omega("K", shape)
    for D in alg.basis:
        assert multiple_of(derivation_action(D, om), om) is not None
    # d_1 alone is not contact: it sends omega_K to dx_2 only
    assert multiple_of(derivation_action(Derivation.d(shape, 0), om), om) is None


def test_pullback_of_linear_symplectic():
    shape = shape_of(5, (1, 1))
    ctx = shape.ctx
    # x1 -> x2, x2 -> -x1 preserves dx1 ^ dx2
    psi = ContAut.monomial(shape, [1, 0], [1, ctx.neg(1)])
    om = omega("H", shape)
    assert pullback(psi, om) == om
    # x1 -> 2 x1 rescales by 2
    psi = ContAut.diagonal(shape, [2, 1])
    assert proportional_to(pullback(psi, om), om) == 2


def test_pullback_contact_multiplier_is_unit():
    shape = shape_of(5, (1, 1, 1))
    psi = ContAut.diagonal(shape, [2, 3, 1])
    om = omega("K", shape)
    u = proportional_to(pullback(psi, om), om, unit=True)
    assert u == DpaElement.one(shape)
    psi = ContAut.diagonal(shape, [2, 2, 4])
    assert proportional_to(pullback(psi, om), om, unit=True) == DpaElement.constant(shape, 4)
    psi = ContAut.diagonal(shape, [2, 1, 1])
    assert proportional_to(pullback(psi, om), om, unit=True) is None


@given(seed=st.integers(0, 10 ** 6))
def test_pullback_is_multiplicative(seed):
    rng = random.Random(seed)
    shape = shape_of(5, (1, 1, 1))
    psi = ContAut.diagonal(shape, [rng.randrange(1, 5) for _ in range(3)])
    a = wedge(DifferentialForm.function(random_function(shape, rng, 0.2)), DifferentialForm.dx(shape, 1))
    b = DifferentialForm.dx(shape, 2)
    assert pullback(psi, wedge(a, b)) == wedge(pullback(psi, a), pullback(psi, b))
