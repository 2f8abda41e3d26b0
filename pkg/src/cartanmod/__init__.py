"""Graded Cartan type Lie algebras in characteristic p, their gradings and tori."""

from .autgrp import ContAut, in_aut_group, is_monomial, phi_conjugate
from .dpa import DpaElement, Shape
from .errors import CartanModError
from .field import FieldCtx, get_field
from .grading import (
    FgAbelianGroup,
    Grading,
    GroupHom,
    QuasiTorusRep,
    grading_from_quasitorus,
    gradings_isomorphic,
    quasitorus_from_grading,
    standard_grading,
    verify_grading,
)
from .liealg import AlgebraKind, Derivation, bracket, build_algebra

__all__ = [
    "AlgebraKind", "CartanModError", "ContAut", "Derivation", "DpaElement", "FgAbelianGroup",
    "FieldCtx", "Grading", "GroupHom", "QuasiTorusRep", "Shape", "bracket", "build_algebra",
    "get_field", "grading_from_quasitorus", "gradings_isomorphic", "in_aut_group", "is_monomial",
    "phi_conjugate", "quasitorus_from_grading", "standard_grading", "verify_grading",
]
