"""Command-line front end.

    cartanmod info --kind W --p 5 --n 1
    cartanmod verify --kind H2 --p 5 --n 1,1
    cartanmod grade --kind W --p 5 --n 1 --hom "e1->1"
    cartanmod diagonalize --kind H2 --p 5 --n 1,1 --gens gens.json
    cartanmod standardize --kind W --p 5 --n 1,1 --gens swap.json

Exit codes: 0 success, 1 library error or failed check, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from dataclasses import dataclass

from . import serialize
from .autgrp import form_multiplier, is_admissible
from .diag import standardize, diagonalize
from .dpa import Shape
from .errors import CartanModError, ExcludedConfiguration
from .field import get_field, is_prime
from .forms import derivation_action, omega, multiple_of
from .grading import (
    FgAbelianGroup,
    GroupHom,
    QuasiTorusRep,
    canonical_z_grading,
    standard_grading,
    verify_grading,
)
from .liealg import KINDS, AlgebraKind, bracket, build_algebra, is_ideal_free

COMMANDS = ("info", "verify", "grade", "diagonalize", "standardize")


class InputError(ValueError):
    """Malformed command-line input (exit code 2)."""


@dataclass
class JobSpec:
    command: str
    kind: str
    p: int
    n: tuple
    hom: str | None = None
    group: str | None = None
    gens: str | None = None
    out: str | None = None
    seed: int = 0
    trials: int = 100
    fmt: str = "json"
    linear: bool = False

    def validate(self) -> AlgebraKind:
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.kind not in KINDS:
            raise InputError(f"kind must be one of {', '.join(KINDS)}")
        if not is_prime(self.p) or self.p == 2:
            raise InputError(f"p must be an odd prime, got {self.p}")
        if not self.n or any(v < 1 for v in self.n):
            raise InputError(f"n must be a list of positive ints, got {self.n}")
        kind = AlgebraKind(self.kind, len(self.n))
        if self.p == 3:
            if kind.family == "W" and self.n == (1,):
                raise ExcludedConfiguration("W(1;1) at p=3 is an excluded configuration")
            if kind.family == "H" and len(self.n) == 2 and min(self.n) == 1:
                raise ExcludedConfiguration(f"H(2;{self.n}) at p=3 is an excluded configuration")
        if self.command in ("diagonalize", "standardize") and not self.gens:
            raise InputError(f"{self.command} needs --gens")
        return kind

    def shape(self) -> Shape:
        return Shape(get_field(self.p), self.n)


def _parse_n(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise InputError(f"bad --n {text!r}") from exc


def parse_group(text: str | None, width: int, p: int) -> FgAbelianGroup:
    """"Z", "Z^2", "Z/4", "Z,Z/4" (free factors first); default Z^width."""
    if not text:
        return FgAbelianGroup(width, (), p)
    rank, torsion = 0, []
    for part in re.split(r"[,x*]", text.replace(" ", "")):
        if not part:
            continue
        m = re.fullmatch(r"Z(?:\^(\d+))?", part)
        if m:
            if torsion:
                raise InputError("list free factors before torsion factors")
            rank += int(m.group(1) or 1)
            continue
        m = re.fullmatch(r"Z/(\d+)", part)
        if not m:
            raise InputError(f"cannot parse group factor {part!r}")
        torsion.append(int(m.group(1)))
    return FgAbelianGroup(rank, tuple(torsion), p)


_HOM = re.compile(r"e(\d+)\s*->\s*(\(?[-\d\s,]*\)?)")


def parse_hom(text: str, m: int) -> list:
    """"e1->1, e2->(0,3)" -> images of eps_1..eps_m (unlisted axes map to 0)."""
    images: dict = {}
    for mt in _HOM.finditer(text):
        i = int(mt.group(1)) - 1
        if not 0 <= i < m:
            raise InputError(f"e{i + 1} out of range for m={m}")
        body = mt.group(2).strip().strip("()")
        try:
            images[i] = tuple(int(x) for x in body.split(",") if x.strip())
        except ValueError as exc:
            raise InputError(f"bad hom image {mt.group(2)!r}") from exc
    if not images:
        raise InputError(f"cannot parse --hom {text!r}")
    widths = {len(v) for v in images.values()}
    if len(widths) != 1:
        raise InputError("all hom images need the same length")
    w = widths.pop()
    return [images.get(i, (0,) * w) for i in range(m)]


def _load_gens(path: str, shape: Shape) -> list:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [line for line in text.splitlines() if line.strip()]
    if isinstance(data, dict):
        data = data.get("generators", [data])
    if not isinstance(data, list) or not data:
        raise InputError("generator file must hold a non-empty list")
    try:
        return [serialize.aut_from_any(item, shape) for item in data]
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad generator: {exc}") from exc


# -- commands --------------------------------------------------------------------

def cmd_info(job: JobSpec, kind: AlgebraKind) -> dict:
    shape = job.shape()
    alg = build_algebra(kind, shape)
    gr = canonical_z_grading(alg)
    return {
        "kind": job.kind,
        "p": job.p,
        "n": list(job.n),
        "dim": alg.dim,
        "dim_O": shape.dim,
        "dim_W": shape.m * shape.dim,
        "canonical_support": [g[0] for g in gr.support],
        "canonical_dims": {str(g[0]): d for g, d in gr.dims().items()},
    }


def _form_report(alg, kind) -> bool:
    fam = kind.family
    if fam == "W":
        return True
    om = omega(fam, alg.shape)
    for D in alg.basis:
        act = derivation_action(D, om)
        if fam == "K":
            if act and multiple_of(act, om) is None:
                return False
        elif act:
            return False
    return True


def cmd_verify(job: JobSpec, kind: AlgebraKind) -> dict:
    shape = job.shape()
    alg = build_algebra(kind, shape)
    rng = random.Random(job.seed)
    jacobi = anti = 0
    for _ in range(job.trials):
        a, b, c = (alg.random_element(rng) for _ in range(3))
        ab = bracket(a, b)
        if ab + bracket(b, a):
            anti += 1
        if bracket(ab, c) + bracket(bracket(b, c), a) + bracket(bracket(c, a), b):
            jacobi += 1
    closed = all(alg.contains(bracket(alg.random_element(rng), alg.random_element(rng)))
                 for _ in range(min(job.trials, 20)))
    try:
        simple = is_ideal_free(alg)
    except CartanModError as exc:
        simple = f"skipped: {exc}"
    checks = {
        "anticommutativity_failures": anti,
        "jacobi_failures": jacobi,
        "closed_under_bracket": closed,
        "form_membership": _form_report(alg, kind),
        "simple": simple,
    }
    ok = anti == 0 and jacobi == 0 and closed and checks["form_membership"]
    if kind.tag in ("W", "S1", "H2", "K1") and simple is False:
        ok = False
    return {"kind": job.kind, "p": job.p, "n": list(job.n), "dim": alg.dim,
            "trials": job.trials, "checks": checks, "ok": ok}


def cmd_grade(job: JobSpec, kind: AlgebraKind) -> dict:
    if not job.hom:
        raise InputError("grade needs --hom")
    shape = job.shape()
    images = parse_hom(job.hom, shape.m)
    group = parse_group(job.group, len(images[0]), job.p)
    hom = GroupHom(group, tuple(images))
    alg = build_algebra(kind, shape)
    gr = standard_grading(alg, group, hom)
    cert = verify_grading(gr)
    return {"grading": serialize.grading_to_json(gr),
            "dims": [{"degree": list(g), "dim": d} for g, d in gr.dims().items()],
            "verified": cert.ok, "certificate": cert.reason, "ok": cert.ok}


def _result_json(res) -> dict:
    ctx = res.shape.ctx
    mult = form_multiplier(res.conjugator, res.kind) if res.kind.family != "W" else None
    if mult is not None and not isinstance(mult, int):
        mult = serialize.dpa_to_json(mult, with_shape=False)
    elif mult is not None:
        mult = serialize.scalar_to_json(ctx, mult)
    certs = dict(res.certificates)
    certs.setdefault("in_torus", all(g.is_diagonal() and is_admissible(ctx, g.diagonal_entries(), res.kind)
                                     for g in res.images))
    certs["form_multiplier"] = mult
    return {
        "field": serialize.field_to_json(ctx),
        "conjugator": serialize.aut_to_json(res.conjugator),
        "images": [serialize.aut_to_json(g) for g in res.images],
        "alphas": [serialize.scalar_to_json(ctx, a) for a in res.alphas],
        "certificates": certs,
    }


def cmd_diagonalize(job: JobSpec, kind: AlgebraKind) -> dict:
    shape = job.shape()
    gens = _load_gens(job.gens, shape)
    Q = QuasiTorusRep(gens, kind)
    res = diagonalize(Q, require_monomial=not job.linear)
    out = _result_json(res)
    out["ok"] = bool(out["certificates"]["in_torus"])
    return out


def cmd_standardize(job: JobSpec, kind: AlgebraKind) -> dict:
    shape = job.shape()
    gens = _load_gens(job.gens, shape)
    Q = QuasiTorusRep(gens, kind)
    res, gr = standardize(Q, require_monomial=not job.linear)
    out = _result_json(res)
    out["grading"] = serialize.grading_to_json(gr)
    out["dims"] = [{"degree": list(g), "dim": d} for g, d in gr.dims().items()]
    out["ok"] = all(v for k, v in res.certificates.items())
    return out


HANDLERS = {
    "info": cmd_info,
    "verify": cmd_verify,
    "grade": cmd_grade,
    "diagonalize": cmd_diagonalize,
    "standardize": cmd_standardize,
}


def run(job: JobSpec) -> tuple[int, dict]:
    """Execute a job; returns (exit status, report)."""
    try:
        kind = job.validate()
        report = HANDLERS[job.command](job, kind)
    except InputError as exc:
        return 2, {"schema": serialize.SCHEMA, "error": {"type": "InputError", "message": str(exc)}}
    except CartanModError as exc:
        return 1, {"schema": serialize.SCHEMA, "error": {"type": type(exc).__name__, "message": str(exc)}}
    report = {"schema": serialize.SCHEMA, "command": job.command, **report}
    return (0 if report.get("ok", True) else 1), report


def render_text(report: dict) -> str:
    if "error" in report:
        return f"error: {report['error']['type']}: {report['error']['message']}"
    lines = []
    for key, val in report.items():
        if key in ("grading", "conjugator", "images", "schema"):
            continue
        if isinstance(val, dict):
            lines.append(f"{key}:")
            lines.extend(f"  {k}: {v}" for k, v in val.items())
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{key}:")
            lines.extend("  " + ", ".join(f"{k}={v}" for k, v in item.items()) for item in val)
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cartanmod", description="Cartan type Lie algebras, gradings and tori.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--kind", required=True, choices=KINDS)
        sp.add_argument("--p", required=True, type=int)
        sp.add_argument("--n", required=True, type=_parse_n)
        sp.add_argument("--hom", help='images of e_i, e.g. "e1->1, e2->(0,3)"')
        sp.add_argument("--group", help='target group, e.g. "Z/4" or "Z,Z/4" (default Z^k)')
        sp.add_argument("--gens", help="file with generators (JSON list or one compact map per line)")
        sp.add_argument("--linear", action="store_true",
                        help="accept commuting flag-respecting linear generators, not only monomial ones")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=int, default=100)
        sp.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = JobSpec(command=args.command, kind=args.kind, p=args.p, n=args.n, hom=args.hom,
                  group=args.group, gens=args.gens, out=args.out, seed=args.seed,
                  trials=args.trials, fmt=args.fmt, linear=args.linear)
    status, report = run(job)
    text = json.dumps(report, indent=2) if job.fmt == "json" else render_text(report)
    if job.out and status != 2:
        with open(job.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=sys.stderr if status == 2 else sys.stdout)
    return status


if __name__ == "__main__":
    sys.exit(main())
