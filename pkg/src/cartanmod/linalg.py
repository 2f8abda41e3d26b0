"""Exact linear algebra over a FieldCtx.

Dense matrices are lists of rows of encoded field ints.  Sparse vectors are
dicts key -> nonzero value, where keys are any mutually comparable hashables.
"""

from __future__ import annotations

from .field import FieldCtx


# -- sparse vectors ---------------------------------------------------------

def vadd(ctx: FieldCtx, u: dict, v: dict, c: int = 1) -> dict:
    """u + c*v as a new dict."""
    out = dict(u)
    for key, val in v.items():
        val = ctx.mul(c, val) if c != 1 else val
        s = ctx.add(out.get(key, 0), val)
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return out


def vaxpy(ctx: FieldCtx, out: dict, v: dict, c: int = 1) -> None:
    """out += c*v in place."""
    add, mul = ctx.add, ctx.mul
    for key, val in v.items():
        if c != 1:
            val = mul(c, val)
        s = add(out.get(key, 0), val)
        if s:
            out[key] = s
        else:
            out.pop(key, None)


def vscale(ctx: FieldCtx, v: dict, c: int) -> dict:
    if c == 0:
        return {}
    if c == 1:
        return dict(v)
    return {k: ctx.mul(c, x) for k, x in v.items()}


class Echelon:
    """Incrementally maintained reduced row echelon basis of a span.

    Every stored row has its pivot (its least key) equal to 1, and no other
    row has a nonzero entry at that pivot.  The row set is therefore a
    canonical description of the span.
    """

    def __init__(self, ctx: FieldCtx, vectors=()):
        self.ctx = ctx
        self.rows: dict = {}
        for v in vectors:
            self.add(v)

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: dict) -> dict:
        ctx = self.ctx
        v = dict(v)
        for piv in sorted(k for k in v if k in self.rows):
            c = v.get(piv, 0)
            if c:
                vaxpy(ctx, v, self.rows[piv], ctx.neg(c))
        return v

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    def add(self, v: dict) -> bool:
        """Insert v; returns True iff it enlarged the span."""
        ctx = self.ctx
        r = self.reduce(v)
        if not r:
            return False
        piv = min(r)
        r = vscale(ctx, r, ctx.inv(r[piv]))
        for key, row in self.rows.items():
            c = row.get(piv, 0)
            if c:
                self.rows[key] = vadd(ctx, row, r, ctx.neg(c))
        self.rows[piv] = r
        return True

    def canonical(self) -> tuple:
        """Hashable canonical form of the span."""
        return tuple(tuple(sorted(self.rows[k].items())) for k in sorted(self.rows))

    def basis(self) -> list[dict]:
        return [dict(self.rows[k]) for k in sorted(self.rows)]


def span_equal(ctx: FieldCtx, us, vs) -> bool:
    return Echelon(ctx, us).canonical() == Echelon(ctx, vs).canonical()


def independent(ctx: FieldCtx, vectors) -> bool:
    vectors = list(vectors)
    return Echelon(ctx, vectors).rank == len(vectors)


# -- dense matrices ---------------------------------------------------------

def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> list[list[int]]:
    return [[0] * c for _ in range(r)]


def matmul(ctx: FieldCtx, a, b):
    n, m, l = len(a), len(b), len(b[0]) if b else 0
    out = zeros(n, l)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for k in range(m):
            c = ai[k]
            if c:
                bk = b[k]
                for j in range(l):
                    if bk[j]:
                        oi[j] = ctx.add(oi[j], ctx.mul(c, bk[j]))
    return out


def matvec(ctx: FieldCtx, a, v):
    out = []
    for row in a:
        s = 0
        for x, y in zip(row, v):
            if x and y:
                s = ctx.add(s, ctx.mul(x, y))
        out.append(s)
    return out


def transpose(a):
    return [list(r) for r in zip(*a)] if a else []


def rref(ctx: FieldCtx, a):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    a = [list(r) for r in a]
    rows = len(a)
    cols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = ctx.inv(a[r][c])
        a[r] = [ctx.mul(inv, x) for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = ctx.neg(a[i][c])
                a[i] = [ctx.add(x, ctx.mul(f, y)) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(ctx: FieldCtx, a) -> int:
    return len(rref(ctx, a)[1])


def nullspace(ctx: FieldCtx, a, ncols: int | None = None):
    """Basis of {x : a x = 0} as a list of column vectors."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    if not a:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    r, pivots = rref(ctx, a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for i, pc in enumerate(pivots):
            if r[i][f]:
                x[pc] = ctx.neg(r[i][f])
        basis.append(x)
    return basis


def inverse(ctx: FieldCtx, a):
    n = len(a)
    aug = [list(a[i]) + identity(n)[i] for i in range(n)]
    r, pivots = rref(ctx, aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in r]


def det(ctx: FieldCtx, a) -> int:
    a = [list(r) for r in a]
    n = len(a)
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = ctx.neg(d)
        d = ctx.mul(d, a[c][c])
        inv = ctx.inv(a[c][c])
        for i in range(c + 1, n):
            if a[i][c]:
                f = ctx.neg(ctx.mul(a[i][c], inv))
                a[i] = [ctx.add(x, ctx.mul(f, y)) for x, y in zip(a[i], a[c])]
    return d


def mat_eq(a, b) -> bool:
    return [list(r) for r in a] == [list(r) for r in b]


def is_diagonal(a) -> bool:
    return all(a[i][j] == 0 for i in range(len(a)) for j in range(len(a)) if i != j)


def eigenspace(ctx: FieldCtx, a, lam: int, subspace):
    """Vectors of span(subspace) fixed by a up to lam; subspace is a list of vectors."""
    if not subspace:
        return []
    n = len(a)
    shifted = [[ctx.sub(a[i][j], lam if i == j else 0) for j in range(n)] for i in range(n)]
    images = [matvec(ctx, shifted, u) for u in subspace]
    # columns are images of subspace vectors
    coeffs = nullspace(ctx, transpose(images), len(subspace))
    out = []
    for c in coeffs:
        v = [0] * n
        for ci, u in zip(c, subspace):
            if ci:
                v = [ctx.add(x, ctx.mul(ci, y)) for x, y in zip(v, u)]
        out.append(v)
    return out


def joint_eigenspaces(ctx: FieldCtx, mats, eigenvalues, subspace):
    """Split span(subspace) into joint eigenspaces of the commuting mats.

    eigenvalues[g] lists candidate eigenvalues for mats[g].  Returns a dict
    mapping eigenvalue tuples to bases; raises ValueError if the pieces do
    not fill the subspace (non-semisimple input or missing eigenvalues).
    """
    pieces = {(): list(subspace)}
    for a, lams in zip(mats, eigenvalues):
        nxt = {}
        for label, basis in pieces.items():
            for lam in lams:
                sp = eigenspace(ctx, a, lam, basis)
                if sp:
                    nxt[label + (lam,)] = sp
        pieces = nxt
    total = sum(len(b) for b in pieces.values())
    expected = rank(ctx, subspace) if subspace else 0
    if total != expected:
        raise ValueError("subspace is not a sum of joint eigenspaces")
    return pieces
