"""Small dense linear algebra over Q(E)."""

from __future__ import annotations

from .ratfunc import RationalFunction


def rref(rows: list[list[RationalFunction]]) -> tuple[list[list[RationalFunction]], list[int]]:
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                fac = M[i][c]
                M[i] = [a - fac * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def nullspace(rows: list[list[RationalFunction]], ncols: int) -> list[list[RationalFunction]]:
    """Basis of {v : rows . v = 0}."""
    if not rows:
        return [[RationalFunction(1 if i == j else 0) for i in range(ncols)] for j in range(ncols)]
    R, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [RationalFunction() for _ in range(ncols)]
        v[fc] = RationalFunction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fc]
        basis.append(v)
    return basis
