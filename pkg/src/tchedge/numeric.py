"""Small exact-linear-algebra helpers shared by the cone and dual code."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ValidationError

Vector = tuple[Fraction, ...]


def as_fraction(v) -> Fraction:
    """Exact rational from int, Fraction, ``"p/q"`` string or float.

    Floats go through their shortest repr so ``0.1`` becomes ``1/10``.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise ValidationError(f"not a number: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if v != v or v in (float("inf"), float("-inf")):
            raise ValidationError(f"non-finite number {v}")
        return Fraction(repr(v))
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational number: {v!r}") from exc
    try:
        return Fraction(int(v.numerator), int(v.denominator))
    except AttributeError as exc:
        raise ValidationError(f"not a number: {v!r}") from exc


def as_vector(values: Iterable) -> Vector:
    return tuple(as_fraction(v) for v in values)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), 0 * a[0] if a else 0)


def unit(d: int, i: int) -> Vector:
    return tuple(Fraction(1) if k == i else Fraction(0) for k in range(d))


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (rows, pivot columns)."""
    mat = [[Fraction(v) for v in r] for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        pv = mat[r][c]
        mat[r] = [v / pv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subset, greedy in order."""
    chosen: list[int] = []
    basis: list[Sequence] = []
    for i, v in enumerate(vectors):
        if len(rref(basis + [v])[0]) > len(basis):
            basis.append(v)
            chosen.append(i)
    return chosen


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Rational basis of ``{x : r.x = 0 for every row r}``."""
    if not rows:
        return [tuple(Fraction(int(k == i)) for k in range(ncols)) for i in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        out.append(tuple(x))
    return out
