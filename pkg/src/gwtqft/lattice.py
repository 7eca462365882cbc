"""Integral lattices: Smith normal form, discriminant groups, metric maps, signature.

Matrices are plain lists of rows with Fraction (or int) entries. Vectors in a
lattice's dual are written in the dual basis, so the image of the metric
map kappa_flat is spanned by the rows of the Gram matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterator, Sequence

from .scalar import to_fraction

__all__ = [
    "Matrix",
    "LatticeError",
    "NonInteger",
    "Degenerate",
    "NotSymmetric",
    "as_matrix",
    "identity",
    "transpose",
    "mat_mul",
    "mat_vec",
    "vec_mat",
    "determinant",
    "inverse",
    "SmithDecomposition",
    "smith_normal_form",
    "DiscriminantGroup",
    "discriminant_group",
    "MetricMaps",
    "metric_maps",
    "is_even_integral",
    "Signature",
    "signature",
]

Matrix = list[list[Fraction]]


class LatticeError(ValueError):
    pass


class NonInteger(LatticeError):
    pass


class Degenerate(LatticeError):
    pass


class NotSymmetric(LatticeError):
    pass


# ------------------------------------------------------------------ helpers


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[to_fraction(x) for x in row] for row in rows]


def identity(r: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(r)] for i in range(r)]


def transpose(m: Matrix) -> Matrix:
    return [list(col) for col in zip(*m)] if m else []


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def mat_vec(a: Matrix, v: Sequence) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def vec_mat(v: Sequence, a: Matrix) -> list[Fraction]:
    return [sum((x * row[j] for x, row in zip(v, a)), Fraction(0)) for j in range(len(a[0]))] if a else []


def determinant(m: Matrix) -> Fraction:
    a = [list(map(Fraction, row)) for row in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    a = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            raise Degenerate("matrix is not invertible")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [row[n:] for row in a]


def _require_integer(m: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in m:
        r = []
        for x in row:
            f = to_fraction(x)
            if f.denominator != 1:
                raise NonInteger(f"entry {f} is not an integer")
            r.append(int(f))
        out.append(r)
    return out


# ------------------------------------------------------------------ Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """B = left * diag(diagonal) * right with left, right unimodular."""

    left: tuple[tuple[int, ...], ...]
    diagonal: tuple[int, ...]
    right: tuple[tuple[int, ...], ...]

    def check(self, b: Sequence[Sequence]) -> bool:
        k, r = len(self.left), len(self.right)
        d = [[Fraction(self.diagonal[i]) if i == j else Fraction(0) for j in range(r)] for i in range(k)]
        prod_ = mat_mul(mat_mul(as_matrix(self.left), d), as_matrix(self.right))
        return prod_ == as_matrix(b)


def smith_normal_form(b: Sequence[Sequence]) -> SmithDecomposition:
    """Smith form of an integer matrix (rectangular allowed; the diagonal has min(rows, cols) entries).

    Works on A with the invariant B = X A Y: a row operation A <- E A updates
    X <- X E^-1 and a column operation A <- A F updates Y <- F^-1 Y. The pivot
    is the entry of least nonzero absolute value, earliest in row-major order.
    """
    a = _require_integer(b)
    k = len(a)
    r = len(a[0]) if a else 0
    x = [[int(i == j) for j in range(k)] for i in range(k)]
    y = [[int(i == j) for j in range(r)] for i in range(r)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        for row in x:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        y[i], y[j] = y[j], y[i]

    def add_row(dst: int, src: int, f: int) -> None:
        # row_dst += f * row_src; X gets column_src -= f * column_dst
        a[dst] = [u + f * v for u, v in zip(a[dst], a[src])]
        for row in x:
            row[src] -= f * row[dst]

    def add_col(dst: int, src: int, f: int) -> None:
        # col_dst += f * col_src; Y gets row_src -= f * row_dst
        for row in a:
            row[dst] += f * row[src]
        y[src] = [u - f * v for u, v in zip(y[src], y[dst])]

    for t in range(min(k, r)):
        while True:
            best = None
            for i in range(t, k):
                for j in range(t, r):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = a[t][t]
            dirty = False
            for i in range(t + 1, k):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, r):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, k) for j in range(t + 1, r) if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-v for v in a[t]]
            for row in x:
                row[t] = -row[t]
    return SmithDecomposition(
        left=tuple(tuple(row) for row in x),
        diagonal=tuple(a[i][i] for i in range(min(k, r))),
        right=tuple(tuple(row) for row in y),
    )


# ------------------------------------------------------------------ discriminant groups


@dataclass(frozen=True)
class DiscriminantGroup:
    """Gamma^dual / im(kappa_flat), in dual-basis coordinates.

    ``factors`` keeps every Smith diagonal entry (1s included) so that
    ``generators[i]`` has order ``factors[i]``; ``invariant_factors`` drops the 1s.
    """

    gram: tuple[tuple[int, ...], ...]
    smith: SmithDecomposition
    factors: tuple[int, ...]
    generators: tuple[tuple[int, ...], ...]

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.factors if d != 1)

    @property
    def order(self) -> int:
        return prod(self.factors)

    def elements(self) -> Iterator[tuple[int, ...]]:
        """All elements sum_i c_i delta_i with 0 <= c_i < d_i, in dual-basis coordinates."""
        r = len(self.factors)
        for cs in itertools.product(*(range(d) for d in self.factors)):
            yield tuple(sum(c * g[j] for c, g in zip(cs, self.generators)) for j in range(r))

    def contains_zero_class(self, v: Sequence) -> bool:
        """Whether a dual-lattice vector lies in im(kappa_flat), i.e. is zero in D."""
        # v = w Y with w_i divisible by d_i
        yinv = inverse(as_matrix(self.smith.right))
        w = vec_mat([to_fraction(t) for t in v], yinv)
        return all(c.denominator == 1 and int(c) % d == 0 for c, d in zip(w, self.factors))

    def equivalent(self, u: Sequence, v: Sequence) -> bool:
        return self.contains_zero_class([to_fraction(a) - to_fraction(b) for a, b in zip(u, v)])


def discriminant_group(b: Sequence[Sequence]) -> DiscriminantGroup:
    ints = _require_integer(b)
    if determinant(as_matrix(ints)) == 0:
        raise Degenerate("Gram matrix is degenerate")
    snf = smith_normal_form(ints)
    return DiscriminantGroup(
        gram=tuple(tuple(row) for row in ints),
        smith=snf,
        factors=snf.diagonal,
        generators=snf.right,
    )


# ------------------------------------------------------------------ metric maps


@dataclass(frozen=True)
class MetricMaps:
    gram: tuple[tuple[Fraction, ...], ...]
    dual_gram: tuple[tuple[Fraction, ...], ...]

    def kappa_flat(self, gamma: Sequence) -> list[Fraction]:
        """kappa_flat(gamma) in dual-basis coordinates."""
        return vec_mat([to_fraction(t) for t in gamma], [list(r) for r in self.gram])

    def kappa_sharp(self, lam: Sequence) -> list[Fraction]:
        return vec_mat([to_fraction(t) for t in lam], [list(r) for r in self.dual_gram])

    def kappa_dual(self, lam: Sequence, mu: Sequence) -> Fraction:
        """lam^T B^-1 mu."""
        lam = [to_fraction(t) for t in lam]
        mu = [to_fraction(t) for t in mu]
        return sum((x * y for x, y in zip(vec_mat(lam, [list(r) for r in self.dual_gram]), mu)), Fraction(0))

    @property
    def is_even_integral(self) -> bool:
        return is_even_integral(self.gram)


def metric_maps(b: Sequence[Sequence]) -> MetricMaps:
    m = as_matrix(b)
    if any(m[i][j] != m[j][i] for i in range(len(m)) for j in range(len(m))):
        raise NotSymmetric("Gram matrix is not symmetric")
    if determinant(m) == 0:
        raise Degenerate("Gram matrix is degenerate")
    return MetricMaps(gram=tuple(map(tuple, m)), dual_gram=tuple(map(tuple, inverse(m))))


def is_even_integral(b: Sequence[Sequence]) -> bool:
    m = as_matrix(b)
    return all(x.denominator == 1 for row in m for x in row) and all(m[i][i] % 2 == 0 for i in range(len(m)))


# ------------------------------------------------------------------ signature


@dataclass(frozen=True)
class Signature:
    positives: int
    negatives: int
    zeros: int

    @property
    def value(self) -> int:
        return self.positives - self.negatives


def signature(m: Sequence[Sequence]) -> Signature:
    """Inertia by symmetric Gaussian elimination.

    A zero pivot with a nonzero off-diagonal entry a_ij is handled by the
    congruence row_i += row_j, col_i += col_j when a_jj == 0 (which creates the
    pivot 2 a_ij), else by swapping in the nonzero diagonal entry.
    """
    a = as_matrix(m)
    n = len(a)
    if any(a[i][j] != a[j][i] for i in range(n) for j in range(n)):
        raise NotSymmetric("matrix is not symmetric")
    pos = neg = 0
    size = n
    while size:
        k = size - 1
        # find a usable pivot in the leading size x size block
        diag = next((i for i in range(size) if a[i][i] != 0), None)
        if diag is None:
            off = next(((i, j) for i in range(size) for j in range(size) if i != j and a[i][j] != 0), None)
            if off is None:
                break
            i, j = off
            # hyperbolic pair: replace e_i by e_i + e_j, giving diagonal entry 2 a_ij
            for c in range(size):
                a[i][c] += a[j][c]
            for r in range(size):
                a[r][i] += a[r][j]
            diag = i
        # move the pivot to position k
        a[diag], a[k] = a[k], a[diag]
        for row in a:
            row[diag], row[k] = row[k], row[diag]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k):
            f = a[i][k] / p
            if f:
                for c in range(size):
                    a[i][c] -= f * a[k][c]
        for r in range(k):
            a[r][k] = Fraction(0)
        size -= 1
    return Signature(pos, neg, n - pos - neg)
