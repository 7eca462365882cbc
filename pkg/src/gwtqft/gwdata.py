"""Input data (kappa, Q): validation, chi characters, typicality, structure conditions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .lattice import (
    Degenerate,
    as_matrix,
    determinant,
    inverse,
    mat_mul,
    smith_normal_form,
    transpose,
    vec_mat,
)
from .scalar import DEFAULT_Q, Cyclotomic, q_power, quantum_number, to_fraction

__all__ = [
    "Convention",
    "MODIFIED",
    "GWInput",
    "Condition",
    "ValidationReport",
    "SizeLimit",
    "check_input",
    "effective_metric",
    "Typicality",
    "typicality",
    "Subgroup",
    "dual_lattice_of",
    "image_kappa_flat",
    "lattice_in_kernel",
    "check_structure_conditions",
    "weight",
]

MAX_ROOTS = 12

Weight = tuple[Fraction, ...]


def weight(*xs) -> Weight:
    return tuple(to_fraction(x) for x in xs)


class SizeLimit(ValueError):
    pass


@dataclass(frozen=True)
class Convention:
    """How the grouplike generators act.

    ``modified`` selects K_a = q^(2 Z_a) (so the central elements act by
    q^(2 chi_i)); otherwise K_a = q^(Z_a). The quantum parameter is
    q = exp(pi i q_exponent).
    """

    modified: bool = True
    q_exponent: Fraction = DEFAULT_Q

    @property
    def factor(self) -> int:
        return 2 if self.modified else 1

    def q(self, x) -> Cyclotomic:
        return q_power(x, self.q_exponent)

    def qnum(self, x) -> Cyclotomic:
        return quantum_number(x, self.q_exponent)

    @property
    def supports_tqft(self) -> bool:
        return self.modified and self.q_exponent == DEFAULT_Q


MODIFIED = Convention()


@dataclass(frozen=True)
class GWInput:
    """A symmetric invertible r x r metric kappa and an r x n root matrix Q."""

    kappa: tuple[tuple[Fraction, ...], ...]
    Q: tuple[tuple[Fraction, ...], ...]
    convention: Convention = MODIFIED
    _kappa_inv: tuple[tuple[Fraction, ...], ...] = field(init=False, repr=False, compare=False)
    _chi_rows: tuple[tuple[Fraction, ...], ...] = field(init=False, repr=False, compare=False)

    def __init__(self, kappa: Sequence[Sequence], Q: Sequence[Sequence] | None = None,
                 convention: Convention = MODIFIED):
        k = as_matrix(kappa)
        r = len(k)
        if r == 0:
            raise ValueError("rank must be at least 1")
        if any(len(row) != r for row in k):
            raise ValueError("kappa must be square")
        if any(k[i][j] != k[j][i] for i in range(r) for j in range(r)):
            raise ValueError("kappa must be symmetric")
        if determinant(k) == 0:
            raise Degenerate("kappa must be invertible")
        q = as_matrix(Q) if Q else [[] for _ in range(r)]
        if len(q) != r:
            raise ValueError("Q must have one row per basis vector of t")
        n = len(q[0])
        if any(len(row) != n for row in q):
            raise ValueError("Q rows have inconsistent lengths")
        object.__setattr__(self, "kappa", tuple(map(tuple, k)))
        object.__setattr__(self, "Q", tuple(map(tuple, q)))
        object.__setattr__(self, "convention", convention)
        kinv = inverse(k)
        object.__setattr__(self, "_kappa_inv", tuple(map(tuple, kinv)))
        # chi_i(lam) = Q_i^T kappa^-1 lam, so chi is the n x r matrix Q^T kappa^-1
        chi = mat_mul(transpose(q), kinv) if n else []
        object.__setattr__(self, "_chi_rows", tuple(map(tuple, chi)))

    def with_convention(self, convention: Convention) -> "GWInput":
        return GWInput(self.kappa, self.Q, convention)

    @property
    def r(self) -> int:
        return len(self.kappa)

    @property
    def n(self) -> int:
        return len(self.Q[0]) if self.Q else 0

    @property
    def kappa_inv(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._kappa_inv

    def root(self, i: int) -> Weight:
        return tuple(row[i] for row in self.Q)

    def root_sum(self, subset: Sequence[int]) -> Weight:
        return tuple(sum((row[i] for i in subset), Fraction(0)) for row in self.Q)

    def kappa_dual(self, lam: Sequence, mu: Sequence) -> Fraction:
        lam = [to_fraction(x) for x in lam]
        mu = [to_fraction(x) for x in mu]
        v = vec_mat(lam, [list(r) for r in self._kappa_inv])
        return sum((a * b for a, b in zip(v, mu)), Fraction(0))

    def chi(self, lam: Sequence) -> tuple[Fraction, ...]:
        lam = [to_fraction(x) for x in lam]
        return tuple(sum((a * b for a, b in zip(row, lam)), Fraction(0)) for row in self._chi_rows)

    def chi_sum(self, lam: Sequence) -> Fraction:
        return sum(self.chi(lam), Fraction(0))

    def kappa_flat(self, x: Sequence) -> Weight:
        """kappa_flat: t -> t^dual in coordinates."""
        return tuple(vec_mat([to_fraction(t) for t in x], [list(r) for r in self.kappa]))

    def is_typical(self, lam: Sequence) -> bool:
        return typicality(self, lam).typical


# ------------------------------------------------------------------ validation


@dataclass(frozen=True)
class Condition:
    name: str
    passed: bool
    witness: object = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    conditions: tuple[Condition, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failed(self) -> list[Condition]:
        return [c for c in self.conditions if not c.passed]

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def check_input(data: GWInput) -> ValidationReport:
    n = data.n
    if n > MAX_ROOTS:
        raise SizeLimit(f"subset-pair check is limited to n <= {MAX_ROOTS}, got n = {n}")
    conds: list[Condition] = []

    bad = next(((i, j) for i in range(n) for j in range(n)
                if data.kappa_dual(data.root(i), data.root(j)) != 0), None)
    conds.append(Condition("fundamental_identity", bad is None, bad,
                           "" if bad is None else
                           f"kappa_dual(Q_{bad[0]}, Q_{bad[1]}) = {data.kappa_dual(data.root(bad[0]), data.root(bad[1]))}"))

    kinv = data.kappa_inv
    bad = None
    for a in range(data.r):
        for i in range(n):
            v = sum((kinv[a][b] * data.Q[b][i] for b in range(data.r)), Fraction(0))
            if v.denominator != 1:
                bad = (a, i)
                break
        if bad:
            break
    conds.append(Condition("dual_integrality", bad is None, bad))

    bad = next((i for i in range(n) if not any(data.root(i))), None)
    conds.append(Condition("no_zero_root", bad is None, bad))

    # Q_I + Q_J = 0 only for I = J = {}: index all subset sums, then look up -Q_I
    sums: dict[Weight, list[int]] = {}
    for mask in range(1 << n):
        subset = [i for i in range(n) if mask >> i & 1]
        sums.setdefault(data.root_sum(subset), []).append(mask)
    bad = None
    for mask in range(1 << n):
        subset = [i for i in range(n) if mask >> i & 1]
        neg = tuple(-x for x in data.root_sum(subset))
        for other in sums.get(neg, []):
            if mask or other:
                bad = (tuple(subset), tuple(i for i in range(n) if other >> i & 1))
                break
        if bad:
            break
    conds.append(Condition("unimodularity", bad is None, bad))
    return ValidationReport(tuple(conds))


def effective_metric(data: GWInput) -> list[list[Fraction]]:
    """kappa + sum_i Q_i (x) Q_i."""
    r, n = data.r, data.n
    eff = [[data.kappa[a][b] + sum((data.Q[a][i] * data.Q[b][i] for i in range(n)), Fraction(0))
            for b in range(r)] for a in range(r)]
    if determinant(eff) == 0:
        raise Degenerate("effective metric is degenerate")
    return eff


@dataclass(frozen=True)
class Typicality:
    chi: tuple[Fraction, ...]
    typical: bool


def typicality(data: GWInput, lam: Sequence) -> Typicality:
    """Typical iff no E-coefficient [f chi_i]_q vanishes (f = 2 modified, 1 unmodified).

    For q = exp(pi i c) this is f c chi_i not an integer; at q = sqrt(-1) in the
    modified convention, chi_i not an integer.
    """
    chi = data.chi(lam)
    conv = data.convention
    typical = all((conv.factor * conv.q_exponent * x).denominator != 1 for x in chi)
    return Typicality(chi, typical)


# ------------------------------------------------------------------ subgroups of t^dual


def _span_basis(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Row-reduced basis of the rational span of ``rows``."""
    a = [list(r) for r in rows]
    out: list[list[Fraction]] = []
    if not a:
        return out
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return [row for row in a[:r]]


def _annihilator(rows: list[list[Fraction]], dim: int) -> list[list[Fraction]]:
    """Basis (as columns, returned as a list of column vectors) of {x : rows . x = 0}."""
    basis = _span_basis(rows)
    pivots = []
    for row in basis:
        pivots.append(next(j for j, x in enumerate(row) if x != 0))
    free = [j for j in range(dim) if j not in pivots]
    out = []
    for f in free:
        x = [Fraction(0)] * dim
        x[f] = Fraction(1)
        for row, p in zip(basis, pivots):
            x[p] = -row[f]
        out.append(x)
    return out


def _common_denominator(rows: list[list[Fraction]]) -> int:
    from math import lcm

    return lcm(1, *(x.denominator for row in rows for x in row))


@dataclass(frozen=True)
class Subgroup:
    """Z-span of ``discrete`` plus the rational span of ``continuous``, inside t^dual."""

    kind: str
    discrete: tuple[Weight, ...]
    continuous: tuple[Weight, ...] = ()

    @property
    def dim(self) -> int:
        rows = self.discrete + self.continuous
        return len(rows[0]) if rows else 0

    def _quotient_map(self, dim: int) -> list[list[Fraction]]:
        # columns spanning the annihilator of the continuous part
        return _annihilator([list(c) for c in self.continuous], dim)

    def _project(self, v: Sequence, cols: list[list[Fraction]]) -> list[Fraction]:
        return [sum((to_fraction(a) * b for a, b in zip(v, col)), Fraction(0)) for col in cols]

    def contains(self, v: Sequence) -> bool:
        dim = len(v)
        cols = self._quotient_map(dim)
        target = self._project(v, cols)
        if not cols:
            return True
        gens = [self._project(g, cols) for g in self.discrete]
        return _in_integer_span(gens, target)

    def contains_line(self, v: Sequence) -> bool:
        """Whether every rational multiple of v lies in the subgroup."""
        if not self.continuous:
            return not any(to_fraction(x) for x in v)
        base = _span_basis([list(c) for c in self.continuous])
        return len(_span_basis(base + [[to_fraction(x) for x in v]])) == len(base)

    def rank(self) -> tuple[int, int]:
        """(rank of the discrete part modulo the continuous part, dimension of the continuous part)."""
        dim = self.dim
        cont = len(_span_basis([list(c) for c in self.continuous]))
        cols = self._quotient_map(dim)
        gens = [self._project(g, cols) for g in self.discrete]
        return len(_span_basis(gens)) if gens else 0, cont


def _in_integer_span(gens: list[list[Fraction]], target: list[Fraction]) -> bool:
    if not any(target):
        return True
    if not gens:
        return False
    den = _common_denominator(gens + [target])
    m = [[int(x * den) for x in g] for g in gens]
    t = [x * den for x in target]
    snf = smith_normal_form(m)
    # rows of M span {w D Y}; write t = w' Y and test w'_i in d_i Z
    yinv = inverse(as_matrix(snf.right))
    w = vec_mat(t, yinv)
    d = list(snf.diagonal) + [0] * (len(w) - len(snf.diagonal))
    for wi, di in zip(w, d):
        if di == 0:
            if wi != 0:
                return False
        elif wi.denominator != 1 or int(wi) % di:
            return False
    return True


def dual_lattice_of(data_or_dim, basis: Sequence[Sequence]) -> Subgroup:
    """{lam : lam(gamma) in Z for every gamma in the lattice spanned by ``basis``}.

    When ``basis`` has fewer than r vectors the result has a continuous part: the
    annihilator of the lattice.
    """
    g = as_matrix(basis)
    r = data_or_dim.r if isinstance(data_or_dim, GWInput) else int(data_or_dim)
    k = len(g)
    gram = mat_mul(g, transpose(g))
    ginv = inverse(gram)
    # L = (G G^T)^-1 G satisfies G L^T = I
    lrows = mat_mul(ginv, g)
    cont = _annihilator(g, r)
    return Subgroup("dual_lattice_of", tuple(tuple(row) for row in lrows), tuple(tuple(c) for c in cont))


def image_kappa_flat(data: GWInput, basis: Sequence[Sequence]) -> Subgroup:
    g = as_matrix(basis)
    return Subgroup("image_kappa_flat", tuple(data.kappa_flat(row) for row in g))


def lattice_in_kernel(data: GWInput, vectors: Sequence[Sequence], rational_span: bool = True) -> Subgroup:
    """A subgroup spanned by vectors of ker chi; rationally (a whole subspace) or integrally."""
    v = tuple(tuple(to_fraction(x) for x in row) for row in vectors)
    if rational_span:
        return Subgroup("lattice_in_kernel", (), v)
    return Subgroup("lattice_in_kernel", v, ())


def check_structure_conditions(data: GWInput, lam: Subgroup, lam0: Subgroup) -> ValidationReport:
    """Grading, degree zero, psi, ribbon, finiteness and invertibility for (Lambda, Lambda_0)."""
    conds: list[Condition] = []
    n = data.n

    bad = next((i for i in range(n) if not lam.contains(data.root(i))), None)
    conds.append(Condition("grading", bad is None, bad, "roots lie in Lambda"))

    bad = next((k for k in lam0.discrete if not lam.contains(k)), None)
    if bad is None:
        bad = next((c for c in lam0.continuous if not lam.contains_line(c)), None)
    conds.append(Condition("degree_zero", bad is None, bad, "Lambda_0 lies in Lambda"))

    bad = None
    for k in lam0.discrete:
        for l in lam.discrete:
            if data.kappa_dual(k, l).denominator != 1:
                bad = (k, l)
                break
        if bad:
            break
        for c in lam.continuous:
            if data.kappa_dual(k, c) != 0:
                bad = (k, c)
                break
        if bad:
            break
    if bad is None:
        for c in lam0.continuous:
            if any(data.kappa_dual(c, l) != 0 for l in lam.discrete + lam.continuous):
                bad = (c,)
                break
    conds.append(Condition("psi", bad is None, bad, "kappa_dual(Lambda_0, Lambda) integral"))

    def ribbon_value(k: Sequence) -> Fraction:
        return -data.kappa_dual(k, k) + data.chi_sum(k)

    bad = None
    gens = list(lam0.discrete)
    for k in gens:
        if ribbon_value(k) % 2:
            bad = (k,)
            break
    if bad is None:
        for a, b in itertools.combinations(gens, 2):
            if data.kappa_dual(a, b).denominator != 1:
                bad = (a, b)
                break
    if bad is None:
        for c in lam0.continuous:
            if data.kappa_dual(c, c) != 0 or data.chi_sum(c) != 0 or any(
                    data.kappa_dual(c, k) != 0 for k in gens + list(lam0.continuous)):
                bad = (c,)
                break
    conds.append(Condition("ribbon", bad is None, bad, "-kappa_dual(k,k) + sum chi_i(k) even"))

    index = subgroup_index(lam, lam0)
    conds.append(Condition("finiteness", index is not None, None if index is not None else "infinite",
                           f"index {index if index is not None else 'infinite'}"))

    bad = None
    for k in lam0.discrete:
        if any(x.denominator != 1 for x in data.chi(k)):
            bad = (k,)
            break
    if bad is None:
        bad = next(((c,) for c in lam0.continuous if any(data.chi(c))), None)
    conds.append(Condition("invertibility", bad is None, bad, "chi_i(Lambda_0) integral"))
    return ValidationReport(tuple(conds))


def subgroup_index(lam: Subgroup, lam0: Subgroup) -> int | None:
    """[Lambda : Lambda_0] when finite (assumes Lambda_0 inside Lambda), else None."""
    r_disc, r_cont = lam.rank()
    s_disc, s_cont = lam0.rank()
    if r_cont != s_cont or r_disc != s_disc:
        return None
    if r_cont and not all(lam0.contains_line(c) for c in lam.continuous):
        return None
    dim = lam.dim or lam0.dim
    cols = lam._quotient_map(dim)
    big = [lam._project(g, cols) for g in lam.discrete]
    small = [lam._project(g, cols) for g in lam0.discrete]
    if not big:
        return 1
    # index = covolume ratio, computed from Smith forms of integer-scaled generators
    den = _common_denominator(big + small)
    vol_big = _covolume([[x * den for x in row] for row in big])
    vol_small = _covolume([[x * den for x in row] for row in small])
    ratio = vol_small / vol_big
    return int(ratio) if ratio.denominator == 1 else None


def _covolume(rows: list[list[Fraction]]) -> Fraction:
    """Product of the nonzero Smith invariants times the volume of the rational span basis."""
    basis = _span_basis(rows)
    # coordinates of each row in the span basis (pivot columns give them directly)
    pivots = [next(j for j, x in enumerate(b) if x != 0) for b in basis]
    coords = [[row[p] for p in pivots] for row in rows]
    den = _common_denominator(coords)
    snf = smith_normal_form([[int(x * den) for x in row] for row in coords])
    vol = Fraction(1)
    for d in snf.diagonal:
        if d:
            vol *= d
    return vol / Fraction(den) ** len(basis)
