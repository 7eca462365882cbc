"""Relative modular structures: compact lattice, kernel of chi, and toral."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .gwdata import (
    Condition,
    GWInput,
    Subgroup,
    ValidationReport,
    Weight,
    check_input,
    check_structure_conditions,
    dual_lattice_of,
    effective_metric,
    image_kappa_flat,
    lattice_in_kernel,
)
from .lattice import (
    DiscriminantGroup,
    as_matrix,
    discriminant_group,
    inverse,
    is_even_integral,
    mat_mul,
    transpose,
    vec_mat,
)
from .repcat import (
    WeightModule,
    modified_dim,
    one_dim,
    open_hopf,
    braiding,
    twist,
    verma,
)
from .scalar import Cyclotomic, q_power, sqrt_int, to_fraction

__all__ = [
    "HypothesisFailed",
    "NonGenericClass",
    "InternalMismatch",
    "RelModStructure",
    "KirbyColour",
    "StructureConstants",
    "build_structure",
    "structure_constants",
    "closed_form_deltas",
    "matrix_deltas",
    "check_free_realization",
    "sample_generic",
    "VARIANTS",
]

VARIANTS = ("compact", "kernel", "toral")
PROBE_DENOMINATOR = 840
CHECK_DENOMINATOR = 24


class HypothesisFailed(ValueError):
    def __init__(self, condition: str, witness, report: ValidationReport):
        self.condition = condition
        self.witness = witness
        self.report = report
        names = ", ".join(c.name for c in report.failed())
        super().__init__(f"hypothesis {condition!r} failed (witness {witness!r}); failed: {names}")


class NonGenericClass(ValueError):
    pass


class InternalMismatch(RuntimeError):
    pass


@dataclass(frozen=True)
class KirbyColour:
    index: Weight
    terms: tuple[tuple[WeightModule, Cyclotomic], ...]

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True, eq=False)
class RelModStructure:
    variant: str
    data: GWInput
    report: ValidationReport
    grading: Subgroup
    realization: Subgroup
    gamma: tuple[tuple[Fraction, ...], ...] | None
    disc: DiscriminantGroup | None
    reps: tuple[Weight, ...]

    @property
    def order(self) -> int:
        return len(self.reps)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.disc.invariant_factors if self.disc else ()

    def same_class(self, lam: Sequence, mu: Sequence) -> bool:
        return self.grading.contains([to_fraction(a) - to_fraction(b) for a, b in zip(lam, mu)])

    def is_generic(self, lam: Sequence) -> bool:
        if self.variant == "toral":
            return True
        lam = tuple(to_fraction(x) for x in lam)
        return all(self.data.is_typical(_shift(lam, k)) for k in self.reps)

    def kirby_colour(self, lam: Sequence) -> KirbyColour:
        return kirby_colour(self, tuple(to_fraction(x) for x in lam))

    @property
    def zeta(self) -> Cyclotomic:
        n = self.data.n
        if self.variant == "toral":
            return Cyclotomic.from_rational(self.order)
        return Cyclotomic.from_rational((-1) ** n * self.order)

    @property
    def script_d(self) -> Cyclotomic:
        """(sqrt -1)^n times the positive square root of |D|."""
        return q_power(self.data.n) * sqrt_int(self.order)


def _gram(basis, metric) -> list[list[Fraction]]:
    g = as_matrix(basis)
    return mat_mul(mat_mul(g, as_matrix(metric)), transpose(g))


def _integer_witness(m) -> tuple | None:
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            if x.denominator != 1:
                return (i, j, x)
    return None


def build_structure(data: GWInput, variant: str, lattice: Sequence[Sequence] | None = None,
                    rational_span: bool = True) -> RelModStructure:
    """Validate the hypotheses of a variant and assemble the structure.

    ``lattice`` is a basis of Gamma (rows in t coordinates) for the compact and
    toral variants, and a spanning set of Lambda inside ker chi for the kernel one.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if not data.convention.supports_tqft:
        raise ValueError("structures need the modified convention at q = sqrt(-1)")
    conds: list[Condition] = []
    inp = check_input(data)
    bad = inp.failed()
    conds.append(Condition("input", not bad, bad[0].name if bad else None, "fundamental identity and assumptions"))

    if variant == "kernel":
        vectors = as_matrix(lattice or [])
        bad = next((v for v in vectors if any(data.chi(v))), None)
        conds.append(Condition("kernel", bad is None, bad, "Lambda inside ker chi"))
        lam = lattice_in_kernel(data, vectors, rational_span)
        lam0 = lam
    else:
        g = as_matrix(lattice or [])
        if variant == "toral":
            conds.append(Condition("no_roots", data.n == 0, data.n or None, "toral theories have n = 0"))
        b = _gram(g, data.kappa)
        w = _integer_witness(b)
        conds.append(Condition("integral", w is None, w, "(Gamma, kappa) integral"))
        beff = _gram(g, effective_metric(data))
        ok = _integer_witness(beff) is None and is_even_integral(beff)
        conds.append(Condition("effective_even_integral", ok, None if ok else tuple(map(tuple, beff)),
                               "(Gamma, kappa_eff) even integral"))
        lam = dual_lattice_of(data, g)
        lam0 = image_kappa_flat(data, g)
    conds.extend(check_structure_conditions(data, lam, lam0).conditions)
    report = ValidationReport(tuple(conds))
    if not report.passed:
        first = report.failed()[0]
        raise HypothesisFailed(first.name, first.witness, report)

    if variant == "kernel":
        return RelModStructure(variant, data, report, lam, lam0, None, None, ((Fraction(0),) * data.r,))
    g = as_matrix(lattice)
    disc = discriminant_group([[int(x) for x in row] for row in _gram(g, data.kappa)])
    lmat = transpose(inverse(g))
    reps = tuple(tuple(vec_mat(list(x), lmat)) for x in disc.elements())
    return RelModStructure(variant, data, report, lam, lam0, tuple(map(tuple, g)), disc, reps)


def _shift(lam: Sequence, k: Sequence) -> Weight:
    return tuple(a + b for a, b in zip(lam, k))


def kirby_colour(structure: RelModStructure, lam: Weight) -> KirbyColour:
    if not structure.is_generic(lam):
        raise NonGenericClass(f"class of {lam} is not generic")
    data = structure.data
    terms = []
    for k in structure.reps:
        mu = _shift(lam, k)
        terms.append((verma(data, mu, 0), modified_dim(data, mu, 0)))
    return KirbyColour(lam, tuple(terms))


# ------------------------------------------------------------------ constants


def sample_generic(structure: RelModStructure, rng: random.Random, denominator: int = PROBE_DENOMINATOR) -> Weight:
    """A random rational weight with the given denominator whose class is generic."""
    r = structure.data.r
    while True:
        lam = tuple(Fraction(rng.randrange(-2 * denominator, 2 * denominator), denominator) for _ in range(r))
        if structure.is_generic(lam):
            return lam


def _bracket(data: GWInput, lam: Sequence) -> Cyclotomic:
    out = Cyclotomic.one()
    for c in data.chi(lam):
        out = out * (q_power(2 * c) - q_power(-2 * c))
    return out


def closed_form_deltas(structure: RelModStructure, lam: Sequence) -> tuple[Cyclotomic, Cyclotomic]:
    """(Delta_+, Delta_-) from the Gauss-sum formula at the probe lam."""
    data = structure.data
    lam = tuple(to_fraction(x) for x in lam)
    base = _bracket(data, lam)
    plus = minus = Cyclotomic.zero()
    for k in structure.reps:
        ratio = base / _bracket(data, _shift(lam, k))
        kk = data.kappa_dual(k, k)
        plus = plus + q_power(-2 * kk) * ratio
        minus = minus + q_power(2 * kk) * ratio
    if data.n % 2:
        minus = -minus
    return plus, minus


def matrix_deltas(structure: RelModStructure, lam: Sequence) -> tuple[Cyclotomic, Cyclotomic]:
    """(Delta_+, Delta_-) from the Kirby-coloured framed meridian of a Verma strand.

    The (+1)-framed meridian carries the class of -lam and the (-1)-framed one the
    class of lam; the strand picks up theta^-+1, which is divided out.
    """
    data = structure.data
    lam = tuple(to_fraction(x) for x in lam)
    V = verma(data, lam)
    th = twist(V).scalar()
    out = []
    for sign in (1, -1):
        idx = tuple(-sign * x for x in lam)
        total = Cyclotomic.zero()
        for W, coeff in kirby_colour(structure, idx).terms:
            tw = twist(W).scalar()
            tw = tw if sign == 1 else tw.inverse()
            total = total + coeff * tw * open_hopf(W, V).scalar()
        out.append(total * th if sign == 1 else total / th)
    return out[0], out[1]


@dataclass(frozen=True)
class StructureConstants:
    delta_plus: Cyclotomic
    delta_minus: Cyclotomic
    zeta: Cyclotomic
    script_d: Cyclotomic
    probes: tuple[Weight, ...]
    check_probe: Weight | None


def structure_constants(structure: RelModStructure, seed: int = 0, matrix_check: bool = True,
                        probe_denominator: int = PROBE_DENOMINATOR,
                        check_denominator: int = CHECK_DENOMINATOR) -> StructureConstants:
    rng = random.Random(seed)
    p1 = sample_generic(structure, rng, probe_denominator)
    p2 = sample_generic(structure, rng, probe_denominator)
    d1 = closed_form_deltas(structure, p1)
    d2 = closed_form_deltas(structure, p2)
    if d1 != d2:
        raise InternalMismatch(f"stabilization coefficients depend on the probe: {p1} vs {p2}")
    check = None
    if matrix_check:
        check = sample_generic(structure, rng, check_denominator)
        if matrix_deltas(structure, check) != d1:
            raise InternalMismatch(f"matrix evaluation disagrees with the closed form at {check}")
    zeta = structure.zeta
    if d1[0] * d1[1] != zeta:
        raise InternalMismatch("zeta differs from Delta_+ Delta_-")
    return StructureConstants(d1[0], d1[1], zeta, structure.script_d, (p1, p2), check)


# ------------------------------------------------------------------ free realization


def _realization_samples(structure: RelModStructure) -> list[Weight]:
    lam0 = structure.realization
    out = [tuple(x) for x in lam0.discrete]
    for c in lam0.continuous:
        for t in (Fraction(1), Fraction(-2), Fraction(3, 2)):
            out.append(tuple(t * x for x in c))
    return out or [(Fraction(0),) * structure.data.r]


def check_free_realization(structure: RelModStructure, probe: Sequence | None = None, seed: int = 0) -> ValidationReport:
    """Matrix checks of the free realization on generators of Lambda_0."""
    data = structure.data
    if probe is None:
        probe = sample_generic(structure, random.Random(seed), CHECK_DENOMINATOR)
    probe = tuple(to_fraction(x) for x in probe)
    V = verma(data, probe)
    parities = (0,) if structure.variant == "toral" else (0, 1)
    conds = []
    twist_bad = dim_bad = psi_bad = class_bad = None
    for k in _realization_samples(structure):
        for p in parities:
            try:
                s = one_dim(data, k, p)
            except ValueError:
                dim_bad = dim_bad or (k, p)
                continue
            if twist(s).scalar() != Cyclotomic.one():
                twist_bad = twist_bad or (k, p)
            double = (braiding(s, V) @ braiding(V, s)).matrix.scalar()
            expected = q_power(-4 * data.kappa_dual(probe, k))
            if double != expected:
                psi_bad = psi_bad or (k, p)
        for l in list(structure.grading.discrete)[:4]:
            if q_power(-4 * data.kappa_dual(_shift(probe, l), k)) != q_power(-4 * data.kappa_dual(probe, k)):
                class_bad = class_bad or (k, l)
    conds.append(Condition("twist_trivial", twist_bad is None, twist_bad, "theta of sigma_k is the identity"))
    conds.append(Condition("invertible", dim_bad is None, dim_bad, "sigma_k is one dimensional"))
    conds.append(Condition("psi_matches", psi_bad is None, psi_bad, "double braiding equals psi"))
    conds.append(Condition("psi_well_defined", class_bad is None, class_bad, "psi depends only on the class"))
    return ValidationReport(tuple(conds))
