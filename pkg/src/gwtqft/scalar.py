"""Exact arithmetic in cyclotomic fields.

Elements of Q(zeta_N) are stored in the power basis 1, z, ..., z^(phi(N)-1)
modulo the N-th cyclotomic polynomial, with integer numerators over one
common positive denominator. Operands with different conductors are promoted
to the lcm of their conductors, so every element that ever arises from rational
powers of q lives in a single growing field and zero tests are exact.
"""

from __future__ import annotations

import contextvars
from contextlib import contextmanager
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Iterator

import mpmath

__all__ = [
    "Cyclotomic",
    "ConductorOverflow",
    "DivisionByZero",
    "to_fraction",
    "q_power",
    "quantum_number",
    "field_arith",
    "approx_complex",
    "sqrt_int",
    "conductor_limit",
    "cyclotomic_polynomial",
    "euler_phi",
    "DEFAULT_Q",
]

# q = exp(pi * i * DEFAULT_Q), i.e. q = sqrt(-1)
DEFAULT_Q = Fraction(1, 2)


class DivisionByZero(ZeroDivisionError):
    pass


class ConductorOverflow(ArithmeticError):
    pass


_conductor_cap: contextvars.ContextVar[int | None] = contextvars.ContextVar("conductor_cap", default=None)


@contextmanager
def conductor_limit(cap: int | None) -> Iterator[None]:
    """Refuse to build any field of conductor larger than ``cap`` inside the block."""
    token = _conductor_cap.set(cap)
    try:
        yield
    finally:
        _conductor_cap.reset(token)


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions and strings like ``"3/4"`` into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


# ---------------------------------------------------------------- field tables


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # both monic integer polynomials, lowest degree first
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for j, d in enumerate(den):
                num[k + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


def _mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first.

    Phi_n is the product of (z^d - 1)^mu(n/d) over d | n; the factors with
    mu = -1 are divided out exactly, one binomial at a time.
    """
    poly = [1]
    divs = _divisors(n)
    for d in divs:
        if _mobius(n // d) == 1:
            out = [0] * (len(poly) + d)
            for i, c in enumerate(poly):
                out[i + d] += c
                out[i] -= c
            poly = out
    for d in divs:
        if _mobius(n // d) == -1:
            # divide by (z^d - 1): q_i = q_{i-d} - p_i, read from the bottom
            quot = [0] * (len(poly) - d)
            for i in range(len(quot)):
                quot[i] = -poly[i] + (quot[i - d] if i >= d else 0)
            poly = quot
    return tuple(poly)


def _radical(n: int) -> int:
    rad, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            rad *= p
            while m % p == 0:
                m //= p
        p += 1
    return rad * m if m > 1 else rad


class _Field:
    """Reduction data for Q(zeta_n): z^k modulo Phi_n as sparse rows.

    With s = n / rad(n) we have Phi_n(z) = Phi_rad(z^s), so z^(s j + r) reduces
    through w^j modulo Phi_rad(w) with w = z^s, and rows stay short.
    """

    __slots__ = ("n", "s", "rad", "phi", "base_phi", "low", "base_rows")

    def __init__(self, n: int):
        self.n = n
        self.rad = _radical(n)
        self.s = n // self.rad
        poly = cyclotomic_polynomial(self.rad)
        self.base_phi = len(poly) - 1
        self.phi = self.s * self.base_phi
        # w^base_phi = -sum_{j<base_phi} p_j w^j
        self.low = [(j, -c) for j, c in enumerate(poly[:-1]) if c]
        self.base_rows: list[dict[int, int]] = [{k: 1} for k in range(self.base_phi)]

    def _base_row(self, j: int) -> dict[int, int]:
        rows = self.base_rows
        while len(rows) <= j:
            m = len(rows)
            prev = m - self.base_phi
            acc: dict[int, int] = {}
            for i, c in self.low:
                for e, v in rows[prev + i].items():
                    acc[e] = acc.get(e, 0) + c * v
            rows.append({e: v for e, v in acc.items() if v})
        return rows[j]

    def row(self, k: int) -> dict[int, int]:
        k %= self.n
        if k < self.phi:
            return {k: 1}
        j, r = divmod(k, self.s)
        s = self.s
        return {s * e + r: v for e, v in self._base_row(j).items()}

    def fold(self, acc: dict[int, int]) -> dict[int, int]:
        """Reduce a sparse polynomial (exponents taken mod n) into the power basis."""
        phi, s, n = self.phi, self.s, self.n
        out: dict[int, int] = {}
        for k, c in acc.items():
            if not c:
                continue
            k %= n
            if k < phi:
                out[k] = out.get(k, 0) + c
            else:
                j, r = divmod(k, s)
                for e, v in self._base_row(j).items():
                    i = s * e + r
                    out[i] = out.get(i, 0) + c * v
        return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _field(n: int) -> _Field:
    _check_cap(n)
    return _Field(n)


def _check_cap(n: int) -> None:
    cap = _conductor_cap.get()
    if cap is not None and n > cap:
        raise ConductorOverflow(f"conductor {n} exceeds the cap {cap}")


# ---------------------------------------------------------------- the element type


class Cyclotomic:
    """An element of Q(zeta_N) with zeta_N = exp(2 pi i / N).

    ``terms`` maps a power-basis index k < phi(N) to an integer numerator;
    ``den`` is the common positive denominator.
    """

    __slots__ = ("conductor", "terms", "den")

    def __init__(self, conductor: int, terms: dict[int, int], den: int = 1, _normalized: bool = False):
        if not _normalized:
            if den == 0:
                raise DivisionByZero("zero denominator")
            terms = {k: v for k, v in terms.items() if v}
            if den < 0:
                den = -den
                terms = {k: -v for k, v in terms.items()}
            g = den
            for v in terms.values():
                g = gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                den //= g
                terms = {k: v // g for k, v in terms.items()}
            if not terms:
                den = 1
        self.conductor = conductor
        self.terms = terms
        self.den = den

    # constructors
    @classmethod
    def from_rational(cls, x, conductor: int = 1) -> "Cyclotomic":
        x = to_fraction(x)
        return cls(conductor, {0: x.numerator} if x else {}, x.denominator, _normalized=True)

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "Cyclotomic":
        """zeta_n^k."""
        return cls(n, dict(_field(n).row(k)), 1, _normalized=True)

    @classmethod
    def zero(cls) -> "Cyclotomic":
        return cls(1, {}, 1, _normalized=True)

    @classmethod
    def one(cls) -> "Cyclotomic":
        return cls(1, {0: 1}, 1, _normalized=True)

    @classmethod
    def coerce(cls, x) -> "Cyclotomic":
        if isinstance(x, Cyclotomic):
            return x
        return cls.from_rational(x)

    @classmethod
    def from_coefficients(cls, conductor: int, coeffs: Iterable) -> "Cyclotomic":
        coeffs = [to_fraction(c) for c in coeffs]
        if len(coeffs) != euler_phi(conductor):
            raise ValueError("coefficient vector has the wrong length for this conductor")
        den = lcm(*(c.denominator for c in coeffs)) if coeffs else 1
        return cls(conductor, {k: int(c * den) for k, c in enumerate(coeffs)}, den)

    @property
    def nums(self) -> tuple[int, ...]:
        out = [0] * euler_phi(self.conductor)
        for k, v in self.terms.items():
            out[k] = v
        return tuple(out)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.nums)

    # conductor handling
    def promote(self, m: int) -> "Cyclotomic":
        n = self.conductor
        if m == n:
            return self
        if m % n:
            raise ValueError(f"cannot promote conductor {n} to {m}")
        step = m // n
        return Cyclotomic(m, _field(m).fold({k * step: v for k, v in self.terms.items()}), self.den,
                          _normalized=True)

    def demote(self, m: int) -> "Cyclotomic | None":
        """Express ``self`` in Q(zeta_m) for m dividing the conductor, or None if impossible."""
        n = self.conductor
        if n % m:
            raise ValueError(f"{m} does not divide the conductor {n}")
        if m == n:
            return self
        phi_n, phi_m = euler_phi(n), euler_phi(m)
        images = [Cyclotomic.zeta(m, k).promote(n) for k in range(phi_m)]
        mat = [[Fraction(img.terms.get(j, 0)) for img in images] for j in range(phi_n)]
        sol = _solve_rational(mat, list(self.coefficients))
        if sol is None:
            return None
        return Cyclotomic.from_coefficients(m, sol)

    def minimal(self) -> "Cyclotomic":
        """The same element in the smallest field Q(zeta_m), m | N, that contains it."""
        if self.is_rational():
            return Cyclotomic(1, {0: self.terms[0]} if self.terms else {}, self.den, _normalized=True)
        for m in _divisors(self.conductor):
            if m > 2:
                d = self.demote(m)
                if d is not None:
                    return d
        return self

    @staticmethod
    def _align(a: "Cyclotomic", b: "Cyclotomic") -> tuple["Cyclotomic", "Cyclotomic"]:
        if a.conductor == b.conductor:
            return a, b
        # rationals embed in every field without work
        if a.is_rational():
            return Cyclotomic(b.conductor, a.terms, a.den, _normalized=True), b
        if b.is_rational():
            return a, Cyclotomic(a.conductor, b.terms, b.den, _normalized=True)
        m = lcm(a.conductor, b.conductor)
        return a.promote(m), b.promote(m)

    # predicates
    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def to_fraction(self) -> Fraction:
        # 1 is the first power-basis element, so a rational element is constant
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.terms.get(0, 0), self.den)

    # arithmetic
    def __add__(self, other) -> "Cyclotomic":
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.from_rational(other)
            except TypeError:
                return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        a, b = Cyclotomic._align(self, other)
        if a.den == b.den:
            out = dict(a.terms)
            for k, v in b.terms.items():
                out[k] = out.get(k, 0) + v
            return Cyclotomic(a.conductor, out, a.den)
        out = {k: v * b.den for k, v in a.terms.items()}
        for k, v in b.terms.items():
            out[k] = out.get(k, 0) + v * a.den
        return Cyclotomic(a.conductor, out, a.den * b.den)

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.conductor, {k: -v for k, v in self.terms.items()}, self.den, _normalized=True)

    def __sub__(self, other) -> "Cyclotomic":
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.from_rational(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Cyclotomic":
        return (-self) + other

    def _scale(self, x: Fraction) -> "Cyclotomic":
        return Cyclotomic(self.conductor, {k: v * x.numerator for k, v in self.terms.items()},
                          self.den * x.denominator)

    def __mul__(self, other) -> "Cyclotomic":
        if not isinstance(other, Cyclotomic):
            try:
                x = to_fraction(other)
            except TypeError:
                return NotImplemented
            return self._scale(x)
        if self.is_rational():
            return other._scale(self.to_fraction())
        if other.is_rational():
            return self._scale(other.to_fraction())
        a, b = Cyclotomic._align(self, other)
        n = a.conductor
        acc: dict[int, int] = {}
        bt = list(b.terms.items())
        for i, x in a.terms.items():
            for j, y in bt:
                k = (i + j) % n
                acc[k] = acc.get(k, 0) + x * y
        return Cyclotomic(n, _field(n).fold(acc), a.den * b.den)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if not self.terms:
            raise DivisionByZero("inverse of zero")
        n = self.conductor
        items = list(self.terms.items())
        if len(items) == 1:
            k, c = items[0]
            return Cyclotomic(n, {i: v * self.den for i, v in _field(n).row(-k).items()}, c)
        if len(items) == 2 and items[0][1] == -items[1][1]:
            # c z^a (1 - z^b) with 1/(z^b - 1) = (1/m) sum_k k z^(b k), m the order of z^b
            (a, c), (b, _) = items
            step = (b - a) % n
            m = n // gcd(n, step)
            acc = {(k * step) % n: k for k in range(1, m)}
            geo = Cyclotomic(n, _field(n).fold(acc), m)
            return -geo * Cyclotomic.zeta(n, -a) * Fraction(self.den, c)
        # multiply by conjugates over each cyclic factor of the Galois group until the
        # running norm is rational: 1/a = prod_{sigma != 1} sigma(a) / N(a)
        cofactor = Cyclotomic.one()
        norm = self
        for g, order in _unit_group_generators(n):
            if norm.is_rational():
                break
            conj = norm
            partial = Cyclotomic.one()
            for _ in range(order - 1):
                conj = conj.galois(g)
                partial = partial * conj
            cofactor = cofactor * partial
            norm = norm * partial
        return cofactor / norm.to_fraction()

    def __truediv__(self, other) -> "Cyclotomic":
        if not isinstance(other, Cyclotomic):
            x = to_fraction(other)
            if x == 0:
                raise DivisionByZero("division by zero")
            return self._scale(1 / x)
        if other.is_rational():
            if not other.terms:
                raise DivisionByZero("division by zero")
            return self._scale(1 / other.to_fraction())
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Cyclotomic":
        return Cyclotomic.coerce(other) * self.inverse()

    def __pow__(self, e: int) -> "Cyclotomic":
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = Cyclotomic.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def galois(self, j: int) -> "Cyclotomic":
        """Apply the automorphism z -> z^j (j coprime to the conductor)."""
        n = self.conductor
        if gcd(j, n) != 1:
            raise ValueError("Galois exponent must be coprime to the conductor")
        return Cyclotomic(n, _field(n).fold({(j * k) % n: v for k, v in self.terms.items()}), self.den,
                          _normalized=True)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1)

    def is_real(self) -> bool:
        return self == self.conjugate()

    # comparison
    def __eq__(self, other) -> bool:
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.from_rational(other)
            except TypeError:
                return NotImplemented
        a, b = Cyclotomic._align(self, other)
        return a.den == b.den and a.terms == b.terms

    def __hash__(self) -> int:
        m = self.minimal()
        return hash((m.conductor, tuple(sorted(m.terms.items())), m.den))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # rendering
    def __complex__(self) -> complex:
        import cmath

        n = self.conductor
        total = 0j
        for k, c in self.terms.items():
            total += c * cmath.exp(2j * cmath.pi * k / n)
        return total / self.den

    def __repr__(self) -> str:
        terms = []
        for k in sorted(self.terms):
            c = Fraction(self.terms[k], self.den)
            terms.append(f"{c}" if k == 0 else f"{c}*z^{k}")
        body = " + ".join(terms) if terms else "0"
        return f"Cyclotomic(N={self.conductor}: {body})"

    def to_dict(self) -> dict:
        return {"conductor": self.conductor, "coefficients": [str(c) for c in self.coefficients]}

    @classmethod
    def from_dict(cls, d: dict) -> "Cyclotomic":
        return cls.from_coefficients(int(d["conductor"]), d["coefficients"])


@lru_cache(maxsize=None)
def _unit_group_generators(n: int) -> tuple[tuple[int, int], ...]:
    """Generators of (Z/n)^x as (residue, order) pairs, one per cyclic factor."""
    factors: list[tuple[int, int]] = []
    m, p = n, 2
    while p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            factors.append((p, k))
        p += 1
    if m > 1:
        factors.append((m, 1))
    gens: list[tuple[int, int]] = []
    for p, k in factors:
        pk = p**k
        rest = n // pk
        local: list[tuple[int, int]] = []
        if p == 2:
            if k >= 2:
                local.append((pk - 1, 2))
            if k >= 3:
                local.append((5, 2 ** (k - 2)))
        else:
            order = pk - pk // p
            g = 2
            while not _is_primitive_root(g, p, k):
                g += 1
            local.append((g, order))
        for g, order in local:
            # CRT lift: g mod p^k and 1 mod the rest
            if rest == 1:
                lifted = g % n
            else:
                t = ((g - 1) * pow(rest, -1, pk)) % pk
                lifted = (1 + rest * t) % n
            gens.append((lifted, order))
    return tuple(gens)


def _is_primitive_root(g: int, p: int, k: int) -> bool:
    if g % p == 0:
        return False
    phi_p = p - 1
    m, q = phi_p, 2
    primes = set()
    while q * q <= m:
        while m % q == 0:
            primes.add(q)
            m //= q
        q += 1
    if m > 1:
        primes.add(m)
    if any(pow(g, phi_p // q, p) == 1 for q in primes):
        return False
    return k == 1 or pow(g, p - 1, p * p) != 1


def _solve_rational(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve mat @ x = rhs exactly (mat may be tall). Returns None if inconsistent."""
    rows = [list(r) + [b] for r, b in zip(mat, rhs)]
    ncols = len(mat[0]) if mat else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = rows[i][-1]
    return x


# ---------------------------------------------------------------- q-powers


@lru_cache(maxsize=65536)
def _q_power_cached(x: Fraction, c: Fraction) -> Cyclotomic:
    e = x * c  # q^x = exp(pi i e) = zeta_{2 den(e)}^{num(e)}
    n = 2 * e.denominator
    if c == DEFAULT_Q:
        # keep the natural field Q(zeta_{4 den(x)}) for q = sqrt(-1)
        n = lcm(n, 4 * x.denominator)
    k = (e.numerator * (n // e.denominator) // 2) % n
    return Cyclotomic.zeta(n, k)


def q_power(x, c=DEFAULT_Q) -> Cyclotomic:
    """q^x = exp(pi i c x); with the default c = 1/2 this is exp(pi i x / 2)."""
    return _q_power_cached(to_fraction(x), to_fraction(c))


def quantum_number(x, c=DEFAULT_Q) -> Cyclotomic:
    """[x]_q = (q^x - q^-x) / (q - q^-1)."""
    x = to_fraction(x)
    return (q_power(x, c) - q_power(-x, c)) / (q_power(1, c) - q_power(-1, c))


def field_arith(a: Cyclotomic, b: Cyclotomic | None, op: str):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    if op == "eq_zero":
        return a.is_zero()
    raise ValueError(f"unknown operation {op!r}")


def _fixed(v: mpmath.mpf, digits: int) -> Decimal:
    s = mpmath.nstr(v, digits + 15, strip_zeros=False, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
    return Decimal(s).quantize(Decimal(1).scaleb(-digits))


def approx_complex(a: Cyclotomic, digits: int = 9) -> tuple[Decimal, Decimal]:
    """Decimal real and imaginary parts, rounded to ``digits`` places."""
    if digits < 1:
        raise ValueError("digits must be at least 1")
    with mpmath.workdps(digits + 20):
        n = a.conductor
        total = mpmath.mpc(0)
        for k, c in a.terms.items():
            total += c * mpmath.expjpi(mpmath.mpf(2 * k) / n)
        total /= a.den
        re, im = _fixed(total.real, digits), _fixed(total.imag, digits)
    zero = Decimal(0).quantize(Decimal(1).scaleb(-digits))
    return (zero if re == 0 else re), (zero if im == 0 else im)


def format_decimal(a: Cyclotomic, digits: int = 9) -> str:
    re, im = approx_complex(a, digits)
    if im == 0:
        return format(re, "f")
    sign = "-" if im < 0 else "+"
    return f"{format(re, 'f')} {sign} {format(abs(im), 'f')}i"


@lru_cache(maxsize=None)
def sqrt_int(d: int) -> Cyclotomic:
    """The positive square root of a positive integer, as a cyclotomic number.

    Uses the quadratic Gauss sum sum_{a < 4d} zeta_{4d}^{a^2} = 2 (1 + i) sqrt(d).
    """
    if d <= 0:
        raise ValueError("sqrt_int needs a positive integer")
    n = 4 * d
    acc: dict[int, int] = {}
    for a in range(n):
        acc[(a * a) % n] = acc.get((a * a) % n, 0) + 1
    gauss = Cyclotomic(n, _field(n).fold(acc))
    root = gauss / (Cyclotomic.from_rational(2) * (1 + q_power(1)))
    with mpmath.workdps(30):
        if complex(root).real < 0:
            root = -root
    return root
