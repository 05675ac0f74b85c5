"""
Exact rationals and truncated Novikov-field elements.

Every Novikov element is implicitly taken modulo T^E for the ambient energy
cap E; the untruncated field is never represented.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

Q = gmpy2.mpq
ZERO = Q(0)
ONE = Q(1)


def rational(x) -> "gmpy2.mpq":
    """Coerce an int, Fraction, mpq or 'p/q' string to an exact rational."""
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, Fraction):
        return Q(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals: %r" % x)
    return Q(x)


_RAT = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(s: str):
    m = _RAT.match(s)
    if not m:
        raise ValueError("not a rational: %r" % s)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError("zero denominator: %r" % s)
    return Q(num, den)


def fmt_rational(x) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


@dataclass(frozen=True)
class TruncParams:
    """The window (E_max, k_max) every computation is evaluated against.

    Gapped operations are kept for energies beta <= energy and arities
    k <= arity.  Novikov scalars are reduced modulo T^energy.
    """

    energy: object
    arity: int

    def __post_init__(self):
        e = rational(self.energy)
        object.__setattr__(self, "energy", e)
        if e <= 0:
            raise ValueError("E_max must be positive, got %s" % fmt_rational(e))
        if int(self.arity) < 3:
            raise ValueError("k_max must be at least 3, got %s" % self.arity)
        object.__setattr__(self, "arity", int(self.arity))

    def __str__(self):
        return "E_max=%s k_max=%d" % (fmt_rational(self.energy), self.arity)


class NovElem:
    """A finite sum  sum_i a_i T^{E_i}  with rational a_i and E_i >= 0.

    Terms are stored sorted by strictly increasing energy with no zero
    coefficients.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        acc: dict = {}
        for e, a in terms:
            e = rational(e)
            if e < 0:
                raise ValueError("negative energy %s" % fmt_rational(e))
            acc[e] = acc.get(e, ZERO) + rational(a)
        self.terms = tuple(sorted((e, a) for e, a in acc.items() if a != 0))

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def monomial(cls, coeff, energy=0):
        return cls([(energy, coeff)])

    @classmethod
    def constant(cls, coeff):
        return cls([(0, coeff)])

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, NovElem):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return "NovElem(%s)" % format_nov(self)

    def __str__(self):
        return format_nov(self)

    def __neg__(self):
        return NovElem._raw(tuple((e, -a) for e, a in self.terms))

    def __add__(self, other):
        return nov_add(self, other)

    def __sub__(self, other):
        return nov_add(self, -other)

    def scale(self, c) -> "NovElem":
        c = rational(c)
        if c == 0:
            return NovElem()
        return NovElem._raw(tuple((e, a * c) for e, a in self.terms))

    def shift(self, energy) -> "NovElem":
        """Multiply by T^energy."""
        energy = rational(energy)
        return NovElem._raw(tuple((e + energy, a) for e, a in self.terms))

    def truncate(self, cap) -> "NovElem":
        """Drop all terms of energy >= cap."""
        cap = rational(cap)
        return NovElem._raw(tuple(t for t in self.terms if t[0] < cap))

    def coeff(self, energy):
        energy = rational(energy)
        for e, a in self.terms:
            if e == energy:
                return a
        return ZERO

    @property
    def min_energy(self):
        """Exponent of the norm: ||a|| = exp(-min_energy); None for a = 0."""
        return self.terms[0][0] if self.terms else None

    def valuation(self):
        return self.min_energy

    def in_ring(self) -> bool:
        return True

    def in_maximal_ideal(self) -> bool:
        return not self.terms or self.terms[0][0] > 0

    def inverse(self, cap) -> "NovElem":
        """Inverse of a unit (valuation 0) modulo T^cap."""
        if not self.terms or self.terms[0][0] != 0:
            raise ZeroDivisionError("only valuation-0 elements are inverted")
        cap = rational(cap)
        a0 = self.terms[0][1]
        # self = a0 (1 - u) with u in the maximal ideal
        u = NovElem._raw(tuple((e, -a / a0) for e, a in self.terms[1:]))
        result = NovElem.constant(1)
        power = NovElem.constant(1)
        while True:
            power = nov_mul(power, u, cap)
            if power.is_zero():
                break
            result = result + power
        return result.scale(1 / a0)


def nov_add(a: NovElem, b: NovElem) -> NovElem:
    if not a.terms:
        return b
    if not b.terms:
        return a
    acc = dict(a.terms)
    for e, c in b.terms:
        acc[e] = acc.get(e, ZERO) + c
    return NovElem._raw(tuple(sorted((e, c) for e, c in acc.items() if c != 0)))


def nov_mul(a: NovElem, b: NovElem, trunc) -> NovElem:
    """Cauchy product modulo T^{E_max}; `trunc` is a TruncParams or a cap."""
    cap = trunc.energy if isinstance(trunc, TruncParams) else rational(trunc)
    acc: dict = {}
    for e1, c1 in a.terms:
        if e1 >= cap:
            break
        for e2, c2 in b.terms:
            e = e1 + e2
            if e >= cap:
                break
            acc[e] = acc.get(e, ZERO) + c1 * c2
    return NovElem._raw(tuple(sorted((e, c) for e, c in acc.items() if c != 0)))


@dataclass(frozen=True)
class NormReport:
    min_energy: object  # None encodes the zero element
    in_ring: bool
    in_maximal_ideal: bool

    def __str__(self):
        if self.min_energy is None:
            return "norm 0"
        return "norm exp(-%s)" % fmt_rational(self.min_energy)


def nov_norm(a: NovElem) -> NormReport:
    e = a.min_energy
    return NormReport(e, True, e is None or e > 0)


_TERM = re.compile(
    r"^\s*([+-]?\s*\d+(?:\s*/\s*\d+)?)\s*(?:\*\s*T\s*\^\s*(?:\{([^}]*)\}|([0-9/]+)))?\s*$"
)


def format_nov(a: NovElem) -> str:
    if not a.terms:
        return "0"
    return " + ".join(
        "%s*T^{%s}" % (fmt_rational(c), fmt_rational(e)) for e, c in a.terms
    )


def parse_nov(s: str) -> NovElem:
    """Parse 'c*T^{p/q} + ...'; a bare rational means energy 0."""
    s = s.strip()
    if s == "0" or not s:
        return NovElem()
    terms = []
    for part in _split_plus(s):
        m = _TERM.match(part)
        if not m:
            raise ValueError("bad Novikov term %r" % part)
        coeff = parse_rational(m.group(1).replace(" ", ""))
        exp = m.group(2) if m.group(2) is not None else m.group(3)
        energy = parse_rational(exp) if exp is not None else ZERO
        terms.append((energy, coeff))
    return NovElem(terms)


def _split_plus(s: str):
    # split on '+' that is not a sign directly after '^{' or '*'
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "+" and depth == 0 and "".join(cur).strip():
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return parts
