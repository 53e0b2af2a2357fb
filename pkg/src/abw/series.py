"""Exact arithmetic on truncated formal q-series.

A series lives on the exponent lattice (1/D)*Z: terms are stored sparsely as
a map from the exponent numerator n to a nonzero rational coefficient,
together with a truncation bound T.  Coefficients at exponents <= T are known
exactly; beyond T the series is unknown, not zero.  Binary operations
re-express both operands on the lcm lattice and carry the largest truncation
that is still sound, so a result never claims knowledge its inputs cannot
support.

All coefficients and exponents are `fractions.Fraction`; nothing in this
module touches floating point.
"""

import math
from fractions import Fraction

_ZERO = Fraction(0)


class InsufficientPrecisionError(ArithmeticError):
    """More of a series was requested than its truncation can soundly give."""


def as_fraction(value) -> Fraction:
    """Coerce int/str/Fraction to Fraction; floats are refused outright."""
    if isinstance(value, float):
        raise TypeError("floats are not allowed in exact series arithmetic")
    return Fraction(value)


def format_rational(value) -> str:
    """Lowest-terms decimal string: '40', '-1/24'."""
    return str(as_fraction(value))


class QSeries:
    """Immutable truncated series with exponents on (1/lattice)*Z.

    Terms beyond the truncation handed to the constructor are discarded and
    zero coefficients are never stored.  All operations return new objects;
    instances are safe to share between threads.
    """

    __slots__ = ("_lattice", "_terms", "_truncation")

    def __init__(self, lattice, terms, truncation):
        if not isinstance(lattice, int) or lattice < 1:
            raise ValueError(f"lattice must be a positive integer, got {lattice!r}")
        truncation = as_fraction(truncation)
        limit = truncation * lattice
        clean = {}
        items = terms.items() if hasattr(terms, "items") else terms
        for n, c in items:
            if not isinstance(n, int):
                raise ValueError(f"term numerators must be integers, got {n!r}")
            c = as_fraction(c)
            if c and n <= limit:
                clean[n] = c
        self._lattice = lattice
        self._terms = clean
        self._truncation = truncation

    @classmethod
    def _make(cls, lattice, terms, truncation):
        # fast path for operation results whose term dicts are already clean
        self = object.__new__(cls)
        self._lattice = lattice
        self._terms = terms
        self._truncation = truncation
        return self

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, truncation, lattice=1) -> "QSeries":
        return cls(lattice, {}, truncation)

    @classmethod
    def one(cls, truncation) -> "QSeries":
        return cls(1, {0: Fraction(1)}, truncation)

    @classmethod
    def monomial(cls, exponent, coefficient=1, *, truncation) -> "QSeries":
        e = as_fraction(exponent)
        return cls(e.denominator, {e.numerator: as_fraction(coefficient)}, truncation)

    @classmethod
    def from_terms(cls, mapping, truncation) -> "QSeries":
        """Build from {exponent: coefficient} with arbitrary rational exponents."""
        exps = {as_fraction(e): as_fraction(c) for e, c in mapping.items()}
        lattice = math.lcm(1, *(e.denominator for e in exps))
        terms = {e.numerator * (lattice // e.denominator): c for e, c in exps.items()}
        return cls(lattice, terms, truncation)

    # ------------------------------------------------------------------
    # queries

    @property
    def lattice(self) -> int:
        return self._lattice

    @property
    def truncation(self) -> Fraction:
        return self._truncation

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def term_count(self) -> int:
        return len(self._terms)

    def items(self):
        """Sorted (exponent, coefficient) pairs, exponents as Fractions."""
        D = self._lattice
        return [(Fraction(n, D), c) for n, c in sorted(self._terms.items())]

    @property
    def valuation(self) -> Fraction:
        if not self._terms:
            raise ValueError("the zero series has no valuation")
        return Fraction(min(self._terms), self._lattice)

    @property
    def leading_coefficient(self) -> Fraction:
        if not self._terms:
            raise ValueError("the zero series has no leading coefficient")
        return self._terms[min(self._terms)]

    def valuation_leading(self) -> tuple[Fraction, Fraction]:
        """(lowest exponent, its coefficient); error on the zero series."""
        return self.valuation, self.leading_coefficient

    def _vbound(self) -> Fraction:
        # exponent below which this series is known to have no nonzero term
        if self._terms:
            return self.valuation
        return self._truncation

    def coefficient(self, exponent) -> Fraction:
        """Coefficient at an exponent <= truncation (0 when off-lattice)."""
        e = as_fraction(exponent)
        if e > self._truncation:
            raise InsufficientPrecisionError(
                f"coefficient of q^{e} is beyond the truncation {self._truncation}"
            )
        if self._lattice % e.denominator:
            return _ZERO
        return self._terms.get(e.numerator * (self._lattice // e.denominator), _ZERO)

    # ------------------------------------------------------------------
    # structural helpers

    def _reindex(self, lattice: int, truncation: Fraction) -> "QSeries":
        f = lattice // self._lattice
        if f == 1 and truncation == self._truncation:
            return self
        limit = truncation * lattice
        terms = {n * f: c for n, c in self._terms.items() if n * f <= limit}
        return QSeries._make(lattice, terms, truncation)

    def truncate_to(self, truncation) -> "QSeries":
        T = min(self._truncation, as_fraction(truncation))
        limit = T * self._lattice
        terms = {n: c for n, c in self._terms.items() if n <= limit}
        return QSeries._make(self._lattice, terms, T)

    def shift(self, offset) -> "QSeries":
        """Multiply by q**offset: exponents and truncation shift together."""
        d = as_fraction(offset)
        D = math.lcm(self._lattice, d.denominator)
        f = D // self._lattice
        dn = d.numerator * (D // d.denominator)
        terms = {n * f + dn: c for n, c in self._terms.items()}
        return QSeries._make(D, terms, self._truncation + d)

    def scale(self, factor) -> "QSeries":
        c = as_fraction(factor)
        if not c:
            return QSeries._make(self._lattice, {}, self._truncation)
        return QSeries._make(
            self._lattice, {n: v * c for n, v in self._terms.items()}, self._truncation
        )

    # ------------------------------------------------------------------
    # ring operations

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = align(self, other)
        terms = dict(a._terms)
        for n, c in b._terms.items():
            s = terms.get(n, _ZERO) + c
            if s:
                terms[n] = s
            else:
                terms.pop(n, None)
        return QSeries._make(a._lattice, terms, a._truncation)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return QSeries._make(
            self._lattice, {n: -c for n, c in self._terms.items()}, self._truncation
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        D = math.lcm(self._lattice, other._lattice)
        fa = D // self._lattice
        fb = D // other._lattice
        # unknown terms of one factor first pollute the product above the
        # other factor's truncation shifted by this factor's lowest exponent
        T = min(
            self._truncation + other._vbound(),
            other._truncation + self._vbound(),
        )
        limit = T * D
        out: dict[int, Fraction] = {}
        b_items = sorted((n * fb, c) for n, c in other._terms.items())
        for n1, c1 in self._terms.items():
            n1f = n1 * fa
            for n2, c2 in b_items:
                n = n1f + n2
                if n > limit:
                    break
                out[n] = out.get(n, _ZERO) + c1 * c2
        out = {n: c for n, c in out.items() if c}
        return QSeries._make(D, out, T)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / as_fraction(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        return self * other.invert()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return QSeries.one(self._truncation)
        if n < 0:
            return self.invert() ** (-n)
        result = None
        base = self
        while True:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if not n:
                return result
            base = base * base

    def derive(self) -> "QSeries":
        """Apply q*d/dq: the coefficient of q^e is multiplied by e."""
        D = self._lattice
        terms = {n: c * Fraction(n, D) for n, c in self._terms.items() if n}
        return QSeries._make(D, terms, self._truncation)

    def invert(self, target_truncation=None) -> "QSeries":
        """Multiplicative inverse.

        With the operand known through q^T and of valuation v, the inverse is
        sound through q^(T - 2v); asking for more raises
        InsufficientPrecisionError, and inverting a series with no known
        nonzero term raises ZeroDivisionError.
        """
        if not self._terms:
            raise ZeroDivisionError("cannot invert a series that is zero through its truncation")
        v, c = self.valuation_leading()
        cap = self._truncation - 2 * v
        if target_truncation is None:
            T = cap
        else:
            T = as_fraction(target_truncation)
            if T > cap:
                raise InsufficientPrecisionError(
                    f"inverse requested through q^{T}, operand only supports q^{cap}"
                )
        E = T + v
        u = self.shift(-v).scale(Fraction(1) / c).truncate_to(E)
        neg_x = QSeries.one(E) - u  # -(u - 1), valuation > 0
        acc = QSeries.one(E)
        p = neg_x
        while not p.is_zero:
            acc = acc + p
            p = (p * neg_x).truncate_to(E)
        return acc.shift(-v).scale(Fraction(1) / c)

    # ------------------------------------------------------------------
    # comparison and serialization

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = align(self, other)
        return a._terms == b._terms

    __hash__ = None

    def to_json_dict(self) -> dict:
        """Canonical encoding: reduced lattice, sorted terms, string rationals."""
        if self._terms:
            g = math.gcd(self._lattice, *self._terms)
        else:
            g = self._lattice
        return {
            "lattice": self._lattice // g,
            "truncation": format_rational(self._truncation),
            "terms": [[n // g, str(c)] for n, c in sorted(self._terms.items())],
        }

    def to_json(self) -> str:
        import json

        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, data: dict) -> "QSeries":
        terms = {int(n): Fraction(c) for n, c in data["terms"]}
        return cls(int(data["lattice"]), terms, Fraction(data["truncation"]))

    @classmethod
    def from_json(cls, text: str) -> "QSeries":
        import json

        return cls.from_json_dict(json.loads(text))

    # ------------------------------------------------------------------
    # display

    def head_str(self, count: int = 8) -> str:
        """First `count` terms, one 'exponent  coefficient' line each."""
        rows = [f"{str(e):>12}  {c}" for e, c in self.items()[:count]]
        if self.term_count > count:
            rows.append(f"{'...':>12}")
        rows.append(f"(lattice {self._lattice}, truncation {self._truncation})")
        return "\n".join(rows)

    def __repr__(self):
        parts = []
        for e, c in self.items()[:6]:
            if e == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"q^({e})")
            else:
                parts.append(f"{c}*q^({e})")
        if self.term_count > 6:
            parts.append("...")
        body = " + ".join(parts) if parts else "0"
        return f"QSeries({body} + O(q^({self._truncation})))"


# ----------------------------------------------------------------------
# module-level operation surface


def align(a: QSeries, b: QSeries) -> tuple[QSeries, QSeries]:
    """Re-express both series on lattice lcm(Da, Db) with truncation min(Ta, Tb)."""
    D = math.lcm(a._lattice, b._lattice)
    T = min(a._truncation, b._truncation)
    return a._reindex(D, T), b._reindex(D, T)


def add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def neg(a: QSeries) -> QSeries:
    return -a


def invert(a: QSeries, target_truncation=None) -> QSeries:
    return a.invert(target_truncation)


def derive(a: QSeries) -> QSeries:
    return a.derive()


def pow_int(a: QSeries, n: int) -> QSeries:
    return a**n


def valuation_leading(a: QSeries) -> tuple[Fraction, Fraction]:
    return a.valuation_leading()


def first_difference(a: QSeries, b: QSeries):
    """Smallest exponent (up to the common truncation) where the two series
    disagree, as (exponent, coeff_a, coeff_b); None when they agree."""
    x, y = align(a, b)
    for n in sorted(set(x._terms) | set(y._terms)):
        ca = x._terms.get(n, _ZERO)
        cb = y._terms.get(n, _ZERO)
        if ca != cb:
            return Fraction(n, x._lattice), ca, cb
    return None
