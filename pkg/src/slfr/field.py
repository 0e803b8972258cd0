"""Exact arithmetic over finite fields GF(p^m).

Field elements are encoded as canonical integers in [0, q), q = p^m: the
base-p digits of the integer are the coefficients of the element's
polynomial representation, constant term first.  A :class:`FieldSpec`
carries the field parameters and performs arithmetic directly on the
integer encoding; :class:`FieldElement` wraps one encoded value together
with its spec and overloads the usual operators.

Fields up to q = 2^16 are supported.  Extension fields with q <= 4096 run
multiplication and inversion on precomputed log/antilog tables; larger
extensions reduce polynomials explicitly on every product.
"""

from __future__ import annotations

from functools import lru_cache


class MismatchedField(ValueError):
    """Raised when two operands belong to different fields."""


class DivisionByZero(ZeroDivisionError):
    """Raised when inverting or dividing by the zero element."""


class OutOfRange(ValueError):
    """Raised when an integer encoding is outside [0, q)."""


class ReduciblePolynomial(ValueError):
    """Raised when a supplied reduction polynomial is not irreducible."""


# Canonical reduction polynomials, coefficients constant-term first.
# These are the lexicographically smallest monic irreducible choices and
# are what `irreducible_poly` would find; shipped so the common small
# extension fields are reproducible without a search.
DEFAULT_POLYS = {
    (2, 2): (1, 1, 1),        # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),     # x^3 + x + 1
    (3, 2): (1, 0, 1),        # x^2 + 1
    (2, 4): (1, 1, 0, 0, 1),  # x^4 + x + 1
}

MAX_ORDER = 1 << 16
_TABLE_LIMIT = 1 << 12


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a, b, p):
    """Remainder of a modulo b over GF(p); coefficients constant-first."""
    a = _poly_trim(a)
    b = _poly_trim(b)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        factor = (a[-1] * inv_lead) % p
        shift = len(a) - len(b)
        for i, coeff in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * coeff) % p
        a = _poly_trim(a)
    return a


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def is_irreducible(poly, p: int) -> bool:
    """Exhaustive divisor test: no monic factor of degree in [1, m//2]."""
    poly = list(poly)
    m = len(poly) - 1
    if m < 1 or poly[-1] != 1:
        return False
    if poly[0] == 0:  # divisible by x
        return m == 1
    for d in range(1, m // 2 + 1):
        for low in range(p**d):
            div = _digits(low, p, d) + [1]
            if not _poly_mod(poly, div, p):
                return False
    return True


def irreducible_poly(p: int, m: int) -> tuple:
    """Smallest (by constant-first digit encoding) monic irreducible of degree m."""
    if m == 1:
        return (0, 1)
    for low in range(1, p**m):
        cand = tuple(_digits(low, p, m)) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {m} over GF({p})")


def _digits(n: int, p: int, width: int) -> list:
    out = []
    for _ in range(width):
        out.append(n % p)
        n //= p
    return out


def _undigits(digits, p: int) -> int:
    n = 0
    for d in reversed(digits):
        n = n * p + d
    return n


class FieldSpec:
    """A finite field GF(p^m) together with arithmetic on encoded elements.

    All operations take and return canonical integer encodings.  Instances
    are immutable after construction and safe to share between threads.
    """

    __slots__ = ("p", "m", "q", "poly", "minus_one", "_exp", "_log")

    def __init__(self, p: int, m: int = 1, poly=None):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if m < 1:
            raise ValueError(f"extension degree m = {m} must be >= 1")
        q = p**m
        if q > MAX_ORDER:
            raise ValueError(f"field order {q} exceeds the supported 2^16")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "q", q)
        if m == 1:
            if poly is not None:
                raise ValueError("reduction polynomial is only meaningful for m > 1")
            object.__setattr__(self, "poly", None)
        else:
            if poly is None:
                poly = DEFAULT_POLYS.get((p, m)) or irreducible_poly(p, m)
            poly = tuple(int(c) for c in poly)
            if len(poly) != m + 1:
                raise ValueError(f"reduction polynomial must have {m + 1} coefficients")
            if any(not 0 <= c < p for c in poly):
                raise ValueError("polynomial coefficients must lie in [0, p)")
            if poly[-1] != 1:
                raise ValueError("reduction polynomial must be monic")
            if not is_irreducible(poly, p):
                raise ReduciblePolynomial(f"{poly} is reducible over GF({p})")
            object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "minus_one", (p - 1) if m == 1 else (p - 1))
        if m > 1 and q <= _TABLE_LIMIT:
            exp, log = self._build_tables()
            object.__setattr__(self, "_exp", exp)
            object.__setattr__(self, "_log", log)
        else:
            object.__setattr__(self, "_exp", None)
            object.__setattr__(self, "_log", None)

    # -- construction helpers -------------------------------------------------

    def _mul_poly(self, a: int, b: int) -> int:
        da = _digits(a, self.p, self.m)
        db = _digits(b, self.p, self.m)
        prod = _poly_mul(da, db, self.p)
        rem = _poly_mod(prod, list(self.poly), self.p)
        rem += [0] * (self.m - len(rem))
        return _undigits(rem, self.p)

    def _build_tables(self):
        q = self.q
        for g in range(2, q):
            exp = [1]
            x = 1
            for _ in range(q - 1):
                x = self._mul_poly(x, g)
                exp.append(x)
                if x == 1:
                    break
            if len(exp) == q and exp[-1] == 1:
                exp = exp[:-1]
                log = [0] * q
                for i, v in enumerate(exp):
                    log[v] = i
                return exp + exp, log
        raise RuntimeError(f"no generator found for order {q}")  # pragma: no cover

    # -- arithmetic on integer encodings --------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        da = _digits(a, self.p, self.m)
        db = _digits(b, self.p, self.m)
        return _undigits([(x + y) % self.p for x, y in zip(da, db)], self.p)

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return _undigits([(-x) % self.p for x in _digits(a, self.p, self.m)], self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._mul_poly(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"zero has no inverse in {self!r}")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        if self._exp is not None:
            return self._exp[(self.q - 1) - self._log[a]]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if self.m == 1:
            return pow(a, n, self.p)
        result, base = 1, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def sign(self, exponent: int) -> int:
        """(-1)^exponent as an encoded element; equals 1 in characteristic 2."""
        return self.minus_one if exponent % 2 else 1

    # -- element interface -----------------------------------------------------

    def element(self, value: int) -> "FieldElement":
        if not 0 <= value < self.q:
            raise OutOfRange(f"{value} is not a canonical encoding in [0, {self.q})")
        return FieldElement(self, value)

    def elements(self):
        """All field elements as encodings, in canonical order."""
        return range(self.q)

    # -- identity, serialization ------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.m == other.m
            and self.poly == other.poly
        )

    def __hash__(self):
        return hash((self.p, self.m, self.poly))

    def __repr__(self):
        return f"GF({self.p})" if self.m == 1 else f"GF({self.p}^{self.m})"

    def to_json(self) -> dict:
        out = {"p": self.p, "m": self.m}
        if self.m > 1:
            out["poly"] = list(self.poly)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        poly = data.get("poly")
        return cls(data["p"], data.get("m", 1), tuple(poly) if poly else None)


class FieldElement:
    """A single field element: a spec plus its canonical integer encoding."""

    __slots__ = ("spec", "value")

    def __init__(self, spec: FieldSpec, value: int):
        self.spec = spec
        self.value = value

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise MismatchedField(f"{self.spec!r} vs {other.spec!r}")
            return other.value
        if isinstance(other, int):
            return other % self.spec.q if self.spec.m == 1 else other
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.spec, self.spec.add(self.value, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.spec, self.spec.sub(self.value, v))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.spec, self.spec.mul(self.value, v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.spec, self.spec.div(self.value, v))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.value))

    def __pow__(self, n: int):
        return FieldElement(self.spec, self.spec.pow(self.value, n))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.value))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.spec!r}({self.value})"


@lru_cache(maxsize=None)
def GF(p: int, m: int = 1, poly=None) -> FieldSpec:
    """Cached FieldSpec factory; `poly` must be a tuple when given."""
    return FieldSpec(p, m, poly)
