"""Dense univariate polynomials and reduced rational functions over a
finite field, with exact local valuations.

Coefficients are carried as field codes (see ``ffield``); the coefficient
field may be a ``Field`` or an ``ExtField``, anything exposing code
arithmetic.  ``Poly`` is trimmed and immutable, with the constant term
first.  ``RatFunc`` keeps a reduced fraction whose denominator is monic,
so equality and hashing are structural.

The degree of the zero polynomial is -inf and its valuations are +inf,
using float infinities as sentinels next to exact integers everywhere
else.
"""

from __future__ import annotations

__all__ = ["INF", "NEG_INF", "Poly", "RatFunc"]

INF = float("inf")
NEG_INF = float("-inf")


class Poly:
    """Polynomial over a finite field, coefficients as codes, constant
    term first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs=()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, field) -> Poly:
        return cls(field, ())

    @classmethod
    def one(cls, field) -> Poly:
        return cls(field, (1,))

    @classmethod
    def t(cls, field) -> Poly:
        return cls(field, (0, 1))

    @classmethod
    def const(cls, field, code: int) -> Poly:
        return cls(field, (code,))

    # -- structure --------------------------------------------------------

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.field != self.field:
                raise ValueError("polynomial over a different field")
            return other
        if isinstance(other, int):
            return Poly(self.field, (other % self.field.p,))
        return NotImplemented

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return Poly(F, tuple(F.neg(c) for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(F, ())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Poly(F, out)

    __rmul__ = __mul__

    def scale(self, code: int) -> Poly:
        """Multiply by a field element given as a code."""
        F = self.field
        if code == 0:
            return Poly(F, ())
        return Poly(F, tuple(F.mul(c, code) for c in self.coeffs))

    def shift(self, k: int) -> Poly:
        """Multiply by t^k (k >= 0)."""
        if k < 0:
            raise ValueError("shift must be >= 0")
        if not self.coeffs:
            return self
        return Poly(self.field, (0,) * k + self.coeffs)

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        rem = list(self.coeffs)
        db = other.degree
        quo = [0] * max(0, len(rem) - db)
        ilc = F.inv(other.lead)
        while len(rem) - 1 >= db:
            c = F.mul(rem[-1], ilc)
            k = len(rem) - 1 - db
            if c:
                quo[k] = c
                for i, y in enumerate(other.coeffs):
                    rem[k + i] = F.sub(rem[k + i], F.mul(c, y))
            rem.pop()
        return Poly(F, quo), Poly(F, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> Poly:
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError("division is not exact")
        return q

    def monic(self) -> Poly:
        if self.is_zero():
            raise ValueError("zero polynomial cannot be made monic")
        if self.lead == 1:
            return self
        return self.scale(self.field.inv(self.lead))

    def gcd(self, other) -> Poly:
        a, b = self, self._coerce(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def eval_code(self, x: int) -> int:
        F = self.field
        out = 0
        for c in reversed(self.coeffs):
            out = F.add(F.mul(out, x), c)
        return out

    # -- valuations ---------------------------------------------------------

    def t_valuation(self):
        """Order of vanishing at t = 0 (+inf for the zero polynomial)."""
        if not self.coeffs:
            return INF
        k = 0
        while self.coeffs[k] == 0:
            k += 1
        return k

    def root_multiplicity(self, c: int):
        """Order of vanishing at t = c (+inf for the zero polynomial)."""
        if not self.coeffs:
            return INF
        if c == 0:
            return self.t_valuation()
        F = self.field
        cur = list(self.coeffs)
        mult = 0
        while True:
            # synthetic division by (t - c)
            out = [0] * (len(cur) - 1)
            acc = 0
            for i in range(len(cur) - 1, 0, -1):
                acc = F.add(F.mul(acc, c), cur[i])
                out[i - 1] = acc
            rem = F.add(F.mul(acc, c), cur[0])
            if rem != 0:
                return mult
            mult += 1
            cur = out
            if not cur:
                return mult

    def deflate(self, c: int, k: int) -> Poly:
        """Exact division by (t - c)^k."""
        F = self.field
        lin = Poly(F, (F.neg(c), 1))
        out = self
        for _ in range(k):
            out = out.exact_div(lin)
        return out

    # -- comparisons --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(f"[{c}]")
            else:
                head = "" if c == 1 else f"[{c}]*"
                terms.append(f"{head}t" + (f"^{i}" if i > 1 else ""))
        return " + ".join(terms)


class RatFunc:
    """Reduced rational function num/den with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.one(num.field)
        if num.field != den.field:
            raise ValueError("numerator and denominator over different fields")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly.one(num.field)
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
            if den.lead != 1:
                ilc = num.field.inv(den.lead)
                num = num.scale(ilc)
                den = den.scale(ilc)
        self.num = num
        self.den = den

    @property
    def field(self):
        return self.num.field

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, field) -> RatFunc:
        return cls(Poly.zero(field))

    @classmethod
    def one(cls, field) -> RatFunc:
        return cls(Poly.one(field))

    @classmethod
    def t(cls, field) -> RatFunc:
        return cls(Poly.t(field))

    @classmethod
    def const(cls, field, code: int) -> RatFunc:
        return cls(Poly.const(field, code))

    def _coerce(self, other) -> RatFunc:
        if isinstance(other, RatFunc):
            if other.field != self.field:
                raise ValueError("rational function over a different field")
            return other
        if isinstance(other, Poly):
            if other.field != self.field:
                raise ValueError("polynomial over a different field")
            return RatFunc(other)
        if isinstance(other, int):
            return RatFunc(Poly.const(self.field, other % self.field.p))
        return NotImplemented

    # -- field operations -----------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def inverse(self) -> RatFunc:
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = RatFunc.one(self.field)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def scale(self, code: int) -> RatFunc:
        return RatFunc(self.num.scale(code), self.den)

    # -- structure --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.den.degree == 0 and self.num.degree <= 0

    def constant_code(self) -> int:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.coeff(0)

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            raise ValueError("not a polynomial")
        return self.num

    def in_base(self) -> bool:
        """True when every coefficient lies in the base field of an
        extension-field coefficient domain."""
        E = self.field
        return all(E.in_base(c) for c in self.num.coeffs) and all(
            E.in_base(c) for c in self.den.coeffs
        )

    def eval_code(self, x: int) -> int:
        d = self.den.eval_code(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at code {x}")
        F = self.field
        return F.mul(self.num.eval_code(x), F.inv(d))

    def valuation_at(self, c: int):
        """Valuation at the place t = c (+inf for zero)."""
        if self.num.is_zero():
            return INF
        return self.num.root_multiplicity(c) - self.den.root_multiplicity(c)

    def valuation_infty(self):
        """Valuation at the place at infinity: deg(den) - deg(num)."""
        if self.num.is_zero():
            return INF
        return self.den.degree - self.num.degree

    def __eq__(self, other):
        if isinstance(other, (RatFunc, Poly, int)):
            other = self._coerce(other)
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.num.is_zero()

    def __repr__(self):
        if self.den.degree == 0:
            return repr(self.num)
        return f"({self.num!r}) / ({self.den!r})"
