"""Exact coefficient fields.

Three kinds of field are supported: the rationals, rational functions in a
single symbol ``q`` with integer coefficients, and the cyclotomic quotients
Q[q]/Phi_N(q) used when q is a primitive N-th root of unity.

Polynomial arithmetic is delegated to python-flint.
"""

import re
from fractions import Fraction

from flint import fmpq, fmpq_poly, fmpz_poly


class FieldMismatch(ValueError):
    pass


class ScalarParseError(ValueError):
    pass


class ScalarField:
    """A coefficient field. Instances are compared by kind (and N)."""

    __slots__ = ("kind", "N", "_phi", "_zero", "_one")

    RATIONAL = "rational"
    RATIONAL_Q = "rational_q"
    CYCLOTOMIC = "cyclotomic"

    def __init__(self, kind, N=None):
        if kind not in (self.RATIONAL, self.RATIONAL_Q, self.CYCLOTOMIC):
            raise ValueError("unknown field kind %r" % (kind,))
        if kind == self.CYCLOTOMIC:
            if N is None or int(N) < 2:
                raise ValueError("cyclotomic(N) needs N >= 2")
            N = int(N)
            self._phi = fmpq_poly(fmpz_poly.cyclotomic(N))
        else:
            N = None
            self._phi = None
        self.kind = kind
        self.N = N
        self._zero = None
        self._one = None

    @classmethod
    def from_string(cls, text):
        """Accepts ``q``, ``rational``, ``cyclotomic:N`` (and a few aliases)."""
        t = text.strip().lower()
        if t in ("q", "rational_q", "symbolic"):
            return cls(cls.RATIONAL_Q)
        if t in ("rational", "rationals", "qq"):
            return cls(cls.RATIONAL)
        m = re.fullmatch(r"cyclotomic[:(]\s*(\d+)\s*\)?", t)
        if m:
            return cls(cls.CYCLOTOMIC, int(m.group(1)))
        raise ValueError("unknown field %r" % (text,))

    @property
    def name(self):
        if self.kind == self.RATIONAL:
            return "rational"
        if self.kind == self.RATIONAL_Q:
            return "q"
        return "cyclotomic:%d" % self.N

    def __repr__(self):
        return "ScalarField(%s)" % self.name

    def __eq__(self, other):
        return isinstance(other, ScalarField) and self.kind == other.kind and self.N == other.N

    def __hash__(self):
        return hash((self.kind, self.N))

    @property
    def has_q(self):
        return self.kind != self.RATIONAL

    # constructors

    def zero(self):
        if self._zero is None:
            self._zero = self.from_rational(0)
        return self._zero

    def one(self):
        if self._one is None:
            self._one = self.from_rational(1)
        return self._one

    def q(self):
        if self.kind == self.RATIONAL:
            raise FieldMismatch("the rational field has no symbol q")
        if self.kind == self.RATIONAL_Q:
            return _RatFunc(self, fmpz_poly([0, 1]), fmpz_poly([1]))
        return _Cyclo(self, fmpq_poly([0, 1]) % self._phi)

    def from_rational(self, x):
        if isinstance(x, Scalar):
            if x.field != self:
                raise FieldMismatch("%s vs %s" % (x.field.name, self.name))
            return x
        if isinstance(x, Fraction):
            x = fmpq(x.numerator, x.denominator)
        elif isinstance(x, int):
            x = fmpq(x)
        elif not isinstance(x, fmpq):
            raise TypeError("cannot coerce %r into %s" % (x, self.name))
        if self.kind == self.RATIONAL:
            return _Rat(self, x)
        if self.kind == self.RATIONAL_Q:
            return _RatFunc(self, fmpz_poly([int(x.p)]), fmpz_poly([int(x.q)]))
        return _Cyclo(self, fmpq_poly([x]))

    __call__ = from_rational

    def from_poly(self, coeffs):
        """Scalar for sum coeffs[k] q^k (integer or rational coefficients)."""
        acc = self.zero()
        q = self.q() if any(coeffs[1:]) else None
        for k, a in enumerate(coeffs):
            if a:
                acc = acc + self.from_rational(a) * (q ** k if k else self.one())
        return acc

    def parse(self, text):
        """Parse a scalar string such as ``(1-q^2)/(1-q)`` or ``3/2``."""
        return parse_expression(text, self, atom=None)


class Scalar:
    """Base class for field elements. Subclasses hold the representation."""

    __slots__ = ("field",)

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch("%s vs %s" % (self.field.name, other.field.name))
            return other
        if isinstance(other, (int, Fraction, fmpq)):
            return self.field.from_rational(other)
        return NotImplemented

    def __radd__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + self

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("integer exponents only")
        base = self
        if n < 0:
            base = self.inverse()
            n = -n
        result = self.field.one()
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __pos__(self):
        return self

    def __bool__(self):
        return not self.is_zero()

    def __ne__(self, other):
        r = self.__eq__(other)
        if r is NotImplemented:
            return r
        return not r

    def __repr__(self):
        return "Scalar(%s, %s)" % (self.field.name, str(self))

    def is_one(self):
        return self == 1


class _Rat(Scalar):
    __slots__ = ("v",)

    def __init__(self, field, v):
        self.field = field
        self.v = v

    def is_zero(self):
        return self.v == 0

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _Rat(self.field, self.v + o.v)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _Rat(self.field, self.v - o.v)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _Rat(self.field, self.v * o.v)

    def __neg__(self):
        return _Rat(self.field, -self.v)

    def inverse(self):
        if self.v == 0:
            raise ZeroDivisionError("scalar division by zero")
        return _Rat(self.field, 1 / self.v)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.v == o.v

    def __hash__(self):
        return hash((int(self.v.p), int(self.v.q)))

    def __str__(self):
        return str(self.v)

    def to_fraction(self):
        return Fraction(int(self.v.p), int(self.v.q))


def _normalize(num, den):
    if den == 0:
        raise ZeroDivisionError("scalar division by zero")
    if num == 0:
        return fmpz_poly([0]), fmpz_poly([1])
    if den.degree() > 0 or abs(den[0]) != 1:
        g = num.gcd(den)
        if g != 1:
            num = num // g
            den = den // g
    if den[den.degree()] < 0:
        num = -num
        den = -den
    return num, den


class _RatFunc(Scalar):
    """Reduced fraction num/den of integer polynomials in q."""

    __slots__ = ("num", "den")

    def __init__(self, field, num, den, reduce=True):
        self.field = field
        if reduce:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    def is_zero(self):
        return self.num == 0

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return _RatFunc(self.field, self.num + o.num, self.den)
        return _RatFunc(self.field, self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return _RatFunc(self.field, self.num - o.num, self.den)
        return _RatFunc(self.field, self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == 1 and o.den == 1:
            return _RatFunc(self.field, self.num * o.num, self.den, reduce=False)
        return _RatFunc(self.field, self.num * o.num, self.den * o.den)

    def __neg__(self):
        return _RatFunc(self.field, -self.num, self.den, reduce=False)

    def inverse(self):
        if self.num == 0:
            raise ZeroDivisionError("scalar division by zero")
        return _RatFunc(self.field, self.den, self.num)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((tuple(int(c) for c in self.num.coeffs()), tuple(int(c) for c in self.den.coeffs())))

    def __str__(self):
        n = _poly_str(self.num.coeffs())
        if self.den == 1:
            return n
        d = _poly_str(self.den.coeffs())
        if any(ch in n[1:] for ch in "+-"):
            n = "(" + n + ")"
        if not re.fullmatch(r"\d+|q(\^\d+)?", d):
            d = "(" + d + ")"
        return n + "/" + d

    def evaluate(self, value):
        """Substitute a rational value for q (used by numeric sanity checks)."""
        v = fmpq(value) if isinstance(value, int) else value
        return self.num(v) / self.den(v)


class _Cyclo(Scalar):
    """Residue class of a rational polynomial modulo Phi_N(q)."""

    __slots__ = ("v",)

    def __init__(self, field, v):
        self.field = field
        self.v = v

    def is_zero(self):
        return self.v == 0

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _Cyclo(self.field, self.v + o.v)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _Cyclo(self.field, self.v - o.v)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _Cyclo(self.field, (self.v * o.v) % self.field._phi)

    def __neg__(self):
        return _Cyclo(self.field, -self.v)

    def inverse(self):
        if self.v == 0:
            raise ZeroDivisionError("scalar division by zero")
        g, s, _ = self.v.xgcd(self.field._phi)
        # Phi_N is irreducible, so any nonzero residue is a unit
        return _Cyclo(self.field, (s / g) % self.field._phi)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.v == o.v

    def __hash__(self):
        return hash(tuple(str(c) for c in self.v.coeffs()))

    def __str__(self):
        return _poly_str(self.v.coeffs())


def _poly_str(coeffs):
    """Ascending-power rendering in the scalar grammar, e.g. ``1-q^2``."""
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = -c if c < 0 else c
        sign = "-" if c < 0 else "+"
        if k == 0:
            body = str(mag)
        else:
            mono = "q" if k == 1 else "q^%d" % k
            body = mono if mag == 1 else "%s*%s" % (str(mag), mono)
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += sign + body
    return out


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text):
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        if m.group(1) is not None:
            out.append(("int", int(m.group(1))))
        elif m.group(2) is not None:
            out.append(("name", m.group(2)))
        else:
            ch = m.group(3)
            if ch.isspace():
                continue
            if ch not in "+-*/^()":
                raise ScalarParseError("unexpected character %r in %r" % (ch, text))
            out.append(("op", ch))
    return out


class _Parser:
    """Recursive descent over + - * / ^ ( ), integers and names.

    ``atom`` maps identifiers other than ``q`` to ring elements; when it is
    None only scalars are accepted. Division is allowed by scalars only.
    """

    def __init__(self, text, field, atom):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.field = field
        self.atom = atom

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t != ("op", op):
            raise ScalarParseError("expected %r in %r" % (op, self.text))

    def parse(self):
        if not self.toks:
            raise ScalarParseError("empty expression")
        v = self.expr()
        if self.i != len(self.toks):
            raise ScalarParseError("trailing input in %r" % (self.text,))
        return v

    def expr(self):
        v = self.term()
        while True:
            t = self.peek()
            if t == ("op", "+"):
                self.take()
                v = v + self.term()
            elif t == ("op", "-"):
                self.take()
                v = v - self.term()
            else:
                return v

    def term(self):
        v = self.unary()
        while True:
            t = self.peek()
            if t == ("op", "*"):
                self.take()
                v = v * self.unary()
            elif t == ("op", "/"):
                self.take()
                d = self.unary()
                if not isinstance(d, Scalar):
                    raise ScalarParseError("division by a non-scalar in %r" % (self.text,))
                v = v * d.inverse()
            else:
                return v

    def unary(self):
        t = self.peek()
        if t == ("op", "-"):
            self.take()
            return -self.unary()
        if t == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def exponent(self):
        t = self.peek()
        sign = 1
        paren = False
        if t == ("op", "("):
            self.take()
            paren = True
            t = self.peek()
        if t == ("op", "-"):
            self.take()
            sign = -1
        kind, val = self.take()
        if kind != "int":
            raise ScalarParseError("bad exponent in %r" % (self.text,))
        if paren:
            self.expect(")")
        return sign * val

    def power(self):
        v = self.primary()
        if self.peek() == ("op", "^"):
            self.take()
            n = self.exponent()
            if not isinstance(v, Scalar) and n < 0:
                raise ScalarParseError("negative power of a non-scalar in %r" % (self.text,))
            if isinstance(v, Scalar):
                v = v ** n
            else:
                acc = None
                for _ in range(n):
                    acc = v if acc is None else acc * v
                v = acc if acc is not None else self.field.one()
        return v

    def primary(self):
        kind, val = self.take()
        if kind == "int":
            return self.field.from_rational(val)
        if kind == "name":
            if val == "q" and self.field.has_q:
                return self.field.q()
            if self.atom is None:
                raise ScalarParseError("unknown symbol %r in %r" % (val, self.text))
            return self.atom(val)
        if (kind, val) == ("op", "("):
            v = self.expr()
            self.expect(")")
            return v
        raise ScalarParseError("unexpected token %r in %r" % (val, self.text))


def parse_expression(text, field, atom=None):
    return _Parser(text, field, atom).parse()


# ---------------------------------------------------------------- q-numbers


def q_int(m, base):
    """Geometric sum 1 + base + ... + base^(m-1); q_int(0, .) = 0."""
    if m < 0:
        raise ValueError("q_int needs m >= 0")
    acc = base.field.zero()
    p = base.field.one()
    for _ in range(m):
        acc = acc + p
        p = p * base
    return acc


def q_factorial(m, base):
    acc = base.field.one()
    for k in range(1, m + 1):
        acc = acc * q_int(k, base)
    return acc


def gaussian_polynomial(m, r):
    """Integer polynomial [m choose r](x), by exact division in Z[x]."""
    if r < 0 or r > m:
        return fmpz_poly([0])
    num = fmpz_poly([1])
    den = fmpz_poly([1])
    for i in range(r):
        num *= fmpz_poly([1] + [0] * (m - i - 1) + [-1])
        den *= fmpz_poly([1] + [0] * i + [-1])
    quo, rem = divmod(num, den)
    assert rem == 0
    return quo


def evaluate_int_poly(coeffs, base):
    acc = base.field.zero()
    for c in reversed(list(coeffs)):
        acc = acc * base + int(c)
    return acc


def q_binomial(m, r, base):
    """[m choose r] at ``base``: the product form divided out in Z[x] first."""
    if r < 0 or r > m:
        return base.field.zero()
    return evaluate_int_poly(gaussian_polynomial(m, r).coeffs(), base)


# ---------------------------------------------------------------- matrices


def mat_inverse(rows, field):
    """Inverse of a square matrix of Scalars by Gauss-Jordan; ValueError if singular."""
    n = len(rows)
    a = [[field.from_rational(x) for x in row] + [field.one() if i == j else field.zero()
                                                  for j in range(n)]
         for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    field = (a[0][0]).field
    return [[sum((a[i][k] * b[k][j] for k in range(m)), field.zero()) for j in range(p)]
            for i in range(n)]
