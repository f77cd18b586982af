"""Free noncommutative polynomials and bounded-degree ideal membership.

Elements of the free algebra are finite maps from words (tuples of generator
ids) to scalars. Membership in the two-sided ideal generated by a list of
relations is decided on degree slices: the span of w1*r*w2 with total weight
at most L is row reduced, with the largest word of each row as its pivot.
The words that never occur as pivots form the quotient basis.
"""

import json
import re

from .scalars import Scalar, ScalarField, parse_expression

DEFAULT_WORD_CAP = 200_000

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class SliceLimitExceeded(RuntimeError):
    pass


class WeightOverflow(ValueError):
    pass


class Generator:
    __slots__ = ("id", "name", "display", "weight")

    def __init__(self, id, name, weight=1, display=None):
        if weight < 1:
            raise ValueError("generator weight must be >= 1")
        if not _NAME.match(name):
            raise ValueError("bad generator name %r" % (name,))
        self.id = id
        self.name = name
        self.weight = weight
        self.display = display or name

    def __repr__(self):
        return "Generator(%d, %r, weight=%d)" % (self.id, self.name, self.weight)


class NCPoly:
    """Element of the free algebra: dict word -> nonzero Scalar."""

    __slots__ = ("field", "terms")

    def __init__(self, field, terms=None):
        self.field = field
        self.terms = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = c

    @classmethod
    def _raw(cls, field, terms):
        p = cls.__new__(cls)
        p.field = field
        p.terms = terms
        return p

    @classmethod
    def constant(cls, field, c):
        c = field.from_rational(c)
        return cls._raw(field, {(): c} if c else {})

    @classmethod
    def word(cls, field, w, c=None):
        return cls._raw(field, {tuple(w): field.one() if c is None else field.from_rational(c)})

    def _lift(self, other):
        if isinstance(other, NCPoly):
            if other.field != self.field:
                raise ValueError("field mismatch")
            return other
        if isinstance(other, (int, Scalar)) or type(other).__name__ in ("Fraction", "fmpq"):
            return NCPoly.constant(self.field, other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        t = dict(self.terms)
        for w, c in o.terms.items():
            v = t.get(w)
            if v is None:
                t[w] = c
            else:
                v = v + c
                if v:
                    t[w] = v
                else:
                    del t[w]
        return NCPoly._raw(self.field, t)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._raw(self.field, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def scale(self, c):
        c = self.field.from_rational(c)
        if not c:
            return NCPoly(self.field)
        return NCPoly._raw(self.field, {w: a * c for w, a in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        t = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in o.terms.items():
                w = w1 + w2
                v = t.get(w)
                t[w] = c1 * c2 if v is None else v + c1 * c2
        return NCPoly(self.field, t)

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n):
        acc = NCPoly.constant(self.field, 1)
        for _ in range(n):
            acc = acc * self
        return acc

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, w):
        return self.terms.get(tuple(w), self.field.zero())

    def constant_term(self):
        return self.coeff(())

    def max_length(self):
        return max((len(w) for w in self.terms), default=0)

    def __repr__(self):
        return "NCPoly(%r)" % (self.terms,)


def nc_mul(p, r):
    return p * r


class TensorElement:
    """Element of F (x) F: dict (word, word) -> nonzero Scalar."""

    __slots__ = ("field", "terms")

    def __init__(self, field, terms=None):
        self.field = field
        self.terms = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = c

    @classmethod
    def _raw(cls, field, terms):
        x = cls.__new__(cls)
        x.field = field
        x.terms = terms
        return x

    @classmethod
    def of(cls, p, r):
        """p (x) r for NCPolys p and r."""
        t = {}
        for w1, c1 in p.terms.items():
            for w2, c2 in r.terms.items():
                t[(w1, w2)] = c1 * c2
        return cls(p.field, t)

    @classmethod
    def one(cls, field):
        return cls._raw(field, {((), ()): field.one()})

    def __add__(self, other):
        t = dict(self.terms)
        for k, c in other.terms.items():
            v = t.get(k)
            if v is None:
                t[k] = c
            else:
                v = v + c
                if v:
                    t[k] = v
                else:
                    del t[k]
        return TensorElement._raw(self.field, t)

    def __neg__(self):
        return TensorElement._raw(self.field, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.field.from_rational(c)
        if not c:
            return TensorElement(self.field)
        return TensorElement._raw(self.field, {k: a * c for k, a in self.terms.items()})

    def __mul__(self, other):
        """Unbraided product (a (x) b)(c (x) d) = ac (x) bd."""
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        t = {}
        for (a, b), c1 in self.terms.items():
            for (c, d), c2 in other.terms.items():
                k = (a + c, b + d)
                v = t.get(k)
                t[k] = c1 * c2 if v is None else v + c1 * c2
        return TensorElement(self.field, t)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        return isinstance(other, TensorElement) and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return "TensorElement(%r)" % (self.terms,)


class Presentation:
    """Generators and relations (each relation read as ``= 0``)."""

    def __init__(self, field, generators=(), relations=()):
        self.field = field
        self.generators = []
        self._by_name = {}
        self.relations = []
        self._slices = {}
        for g in generators:
            if isinstance(g, Generator):
                self.add_generator(g.name, g.weight, g.display)
            elif isinstance(g, str):
                self.add_generator(g)
            else:
                self.add_generator(*g)
        for r in relations:
            self.add_relation(r)

    # construction

    def add_generator(self, name, weight=1, display=None):
        if name in self._by_name:
            raise ValueError("duplicate generator %r" % (name,))
        if name == "q" and self.field.has_q:
            raise ValueError("generator name 'q' is reserved for the deformation parameter")
        g = Generator(len(self.generators), name, weight, display)
        self.generators.append(g)
        self._by_name[name] = g
        self._slices.clear()
        return g.id

    def add_relation(self, r):
        if isinstance(r, str):
            r = self.parse(r)
        if r.field != self.field:
            raise ValueError("relation over the wrong field")
        for w in r.terms:
            for g in w:
                if g < 0 or g >= len(self.generators):
                    raise ValueError("relation uses an undeclared generator")
        if r:
            self.relations.append(r)
            self._slices.clear()

    def copy(self):
        p = Presentation(self.field)
        for g in self.generators:
            p.add_generator(g.name, g.weight, g.display)
        p.relations = list(self.relations)
        return p

    # access

    def gen(self, name):
        return NCPoly.word(self.field, (self._by_name[name].id,))

    def gen_id(self, name):
        return self._by_name[name].id

    def has_generator(self, name):
        return name in self._by_name

    def one(self):
        return NCPoly.constant(self.field, 1)

    def zero(self):
        return NCPoly(self.field)

    def weight(self, w):
        gs = self.generators
        return sum(gs[g].weight for g in w)

    def poly_weight(self, p):
        return max((self.weight(w) for w in p.terms), default=0)

    def key(self, w):
        return (self.weight(w), w)

    def parse(self, text):
        def atom(name):
            if name not in self._by_name:
                raise ValueError("unknown generator %r" % (name,))
            return self.gen(name)

        v = parse_expression(text, self.field, atom)
        if isinstance(v, Scalar):
            v = NCPoly.constant(self.field, v)
        return v

    # rendering

    def word_str(self, w, display=False):
        if not w:
            return "1"
        parts = []
        i = 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            g = self.generators[w[i]]
            name = g.display if display else g.name
            if display and j - i > 1 and ("^" in name or "_" in name):
                name = "(" + name + ")"
            parts.append(name if j - i == 1 else "%s^%d" % (name, j - i))
            i = j
        if not display:
            return "*".join(parts)
        return ("" if all(len(x) == 1 for x in parts) else " ").join(parts)

    def poly_str(self, p, display=False):
        if not p.terms:
            return "0"
        words = sorted(p.terms, key=self.key, reverse=True)
        out = []
        for w in words:
            out.append(_term_str(p.terms[w], self.word_str(w, display) if w else None, display))
        s = out[0]
        for t in out[1:]:
            s += " - " + t[1:] if t.startswith("-") else " + " + t
        return s

    def tensor_str(self, x, display=False):
        if not x.terms:
            return "0"
        keys = sorted(x.terms, key=lambda k: (self.key(k[0]), self.key(k[1])), reverse=True)
        out = []
        for k in keys:
            body = "%s (x) %s" % (self.word_str(k[0], display), self.word_str(k[1], display))
            out.append(_term_str(x.terms[k], "[" + body + "]", display))
        s = out[0]
        for t in out[1:]:
            s += " - " + t[1:] if t.startswith("-") else " + " + t
        return s

    def canonical_relations(self):
        """Monic (leading word coefficient 1), deduplicated, sorted."""
        seen = {}
        for r in self.relations:
            r = monic(r, self.key)
            s = self.poly_str(r)
            seen[s] = r
        return [seen[s] for s in sorted(seen)]

    def to_json(self):
        return {
            "field": self.field.name,
            "generators": [dict({"name": g.name, "weight": g.weight},
                                **({"display": g.display} if g.display != g.name else {}))
                           for g in self.generators],
            "relations": [self.poly_str(r) for r in self.canonical_relations()],
        }

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        field = ScalarField.from_string(doc.get("field", "q"))
        p = cls(field)
        for g in doc["generators"]:
            p.add_generator(g["name"], int(g.get("weight", 1)), g.get("display"))
        for r in doc.get("relations", []):
            p.add_relation(r)
        return p

    # slices

    def slice(self, L, cap=DEFAULT_WORD_CAP):
        s = self._slices.get(L)
        if s is None:
            s = Slice(self, L, cap)
            self._slices[L] = s
        return s


def _term_str(c, body, display):
    cs = str(c)
    if body is None:
        return cs
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    neg = cs.startswith("-") and not any(ch in cs[1:] for ch in "+-")
    mag = cs[1:] if neg else cs
    if any(ch in mag[1:] for ch in "+-") or "/" in mag:
        mag = "(" + mag + ")"
    sep = " " if display else "*"
    return ("-" if neg else "") + mag + sep + body


def monic(p, key):
    if not p.terms:
        return p
    lead = max(p.terms, key=key)
    c = p.terms[lead]
    return p if c == 1 else p.scale(c.inverse())


def count_words(weights, L):
    """Number of words of weight <= L for the given generator weights."""
    n = [0] * (L + 1)
    n[0] = 1
    for w in range(1, L + 1):
        n[w] = sum(n[w - g] for g in weights if g <= w)
    return sum(n)


def words_by_weight(pres, L):
    table = [[] for _ in range(L + 1)]
    table[0].append(())
    for w in range(1, L + 1):
        for g in pres.generators:
            if g.weight <= w:
                for rest in table[w - g.weight]:
                    table[w].append((g.id,) + rest)
    return table


class Slice:
    """Row-reduced ideal slice of a presentation at weight <= L."""

    def __init__(self, pres, L, cap=DEFAULT_WORD_CAP):
        if L < 0:
            raise ValueError("L must be >= 0")
        self.pres = pres
        self.L = L
        total = count_words([g.weight for g in pres.generators], L)
        if total > cap:
            raise SliceLimitExceeded(
                "slice at weight <= %d has %d words (cap %d)" % (L, total, cap))
        self.total_words = total
        self.field = pres.field
        self._key = pres.key
        self.pivots = {}
        self._cols = {}
        table = words_by_weight(pres, L)
        self.words = [w for ws in table for w in ws]
        for r in pres.relations:
            wr = pres.poly_weight(r)
            if wr > L:
                continue
            room = L - wr
            for a in range(room + 1):
                for w1 in table[a]:
                    for b in range(room - a + 1):
                        for w2 in table[b]:
                            self._add({w1 + m + w2: c for m, c in r.terms.items()})
        self.rank = len(self.pivots)
        self.basis = sorted((w for w in self.words if w not in self.pivots), key=self._key)
        self._nf_cache = {}

    def _reduce_dict(self, v):
        piv = self.pivots
        hits = [w for w in v if w in piv]
        for w in hits:
            c = v.pop(w)
            for u, a in piv[w].items():
                if u == w:
                    continue
                x = v.get(u)
                if x is None:
                    v[u] = -(c * a)
                else:
                    x = x - c * a
                    if x:
                        v[u] = x
                    else:
                        del v[u]
        return v

    def _add(self, v):
        v = self._reduce_dict(v)
        if not v:
            return False
        p = max(v, key=self._key)
        c = v[p]
        if c != 1:
            inv = c.inverse()
            v = {w: a * inv for w, a in v.items()}
        # keep rows fully reduced: eliminate p from earlier rows
        for pw in self._cols.pop(p, ()):
            row = self.pivots[pw]
            f = row.pop(p)
            for u, a in v.items():
                if u == p:
                    continue
                x = row.get(u)
                if x is None:
                    row[u] = -(f * a)
                    self._cols.setdefault(u, set()).add(pw)
                else:
                    x = x - f * a
                    if x:
                        row[u] = x
                    else:
                        del row[u]
                        self._cols[u].discard(pw)
        self.pivots[p] = v
        for u in v:
            if u != p:
                self._cols.setdefault(u, set()).add(p)
        return True

    def contains_weight(self, p):
        for w in p.terms:
            if self.pres.weight(w) > self.L:
                return False
        return True

    def reduce_word(self, w):
        nf = self._nf_cache.get(w)
        if nf is None:
            if self.pres.weight(w) > self.L:
                raise WeightOverflow("word of weight %d above slice bound %d"
                                     % (self.pres.weight(w), self.L))
            row = self.pivots.get(w)
            if row is None:
                nf = {w: self.field.one()}
            else:
                nf = {u: -a for u, a in row.items() if u != w}
            self._nf_cache[w] = nf
        return nf

    def reduce(self, p):
        out = {}
        for w, c in p.terms.items():
            for u, a in self.reduce_word(w).items():
                x = out.get(u)
                out[u] = c * a if x is None else x + c * a
        return NCPoly(self.field, out)

    def in_ideal(self, p):
        return self.reduce(p).is_zero()


def slice_basis(pres, L, cap=DEFAULT_WORD_CAP):
    s = pres.slice(L, cap)
    return list(s.basis), s.rank


def reduce_mod_ideal(p, pres, L):
    return pres.slice(L).reduce(p)


def tensor_reduce(x, left, right, L):
    """Normal form of x in (F/I)_L (x) (F/I)_L; zero iff x in I(x)F + F(x)I."""
    ls = left.slice(L)
    rs = right.slice(L)
    out = {}
    for (w1, w2), c in x.terms.items():
        n1 = ls.reduce_word(w1)
        n2 = rs.reduce_word(w2)
        for u1, a1 in n1.items():
            ca = c * a1
            for u2, a2 in n2.items():
                k = (u1, u2)
                v = out.get(k)
                out[k] = ca * a2 if v is None else v + ca * a2
    return TensorElement(x.field, out)


def substitute(p, images, field=None):
    """Apply the algebra map sending generator id g to images[g]."""
    field = field or p.field
    acc = {}
    cache = {}
    for w, c in p.terms.items():
        img = cache.get(w)
        if img is None:
            img = NCPoly.constant(field, 1)
            for g in w:
                img = img * images[g]
            cache[w] = img
        for u, a in img.terms.items():
            x = acc.get(u)
            acc[u] = c * a if x is None else x + c * a
    return NCPoly(field, acc)


def substitute_tensor(x, left_images, right_images, field=None):
    field = field or x.field
    out = TensorElement(field)
    one = NCPoly.constant(field, 1)
    for (w1, w2), c in x.terms.items():
        a = substitute(NCPoly.word(field, w1), left_images, field) if w1 else one
        b = substitute(NCPoly.word(field, w2), right_images, field) if w2 else one
        out = out + TensorElement.of(a, b).scale(c)
    return out


def relations_map_into(source, target, images, L, skip_heavy=False):
    """First relation of ``source`` whose image is not in the target slice, or None.

    With ``skip_heavy`` relations of weight above L are ignored instead of failing.
    """
    s = target.slice(L)
    for r in source.relations:
        if skip_heavy and source.poly_weight(r) > L:
            continue
        img = substitute(r, images, target.field)
        if not s.contains_weight(img):
            return r, img
        if not s.in_ideal(img):
            return r, img
    return None


def ideal_slices_equal(a, b, L, images_ab=None, images_ba=None):
    """Mutual inclusion of relation images at weight <= L."""
    if images_ab is None:
        images_ab = [NCPoly.word(b.field, (g.id,)) for g in a.generators]
    if images_ba is None:
        images_ba = [NCPoly.word(a.field, (g.id,)) for g in b.generators]
    return (relations_map_into(a, b, images_ab, L) is None
            and relations_map_into(b, a, images_ba, L) is None)


def slice_contained(a, b, L, images):
    """First pivot row of a's slice whose image is outside b's slice, or None."""
    sa = a.slice(L)
    sb = b.slice(L)
    for p in sorted(sa.pivots, key=a.key):
        img = substitute(NCPoly(a.field, sa.pivots[p]), images, b.field)
        if not sb.contains_weight(img) or not sb.in_ideal(img):
            return p
    return None


def echelon(polys, key, field):
    """Reduced row echelon basis (largest word pivots) of the span of ``polys``."""
    pivots = {}
    for p in polys:
        v = dict(p.terms)
        for w in [w for w in v if w in pivots]:
            c = v.pop(w, None)
            if c is None:
                continue
            for u, a in pivots[w].items():
                if u != w:
                    x = v.get(u)
                    v[u] = -(c * a) if x is None else x - c * a
                    if not v[u]:
                        del v[u]
        v = {w: c for w, c in v.items() if c}
        if not v:
            continue
        lead = max(v, key=key)
        inv = v[lead].inverse()
        v = {w: c * inv for w, c in v.items()}
        for pw, row in pivots.items():
            f = row.get(lead)
            if f:
                for u, a in v.items():
                    x = row.get(u)
                    row[u] = -(f * a) if x is None else x - f * a
                    if not row[u]:
                        del row[u]
        pivots[lead] = v
    return [NCPoly(field, pivots[w]) for w in sorted(pivots, key=key)]
