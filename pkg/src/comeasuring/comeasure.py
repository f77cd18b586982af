"""Universal comeasuring bialgebras M1(A), M(A), M0(A) of a finite-dimensional algebra.

Every builder works from a matrix table T[(a, i)] holding the polynomial
that plays the role of t^a_i. In M1 all entries are generators. In M the
unit column is fixed (T[u, u] = 1, T[a, u] = 0) and the unit row holds the
b_i. In M0 the unit row is zero as well. The coaction is always
beta(e_i) = sum_a e_a (x) T[a, i] and the coproduct is the matrix one.
"""

import json
from itertools import product

from .ncalg import (NCPoly, Presentation, TensorElement, WeightOverflow, echelon,
                    slice_contained, substitute, tensor_reduce)
from .scalars import ScalarField, mat_inverse

VARIANTS = ("M1", "M", "M0", "quotient")


def parse_variant(text):
    v = {"m1": "M1", "m": "M", "m0": "M0", "quotient": "quotient"}.get(str(text).lower())
    if v is None:
        raise ValueError("unknown variant %r" % (text,))
    return v


class Report:
    """Named pass/fail checks with optional witnesses and free-form data."""

    def __init__(self, title):
        self.title = title
        self.checks = []
        self.data = {}

    def check(self, name, ok, witness=None):
        self.checks.append({"name": name, "ok": bool(ok), "witness": witness})
        return bool(ok)

    def merge(self, other, prefix=None):
        for c in other.checks:
            c = dict(c)
            if prefix:
                c["name"] = prefix + ": " + c["name"]
            self.checks.append(c)
        return self

    @property
    def ok(self):
        return all(c["ok"] for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c["ok"]]

    def first_failure(self):
        f = self.failures()
        return f[0] if f else None

    def to_json(self):
        return {"title": self.title, "pass": self.ok, "checks": self.checks, "data": self.data}

    def to_text(self):
        lines = ["%s: %s" % (self.title, "PASS" if self.ok else "FAIL")]
        for c in self.checks:
            line = "  [%s] %s" % ("ok" if c["ok"] else "FAIL", c["name"])
            if not c["ok"] and c["witness"] is not None:
                line += "  witness: %s" % (c["witness"],)
            lines.append(line)
        for k in sorted(self.data):
            lines.append("  %s: %s" % (k, self.data[k]))
        return "\n".join(lines)

    def __repr__(self):
        return "Report(%r, ok=%s)" % (self.title, self.ok)


# ---------------------------------------------------------------- algebras


class AlgebraSpec:
    """Structure constants c[(i, j)] = {k: c_ij^k} of an algebra with basis e_0..e_{n-1}.

    ``degrees`` and ``truncation`` describe a truncated graded algebra: the
    product e_i e_j is only defined when deg i + deg j <= truncation.
    """

    def __init__(self, field, dim, c, unit=None, labels=None, degrees=None,
                 truncation=None, name=None):
        self.field = field
        self.dim = int(dim)
        self.unit = unit
        self.labels = [str(x) for x in labels] if labels else [str(i) for i in range(self.dim)]
        self.degrees = list(degrees) if degrees is not None else None
        self.truncation = truncation
        self.name = name
        self.c = {}
        for (i, j), row in c.items():
            row = {k: field.from_rational(v) for k, v in row.items()}
            row = {k: v for k, v in row.items() if v}
            if row:
                self.c[(i, j)] = row
        if len(self.labels) != self.dim:
            raise ValueError("need one label per basis element")

    @classmethod
    def from_dense(cls, field, c, unit=None, **kw):
        n = len(c)
        table = {}
        for i in range(n):
            for j in range(n):
                row = {k: c[i][j][k] for k in range(n) if c[i][j][k]}
                if row:
                    table[(i, j)] = row
        return cls(field, n, table, unit=unit, **kw)

    def product(self, i, j):
        return self.c.get((i, j), {})

    def coeff(self, i, j, k):
        return self.c.get((i, j), {}).get(k, self.field.zero())

    def defined(self, i, j):
        if self.truncation is None:
            return True
        return self.degrees[i] + self.degrees[j] <= self.truncation

    def indices(self):
        return range(self.dim)

    def nonunit(self):
        return [i for i in range(self.dim) if i != self.unit]

    def multiply(self, x, y):
        """Product of two vectors given as dicts index -> Scalar."""
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.product(i, j).items():
                    v = out.get(k)
                    out[k] = a * b * c if v is None else v + a * b * c
        return {k: v for k, v in out.items() if v}

    def dense(self):
        z = self.field.zero()
        return [[[self.c.get((i, j), {}).get(k, z) for k in range(self.dim)]
                 for j in range(self.dim)] for i in range(self.dim)]

    def transformed(self, F, labels=None):
        """Structure constants in the basis e'_i = sum_a e_a F[a][i]."""
        n = self.dim
        Finv = mat_inverse(F, self.field)
        cols = [{a: self.field.from_rational(F[a][i]) for a in range(n) if F[a][i]}
                for i in range(n)]
        table = {}
        for i in range(n):
            for j in range(n):
                v = self.multiply(cols[i], cols[j])
                row = {}
                for k in range(n):
                    s = self.field.zero()
                    for m, x in v.items():
                        s = s + Finv[k][m] * x
                    if s:
                        row[k] = s
                if row:
                    table[(i, j)] = row
        out = AlgebraSpec(self.field, n, table, labels=labels or self.labels, degrees=self.degrees,
                          truncation=self.truncation, name=self.name)
        out.unit = out.find_unit()
        return out

    def find_unit(self):
        """Index of a basis element acting as the identity, or None."""
        for u in range(self.dim):
            one = self.field.one()
            if all(self.product(u, j) == {j: one} and self.product(j, u) == {j: one}
                   for j in range(self.dim)):
                return u
        return None

    def to_json(self):
        doc = {"dim": self.dim, "unit": self.unit, "field": self.field.name,
               "c": [[[str(x) for x in row] for row in plane] for plane in self.dense()]}
        if self.labels != [str(i) for i in range(self.dim)]:
            doc["labels"] = self.labels
        if self.truncation is not None:
            doc["degrees"] = self.degrees
            doc["truncation"] = self.truncation
        return doc

    @classmethod
    def from_json(cls, doc, field=None):
        if isinstance(doc, str):
            doc = json.loads(doc)
        if field is None:
            field = ScalarField.from_string(doc.get("field", "q"))
        n = int(doc["dim"])
        c = doc["c"]
        if len(c) != n or any(len(r) != n or any(len(x) != n for x in r) for r in c):
            raise ValueError("structure constants must be an n x n x n array")
        dense = [[[_scalar(field, x) for x in row] for row in plane] for plane in c]
        unit = doc.get("unit")
        if unit is not None and not 0 <= int(unit) < n:
            raise ValueError("unit index out of range")
        return cls.from_dense(field, dense, unit=None if unit is None else int(unit),
                              labels=doc.get("labels"), degrees=doc.get("degrees"),
                              truncation=doc.get("truncation"))


def _scalar(field, x):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        if isinstance(x, float) and not x.is_integer():
            raise ValueError("structure constants must be exact; got %r" % (x,))
        return field.from_rational(int(x))
    return field.parse(str(x))


def validate_algebra(spec):
    """Associativity and unit identities over all (defined) index tuples."""
    rep = Report("validate_algebra")
    n = spec.dim
    witness = None
    for i, j, k in product(range(n), repeat=3):
        if not (spec.defined(i, j) and spec.defined(j, k)):
            continue
        if spec.truncation is not None and \
                spec.degrees[i] + spec.degrees[j] + spec.degrees[k] > spec.truncation:
            continue
        left = spec.multiply(spec.multiply({i: spec.field.one()}, {j: spec.field.one()}),
                             {k: spec.field.one()})
        right = spec.multiply({i: spec.field.one()},
                              spec.multiply({j: spec.field.one()}, {k: spec.field.one()}))
        if left != right:
            witness = (i, j, k)
            break
    rep.check("associative", witness is None, witness)
    if spec.unit is not None:
        u = spec.unit
        bad = None
        for j in range(n):
            e = {j: spec.field.one()}
            if spec.product(u, j) != e or spec.product(j, u) != e:
                bad = j
                break
        rep.check("unit", bad is None, bad)
    return rep


# ---------------------------------------------------------------- presentations


class BialgebraPresentation:
    """A presentation with coproduct/counit tables and an optional coaction.

    ``matrix`` maps positions (a, i) to the polynomial standing for t^a_i;
    ``formal`` marks coproducts that are only a truncated view.
    """

    def __init__(self, base, coproduct, counit, variant="M1", coaction=None, matrix=None,
                 spec=None, formal=False, notes=None):
        self.base = base
        self.coproduct = coproduct
        self.counit = counit
        self.variant = variant
        self.coaction = coaction
        self.matrix = matrix
        self.spec = spec
        self.formal = formal
        self.notes = list(notes or [])
        self.extras = {}
        self._dcache = {}

    @property
    def field(self):
        return self.base.field

    @property
    def generators(self):
        return self.base.generators

    @property
    def relations(self):
        return self.base.relations

    def gen(self, name):
        return self.base.gen(name)

    def parse(self, text):
        return self.base.parse(text)

    def delta_word(self, w):
        x = self._dcache.get(w)
        if x is None:
            if not w:
                x = TensorElement.one(self.field)
            else:
                x = self.delta_word(w[:-1]) * self.coproduct[w[-1]]
            self._dcache[w] = x
        return x

    def delta(self, p):
        out = TensorElement(self.field)
        for w, c in p.terms.items():
            out = out + self.delta_word(w).scale(c)
        return out

    def epsilon(self, p):
        s = self.field.zero()
        for w, c in p.terms.items():
            v = c
            for g in w:
                v = v * self.counit[g]
                if not v:
                    break
            s = s + v
        return s

    def copy(self):
        bp = BialgebraPresentation(self.base.copy(), self.coproduct, self.counit, self.variant,
                                   self.coaction, self.matrix, self.spec, self.formal, self.notes)
        bp.extras = dict(self.extras)
        return bp

    def with_relations(self, rels, variant=None):
        bp = self.copy()
        for r in rels:
            bp.base.add_relation(r)
        if variant:
            bp.variant = variant
        return bp

    def renamed(self, names):
        """Copy with generators renamed by ``names`` (old name -> new name or (name, display))."""
        base = Presentation(self.field)
        for g in self.generators:
            new = names.get(g.name, g.name)
            if isinstance(new, tuple):
                base.add_generator(new[0], g.weight, new[1])
            else:
                base.add_generator(new, g.weight, new if g.name in names else g.display)
        base.relations = list(self.base.relations)
        bp = BialgebraPresentation(base, self.coproduct, self.counit, self.variant,
                                   self.coaction, self.matrix, self.spec, self.formal, self.notes)
        bp.extras = dict(self.extras)
        return bp

    def to_json(self, display=False):
        doc = self.base.to_json()
        doc["variant"] = self.variant
        if self.formal or self.coproduct is None:
            doc["coproduct"] = "formal - truncated view"
        else:
            doc["coproduct"] = {
                g.name: tensor_triples(self.base, self.coproduct[g.id]) for g in self.generators}
            doc["counit"] = {g.name: str(self.counit[g.id]) for g in self.generators}
        if self.coaction is not None and self.spec is not None:
            doc["coaction"] = {
                self.spec.labels[i]: [[self.spec.labels[a], self.base.poly_str(p)]
                                      for a, p in terms]
                for i, terms in sorted(self.coaction.items())}
        if self.spec is not None and self.coaction is not None:
            doc["spec"] = self.spec.to_json()
        for k, v in self.extras.get("passthrough", {}).items():
            doc.setdefault(k, v)
        if self.notes:
            doc["notes"] = list(self.notes)
        return doc

    @classmethod
    def from_json(cls, doc):
        """Inverse of ``to_json``; the coaction is rebuilt only when a spec is given as ``spec``."""
        if isinstance(doc, str):
            doc = json.loads(doc)
        base = Presentation.from_json(doc)
        F = base.field
        cop = eps = None
        raw = doc.get("coproduct")
        formal = isinstance(raw, str)
        if isinstance(raw, dict):
            cop, eps = [], []
            for g in base.generators:
                if g.name not in raw:
                    raise ValueError("no coproduct for generator %r" % g.name)
                x = TensorElement(F)
                for c, w1, w2 in raw[g.name]:
                    x = x + TensorElement.of(base.parse(w1), base.parse(w2)).scale(F.parse(c))
                cop.append(x)
                eps.append(F.parse(str(doc.get("counit", {}).get(g.name, "0"))))
        bp = cls(base, cop, eps, doc.get("variant", "M1"), formal=formal,
                 notes=doc.get("notes"))
        # keys written by subclasses (derived tables, truncation) pass through unchanged
        known = {"field", "generators", "relations", "variant", "coproduct", "counit",
                 "coaction", "spec", "notes", "braiding"}
        bp.extras["passthrough"] = {k: v for k, v in doc.items() if k not in known}
        if "spec" in doc:
            bp.spec = AlgebraSpec.from_json(doc["spec"], F)
        if "coaction" in doc and bp.spec is not None:
            pos = {x: n for n, x in enumerate(bp.spec.labels)}
            bp.coaction = {pos[i]: [(pos[a], base.parse(p)) for a, p in terms]
                           for i, terms in doc["coaction"].items()}
        return bp

    def to_text(self):
        b = self.base
        lines = ["variant %s over %s" % (self.variant, self.field.name)]
        lines.append("generators: " + ", ".join(g.display for g in b.generators))
        lines.append("relations:")
        for r in b.canonical_relations():
            lines.append("  " + relation_str(b, r))
        if self.coproduct is not None and not self.formal:
            lines.append("coproduct:")
            for g in b.generators:
                lines.append("  D(%s) = %s" % (g.display, b.tensor_str(self.coproduct[g.id], True)))
            lines.append("counit: " + ", ".join(
                "e(%s) = %s" % (g.display, self.counit[g.id]) for g in b.generators))
        else:
            lines.append("coproduct: formal - truncated view")
        for n in self.notes:
            lines.append("note: " + n)
        return "\n".join(lines)


def tensor_triples(pres, x):
    keys = sorted(x.terms, key=lambda k: (pres.key(k[0]), pres.key(k[1])))
    return [[str(x.terms[k]), pres.word_str(k[0]), pres.word_str(k[1])] for k in keys]


def relation_str(pres, r):
    """Render a relation as ``lhs = rhs``: the leading word against the rest."""
    lead = max(r.terms, key=pres.key)
    c = r.terms[lead]
    r = r.scale(c.inverse())
    rest = NCPoly(r.field, {w: -a for w, a in r.terms.items() if w != lead})
    return "%s = %s" % (pres.word_str(lead, True), pres.poly_str(rest, True))


# ---------------------------------------------------------------- builders


def _label(spec, i):
    return spec.labels[i]


def _declare(spec, variant, weight=None, tname="t", bname="b"):
    """Presentation with the variant's generators and the full matrix table.

    With ``bname=None`` the unit row keeps the matrix naming (t0_i instead of b_i).
    """
    if variant not in ("M1", "M", "M0"):
        raise ValueError("unknown variant %r" % (variant,))
    F = spec.field
    n = spec.dim
    u = spec.unit
    if variant != "M1" and u is None:
        raise ValueError("variant %s needs a unit index" % variant)
    weight = weight or (lambda a, i: 1)
    pres = Presentation(F)
    T = {}
    one = NCPoly.constant(F, 1)
    zero = NCPoly(F)
    if variant != "M1":
        for a in range(n):
            T[(a, u)] = one if a == u else zero
        for i in range(n):
            if i == u:
                continue
            if variant == "M0":
                T[(u, i)] = zero
            else:
                li = _label(spec, i)
                if bname is None:
                    lu = _label(spec, u)
                    g = pres.add_generator("%s%s_%s" % (tname, lu, li), weight(u, i),
                                           "%s^%s_%s" % (tname, lu, li))
                else:
                    g = pres.add_generator("%s%s" % (bname, li), weight(u, i),
                                           "%s_%s" % (bname, li))
                T[(u, i)] = NCPoly.word(F, (g,))
    for a in range(n):
        for i in range(n):
            if (a, i) in T:
                continue
            la, li = _label(spec, a), _label(spec, i)
            g = pres.add_generator("%s%s_%s" % (tname, la, li), weight(a, i),
                                   "%s^%s_%s" % (tname, la, li))
            T[(a, i)] = NCPoly.word(F, (g,))
    return pres, T


def matrix_coalgebra(pres, T, n):
    """Delta(T[r, c]) = sum_b T[r, b] (x) T[b, c] and eps = delta, read off on generators."""
    F = pres.field
    cop = [None] * len(pres.generators)
    eps = [None] * len(pres.generators)
    for (r, c), p in T.items():
        if len(p.terms) == 1:
            (w, coef), = p.terms.items()
            if len(w) == 1 and coef == 1:
                g = w[0]
                x = TensorElement(F)
                for b in range(n):
                    if T[(r, b)] and T[(b, c)]:
                        x = x + TensorElement.of(T[(r, b)], T[(b, c)])
                cop[g] = x
                eps[g] = F.one() if r == c else F.zero()
    return cop, eps


def coaction_table(T, n):
    table = {}
    for i in range(n):
        table[i] = [(a, T[(a, i)]) for a in range(n) if T[(a, i)]]
    return table


def structure_relations(spec, T, indices=None):
    """c_ij^a T[k,a] - c_ab^k T[a,i] T[b,j] for all defined (i, j) and all k."""
    n = spec.dim
    idx = list(range(n)) if indices is None else indices
    F = spec.field
    by_target = {}
    for (a, b), row in spec.c.items():
        for k, c in row.items():
            by_target.setdefault(k, []).append((a, b, c))
    rels = []
    for i in idx:
        for j in idx:
            if not spec.defined(i, j):
                continue
            for k in range(n):
                r = NCPoly(F)
                for a, c in spec.product(i, j).items():
                    if T[(k, a)]:
                        r = r + T[(k, a)].scale(c)
                for a, b, c in by_target.get(k, ()):
                    if T[(a, i)] and T[(b, j)]:
                        r = r - (T[(a, i)] * T[(b, j)]).scale(c)
                if r:
                    rels.append(r)
    return rels


def truncated_view(spec, variant):
    """A truncated algebra's unit row makes the matrix coproduct an infinite series."""
    return spec.truncation is not None and variant in ("M1", "M")


TRUNCATED_NOTE = "coproduct is formal - truncated view (the unit row sums past the truncation)"


def _finish(spec, variant, pres, T, rels, notes=None):
    for r in rels:
        pres.add_relation(r)
    cop, eps = matrix_coalgebra(pres, T, spec.dim)
    formal = truncated_view(spec, variant)
    notes = list(notes or []) + ([TRUNCATED_NOTE] if formal else [])
    return BialgebraPresentation(pres, cop, eps, variant, coaction_table(T, spec.dim), T, spec,
                                 formal=formal, notes=notes)


def _require_associative(spec):
    rep = validate_algebra(spec)
    if not rep.ok:
        raise ValueError("algebra spec fails %s" % rep.first_failure())


def build_M1(spec, weight=None, check=True):
    if check:
        _require_associative(spec)
    pres, T = _declare(spec, "M1", weight)
    return _finish(spec, "M1", pres, T, structure_relations(spec, T))


def build_M(spec, weight=None, check=True):
    """The two explicit families: the t-family corrected by b terms, and the unit row."""
    if check:
        _require_associative(spec)
    pres, T = _declare(spec, "M", weight)
    F = spec.field
    u = spec.unit
    idx = spec.nonunit()
    rels = []
    for i in idx:
        for j in idx:
            if not spec.defined(i, j):
                continue
            bi, bj = T[(u, i)], T[(u, j)]
            for k in idx:
                r = NCPoly(F)
                for a in idx:
                    c = spec.coeff(i, j, a)
                    if c:
                        r = r + T[(k, a)].scale(c)
                for a in idx:
                    for b in idx:
                        c = spec.coeff(a, b, k)
                        if c:
                            r = r - (T[(a, i)] * T[(b, j)]).scale(c)
                r = r - bi * T[(k, j)] - T[(k, i)] * bj
                rels.append(r)
            r = NCPoly.constant(F, spec.coeff(i, j, u))
            for a in idx:
                c = spec.coeff(i, j, a)
                if c:
                    r = r + T[(u, a)].scale(c)
            for a in idx:
                for b in idx:
                    c = spec.coeff(a, b, u)
                    if c:
                        r = r - (T[(a, i)] * T[(b, j)]).scale(c)
            r = r - bi * bj
            rels.append(r)
    return _finish(spec, "M", pres, T, rels)


def build_M0(spec, weight=None, check=True):
    if check:
        _require_associative(spec)
    pres, T = _declare(spec, "M0", weight)
    F = spec.field
    u = spec.unit
    idx = spec.nonunit()
    rels = []
    for i in idx:
        for j in idx:
            if not spec.defined(i, j):
                continue
            for k in idx + [u]:
                r = NCPoly.constant(F, spec.coeff(i, j, u)) if k == u else NCPoly(F)
                if k != u:
                    for a in idx:
                        c = spec.coeff(i, j, a)
                        if c:
                            r = r + T[(k, a)].scale(c)
                for a in idx:
                    for b in idx:
                        c = spec.coeff(a, b, k)
                        if c:
                            r = r - (T[(a, i)] * T[(b, j)]).scale(c)
                rels.append(r)
    return _finish(spec, "M0", pres, T, rels)


BUILDERS = {"M1": build_M1, "M": build_M, "M0": build_M0}


def build(spec, variant, **kw):
    return BUILDERS[parse_variant(variant)](spec, **kw)


def quotient_map_images(src, dst):
    """Images of src's generators in dst, matched through the two matrix tables."""
    F = dst.field
    images = [None] * len(src.generators)
    for pos, p in src.matrix.items():
        if len(p.terms) == 1:
            (w, c), = p.terms.items()
            if len(w) == 1:
                images[w[0]] = dst.matrix[pos]
    return images


# ---------------------------------------------------------------- basis change


class BasisChange:
    """e'_i = sum_a e_a Lam[a][i] (+ e_unit lam[i] in the unit-preserving form).

    ``Lam`` is either the full n x n matrix or, together with ``lam``, the
    (n-1) x (n-1) block on the non-unit indices.
    """

    def __init__(self, Lam, lam=None):
        self.Lam = [list(r) for r in Lam]
        self.lam = list(lam) if lam is not None else None

    def full(self, spec):
        F = spec.field
        n = spec.dim
        m = len(self.Lam)
        if m == n and self.lam is None:
            M = [[F.from_rational(x) for x in r] for r in self.Lam]
        elif m == n - 1 and spec.unit is not None:
            u = spec.unit
            idx = spec.nonunit()
            M = [[F.zero()] * n for _ in range(n)]
            M[u][u] = F.one()
            for p, a in enumerate(idx):
                for s, i in enumerate(idx):
                    M[a][i] = F.from_rational(self.Lam[p][s])
            if self.lam is not None:
                for s, i in enumerate(idx):
                    M[u][i] = F.from_rational(self.lam[s])
        else:
            raise ValueError("basis change of size %d does not fit dimension %d" % (m, n))
        mat_inverse(M, F)
        return M

    def compose(self, other):
        """The change ``self`` followed by ``other`` (both given in full form)."""
        n = len(self.Lam)
        return BasisChange([[sum(self.Lam[i][a] * other.Lam[a][j] for a in range(n))
                             for j in range(n)] for i in range(n)])


def change_basis(bp, bc):
    """Rewrite ``bp`` in the transformed generators t' = F^-1 T F."""
    spec = bp.spec
    if spec is None or bp.matrix is None:
        raise ValueError("basis change needs a matrix presentation")
    F = spec.field
    n = spec.dim
    M = bc.full(spec)
    Minv = mat_inverse(M, F)
    if bp.variant in ("M", "M0", "quotient") and spec.unit is not None:
        u = spec.unit
        for a in range(n):
            want = F.one() if a == u else F.zero()
            if M[a][u] != want:
                raise ValueError("the unit must be kept as a basis element")
        if bp.variant == "M0" and any(M[u][i] for i in range(n) if i != u):
            raise ValueError("M0 only allows changes that keep the splitting (lam = 0)")
    T = bp.matrix
    # new generators sit where the old ones did
    newpres = Presentation(F)
    for g in bp.generators:
        newpres.add_generator(g.name, g.weight, g.display)
    gen_at = {}
    for pos, p in T.items():
        if len(p.terms) == 1:
            (w, c), = p.terms.items()
            if len(w) == 1 and c == 1:
                gen_at[pos] = w[0]
    Tn = {}
    for pos, p in T.items():
        Tn[pos] = NCPoly.word(F, (gen_at[pos],)) if pos in gen_at else p
    # forward: t' in old generators; backward: t in new generators
    fwd = _conjugate(T, Minv, M, n, F)
    back = _conjugate(Tn, M, Minv, n, F)
    old_in_new = [None] * len(bp.generators)
    for pos, g in gen_at.items():
        old_in_new[g] = back[pos]
    for pos, p in T.items():
        if pos not in gen_at and back[pos] != p:
            raise ValueError("basis change does not preserve the variant's fixed entries")
    for r in bp.relations:
        newpres.add_relation(substitute(r, old_in_new, F))
    cop = [None] * len(bp.generators)
    eps = [None] * len(bp.generators)
    for pos, g in gen_at.items():
        expr = fwd[pos]
        d = bp.delta(expr)
        cop[g] = _subst_tensor(d, old_in_new, F)
        eps[g] = bp.epsilon(expr)
    new_spec = spec.transformed(M)
    out = BialgebraPresentation(newpres, cop, eps, bp.variant, coaction_table(Tn, n), Tn,
                                new_spec, notes=bp.notes)
    out.extras["forward"] = fwd
    return out


def _conjugate(T, A, B, n, F):
    """(A T B)[(i, j)] for a table of polynomials."""
    out = {}
    for i in range(n):
        for j in range(n):
            acc = NCPoly(F)
            for a in range(n):
                if not A[i][a]:
                    continue
                for b in range(n):
                    if B[b][j] and T[(a, b)]:
                        acc = acc + T[(a, b)].scale(A[i][a] * B[b][j])
            out[(i, j)] = acc
    return out


def _subst_tensor(x, images, F):
    out = TensorElement(F)
    cache = {}

    def img(w):
        v = cache.get(w)
        if v is None:
            v = NCPoly.constant(F, 1)
            for g in w:
                v = v * images[g]
            cache[w] = v
        return v

    for (w1, w2), c in x.terms.items():
        out = out + TensorElement.of(img(w1), img(w2)).scale(c)
    return out


def reparametrize(bp, new_gens, old_in_new, new_in_old, variant=None):
    """Same bialgebra on new generators.

    ``new_gens`` is a list of (name, weight, display); ``old_in_new`` gives
    each old generator as a polynomial in the new ones and ``new_in_old`` the
    converse. The two maps are assumed mutually inverse modulo the ideal.
    """
    F = bp.field
    pres = Presentation(F)
    for g in new_gens:
        pres.add_generator(*g)
    old_in_new = [p if isinstance(p, NCPoly) else pres.parse(p) for p in old_in_new]
    new_in_old = [p if isinstance(p, NCPoly) else bp.base.parse(p) for p in new_in_old]
    for r in bp.relations:
        pres.add_relation(substitute(r, old_in_new, F))
    cop = eps = None
    if bp.coproduct is not None and not bp.formal:
        cop = [_subst_tensor(bp.delta(p), old_in_new, F) for p in new_in_old]
        eps = [bp.epsilon(p) for p in new_in_old]
    out = BialgebraPresentation(pres, cop, eps, variant or bp.variant, spec=bp.spec,
                                formal=bp.formal, notes=bp.notes)
    if bp.coaction is not None:
        out.coaction = {i: [(a, substitute(p, old_in_new, F)) for a, p in terms]
                        for i, terms in bp.coaction.items()}
    if bp.matrix is not None:
        out.matrix = {pos: substitute(p, old_in_new, F) for pos, p in bp.matrix.items()}
    out.extras["old_in_new"] = old_in_new
    out.extras["new_in_old"] = new_in_old
    return out


def check_isomorphism(P, Q, f, g, L, skip_heavy=False):
    """Report on mutually inverse generator maps f: P -> Q, g: Q -> P at weight <= L."""
    from .ncalg import relations_map_into
    rep = Report("isomorphism")
    F = P.field
    bad = relations_map_into(P, Q, f, L, skip_heavy)
    rep.check("f maps relations into the target ideal", bad is None,
              None if bad is None else P.poly_str(bad[0]))
    bad = relations_map_into(Q, P, g, L, skip_heavy)
    rep.check("g maps relations into the source ideal", bad is None,
              None if bad is None else Q.poly_str(bad[0]))
    sp, sq = P.slice(L), Q.slice(L)
    w1 = next((x.name for x in P.generators
               if not sp.in_ideal(substitute(f[x.id], g, F) - P.gen(x.name))), None)
    rep.check("g after f is the identity", w1 is None, w1)
    w2 = next((x.name for x in Q.generators
               if not sq.in_ideal(substitute(g[x.id], f, F) - Q.gen(x.name))), None)
    rep.check("f after g is the identity", w2 is None, w2)
    return rep


# ---------------------------------------------------------------- verifiers


def _reduce3(x, pres, L):
    s = pres.slice(L)
    out = {}
    for (a, b, c), k in x.items():
        for u1, c1 in s.reduce_word(a).items():
            for u2, c2 in s.reduce_word(b).items():
                for u3, c3 in s.reduce_word(c).items():
                    key = (u1, u2, u3)
                    v = k * c1 * c2 * c3
                    old = out.get(key)
                    out[key] = v if old is None else old + v
    return {k: v for k, v in out.items() if v}


def _add3(acc, key, v):
    old = acc.get(key)
    acc[key] = v if old is None else old + v


def verify_bialgebra(bp, L):
    """Biideal, coassociativity and counit checks at weight <= L."""
    rep = Report("verify_bialgebra")
    pres = bp.base
    F = bp.field
    rep.data["L"] = L
    if bp.formal or bp.coproduct is None:
        rep.data["coproduct"] = "formal - truncated view; coalgebra checks skipped"
        return rep
    bad = None
    for r in pres.relations:
        if bp.epsilon(r):
            bad = pres.poly_str(r)
            break
    rep.check("counit kills relations", bad is None, bad)
    bad = None
    try:
        for r in pres.relations:
            if pres.poly_weight(r) > L:
                continue
            if tensor_reduce(bp.delta(r), pres, pres, L):
                bad = pres.poly_str(r)
                break
    except WeightOverflow as e:
        bad = "weight overflow: %s" % e
    rep.check("coproduct respects relations", bad is None, bad)
    bad = None
    try:
        for g in pres.generators:
            d = bp.coproduct[g.id]
            left, right = {}, {}
            for (w1, w2), c in d.terms.items():
                for (a, b), k in bp.delta_word(w1).terms.items():
                    _add3(left, (a, b, w2), c * k)
                for (a, b), k in bp.delta_word(w2).terms.items():
                    _add3(right, (w1, a, b), c * k)
            diff = dict(left)
            for key, v in right.items():
                _add3(diff, key, -v)
            diff = {k: v for k, v in diff.items() if v}
            if diff and _reduce3(diff, pres, L):
                bad = g.name
                break
    except WeightOverflow as e:
        bad = "weight overflow: %s" % e
    rep.check("coassociative on generators", bad is None, bad)
    bad = None
    # a generator heavier than L still gets its counit checked
    s = pres.slice(max([L] + [g.weight for g in pres.generators]))
    for g in pres.generators:
        d = bp.coproduct[g.id]
        x = NCPoly.word(F, (g.id,))
        left = NCPoly(F)
        right = NCPoly(F)
        for (w1, w2), c in d.terms.items():
            left = left + NCPoly.word(F, w2, c * bp.epsilon(NCPoly.word(F, w1)))
            right = right + NCPoly.word(F, w1, c * bp.epsilon(NCPoly.word(F, w2)))
        if not (s.in_ideal(left - x) and s.in_ideal(right - x)):
            bad = g.name
            break
    rep.check("counit axioms on generators", bad is None, bad)
    return rep


def verify_coaction(bp, spec, L):
    """beta is an algebra map, coassociative and counital, modulo the ideal."""
    rep = Report("verify_coaction")
    if bp.coaction is None:
        raise ValueError("presentation carries no coaction")
    pres = bp.base
    F = bp.field
    s = pres.slice(L)
    beta = {i: dict() for i in range(spec.dim)}
    for i, terms in bp.coaction.items():
        for a, p in terms:
            beta[i][a] = beta[i].get(a, NCPoly(F)) + p
    bad = None
    try:
        for i in range(spec.dim):
            for j in range(spec.dim):
                if not spec.defined(i, j):
                    continue
                lhs = {}
                for a, pa in beta[i].items():
                    for b, pb in beta[j].items():
                        prod = pa * pb
                        for k, c in spec.product(a, b).items():
                            lhs[k] = lhs.get(k, NCPoly(F)) + prod.scale(c)
                for m, c in spec.product(i, j).items():
                    for k, p in beta[m].items():
                        lhs[k] = lhs.get(k, NCPoly(F)) - p.scale(c)
                if any(v and not s.in_ideal(v) for v in lhs.values()):
                    bad = (spec.labels[i], spec.labels[j])
                    break
            if bad:
                break
    except WeightOverflow as e:
        bad = "weight overflow: %s" % e
    rep.check("beta is multiplicative", bad is None, bad)
    if spec.unit is not None and bp.variant != "M1":
        u = spec.unit
        ok = set(beta[u]) <= {u} and s.in_ideal(beta[u].get(u, NCPoly(F)) - 1)
        rep.check("beta(1) = 1 (x) 1", ok, None if ok else spec.labels[u])
    if bp.coproduct is not None and not bp.formal:
        bad = None
        try:
            for i in range(spec.dim):
                for b in range(spec.dim):
                    lhs = TensorElement(F)
                    for a, p in beta[i].items():
                        q = beta[a].get(b)
                        if q:
                            lhs = lhs + TensorElement.of(q, p)
                    rhs = bp.delta(beta[i].get(b, NCPoly(F)))
                    if tensor_reduce(lhs - rhs, pres, pres, L):
                        bad = (spec.labels[i], spec.labels[b])
                        break
                if bad:
                    break
        except WeightOverflow as e:
            bad = "weight overflow: %s" % e
        rep.check("coassociative coaction", bad is None, bad)
        bad = None
        for i in range(spec.dim):
            for a in range(spec.dim):
                want = F.one() if a == i else F.zero()
                if bp.epsilon(beta[i].get(a, NCPoly(F))) != want:
                    bad = bad or (spec.labels[i], spec.labels[a])
        rep.check("counital coaction", bad is None, bad)
    return rep


# ---------------------------------------------------------------- oracle


def oracle_presentation(spec, variant, weight=None):
    """All coefficient relations forced by beta being a (unital/splitting) algebra map.

    Abstract coefficients X[a, i] of beta(e_i) = sum_a e_a (x) X[a, i]; the
    product beta(e_i) beta(e_j) is expanded through left-regular matrices and
    compared with beta(e_i e_j), coefficient by coefficient.
    """
    variant = parse_variant(variant)
    F = spec.field
    n = spec.dim
    u = spec.unit
    weight = weight or (lambda a, i: 1)
    fixed = {}
    if variant in ("M", "M0"):
        if u is None:
            raise ValueError("variant %s needs a unit" % variant)
        for a in range(n):
            fixed[(a, u)] = F.one() if a == u else F.zero()
        if variant == "M0":
            for i in range(n):
                fixed[(u, i)] = F.one() if i == u else F.zero()
    pres = Presentation(F)
    X = {}
    for a in range(n):
        for i in range(n):
            if (a, i) in fixed:
                X[(a, i)] = NCPoly.constant(F, fixed[(a, i)])
            else:
                g = pres.add_generator("x%d_%d" % (a, i), weight(a, i))
                X[(a, i)] = NCPoly.word(F, (g,))
    # left-regular representation: (e_a v)_k = sum_b reg[a][k][b] v_b
    reg = [[[spec.coeff(a, b, k) for b in range(n)] for k in range(n)] for a in range(n)]
    for i in range(n):
        for j in range(n):
            if not spec.defined(i, j):
                continue
            for k in range(n):
                r = NCPoly(F)
                for a in range(n):
                    if not X[(a, i)]:
                        continue
                    for b in range(n):
                        c = reg[a][k][b]
                        if c and X[(b, j)]:
                            r = r + (X[(a, i)] * X[(b, j)]).scale(c)
                for m in range(n):
                    c = spec.coeff(i, j, m)
                    if c:
                        r = r - X[(k, m)].scale(c)
                if r:
                    pres.add_relation(r)
    return pres, X


def universal_check(spec, variant, L, weight=None, built=None):
    """(oracle ideal slice rank, whether it equals the built presentation's slice)."""
    variant = parse_variant(variant)
    oracle, X = oracle_presentation(spec, variant, weight)
    if built is None:
        built = BUILDERS[variant](spec, weight=weight)
    B = built.base
    T = built.matrix
    F = spec.field
    o2b = [None] * len(oracle.generators)
    b2o = [None] * len(B.generators)
    for pos, p in X.items():
        if len(p.terms) == 1:
            (w, c), = p.terms.items()
            if len(w) == 1:
                o2b[w[0]] = T[pos]
                tp = T[pos]
                (tw, _), = tp.terms.items()
                b2o[tw[0]] = p
    so = oracle.slice(L)
    sb = B.slice(L)
    match = (so.rank == sb.rank
             and slice_contained(oracle, B, L, o2b) is None
             and slice_contained(B, oracle, L, b2o) is None)
    return so.rank, match


# ---------------------------------------------------------------- quotients


class CoalgebraSpec:
    """Delta e_i = sum d[i][(j, k)] e_j (x) e_k; coassociativity is not required."""

    def __init__(self, field, dim, d, degrees=None, truncation=None):
        self.field = field
        self.dim = dim
        self.d = {i: {jk: field.from_rational(v) for jk, v in row.items() if v}
                  for i, row in d.items()}
        self.degrees = degrees
        self.truncation = truncation

    def in_range(self, j, k):
        if self.truncation is None:
            return True
        return self.degrees[j] + self.degrees[k] <= self.truncation

    def coeff(self, i, j, k):
        return self.d.get(i, {}).get((j, k), self.field.zero())


def coproduct_preserving_relations(T, d, indices):
    F = d.field
    by_pair = {}
    for a, row in d.d.items():
        for (j, k), c in row.items():
            by_pair.setdefault((j, k), []).append((a, c))
    rels = []
    for i in indices:
        for j in indices:
            for k in indices:
                if not d.in_range(j, k):
                    continue
                r = NCPoly(F)
                for a, c in by_pair.get((j, k), ()):
                    if T.get((a, i)):
                        r = r + T[(a, i)].scale(c)
                for (a, b), c in d.d.get(i, {}).items():
                    if T.get((j, a)) and T.get((k, b)):
                        r = r - (T[(j, a)] * T[(k, b)]).scale(c)
                if r:
                    rels.append(r)
    return rels


def quotient_coproduct_preserving(bp, d, L=None):
    """Add d_a^{jk} t^a_i - d_i^{ab} t^j_a t^k_b for every in-range (i, j, k)."""
    if bp.matrix is None:
        raise ValueError("needs a matrix presentation")
    indices = sorted({a for a, _ in bp.matrix})
    if d.dim != len(indices):
        raise ValueError("coalgebra tensor has %d indices, presentation has %d"
                         % (d.dim, len(indices)))
    rels = coproduct_preserving_relations(bp.matrix, d, indices)
    out = bp.with_relations(rels, "quotient")
    if L is not None:
        out.extras["report"] = verify_bialgebra(out, L)
    return out


class CalculusSpec:
    """Points 1..n and the edge set E (ordered pairs, no diagonal)."""

    def __init__(self, n, edges):
        self.n = n
        self.edges = {tuple(e) for e in edges}
        for i, j in self.edges:
            if i == j:
                raise ValueError("calculus edges cannot be diagonal")
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError("edge %r out of range" % ((i, j),))

    def complement(self):
        return {(i, j) for i in range(1, self.n + 1) for j in range(1, self.n + 1)
                if i != j and (i, j) not in self.edges}


def quotient_calculus_preserving(bp, cal, L=None):
    """tau^i_j tau^k_l = 0 whenever (i, k) is an edge and (j, l) is a non-edge."""
    if bp.matrix is None or bp.extras.get("kind") != "finite_set_basepoint_free":
        raise ValueError("needs the basepoint-free finite-set presentation")
    T = bp.matrix
    rels = []
    for (i, k) in sorted(cal.edges):
        for (j, l) in sorted(cal.complement()):
            rels.append(T[(i - 1, j - 1)] * T[(k - 1, l - 1)])
    out = bp.with_relations(rels, "quotient")
    out.extras["calculus_relations"] = rels
    if L is not None:
        out.extras["report"] = verify_bialgebra(out, L)
    return out


def finite_set_spec(n, field=None):
    field = field or ScalarField("rational")
    c = {(i, i): {i: 1} for i in range(n)}
    return AlgebraSpec(field, n, c, labels=[str(i + 1) for i in range(n)],
                       name="finiteset:%d" % n)


def build_finite_set_M(n, field=None):
    """Basepoint-free M: the projector rows plus sum_j tau^i_j = 1."""
    spec = finite_set_spec(n, field)
    pres, T = _declare(spec, "M1", tname="tau")
    rels = structure_relations(spec, T)
    for i in range(n):
        r = NCPoly.constant(spec.field, -1)
        for j in range(n):
            r = r + T[(i, j)]
        rels.append(r)
    bp = _finish(spec, "quotient", pres, T, rels)
    bp.extras["kind"] = "finite_set_basepoint_free"
    return bp


# ---------------------------------------------------------------- coinvariants


def coinvariants(presM, pi, target, L):
    """Basis of {h : (pi (x) id) Delta h = 1 (x) h} in the weight <= L slice.

    ``pi`` lists the images in ``target`` of presM's generators. Returns
    NCPolys in normal form, echelonized.
    """
    from .ncalg import relations_map_into
    tpres = target.base if isinstance(target, BialgebraPresentation) else target
    P = presM.base
    F = presM.field
    bad = relations_map_into(P, tpres, pi, L)
    if bad is not None:
        raise ValueError("pi does not respect relations: %s" % P.poly_str(bad[0]))
    sM = P.slice(L)
    sT = tpres.slice(L)
    pi_cache = {}

    def pi_word(w):
        v = pi_cache.get(w)
        if v is None:
            v = sT.reduce(substitute(NCPoly.word(F, w), pi, F))
            pi_cache[w] = v
        return v

    kernel = []
    pivots = {}
    for w in sM.basis:
        vec = {}
        for (w1, w2), c in presM.delta_word(w).terms.items():
            left = pi_word(w1)
            if not left:
                continue
            right = sM.reduce_word(w2)
            for u1, a1 in left.terms.items():
                for u2, a2 in right.items():
                    _add3(vec, (u1, u2), c * a1 * a2)
        _add3(vec, ((), w), -F.one())
        vec = {k: v for k, v in vec.items() if v}
        comb = {w: F.one()}
        changed = True
        while changed:
            changed = False
            for key in list(vec):
                if key in pivots and vec.get(key):
                    pv, pc = pivots[key]
                    f = vec[key]
                    for k2, v2 in pv.items():
                        _add3(vec, k2, -f * v2)
                    for k2, v2 in pc.items():
                        _add3(comb, k2, -f * v2)
                    vec = {k: v for k, v in vec.items() if v}
                    changed = True
                    break
        if not vec:
            kernel.append(NCPoly(F, comb))
            continue
        key = max(vec)
        inv = vec[key].inverse()
        vec = {k: v * inv for k, v in vec.items()}
        comb = {k: v * inv for k, v in comb.items()}
        pivots[key] = (vec, comb)
    return echelon(kernel, P.key, F)


def coinvariant_closure(presM, basis, L):
    """Products of basis elements (within weight L) stay in their span."""
    P = presM.base
    s = P.slice(L)
    F = presM.field
    span = echelon(basis, P.key, F)
    for a in basis:
        for b in basis:
            p = a * b
            if P.poly_weight(p) > L:
                continue
            p = s.reduce(p)
            if len(echelon(span + [p], P.key, F)) != len(span):
                return (P.poly_str(a), P.poly_str(b))
    return None
