"""R-matrices on an algebra's basis and the comeasurings they cut out.

Convention: Psi(e_i (x) e_j) = sum e_b (x) e_a R^a_i^b_j, and an entry is
stored under the key (i, j, k, l) for R^i_j^k_l. As a matrix on V (x) V the
row is the upper pair (i, k) and the column the lower pair (j, l).
"""

from .comeasure import BialgebraPresentation, Report, build, _scalar
from .ncalg import NCPoly, Presentation, TensorElement, echelon, substitute, tensor_reduce
from .scalars import ScalarField, mat_inverse, q_binomial, q_factorial, q_int


class RMatrix:
    """Sparse R^i_j^k_l on an indexed basis.

    For truncated graded bases ``degrees`` and ``truncation`` are set and
    checks only look at index windows whose total degree fits.
    """

    def __init__(self, field, labels, entries=None, degrees=None, truncation=None, name=None):
        self.field = field
        self.labels = list(labels)
        self.n = len(self.labels)
        self.degrees = list(degrees) if degrees is not None else None
        self.truncation = truncation
        self.name = name
        self.entries = {}
        for key, v in (entries or {}).items():
            v = _scalar(field, v)
            if v:
                self.entries[tuple(key)] = v
        self._lower = None
        self._upper = None

    @classmethod
    def kronecker(cls, field, n, labels=None, degrees=None, truncation=None):
        """The identity matrix on V (x) V; its braiding is the plain flip."""
        labels = labels or [str(i) for i in range(n)]
        one = field.one()
        return cls(field, labels, {(i, i, k, k): one for i in range(n) for k in range(n)},
                   degrees, truncation, "kronecker")

    def like(self, entries, name=None):
        return RMatrix(self.field, self.labels, entries, self.degrees, self.truncation, name)

    def get(self, i, j, k, l):
        return self.entries.get((i, j, k, l), self.field.zero())

    @property
    def by_lower(self):
        """(j, l) -> [(i, k, v)]"""
        if self._lower is None:
            self._lower = {}
            for (i, j, k, l), v in sorted(self.entries.items()):
                self._lower.setdefault((j, l), []).append((i, k, v))
        return self._lower

    @property
    def by_upper(self):
        """(i, k) -> [(j, l, v)]"""
        if self._upper is None:
            self._upper = {}
            for (i, j, k, l), v in sorted(self.entries.items()):
                self._upper.setdefault((i, k), []).append((j, l, v))
        return self._upper

    def deg(self, i):
        return self.degrees[i] if self.degrees is not None else 0

    def fits(self, *idx):
        if self.truncation is None or self.degrees is None:
            return True
        return sum(self.degrees[i] for i in idx) <= self.truncation

    def __eq__(self, other):
        return (isinstance(other, RMatrix) and self.labels == other.labels
                and self.entries == other.entries)

    def __repr__(self):
        return "RMatrix(%s, n=%d, %d entries)" % (self.name or "?", self.n, len(self.entries))

    # matrix algebra on V (x) V

    def compose(self, other):
        """(R S)^i_j^k_l = sum R^i_a^k_b S^a_j^b_l."""
        out = {}
        for (i, a, k, b), v in self.entries.items():
            for j, l, w in other.by_upper.get((a, b), ()):
                key = (i, j, k, l)
                out[key] = out[key] + v * w if key in out else v * w
        return self.like(out)

    def transpose2(self):
        return self.like({(i, j, l, k): v for (i, j, k, l), v in self.entries.items()})

    def flip(self):
        """R_21: the two tensor factors exchanged."""
        return self.like({(k, l, i, j): v for (i, j, k, l), v in self.entries.items()})

    def scaled(self, c):
        c = _scalar(self.field, c)
        return self.like({key: v * c for key, v in self.entries.items()})

    def restrict(self, indices):
        """Entries with every index in ``indices``, relabelled 0..m-1."""
        pos = {a: n for n, a in enumerate(indices)}
        out = {}
        for (i, j, k, l), v in self.entries.items():
            if all(x in pos for x in (i, j, k, l)):
                out[(pos[i], pos[j], pos[k], pos[l])] = v
        degs = [self.degrees[a] for a in indices] if self.degrees is not None else None
        return RMatrix(self.field, [self.labels[a] for a in indices], out, degs,
                       self.truncation, self.name)

    def is_identity(self):
        return self == RMatrix.kronecker(self.field, self.n, self.labels)

    def inverse(self):
        """Matrix inverse on V (x) V, block by block; ValueError if singular."""
        rows_of = {}
        parent = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (i, j, k, l) in self.entries:
            a, b = find(("r", i, k)), find(("c", j, l))
            if a != b:
                parent[a] = b
        n = self.n
        for i in range(n):
            for k in range(n):
                find(("r", i, k))
                find(("c", i, k))
        for node in list(parent):
            rows_of.setdefault(find(node), []).append(node)
        out = {}
        for nodes in rows_of.values():
            rows = sorted((x[1], x[2]) for x in nodes if x[0] == "r")
            cols = sorted((x[1], x[2]) for x in nodes if x[0] == "c")
            if len(rows) != len(cols):
                raise ValueError("R is singular (unbalanced block)")
            ci = {c: m for m, c in enumerate(cols)}
            dense = [[self.field.zero()] * len(cols) for _ in rows]
            for m, (i, k) in enumerate(rows):
                for j, l, v in self.by_upper.get((i, k), ()):
                    dense[m][ci[(j, l)]] = v
            inv = mat_inverse(dense, self.field)
            for m, (j, l) in enumerate(cols):
                for p, (i, k) in enumerate(rows):
                    if inv[m][p]:
                        out[(j, i, l, k)] = inv[m][p]
        return self.like(out, (self.name or "R") + "^-1")

    # serialisation

    def to_json(self):
        return {"labels": list(self.labels),
                "entries": [{"i": self.labels[i], "j": self.labels[j], "k": self.labels[k],
                             "l": self.labels[l], "v": str(v)}
                            for (i, j, k, l), v in sorted(self.entries.items())]}

    @classmethod
    def from_json(cls, doc, field=None):
        field = field or ScalarField(ScalarField.RATIONAL_Q)
        labels = [str(x) for x in doc["labels"]]
        pos = {x: n for n, x in enumerate(labels)}
        entries = {}
        for e in doc["entries"]:
            key = tuple(pos[str(e[c])] for c in "ijkl")
            entries[key] = field.parse(str(e["v"]))
        return cls(field, labels, entries)


def from_braiding(field, labels, psi, **kw):
    """RMatrix from Psi tables: psi[(i, j)] = {(b, a): v} for e_b (x) e_a."""
    entries = {}
    for (i, j), row in psi.items():
        for (b, a), v in row.items():
            if v:
                entries[(a, i, b, j)] = v
    return RMatrix(field, labels, entries, **kw)


def braiding_of(R, i, j):
    """Psi(e_i (x) e_j) as {(b, a): v}."""
    return {(k, a): v for a, k, v in R.by_lower.get((i, j), ())}


# ---------------------------------------------------------------- entrywise checks


def _apply(R, vec, p, q):
    """Act with R on tensor positions p, q of a vector {index tuple: coeff}."""
    out = {}
    low = R.by_lower
    for t, c in vec.items():
        for i, k, v in low.get((t[p], t[q]), ()):
            s = list(t)
            s[p], s[q] = i, k
            s = tuple(s)
            x = c * v
            out[s] = out[s] + x if s in out else x
    return {k: v for k, v in out.items() if v}


def _chain(vec, steps):
    for R, p, q in steps:
        vec = _apply(R, vec, p, q)
    return vec


def _triples(R, indices=None):
    idx = range(R.n) if indices is None else indices
    for j in idx:
        for l in idx:
            for n in idx:
                if R.fits(j, l, n):
                    yield (j, l, n)


def _mixed_ybe(A, B, C, indices=None):
    """First triple where A_12 B_13 C_23 != C_23 B_13 A_12, or None."""
    one = A.field.one()
    for t in _triples(A, indices):
        e = {t: one}
        lhs = _chain(e, [(C, 1, 2), (B, 0, 2), (A, 0, 1)])
        rhs = _chain(e, [(A, 0, 1), (B, 0, 2), (C, 1, 2)])
        if lhs != rhs:
            return tuple(A.labels[x] for x in t)
    return None


def qybe_check(R, indices=None):
    rep = Report("qybe")
    bad = _mixed_ybe(R, R, R, indices)
    rep.check("R12 R13 R23 = R23 R13 R12", bad is None, bad)
    if R.truncation is not None:
        rep.data["window"] = "lower triples of total degree <= %d" % R.truncation
    return rep


def biinvert(R):
    """R~ = ((R^t2)^-1)^t2, with the residual identity checked."""
    Rt = R.transpose2()
    try:
        M = Rt.inverse()
    except ValueError:
        raise ValueError("R^t2 is singular; R is not bi-invertible")
    if not Rt.compose(M).is_identity():
        raise ValueError("R^t2 inverse failed its residual check")
    out = M.transpose2()
    out.name = (R.name or "R") + "~"
    return out


def _products(spec, i, j):
    if not spec.defined(i, j):
        raise KeyError((i, j))
    return spec.product(i, j)


def _acc(d, key, v):
    if v:
        d[key] = d[key] + v if key in d else v


def _clean(d):
    return {k: v for k, v in d.items() if v}


def _covariance_sides(R, spec, i, j, n):
    """Both sides of c_ij^a R^k_a^m_n = c_ab^k R^a_i^m_c R^b_j^c_n, keyed (k, m)."""
    low = R.by_lower
    lhs, rhs = {}, {}
    for a, c1 in _products(spec, i, j).items():
        for k, m, v in low.get((a, n), ()):
            _acc(lhs, (k, m), c1 * v)
    for b, c, v1 in low.get((j, n), ()):
        for a, m, v2 in low.get((i, c), ()):
            for k, c3 in _products(spec, a, b).items():
                _acc(rhs, (k, m), v1 * v2 * c3)
    return _clean(lhs), _clean(rhs)


def _covariance_sides2(R, spec, n, j, k):
    """Both sides of c_jk^a R^m_n^i_a = c_ab^i R^m_c^b_k R^c_n^a_j, keyed (m, i)."""
    low = R.by_lower
    lhs, rhs = {}, {}
    for a, c1 in _products(spec, j, k).items():
        for m, i, v in low.get((n, a), ()):
            _acc(lhs, (m, i), c1 * v)
    for c, a, v1 in low.get((n, j), ()):
        for m, b, v2 in low.get((c, k), ()):
            for i, c3 in _products(spec, a, b).items():
                _acc(rhs, (m, i), v1 * v2 * c3)
    return _clean(lhs), _clean(rhs)


def _spec_fits(spec, *idx):
    if spec.truncation is None or spec.degrees is None:
        return True
    return sum(spec.degrees[i] for i in idx) <= spec.truncation


def covariance_check(R, spec):
    """Both component identities expressing that the product is a braided morphism."""
    if R.n != spec.dim:
        raise ValueError("R has %d basis elements, the algebra %d" % (R.n, spec.dim))
    rep = Report("covariance")
    n = spec.dim
    L = spec.labels
    bad = None
    for i in range(n):
        for j in range(n):
            for m in range(n):
                if not _spec_fits(spec, i, j, m) or not spec.defined(i, j):
                    continue
                lhs, rhs = _covariance_sides(R, spec, i, j, m)
                if lhs != rhs:
                    bad = (L[i], L[j], L[m])
                    break
            if bad:
                break
        if bad:
            break
    rep.check("Psi(ab (x) c) is Psi composed twice", bad is None, bad)
    bad = None
    for m in range(n):
        for j in range(n):
            for k in range(n):
                if not _spec_fits(spec, m, j, k) or not spec.defined(j, k):
                    continue
                lhs, rhs = _covariance_sides2(R, spec, m, j, k)
                if lhs != rhs:
                    bad = (L[m], L[j], L[k])
                    break
            if bad:
                break
        if bad:
            break
    rep.check("Psi(a (x) bc) is Psi composed twice", bad is None, bad)
    return rep


def rprime_check(R, Rp, spec, indices=None):
    """The two mixed braid identities for R' and braided-commutativity c_ij^k = c_ba^k R'^a_i^b_j."""
    rep = Report("rprime")
    bad = _mixed_ybe(Rp, R, R, indices)
    rep.check("R'12 R13 R23 = R23 R13 R'12", bad is None, bad)
    bad = _mixed_ybe(R, R, Rp, indices)
    rep.check("R12 R13 R'23 = R'23 R13 R12", bad is None, bad)
    idx = range(spec.dim) if indices is None else indices
    bad = None
    for i in idx:
        for j in idx:
            if not spec.defined(i, j) or not _spec_fits(spec, i, j):
                continue
            want = _clean(dict(spec.product(i, j)))
            got = {}
            for a, b, v in Rp.by_lower.get((i, j), ()):
                if not spec.defined(b, a):
                    got = None
                    break
                for k, c in spec.product(b, a).items():
                    _acc(got, k, v * c)
            if got is None:
                continue
            if _clean(got) != want:
                bad = (spec.labels[i], spec.labels[j])
                break
        if bad:
            break
    rep.check("braided-commutative: c_ij^k = c_ba^k R'^a_i^b_j", bad is None, bad)
    return rep


def unit_compatible(R, u):
    """Psi(1 (x) a) = a (x) 1 and Psi(a (x) 1) = 1 (x) a."""
    for j in range(R.n):
        if braiding_of(R, u, j) != {(j, u): R.field.one()}:
            return False
        if braiding_of(R, j, u) != {(u, j): R.field.one()}:
            return False
    return True


# ---------------------------------------------------------------- R-matrix families


def line_R(q, D, kind="braided"):
    """R on 1, x, ..., x^D for the braided line or the conformally braided line."""
    if D < 1:
        raise ValueError("D must be >= 1")
    F = q.field
    labels = [str(i) for i in range(D + 1)]
    degs = list(range(D + 1))
    if kind == "braided":
        ent = {(i, i, k, k): q ** (i * k) for i in range(D + 1) for k in range(D + 1)}
        return RMatrix(F, labels, ent, degs, D, "braided_line")
    if kind != "conformal":
        raise ValueError("kind must be 'braided' or 'conformal'")
    return RMatrix(F, labels, _conformal_entries(q, D + 1), degs, D, "conformal_line")


def _conformal_entries(q, size):
    F = q.field
    one = F.one()
    fact = []
    for m in range(size):
        f = q_factorial(m, q)
        fact.append(f)
    ent = {}
    for i in range(size):
        for j in range(size):
            for k in range(size):
                l = i + k - j
                if l < 0 or l >= size:
                    continue
                if j == 0:
                    if i == 0:
                        ent[(i, j, k, l)] = one
                elif l == 0:
                    if i == j:
                        ent[(i, j, k, l)] = one
                elif k >= 1 and i <= j:
                    if not fact[l - 1]:
                        raise ValueError("[%d]_q! vanishes at this q" % (l - 1))
                    ent[(i, j, k, l)] = (q_binomial(j, j - i, q) * q ** (l * i)
                                         * (one - q) ** (j - i) * fact[k - 1] / fact[l - 1])
    return ent


def anyonic_R(q, N):
    """The double braiding of the anyonic line x^N = 0 (q a primitive N-th root)."""
    F = q.field
    if F.kind != F.CYCLOTOMIC or F.N != N:
        raise ValueError("the anyonic braiding needs the cyclotomic(%d) field" % N)
    return RMatrix(F, [str(i) for i in range(N)], _conformal_entries(q, N),
                   name="anyonic:%d" % N)


def super_sign_R(field, parity):
    """Psi(e_i (x) e_j) = (-1)^{|i||j|} e_j (x) e_i; involutive."""
    n = len(parity)
    one = field.one()
    return RMatrix(field, [str(i) for i in range(n)],
                   {(i, i, k, k): -one if parity[i] and parity[k] else one
                    for i in range(n) for k in range(n)}, name="super_sign")


# quantum-braided plane: basis x^i y^j ordered as in graded.plane_indices


def _mono_mul(q, A, B):
    """x^a y^b . x^c y^d = q^(bc) x^(a+c) y^(b+d)."""
    return (A[0] + B[0], A[1] + B[1]), q ** (A[1] * B[0])


def _left(q, mono, X):
    out = {}
    for (P, Q), c in X.items():
        P2, f = _mono_mul(q, mono, P)
        _acc(out, (P2, Q), c * f)
    return out


def _right(q, X, mono):
    out = {}
    for (P, Q), c in X.items():
        Q2, f = _mono_mul(q, Q, mono)
        _acc(out, (P, Q2), c * f)
    return out


def _add(X, Y, c):
    out = dict(X)
    for k, v in Y.items():
        _acc(out, k, v * c)
    return _clean(out)


def qplane_psi_recursive(q, D):
    """Psi on all pairs of monomials of degree <= D through the two displayed recursions."""
    F = q.field
    one = F.one()
    q2 = q * q
    memo = {}

    def yx(i, j):
        # Psi(y^i (x) x^j)
        key = (i, j)
        if key in memo:
            return memo[key]
        if j == 0:
            out = {((0, 0), (0, i)): one}
        elif i == 0:
            out = {((j, 0), (0, 0)): one}
        else:
            out = _add({}, _left(q, (1, 0), yx(i, j - 1)), q ** i)
            tail = _right(q, _left(q, (0, 1), yx(i - 1, j - 1)), (1, 0))
            out = _add(out, tail, (q2 - one) * q_int(i, q2) * q2 ** (j - 1))
        memo[key] = out
        return out

    from .graded import plane_indices
    idx = plane_indices(D)
    psi = {}
    for I in idx:
        for K in idx:
            i, j = I
            k, l = K
            c = q ** (i * (2 * k + l - j) + l * (2 * j - k))
            X = _right(q, _left(q, (0, l), yx(j, k)), (i, 0))
            psi[(I, K)] = {key: v * c for key, v in X.items()}
    return psi


def functorial_braiding(spec, words, seeds):
    """Psi on all basis pairs from generator seeds by the two functoriality rules.

    ``words[p]`` spells basis element p in generator positions with
    e_p = e_w[0] e_(rest); ``seeds[(g, h)]`` is {(b, a): v}. Memoised top-down.
    """
    F = spec.field
    u = spec.unit
    one = F.one()
    pos = {tuple(w): p for p, w in enumerate(words)}
    memo = {}

    def split(p):
        w = words[p]
        a, rest = pos[tuple(w[:1])], pos[tuple(w[1:])]
        c = spec.coeff(a, rest, p)
        if not c:
            raise ValueError("basis element %s is not e_a e_rest" % spec.labels[p])
        return a, rest, c

    def psi(P, Q):
        key = (P, Q)
        if key in memo:
            return memo[key]
        if P == u:
            out = {(Q, u): one}
        elif Q == u:
            out = {(u, P): one}
        elif len(words[P]) == 1 and len(words[Q]) == 1:
            out = dict(seeds.get((P, Q), {}))
        elif len(words[P]) > 1:
            # Psi(a.r (x) Q): braid r past Q, then a past the result
            a, r, c = split(P)
            out = {}
            for (Q1, R1), v in psi(r, Q).items():
                for (Q2, A1), w in psi(a, Q1).items():
                    for m, c3 in spec.product(A1, R1).items():
                        _acc(out, (Q2, m), v * w * c3)
            cinv = c.inverse()
            out = {k: v * cinv for k, v in out.items()}
        else:
            b, s, c = split(Q)
            out = {}
            for (B1, P1), v in psi(P, b).items():
                for (S1, P2), w in psi(P1, s).items():
                    for m, c3 in spec.product(B1, S1).items():
                        _acc(out, (m, P2), v * w * c3)
            cinv = c.inverse()
            out = {k: v * cinv for k, v in out.items()}
        out = _clean(out)
        memo[key] = out
        return out

    return {(P, Q): psi(P, Q) for P in range(spec.dim) for Q in range(spec.dim)}


def xybra_seeds(q):
    """Psi on the generators x, y of the quantum-braided plane."""
    F = q.field
    one = F.one()
    X, Y = (1, 0), (0, 1)
    return {(X, X): {(X, X): q * q}, (Y, Y): {(Y, Y): q * q}, (X, Y): {(Y, X): q},
            (Y, X): {(X, Y): q, (Y, X): q * q - one}}


def qplane_braiding(q, D, route="recursion"):
    """RMatrix of the quantum-braided plane truncated at degree D."""
    from .graded import plane_indices, qplane_spec, MultiIndex
    idx = plane_indices(D)
    pos = {tuple(I): n for n, I in enumerate(idx)}
    spec = qplane_spec(q, D)
    if route == "recursion":
        raw = qplane_psi_recursive(q, D)
        psi = {(pos[tuple(I)], pos[tuple(K)]): {(pos[B], pos[A]): v for (B, A), v in row.items()}
               for (I, K), row in raw.items()}
    elif route == "functorial":
        words = [(pos[(1, 0)],) * I[0] + (pos[(0, 1)],) * I[1] for I in idx]
        seeds = {(pos[g], pos[h]): {(pos[b], pos[a]): v for (b, a), v in row.items()}
                 for (g, h), row in xybra_seeds(q).items()}
        psi = functorial_braiding(spec, words, seeds)
    else:
        raise ValueError("route must be 'recursion' or 'functorial'")
    R = from_braiding(q.field, spec.labels, psi, degrees=[MultiIndex(*I).degree for I in idx],
                      truncation=D, name="qplane")
    return R


def degree_sparse(R):
    """True when every entry has deg i + deg k = deg j + deg l."""
    return all(R.deg(i) + R.deg(k) == R.deg(j) + R.deg(l) for (i, j, k, l) in R.entries)


# ---------------------------------------------------------------- FRT quotients


def frt_relations(R, T, lower=None, window=None):
    """R^i_a^j_b T[a,k] T[b,l] - T[j,b] T[i,a] R^a_k^b_l for the requested tuples.

    ``lower`` restricts (k, l); ``window(i, j, k, l)`` filters tuples.
    """
    n = R.n
    F = R.field
    pairs = [(k, l) for k in range(n) for l in range(n)] if lower is None else lower
    rels = []
    for i in range(n):
        for j in range(n):
            for k, l in pairs:
                if window is not None and not window(i, j, k, l):
                    continue
                r = NCPoly(F)
                for a, b, v in R.by_upper.get((i, j), ()):
                    x, y = T.get((a, k)), T.get((b, l))
                    if x and y:
                        r = r + (x * y).scale(v)
                for a, b, v in R.by_lower.get((k, l), ()):
                    x, y = T.get((j, b)), T.get((i, a))
                    if x and y:
                        r = r - (x * y).scale(v)
                if r:
                    rels.append(r)
    return rels


def _single_gen(p):
    if p is not None and len(p.terms) == 1:
        (w, c), = p.terms.items()
        if len(w) == 1 and c == 1:
            return w[0]
    return None


def pairing_table(R, T, positions=None):
    """R(t^a_i, t^b_j) = R^a_i^b_j on every pair of matrix entries that are generators."""
    gens = []
    for pos, p in sorted(T.items()):
        if positions is not None and pos not in positions:
            continue
        g = _single_gen(p)
        if g is not None:
            gens.append((g, positions[pos] if positions is not None else pos))
    table = {}
    for g, (a, i) in gens:
        for h, (b, j) in gens:
            v = R.get(a, i, b, j)
            if v:
                table[(g, h)] = v
    return table


def build_M1R(R, spec, variant="M1", check=True, weight=None):
    """The variant's comeasuring bialgebra cut down by the FRT relations."""
    if R.n != spec.dim:
        raise ValueError("R and the algebra have different dimensions")
    if check:
        for rep in (qybe_check(R), covariance_check(R, spec)):
            if not rep.ok:
                raise ValueError("precondition failed: %s" % (rep.first_failure(),))
    bp = build(spec, variant, weight=weight)
    if bp.variant != "M1" and not unit_compatible(R, spec.unit):
        raise ValueError("Psi does not treat the unit trivially; only M1 is defined")
    window = None
    if spec.truncation is not None and spec.degrees is not None:
        d, D = spec.degrees, spec.truncation
        window = lambda i, j, k, l: d[i] + d[j] <= D and d[k] + d[l] <= D
    for r in frt_relations(R, bp.matrix, window=window):
        bp.base.add_relation(r)
    if window is not None:
        bp.extras["window"] = window
    bp.extras["R"] = R
    bp.extras["pairing"] = pairing_table(R, bp.matrix)
    bp.notes.append("with R t1 t2 = t2 t1 R for R = %s" % (R.name or "user"))
    return bp


class DualQT:
    """The functional R on a bialgebra, extended from generator pairs to words.

    Extension rules: R(g.a, y) = R(g, y1) R(a, y2) and R(x, b.c) = R(x1, c) R(x2, b),
    with R(1, w) = eps(w) = R(w, 1). Values are memoised per word pair.
    """

    def __init__(self, bp, table):
        if bp.coproduct is None:
            raise ValueError("needs a coproduct table")
        self.bp = bp
        self.table = table
        self.field = bp.field
        self._memo = {}

    def _eps(self, w):
        return self.bp.epsilon(NCPoly.word(self.field, w))

    def words(self, w1, w2, route="left"):
        """R on a word pair; ``route`` picks which argument is split first."""
        key = (w1, w2, route)
        v = self._memo.get(key)
        if v is not None:
            return v
        F = self.field
        if not w1:
            v = self._eps(w2)
        elif not w2:
            v = self._eps(w1)
        elif len(w1) == 1 and len(w2) == 1:
            v = self.table.get((w1[0], w2[0]), F.zero())
        elif len(w1) > 1 and (route == "left" or len(w2) == 1):
            v = F.zero()
            g, rest = w1[:1], w1[1:]
            for (y1, y2), c in self.bp.delta_word(w2).terms.items():
                a = self.words(g, y1, route)
                if a:
                    v = v + c * a * self.words(rest, y2, route)
        else:
            v = F.zero()
            b, rest = w2[:1], w2[1:]
            for (x1, x2), c in self.bp.delta_word(w1).terms.items():
                a = self.words(x1, rest, route)
                if a:
                    v = v + c * a * self.words(x2, b, route)
        self._memo[key] = v
        return v

    def __call__(self, p, r, route="left"):
        F = self.field
        if not isinstance(p, NCPoly):
            p = NCPoly.word(F, p)
        if not isinstance(r, NCPoly):
            r = NCPoly.word(F, r)
        s = F.zero()
        for w1, c1 in p.terms.items():
            for w2, c2 in r.terms.items():
                x = self.words(w1, w2, route)
                if x:
                    s = s + c1 * c2 * x
        return s


def _all_words(pres, L):
    from .ncalg import words_by_weight
    return [w for ws in words_by_weight(pres, L) for w in ws]


def dualqt_verify(bp, L, table=None):
    """R kills the ideal from both sides and makes the bialgebra quasi-commutative."""
    rep = Report("dualqt_verify")
    rep.data["L"] = L
    table = table if table is not None else bp.extras.get("pairing")
    if table is None:
        raise ValueError("no pairing table attached")
    rf = DualQT(bp, table)
    pres = bp.base
    F = bp.field
    words = _all_words(pres, L)
    bad = None
    for w1 in words:
        for w2 in words:
            if pres.weight(w1) + pres.weight(w2) > L + 1:
                continue
            if rf.words(w1, w2, "left") != rf.words(w1, w2, "right"):
                bad = (pres.word_str(w1), pres.word_str(w2))
                break
        if bad:
            break
    rep.check("both extension orders agree", bad is None, bad)
    bad = None
    for r in pres.relations:
        for w in words:
            if rf(r, w) or rf(w, r):
                bad = (pres.poly_str(r), pres.word_str(w))
                break
        if bad:
            break
    rep.check("R vanishes against every relation", bad is None, bad)
    # truncated R: pairs whose FRT relation lies outside the window are not imposed
    window = bp.extras.get("window")
    where = {}
    if window is not None:
        for pos, p in (bp.matrix or {}).items():
            g = _single_gen(p)
            if g is not None:
                where[g] = pos
        rep.data["window"] = "generator pairs inside the truncation window"
    bad = None
    s = pres.slice(L)
    for g in pres.generators:
        for h in pres.generators:
            if g.weight + h.weight > L:
                continue
            if window is not None and g.id in where and h.id in where:
                (a, i), (b, j) = where[g.id], where[h.id]
                if not window(a, b, i, j):
                    continue
            da, db = bp.coproduct[g.id], bp.coproduct[h.id]
            x = NCPoly(F)
            for (a1, a2), ca in da.terms.items():
                for (b1, b2), cb in db.terms.items():
                    v = rf.words(a2, b2)
                    if v:
                        x = x + NCPoly.word(F, b1 + a1, ca * cb * v)
                    v = rf.words(a1, b1)
                    if v:
                        x = x - NCPoly.word(F, a2 + b2, ca * cb * v)
            if x and not s.in_ideal(x):
                bad = (g.name, h.name)
                break
        if bad:
            break
    rep.check("b1 a1 R(a2, b2) = R(a1, b1) a2 b2 on generators", bad is None, bad)
    return rep


# ---------------------------------------------------------------- worked families


def build_M0R_line(q, D):
    """Generators t_1..t_D of the conformally braided line, relations from R at (k, l) = (1, 1)."""
    from .graded import build_M0_line, MultiIndex
    R = line_R(q, D, "conformal")
    bp = build_M0_line(D, field=q.field)
    T = {}
    for (I, K), p in bp.derived.items():
        T[(I[0], K[0])] = p
    T[(0, 0)] = NCPoly.constant(q.field, 1)
    window = lambda i, j, k, l: i + j <= D + 1
    for r in frt_relations(R, T, lower=[(1, 1)], window=window):
        bp.base.add_relation(r)
    gens = {MultiIndex(i): bp.base.gen_id("t%d" % i) for i in range(1, D + 1)}
    bp.extras["R"] = R
    bp.extras["pairing"] = {(gens[MultiIndex(i)], gens[MultiIndex(j)]): R.get(i, 1, j, 1)
                            for i in range(1, D + 1) for j in range(1, D + 1)
                            if R.get(i, 1, j, 1)}
    bp.variant = "M0(R)"
    return bp


def _qplane_positions(D):
    from .graded import plane_indices
    return {I: n for n, I in enumerate(plane_indices(D))}


def build_MR_qplane(q, D, variant="M"):
    """M or M0 of the plane plus the four R-relation families among the s- and t-columns."""
    from .graded import _qplane, MultiIndex
    bp = _qplane(q, D, variant)
    R = qplane_braiding(q, D)
    pos = _qplane_positions(D)
    T = {}
    for (I, K), p in bp.matrix.items():
        T[(pos[I], pos[K])] = p
    X, Y = pos[MultiIndex(1, 0)], pos[MultiIndex(0, 1)]
    lower = [(X, X), (Y, Y), (X, Y), (Y, X)]
    for r in frt_relations(R, T, lower=lower):
        bp.base.add_relation(r)
    gpos = {}
    for (I, K), p in bp.matrix.items():
        if K in (MultiIndex(1, 0), MultiIndex(0, 1)):
            gpos[(pos[I], pos[K])] = (pos[I], pos[K])
    bp.extras["R"] = R
    bp.extras["pairing"] = pairing_table(R, T, positions={k: k for k in gpos})
    bp.variant = variant + "(R)"
    return bp


def mq2_surjection_check(q, D=2):
    """Killing every generator of degree >= 2 maps M0(R) of the plane onto M_q(2)."""
    from .graded import standard_Mq2
    rep = Report("mq2_surjection")
    bp = build_MR_qplane(q, D, "M0")
    P = bp.base
    F = q.field
    Q = standard_Mq2(q)
    low = {"s_1_0": "a", "t_1_0": "b", "s_0_1": "c", "t_0_1": "d"}
    images = []
    for g in P.generators:
        images.append(Q.gen(low[g.name]) if g.name in low else NCPoly(F))
    s = Q.slice(2)
    bad = None
    for r in P.relations:
        img = substitute(r, images, F)
        if img and (not s.contains_weight(img) or not s.in_ideal(img)):
            bad = P.poly_str(r)
            break
    rep.check("killing higher generators sends every relation into M_q(2)", bad is None, bad)
    # the kernel of <a,b,c,d> -> M0(R) at weight 2, by elimination of the higher words
    ids = {P.gen_id(n): k for k, n in enumerate(["s_1_0", "t_1_0", "s_0_1", "t_0_1"])}
    sl = P.slice(2)
    rows = [NCPoly(F, row) for row in sl.pivots.values()]
    key = lambda w: (P.weight(w), any(g not in ids for g in w), w)
    kernel = []
    for row in echelon(rows, key, F):
        lead = max(row.terms, key=key)
        if all(g in ids for g in lead) and P.weight(lead) == 2:
            kernel.append(NCPoly(F, {tuple(ids[g] for g in w): c for w, c in row.terms.items()}))
    mine = echelon(kernel, Q.key, F)
    theirs = echelon(Q.relations, Q.key, F)
    rep.check("degree-one relations are exactly those of M_q(2)", mine == theirs,
              None if mine == theirs else [Q.poly_str(r) for r in mine])
    rep.data["degree_one_relations"] = [Q.poly_str(r) for r in mine]
    back = [None] * 4
    for gid, k in ids.items():
        back[k] = NCPoly.word(F, (gid,))
    ok = all(substitute(substitute(Q.gen(x), back, F), images, F) == Q.gen(x) for x in "abcd")
    rep.check("surjection after inclusion is the identity on a, b, c, d", ok)
    # the degree-one block of R is an R-matrix presenting M_q(2)
    pos = _qplane_positions(D)
    from .graded import MultiIndex
    X, Y = pos[MultiIndex(1, 0)], pos[MultiIndex(0, 1)]
    R1 = bp.extras["R"].restrict([X, Y])
    T1 = {(0, 0): Q.gen("a"), (0, 1): Q.gen("b"), (1, 0): Q.gen("c"), (1, 1): Q.gen("d")}
    frt = echelon(frt_relations(R1, T1), Q.key, F)
    rep.check("the degree-one R block presents M_q(2)", frt == theirs)
    return rep
