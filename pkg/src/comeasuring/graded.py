"""Degree-truncated comeasurings of the line and of the quantum-braided plane.

Basis elements are multi-indices (i, j) standing for x^i y^j (the line uses
(i, 0)). Generators carry weight equal to their source degree so that every
relation is homogeneous and slices can be bounded by degree.

Truncation at D keeps generators of degree <= D and every relation whose
terms only involve those generators.
"""

from .comeasure import (AlgebraSpec, BialgebraPresentation, CoalgebraSpec, Report,
                        quotient_coproduct_preserving)
from .ncalg import NCPoly, Presentation, TensorElement
from .scalars import q_binomial, q_factorial


class MultiIndex(tuple):
    """A pair (i, j) of non-negative integers; ``degree`` is i + j."""

    def __new__(cls, i, j=0):
        if i < 0 or j < 0:
            raise ValueError("multi-index entries must be >= 0")
        return tuple.__new__(cls, (i, j))

    @property
    def degree(self):
        return self[0] + self[1]

    def __add__(self, other):
        return MultiIndex(self[0] + other[0], self[1] + other[1])

    def __repr__(self):
        return "(%d,%d)" % self


ZERO = MultiIndex(0, 0)


def plane_indices(D, include_zero=True):
    """(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ... up to degree D."""
    out = []
    for n in range(0 if include_zero else 1, D + 1):
        for i in range(n, -1, -1):
            out.append(MultiIndex(i, n - i))
    return out


def line_indices(D, include_zero=True):
    return [MultiIndex(i, 0) for i in range(0 if include_zero else 1, D + 1)]


class IndexedSequence:
    """Finitely supported map MultiIndex -> NCPoly, cut off at degree D."""

    def __init__(self, field, values=None, D=None):
        self.field = field
        self.D = D
        self.values = {}
        for k, v in (values or {}).items():
            k = MultiIndex(*k)
            if D is not None and k.degree > D:
                continue
            if v:
                self.values[k] = v

    @classmethod
    def delta(cls, field, idx, value, D=None):
        if not isinstance(value, NCPoly):
            value = NCPoly.constant(field, value)
        return cls(field, {idx: value}, D)

    def __getitem__(self, idx):
        return self.values.get(MultiIndex(*idx), NCPoly(self.field))

    def items(self):
        return sorted(self.values.items())

    def support(self):
        return sorted(self.values)

    def __eq__(self, other):
        return isinstance(other, IndexedSequence) and self.values == other.values

    def __repr__(self):
        return "IndexedSequence(%r)" % (self.values,)


def q_convolve(s, t, q=None, D=None):
    """(s *_q t)_(i,j) = sum over (a,b)+(c,d)=(i,j) of q^(bc) s_(a,b) t_(c,d)."""
    if D is None:
        D = s.D if t.D is None else (t.D if s.D is None else min(s.D, t.D))
    F = s.field
    out = {}
    for (a, b), x in s.values.items():
        for (c, d), y in t.values.items():
            k = MultiIndex(a + c, b + d)
            if D is not None and k.degree > D:
                continue
            p = x * y
            if q is not None and b * c:
                p = p.scale(q ** (b * c))
            out[k] = out[k] + p if k in out else p
    return IndexedSequence(F, out, D)


def convolve(s, t, D=None):
    return q_convolve(s, t, None, D)


def q_power(s, k, q=None, D=None):
    """k-fold q-convolution power; the 0-th power is the unit delta at (0,0)."""
    acc = IndexedSequence.delta(s.field, ZERO, 1, D)
    for _ in range(k):
        acc = q_convolve(acc, s, q, D)
    return acc


class TruncatedGradedPresentation(BialgebraPresentation):
    """A graded build: ``derived[(I, K)]`` holds t^I_K in terms of the generators."""

    def __init__(self, base, coproduct, counit, variant, D, labels, derived, **kw):
        BialgebraPresentation.__init__(self, base, coproduct, counit, variant, **kw)
        self.D = D
        self.labels = labels
        self.derived = derived

    def t(self, I, K):
        return self.derived.get((MultiIndex(*I), MultiIndex(*K)), NCPoly(self.field))

    def to_json(self, display=False):
        doc = BialgebraPresentation.to_json(self, display)
        doc["truncation"] = self.D
        doc["derived"] = {
            "t^%r_%r" % (I, K): self.base.poly_str(p)
            for (I, K), p in sorted(self.derived.items()) if p}
        return doc


def _int_spec(field, indices, c, D, unit=True):
    """AlgebraSpec on integer positions of ``indices`` (labels like 1_0)."""
    pos = {I: n for n, I in enumerate(indices)}
    table = {}
    for (I, J), row in c.items():
        table[(pos[I], pos[J])] = {pos[K]: v for K, v in row.items()}
    return AlgebraSpec(field, len(indices), table, unit=pos.get(ZERO) if unit else None,
                       labels=["%d_%d" % I for I in indices],
                       degrees=[I.degree for I in indices], truncation=D), pos


def qplane_spec(q, D):
    """Truncated quantum-braided plane: x^i y^j x^k y^l = q^(jk) x^(i+k) y^(j+l)."""
    F = q.field
    idx = plane_indices(D)
    c = {}
    for I in idx:
        for J in idx:
            K = I + J
            if K.degree <= D:
                c[(I, J)] = {K: q ** (I[1] * J[0])}
    spec, _ = _int_spec(F, idx, c, D)
    spec.name = "qplane:%d" % D
    return spec


def line_spec(field, D):
    idx = line_indices(D)
    c = {(I, J): {I + J: 1} for I in idx for J in idx if (I + J).degree <= D}
    spec, _ = _int_spec(field, idx, c, D)
    spec.labels = [str(I[0]) for I in idx]
    spec.name = "line:%d" % D
    return spec


def _graded_presentation(field, variant, D, seqs, derived, relations, counit_at, index_set):
    """Assemble a TruncatedGradedPresentation from sequences of generators."""
    pres, labels, gens = seqs
    for r in relations:
        pres.add_relation(r)
    n = len(pres.generators)
    formal = variant == "M"
    cop = eps = None
    if not formal:
        cop = [None] * n
        eps = [field.zero()] * n
        for g, (name, I) in labels.items():
            x = TensorElement(field)
            for A, p in gens[name].items():
                # Delta s_I = sum_A t^I_A (x) s_A
                left = derived.get((I, A), NCPoly(field))
                if left:
                    x = x + TensorElement.of(left, p)
            cop[g] = x
            if I == counit_at[name]:
                eps[g] = field.one()
    matrix = {}
    for I in index_set:
        for K in index_set:
            matrix[(I, K)] = derived.get((I, K), NCPoly(field))
    bp = TruncatedGradedPresentation(pres, cop, eps, variant, D, labels, derived,
                                     formal=formal, matrix=matrix)
    return bp


def build_M0_line(D, field=None):
    """Free algebra on t_1..t_D with t^i_j the j-fold convolution power of t."""
    from .scalars import ScalarField
    if D < 1:
        raise ValueError("D must be >= 1")
    field = field or ScalarField("rational")
    pres = Presentation(field)
    gens = {}
    labels = {}
    for i in range(1, D + 1):
        g = pres.add_generator("t%d" % i, i, "t_%d" % i)
        gens[MultiIndex(i)] = NCPoly.word(field, (g,))
        labels[g] = ("t", MultiIndex(i))
    t = IndexedSequence(field, gens, D)
    idx = line_indices(D)
    derived = _derived_from_powers(field, [t], idx, D, None)
    bp = _graded_presentation(field, "M0", D, (pres, labels, {"t": t.values}), derived, [],
                              {"t": MultiIndex(1)}, idx)
    spec = line_spec(field, D)
    bp.spec = spec
    bp.coaction = _coaction(derived, idx)
    return bp


def _derived_from_powers(field, seqs, idx, D, q):
    """t^I_K for K = (k, l): the k-th power of seqs[0] q-convolved with the l-th of seqs[1]."""
    derived = {}
    powers = [[q_power(s, k, q, D) for k in range(D + 1)] for s in seqs]
    for K in idx:
        k, l = K
        if len(seqs) == 1:
            col = powers[0][k]
        else:
            col = q_convolve(powers[0][k], powers[1][l], q, D)
        for I, p in col.values.items():
            derived[(I, K)] = p
    return derived


def _coaction(derived, idx):
    pos = {I: n for n, I in enumerate(idx)}
    table = {}
    for K in idx:
        table[pos[K]] = [(pos[I], derived[(I, K)]) for I in idx if derived.get((I, K))]
    return table


def _qplane(q, D, variant):
    if D < 1:
        raise ValueError("D must be >= 1")
    if not q:
        raise ValueError("q must be nonzero")
    F = q.field
    with_zero = variant == "M"
    idx = plane_indices(D, include_zero=True)
    gen_idx = plane_indices(D, include_zero=with_zero)
    shift = 1 if with_zero else 0
    pres = Presentation(F)
    labels = {}
    seq = {"s": {}, "t": {}}
    # degree-major order keeps the lowest generators first
    for I in gen_idx:
        for name in ("s", "t"):
            g = pres.add_generator("%s_%d_%d" % (name, I[0], I[1]), I.degree + shift,
                                   "%s_(%d,%d)" % (name, I[0], I[1]))
            seq[name][I] = NCPoly.word(F, (g,))
            labels[g] = (name, I)
    top = D if with_zero else D + 1
    s = IndexedSequence(F, seq["s"], top)
    t = IndexedSequence(F, seq["t"], top)
    st = q_convolve(s, t, q, top)
    ts = q_convolve(t, s, q, top)
    rels = []
    for I in plane_indices(top, include_zero=True):
        r = st[I].scale(q) - ts[I]
        if r:
            rels.append(r)
    s.D = t.D = D
    derived = _derived_from_powers(F, [s, t], idx, D, q)
    bp = _graded_presentation(F, variant, D, (pres, labels, seq), derived, rels,
                              {"s": MultiIndex(1, 0), "t": MultiIndex(0, 1)}, idx)
    bp.spec = qplane_spec(q, D)
    bp.coaction = _coaction(derived, idx)
    bp.extras["q"] = q
    if with_zero:
        bp.notes.append("coproduct is formal - truncated view (infinite series)")
    return bp


def build_M_qplane(q, D):
    return _qplane(q, D, "M")


def build_M0_qplane(q, D):
    return _qplane(q, D, "M0")


def degree_one_block(bp):
    """Generator polynomials a, b, c, d = s_(1,0), t_(1,0), s_(0,1), t_(0,1)."""
    return {"a": bp.base.gen("s_1_0"), "b": bp.base.gen("t_1_0"),
            "c": bp.base.gen("s_0_1"), "d": bp.base.gen("t_0_1")}


def coaddition_tensor(q, D):
    """d_(m,n)^{(i,j)(k,l)} = [m i]_{q^2} [n j]_{q^2} q^(jk) with (i,j)+(k,l) = (m,n)."""
    F = q.field
    q2 = q * q
    idx = plane_indices(D)
    d = {}
    for M in idx:
        row = {}
        m, n = M
        for i in range(m + 1):
            for j in range(n + 1):
                k, l = m - i, n - j
                row[(MultiIndex(i, j), MultiIndex(k, l))] = \
                    q_binomial(m, i, q2) * q_binomial(n, j, q2) * q ** (j * k)
        d[M] = row
    return CoalgebraSpec(F, len(idx), d, degrees={I: I.degree for I in idx}, truncation=D)


def coaddition_quotient(q, D, L=None):
    """M0 of the plane cut down by the coaddition-preserving relations."""
    bp = build_M0_qplane(q, D)
    out = quotient_coproduct_preserving(bp, coaddition_tensor(q, D), L)
    qb = TruncatedGradedPresentation(out.base, out.coproduct, out.counit, "quotient", D,
                                     bp.labels, bp.derived, matrix=bp.matrix,
                                     coaction=bp.coaction, spec=bp.spec)
    qb.extras.update(out.extras)
    return qb


def rescale_factor(q, I, K):
    """[i]! [j]! / ([k]! [l]!) in base q^2, relating t^I_K to the rescaled tau^I_K."""
    q2 = q * q
    return (q_factorial(I[0], q2) * q_factorial(I[1], q2)
            / (q_factorial(K[0], q2) * q_factorial(K[1], q2)))


def build_Mq2(q):
    """The coaddition quotient of M0 of the plane, read off on its degree-one generators."""
    F = q.field
    if F.kind == F.CYCLOTOMIC:
        raise ValueError("the rescaling divides by q-integers; use the symbolic field")
    quo = coaddition_quotient(q, 2)
    P = quo.base
    s = P.slice(2)
    low = ["s_1_0", "t_1_0", "s_0_1", "t_0_1"]
    names = dict(zip(low, "abcd"))
    old_ids = {P.gen_id(n): k for k, n in enumerate(low)}
    base = Presentation(F)
    for n in low:
        base.add_generator(names[n])
    rels = []
    for w, row in sorted(s.pivots.items(), key=lambda kv: P.key(kv[0])):
        if all(g in old_ids for g in w):
            if all(all(g in old_ids for g in u) for u in row):
                rels.append(NCPoly(F, {tuple(old_ids[g] for g in u): c for u, c in row.items()}))
    # rescaling is trivial on degree one: [1]! = [0]! = 1
    for I, K in [((1, 0), (1, 0)), ((1, 0), (0, 1)), ((0, 1), (1, 0)), ((0, 1), (0, 1))]:
        assert rescale_factor(q, I, K) == 1
    for r in rels:
        base.add_relation(r)
    a, b, c, d = (base.gen(x) for x in "abcd")
    # matrix layout [[a, b], [c, d]] = [[t^(1,0)_(1,0), t^(1,0)_(0,1)], [t^(0,1)_(1,0), t^(0,1)_(0,1)]]
    X, Y = MultiIndex(1, 0), MultiIndex(0, 1)
    T1 = {(X, X): a, (X, Y): b, (Y, X): c, (Y, Y): d}
    cop = [TensorElement.of(T1[(X, X)], T1[(X, X)]) + TensorElement.of(T1[(X, Y)], T1[(Y, X)]),
           TensorElement.of(T1[(X, X)], T1[(X, Y)]) + TensorElement.of(T1[(X, Y)], T1[(Y, Y)]),
           TensorElement.of(T1[(Y, X)], T1[(X, X)]) + TensorElement.of(T1[(Y, Y)], T1[(Y, X)]),
           TensorElement.of(T1[(Y, X)], T1[(X, Y)]) + TensorElement.of(T1[(Y, Y)], T1[(Y, Y)])]
    eps = [F.one(), F.zero(), F.zero(), F.one()]
    # degree-two matrix entries by q-convolution of the degree-one columns
    sseq = IndexedSequence(F, {X: a, Y: c}, 2)
    tseq = IndexedSequence(F, {X: b, Y: d}, 2)
    idx = plane_indices(2)
    derived = _derived_from_powers(F, [sseq, tseq], idx, 2, q)
    out = BialgebraPresentation(base, cop, eps, "quotient", coaction=_coaction(derived, idx),
                                matrix=derived, spec=qplane_spec(q, 2),
                                notes=["generators a, b, c, d = s_(1,0), t_(1,0), s_(0,1), "
                                       "t_(0,1); higher generators vanish in the quotient"])
    out.extras["quotient"] = quo
    return out


def standard_Mq2(q):
    """The six textbook relations of 2x2 quantum matrices, for comparison."""
    F = q.field
    P = Presentation(F, ["a", "b", "c", "d"])
    for r in ["b*a - q*a*b", "c*a - q*a*c", "d*b - q*b*d", "d*c - q*c*d", "c*b - b*c",
              "a*d - d*a - (q^-1 - q)*b*c"]:
        P.add_relation(r)
    return P


def check_degree_vanishing(quo, L):
    """In the coaddition quotient t^I_K lies in the ideal unless deg I = deg K."""
    rep = Report("degree vanishing")
    s = quo.base.slice(L)
    bad = None
    for (I, K), p in sorted(quo.derived.items()):
        if I.degree == K.degree or not p or quo.base.poly_weight(p) > L:
            continue
        if not s.in_ideal(p):
            bad = (I, K)
            break
    rep.check("t^I_K = 0 unless deg I = deg K", bad is None, bad)
    return rep

