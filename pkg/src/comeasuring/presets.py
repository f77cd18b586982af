"""Worked examples: algebra specs, their comeasurings in the familiar
generator names, and the checks that pin each one down.

Each ``check_*`` function returns a Report. The registry at the bottom
bundles a build with its checks for the command line.
"""

from fractions import Fraction

from .comeasure import (AlgebraSpec, BasisChange, CalculusSpec, Report, _conjugate,
                        build, build_M, build_M0, build_M1, build_finite_set_M, change_basis,
                        check_isomorphism, coinvariant_closure, coinvariants, finite_set_spec,
                        parse_variant, quotient_calculus_preserving, reparametrize,
                        universal_check, verify_bialgebra, verify_coaction)
from .graded import (build_M0_line, build_M0_qplane, build_Mq2, degree_one_block, line_spec,
                     standard_Mq2)
from .ncalg import NCPoly, Presentation, TensorElement, echelon, tensor_reduce
from .rmat import (DualQT, RMatrix, anyonic_R, build_M0R_line, build_M1R, covariance_check,
                   dualqt_verify, line_R, mq2_surjection_check, qplane_braiding, qybe_check)
from .scalars import ScalarField
from .braided import (build_braided_M1, build_transmuted, line_derived, line_family_holds,
                      transmute_check, verify_braided_bialgebra)


def _field(field, default="rational"):
    if field is None:
        return ScalarField.from_string(default)
    if isinstance(field, str):
        return ScalarField.from_string(field)
    return field


def nilpotent_spec(N, field=None):
    """C[x]/x^N = 0 on the basis 1, x, ..., x^(N-1)."""
    if N < 2:
        raise ValueError("N must be >= 2")
    F = _field(field)
    c = {(i, j): {i + j: 1} for i in range(N) for j in range(N) if i + j < N}
    return AlgebraSpec(F, N, c, unit=0, name="nilpotent:%d" % N)


def cyclic_spec(N, field=None):
    """C[x]/x^N = 1 on the basis 1, x, ..., x^(N-1)."""
    if N < 2:
        raise ValueError("N must be >= 2")
    F = _field(field)
    c = {(i, j): {(i + j) % N: 1} for i in range(N) for j in range(N)}
    return AlgebraSpec(F, N, c, unit=0, name="rootsof1:%d" % N)


def fermion_spec(field=None):
    s = nilpotent_spec(2, field)
    s.name = "fermion"
    return s


def _same_span(P, polys, golden):
    key = P.key
    a = echelon(polys, key, P.field)
    b = echelon(golden, key, P.field)
    return [x.terms for x in a] == [x.terms for x in b]


def same_ideal(P, golden, L):
    """The relations of P and the polynomials ``golden`` generate the same ideal up to weight L."""
    G = Presentation(P.field)
    for g in P.generators:
        G.add_generator(g.name, g.weight, g.display)
    for r in golden:
        G.add_relation(r if isinstance(r, NCPoly) else G.parse(r))
    ident = [NCPoly.word(P.field, (g.id,)) for g in P.generators]
    return check_isomorphism(P, G, ident, ident, L).ok


def minimal_relations(P):
    """Drop relations already implied by lighter ones (checked in the slice of their weight)."""
    kept = []
    for r in sorted((r for r in P.relations if r), key=lambda r: (P.poly_weight(r), P.poly_str(r))):
        G = Presentation(P.field)
        for g in P.generators:
            G.add_generator(g.name, g.weight, g.display)
        for k in kept:
            G.add_relation(k)
        if not kept or not G.slice(P.poly_weight(r)).in_ideal(r):
            kept.append(r)
    return kept


def _relation_strings(P):
    return [P.poly_str(r) for r in P.canonical_relations()]


# ---------------------------------------------------------------- Grassmann variable


def fermion_M(field=None):
    return build_M(fermion_spec(field)).renamed({"b1": ("b", "b"), "t1_1": ("t", "t")})


def fermion_M0(field=None):
    return build_M0(fermion_spec(field)).renamed({"t1_1": ("t", "t")})


def check_fermion(L=3, field=None):
    rep = Report("fermion x^2 = 0")
    spec = fermion_spec(field)
    M0 = fermion_M0(field)
    rep.check("M0: one generator, no relations",
              len(M0.generators) == 1 and not any(M0.relations), _relation_strings(M0.base))
    rank, match = universal_check(spec, "M0", L)
    rep.check("M0: oracle ideal slice has dimension 0", rank == 0 and match, rank)
    M = fermion_M(field)
    P = M.base
    golden = [P.parse("b^2"), P.parse("b*t + t*b")]
    rep.check("M: relations are {b^2, bt + tb}", _same_span(P, P.relations, golden),
              _relation_strings(P))
    rank, match = universal_check(spec, "M", 2)
    rep.check("M: oracle agrees at weight 2", match, rank)
    rep.check("M: group-like t, skew-primitive b",
              P.tensor_str(M.coproduct[P.gen_id("t")]) == "[t (x) t]"
              and M.epsilon(P.gen("b")) == 0 and M.epsilon(P.gen("t")) == 1)
    rep.merge(verify_coaction(M, spec, L), "M")
    rep.merge(verify_bialgebra(M, L), "M")
    return rep


# ---------------------------------------------------------------- roots of unity


def rootsof1_M(N=2, field=None):
    spec = cyclic_spec(N, field)
    bp = build_M(spec)
    if N == 2:
        return bp.renamed({"b1": ("b", "b"), "t1_1": ("t", "t")})
    if N == 3:
        return bp.renamed({"b1": ("b", "b"), "b2": ("alpha", "alpha"),
                           "t1_1": ("t", "t"), "t2_1": ("s", "s"),
                           "t1_2": ("beta", "beta"), "t2_2": ("gamma", "gamma")})
    return bp


def cube_roots_M0_golden(field=None):
    """<t, s | ts + st, t^3 + s^3 - 1, t^2 s, t s^2> with the matrix [[t, s^2], [s, t^2]]."""
    F = _field(field)
    P = Presentation(F, ["t", "s"])
    for r in ["t*s + s*t", "t^3 + s^3 - 1", "t^2*s", "t*s^2"]:
        P.add_relation(r)
    return P


def cube_roots_M_golden(field=None):
    """x^3 = 1: b alpha + t gamma + s beta = 1 and its two companions."""
    F = _field(field)
    P = Presentation(F, ["b", "t", "s"])
    al, be, ga = "(b^2 + t*s + s*t)", "(s^2 + b*t + t*b)", "(t^2 + s*b + b*s)"
    P.add_relation("b*%s + t*%s + s*%s - 1" % (al, ga, be))
    P.add_relation("t*%s + s*%s + b*%s" % (al, ga, be))
    P.add_relation("s*%s + b*%s + t*%s" % (al, ga, be))
    return P


def check_rootsof1(L=3, field=None):
    rep = Report("roots of unity")
    F = _field(field)
    M = rootsof1_M(2, F)
    P = M.base
    s2 = P.slice(2)
    pm = [P.parse("(b+t)^2 - 1"), P.parse("(b-t)^2 - 1")]
    rep.check("x^2=1, M: (b+t)^2 = 1 and (b-t)^2 = 1 hold",
              all(s2.in_ideal(p) for p in pm))
    rep.check("x^2=1, M: they generate the relations", _same_span(P, P.relations, pm))
    M1 = build_M1(cyclic_spec(2, F))
    Q = M1.base
    b, t = Q.gen("t0_1"), Q.gen("t1_1")
    s3 = Q.slice(L)
    cubes = [(b + t) ** 3 - (b + t), (b - t) ** 3 - (b - t)]
    rep.check("x^2=1, M1: (b+t)^3 = b+t and (b-t)^3 = b-t",
              all(s3.in_ideal(p) for p in cubes))
    rep.check("x^2=1, M1: t^0_0 = b^2 + t^2 and t^1_0 = bt + tb",
              s3.in_ideal(Q.gen("t0_0") - b * b - t * t)
              and s3.in_ideal(Q.gen("t1_0") - b * t - t * b))
    # x^3 = 1, restricted
    M0 = build_M0(cyclic_spec(3, F))
    G = cube_roots_M0_golden(F)
    B = M0.base
    t, s = G.gen("t"), G.gen("s")
    img = {"t1_1": t, "t2_1": s, "t1_2": s * s, "t2_2": t * t}
    f = [img[g.name] for g in B.generators]
    g = [B.gen("t1_1"), B.gen("t2_1")]
    iso = check_isomorphism(B, G, f, g, max(L, 4))
    rep.merge(iso, "x^3=1, M0 = <t,s | ts+st, t^3+s^3-1, t^2 s, t s^2>")
    rep.check("x^3=1, M0: (t+s)^3 = 1 given the others",
              G.slice(3).in_ideal((t + s) ** 3 - 1))
    M3 = rootsof1_M(3, F)
    Bm = M3.base
    H = cube_roots_M_golden(F)
    hb, ht, hs = H.gen("b"), H.gen("t"), H.gen("s")
    img = {"b": hb, "t": ht, "s": hs, "alpha": hb * hb + ht * hs + hs * ht,
           "beta": hs * hs + hb * ht + ht * hb, "gamma": ht * ht + hs * hb + hb * hs}
    f = [img[x.name] for x in Bm.generators]
    g = [Bm.gen("b"), Bm.gen("t"), Bm.gen("s")]
    rep.merge(check_isomorphism(Bm, H, f, g, max(L, 4)), "x^3=1, M = <b,t,s | alpha, beta, gamma form>")
    return rep


# ---------------------------------------------------------------- finite sets


def relset_relations(P, T, n):
    """tau^k_i tau^k_j - delta_ij tau^k_i, row by row."""
    out = []
    for k in range(n):
        for i in range(n):
            for j in range(n):
                r = T[(k, i)] * T[(k, j)]
                if i == j:
                    r = r - T[(k, i)]
                out.append(r)
    return out


def fourier_change(N):
    """Basis of delta functions on Z_N in terms of powers of x (x^N = 1)."""
    if N != 2:
        raise ValueError("only the real Fourier transform (N = 2) is rational")
    h = Fraction(1, 2)
    return BasisChange([[h, h], [h, -h]])


def check_finite_sets(L=3, field=None):
    rep = Report("finite sets")
    F = _field(field)
    for n in (2, 3):
        M1 = build_M1(finite_set_spec(n, F))
        P = M1.base
        rows = relset_relations(P, M1.matrix, n)
        rep.check("n=%d, M1: relations are the projector rows" % n,
                  _same_span(P, P.relations, rows), _relation_strings(P))
        rep.check("n=%d, M1: %d relation blocks" % (n, n), len(P.relations) == n * n * n)
    # (b +- t) in the Fourier basis
    x2 = cyclic_spec(2, F)
    m1 = build_M1(x2)
    Q = m1.base
    tau = change_basis(m1, fourier_change(2))
    fwd = tau.extras["forward"]
    b, t = Q.gen("t0_1"), Q.gen("t1_1")
    h = Fraction(1, 2)
    u, v = b + t, b - t
    golden = {(0, 0): (u * u + u).scale(h), (0, 1): (u * u - u).scale(h),
              (1, 0): (v * v + v).scale(h), (1, 1): (v * v - v).scale(h)}
    s = Q.slice(L)
    bad = [pos for pos, p in golden.items() if not s.in_ideal(fwd[pos] - p)]
    rep.check("x^2=1 in the delta basis: tau = 1/2 [[(b+t)^2+(b+t), ...]]", not bad, bad)
    fs2 = build_M1(finite_set_spec(2, F))
    rep.check("...whose relations are the projector rows",
              check_isomorphism(tau.base, fs2.base,
                                [NCPoly.word(F, (g.id,)) for g in tau.generators],
                                [NCPoly.word(F, (g.id,)) for g in fs2.generators], L).ok)
    # basepoint-free M and the pair of projectors g+, g-
    bf = build_finite_set_M(2, F)
    Mx = rootsof1_M(2, F)
    X = Mx.base
    bx, tx = X.gen("b"), X.gen("t")
    one = NCPoly.constant(F, 1)
    gp = (one + bx + tx).scale(h)
    gm = (one - bx + tx).scale(h)
    Lam = [[h, h], [h, -h]]
    Lam_inv = [[1, 1], [1, -1]]
    Fl = lambda m: [[F.from_rational(x) for x in r] for r in m]
    taux = _conjugate(Mx.matrix, Fl(Lam_inv), Fl(Lam), 2, F)
    golden = {(0, 0): gp, (0, 1): one - gp, (1, 0): one - gm, (1, 1): gm}
    sx = X.slice(L)
    bad = [pos for pos in golden if not sx.in_ideal(taux[pos] - golden[pos])]
    rep.check("x^2=1, M in the delta basis: tau = [[g+, 1-g+], [1-g-, g-]]", not bad, bad)
    B = bf.base
    pos_of = {}
    for pos, p in bf.matrix.items():
        (w, _), = p.terms.items()
        pos_of[w[0]] = pos
    f = [golden[pos_of[g.id]] for g in B.generators]
    g = [B.gen("tau1_1") - B.gen("tau2_2"), B.gen("tau1_1") + B.gen("tau2_2") - 1]
    rep.merge(check_isomorphism(B, X, f, g, L), "basepoint-free M = M(x^2=1)")
    bad = None
    for name, gg, other in (("g+", gp, gm), ("g-", gm, gp)):
        lhs = Mx.delta(gg)
        rhs = TensorElement.of(gg, gg) + TensorElement.of(one - gg, one - other)
        if tensor_reduce(lhs - rhs, X, X, L) or Mx.epsilon(gg) != 1:
            bad = bad or name
    rep.check("D g(+-) = g(+-) (x) g(+-) + (1 - g(+-)) (x) (1 - g(-+)), e(g) = 1", bad is None, bad)
    # the basepoint description: Sb = 1 - g+, St = g- - 1 + g+
    sb, st = one - gp, gm - one + gp
    ok = (sx.in_ideal(sb * sb - sb) and sx.in_ideal((st + sb) ** 2 - st - sb)
          and not tensor_reduce(Mx.delta(sb) - TensorElement.of(one, sb)
                                - TensorElement.of(sb, st), X, X, L)
          and not tensor_reduce(Mx.delta(st) - TensorElement.of(st, st), X, X, L))
    rep.check("basepoint form: Sb^2 = Sb, (St + Sb)^2 = St + Sb, matrix coproduct", ok)
    return rep


# ---------------------------------------------------------------- calculus


def two_point_calculus(L=3, field=None):
    F = _field(field)
    bf = build_finite_set_M(2, F)
    return quotient_calculus_preserving(bf, CalculusSpec(2, [(1, 2)]), L)


def check_calculus(L=3, field=None):
    rep = Report("two-point calculus")
    F = _field(field)
    cal = two_point_calculus(L, F)
    B = cal.base
    rels = cal.extras["calculus_relations"]
    gp, gm = B.gen("tau1_1"), B.gen("tau2_2")
    one = NCPoly.constant(F, 1)
    want = (one - gp) * (one - gm)
    s = B.slice(L)
    rep.check("exactly one extra relation", len(rels) == 1, [B.poly_str(r) for r in rels])
    rep.check("it is (1 - g+)(1 - g-) = 0",
              len(rels) == 1 and s.in_ideal(rels[0])
              and build_finite_set_M(2, F).base.slice(L).in_ideal(rels[0] - want))
    # in the b, t generators of M(x^2 = 1): t^2 = t (1 + b)
    Mx = rootsof1_M(2, F)
    X = Mx.base
    bx, tx = X.gen("b"), X.gen("t")
    h = Fraction(1, 2)
    gpx, gmx = (one + bx + tx).scale(h), (one - bx + tx).scale(h)
    Y = X.copy()
    Y.add_relation(tx * tx - tx * (one + bx))
    pos_of = {}
    for pos, p in cal.matrix.items():
        (w, _), = p.terms.items()
        pos_of[w[0]] = pos
    golden = {(0, 0): gpx, (0, 1): one - gpx, (1, 0): one - gmx, (1, 1): gmx}
    f = [golden[pos_of[g.id]] for g in B.generators]
    g = [gp - gm, gp + gm - 1]
    rep.merge(check_isomorphism(B, Y, f, g, L), "equivalently t^2 = t(1 + b)")
    rep.merge(verify_bialgebra(cal, L))
    return rep


# ---------------------------------------------------------------- coinvariants


def two_point_bundle(field=None):
    """M of the two-point set in new generators p, q with pi onto M0 of the shifted basis."""
    F = _field(field)
    fs = finite_set_spec(2, F).transformed([[1, 0], [1, 1]], labels=["0", "1"])
    M = build_M(fs)
    PQ = reparametrize(M, [("p", 1, "p"), ("q", 1, "q")], ["q", "p-q"], ["b1+t1_1", "b1"])
    M0 = build_M0(fs).renamed({"t1_1": ("pbar", "pbar")})
    pi = [M0.gen("pbar"), NCPoly(F)]
    return PQ, pi, M0


def rootsof1_bundle(field=None):
    F = _field(field)
    x2 = cyclic_spec(2, F)
    M = build_M(x2).renamed({"b1": ("b", "b"), "t1_1": ("t", "t")})
    M0 = build_M0(x2).renamed({"t1_1": ("tbar", "tbar")})
    pi = [NCPoly(F), M0.gen("tbar")]
    return M, pi, M0


BUNDLES = {"two_point": two_point_bundle, "rootsof1:2": rootsof1_bundle}


def check_coinvariants(L=4, field=None):
    rep = Report("coinvariants")
    PQ, pi, M0 = two_point_bundle(field)
    co = coinvariants(PQ, pi, M0, L)
    names = [PQ.base.poly_str(p) for p in co]
    rep.check("two-point set: coinvariants are span{1, q}", names == ["1", "q"], names)
    rep.check("two-point set: closed under products", coinvariant_closure(PQ, co, L) is None)
    M, pi, M0 = rootsof1_bundle(field)
    co = coinvariants(M, pi, M0, L)
    t = M.base.gen_id("t")
    only_b = all(t not in w for p in co for w in p.terms)
    rep.check("x^2=1: coinvariants are polynomials in b", only_b and len(co) >= 2,
              [M.base.poly_str(p) for p in co])
    return rep


# ---------------------------------------------------------------- quantum plane


def check_qplane(q=None, D=2):
    rep = Report("quantum-braided plane")
    F = ScalarField.from_string("q")
    q = q if q is not None else F.q()
    F = q.field
    bp = build_M0_qplane(q, D)
    P = bp.base
    blk = degree_one_block(bp)
    low = {P.gen_id(n) for n in ("s_1_0", "t_1_0", "s_0_1", "t_0_1")}
    deg1 = [r for r in P.relations if all(set(w) <= low for w in r.terms)]
    a, b, c, d = blk["a"], blk["b"], blk["c"], blk["d"]
    golden = [d * c - c * d * q, b * a - a * b * q,
              a * d - d * a - b * c * q.inverse() + c * b * q]
    rep.check("degree-one relations {dc - q cd, ba - q ab, ad - da - q^-1 bc + q cb}",
              _same_span(P, deg1, golden), [P.poly_str(r) for r in deg1])
    return rep


def check_mq2(q=None, L=2):
    rep = Report("M_q(2) from the coaddition quotient")
    F = ScalarField.from_string("q")
    q = q if q is not None else F.q()
    M = build_Mq2(q)
    P = M.base
    S = standard_Mq2(q)
    rep.check("six standard relations", _same_span(P, P.relations,
                                                   [S.relations[i] for i in range(6)])
              and len(echelon(P.relations, P.key, P.field)) == 6,
              _relation_strings(P))
    dim = len(P.slice(2).basis)
    rep.check("weight <= 2 quotient has dimension 15 (ordered monomials)",
              dim == pbw_count(4, 2), dim)
    rep.merge(verify_coaction(M, M.spec, L))
    return rep


def pbw_count(ngens, L):
    """Ordered monomials of total degree <= L in ngens variables."""
    from math import comb
    return comb(ngens + L, L)


# ---------------------------------------------------------------- R-matrix examples


def anyon_M0R(q, N=3):
    """M0(R) of the anyonic line on t_a = t^a_1, with R(t_a, t_b) = R^a_1^b_1."""
    R = anyonic_R(q, N)
    F = q.field
    spec = nilpotent_spec(N, F)
    bp = build_M1R(R, spec, "M0")
    names = ["t"] if N == 2 else (["t", "s"] if N == 3 else ["t%d" % a for a in range(1, N)])
    new = Presentation(F)
    for a, x in enumerate(names):
        new.add_generator(x, a + 1)
    tg = [new.gen(x) for x in names]
    # t^i_j is the sum over compositions of i into j parts of t_n1 ... t_nj
    old_in_new = []
    for g in bp.generators:
        i, j = (int(x) for x in g.name[1:].split("_"))
        old_in_new.append(_composition_sum(F, tg, i, j))
    new_in_old = [bp.gen("t%d_1" % a) for a in range(1, N)]
    # t_a has degree a, as for the conformally braided line
    out = reparametrize(bp, [(x, a + 1, x) for a, x in enumerate(names)], old_in_new,
                        new_in_old, "M0(R)")
    out.base.relations = minimal_relations(out.base)
    out.extras["R"] = R
    out.extras["pairing"] = {(a - 1, b - 1): R.get(a, 1, b, 1)
                             for a in range(1, N) for b in range(1, N) if R.get(a, 1, b, 1)}
    out.extras["full"] = bp
    return out


def _composition_sum(F, tg, i, j):
    acc = NCPoly(F)

    def rec(left, parts, word):
        nonlocal acc
        if parts == 0:
            if left == 0:
                p = NCPoly.constant(F, 1)
                for a in word:
                    p = p * tg[a - 1]
                acc = acc + p
            return
        for a in range(1, min(left, len(tg)) + 1):
            rec(left - a, parts - 1, word + [a])

    rec(i, j, [])
    return acc


def check_r_layer(L=2):
    rep = Report("R-matrix layer")
    Fq = ScalarField.from_string("q")
    q = Fq.q()
    R = line_R(q, 4)
    spec = line_spec(Fq, 4)
    rep.check("braided line: QYBE", qybe_check(R).ok)
    rep.check("braided line: covariance", covariance_check(R, spec).ok)
    F3 = ScalarField.from_string("cyclotomic:3")
    z = F3.q()
    A = anyon_M0R(z, 3)
    P = A.base
    rep.check("anyon x^3=0: M0(R) relations are {ts - q st}",
              same_ideal(P, ["t*s - q*s*t"], 4), _relation_strings(P))
    rep.check("anyon x^3=0: coproduct D t = t (x) t, D s = s (x) t + t^2 (x) s",
              P.tensor_str(A.coproduct[0]) == "[t (x) t]"
              and not (A.coproduct[1] - TensorElement.of(P.gen("s"), P.gen("t"))
                       - TensorElement.of(P.gen("t") ** 2, P.gen("s"))))
    rep.merge(dualqt_verify(A, L, A.extras["pairing"]), "anyon")
    dq = DualQT(A, A.extras["pairing"])
    t, s = P.gen("t"), P.gen("s")
    ok = all(dq(t ** i, t ** j) == z ** (i * j) for i in range(1, 3) for j in range(1, 3))
    ok = ok and all(not dq(x, y) for x, y in ((s, t), (t, s), (s * t, t), (t, t * s)))
    rep.check("anyon: R(t^i, t^j) = q^(ij), zero on words containing s", ok)
    C = build_M0R_line(q, 3)
    Q = C.base
    t1, t2, t3 = Q.gen("t1"), Q.gen("t2"), Q.gen("t3")
    s = Q.slice(4)
    ok = (s.in_ideal(t1 * t2 - t2 * t1 * q) and s.in_ideal(t1 * t3 - t3 * t1 * q ** 2)
          and s.in_ideal(t1 * t3 - t2 * t2 * q))
    rep.check("conformal line: t1 t2 = q t2 t1, t1 t3 = q^2 t3 t1 = q t2^2", ok)
    want = (TensorElement.of(t3, t1) + TensorElement.of(t2 * t1, t2).scale(1 + q)
            + TensorElement.of(t1 ** 3, t3))
    rep.check("conformal line: D t3 = t3 (x) t1 + (1+q) t2 t1 (x) t2 + t1^3 (x) t3",
              not tensor_reduce(C.delta(t3) - want, Q, Q, 4))
    return rep


def check_braided(L=3):
    rep = Report("braided layer")
    Fr = ScalarField.from_string("rational")
    for spec in (fermion_spec(Fr), cyclic_spec(2, Fr), finite_set_spec(2, Fr)):
        K = RMatrix.kronecker(Fr, spec.dim)
        U = build_braided_M1(K, spec)
        B = build_M1(spec)
        same = ([U.base.poly_str(r).replace("u", "t") for r in U.base.canonical_relations()]
                == _relation_strings(B.base))
        rep.check("Kronecker R on %s: same canonical relations as M1" % (spec.name or "spec"),
                  same)
    Fq = ScalarField.from_string("q")
    q = Fq.q()
    D = 3
    R = line_R(q, D)
    spec = line_spec(Fq, D)
    rep.merge(check_braided_line(q, D), "braided line")
    U0 = build_braided_M1(R, spec, "M0")
    rep.merge(verify_braided_bialgebra(U0, L), "braided line M0")
    F3 = ScalarField.from_string("cyclotomic:3")
    for name, R_, spec_ in (("Kronecker", RMatrix.kronecker(Fr, 2), cyclic_spec(2, Fr)),
                            ("braided line", R, spec),
                            ("anyon", anyonic_R(F3.q(), 3), nilpotent_spec(3, F3))):
        rep.merge(transmute_check(R_, spec_, 2), "transmute %s" % name)
    return rep


def braided_line_relation_family(U, q, D):
    """u^k_{i+j} - sum_{a+b=k} u^a_i u^b_j q^((i-a) b) for i, j >= 1, i + j <= D."""
    T = U.matrix
    F = q.field
    out = []
    for i in range(1, D + 1):
        for j in range(1, D + 1 - i):
            for k in range(D + 1):
                r = T[(k, i + j)]
                for a in range(k + 1):
                    r = r - (T[(a, i)] * T[(k - a, j)]).scale(q ** ((i - a) * (k - a)))
                if r:
                    out.append(r)
    return out


def check_braided_line(q, D=3):
    rep = Report("braided line")
    R = line_R(q, D)
    spec = line_spec(q.field, D)
    U = build_braided_M1(R, spec, "M")
    P = U.base
    fam = braided_line_relation_family(U, q, D)
    rep.check("relations u^k_(i+j) = sum u^a_i u^b_j q^((i-a)b)",
              _same_span(P, [r for r in P.relations if r], fam))
    psi = U.braiding
    bad = None
    for i in range(D + 1):
        for j in range(D + 1):
            g = P.gen_id("u%d_1" % i)
            h = P.gen_id("u%d_1" % j)
            want = TensorElement.of(P.gen("u%d_1" % j), P.gen("u%d_1" % i)).scale(
                q ** ((i - 1) * (j - 1)))
            if psi.rule(g, h) != want:
                bad = bad or (i, j)
    rep.check("Psi(u_i (x) u_j) = u_j (x) u_i q^((i-1)(j-1))", bad is None, bad)
    M1 = build_braided_M1(R, spec, "M1")
    readings = {}
    for reading in ("consistent", "upper_i", "upper_j"):
        ok, w = line_family_holds(q, D, M1, line_derived(q, D, M1, reading))
        readings[reading] = ok if ok else w
    rep.check("derived u^i_j with exponent sum_{s<r} (1 - a_s) a_r satisfies the family",
              readings["consistent"] is True, readings)
    rep.data["derived-table readings"] = readings
    return rep


def check_classical_transmuted_line(D=3, L=3):
    """At q = 1 the transmuted braided-line M0 is M0 of the line made commutative."""
    from .braided import build_transmuted
    F = ScalarField.from_string("rational")
    R = line_R(F.one(), D)
    spec = line_spec(F, D)
    U = build_transmuted(R, spec, "M0")
    P = U.base
    B = build_braided_M1(R, spec, "M0")
    u = [P.gen("u%d_1" % a) for a in range(1, D + 1)]
    comm = [u[a] * u[b] - u[b] * u[a] for a in range(D) for b in range(a + 1, D)
            if a + b + 2 <= D]
    rep = Report("q = 1 transmuted line")
    rep.check("ideal = M0 relations + commutators of u_a = u^a_1",
              same_ideal(P, list(B.base.relations) + comm, L))
    return rep


# ---------------------------------------------------------------- registry


class PresetResult:
    def __init__(self, name, bp, report, lines=None):
        self.name = name
        self.bp = bp
        self.report = report
        self.lines = list(lines or [])


def parse_preset(text):
    name, _, arg = text.partition(":")
    if name not in PRESETS:
        raise KeyError("unknown preset %r" % (text,))
    return name, (int(arg) if arg else None)


def _q_of(field):
    if field.kind == field.RATIONAL:
        raise ValueError("this preset needs q: use --field q, --field cyclotomic:N or --q")
    return field.q()


def _standard(name, spec, variant, L, verify, oracle, golden=None):
    bp = build(spec, variant)
    rep = Report("preset %s" % name)
    if golden is not None:
        rep.merge(golden())
    if verify:
        rep.merge(verify_bialgebra(bp, L))
        rep.merge(verify_coaction(bp, spec, L))
    if oracle:
        rank, match = universal_check(spec, bp.variant, L)
        rep.check("oracle ideal slice matches (rank %d)" % rank, match, rank)
    return bp, rep


def _p_fermion(arg, variant, L, D, field, q, verify, oracle, **kw):
    F = _field(field, "q")
    spec = fermion_spec(F)
    v = parse_variant(variant or "M")
    bp, rep = _standard("fermion", spec, v, L, verify, oracle)
    if v == "M":
        bp2 = fermion_M(F)
        rep.check("relations are {b^2, bt + tb}", _same_span(
            bp2.base, bp2.relations, [bp2.parse("b^2"), bp2.parse("b*t + t*b")]))
        bp = bp2
    elif v == "M0":
        bp = fermion_M0(F)
        rep.check("one generator, no relations", not any(bp.relations))
    return bp, rep


def _p_rootsof1(arg, variant, L, D, field, q, verify, oracle, **kw):
    N = arg or 2
    F = _field(field, "q")
    spec = cyclic_spec(N, F)
    v = parse_variant(variant or "M")
    bp, rep = _standard("rootsof1:%d" % N, spec, v, L, verify, oracle)
    if v == "M" and N in (2, 3):
        bp = rootsof1_M(N, F)
    if N == 2 and v == "M":
        P = bp.base
        s = P.slice(2)
        rep.check("(b+t)^2 = 1 and (b-t)^2 = 1",
                  s.in_ideal(P.parse("(b+t)^2-1")) and s.in_ideal(P.parse("(b-t)^2-1")))
    if N == 3 and v == "M0":
        G = cube_roots_M0_golden(F)
        t, s = G.gen("t"), G.gen("s")
        img = {"t1_1": t, "t2_1": s, "t1_2": s * s, "t2_2": t * t}
        f = [img[g.name] for g in bp.generators]
        g = [bp.gen("t1_1"), bp.gen("t2_1")]
        rep.merge(check_isomorphism(bp.base, G, f, g, max(L, 4)),
                  "<t,s | ts+st, t^3+s^3-1, t^2 s, t s^2>")
    return bp, rep


def _p_anyon(arg, variant, L, D, field, q, verify, oracle, **kw):
    N = arg or 3
    F = _field(field, "cyclotomic:%d" % N)
    if F.kind != F.CYCLOTOMIC or F.N != N:
        raise ValueError("preset anyon:%d requires --field cyclotomic:%d" % (N, N))
    spec = nilpotent_spec(N, F)
    v = parse_variant(variant or "M0")
    rep = Report("preset anyon:%d" % N)
    R = anyonic_R(F.q(), N)
    rep.merge(qybe_check(R))
    rep.merge(covariance_check(R, spec))
    if v == "M0":
        bp = anyon_M0R(F.q(), N)
        rep.merge(dualqt_verify(bp, min(L, 2), bp.extras["pairing"]))
        if verify:
            rep.merge(verify_bialgebra(bp, L))
    else:
        bp = build_M1R(R, spec, v)
        if verify:
            rep.merge(verify_bialgebra(bp, L))
        rep.merge(dualqt_verify(bp, min(L, 2)))
    return bp, rep


def _p_finiteset(arg, variant, L, D, field, q, verify, oracle, **kw):
    n = arg or 2
    F = _field(field, "q")
    spec = finite_set_spec(n, F)
    v = parse_variant(variant or "M1")
    if v == "M1":
        bp, rep = _standard("finiteset:%d" % n, spec, v, L, verify, oracle)
        rep.check("relations are the projector rows", _same_span(
            bp.base, bp.relations, relset_relations(bp.base, bp.matrix, n)))
        return bp, rep
    if v == "M":
        bp = build_finite_set_M(n, F)
        rep = Report("preset finiteset:%d" % n)
        if verify:
            rep.merge(verify_bialgebra(bp, L))
        return bp, rep
    raise ValueError("finite sets have no natural splitting; use --variant m1 or m")


def _p_line(arg, variant, L, D, field, q, verify, oracle, **kw):
    D = D or arg or 4
    F = _field(field, "q")
    bp = build_M0_line(D, F)
    rep = Report("preset line:%d" % D)
    rep.check("free algebra", not any(bp.relations))
    if verify:
        rep.merge(verify_bialgebra(bp, L))
        rep.merge(verify_coaction(bp, bp.spec, L))
    return bp, rep


def _p_qplane(arg, variant, L, D, field, q, verify, oracle, derive_mq2=False, **kw):
    D = D or arg or 2
    F = _field(field, "q")
    q = q if q is not None else _q_of(F)
    v = parse_variant(variant or "M0")
    from .graded import _qplane
    if derive_mq2:
        bp = build_Mq2(q)
        rep = Report("preset qplane: M_q(2)")
        S = standard_Mq2(q)
        rep.check("the six relations of M_q(2)",
                  _same_span(bp.base, bp.relations, list(S.relations)))
        if verify:
            rep.merge(verify_coaction(bp, bp.spec, 2))
        return bp, rep
    bp = _qplane(q, D, v)
    rep = Report("preset qplane:%d" % D)
    if verify:
        rep.merge(verify_bialgebra(bp, L))
        rep.merge(verify_coaction(bp, bp.spec, L))
    return bp, rep


def _p_braided_line(arg, variant, L, D, field, q, verify, oracle, **kw):
    D = D or arg or 3
    F = _field(field, "q")
    q = q if q is not None else _q_of(F)
    v = parse_variant(variant or "M0")
    R = line_R(q, D)
    spec = line_spec(F, D)
    bp = build_braided_M1(R, spec, v)
    rep = Report("preset braided_line:%d" % D)
    rep.merge(check_braided_line(q, D))
    if verify:
        rep.merge(verify_braided_bialgebra(bp, L))
    return bp, rep


def _p_conformal_line(arg, variant, L, D, field, q, verify, oracle, **kw):
    D = D or arg or 3
    F = _field(field, "q")
    q = q if q is not None else _q_of(F)
    bp = build_M0R_line(q, D)
    rep = Report("preset conformal_line:%d" % D)
    rep.merge(qybe_check(bp.extras["R"]))
    rep.merge(dualqt_verify(bp, min(L, 2)))
    if verify:
        rep.merge(verify_bialgebra(bp, L))
    return bp, rep


PRESETS = {
    "fermion": _p_fermion,
    "anyon": _p_anyon,
    "rootsof1": _p_rootsof1,
    "finiteset": _p_finiteset,
    "line": _p_line,
    "qplane": _p_qplane,
    "braided_line": _p_braided_line,
    "conformal_line": _p_conformal_line,
}


def run_preset(text, variant=None, L=3, D=None, field=None, q=None, verify=False, oracle=False,
               derive_mq2=False):
    name, arg = parse_preset(text)
    bp, rep = PRESETS[name](arg, variant, L, D, field, q, verify, oracle, derive_mq2=derive_mq2)
    return PresetResult(text, bp, rep)


# R-matrices by name, for check-r


def r_preset(text, D=None, field=None, q=None):
    name, _, arg = text.partition(":")
    arg = int(arg) if arg else None
    if name == "kronecker":
        F = _field(field, "rational")
        return RMatrix.kronecker(F, arg or 2), None
    if name == "anyon":
        N = arg or 3
        F = _field(field, "cyclotomic:%d" % N)
        if F.kind != F.CYCLOTOMIC or F.N != N:
            raise ValueError("anyon:%d requires --field cyclotomic:%d" % (N, N))
        return anyonic_R(F.q(), N), nilpotent_spec(N, F)
    F = _field(field, "q")
    q = q if q is not None else _q_of(F)
    D = D or arg
    if name == "braided_line":
        D = D or 3
        return line_R(q, D), line_spec(F, D)
    if name == "conformal_line":
        D = D or 3
        return line_R(q, D, "conformal"), line_spec(F, D)
    if name == "qplane":
        from .graded import qplane_spec
        D = D or 2
        return qplane_braiding(q, D), qplane_spec(q, D)
    raise KeyError("unknown R preset %r" % (text,))


# grouped rendering of relations such as (b+t)^2 = 1


def power_groupings(pres, L=None):
    """Identities l^k = c with l in {g, g + h, g - h}, k in {2, 3}, c in {0, 1, l}.

    Returns the identity strings when they generate the same ideal at weight
    L, else None.
    """
    F = pres.field
    gens = pres.generators
    if not gens or not pres.relations:
        return None
    L = L or max(3, max(pres.poly_weight(r) for r in pres.relations))
    s = pres.slice(L)
    one = NCPoly.constant(F, 1)
    cands = []
    for g in gens:
        cands.append((g.display, pres.gen(g.name)))
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            x, y = pres.gen(gens[a].name), pres.gen(gens[b].name)
            cands.append(("(%s+%s)" % (gens[a].display, gens[b].display), x + y))
            cands.append(("(%s-%s)" % (gens[a].display, gens[b].display), x - y))
    found = []
    polys = []
    for label, ell in cands:
        for k in (2, 3):
            pw = ell ** k
            if pres.poly_weight(pw) > L:
                continue
            for cname, c in (("0", NCPoly(F)), ("1", one), (label, ell)):
                if s.in_ideal(pw - c):
                    found.append("%s^%d = %s" % (label, k, cname))
                    polys.append(pw - c)
                    break
            else:
                continue
            break
    if not polys:
        return None
    G = Presentation(F)
    for g in gens:
        G.add_generator(g.name, g.weight, g.display)
    for p in polys:
        G.add_relation(p)
    ident = [NCPoly.word(F, (g.id,)) for g in gens]
    from .ncalg import relations_map_into
    if relations_map_into(pres, G, ident, L) is not None:
        return None
    return found
