"""Brute-force references that share no code with the package.

Polynomials are dicts {word tuple: Fraction}; ideal slices are ranks of the
span of u*r*v computed with sympy over QQ.
"""

from fractions import Fraction
from itertools import product

import sympy


def words(weights, L):
    """All words in generator indices with total weight <= L."""
    out = [()]
    frontier = [((), 0)]
    while frontier:
        nxt = []
        for w, wt in frontier:
            for g, x in enumerate(weights):
                if wt + x <= L:
                    nxt.append((w + (g,), wt + x))
        out.extend(w for w, _ in nxt)
        frontier = nxt
    return out


def weight(weights, w):
    return sum(weights[g] for g in w)


def pmul(p, r):
    out = {}
    for a, x in p.items():
        for b, y in r.items():
            out[a + b] = out.get(a + b, 0) + x * y
    return {w: c for w, c in out.items() if c}


def padd(p, r, s=1):
    out = dict(p)
    for w, c in r.items():
        out[w] = out.get(w, 0) + s * c
    return {w: c for w, c in out.items() if c}


def ideal_rank(weights, relations, L):
    """Rank of span{u r v} at weight <= L, and the number of words there."""
    ws = words(weights, L)
    col = {w: n for n, w in enumerate(ws)}
    rows = []
    for r in relations:
        if not r:
            continue
        wr = max(weight(weights, m) for m in r)
        for u in ws:
            for v in ws:
                if weight(weights, u) + wr + weight(weights, v) > L:
                    continue
                row = [0] * len(ws)
                for m, c in r.items():
                    row[col[u + m + v]] += sympy.Rational(c.numerator, c.denominator) \
                        if isinstance(c, Fraction) else c
                rows.append(row)
    if not rows:
        return 0, len(ws)
    return sympy.Matrix(rows).rank(), len(ws)


def in_span(weights, relations, p, L):
    r0, _ = ideal_rank(weights, relations, L)
    r1, _ = ideal_rank(weights, list(relations) + [p], L)
    return r0 == r1 and _fits(weights, p, L)


def _fits(weights, p, L):
    return all(weight(weights, w) <= L for w in p)


# ---------------------------------------------------------------- comeasuring relations from scratch


def comeasuring_relations(c, n, unit=None, variant="M1"):
    """Relations of the universal comeasuring, straight from beta(e_i) beta(e_j) = beta(e_i e_j).

    ``c[i][j][k]`` are Fractions. Generators are numbered in row-major order
    of the free matrix entries; returns (entry map, generator count, relations).
    """
    T = {}
    ngen = 0
    for a in range(n):
        for i in range(n):
            if variant != "M1" and i == unit:
                T[(a, i)] = {(): Fraction(1)} if a == unit else {}
            elif variant == "M0" and a == unit:
                T[(a, i)] = {}
            else:
                T[(a, i)] = {(ngen,): Fraction(1)}
                ngen += 1
    rels = []
    for i, j in product(range(n), repeat=2):
        for k in range(n):
            # coefficient of e_k in beta(e_i) beta(e_j) minus that in beta(e_i e_j)
            r = {}
            for a, b in product(range(n), repeat=2):
                if c[a][b][k]:
                    r = padd(r, pmul(T[(a, i)], T[(b, j)]), c[a][b][k])
            for m in range(n):
                if c[i][j][m]:
                    r = padd(r, T[(k, m)], -c[i][j][m])
            if r:
                rels.append(r)
    return T, ngen, rels


def dense(spec):
    n = spec.dim
    out = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for (i, j), row in spec.c.items():
        for k, v in row.items():
            out[i][j][k] = Fraction(str(v))
    return out


def pbw_count(ngens, L):
    """Ordered monomials of degree <= L, counted by listing them."""
    return sum(1 for e in product(range(L + 1), repeat=ngens) if sum(e) <= L)
