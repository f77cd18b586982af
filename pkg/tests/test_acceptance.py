"""One test per acceptance criterion, each with its runtime bound.

Every test records a PASS/FAIL line; conftest prints them at the end of
the run so the log reads as a checklist.
"""

import os
import subprocess
import sys
import time
from fractions import Fraction

from comeasuring.comeasure import build, universal_check
from comeasuring.graded import build_Mq2
from comeasuring.ncalg import Presentation
from comeasuring.presets import (check_braided, check_calculus, check_coinvariants,
                                 check_fermion, check_finite_sets, check_mq2, check_qplane,
                                 check_r_layer, check_rootsof1, fermion_spec)
from comeasuring.rmat import mq2_surjection_check
from comeasuring.scalars import ScalarField

import oracle

CRITERIA_LINES = []

QQ = ScalarField.from_string("rational")
Fq = ScalarField.from_string("q")


def _criterion(n, bound, fn):
    start = time.perf_counter()
    ok, detail = fn()
    took = time.perf_counter() - start
    fast = bound is None or took < bound
    verdict = "PASS" if ok and fast else "FAIL"
    limit = "" if bound is None else " (bound %gs)" % bound
    line = "criterion %d: %s in %.2fs%s" % (n, verdict, took, limit)
    CRITERIA_LINES.append(line)
    print(line)
    assert ok, detail
    assert fast, "criterion %d took %.2fs, bound %gs" % (n, took, bound)


def _report(rep):
    return rep.ok, rep.failures()


def _fermion_oracle():
    # an independent brute-force route on the raw structure constants
    spec = fermion_spec(QQ)
    bp = build(spec, "M")
    _, ngen, rels = oracle.comeasuring_relations(oracle.dense(spec), 2, 0, "M")
    rank, nwords = oracle.ideal_rank([1] * ngen, rels, 2)
    s = bp.base.slice(2)
    return (s.rank, len(s.basis)) == (rank, nwords - rank) == (2, 5)


def test_criterion_1_fermion():
    def run():
        rep = check_fermion(3, QQ)
        ok = rep.ok and _fermion_oracle()
        return ok, rep.failures()
    _criterion(1, 1.0, run)


def test_criterion_2_roots_of_unity():
    _criterion(2, 5.0, lambda: _report(check_rootsof1(3, QQ)))


def test_criterion_3_finite_sets():
    _criterion(3, 5.0, lambda: _report(check_finite_sets(3, QQ)))


def test_criterion_4_calculus_quotient():
    _criterion(4, 2.0, lambda: _report(check_calculus(3, QQ)))


def test_criterion_5_quantum_plane():
    _criterion(5, 10.0, lambda: _report(check_qplane(Fq.q(), 2)))


def _mq2_at_two():
    # brute force over QQ with q = 2: the quotient slice still has dimension 15
    P = Presentation(QQ, ["a", "b", "c", "d"])
    for r in ["b*a - 2*a*b", "c*a - 2*a*c", "d*b - 2*b*d", "d*c - 2*c*d", "c*b - b*c",
              "a*d - d*a - (1/2 - 2)*b*c"]:
        P.add_relation(r)
    rels = [{w: Fraction(str(c)) for w, c in r.terms.items()} for r in P.relations]
    rank, n = oracle.ideal_rank([1] * 4, rels, 2)
    return n - rank == 15 == oracle.pbw_count(4, 2)


def test_criterion_6_mq2_derivation():
    def run():
        q = Fq.q()
        rep = check_mq2(q, 2)
        dim = len(build_Mq2(q).base.slice(2).basis)
        return rep.ok and dim == 15 and _mq2_at_two(), (rep.failures(), dim)
    _criterion(6, 30.0, run)


def test_criterion_7_coinvariants():
    _criterion(7, 5.0, lambda: _report(check_coinvariants(4, QQ)))


def test_criterion_8_r_layer():
    _criterion(8, 60.0, lambda: _report(check_r_layer(2)))


def test_criterion_9_braided_qplane():
    _criterion(9, 60.0, lambda: _report(mq2_surjection_check(Fq.q(), 2)))


def test_criterion_10_braided_layer():
    _criterion(10, 120.0, lambda: _report(check_braided(3)))


PROPERTY_SUITES = [
    "tests/test_scalars.py::test_field_axioms",
    "tests/test_scalars.py::test_pascal_identity",
    "tests/test_graded.py::test_q_convolve_associative_exhaustive",
    "tests/test_ncalg.py::test_determinism",
    "tests/test_ncalg.py::test_reduce_idempotent_and_linear",
    "tests/test_graded.py::test_qplane_truncation_coherence",
    "tests/test_graded.py::test_line_truncation_coherence",
    "tests/test_comeasure.py::test_every_build_is_a_bialgebra",
]


def test_criterion_11_property_suites():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

    def run():
        proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider"]
                              + PROPERTY_SUITES, cwd=root, capture_output=True, text=True)
        return proc.returncode == 0, proc.stdout[-2000:]
    _criterion(11, None, run)
