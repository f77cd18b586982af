import json

import pytest

from comeasuring.braided import (BraidedPresentation, BraidingTensor, braided_tensor_mul,
                                 build_braided_M1, build_transmuted, line_derived,
                                 line_family_holds, preserves_splitting, transmute_check,
                                 verify_braided_bialgebra)
from comeasuring.comeasure import build, build_M1, verify_bialgebra
from comeasuring.graded import line_spec
from comeasuring.ncalg import NCPoly, Presentation, TensorElement
from comeasuring.presets import (check_braided_line, check_classical_transmuted_line,
                                 cyclic_spec, fermion_spec, nilpotent_spec)
from comeasuring.comeasure import finite_set_spec
from comeasuring.rmat import RMatrix, anyonic_R, line_R, super_sign_R
from comeasuring.scalars import ScalarField

QQ = ScalarField.from_string("rational")
F3 = ScalarField.from_string("cyclotomic:3")


def _two_gens(F, c):
    """Psi(x (x) y) = c y (x) x on every generator pair."""
    P = Presentation(F, ["x", "y"])
    rules = {(g, h): TensorElement._raw(F, {((h,), (g,)): F.from_rational(c) if g != h
                                            else F.one()})
             for g in range(2) for h in range(2)}
    return P, BraidingTensor(F, rules)


def test_braided_tensor_mul_examples():
    P, psi = _two_gens(QQ, -1)
    x, y = P.gen("x"), P.gen("y")
    one = NCPoly.constant(QQ, 1)
    # (1 (x) x)(y (x) 1) = Psi(x (x) y) = -y (x) x
    got = braided_tensor_mul(TensorElement.of(one, x), TensorElement.of(y, one), psi)
    assert got == TensorElement.of(y, x).scale(-1)
    # the plain flip gives the ordinary tensor product algebra
    flip = BraidingTensor.flip(QQ, 2)
    got = braided_tensor_mul(TensorElement.of(x, y), TensorElement.of(y, x), flip)
    assert got == TensorElement.of(x * y, y * x)


def test_braided_tensor_mul_associative():
    P, psi = _two_gens(QQ, 3)
    x, y = P.gen("x"), P.gen("y")
    one = NCPoly.constant(QQ, 1)
    elems = [TensorElement.of(x, y), TensorElement.of(one, x) + TensorElement.of(y, one),
             TensorElement.of(x * y, x)]
    for a in elems:
        for b in elems:
            for c in elems:
                left = braided_tensor_mul(braided_tensor_mul(a, b, psi), c, psi)
                right = braided_tensor_mul(a, braided_tensor_mul(b, c, psi), psi)
                assert left == right


def test_braiding_routes_agree_on_words():
    P, psi = _two_gens(QQ, 2)
    words = [(0,), (1,), (0, 1), (1, 1, 0), (0, 0, 1)]
    for w1 in words:
        for w2 in words:
            assert psi.words(w1, w2, "left") == psi.words(w1, w2, "right")


@pytest.mark.parametrize("spec", [fermion_spec(QQ), cyclic_spec(2, QQ), cyclic_spec(3, QQ),
                                  finite_set_spec(2, QQ)], ids=lambda s: s.name)
def test_kronecker_equals_M1(spec):
    U = build_braided_M1(RMatrix.kronecker(QQ, spec.dim), spec)
    B = build_M1(spec)
    mine = [U.base.poly_str(r).replace("u", "t") for r in U.base.canonical_relations()]
    theirs = [B.base.poly_str(r) for r in B.base.canonical_relations()]
    assert mine == theirs
    assert verify_braided_bialgebra(U, 2).ok


def test_braided_line_relations_and_psi(q):
    assert check_braided_line(q, 3).ok


def test_braided_line_psi_values(q):
    U = build_braided_M1(line_R(q, 2), line_spec(q.field, 2), "M")
    P = U.base
    u1, u2 = P.gen("u1_1"), P.gen("u2_1")
    g, h = P.gen_id("u1_1"), P.gen_id("u2_1")
    assert U.braiding.rule(g, h) == TensorElement.of(u2, u1)
    assert U.braiding.rule(h, h) == TensorElement.of(u2, u2).scale(q)
    assert U.braiding.rule(P.gen_id("u0_1"), h) == TensorElement.of(u2, P.gen("u0_1")).scale(q ** -1)


def test_line_derived_readings(q):
    U = build_braided_M1(line_R(q, 3), line_spec(q.field, 3), "M1")
    ok, _ = line_family_holds(q, 3, U, line_derived(q, 3, U, "consistent"))
    assert ok
    for reading in ("upper_i", "upper_j"):
        ok, witness = line_family_holds(q, 3, U, line_derived(q, 3, U, reading))
        assert not ok and witness is not None


def test_verify_braided_line(q):
    U = build_braided_M1(line_R(q, 3), line_spec(q.field, 3), "M0")
    rep = verify_braided_bialgebra(U, 3)
    assert rep.ok
    assert "coproduct" not in rep.data


@pytest.mark.parametrize("variant", ["M1", "M"])
def test_braided_line_unit_row_is_formal(q, variant):
    # the unit row of a truncated algebra has an infinite matrix coproduct
    U = build_braided_M1(line_R(q, 2), line_spec(q.field, 2), variant)
    assert U.formal
    rep = verify_braided_bialgebra(U, 2)
    assert rep.ok
    assert "skipped" in rep.data["coproduct"]


def test_verify_braided_super():
    U = build_braided_M1(super_sign_R(QQ, [0, 1]), fermion_spec(QQ), "M")
    assert verify_braided_bialgebra(U, 3).ok


def test_verify_braided_anyon_M1():
    q = F3.q()
    U = build_braided_M1(anyonic_R(q, 3), nilpotent_spec(3, F3), "M1")
    assert verify_braided_bialgebra(U, 2).ok


def test_anyon_has_no_braided_M0():
    q = F3.q()
    R = anyonic_R(q, 3)
    assert not preserves_splitting(R, 0)
    with pytest.raises(ValueError):
        build_braided_M1(R, nilpotent_spec(3, F3), "M0")


def test_perturbed_braiding_fails(q):
    U = build_braided_M1(line_R(q, 2), line_spec(q.field, 2), "M")
    P = U.base
    g, h = P.gen_id("u1_1"), P.gen_id("u2_1")
    broken = U.with_braiding(U.braiding.perturbed(g, h, q ** 2))
    rep = verify_braided_bialgebra(broken, 3, coaction=False)
    assert not rep.ok
    names = {c["name"] for c in rep.failures()}
    assert names & {"braid relation on generator triples", "Psi maps the ideal into the ideal",
                    "braided coproduct respects relations"}


@pytest.mark.parametrize("variant", ["M1", "M", "M0"])
def test_trivial_braiding_matches_ordinary_checks(variant):
    spec = cyclic_spec(2, QQ)
    U = build_braided_M1(RMatrix.kronecker(QQ, 2), spec, variant)
    assert verify_braided_bialgebra(U, 3).ok
    assert verify_bialgebra(build(spec, variant), 3).ok
    # with the flip the braided coproduct is the ordinary one
    P = U.base
    for g in P.generators:
        w = (g.id,)
        assert U.delta_word(w + w) == U.delta_word(w) * U.delta_word(w)


def test_braided_json_round_trip(q):
    U = build_braided_M1(line_R(q, 2), line_spec(q.field, 2), "M0")
    doc = json.loads(json.dumps(U.to_json()))
    back = BraidedPresentation.from_json(doc)
    assert back.to_json() == doc
    assert verify_braided_bialgebra(back, 2, coaction=False).ok


@pytest.mark.parametrize("name", ["kronecker", "braided_line", "anyon"])
def test_transmute_check(name, q):
    if name == "kronecker":
        R, spec = RMatrix.kronecker(QQ, 2), cyclic_spec(2, QQ)
    elif name == "braided_line":
        R, spec = line_R(q, 3), line_spec(q.field, 3)
    else:
        R, spec = anyonic_R(F3.q(), 3), nilpotent_spec(3, F3)
    rep = transmute_check(R, spec, 2)
    assert rep.ok, rep.failures()


def test_transmute_weight_bound():
    with pytest.raises(ValueError):
        transmute_check(RMatrix.kronecker(QQ, 2), cyclic_spec(2, QQ), 3)


def test_transmuted_line_classical():
    assert check_classical_transmuted_line(3, 3).ok


def test_transmuted_kronecker_is_commutative():
    U = build_transmuted(RMatrix.kronecker(QQ, 2), cyclic_spec(2, QQ))
    P = U.base
    s = P.slice(2)
    gens = [P.gen(g.name) for g in P.generators]
    for x in gens:
        for y in gens:
            assert s.in_ideal(x * y - y * x)
