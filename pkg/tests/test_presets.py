import pytest

from comeasuring import presets
from comeasuring.comeasure import build, finite_set_spec
from comeasuring.presets import (check_braided, check_calculus, check_classical_transmuted_line,
                                 check_coinvariants, check_fermion, check_finite_sets,
                                 check_r_layer, check_rootsof1, cyclic_spec, fermion_spec,
                                 parse_preset, power_groupings, run_preset)
from comeasuring.scalars import ScalarField

QQ = ScalarField.from_string("rational")


@pytest.mark.parametrize("check", [check_fermion, check_rootsof1, check_finite_sets,
                                   check_calculus, check_coinvariants],
                         ids=lambda f: f.__name__)
def test_worked_examples(check):
    rep = check()
    assert rep.ok, rep.failures()


def test_r_layer_and_braided():
    assert check_r_layer(2).ok
    assert check_braided(3).ok
    assert check_classical_transmuted_line(3, 3).ok


def test_power_groupings_x2_is_1():
    bp = presets.rootsof1_M(2, QQ)
    found = power_groupings(bp.base)
    assert found is not None
    assert "(b+t)^2 = 1" in found and "(b-t)^2 = 1" in found


def test_power_groupings_declines_when_not_spanning():
    # b^2 = 0 holds but bt + tb = 0 is not a power identity
    assert power_groupings(presets.fermion_M(QQ).base) is None
    assert power_groupings(build(cyclic_spec(2, QQ), "M1").base) is None


def test_parse_preset():
    assert parse_preset("fermion") == ("fermion", None)
    assert parse_preset("finiteset:3") == ("finiteset", 3)
    with pytest.raises(KeyError):
        parse_preset("nonsense")


@pytest.mark.parametrize("text,variant", [("fermion", "m"), ("fermion", "m0"),
                                          ("rootsof1:2", "m"), ("rootsof1:3", "m0"),
                                          ("finiteset:2", "m1"), ("line:3", None),
                                          ("anyon:3", None), ("braided_line:2", None),
                                          ("conformal_line:3", None), ("qplane:2", None)])
def test_run_preset(text, variant):
    res = run_preset(text, variant=variant, L=2, verify=True)
    assert res.report.ok, res.report.failures()
    assert res.bp is not None


def test_preset_field_requirements():
    with pytest.raises(ValueError):
        run_preset("anyon:3", field="rational")
    with pytest.raises(ValueError):
        run_preset("qplane", field="rational")
    with pytest.raises(ValueError):
        run_preset("finiteset:2", variant="m0")


def test_finite_set_M1_blocks():
    bp = build(finite_set_spec(3, QQ), "M1")
    assert len(bp.relations) == 27
    assert fermion_spec(QQ).dim == 2
