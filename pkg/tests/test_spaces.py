import json
import random
from fractions import Fraction

import pytest

import maxlab as ml
from maxlab.sampling import random_space


def test_one_point_space_validates(one_point):
    report = ml.validate_metric(one_point)
    assert report.ok
    assert report.violations == ()
    assert ml.total_measure(one_point) == 1
    assert ml.diameter(one_point) == 0


def test_basic_s_validates(s_232):
    assert ml.validate_metric(s_232).ok


def test_triangle_violation_reported():
    space = ml.make_space(
        ["a", "b", "c"],
        [[0, 3, 1], [3, 0, 1], [1, 1, 0]],
        [1, 1, 1],
    )
    report = ml.validate_metric(space)
    assert not report.ok
    kinds = {v.kind for v in report.violations}
    assert "triangle" in kinds
    witness = next(v for v in report.violations if v.kind == "triangle")
    assert witness.where == (0, 2, 1)


def test_asymmetry_and_weight_violations():
    space = ml.make_space(["a", "b"], [[0, 1], [2, 0]], [1, -1])
    report = ml.validate_metric(space)
    kinds = {v.kind for v in report.violations}
    assert "asymmetry" in kinds and "nonpositive-weight" in kinds


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        ml.make_space(["a", "b"], [[0, 1], [1, 0]], [1])


def test_total_measure_examples(s_232):
    assert ml.total_measure(s_232) == 5
    # 1 + 2*(1/2) + 2*3
    assert ml.total_measure(ml.basic_t(2, 2, 3)) == 8
    single = ml.single_point(weight=Fraction(7, 3))
    assert ml.total_measure(single) == Fraction(7, 3)


def test_diameter_examples(s_232):
    assert ml.diameter(s_232) == Fraction(3, 2)
    glued = ml.glue([ml.basic_s(2, Fraction(3, 2), 2), ml.basic_t(1, 2, 3)], 2)
    assert ml.diameter(glued) == 3


def test_scaling_identity_and_arithmetic(s_232):
    same = ml.scale_metric(s_232, 1)
    assert same.dist == s_232.dist
    scaled = ml.scale_metric(s_232, Fraction(2, 3))
    assert ml.diameter(scaled) == 1
    lighter = ml.scale_measure(s_232, Fraction(1, 5))
    assert ml.total_measure(lighter) == 1


def test_scaling_commutes_and_composes():
    rng = random.Random(3)
    for _ in range(10):
        space = random_space(rng)
        a, b = Fraction(2, 3), Fraction(5, 4)
        one = ml.scale_metric(ml.scale_measure(space, a), b)
        other = ml.scale_measure(ml.scale_metric(space, b), a)
        assert one.dist == other.dist and one.weight == other.weight
        twice = ml.scale_metric(ml.scale_metric(space, a), b)
        once = ml.scale_metric(space, a * b)
        assert twice.dist == once.dist
        assert ml.total_measure(ml.scale_measure(space, a)) == a * ml.total_measure(space)
        assert ml.validate_metric(one).ok == ml.validate_metric(space).ok


def test_json_round_trip_is_bit_exact(s_232):
    text = s_232.to_json()
    back = ml.MetricMeasureSpace.from_json(text)
    assert back.points == s_232.points
    assert back.dist == s_232.dist
    assert back.weight == s_232.weight
    assert back.provenance == s_232.provenance
    # Strings in the payload are exact "p/q" forms.
    payload = json.loads(text)
    assert payload["dist"][1][2] == "3/2"
    assert payload["weight"][0] == "1/1"


def test_descriptor_round_trip(s_232):
    desc = s_232.descriptor()
    rebuilt = ml.build_space(desc)
    assert rebuilt.points == s_232.points
    assert rebuilt.dist == s_232.dist
    assert rebuilt.weight == s_232.weight


def test_subspace_extracts_block(s_232):
    sub = s_232.subspace([0, 2])
    assert sub.points == ("x_0", "x_2")
    assert sub.dist[0][1] == 1
    assert sub.weight == (Fraction(1), Fraction(2))
