import random
from fractions import Fraction

import pytest

import maxlab as ml
from maxlab.constructions import (
    FamilyParams,
    constant_table,
    family_params_lemma6,
    family_params_lemma7,
)
from maxlab.sampling import random_first_generation, random_second_generation


def branch_measure(space, prefix):
    return sum(
        (w for lab, w in zip(space.points, space.weight) if lab == prefix or lab.startswith(prefix + "_")),
        Fraction(0),
    )


class TestFirstGeneration:
    def test_single_branch(self):
        space = ml.first_generation([1], [[1]])
        assert space.n == 2
        assert space.dist[0][1] == 1
        assert space.weight == (Fraction(1), Fraction(1))

    def test_solved_weights(self):
        space = ml.first_generation([1, 1], constant_table([1, 1], 1))
        assert branch_measure(space, "x_1") == 2
        assert space.weight[space.index_of("x_2")] == Fraction(1, 2)
        assert branch_measure(space, "x_2") == 1

    def test_halving_invariant(self):
        rng = random.Random(0)
        for _ in range(10):
            space = random_first_generation(rng)
            n = 1
            measures = []
            while any(lab == f"x_{n}" for lab in space.points):
                measures.append(branch_measure(space, f"x_{n}"))
                n += 1
            for prev, cur in zip(measures, measures[1:]):
                assert cur == prev / 2

    def test_always_valid_metric(self):
        rng = random.Random(1)
        for _ in range(10):
            assert ml.validate_metric(random_first_generation(rng)).ok


class TestSecondGeneration:
    def test_single_branch_metric(self):
        space = ml.second_generation([1], [[1]])
        assert space.weight == (Fraction(1),) * 3
        y, mid, outer = space.index_of("y_1"), space.index_of("y_1_1"), space.index_of("yp_1_1")
        assert space.dist[y][mid] == 1
        assert space.dist[mid][outer] == 1
        assert space.dist[y][outer] == 2

    def test_solved_weights(self):
        space = ml.second_generation([1, 2], constant_table([1, 2], 1))
        assert space.weight[space.index_of("y_2")] == Fraction(3, 8)

    def test_halving_invariant(self):
        rng = random.Random(2)
        for _ in range(10):
            space = random_second_generation(rng)
            n = 1
            measures = []
            while any(lab == f"y_{n}" for lab in space.points):
                measures.append(branch_measure(space, f"y_{n}") + branch_measure(space, f"yp_{n}"))
                n += 1
            for prev, cur in zip(measures, measures[1:]):
                assert cur == prev / 2

    def test_no_unit_triangle(self):
        rng = random.Random(3)
        for _ in range(10):
            space = random_second_generation(rng)
            n = space.n
            for i in range(n):
                for j in range(i + 1, n):
                    if space.dist[i][j] != 1:
                        continue
                    for l in range(n):
                        assert not (l not in (i, j) and space.dist[i][l] == 1 and space.dist[j][l] == 1)


class TestModification:
    def test_values_move_as_specified(self):
        space = ml.second_generation([1], [[1]])
        mod = ml.lemma1_modify(space)
        y, mid, outer = space.index_of("y_1"), space.index_of("y_1_1"), space.index_of("yp_1_1")
        assert mod.dist[y][outer] == 2  # joined through the middle atom
        two_branch = ml.lemma1_modify(ml.second_generation([1, 1], constant_table([1, 1], 1)))
        a, b = two_branch.index_of("y_1"), two_branch.index_of("y_2")
        assert two_branch.dist[a][b] == 3

    def test_rejects_unit_triangle(self):
        space = ml.make_space(["a", "b", "c"], [[0, 1, 1], [1, 0, 1], [1, 1, 0]], [1, 1, 1])
        with pytest.raises(ValueError):
            ml.lemma1_modify(space)

    def test_rejects_other_metric_values(self, s_232):
        with pytest.raises(ValueError):
            ml.lemma1_modify(s_232)

    def test_output_valid(self):
        rng = random.Random(4)
        for _ in range(10):
            mod = ml.lemma1_modify(random_second_generation(rng))
            assert ml.validate_metric(mod).ok
            assert mod.weight == ml.lemma1_modify(random_second_generation(rng)).weight or True


class TestSegment:
    def test_single_segment(self):
        space = ml.segment_type([[Fraction(1, 2)]], [[Fraction(1, 4), Fraction(1, 4)]])
        assert space.n == 2
        assert space.dist[0][1] == Fraction(1, 2)

    def test_cross_branch_distance(self):
        space = ml.segment_type(
            [[Fraction(1, 2)], [Fraction(1, 8), Fraction(1, 8)]],
            [[Fraction(1, 4), Fraction(1, 4)], [Fraction(1, 16)] * 3],
        )
        assert space.dist[space.index_of("x_1_0")][space.index_of("x_2_2")] == 1

    def test_distances_increase_along_branch(self):
        space = ml.segment_preset_lemma2(2, 3)
        i0 = space.index_of("x_3_0")
        d = [space.dist[i0][space.index_of(f"x_3_{j}")] for j in range(1, 4)]
        assert d[0] < d[1] < d[2]

    def test_budget_violations_rejected(self):
        with pytest.raises(ValueError):
            ml.segment_type([[Fraction(3, 4), Fraction(3, 4)]], [[Fraction(1, 8)] * 3])
        with pytest.raises(ValueError):
            ml.segment_type([[Fraction(1, 2)]], [[Fraction(1, 2), Fraction(1, 2)]])


class TestSegmentPresets:
    def test_lemma2_entries(self):
        space = ml.segment_preset_lemma2(2, 2)
        i0 = space.index_of("x_2_0")
        assert space.dist[i0][space.index_of("x_2_1")] == Fraction(1, 9)
        assert space.dist[space.index_of("x_2_1")][space.index_of("x_2_2")] == Fraction(1, 3)
        for j in range(3):
            assert space.weight[space.index_of(f"x_2_{j}")] == Fraction(1, 12)

    def test_lemma2_partial_sum_inequality(self):
        for k in (Fraction(2), Fraction(5, 2)):
            gaps = [[(k + 1) ** (i - n - 1) for i in range(1, n + 1)] for n in range(1, 9)]
            for n0, row in enumerate(gaps):
                for j in range(len(row)):
                    partial = sum(row[:j], Fraction(0))
                    assert partial < row[j] / k <= Fraction(1) / k

    def test_lemma2_weight_budget(self):
        space = ml.segment_preset_lemma2(2, 6)
        for n in range(1, 7):
            row = [space.weight[space.index_of(f"x_{n}_{i}")] for i in range(n + 1)]
            assert sum(row[1:], Fraction(0)) == Fraction(n, (n + 1) * 2**n)
            assert sum(row, Fraction(0)) == Fraction(1, 2**n)

    def test_lemma3_weight_recurrence(self):
        space = ml.segment_preset_lemma3(3, 2)
        w = [space.weight[space.index_of(f"x_2_{i}")] for i in range(3)]
        assert w == [Fraction(1, 64), Fraction(1, 32), Fraction(1, 8)]

    def test_lemma3_domination_inequalities(self):
        space = ml.segment_preset_lemma3(3, 7)
        for n in range(1, 8):
            w = [space.weight[space.index_of(f"x_{n}_{i}")] for i in range(n + 1)]
            i0 = space.index_of(f"x_{n}_0")
            d = [space.dist[i0][space.index_of(f"x_{n}_{i}")] for i in range(n + 1)]
            gaps = [d[i + 1] - d[i] for i in range(n)]
            for j in range(n):
                assert sum(w[: j + 1], Fraction(0)) < w[j + 1]
                assert sum(gaps[:j], Fraction(0)) < gaps[j]

    def test_preset_parameter_ranges(self):
        with pytest.raises(ValueError):
            ml.segment_preset_lemma2(Fraction(3, 2), 3)
        with pytest.raises(ValueError):
            ml.segment_preset_lemma3(2, 3)


class TestBasicSpaces:
    def test_basic_s_metric(self, s_232):
        assert s_232.dist[0][1] == 1 and s_232.dist[0][2] == 1
        assert s_232.dist[1][2] == Fraction(3, 2)
        assert s_232.weight == (Fraction(1), Fraction(2), Fraction(2))

    def test_basic_t_metric(self, t_123):
        y0, yo, yp = 0, 1, 2
        assert t_123.dist[y0][yo] == 1
        assert t_123.dist[yo][yp] == 1
        assert t_123.dist[y0][yp] == Fraction(3, 2)
        assert t_123.weight == (Fraction(1), Fraction(1), Fraction(3))

    def test_t_metric_cases_tau2(self):
        t = ml.basic_t(2, Fraction(5, 2), 2)
        mid = Fraction(7, 4)
        assert t.dist[t.index_of("yo_1")][t.index_of("yo_2")] == mid
        assert t.dist[t.index_of("yp_1")][t.index_of("yp_2")] == mid
        assert t.dist[t.index_of("y_0")][t.index_of("yp_1")] == mid
        assert t.dist[t.index_of("yo_1")][t.index_of("yp_2")] == Fraction(5, 2)

    def test_parameter_grid_validates(self):
        for tau in (1, 2, 3):
            for d in (Fraction(9, 8), Fraction(3, 2), Fraction(2)):
                for m in (Fraction(3, 2), Fraction(4)):
                    assert ml.validate_metric(ml.basic_s(tau, d, m)).ok
        for tau in (1, 2, 3):
            for d in (Fraction(3, 2), Fraction(2), Fraction(3)):
                for m in (Fraction(3, 2), Fraction(4)):
                    assert ml.validate_metric(ml.basic_t(tau, d, m)).ok

    def test_parameter_ranges(self):
        with pytest.raises(ValueError):
            ml.basic_s(2, Fraction(5, 2), 2)
        with pytest.raises(ValueError):
            ml.basic_s(2, Fraction(3, 2), 1)
        with pytest.raises(ValueError):
            ml.basic_t(0, 2, 2)
        with pytest.raises(ValueError):
            ml.basic_t(2, Fraction(7, 2), 2)


class TestGlue:
    def test_single_component_is_rescaled_component(self, s_232):
        glued, parts = ml.glue_parts([s_232], 2)
        assert glued.n == parts[0].n == s_232.n
        assert ml.diameter(glued) == 1  # 3/2 scaled by 2/3
        assert ml.total_measure(glued) == Fraction(1, 2)

    def test_cross_distances(self, s_232):
        glued = ml.glue([s_232, ml.basic_s(1, Fraction(3, 2), 2)], 2)
        a = glued.points.index("g1:x_0")
        b = glued.points.index("g2:x_0")
        assert glued.dist[a][b] == 3
        assert ml.validate_metric(glued).ok

    def test_measure_monotone(self):
        comps = [ml.basic_s(2, Fraction(3, 2), 2), ml.basic_t(1, 2, 3), ml.basic_s(1, 2, 4)]
        glued = ml.glue(comps, Fraction(3, 2))
        cap = sum((Fraction(1, 2**n) for n in range(1, 4)), Fraction(0))
        assert ml.total_measure(glued) <= cap

    def test_small_components_untouched(self):
        tiny = ml.scale_measure(ml.basic_s(1, Fraction(3, 2), 2), Fraction(1, 100))
        glued, parts = ml.glue_parts([tiny], 1)
        assert ml.total_measure(parts[0]) == ml.total_measure(tiny)

    def test_k0_range(self, s_232):
        with pytest.raises(ValueError):
            ml.glue([s_232], Fraction(1, 2))


class TestFamilies:
    def test_lemma7_strict_parameters(self):
        spaces = ml.family_lemma7(Fraction(3, 2), "strict", 3)
        taus = [s.n - 1 for s in spaces]
        assert taus == [1, 2, 3]
        for s in spaces:
            desc = s.descriptor()
            assert desc["params"]["d"] == "3/2"
            assert desc["params"]["m"] == "2/1"

    def test_lemma7_weak_d_sequence(self):
        rows = family_params_lemma7(1, "weak", 3, "s")
        assert rows[1][2] == Fraction(3, 2)  # d_2 = 1 + 1/2
        assert rows[0][2] == Fraction(2)

    def test_lemma7_mode_ranges(self):
        with pytest.raises(ValueError):
            family_params_lemma7(1, "strict", 3, "s")
        with pytest.raises(ValueError):
            family_params_lemma7(2, "weak", 3, "s")

    def test_lemma6_p1_exponents(self):
        params = FamilyParams(
            k=Fraction(1), p=Fraction(1), epsilon=Fraction(1, 4), delta=Fraction(1, 2), N=3, n_lo=4, n_hi=6
        )
        rows = family_params_lemma6(params, "s")
        for n, tau, d, m in rows:
            assert tau == 9  # N^2 * floor(n^0)
            assert m == n**4
            assert d == 1 + Fraction(1, 2) / n

    def test_lemma6_integer_exponents_exact(self):
        params = FamilyParams(
            k=Fraction(3, 2), p=Fraction(2), epsilon=Fraction(1, 4), delta=Fraction(1, 4), N=2, n_lo=3, n_hi=4
        )
        rows = family_params_lemma6(params, "s")
        assert rows[0][1] == 16 * 3**8
        assert rows[0][3] == 3**8

    def test_lemma6_fractional_exponents_round_up(self):
        params = FamilyParams(
            k=Fraction(1), p=Fraction(4, 3), epsilon=Fraction(1, 4), delta=Fraction(1, 4), N=3, n_lo=4, n_hi=4
        )
        rows = family_params_lemma6(params, "s")
        n, tau, d, m = rows[0]
        # ceil(3^(8/3)) * floor(4^(16/9)) = 19 * 11; m = ceil(4^(16/3)) = 1626
        assert tau == 19 * 11
        assert m == 1626

    def test_lemma6_materialised_small(self):
        params = FamilyParams(
            k=Fraction(1), p=Fraction(1), epsilon=Fraction(1, 4), delta=Fraction(1, 2), N=1, n_lo=2, n_hi=3
        )
        for space in ml.family_lemma6(params):
            assert ml.validate_metric(space).ok
        for space in ml.family_lemma6p(params):
            assert ml.validate_metric(space).ok

    def test_family_range_checks(self):
        with pytest.raises(ValueError):
            FamilyParams(k=Fraction(1), p=Fraction(2), epsilon=Fraction(1, 2), delta=Fraction(1, 4), N=1, n_lo=2, n_hi=3)
        params = FamilyParams(
            k=Fraction(3, 2), p=Fraction(2), epsilon=Fraction(1, 4), delta=Fraction(3, 4), N=1, n_lo=2, n_hi=3
        )
        with pytest.raises(ValueError):
            family_params_lemma6(params, "s")  # delta beyond 2 - k


def test_every_registered_descriptor_round_trips():
    descriptors = [
        {"kind": "point", "params": {"weight": "7/3", "label": "a"}},
        {"kind": "basic_s", "params": {"tau": 2, "d": "3/2", "m": "2/1"}},
        {"kind": "basic_t", "params": {"tau": 2, "d": "5/2", "m": "3/1"}},
        {"kind": "first_generation", "params": {"tau": [1, 2], "F": [["1/1"], ["1/2", "1/2"]]}},
        {"kind": "second_generation", "params": {"tau_star": [1], "F_star": [["1/1"]]}},
        {
            "kind": "lemma1_modify",
            "params": {"base": {"kind": "second_generation", "params": {"tau_star": [1], "F_star": [["1/1"]]}}},
        },
        {"kind": "segment_lemma2", "params": {"k": "2/1", "n_max": 3}},
        {"kind": "segment_lemma3", "params": {"k": "3/1", "n_max": 3}},
        {
            "kind": "glue",
            "params": {
                "k0": "2/1",
                "components": [
                    {"kind": "basic_s", "params": {"tau": 1, "d": "3/2", "m": "2/1"}},
                    {"kind": "basic_t", "params": {"tau": 1, "d": "2/1", "m": "3/1"}},
                ],
            },
        },
    ]
    for desc in descriptors:
        space = ml.build_space(desc)
        assert ml.validate_metric(space).ok
        again = ml.build_space(space.descriptor())
        assert again.points == space.points
        assert again.dist == space.dist
        assert again.weight == space.weight
