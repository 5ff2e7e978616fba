"""Property-based checks over randomly generated spaces and functions."""

import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

import maxlab as ml
from maxlab.constants import strong_ratio, weak_ratio
from maxlab.maximal import TestFunction
from maxlab.rationals import format_rational, parse_rational
from maxlab.sampling import random_function, random_space

fractions_st = st.fractions(min_value=Fraction(0), max_value=Fraction(64), max_denominator=64)
pos_fractions_st = st.fractions(min_value=Fraction(1, 64), max_value=Fraction(64), max_denominator=64)


@given(pos_fractions_st)
def test_rational_format_round_trip(q):
    assert parse_rational(format_rational(q)) == q


@given(st.integers(min_value=0, max_value=10**12), st.integers(min_value=1, max_value=7))
def test_integer_root_bounds(x, b):
    from maxlab.rationals import iroot_floor

    r = iroot_floor(x, b)
    assert r**b <= x < (r + 1) ** b


@given(
    st.integers(min_value=1, max_value=40),
    st.fractions(min_value=Fraction(0), max_value=Fraction(6), max_denominator=6),
)
def test_pow_floor_ceil_bracket(base, exp):
    from maxlab.rationals import pow_ceil, pow_floor

    lo, hi = pow_floor(base, exp), pow_ceil(base, exp)
    assert lo <= hi <= lo + 1
    # lo^b <= base^a <= hi^b
    a, b = exp.numerator, exp.denominator
    assert lo**b <= base**a <= hi**b


@given(st.integers(min_value=0, max_value=2**30))
def test_seeded_space_is_valid(seed):
    rng = random.Random(seed)
    space = random_space(rng)
    assert ml.validate_metric(space).ok


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**30),
    st.sampled_from([Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]),
)
def test_domination_and_weak_below_strong(seed, k):
    rng = random.Random(seed)
    space = random_space(rng)
    f = random_function(rng, space)
    centered = ml.m_centered(space, k, f).values
    noncentered = ml.m_noncentered(space, k, f).values
    assert all(a <= b <= c for a, b, c in zip(f.values, centered, noncentered))
    p = rng.choice([1, Fraction(3, 2), 2])
    op = rng.choice(["centered", "noncentered"])
    assert weak_ratio(space, k, p, op, f).value <= strong_ratio(space, k, p, op, f).value + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**30), pos_fractions_st)
def test_homogeneity_exact(seed, c):
    rng = random.Random(seed)
    space = random_space(rng)
    f = random_function(rng, space)
    scaled = TestFunction(tuple(c * v for v in f.values))
    base = ml.m_centered(space, Fraction(3, 2), f).values
    assert ml.m_centered(space, Fraction(3, 2), scaled).values == tuple(c * v for v in base)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**30))
def test_oracle_equivalence_random(seed):
    rng = random.Random(seed)
    space = random_space(rng)
    f = random_function(rng, space)
    k = rng.choice([Fraction(1), Fraction(3, 2), Fraction(2)])
    assert ml.m_centered(space, k, f).values == ml.m_centered_oracle(space, k, f, 1).values
    assert ml.m_noncentered(space, k, f).values == ml.m_noncentered_oracle(space, k, f, 1).values


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**30), pos_fractions_st)
def test_ratio_scale_invariance(seed, c):
    rng = random.Random(seed)
    space = random_space(rng)
    f = random_function(rng, space)
    scaled = TestFunction(tuple(c * v for v in f.values))
    a = weak_ratio(space, 1, 1, "noncentered", f)
    b = weak_ratio(space, 1, 1, "noncentered", scaled)
    assert a.exact_value == b.exact_value
