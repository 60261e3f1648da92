import itertools
import math

import pytest

from diagcount import counting
from diagcount.counting import (
    DiagonalEquation,
    attaining_mixed_example,
    count_additive_expansion,
    count_auto,
    count_b0_common,
    count_b0_mixed,
    count_bnz,
    count_jacobi_expansion,
    count_s2,
    exponent_witness,
    find_witness,
    i_is_zero_predicate,
    i_value,
    i_value_prime_power,
    mixed_bound_rhs,
    theta_class_sum,
    weil_bound,
)
from diagcount.errors import (
    ArityError,
    FormulaMismatchError,
    MixedFieldsError,
    NonzeroBError,
    TrivialExponentError,
    WitnessMissingError,
    ZeroBError,
    ZeroCoefficientError,
)
from diagcount.gf import build_field
from diagcount.oracle import brute_count
from diagcount.schemas import CountMethod, CountResult


@pytest.mark.parametrize("d,p,t,expected", [(4, 3, 2, 1), (5, 3, 2, 2), (5, 7, 1, None), (4, 3, 1, 1)])
def test_find_witness(d, p, t, expected):
    assert find_witness(d, p, t) == expected


def test_golden_counts(golden, equation_from):
    for entry in golden["counts"]:
        eq = equation_from(entry)
        assert count_auto(eq).value == entry["value"], entry
        assert brute_count(eq) == entry["value"], entry


@pytest.mark.parametrize(
    "a,d,expected",
    [
        ([0, 0], [4, 4], 33),
        ([0, 0, 0], [2, 2, 2], 81),
        ([0, 0, 0], [4, 4, 4], 225),
    ],
)
def test_b0_mixed_and_common_agree(f9, a, d, expected):
    eq = DiagonalEquation.create(f9, [f9.element(k) for k in a], d)
    assert count_b0_mixed(eq).value == expected
    assert count_b0_common(eq).value == expected
    assert count_b0_common(eq, r=1).value == expected


@pytest.mark.parametrize(
    "a,d,expected",
    [
        ([0, 0], [4, 4], 24),
        ([0, 0, 0], [2, 2, 2], 90),
        ([0, 0], [2, 4], 14),
    ],
)
def test_bnz_examples(f9, a, d, expected):
    eq = DiagonalEquation.create(f9, [f9.element(k) for k in a], d, f9.one())
    assert count_bnz(eq).value == expected


def test_s2_examples(f9):
    one, alpha = f9.one(), f9.generator()
    assert count_s2(DiagonalEquation.create(f9, [one, one], [4, 4])).value == 33
    assert count_s2(DiagonalEquation.create(f9, [one, one], [4, 4], one)).value == 24
    assert count_s2(DiagonalEquation.create(f9, [one, alpha], [4, 4])).value == 1


def test_closed_forms_reject_wrong_b(f9):
    one = f9.one()
    with_b = DiagonalEquation.create(f9, [one, one], [4, 4], one)
    without_b = DiagonalEquation.create(f9, [one, one], [4, 4])
    with pytest.raises(NonzeroBError):
        count_b0_mixed(with_b)
    with pytest.raises(NonzeroBError):
        count_b0_common(with_b)
    with pytest.raises(ZeroBError):
        count_bnz(without_b)


def test_explicit_witness_is_checked(f81):
    one = f81.one()
    eq = DiagonalEquation.create(f81, [one, one], [4, 5])
    with pytest.raises(WitnessMissingError, match="does not divide"):
        count_b0_common(eq, r=1)
    with pytest.raises(WitnessMissingError, match="no divisor r"):
        count_b0_common(eq)


def test_mixed_witness_missing_names_index(f9):
    one = f9.one()
    eq = DiagonalEquation.create(f9, [one, one], [4, 8])
    with pytest.raises(WitnessMissingError, match="exponent index 1") as info:
        count_b0_mixed(eq)
    assert info.value.index == 1


def test_count_auto_dispatch(f7, f9, f81):
    one = f9.one()
    hermitian = DiagonalEquation.create(f9, [one, one], [4, 4], one)
    assert count_auto(hermitian).method == CountMethod.s2_proposition
    mixed = DiagonalEquation.create(f81, [f81.one(), f81.one()], [4, 5])
    result = count_auto(mixed)
    assert result.method == CountMethod.mixed_theorem
    assert result.value == brute_count(mixed)
    assert result.witness.r == [1, 2]
    assert result.witness.common_r is None
    oracle = count_auto(DiagonalEquation.create(f7, [f7.one(), f7.one()], [3, 3]))
    assert oracle.method == CountMethod.oracle
    assert oracle.value == brute_count(DiagonalEquation.create(f7, [f7.one(), f7.one()], [3, 3]))


def test_count_auto_detects_disagreement(f9, monkeypatch):
    one = f9.one()
    eq = DiagonalEquation.create(f9, [one, one], [4, 4])

    def broken(eq, r=None):
        return CountResult(value=34, method=CountMethod.s2_proposition)

    monkeypatch.setattr(counting, "count_s2", broken)
    with pytest.raises(FormulaMismatchError, match="disagree"):
        count_auto(eq)


def test_count_auto_matches_oracle_exhaustively(f9):
    for s in (2, 3):
        for d in itertools.combinations_with_replacement([2, 4, 8], s):
            for a in itertools.product(range(4), repeat=s):
                for b in (f9.zero(), f9.one(), f9.generator()):
                    eq = DiagonalEquation.create(f9, [f9.element(k) for k in a], d, b)
                    assert count_auto(eq).value == brute_count(eq), str(eq)


@pytest.mark.parametrize(
    "a,d,b",
    [
        ([0, 0], [4, 4], 0),
        ([0, 1], [4, 2], None),
        ([0, 0, 0], [4, 4, 4], None),
        ([1, 2, 3], [2, 4, 8], 1),
    ],
)
def test_expansions_match_oracle(f9, a, d, b):
    rhs = f9.zero() if b is None else f9.element(b)
    eq = DiagonalEquation.create(f9, [f9.element(k) for k in a], d, rhs)
    expected = brute_count(eq)
    assert count_jacobi_expansion(eq).value == expected
    assert count_additive_expansion(eq).value == expected


def test_expansions_without_witness(f7):
    eq = DiagonalEquation.create(f7, [f7.one(), f7.element(1)], [3, 2], f7.one())
    assert count_jacobi_expansion(eq).value == brute_count(eq)
    assert count_additive_expansion(eq).value == brute_count(eq)


def test_create_validates(f9, f25):
    one = f9.one()
    with pytest.raises(ArityError):
        DiagonalEquation.create(f9, [one], [4, 4])
    with pytest.raises(ZeroCoefficientError):
        DiagonalEquation.create(f9, [one, f9.zero()], [4, 4])
    with pytest.raises(MixedFieldsError):
        DiagonalEquation.create(f9, [one, f25.one()], [4, 4])
    with pytest.raises(TrivialExponentError) as info:
        DiagonalEquation.create(f9, [one, one], [3, 4])
    assert info.value.count == 9


def test_exponents_reduce_to_gcd(f9):
    eq = DiagonalEquation.create(f9, [f9.one(), f9.one()], [12, 4])
    assert eq.d == (4, 4)


def test_exponent_witness_flags(f81):
    eq = DiagonalEquation.create(f81, [f81.one(), f81.one()], [4, 10])
    witness = exponent_witness(eq)
    assert witness.t == 2
    assert witness.r == [1, 2]
    assert witness.eps == [1, -1]
    assert witness.lambda_flag == [False, True]
    assert witness.complete


def test_i_values(golden):
    for entry in golden["i_values"]:
        for method in ("enumerate", "lcm_formula", "inclusion_exclusion"):
            assert i_value(entry["d"], method=method) == entry["value"], (entry, method)


@pytest.mark.parametrize("d", [(4, 4), (2, 4, 4), (3, 6), (2, 2, 2, 2)])
def test_i_value_prime_power_form(d):
    # periods 3 + 1 and 5 + 1
    p, r = (3, 1) if all(4 % di == 0 for di in d) else (5, 1)
    assert i_value_prime_power(d, p, r) == i_value(d)


@pytest.mark.parametrize(
    "d,expected",
    [((2, 3, 5), True), ((3, 3, 3), False), ((2, 6, 9), False), ((2, 2, 2), True), ((2, 4, 4), False)],
)
def test_i_is_zero_predicate(d, expected):
    assert i_is_zero_predicate(d) is expected
    assert (i_value(d) == 0) is expected


def test_i_is_zero_predicate_needs_three():
    with pytest.raises(ArityError):
        i_is_zero_predicate((4, 4))


def _exponent_vectors():
    for s in range(1, 5):
        for d in itertools.combinations_with_replacement(range(2, 13), s):
            if math.lcm(*d) <= 60:
                yield d
    yield from itertools.combinations_with_replacement(range(2, 7), 5)


def test_i_value_methods_agree():
    for d in _exponent_vectors():
        value = i_value(d, method="inclusion_exclusion")
        assert i_value(d, method="enumerate") == value, d
        assert i_value(d, method="lcm_formula") == value, d
        if len(d) > 2:
            assert i_is_zero_predicate(d) is (value == 0), d


def test_theta_class_sum_vanishes(f9):
    for d in (2, 4, 8):
        for b in f9.units():
            assert theta_class_sum(d, b, 8) == 0


@pytest.mark.parametrize("p,orders", [(3, (2, 4)), (5, (2, 3, 6)), (7, (2, 4, 8))])
def test_theta_class_sum_vanishes_over_q_plus_one(p, orders):
    # t = r = 1, so eps = -1 and the sum runs to q + 1
    ctx = build_field(p, 2)
    for d in orders:
        for b in ctx.units():
            assert theta_class_sum(d, b, p + 1) == 0, (d, b)


def test_weil_bound_examples():
    zero_b = weil_bound((4, 4), 9, True)
    assert str(zero_b) == "24"
    assert zero_b.attained(33 - 9)
    nonzero_b = weil_bound((4, 4), 9, False)
    assert str(nonzero_b) == "21"
    assert nonzero_b.admits(24 - 9)
    assert not nonzero_b.attained(24 - 9)


def test_weil_bound_keeps_surds():
    bound = weil_bound((4, 4, 4), 25, True)
    assert bound.rational == 0
    assert bound.sqrt_coefficient == 6 * 24
    assert bound.as_integer() == 6 * 24 * 5
    odd = weil_bound((4, 4), 7, False)
    assert odd.as_integer() is None
    assert odd.admits(15)
    assert not odd.admits(20)


def test_attaining_mixed_example(f81):
    eq = attaining_mixed_example(f81, (4, 10))
    assert eq.a[1] == f81.element(5)
    count = count_auto(eq)
    assert count.method == CountMethod.mixed_theorem
    assert count.value == brute_count(eq) == 1
    assert abs(count.value - f81.q_total) == mixed_bound_rhs(eq) == 80


@pytest.mark.parametrize(
    "p,n,d",
    [
        (7, 1, (3, 3)),
        (7, 1, (2, 3, 6)),
        (13, 1, (4, 6, 3)),
        (5, 2, (4, 8)),
        (5, 2, (3, 8, 12)),
        (3, 2, (8, 8)),
        (3, 2, (2, 8, 4)),
        (7, 2, (3, 16)),
        (3, 3, (2, 13, 26)),
    ],
)
def test_oracle_counts_respect_weil_bound_without_witness(p, n, d):
    ctx = build_field(p, n)
    s = len(d)
    for a in ([ctx.one()] * s, [ctx.element(i) for i in range(s)]):
        for b in (ctx.zero(), ctx.one(), ctx.generator()):
            eq = DiagonalEquation.create(ctx, a, d, b)
            deviation = abs(brute_count(eq) - eq.size ** (s - 1))
            assert weil_bound(eq.d, eq.size, b.is_zero).admits(deviation), str(eq)
