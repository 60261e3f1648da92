import itertools

import pytest
import sympy

from diagcount.characters import (
    AdditiveCharacter,
    MultCharacter,
    char_eval,
    expected_abs_square,
    hermitian_jacobi_value,
    is_pure,
    jacobi_sum,
    power_sum,
    purity_scan,
    theta,
    wolfmann_closed_power_sum,
)
from diagcount.cyclotomic import CycInt, abs_square, root_power
from diagcount.errors import (
    ArityError,
    DNotDividingError,
    ExclusionViolatedError,
    ModulusMismatchError,
    TrivialCharacterError,
    WitnessInvalidError,
    WitnessMissingError,
    ZeroInputError,
)
from diagcount.gf import build_field


def test_char_eval_examples(f9):
    chi = MultCharacter(f9, 4)
    assert char_eval(chi, f9.generator()) == root_power(4, 1)
    assert chi(-f9.one()) == 1
    assert chi(f9.zero()) == 0


def test_character_order_must_divide(f9):
    with pytest.raises(DNotDividingError):
        MultCharacter(f9, 3)


def test_character_is_multiplicative(f25):
    chi = MultCharacter(f25, 6, 5)
    units = list(f25.units())
    for x in units[::5]:
        for y in units[::7]:
            assert chi(x * y) == chi(x) * chi(y)


def test_product_character(f9):
    product = MultCharacter(f9, 4) * MultCharacter(f9, 4, 3)
    assert product.is_trivial
    assert (MultCharacter(f9, 4) * MultCharacter(f9, 2)).exact_order == 4


def test_additive_character_is_additive(f9):
    psi = AdditiveCharacter(f9, f9.one())
    elements = list(f9.elements())
    for x in elements:
        for y in elements:
            assert psi(x + y) == psi(x) * psi(y)


@pytest.mark.parametrize("a,b,expected", [(0, 0, 1), (1, 5, 1), (1, 2, 0)])
def test_theta_examples(f9, a, b, expected):
    assert theta(4, f9.element(a), f9.element(b)) == expected


def test_jacobi_sum_examples(f9):
    one = f9.one()
    chi4 = MultCharacter(f9, 4)
    assert jacobi_sum([chi4, chi4], one) == 3
    assert jacobi_sum([chi4, MultCharacter(f9, 4, 3)], one) == -1
    assert jacobi_sum([chi4, chi4], f9.zero()) == 0


def test_jacobi_sum_quadratic_f5():
    f5 = build_field(5, 1)
    chi2 = MultCharacter(f5, 2)
    assert jacobi_sum([chi2, chi2], f5.one()) == -1


@pytest.mark.parametrize(
    "orders,exponents,b",
    [
        ((4, 4), (1, 1), 0),
        ((4, 2), (3, 1), 3),
        ((8, 4, 2), (1, 1, 1), 0),
        ((4, 4, 2), (1, 1, 1), None),
        ((4, 4, 2), (1, 1, 1), 1),
    ],
)
def test_convolution_matches_direct_sum(f9, orders, exponents, b):
    chars = [MultCharacter(f9, d, ell) for d, ell in zip(orders, exponents, strict=True)]
    target = f9.zero() if b is None else f9.element(b)
    fast = jacobi_sum(chars, target)
    slow = jacobi_sum(chars, target, method="direct")
    assert fast == slow
    assert abs_square(fast) == expected_abs_square(chars, target)


def test_jacobi_sum_rejects(f9):
    chi = MultCharacter(f9, 4)
    with pytest.raises(ArityError):
        jacobi_sum([chi], f9.one())
    with pytest.raises(TrivialCharacterError):
        jacobi_sum([chi, MultCharacter(f9, 4, 0)], f9.one())


@pytest.mark.parametrize(
    "p,n,d,ell,expected",
    [
        (3, 2, 4, 1, 3),
        (3, 2, 4, 3, -1),
        (5, 2, 3, 1, 5),
        (3, 4, 4, 1, -9),
        (3, 4, 4, 3, -1),
    ],
)
def test_hermitian_jacobi_value_matches_summation(p, n, d, ell, expected):
    ctx = build_field(p, n)
    chi1, chi2 = MultCharacter(ctx, d), MultCharacter(ctx, d, ell)
    assert hermitian_jacobi_value(chi1, chi2) == expected
    assert jacobi_sum([chi1, chi2], ctx.one()) == expected


def test_hermitian_jacobi_value_needs_witness(f7, f9):
    with pytest.raises(WitnessInvalidError):
        hermitian_jacobi_value(MultCharacter(f7, 3), MultCharacter(f7, 3))
    # 8 does not divide 3 + 1
    with pytest.raises(WitnessMissingError):
        hermitian_jacobi_value(MultCharacter(f9, 8), MultCharacter(f9, 8))


def test_power_sum_examples(f9):
    one = f9.one()
    assert power_sum(one, one, 4) == -3
    assert power_sum(f9.element(2), one, 4) == 9
    assert power_sum(f9.zero(), one, 4) == 9


@pytest.mark.parametrize("c", [0, 1, 2, 3])
def test_wolfmann_closed_form_matches_power_sum(f9, f81, c):
    for ctx in (f9, f81):
        x, one = ctx.element(c), ctx.one()
        r = 1
        assert power_sum(x, one, 4) == wolfmann_closed_power_sum(x, one, 4, r)


def test_wolfmann_f81_value(f81):
    one = f81.one()
    assert wolfmann_closed_power_sum(one, one, 4, 1) == -27


def test_wolfmann_rejects(f9):
    one = f9.one()
    with pytest.raises(WitnessInvalidError):
        wolfmann_closed_power_sum(one, one, 8, 1)
    with pytest.raises(ZeroInputError):
        wolfmann_closed_power_sum(f9.zero(), one, 4, 1)


def test_is_pure_examples(f7, f25):
    assert is_pure(CycInt.from_int(-3, 4), 9)
    chi3 = MultCharacter(f25, 3)
    assert is_pure(jacobi_sum([chi3, chi3], f25.one()), 25)
    chi3 = MultCharacter(f7, 3)
    assert not is_pure(jacobi_sum([chi3, chi3], f7.one()), 7)


def test_is_pure_checks_modulus():
    with pytest.raises(ModulusMismatchError):
        is_pure(CycInt.from_int(2, 4), 9)


def test_purity_scan_examples(f7, f9, f25):
    assert purity_scan(f9, 4, 2)
    assert not purity_scan(f7, 3, 2)
    assert purity_scan(f25, 3, 2)
    assert purity_scan(f25, 6, 2)


def test_purity_scan_exclusion(f7):
    with pytest.raises(ExclusionViolatedError):
        purity_scan(f7, 3, 3)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_hermitian_jacobi_law_exhaustive(p):
    # t = r = 1: nontrivial products give p, trivial ones -1
    ctx = build_field(p, 2)
    one = ctx.one()
    orders = [int(n) for n in sympy.divisors(p + 1) if n > 1]
    for n, m in itertools.product(orders, repeat=2):
        for l1, l2 in itertools.product(range(1, n), range(1, m)):
            chi1, chi2 = MultCharacter(ctx, n, l1), MultCharacter(ctx, m, l2)
            expected = -1 if (chi1 * chi2).is_trivial else p
            assert jacobi_sum([chi1, chi2], one) == expected, (n, l1, m, l2)


@pytest.mark.parametrize("p,exponents", [(3, range(1, 8)), (5, range(1, 24, 4))])
def test_jacobi_reduction_law(p, exponents):
    ctx = build_field(p, 2)
    units = ctx.unit_order
    for l1, l2 in itertools.product(exponents, range(1, units)):
        chi1, chi2 = MultCharacter(ctx, units, l1), MultCharacter(ctx, units, l2)
        at_one = jacobi_sum([chi1, chi2], ctx.one())
        for b in ctx.units():
            assert jacobi_sum([chi1, chi2], b) == char_eval(chi1 * chi2, b) * at_one, (l1, l2, b)


def _magnitude(size, k, b_is_zero, product_trivial):
    if not b_is_zero:
        return size ** (k - 2) if product_trivial else size ** (k - 1)
    return (size - 1) ** 2 * size ** (k - 2) if product_trivial else 0


@pytest.mark.parametrize(
    "p,n",
    [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1), (5, 2), (3, 3),
     (29, 1), (31, 1), (37, 1), (41, 1), (43, 1), (47, 1), (7, 2)],
)
def test_jacobi_magnitude_law(p, n):
    ctx = build_field(p, n)
    units = ctx.unit_order
    picks = sorted({ell % units for ell in (1, 2, units // 2, units - 1)} - {0})
    for k in (2, 3):
        for exponents in itertools.combinations_with_replacement(picks, k):
            chars = [MultCharacter(ctx, units, ell) for ell in exponents]
            trivial = sum(exponents) % units == 0
            for b in (ctx.zero(), ctx.one(), ctx.generator()):
                expected = _magnitude(ctx.q_total, k, b.is_zero, trivial)
                assert abs_square(jacobi_sum(chars, b)) == expected, (exponents, b)
                assert expected_abs_square(chars, b) == expected
