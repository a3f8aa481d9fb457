import cmath

import numpy as np
import pytest

from trirank.errors import DegreeOutOfBudget, DivisionByZero, FieldMismatch, NotPrime
from trirank.fields import make_field, parse_field


def test_prime_field_matches_modular_arithmetic():
    F = make_field(7)
    for a in range(7):
        for b in range(7):
            assert F.add_codes(a, b) == (a + b) % 7
            assert F.mul_codes(a, b) == (a * b) % 7
        assert F.neg_code(a) == (-a) % 7


def test_f9_modulus_is_lex_least():
    F = make_field(3, 2)
    # t^2 + 1 is the first monic irreducible quadratic over F_3
    assert F.modulus == (1, 0, 1)
    t = F.elem((0, 1))
    assert (t * t).coeffs == (2, 0)  # t^2 = -1


def test_base_field_embeds_code_identically():
    F9 = make_field(3, 2)
    F3 = make_field(3)
    for a in range(3):
        for b in range(3):
            assert F9.add_codes(a, b) == F3.add_codes(a, b)
            assert F9.mul_codes(a, b) == F3.mul_codes(a, b)


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (3, 2), (3, 3), (5, 2), (2, 6)])
def test_field_axioms_exhaustive(p, k):
    F = make_field(p, k)
    codes = range(F.q)
    for a in codes:
        assert F.add_codes(a, 0) == a
        assert F.mul_codes(a, 1) == a
        assert F.add_codes(a, F.neg_code(a)) == 0
        if a:
            assert F.mul_codes(a, F.inv_code(a)) == 1
    # spot-check associativity and distributivity on a grid
    sample = list(codes)[:: max(1, F.q // 7)]
    for a in sample:
        for b in sample:
            assert F.mul_codes(a, b) == F.mul_codes(b, a)
            for c in sample:
                assert F.mul_codes(a, F.add_codes(b, c)) == F.add_codes(
                    F.mul_codes(a, b), F.mul_codes(a, c)
                )


def test_frobenius_fixes_prime_subfield():
    F = make_field(3, 3)
    for a in range(F.q):
        apk = F.pow_code(a, 27)
        assert apk == a  # x^(q) = x
        ap = F.pow_code(a, 3)
        if a < 3:
            assert ap == a


def test_trace_surjective_with_equal_fibers():
    F = make_field(3, 3)
    fibers = np.bincount([F.trace_code(a) for a in range(F.q)], minlength=3)
    assert fibers.tolist() == [9, 9, 9]


def test_character_sum_vanishes_over_full_field():
    for p, k in [(3, 1), (3, 2), (5, 1), (2, 3)]:
        F = make_field(p, k)
        total = F.char_sum(np.arange(F.q))
        assert abs(total) < 1e-12


def test_char_eval_is_root_of_unity():
    F = make_field(3, 2)
    for a in range(F.q):
        val = F.char_eval_code(a)
        assert abs(abs(val) - 1) < 1e-12
        assert abs(val - cmath.exp(2j * cmath.pi * F.trace_code(a) / 3)) < 1e-12


def test_pow_table_matches_pow_code():
    F = make_field(3, 2)
    tbl = F.pow_table(4)
    for a in range(F.q):
        for e in range(5):
            assert tbl[a, e] == F.pow_code(a, e)


def test_extension_and_lift():
    F3 = make_field(3)
    F27 = F3.extension(3)
    assert F27.q == 27
    assert F3.extension(1) is F3
    lifted = F3.lift_codes([0, 1, 2], F27)
    # residues stay code-identical and arithmetic agrees on them
    assert lifted.tolist() == [0, 1, 2]
    assert F27.mul_codes(2, 2) == F3.mul_codes(2, 2)
    with pytest.raises(FieldMismatch):
        make_field(3, 2).extension(2)


def test_budget_and_validation_errors():
    with pytest.raises(NotPrime):
        make_field(4)
    with pytest.raises(DegreeOutOfBudget):
        make_field(3, 7)
    with pytest.raises(DegreeOutOfBudget):
        make_field(31, 2)  # 961 > 729
    with pytest.raises(DivisionByZero):
        make_field(3).inv_code(0)


def test_parse_field_round_trip():
    assert parse_field("3^2").designation() == "3^2"
    assert parse_field("5") == make_field(5, 1)
    with pytest.raises(FieldMismatch):
        parse_field("abc")


def test_make_field_is_cached_and_deterministic():
    assert make_field(3, 2) is make_field(3, 2)
    assert make_field(3, 2).modulus == make_field(3, 2).modulus
