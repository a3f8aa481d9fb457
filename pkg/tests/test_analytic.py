import math

import numpy as np
import pytest

from trirank import analytic, tensor
from trirank.errors import BudgetExceeded
from trirank.fields import make_field

F3 = make_field(3)


def brute_zero_count(T):
    """Direct enumeration of f(x, y) = 0, independent of the rank shortcut."""
    F = T.field
    n1, n2, _ = T.dims
    count = 0
    for xc in range(F.q ** n1):
        x = [(xc // F.q ** i) % F.q for i in range(n1)]
        M = tensor.contract_x(T, x)
        for yc in range(F.q ** n2):
            y = np.array([(yc // F.q ** i) % F.q for i in range(n2)], dtype=np.int32)
            row = np.zeros(T.dims[2], dtype=np.int32)
            for j in range(n2):
                row = F.add[row, F.mul[y[j], M[j]]]
            if not row.any():
                count += 1
    return count


@pytest.mark.parametrize(
    "T,expected",
    [
        (tensor.identity_tensor(F3, 1), 5),
        (tensor.levi_civita(F3), 105),
        (tensor.zero_tensor(F3, (2, 2, 2)), 81),
    ],
)
def test_zero_count_known_values(T, expected):
    assert analytic.zero_count(T) == expected


def test_zero_count_matches_brute_force():
    for seed in range(5):
        T = tensor.random_tensor(F3, (2, 2, 2), seed=seed)
        assert analytic.zero_count(T) == brute_zero_count(T)


def test_direct_sum_multiplies_zero_counts():
    T = tensor.tk_family(F3, 2)
    assert analytic.zero_count(T) == 105 ** 2


def test_analytic_rank_values():
    ar = analytic.analytic_rank(tensor.levi_civita(F3))
    assert abs(ar.value - math.log(729 / 105, 3)) < 1e-12
    assert analytic.analytic_rank(tensor.zero_tensor(F3, (2, 2, 2))).value == 0


def test_identity_closed_form():
    # AR(I_n) = n (2 - log_q(2q - 1))
    for q in (3, 5, 7):
        F = make_field(q)
        for n in (1, 2, 3):
            ar = analytic.analytic_rank(tensor.identity_tensor(F, n))
            assert abs(ar.value - n * (2 - math.log(2 * q - 1, q))) < 1e-12
            assert ar.zero_count == (2 * q - 1) ** n


def test_bias_matches_zero_count():
    # averaging chi over z kills every nonzero output, so the full character
    # average equals Pr[f(x, y) = 0] exactly
    T = tensor.identity_tensor(F3, 2)
    bias = analytic.bias_char_sum(T)
    assert abs(bias.imag) < 1e-9
    assert abs(bias.real - analytic.zero_count(T) / 81) < 1e-9


def test_bias_cross_checks_ar_on_random_tensors():
    for seed in range(5):
        T = tensor.random_tensor(F3, (2, 3, 2), seed=seed)
        bias = analytic.bias_char_sum(T)
        zc = analytic.zero_count(T)
        assert abs(bias.real - zc / 3 ** 5) < 1e-9
        assert abs(bias.imag) < 1e-9


def test_min_entropy_argmax_at_zero():
    T = tensor.identity_tensor(F3, 2)
    rep = analytic.min_entropy(T)
    assert rep.argmax_is_zero
    assert rep.max_count == 25
    assert abs(rep.me - math.log2(81 / 25)) < 1e-12


def test_min_entropy_equals_ar_log2q():
    for seed in range(10):
        T = tensor.random_tensor(F3, (3, 3, 3), seed=seed)
        rep = analytic.min_entropy(T)
        ar = analytic.analytic_rank(T)
        assert rep.max_count == ar.zero_count
        assert abs(rep.me - ar.value * math.log2(3)) < 1e-12


def test_budget_errors():
    T = tensor.identity_tensor(F3, 3)
    with pytest.raises(BudgetExceeded):
        analytic.zero_count(T, budget=10)
    with pytest.raises(BudgetExceeded):
        analytic.min_entropy(T, budget=10)
