"""Tests for the Gaussian-smoothed coefficient sums, the double-log tent
kernel, the prime-window sums, and the two parameter planners.

High-precision reference values were computed with mpmath (50 digits) for the
kernel and with an independent sympy prime loop for the tent sums.
"""

import cmath
import math

import numpy as np
import pytest

from torsion_probe import characters, kernels, lfun, sieves
from torsion_probe.errors import (
    CapTooSmall,
    ConstraintViolated,
    FactorizationTooLarge,
    Infeasible,
    QuadratureBudget,
)


# ---------------------------------------------------------------- planners


def test_plan_rejects_margin_above_threshold():
    # (2*0.4 - 0.16)/12 = 0.0533... < 0.06, so no delta can work
    with pytest.raises(Infeasible):
        kernels.qt_plan(3, 0.4, 0.06)


def test_plan_feasible_satisfies_both_inequalities():
    plan = kernels.qt_plan(3, 0.4, 0.01)
    assert plan.delta > 0.0
    assert plan.eta == pytest.approx(plan.delta ** (1.0 / 3.0), rel=1e-14)
    assert plan.varpi == pytest.approx(1.0 / 6.0 - plan.delta, rel=1e-14)
    assert plan.kappa == pytest.approx(plan.varpi / (2.0 + plan.eta), rel=1e-14)
    margin_rhs = (plan.kappa * (2 * 0.4 - 0.4**2) - 0.01) / 3.0
    cap_rhs = plan.kappa**3 / (65.0 * (1.0 + 8.0 * plan.kappa) ** 3)
    assert plan.delta <= margin_rhs
    assert plan.delta <= cap_rhs
    assert plan.margin_ok and plan.cap_ok
    assert plan.smoothing_y(math.e) == pytest.approx(plan.kappa, rel=1e-14)


def test_plan_cap_constraint_binds_for_small_margin_share():
    plan = kernels.qt_plan(3, 0.4, 1e-9)
    cap_rhs = plan.kappa**3 / (65.0 * (1.0 + 8.0 * plan.kappa) ** 3)
    margin_rhs = (plan.kappa * (2 * 0.4 - 0.4**2) - 1e-9) / 3.0
    assert cap_rhs - plan.delta < 1e-12
    assert margin_rhs - plan.delta > 1e-2


def test_plan_validates_inputs():
    with pytest.raises(ConstraintViolated):
        kernels.qt_plan(4, 0.4, 0.01)
    with pytest.raises(ConstraintViolated):
        kernels.qt_plan(2, 0.4, 0.01)
    with pytest.raises(ConstraintViolated):
        kernels.qt_plan(3, 0.5, 0.01)
    with pytest.raises(ConstraintViolated):
        kernels.qt_plan(3, 0.4, 0.0)


def test_cubic_config_fields_and_validation():
    cfg = kernels.ct_config(3, 0.05, -9413, 2.0)
    assert cfg.y == pytest.approx(9413.0 ** (1.0 / 12.0 - 0.05), rel=1e-14)
    assert cfg.y > 1.0
    assert cfg.window_low == pytest.approx(cfg.y ** ((1 - 0.05) ** 2), rel=1e-14)
    assert cfg.window_low < cfg.y
    with pytest.raises(ConstraintViolated):
        kernels.ct_config(4, 0.05, -9413, 2.0)
    with pytest.raises(ConstraintViolated):
        kernels.ct_config(3, 1.0 / 12.0, -9413, 2.0)
    with pytest.raises(ConstraintViolated):
        kernels.ct_config(3, 0.05, -9413, 0.5)
    with pytest.raises(ConstraintViolated):
        kernels.ct_config(3, 0.05, -9413, math.log(9413) + 1.0)


# ------------------------------------------------------- coefficient series


def test_coefficients_match_ideal_count_formula():
    series = kernels.coefficient_series(-4)
    assert series.a(1) == 1
    assert series.a(3) == 0
    assert series.a(5) == 2
    assert series.a(65) == 4
    for disc in (-4, 5, -23):
        s = kernels.coefficient_series(disc)
        table = s.coefficients(500)
        for n in range(1, 501):
            assert table[n] == s.a(n)


def test_coefficient_bounds_and_multiplicativity():
    series = kernels.coefficient_series(13)
    table = series.coefficients(3000)
    for n in range(1, 3001):
        assert 0 <= table[n] <= sieves.divisor_count(sieves.factorize(n))
    rng = np.random.default_rng(7)
    pairs = 0
    while pairs < 40:
        m = int(rng.integers(2, 50))
        n = int(rng.integers(2, 60))
        if math.gcd(m, n) != 1:
            continue
        assert series.a(m * n) == series.a(m) * series.a(n)
        pairs += 1
    sf = sieves.squarefree_flags(3000)
    for n in range(1, 3001):
        if not sf[n] or math.gcd(n, 13) != 1:
            assert table[n] == 0


def test_coefficient_backends_agree():
    disc = -23
    limit = 100_000
    row = kernels._factor_row(disc)
    base = sieves.primes_up_to(math.isqrt(limit))
    via_numpy = kernels._coefficient_sieve_numpy(limit, 23, row, base)
    via_jit = np.asarray(kernels._coefficient_sieve_jit(limit, 23, row, base))
    assert np.array_equal(via_numpy, via_jit)


# ---------------------------------------------------------- Gaussian sums


def test_gaussian_sum_tiny_y_is_unit_mass():
    # default cap is ceil(e^{0.8}) = 3 and a(2) = a(3) = 0 for disc -4, so
    # only n=1 contributes
    series = kernels.coefficient_series(-4)
    value = kernels.gaussian_weighted_sum(series, 0.1)
    assert value == pytest.approx(1.0 / (2.0 * math.sqrt(0.1 * math.pi)), rel=1e-14)


def test_gaussian_sum_flags_small_cap():
    series = kernels.coefficient_series(-23)
    with pytest.raises(CapTooSmall):
        kernels.gaussian_weighted_sum(series, 1.0, n_cap=2)


def test_gaussian_sum_guards_oversized_cap():
    series = kernels.coefficient_series(-4)
    with pytest.raises(FactorizationTooLarge):
        kernels.gaussian_weighted_sum(series, 3.0)  # default cap e^24
    with pytest.raises(FactorizationTooLarge):
        kernels.gaussian_weighted_sum(series, 1.0, n_cap=1 << 30)


def test_gaussian_tail_bound_shrinks_with_cap():
    b1 = kernels.gaussian_tail_bound(1.0, 10_000)
    b2 = kernels.gaussian_tail_bound(1.0, 100_000)
    assert 0.0 < b2 < b1


@pytest.mark.parametrize("disc", [-4, 5, -23])
@pytest.mark.parametrize("y,cap", [(0.5, 30_000), (1.0, 200_000), (2.0, 2_000_000)])
def test_smoothed_sum_matches_contour_route(disc, y, cap):
    # the two sides of the smoothing identity, computed by entirely
    # different routes (sieve sum vs quadrature over an L-product);
    # caps are non-squarefree so the final sieve term is exactly zero
    series = kernels.coefficient_series(disc)
    direct = kernels.gaussian_weighted_sum(series, y, n_cap=cap)
    contour = kernels.contour_integral_gaussian(series, y)
    assert abs(contour.imag) < 1e-9 * abs(contour)
    assert contour.real == pytest.approx(direct, rel=1e-6)


def test_contour_height_doubling_is_stable():
    series = kernels.coefficient_series(-4)
    base = kernels.contour_integral_gaussian(series, 1.0)
    tall = kernels.contour_integral_gaussian(
        series, 1.0, height_cap=2.0 * math.sqrt(4.0 + 27.631 / 1.0)
    )
    assert abs(tall - base) < 1e-9 * abs(base)


def test_contour_budget_error():
    series = kernels.coefficient_series(-4)
    with pytest.raises(QuadratureBudget):
        kernels.contour_integral_gaussian(series, 1.0, tol=1e-18, max_nodes=64)


# ------------------------------------------------------------ window masses


def test_window_masses_partition_total():
    series = kernels.coefficient_series(5)
    core, low, high = kernels.window_mass(series, 1.5, 0.008, n_cap=30_000)
    total = kernels.gaussian_weighted_sum(series, 1.5, n_cap=30_000)
    assert core + low + high == pytest.approx(total, rel=1e-12)
    assert min(core, low, high) >= 0.0


def test_window_boundaries_follow_cube_root_rule():
    # delta = 0.001 puts the window at e^{1.9y} < n <= e^{2.1y}
    series = kernels.coefficient_series(-4)
    y, delta, cap = 2.0, 0.001, 601
    core, low, high = kernels.window_mass(series, y, delta, n_cap=cap)
    table = series.coefficients(cap).astype(float)
    ns = np.arange(cap + 1, dtype=float)
    ns[0] = 1.0
    terms = table * np.exp(-np.log(ns) ** 2 / (4.0 * y))
    norm = 1.0 / (2.0 * math.sqrt(math.pi * y))
    idx = np.arange(cap + 1)
    lo_b, hi_b = math.exp(1.9 * y), math.exp(2.1 * y)
    assert low == pytest.approx(norm * terms[idx <= lo_b].sum(), rel=1e-12)
    assert core == pytest.approx(
        norm * terms[(idx > lo_b) & (idx <= hi_b)].sum(), rel=1e-12
    )
    assert high == pytest.approx(norm * terms[idx > hi_b].sum(), rel=1e-12)


def test_window_tail_share_decreases_along_y():
    series = kernels.coefficient_series(-4)
    shares = []
    for y in (2.0, 3.0, 4.0):
        cap = int(math.exp(3.2 * y))
        core, low, high = kernels.window_mass(series, y, 0.001, n_cap=cap)
        shares.append((low + high) / (core + low + high))
    assert shares[0] > shares[1] > shares[2]


# -------------------------------------------------------------- tent kernel


def test_kernel_center_value_exact():
    v = kernels.cubic_kernel_f(1.0, math.e, 0.5)
    assert v.real == pytest.approx(0.09375, rel=1e-13)
    assert v.imag == 0.0
    w = kernels.cubic_kernel_f(1.0, 100.0, 0.2)
    expect = 0.5 * 0.2**2 * 0.8 * 1.8 * math.log(100.0) ** 2
    assert w.real == pytest.approx(expect, rel=1e-12)


def test_kernel_matches_high_precision_points():
    cases = [
        ((0.9 + 0.0j), 10.0, 0.3, 0.24005830962523010 + 0.0j),
        ((0.5 + 0.7j), 50.0, 0.2, -0.052214332835226986 + 0.072001352027163670j),
        ((-1.5 + 0.0j), math.e, 0.5, 0.023447477206504717 + 0.0j),
        ((0.8 + 0.0j), 20.0, 0.25, 0.23227589458554948 + 0.0j),
    ]
    for s, y, delta, expect in cases:
        got = kernels.cubic_kernel_f(s, y, delta)
        assert abs(got - expect) < 1e-12 * abs(expect)


def test_kernel_removable_point_continuity():
    # values straddling s=1 against 50-digit references; the symmetric
    # average collapses onto f(1) although each one-sided value sits
    # O(eps * log y) away
    up = kernels.cubic_kernel_f(1.0 + 1e-6, math.e, 0.5)
    down = kernels.cubic_kernel_f(1.0 - 1e-6, math.e, 0.5)
    assert up.real == pytest.approx(0.09375005468751708, rel=1e-10)
    assert down.real == pytest.approx(0.09374994531251708, rel=1e-10)
    center = kernels.cubic_kernel_f(1.0, math.e, 0.5).real
    assert abs(0.5 * (up.real + down.real) - center) < 1e-8 * center


def test_kernel_nonnegative_on_real_axis():
    grid = np.linspace(-2.0, 2.0, 1000)
    for y in (math.e, 10.0, 100.0):
        for delta in (0.1, 0.3, 0.5, 0.7):
            for s in grid:
                v = kernels.cubic_kernel_f(float(s), y, delta)
                assert v.imag == 0.0
                assert v.real >= -1e-12


def test_kernel_left_halfplane_decay_bound():
    rng = np.random.default_rng(11)
    for y in (10.0, 1000.0):
        for delta in (0.2, 0.5):
            bound = 4.0 - 2.0 * delta
            done = 0
            while done < 100:
                s = complex(rng.uniform(-5.0, 1.0), rng.uniform(-10.0, 10.0))
                if abs(s - 1.0) < 1e-3:
                    continue
                v = kernels.cubic_kernel_f(s, y, delta)
                assert abs(v) * abs(s - 1.0) ** 2 <= bound + 1e-9
                done += 1


def test_kernel_validates_inputs():
    with pytest.raises(ConstraintViolated):
        kernels.cubic_kernel_f(0.5, 0.9, 0.2)
    with pytest.raises(ConstraintViolated):
        kernels.cubic_kernel_f(0.5, 10.0, 1.0)


# --------------------------------------------------------- prime-window sums


def test_tent_sum_empty_window():
    chi = characters.principal_character(1)
    assert kernels.weighted_prime_sum(chi, 1.9, 0.2) == 0.0


def test_tent_sum_main_term_trend():
    # independent sympy prime-loop values; the normalized ratio walks
    # toward 1 as y grows
    chi = characters.principal_character(1)
    frozen = {10: 2.8463783698817915, 12: 4.127530032408576, 14: 5.632766943956324}
    fhat1 = 0.5 * 0.2**2 * 0.8 * 1.8
    devs = []
    for k, expect in frozen.items():
        got = kernels.weighted_prime_sum(chi, math.exp(k), 0.2)
        assert got.imag == 0.0
        assert got.real == pytest.approx(expect, rel=1e-9)
        ratio = got.real / (fhat1 * k * k)
        devs.append(abs(ratio - 1.0))
    assert 0.8 <= frozen[14] / (fhat1 * 196.0) <= 1.2
    assert devs[0] > devs[1] > devs[2]


def test_tent_sum_quadratic_cancellation():
    chi = characters.attach_quadratic(-4)
    small = kernels.weighted_prime_sum(chi, math.exp(10), 0.2)
    smaller = kernels.weighted_prime_sum(chi, math.exp(14), 0.2)
    assert small.real == pytest.approx(-0.024437189922390273, rel=1e-9)
    assert smaller.real == pytest.approx(-0.01157851008049242, rel=1e-9)
    assert abs(small) < 0.1 and abs(smaller) < 0.1


def test_tent_sum_cubic_triple_is_real():
    chi = characters.enumerate_characters(7, order_filter=3)[0]
    y, delta = math.exp(6), 0.2
    one = kernels.weighted_prime_sum(characters.principal_character(7), y, delta)
    mid = kernels.weighted_prime_sum(chi, y, delta)
    bar = kernels.weighted_prime_sum(chi.conjugate(), y, delta)
    assert abs(bar - mid.conjugate()) < 1e-12
    triple = one + mid + bar
    assert abs(triple.imag) < 1e-12


def test_tent_sum_guards_window_size():
    chi = characters.principal_character(1)
    with pytest.raises(FactorizationTooLarge):
        kernels.weighted_prime_sum(chi, math.exp(17), 0.2)


# ------------------------------------------------------------ zero-side sums


def test_zero_side_empty_is_zero():
    total, census = kernels.zero_side_sum([], 10.0, 0.3, math.log(1000.0), 2.0)
    assert total == 0.0
    assert census == ()


def test_zero_side_single_real_zero_nonpositive():
    zeros = [lfun.Zero(0.8, 0.0, 0.0)]
    total, census = kernels.zero_side_sum(zeros, 20.0, 0.25, math.log(50.0), 1.0)
    assert total.imag == 0.0
    assert total.real == pytest.approx(-0.23227589458554948, rel=1e-12)
    assert total.real <= 0.0
    assert len(census) == 1 and census[0].count == 1


def test_zero_side_census_partitions_zeros():
    base = math.log(1000.0)
    zeros = [
        lfun.Zero(0.9, 0.05, 0.0),  # |rho-1| = 0.1118, inner ball
        lfun.Zero(0.7, 0.2, 0.0),  # |rho-1| = 0.3606, second annulus
        lfun.Zero(0.5, 0.8, 0.0),  # |rho-1| = 0.9434, third annulus
    ]
    total, census = kernels.zero_side_sum(zeros, 30.0, 0.2, base, 2.0)
    assert sum(row.count for row in census) == len(zeros)
    scales = [row.scale for row in census]
    assert scales == [0, 1, 2, 4]
    counts = [row.count for row in census]
    assert counts == [1, 0, 1, 1]
    for row in census:
        assert row.linnik_bound == row.scale + 1
        if row.scale == 0:
            assert row.inner == 0.0 and row.outer == pytest.approx(1.0 / base)
        else:
            assert row.inner == pytest.approx(row.scale / base)
            assert row.outer == pytest.approx(2.0 * row.scale / base)
    flags = [row.inside_hypothesis_disc for row in census]
    assert flags == [True, True, False, False]
    for row, zero in [(census[0], zeros[0]), (census[2], zeros[1]), (census[3], zeros[2])]:
        r = abs(complex(zero.beta, zero.gamma) - 1.0)
        assert row.inner < r <= row.outer or (row.scale == 0 and r <= row.outer)


def test_zero_side_rejects_high_zeros():
    zeros = [lfun.Zero(0.5, 1.5, 0.0)]
    with pytest.raises(ConstraintViolated):
        kernels.zero_side_sum(zeros, 10.0, 0.3, math.log(100.0), 1.0)
