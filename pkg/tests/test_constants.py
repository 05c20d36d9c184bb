"""Exponent-solving machinery against an independently computed oracle.

The FROZEN constants below were produced by an independent 40-digit
arbitrary-precision solve of the same defining equations (bisection over
the exact transcendental system, not this module's float64 code) and are
pinned here as literals.  The float64 implementation must land within
1e-6 of them; the coarser published 4-digit values are checked with the
±5e-4 tolerance they were stated with.
"""
from __future__ import annotations

import math

import pytest

from logshave.constants import (
    RHO_MAX,
    ConvergenceError,
    boundary_rho,
    binomial_prefix_sum,
    chain_factor,
    curves_csv,
    emit_curves,
    entropy,
    entropy_inv_lower,
    max_speedup_exponent,
    solve_base_constants,
    solve_case_constants,
    stirling_upper,
)

# Independent 40-digit oracle values (frozen; see module docstring).
FROZEN = {
    "eps1": 0.15792036963899597,
    "eps2": 0.24266892828073429,
    "beta": 1.11864060350454057,
    "lambda": 0.02020815438658682,
    "gamma_star": 0.01010407719329341,
    "lambda_over_beta": 0.018064921229640306,
    "boundary": 0.841239671428609916,
    "max_exponent": 0.594360937770433568,
    "alpha_star_1": 0.5023057024056827,
    "gamma_star_1": 0.0023057024056827,
    "beta_1": 0.25526847046524914,
    "eps1_prime_1": 0.11295247099379235,
    "alpha_star_09": 0.556335578,
    "alpha_star_085": 0.588292982,
    "entropy_quarter": 0.811278124459132864,
}


class TestEntropy:
    def test_half_is_one(self):
        assert entropy(0.5) == pytest.approx(1.0, abs=1e-15)

    def test_zero_convention(self):
        assert entropy(0.0) == 0.0
        assert entropy(1.0) == 0.0

    def test_quarter_value(self):
        assert entropy(0.25) == pytest.approx(FROZEN["entropy_quarter"], abs=1e-12)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            entropy(-0.1)
        with pytest.raises(ValueError):
            entropy(1.1)

    def test_inverse_round_trip(self):
        for x in (0.05, 0.1, 0.25, 0.3, 0.45):
            assert entropy_inv_lower(entropy(x)) == pytest.approx(x, abs=1e-9)

    def test_inverse_stays_in_lower_half(self):
        for target in (0.1, 0.5, 0.9, 0.999):
            assert 0.0 <= entropy_inv_lower(target) <= 0.5


class TestBaseConstants:
    def test_frozen_oracle_values(self):
        base = solve_base_constants()
        assert base.eps1 == pytest.approx(FROZEN["eps1"], abs=1e-9)
        assert base.eps2 == pytest.approx(FROZEN["eps2"], abs=1e-9)
        assert base.beta == pytest.approx(FROZEN["beta"], abs=1e-9)
        assert base.lambda_ == pytest.approx(FROZEN["lambda"], abs=1e-9)
        assert base.gamma_star == pytest.approx(FROZEN["gamma_star"], abs=1e-9)

    def test_published_four_digit_values(self):
        base = solve_base_constants()
        assert base.eps1 == pytest.approx(0.1579, abs=5e-4)
        assert base.eps2 == pytest.approx(0.2427, abs=5e-4)
        assert base.beta == pytest.approx(1.1186, abs=5e-4)
        assert base.lambda_ == pytest.approx(0.0202, abs=5e-4)
        assert base.gamma_star == pytest.approx(0.0101, abs=5e-4)

    def test_internal_relations(self):
        base = solve_base_constants()
        # The headline exponent is half the shaved exponent.
        assert base.gamma_star == pytest.approx(base.lambda_ / 2.0, abs=1e-12)
        assert base.residuals is not None
        assert all(abs(r) < 1e-9 for r in base.residuals)
        assert base.active_branch == "half-lambda"

    def test_deterministic(self):
        a, b = solve_base_constants(), solve_base_constants()
        assert (a.eps1, a.beta, a.lambda_) == (b.eps1, b.beta, b.lambda_)


class TestCaseConstants:
    def test_rho_one_frozen(self):
        row = solve_case_constants(1.0)
        assert row.alpha_star == pytest.approx(FROZEN["alpha_star_1"], abs=1e-9)
        assert row.gamma_star_rho == pytest.approx(FROZEN["gamma_star_1"], abs=1e-9)
        assert row.beta_rho == pytest.approx(FROZEN["beta_1"], abs=1e-9)
        assert row.eps1_prime == pytest.approx(FROZEN["eps1_prime_1"], abs=1e-9)

    def test_rho_one_published_window(self):
        assert 0.5023 <= solve_case_constants(1.0).alpha_star <= 0.5043

    def test_other_densities_frozen(self):
        assert solve_case_constants(0.9).alpha_star == pytest.approx(
            FROZEN["alpha_star_09"], abs=1e-7
        )
        assert solve_case_constants(0.85).alpha_star == pytest.approx(
            FROZEN["alpha_star_085"], abs=1e-7
        )

    def test_chain_ratio_constant_across_grid(self):
        # lambda(rho)/beta(rho) is density-independent along the chain.
        for rho in (0.85, 0.9, 0.95, 1.0):
            row = solve_case_constants(rho)
            assert row.lambda_rho / row.beta_rho == pytest.approx(
                FROZEN["lambda_over_beta"], abs=1e-5
            )
        # chain_factor is the per-level share: half the ratio above.
        assert chain_factor() == pytest.approx(FROZEN["lambda_over_beta"] / 2.0, abs=1e-9)

    def test_alpha_from_gamma_relation(self):
        # The speedup exponent is the density-normalized half-plus-gain:
        # alpha*(rho) = (1/2 + gamma*(rho)) / rho.
        for rho in (0.85, 0.9, 0.95, 1.0):
            row = solve_case_constants(rho)
            assert row.alpha_star == pytest.approx(
                (0.5 + row.gamma_star_rho) / rho, abs=1e-9
            )

    def test_out_of_range_raises(self):
        for bad in (-1.0, 0.0, 0.5, 0.84, RHO_MAX + 0.01):
            with pytest.raises(ValueError):
                solve_case_constants(bad)

    def test_boundary_value(self):
        bd = boundary_rho()
        assert bd == pytest.approx(FROZEN["boundary"], abs=1e-9)
        # Defining equation: alpha*(rho) = 1/(2 rho) at the boundary.
        near = solve_case_constants(bd + 1e-6)
        assert near.alpha_star == pytest.approx(1.0 / (2.0 * (bd + 1e-6)), abs=1e-6)

    def test_boundary_sliver_degenerates_loudly(self):
        # Within ~1e-7 of the boundary the exponent solve loses its
        # bracket; that is reported as ConvergenceError, never silently.
        with pytest.raises((ConvergenceError, ValueError)):
            solve_case_constants(boundary_rho() + 1e-9)

    def test_max_exponent(self):
        assert max_speedup_exponent() == pytest.approx(FROZEN["max_exponent"], abs=1e-12)
        # Closed form: (2 - H(1/4)) / 2.
        assert max_speedup_exponent() == pytest.approx(
            (2.0 - entropy(0.25)) / 2.0, abs=1e-15
        )

    def test_endpoint_limit(self):
        # Approaching the boundary from above, alpha* tends to the
        # maximum exponent.
        val = solve_case_constants(boundary_rho() + 1e-4).alpha_star
        assert val == pytest.approx(FROZEN["max_exponent"], abs=1e-3)


class TestCurves:
    def test_grid_rows_and_residuals(self):
        rows = emit_curves((0.85, 0.90, 0.95, 1.0))
        assert len(rows) == 4
        for row in rows:
            assert row.residuals is not None
            assert all(abs(r) < 1e-9 for r in row.residuals)

    def test_alpha_monotone_decreasing(self):
        rows = emit_curves((0.85, 0.90, 0.95, 1.0))
        alphas = [row.alpha_star for row in rows]
        assert alphas == sorted(alphas, reverse=True)

    def test_single_point_grid(self):
        rows = emit_curves((1.0,))
        assert len(rows) == 1
        assert 0.5023 <= rows[0].alpha_star <= 0.5043

    def test_csv_format_and_determinism(self):
        text = curves_csv((0.9, 1.0))
        lines = text.strip().split("\n")
        assert lines[0] == "rho,alpha_star,gamma_star,beta,eps1_prime"
        assert len(lines) == 3
        first = lines[1].split(",")
        assert float(first[0]) == 0.9
        assert float(first[1]) == pytest.approx(FROZEN["alpha_star_09"], abs=1e-7)
        assert text == curves_csv((0.9, 1.0))


class TestCombinatorialBounds:
    def test_binomial_prefix_small(self):
        assert binomial_prefix_sum(4, 0) == 1
        assert binomial_prefix_sum(4, 2) == 1 + 4 + 6
        assert binomial_prefix_sum(5, 5) == 32

    def test_stirling_dominates_prefix(self):
        for n in (8, 16, 24):
            for j in range(1, n // 2 + 1):
                assert binomial_prefix_sum(n, j) <= stirling_upper(n, j) * (1 + 1e-12)
