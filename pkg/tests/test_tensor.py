import math

import numpy as np
import pytest

from expobern import (
    EXPONENTIAL,
    CLASSICAL,
    Grid,
    OperatorParams,
    ScalarField,
    bernstein_apply_nd,
    builtin_corpus,
    centered_exp_sq_nd,
    closed_form_e0_nd,
    closed_form_exp3_nd,
    closed_form_exp4_nd,
    evaluate_on_grid,
    exp_bernstein_apply,
    exp_bernstein_apply_nd,
    exp_bernstein_via_classical_nd,
    exp_power_product,
    exp_weights,
    sup_error,
)

import oracles


def make_field(fn, d, name="", factors=None):
    return ScalarField(eval=fn, d=d, name=name, separable_factors=factors)


def ones_field(d):
    return make_field(lambda pts: np.ones(np.asarray(pts).shape[0]), d, "e0")


def exp_sum_field(rate, d, name="exp"):
    return make_field(
        lambda pts, _r=rate: np.exp(_r * np.sum(np.asarray(pts, dtype=float), axis=1)),
        d, name,
    )


class TestGrid:
    def test_uniform_defaults(self):
        assert Grid.uniform(1).shape == (1025,)
        assert Grid.uniform(2).shape == (129, 129)
        assert Grid.uniform(3).shape == (33, 33, 33)

    def test_points_shape(self):
        g = Grid.uniform(2, 5)
        assert g.points().shape == (25, 2)

    def test_requires_endpoints(self):
        with pytest.raises(ValueError):
            Grid(axes=(np.array([0.1, 0.5, 1.0]),))
        with pytest.raises(ValueError):
            Grid(axes=(np.array([0.0, 0.5, 0.9]),))

    def test_requires_increasing(self):
        with pytest.raises(ValueError):
            Grid(axes=(np.array([0.0, 0.5, 0.5, 1.0]),))

    def test_per_axis_resolutions(self):
        g = Grid.uniform(2, [9, 17])
        assert g.shape == (9, 17)


class TestClassicalTensor:
    def test_fixes_constant(self):
        f = ones_field(2)
        assert bernstein_apply_nd(f, 7, [0.3, 0.9]) == pytest.approx(1.0, rel=1e-13)

    def test_fixes_coordinates(self):
        f = make_field(lambda pts: np.asarray(pts, dtype=float)[:, 0], 2, "pr1")
        for x in ([0.2, 0.9], [0.5, 0.5], [1.0, 0.0]):
            assert bernstein_apply_nd(f, 6, x) == pytest.approx(x[0], abs=1e-14)

    def test_product_of_coordinates(self):
        # B_n fixes each coordinate, and x1*x2 separates across axes
        f = make_field(lambda pts: np.prod(np.asarray(pts, dtype=float), axis=1), 2, "x1x2")
        assert bernstein_apply_nd(f, 3, [0.5, 0.5]) == pytest.approx(0.25, rel=1e-14)

    def test_dimension_mismatch(self):
        f = ones_field(2)
        with pytest.raises(ValueError):
            bernstein_apply_nd(f, 3, [0.5])
        with pytest.raises(ValueError):
            bernstein_apply_nd(f, 3, [0.5, 0.5, 0.5])

    def test_outside_domain(self):
        with pytest.raises(ValueError):
            bernstein_apply_nd(ones_field(2), 3, [0.5, 1.5])


class TestExponentialTensor:
    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
    def test_reproduces_exponential(self, d, mu):
        f = exp_sum_field(mu, d)
        rng = np.random.default_rng(17)
        for n in (1, 4, 17, 60):
            p = OperatorParams(n=n, mu=mu, d=d)
            for _ in range(4):
                x = rng.uniform(0.0, 1.0, size=d)
                expect = math.exp(mu * x.sum())
                assert exp_bernstein_apply_nd(f, p, x) == pytest.approx(expect, rel=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_reproduces_exponential_square(self, d):
        mu = 1.0
        f = exp_sum_field(2 * mu, d, "exp2")
        p = OperatorParams(n=9, mu=mu, d=d)
        x = np.full(d, 0.37)
        assert exp_bernstein_apply_nd(f, p, x) == pytest.approx(
            math.exp(2 * mu * x.sum()), rel=1e-12
        )

    def test_interpolates_corners(self):
        f = make_field(
            lambda pts: np.cos(np.sum(np.asarray(pts, dtype=float), axis=1)) + 2.0, 2
        )
        p = OperatorParams(n=8, mu=1.3, d=2)
        for corner in ([0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]):
            expect = float(f(np.asarray([corner]))[0])
            got = exp_bernstein_apply_nd(f, p, corner)
            assert abs(got - expect) <= 1e-12 * (1.0 + abs(expect))

    def test_separable_fast_path_matches_generic(self):
        mu, d = 1.0, 2
        corpus = builtin_corpus(d, mu)
        sep = corpus.lookup("exp_mu").field
        generic = exp_sum_field(mu, d)
        p = OperatorParams(n=23, mu=mu, d=d)
        rng = np.random.default_rng(2)
        for _ in range(8):
            x = rng.uniform(0.0, 1.0, size=d)
            assert exp_bernstein_apply_nd(sep, p, x) == pytest.approx(
                exp_bernstein_apply_nd(generic, p, x), rel=1e-12
            )

    def test_tensor_factorizes_for_separable_fields(self):
        # operator of a product field equals the product of 1-D operator values
        mu, d = 1.0, 2
        corpus = builtin_corpus(d, mu)
        entry = corpus.lookup("bump_prod")
        p = OperatorParams(n=11, mu=mu, d=d)
        x = np.array([0.3, 0.8])
        per_axis = 1.0
        for factor, xi in zip(entry.field.separable_factors, x):
            per_axis *= exp_bernstein_apply(factor, p, float(xi))
        assert exp_bernstein_apply_nd(entry.field, p, x) == pytest.approx(per_axis, rel=1e-11)

    def test_positivity_monotonicity(self):
        d = 2
        rng = np.random.default_rng(4)
        lo_vals = rng.uniform(0.0, 1.0, size=(8, 8))
        hi_vals = lo_vals + rng.uniform(0.0, 1.0, size=(8, 8))

        def interp(vals):
            grid = np.linspace(0.0, 1.0, 8)

            def _eval(pts, _v=vals):
                pts = np.asarray(pts, dtype=float)
                i = np.clip(np.searchsorted(grid, pts[:, 0]), 0, 7)
                j = np.clip(np.searchsorted(grid, pts[:, 1]), 0, 7)
                return _v[i, j]

            return make_field(_eval, d)

        f_lo, f_hi = interp(lo_vals), interp(hi_vals)
        p = OperatorParams(n=7, mu=1.0, d=d)
        for _ in range(12):
            x = rng.uniform(0.0, 1.0, size=d)
            a = exp_bernstein_apply_nd(f_lo, p, x)
            b = exp_bernstein_apply_nd(f_hi, p, x)
            assert a >= 0.0
            assert a <= b + 1e-12


class TestRouteEquivalence:
    def test_connection_on_nonseparable(self):
        f = make_field(
            lambda pts: np.sin(np.asarray(pts, dtype=float) @ np.array([1.0, 2.0])), 2, "osc"
        )
        p = OperatorParams(n=6, mu=1.0, d=2)
        rng = np.random.default_rng(23)
        for _ in range(10):
            x = rng.uniform(0.0, 1.0, size=2)
            a = exp_bernstein_apply_nd(f, p, x)
            b = exp_bernstein_via_classical_nd(f, p, x)
            assert b == pytest.approx(a, rel=1e-11, abs=1e-14)

    def test_connection_reproduces_exponential(self):
        f = exp_sum_field(1.0, 2)
        p = OperatorParams(n=12, mu=1.0, d=2)
        x = [0.25, 0.6]
        assert exp_bernstein_via_classical_nd(f, p, x) == pytest.approx(
            math.exp(0.85), rel=1e-12
        )

    def test_connection_e0_matches_closed(self):
        f = ones_field(2)
        p = OperatorParams(n=9, mu=1.0, d=2)
        x = [0.2, 0.9]
        assert exp_bernstein_via_classical_nd(f, p, x) == pytest.approx(
            closed_form_e0_nd(p, x), rel=1e-12
        )


class TestPowerProduct:
    def test_low_powers_are_reproduced(self):
        p = OperatorParams(n=10, mu=1.0, d=2)
        x = [0.25, 0.75]
        assert exp_power_product(1, p, x) == pytest.approx(math.exp(1.0), rel=1e-12)
        assert exp_power_product(2, p, x) == pytest.approx(math.exp(2.0), rel=1e-12)

    def test_power_three_matches_closed(self):
        p = OperatorParams(n=10, mu=1.0, d=2)
        x = [0.25, 0.75]
        assert exp_power_product(3, p, x) == pytest.approx(
            closed_form_exp3_nd(p, x), rel=1e-12
        )

    def test_power_four_matches_closed(self):
        p = OperatorParams(n=10, mu=1.0, d=2)
        x = [0.25, 0.75]
        assert exp_power_product(4, p, x) == pytest.approx(
            closed_form_exp4_nd(p, x), rel=1e-12
        )

    def test_power_equals_full_lattice_sum(self):
        p = OperatorParams(n=8, mu=0.7, d=2)
        f = exp_sum_field(3 * 0.7, 2, "exp3")
        x = [0.4, 0.9]
        assert exp_power_product(3, p, x) == pytest.approx(
            exp_bernstein_apply_nd(f, p, x), rel=1e-12
        )

    def test_rejects_bad_power(self):
        with pytest.raises(ValueError):
            exp_power_product(0, OperatorParams(n=3, mu=1.0, d=2), [0.5, 0.5])


class TestClosedFormsNd:
    def test_e0_at_corners(self):
        p = OperatorParams(n=30, mu=1.0, d=2)
        for corner in ([0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]):
            assert closed_form_e0_nd(p, corner) == pytest.approx(1.0, abs=1e-14)

    def test_e0_matches_lattice_sum(self):
        p = OperatorParams(n=30, mu=1.0, d=2)
        x = [0.2, 0.9]
        assert closed_form_e0_nd(p, x) == pytest.approx(
            exp_bernstein_apply_nd(ones_field(2), p, x), rel=1e-11
        )

    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("closed,m", [(closed_form_exp3_nd, 3), (closed_form_exp4_nd, 4)])
    def test_exp_powers_match_lattice_sum(self, d, closed, m):
        rng = np.random.default_rng(m * d)
        mu = 1.0
        f = exp_sum_field(m * mu, d, f"exp{m}")
        for _ in range(16):
            n = int(rng.integers(1, 41))
            p = OperatorParams(n=n, mu=mu, d=d)
            x = rng.uniform(0.0, 1.0, size=d)
            assert closed(p, x) == pytest.approx(
                exp_bernstein_apply_nd(f, p, x), rel=1e-11
            )


class TestCenteredExpSqNd:
    def test_zero_at_corners(self):
        p = OperatorParams(n=12, mu=1.0, d=2)
        for corner in ([0.0, 0.0], [1.0, 1.0], [0.0, 1.0]):
            assert abs(centered_exp_sq_nd(p, corner)) <= 1e-12

    def test_against_direct_centered_sum(self):
        n, mu, d = 40, 1.0, 2
        p = OperatorParams(n=n, mu=mu, d=d)
        x = np.array([0.5, 0.5])
        k = np.arange(n + 1)
        w1 = exp_weights(p, 0.5).values
        lattice_exp = np.exp(mu * k / n)
        center = math.exp(mu * x.sum())
        # direct (n+1)^2 sum of (exp(mu*sum(k)/n) - center)^2 * weight product
        diffs = np.outer(lattice_exp, lattice_exp) - center
        direct = float(np.einsum("i,j,ij->", w1, w1, diffs**2))
        assert centered_exp_sq_nd(p, x) == pytest.approx(direct, rel=1e-11)

    def test_sign_on_grid(self):
        p = OperatorParams(n=25, mu=1.0, d=2)
        pts = Grid.uniform(2, 65).points()
        vals = np.array([centered_exp_sq_nd(p, pt) for pt in pts])
        assert np.min(vals) >= -1e-12


class TestRecursiveOracle:
    @pytest.mark.parametrize("n", [1, 2, 4, 8])
    def test_matches_recursive_sum(self, n):
        mu, d = 1.3, 2
        f = make_field(
            lambda pts: np.sin(np.asarray(pts, dtype=float) @ np.array([1.0, 2.0]))
            + np.prod(np.asarray(pts, dtype=float), axis=1),
            d, "mixed",
        )
        p = OperatorParams(n=n, mu=mu, d=d)
        rng = np.random.default_rng(n)
        for _ in range(6):
            x = rng.uniform(0.0, 1.0, size=d)
            got = exp_bernstein_apply_nd(f, p, x)
            expect = oracles.recursive_apply_nd(
                lambda pt: math.sin(pt[0] + 2.0 * pt[1]) + pt[0] * pt[1], mu, n, x
            )
            assert got == pytest.approx(expect, abs=1e-13, rel=1e-13)

    def test_matches_itertools_sum_classical(self):
        d, n = 2, 5
        f = make_field(lambda pts: np.sum(np.asarray(pts, dtype=float) ** 2, axis=1), d)
        x = [0.3, 0.7]
        got = bernstein_apply_nd(f, n, x)
        expect = oracles.brute_lattice_sum_nd(
            lambda pt: pt[0] ** 2 + pt[1] ** 2, 0.0, n, x
        )
        assert got == pytest.approx(expect, abs=1e-13)


class TestGridEvaluation:
    def test_grid_matches_pointwise(self):
        f = make_field(
            lambda pts: np.sin(np.asarray(pts, dtype=float) @ np.array([1.0, 2.0])), 2
        )
        p = OperatorParams(n=9, mu=1.0, d=2)
        g = Grid.uniform(2, 9)
        vals = evaluate_on_grid(f, p, g, EXPONENTIAL)
        pts = g.points().reshape(9, 9, 2)
        for i in (0, 4, 8):
            for j in (1, 5, 7):
                assert vals[i, j] == pytest.approx(
                    exp_bernstein_apply_nd(f, p, pts[i, j]), rel=1e-12
                )

    def test_separable_grid_matches_generic(self):
        mu, d = 1.0, 2
        corpus = builtin_corpus(d, mu)
        sep = corpus.lookup("exp_mu").field
        generic = exp_sum_field(mu, d)
        p = OperatorParams(n=14, mu=mu, d=d)
        g = Grid.uniform(2, 17)
        np.testing.assert_allclose(
            evaluate_on_grid(sep, p, g),
            evaluate_on_grid(generic, p, g),
            rtol=1e-12,
        )

    def test_classical_kind(self):
        f = make_field(lambda pts: np.asarray(pts, dtype=float)[:, 0], 2, "pr1")
        p = OperatorParams(n=6, mu=1.0, d=2)
        g = Grid.uniform(2, 9)
        vals = evaluate_on_grid(f, p, g, CLASSICAL)
        np.testing.assert_allclose(vals, g.axes[0][:, None] * np.ones(9), atol=1e-14)

    def test_kind_validation(self):
        with pytest.raises(ValueError):
            evaluate_on_grid(ones_field(1), OperatorParams(n=3, mu=1.0, d=1),
                             Grid.uniform(1, 9), "fancy")


class TestSupError:
    def test_reproduced_function_at_floor(self):
        mu, d = 1.0, 2
        f = builtin_corpus(d, mu).lookup("exp_mu").field
        p = OperatorParams(n=50, mu=mu, d=d)
        assert sup_error(f, p, Grid.uniform(d)) <= 1e-11 * math.exp(mu * d)

    def test_e0_bound_two_dim(self):
        mu, d, n = 1.0, 2, 100
        f = ones_field(d)
        p = OperatorParams(n=n, mu=mu, d=d)
        err = sup_error(f, p, Grid.uniform(d))
        assert err <= mu**2 / n * (1.0 + math.exp(mu))

    def test_refinement_can_only_grow_sup(self):
        f = make_field(
            lambda pts: np.abs(np.mean(np.asarray(pts, dtype=float), axis=1) - 0.5), 2
        )
        p = OperatorParams(n=20, mu=1.0, d=2)
        coarse = Grid.uniform(2, 17)
        fine = Grid.uniform(2, 65)  # superset of the 17-point axes
        assert sup_error(f, p, fine) >= sup_error(f, p, coarse)

    def test_grid_dimension_mismatch(self):
        with pytest.raises(ValueError):
            sup_error(ones_field(2), OperatorParams(n=3, mu=1.0, d=2), Grid.uniform(1))
