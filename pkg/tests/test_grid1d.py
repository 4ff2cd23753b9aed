import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from blowup_lab import DiscreteFn, make_grid, norms


class TestMakeGrid:
    def test_spacing(self):
        assert make_grid(1.0, 5).h == 0.25
        assert make_grid(2.0, 3).h == 1.0

    def test_node_count_validation(self):
        with pytest.raises(ValueError):
            make_grid(1.0, 2)

    def test_length_validation(self):
        for bad in (0.0, -1.0, float("nan"), float("inf")):
            with pytest.raises(ValueError):
                make_grid(bad, 5)

    def test_weights_sum_to_length(self):
        g = make_grid(2.5, 41)
        assert g.weights.sum() == pytest.approx(2.5, rel=1e-14)


class TestDiscreteFn:
    def test_shape_mismatch(self):
        g = make_grid(1.0, 5)
        with pytest.raises(ValueError):
            DiscreteFn(np.zeros(4), g)

    def test_nonfinite_rejected(self):
        g = make_grid(1.0, 5)
        with pytest.raises(ValueError):
            DiscreteFn([0.0, 1.0, np.nan, 0.0, 0.0], g)

    def test_pinned_flag(self):
        g = make_grid(1.0, 5)
        assert DiscreteFn(g.x, g).pinned
        assert not DiscreteFn(g.x + 1.0, g).pinned


class TestNorms:
    def test_zero_function(self):
        g = make_grid(1.0, 33)
        nv = norms(DiscreteFn(np.zeros(33), g), 4.0)
        assert nv.lp == 0.0 and nv.h1_semi == 0.0 and nv.trace_gamma1 == 0.0

    def test_linear_gradient_exact_any_resolution(self):
        # forward differences of x are exactly 1 on every mesh
        for N in (3, 17, 257, 1001):
            g = make_grid(1.0, N)
            assert norms(DiscreteFn(g.x, g), 4.0).h1_semi == pytest.approx(1.0, abs=1e-14)

    def test_linear_lp_converges_p4(self):
        # int_0^1 x^4 = 1/5
        g = make_grid(1.0, 2049)
        nv = norms(DiscreteFn(g.x, g), 4.0)
        assert nv.lp == pytest.approx(0.2 ** 0.25, rel=1e-6)
        assert nv.trace_gamma1 == 1.0

    def test_linear_lp_converges_p2(self):
        g = make_grid(1.0, 2049)
        assert norms(DiscreteFn(g.x, g), 2.0).lp == pytest.approx((1 / 3) ** 0.5, rel=1e-6)

    def test_quadrature_second_order(self):
        # trapezoid error vs adaptive quadrature shrinks >= 3.5x per halving
        p = 3.0
        exact = quad(lambda x: np.exp(p * x), 0.0, 1.0)[0] ** (1.0 / p)
        errs = []
        for N in (33, 65, 129):
            g = make_grid(1.0, N)
            errs.append(abs(norms(DiscreteFn(np.exp(g.x), g), p).lp - exact))
        assert errs[0] / errs[1] >= 3.5
        assert errs[1] / errs[2] >= 3.5

    @settings(max_examples=50, deadline=None)
    @given(c=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).filter(lambda c: abs(c) > 1e-12))
    def test_homogeneity(self, c):
        g = make_grid(1.0, 65)
        u = np.sin(3.0 * g.x) + g.x ** 2
        base = norms(DiscreteFn(u, g), 4.0)
        scaled = norms(DiscreteFn(c * u, g), 4.0)
        assert scaled.lp == pytest.approx(abs(c) * base.lp, rel=1e-12)
        assert scaled.h1_semi == pytest.approx(abs(c) * base.h1_semi, rel=1e-12)

    def test_invalid_p(self):
        g = make_grid(1.0, 9)
        u = DiscreteFn(g.x, g)
        for bad in (float("nan"), float("inf"), 0.5, -2.0):
            with pytest.raises(ValueError):
                norms(u, bad)
