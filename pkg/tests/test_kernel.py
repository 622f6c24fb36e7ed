import math

import numpy as np
import pytest
from scipy.linalg import lu_factor, lu_solve

from fracac.kernel import (
    apply_averaging,
    apply_averaging_along_axis,
    apply_explicit,
    apply_explicit_fast,
    apply_frac_difference,
    apply_matrix_along_axis,
    assemble_direction,
    build_coefficients,
    solve_along_axis,
    solve_line,
)

from _oracles import closed_form_coefficients, dense_direction_matrices

ALPHAS = [1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0]


def _line(m, rng=None):
    v = np.zeros(m + 1)
    if rng is not None:
        v[1:-1] = rng.standard_normal(m - 1)
    return v


class TestCoefficients:
    def test_alpha2_is_classical_stencil(self):
        table = build_coefficients(2.0, 4)
        assert table.coeffs.tolist() == [2.0, -1.0, 0.0, 0.0, 0.0]

    def test_alpha_15_first_two(self):
        table = build_coefficients(1.5, 1)
        assert table.coeffs[0] == pytest.approx(1.573787, abs=5e-7)
        assert table.coeffs[1] == pytest.approx(-0.674480, abs=5e-7)

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_matches_closed_form(self, alpha):
        rec = build_coefficients(alpha, 200).coeffs
        ref = closed_form_coefficients(alpha, 200)
        scale = np.maximum(np.abs(ref), 1e-300)
        rel = np.where(ref == 0.0, np.abs(rec), np.abs(rec - ref) / scale)
        assert rel.max() <= 1e-12

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_sign_and_dominance(self, alpha):
        c = build_coefficients(alpha, 200).coeffs
        assert c[0] > 0.0
        assert np.all(c[1:] <= 0.0)
        tail = 2.0 * np.abs(c[1:]).sum()
        if alpha < 2.0:
            assert tail < c[0]
        else:
            # the tail vanishes at alpha = 2, so the bound is an equality there
            assert tail == pytest.approx(c[0], rel=1e-15)

    def test_domain_errors(self):
        for bad in (1.0, 0.9, 2.5, -1.0):
            with pytest.raises(ValueError):
                build_coefficients(bad, 4)
        with pytest.raises(ValueError):
            build_coefficients(1.5, 0)


class TestFracDifference:
    def test_zero_line(self):
        table = build_coefficients(1.5, 10)
        out = apply_frac_difference(table, np.zeros(9))
        assert np.all(out == 0.0)

    def test_alpha2_spike(self):
        m = 10
        table = build_coefficients(2.0, m)
        line = _line(m)
        j = 4
        line[j] = 1.0
        out = apply_frac_difference(table, line)
        expected = np.zeros(m + 1)
        expected[j] = -2.0
        expected[j - 1] = expected[j + 1] = 1.0
        assert np.allclose(out, expected, atol=0.0)
        assert out[0] == 0.0 and out[-1] == 0.0

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(3)
        m = 8
        _, C, _ = dense_direction_matrices(1.5, 1.0, 1.0, 1.0 / m, m)
        table = build_coefficients(1.5, m)
        line = _line(m, rng)
        out = apply_frac_difference(table, line)
        assert np.allclose(out[1:-1], C @ line[1:-1], rtol=0.0, atol=1e-14)

    def test_table_too_short(self):
        table = build_coefficients(1.5, 2)
        with pytest.raises(ValueError):
            apply_frac_difference(table, np.zeros(8))


class TestAveraging:
    def test_constant_one_away_from_boundary(self):
        line = np.zeros(11)
        line[1:-1] = 1.0
        out = apply_averaging(1.7, line)
        assert np.allclose(out[2:-2], 1.0, rtol=0.0, atol=1e-15)

    def test_alpha2_spike_weights(self):
        line = _line(10)
        line[5] = 1.0
        out = apply_averaging(2.0, line)
        assert out[4] == pytest.approx(1.0 / 12.0, rel=1e-15)
        assert out[5] == pytest.approx(5.0 / 6.0, rel=1e-15)
        assert out[6] == pytest.approx(1.0 / 12.0, rel=1e-15)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(4)
        m = 9
        A, _, _ = dense_direction_matrices(1.3, 1.0, 1.0, 1.0 / m, m)
        line = _line(m, rng)
        out = apply_averaging(1.3, line)
        assert np.allclose(out[1:-1], A @ line[1:-1], rtol=0.0, atol=1e-15)

    def test_reads_boundary_samples(self):
        # source-term lines are nonzero at the ends and the stencil must see them
        line = np.zeros(6)
        line[0] = 2.0
        out = apply_averaging(1.5, line)
        assert out[1] == pytest.approx(2.0 * 1.5 / 24.0, rel=1e-15)


class TestAssembly:
    def test_beta_zero_is_identity(self):
        rng = np.random.default_rng(5)
        op = assemble_direction(1.5, 0.0, 1.0, 0.1, 12)
        assert op.beta == 0.0
        line = _line(12, rng)
        roundtrip = solve_line(op, apply_explicit(op, line))
        assert np.allclose(roundtrip, line, rtol=0.0, atol=1e-12)

    def test_alpha2_order2_matrix(self):
        m = 6
        op = assemble_direction(2.0, 1.0, 0.5, 1.0 / m, m, spatial_order=2)
        n = m - 1
        lap = np.diag(np.full(n, 2.0)) + np.diag(np.full(n - 1, -1.0), 1) + np.diag(
            np.full(n - 1, -1.0), -1
        )
        assert np.allclose(op.implicit_matrix, np.eye(n) + op.beta * lap, atol=1e-15)

    @pytest.mark.parametrize("spatial_order", [2, 4])
    def test_matches_entrywise_oracle(self, spatial_order):
        alpha, eps, dt, m = 1.5, 0.7, 0.25, 8
        h = 1.0 / m
        A, C, beta = dense_direction_matrices(alpha, eps, dt, h, m, spatial_order)
        op = assemble_direction(alpha, eps, dt, h, m, spatial_order)
        assert op.beta == pytest.approx(beta, rel=1e-15)
        assert np.allclose(op.explicit_matrix, A + beta * C, rtol=0.0, atol=1e-13)
        assert np.allclose(op.implicit_matrix, A - beta * C, rtol=0.0, atol=1e-13)

    def test_degenerate_two_intervals(self):
        op = assemble_direction(1.5, 1.0, 0.1, 0.5, 2)
        assert op.explicit_matrix.shape == (1, 1)
        line = np.array([0.0, 3.0, 0.0])
        rhs = np.array([0.0, float(op.implicit_matrix[0, 0]) * 3.0, 0.0])
        assert np.allclose(solve_line(op, rhs), line, atol=1e-13)
        assert apply_explicit(op, line)[1] == pytest.approx(
            3.0 * float(op.explicit_matrix[0, 0]), rel=1e-15
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            assemble_direction(1.5, 1.0, 0.1, 0.1, 1)
        with pytest.raises(ValueError):
            assemble_direction(1.5, 1.0, 0.0, 0.1, 8)
        with pytest.raises(ValueError):
            assemble_direction(1.5, 1.0, 0.1, 0.1, 8, spatial_order=3)
        with pytest.raises(ValueError):
            assemble_direction(1.5, -1.0, 0.1, 0.1, 8)

    @pytest.mark.parametrize("alpha", [1.1, 1.5, 2.0])
    @pytest.mark.parametrize("scale", [1e-3, 1.0, 1e3])
    def test_implicit_strictly_diagonally_dominant(self, alpha, scale):
        m = 24
        op = assemble_direction(alpha, scale, 1.0, 1.0 / m, m)
        M = np.abs(op.implicit_matrix)
        diag = np.diag(M)
        off = M.sum(axis=1) - diag
        assert np.all(diag > off)

    def test_interior_equals_full_matrix_formulation(self):
        # the (M+1)-sized matrices with arbitrary boundary rows act identically
        # on zero-framed vectors
        alpha, eps, dt, m = 1.7, 0.8, 0.3, 9
        h = 1.0 / m
        op = assemble_direction(alpha, eps, dt, h, m)
        c = build_coefficients(alpha, m).coeffs
        n_full = m + 1
        C_full = np.zeros((n_full, n_full))
        for i in range(1, m):
            for j in range(1, m):
                C_full[i, j] = -c[abs(i - j)]
        C_full[0, 0] = C_full[m, m] = -c[0]  # "arbitrary" boundary convention
        D_full = np.zeros((n_full, n_full))
        for i in range(1, m):
            D_full[i, i] = -2.0
            D_full[i, i - 1] = D_full[i, i + 1] = 1.0
        D_full[0, 0] = D_full[m, m] = -2.0
        A_full = np.eye(n_full) + alpha / 24.0 * D_full
        E_full = A_full + op.beta * C_full
        M_full = A_full - op.beta * C_full

        rng = np.random.default_rng(6)
        line = _line(m, rng)
        explicit = apply_explicit(op, line)
        assert np.allclose((E_full @ line)[1:-1], explicit[1:-1], atol=1e-13)
        solved = solve_line(op, line)
        assert np.allclose(np.linalg.solve(M_full, line)[1:-1], solved[1:-1], atol=1e-12)


class TestSolveLine:
    def test_zero(self):
        op = assemble_direction(1.5, 1.0, 0.1, 0.1, 8)
        assert np.all(solve_line(op, np.zeros(9)) == 0.0)

    def test_roundtrip_and_residual(self):
        rng = np.random.default_rng(7)
        op = assemble_direction(1.7, 1.0, 0.2, 1.0 / 16, 16)
        v = _line(16, rng)
        rhs = np.zeros_like(v)
        rhs[1:-1] = op.implicit_matrix @ v[1:-1]
        x = solve_line(op, rhs)
        assert np.allclose(x, v, rtol=0.0, atol=1e-12)
        residual = op.implicit_matrix @ x[1:-1] - rhs[1:-1]
        assert np.abs(residual).max() <= 1e-12 * np.abs(rhs).max()

    def test_matches_dense_lu_oracle(self):
        rng = np.random.default_rng(8)
        m = 8
        op = assemble_direction(1.7, 1.0, 0.2, 1.0 / m, m)
        A, C, beta = dense_direction_matrices(1.7, 1.0, 0.2, 1.0 / m, m)
        rhs = _line(m, rng)
        expected = lu_solve(lu_factor(A - beta * C), rhs[1:-1])
        assert np.allclose(solve_line(op, rhs)[1:-1], expected, atol=1e-13)

    def test_validation(self):
        op = assemble_direction(1.5, 1.0, 0.1, 0.1, 8)
        with pytest.raises(ValueError):
            solve_line(op, np.zeros(5))
        bad = np.zeros(9)
        bad[0] = 1.0
        with pytest.raises(ValueError):
            solve_line(op, bad)


class TestFastExplicit:
    def test_zero(self):
        op = assemble_direction(1.5, 1.0, 0.1, 0.1, 16)
        assert np.all(apply_explicit_fast(op, np.zeros(17)) == 0.0)

    @pytest.mark.parametrize("m", [8, 64, 1024])
    def test_matches_dense(self, m):
        rng = np.random.default_rng(m)
        op = assemble_direction(1.5, 1.0, 0.05, 1.0 / m, m)
        line = _line(m, rng)
        dense = apply_explicit(op, line)
        fast = apply_explicit_fast(op, line)
        assert np.abs(dense - fast).max() <= 1e-12 * max(1.0, np.abs(dense).max())

    def test_alpha2_spike_stencil(self):
        m = 16
        op = assemble_direction(2.0, 1.0, 0.1, 1.0 / m, m)
        line = _line(m)
        j = 8
        line[j] = 1.0
        out = apply_explicit_fast(op, line)
        w0, w1 = 5.0 / 6.0, 1.0 / 12.0
        beta = op.beta
        assert out[j] == pytest.approx(w0 - 2.0 * beta, rel=1e-13)
        assert out[j - 1] == pytest.approx(w1 + beta, rel=1e-13)
        assert out[j + 1] == pytest.approx(w1 + beta, rel=1e-13)
        # FFT round-off only away from the three-point stencil
        assert np.abs(out[: j - 1]).max() <= 1e-14


class TestBatchedHelpers:
    def test_axis_application_matches_lines(self):
        rng = np.random.default_rng(9)
        ms = (6, 7, 8)
        interior = rng.standard_normal([m - 1 for m in ms])
        for axis, m in enumerate(ms):
            op = assemble_direction(1.6, 0.9, 0.2, 1.0 / m, m)
            batched = apply_matrix_along_axis(op.explicit_matrix, interior, axis)
            solved = solve_along_axis(op, interior, axis)
            moved = np.moveaxis(interior, axis, 0)
            b_moved = np.moveaxis(batched, axis, 0)
            s_moved = np.moveaxis(solved, axis, 0)
            for idx in np.ndindex(*moved.shape[1:]):
                line = np.zeros(m + 1)
                line[1:-1] = moved[(slice(None),) + idx]
                assert np.allclose(
                    b_moved[(slice(None),) + idx],
                    apply_explicit(op, line)[1:-1],
                    atol=1e-13,
                )
                assert np.allclose(
                    s_moved[(slice(None),) + idx],
                    solve_line(op, line)[1:-1],
                    atol=1e-12,
                )

    def test_averaging_along_axis_uses_faces(self):
        values = np.zeros((5, 4))
        values[0, :] = 1.0  # nonzero face, as source samples have
        out = apply_averaging_along_axis(1.5, values, axis=0)
        w1 = 1.5 / 24.0
        assert np.allclose(out[1, :], w1)
        assert np.all(out[0, :] == 0.0) and np.all(out[-1, :] == 0.0)

    def test_averaging_along_axis_order2_identity(self):
        values = np.arange(12.0).reshape(3, 4)
        out = apply_averaging_along_axis(1.5, values, axis=0, spatial_order=2)
        assert out is values
