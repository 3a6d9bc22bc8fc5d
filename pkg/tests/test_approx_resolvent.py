import math

import numpy as np
import pytest

import dirac_point as dp


Z = dp.SpectralPoint(1j)
ELECTRO = dp.generator_a(0.0, -1.0, -1.0)
LORENTZ = dp.generator_a(0.0, 1.0, -1.0)


def _limit_pair(prof, n):
    grid = dp.grid_for(prof, n)
    return dp.assemble(Z, ELECTRO, prof, 0.0, grid), grid


class TestAssembly:
    def test_q_entries_match_definition(self):
        prof = dp.indicator01()
        grid = dp.grid_for(prof, 16)
        eps = 0.3
        asm = dp.assemble(Z, ELECTRO, prof, eps, grid)
        x, w = grid.nodes, grid.weights
        u, v = prof.u(x), prof.v(x)
        s1a = dp.SIGMA1 @ ELECTRO.matrix()
        for j in (0, 5, 11):
            for l in (2, 5, 15):
                g = 0.5j * (
                    Z.zeta * dp.IDENT2 + np.sign(x[j] - x[l]) * dp.SIGMA1
                ) * np.exp(1j * (eps * Z.z) * Z.zeta * abs(x[j] - x[l]))
                expect = 1j * u[j] * s1a @ g * v[l] * w[l]
                got = asm.q_op.matrix[2 * j : 2 * j + 2, 2 * l : 2 * l + 2]
                assert np.max(np.abs(got - expect)) < 1e-12

    def test_limit_c_kernel_is_g_x0(self):
        prof = dp.indicator01()
        asm, grid = _limit_pair(prof, 32)
        xs = np.array([-1.3, 0.8])
        blocks = asm.c_kernel(xs)
        for i, x in enumerate(xs):
            for j in (0, 17):
                expect = dp.free_kernel(Z, x, 0.0) * prof.v(grid.nodes)[j]
                got = blocks[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
                assert np.max(np.abs(got - expect)) < 1e-14

    def test_spectral_margin_away_from_minus_one(self):
        prof = dp.indicator01()
        asm, _ = _limit_pair(prof, 128)
        assert asm.spectral_margin() > 1e-3

    def test_rejects_odd_pi_multiple(self):
        gen = dp.generator_a(0.0, math.pi, math.pi)  # nu = pi
        prof = dp.indicator01()
        with pytest.raises(dp.NearPole):
            dp.assemble(Z, gen, prof, 0.25, dp.grid_for(prof, 64))

    def test_allows_even_pi_multiple(self):
        gen = dp.generator_a(0.0, 2.0 * math.pi, 2.0 * math.pi)  # nu = 2 pi
        prof = dp.indicator01()
        dp.assemble(Z, gen, prof, 0.25, dp.grid_for(prof, 64))

    def test_rejects_phase_at_pi(self):
        gen = dp.generator_a(1j * math.pi, 0.0, 0.0)
        prof = dp.indicator01()
        with pytest.raises(dp.NearPole):
            dp.assemble(Z, gen, prof, 0.25, dp.grid_for(prof, 64))

    def test_rejects_negative_eps(self):
        prof = dp.indicator01()
        with pytest.raises(dp.ValidationError):
            dp.assemble(Z, ELECTRO, prof, -0.1, dp.grid_for(prof, 64))


class TestKernelLimits:
    def test_kernel_distances_decrease(self):
        prof = dp.indicator01()
        grid = dp.grid_for(prof, 256)
        asm0 = dp.assemble(Z, ELECTRO, prof, 0.0, grid)
        box = np.linspace(-8.0, 8.0, 160)
        box_w = 16.0 / box.size
        q_dist, c_dist, d_dist = [], [], []
        for eps in (0.5, 0.25, 0.125, 0.0625):
            asm = dp.assemble(Z, ELECTRO, prof, eps, grid)
            dq = dp.DiscreteOperator(
                asm.q_op.matrix - asm0.q_op.matrix, grid, block_size=2
            )
            q_dist.append(dq.hs_norm())
            dc = asm.c_kernel(box) - asm0.c_kernel(box)
            wgt = np.sqrt(np.outer(np.full(2 * box.size, box_w),
                                   np.repeat(grid.weights, 2)))
            c_dist.append(float(np.linalg.norm(dc * wgt)))
            dd = asm.d_kernel(box) - asm0.d_kernel(box)
            d_dist.append(float(np.linalg.norm(dd * wgt.T)))
        for seq in (q_dist, c_dist, d_dist):
            assert all(a > b for a, b in zip(seq, seq[1:])), seq

    def test_zero_generator_correction_vanishes(self):
        prof = dp.indicator01()
        gen0 = dp.generator_a(0.0, 0.0, 0.0)
        asm = dp.assemble(Z, gen0, prof, 0.25, dp.grid_for(prof, 64))
        assert np.max(np.abs(asm.correction([1.0], [-1.0]))) < 1e-15
        out = dp.approx_kernel(asm, 1.0, -1.0)
        assert np.max(np.abs(out - dp.free_kernel(Z, 1.0, -1.0))) < 1e-15

    def test_limit_kernel_matches_point_kernel(self):
        prof = dp.indicator01()
        asm, _ = _limit_pair(prof, 1024)
        field = dp.point_kernel(Z, dp.check_admissible(dp.exp2(ELECTRO.matrix())))
        for x, y in ((1.0, -1.0), (-0.7, 2.2), (0.4, 0.9)):
            assert np.max(np.abs(dp.approx_kernel(asm, x, y) - field(x, y))) < 1e-6

    def test_kernel_field_wrapper(self):
        prof = dp.indicator01()
        asm, _ = _limit_pair(prof, 64)
        field = asm.kernel_field()
        assert field.kind == "approx"
        assert np.array_equal(field(0.5, -0.5), dp.approx_kernel(asm, 0.5, -0.5))
        with pytest.raises(dp.ValidationError):
            field.limit_at_zero(+1, 1.0)


class TestVqIdentity:
    def test_zero_generator(self):
        prof = dp.indicator01()
        grid = dp.grid_for(prof, 128)
        asm = dp.assemble(Z, dp.generator_a(0.0, 0.0, 0.0), prof, 0.0, grid)
        assert np.max(np.abs(dp.vq_identity(asm) - dp.IDENT2)) < 1e-12

    def test_electrostatic_closed_form(self):
        prof = dp.indicator01()
        asm, _ = _limit_pair(prof, 512)
        eta = 2.0 * math.tan(0.5)
        expect = eta / (1.0 + 0.5j * eta) * dp.IDENT2
        assert np.max(np.abs(dp.vq_closed_form(ELECTRO, Z, 1.0) - expect)) < 1e-14
        assert np.max(np.abs(dp.vq_identity(asm) - expect)) < 1e-6

    def test_phase_closed_form(self):
        prof = dp.indicator01()
        gen = dp.generator_a(1j, 0.0, 0.0)
        asm = dp.assemble(Z, gen, prof, 0.0, dp.grid_for(prof, 512))
        eta = 2.0 * math.tan(0.5)
        expect = eta * np.linalg.inv(dp.IDENT2 - 0.5j * eta * dp.SIGMA1)
        assert np.max(np.abs(dp.vq_closed_form(gen, Z, 1.0) - expect)) < 1e-14
        assert np.max(np.abs(dp.vq_identity(asm) - expect)) < 1e-6

    def test_requires_limit_assembly(self):
        prof = dp.indicator01()
        asm = dp.assemble(Z, ELECTRO, prof, 0.25, dp.grid_for(prof, 64))
        with pytest.raises(dp.ValidationError):
            dp.vq_identity(asm)


class TestFactorizedInverse:
    def test_agrees_with_dense_solve(self):
        prof = dp.indicator01()
        rng = np.random.default_rng(13)
        for gen in (ELECTRO, LORENTZ, dp.generator_a(0.5, 2.125, 2.0)):
            asm = dp.assemble(Z, gen, prof, 0.0, dp.grid_for(prof, 256))
            for _ in range(10):
                x, y = rng.uniform(-4.0, 4.0, 2)
                direct = asm.correction([x], [y])
                fact = dp.factorized_correction(asm, x, y)
                assert np.max(np.abs(direct - fact)) < 1e-8

    def test_traceless_only(self):
        prof = dp.indicator01()
        gen = dp.generator_a(1j, 0.0, 0.0)
        asm = dp.assemble(Z, gen, prof, 0.0, dp.grid_for(prof, 64))
        with pytest.raises(dp.UnsupportedClass):
            dp.factorized_correction(asm, 1.0, -1.0)


def test_m_matrix_recovery_least_squares():
    prof = dp.indicator01()
    asm, _ = _limit_pair(prof, 512)
    samples = [(x, y) for x in (-2.1, -0.9, 1.1, 2.3) for y in (-1.7, -0.6, 0.8, 1.9)]
    rows, rhs = [], []
    for x, y in samples:
        gx = dp.free_kernel(Z, x, 0.0)
        gy = dp.free_kernel(Z, 0.0, y)
        rows.append(np.kron(gx, gy.T))
        rhs.append(asm.correction([x], [y]).reshape(-1))
    sol, *_ = np.linalg.lstsq(np.vstack(rows), np.concatenate(rhs), rcond=None)
    recovered = sol.reshape(2, 2)
    eta = dp.eta_closed(ELECTRO.nu, 1.0)
    expect = dp.m_closed(Z, ELECTRO, eta)
    assert np.max(np.abs(recovered - expect)) < 1e-6


def test_self_adjointness_proxy():
    prof = dp.indicator01()
    grid = dp.grid_for(prof, 512)
    zbar = dp.SpectralPoint(-1j)
    for gen in (LORENTZ, dp.generator_a(0.5, 2.125, 2.0)):
        asm = dp.assemble(Z, gen, prof, 0.25, grid)
        asm_bar = dp.assemble(zbar, gen, prof, 0.25, grid)
        for x, y in ((1.0, -1.0), (0.3, 0.6), (-2.0, 0.1)):
            lhs = dp.approx_kernel(asm, x, y).conj().T
            rhs = dp.approx_kernel(asm_bar, y, x)
            assert np.max(np.abs(lhs - rhs)) < 1e-8


class TestConvergeTable:
    def test_rows_and_decrease(self):
        prof = dp.indicator01()
        rows = dp.converge_table(
            Z, LORENTZ, prof, [0.5, 0.25, 0.125], box_l=8.0, n_box=96, n_grid=256
        )
        assert [r.eps for r in rows] == [0.5, 0.25, 0.125]
        dists = [r.hs_distance for r in rows]
        assert all(a > b for a, b in zip(dists, dists[1:]))
        assert all(r.error is None for r in rows)
        assert all(r.n_box == 96 and r.n_grid == 256 for r in rows)

    def test_identity_limit_via_even_pi_multiple(self):
        gen = dp.generator_a(0.0, 2.0 * math.pi, 2.0 * math.pi)
        prof = dp.indicator01()
        rows = dp.converge_table(
            Z, gen, prof, [0.5, 0.25, 0.125, 0.0625], box_l=8.0, n_box=96, n_grid=256
        )
        dists = [r.hs_distance for r in rows]
        assert dists[-1] < dists[0]
        assert dists[-1] < 0.05

    def test_rejects_excluded_nu(self):
        gen = dp.generator_a(0.0, math.pi, math.pi)
        prof = dp.indicator01()
        with pytest.raises(dp.NearPole):
            dp.converge_table(Z, gen, prof, [0.5, 0.25], box_l=8.0, n_box=64, n_grid=128)

    def test_validates_eps_list(self):
        prof = dp.indicator01()
        with pytest.raises(dp.ValidationError):
            dp.converge_table(Z, LORENTZ, prof, [0.25, 0.5], box_l=8.0, n_box=64, n_grid=128)
        with pytest.raises(dp.ValidationError):
            dp.converge_table(Z, LORENTZ, prof, [], box_l=8.0, n_box=64, n_grid=128)

    def test_thread_pool_matches_serial(self):
        prof = dp.indicator01()
        kw = dict(box_l=8.0, n_box=64, n_grid=128)
        serial = dp.converge_table(Z, LORENTZ, prof, [0.5, 0.25], **kw)
        threaded = dp.converge_table(Z, LORENTZ, prof, [0.5, 0.25], max_workers=2, **kw)
        assert [r.hs_distance for r in serial] == [r.hs_distance for r in threaded]


def test_box_tail_estimate():
    assert abs(dp.box_tail_estimate(Z, 10.0) - math.exp(-20.0)) < 1e-18
    assert dp.box_tail_estimate(dp.SpectralPoint(2j), 5.0) == math.exp(-20.0)
