"""Marching-solver checks: load signals, elastic limits, damage, comparison."""

import numpy as np
import pytest

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import (LoadCase, compare_error, newmark_quasi_newton,
                              resample_fields_to_gauss)
from latinpgd.timegrid import TimeGrid

PARAMS = reference_concrete()
HOOKE = PARAMS.hooke()


def build_system(mesh, damping=False):
    M = assemble_mass(mesh, PARAMS.rho)
    K = assemble_stiffness(mesh, HOOKE)
    C = None
    if damping:
        alpha, beta = rayleigh_coeffs(PARAMS.xi, 8.99, 45.8)
        C = alpha * M + beta * K
    return SpatialSystem(mesh, M, K, C)


def cube_system():
    return build_system(generate_box_mesh(1.0, 1.0, 1.0, 2, 2, 2, support="line"))


def desk_system():
    return build_system(generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2), damping=True)


class SmoothStep:
    """Support motion g = A/2 (1 - cos(pi t / t_b)) up to t_b, then A.

    A C^1 alternative to the sine signal; also exercises the duck-typed
    load protocol (anything with prescribed_motion works).
    """

    def __init__(self, amp, t_b):
        self.amp, self.t_b = amp, t_b

    def prescribed_motion(self, mesh, times):
        t = np.asarray(times, dtype=float)
        w = np.pi / self.t_b
        ramp = t < self.t_b
        g = np.where(ramp, 0.5 * self.amp * (1.0 - np.cos(w * t)), self.amp)
        gd = np.where(ramp, 0.5 * self.amp * w * np.sin(w * t), 0.0)
        gdd = np.where(ramp, 0.5 * self.amp * w * w * np.cos(w * t), 0.0)
        vertical = mesh.prescribed_dofs % 3 == 2
        out = []
        for s in (g, gd, gdd):
            f = np.zeros((mesh.prescribed_dofs.size, t.size))
            f[vertical] = s
            out.append(f)
        return tuple(out)


class TestLoadCase:
    def test_signal_closed_forms_match_finite_differences(self):
        rng = np.random.default_rng(11)
        t = np.linspace(0.0, 3.0, 2001)
        h = t[1] - t[0]
        for _ in range(20):
            n = rng.integers(1, 4)
            load = LoadCase(rng.uniform(0.1, 2.0, n), rng.uniform(0.2, 4.0, n))
            g, gd, gdd = load.signal(t)
            assert np.allclose(np.gradient(g, h)[2:-2], gd[2:-2],
                               atol=1e-3 * np.abs(gd).max())
            assert np.allclose(np.gradient(gd, h)[2:-2], gdd[2:-2],
                               atol=1e-3 * np.abs(gdd).max())

    def test_signal_at_zero(self):
        load = LoadCase(np.array([0.3, 0.1]), np.array([1.0, 5.0]))
        g, gd, gdd = load.signal(np.array([0.0]))
        assert g[0] == 0.0
        assert gd[0] == pytest.approx(2 * np.pi * (0.3 * 1.0 + 0.1 * 5.0))
        assert gdd[0] == 0.0

    def test_rejects_mismatched_components(self):
        with pytest.raises(ValueError):
            LoadCase(np.array([1.0, 2.0]), np.array([1.0]))

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            LoadCase(np.array([1.0]), np.array([0.0]))

    def test_prescribed_motion_moves_vertical_rows_only(self):
        mesh = generate_box_mesh(1.0, 1.0, 1.0, 2, 2, 2, support="face")
        load = LoadCase(np.array([1e-3]), np.array([2.0]))
        t = np.linspace(0.0, 1.0, 11)
        u_p, v_p, a_p = load.prescribed_motion(mesh, t)
        assert u_p.shape == (mesh.prescribed_dofs.size, t.size)
        vertical = mesh.prescribed_dofs % 3 == 2
        assert np.all(u_p[~vertical] == 0.0)
        assert np.all(v_p[~vertical] == 0.0)
        g, gd, _ = load.signal(t)
        assert np.allclose(u_p[vertical], g)
        assert np.allclose(v_p[vertical], gd)
        assert np.allclose(a_p[vertical][:, 0], 0.0)


class TestElasticLimits:
    def test_quasi_static_limit_matches_static_solve(self):
        # forcing period 20 s vs cube first period ~1.4 ms: evaluate at the
        # signal peak (quarter period) against the static elastic solve
        system = cube_system()
        mesh = system.mesh
        f_slow, amp = 0.05, 1e-4
        times = np.linspace(0.0, 5.0, 2001)
        res = newmark_quasi_newton(system, PARAMS,
                                   LoadCase(np.array([amp]), np.array([f_slow])),
                                   times, damage=False)
        u_p = np.zeros(mesh.prescribed_dofs.size)
        u_p[mesh.prescribed_dofs % 3 == 2] = amp * np.sin(2 * np.pi * f_slow * 5.0)
        u_stat = system.solve_free(0.0, 0.0, 1.0, -system.Kfp @ u_p)
        gap = (np.linalg.norm(res["u"][mesh.free_dofs, -1] - u_stat)
               / np.linalg.norm(u_stat))
        assert gap < 5e-4  # measured 6.55e-5

    def test_energy_conserved_through_ringdown(self):
        # smooth support step, then free vibration: with no damping the
        # discrete energy must drift by far less than 0.1% over ten periods
        system = cube_system()
        f1 = system.modal(1)[0][0]
        t_b = 2.0 / f1
        T = t_b + 10.0 / f1
        n = int(round(T * f1 * 40))
        times = np.linspace(0.0, T, n + 1)
        res = newmark_quasi_newton(system, PARAMS, SmoothStep(1e-4, t_b), times,
                                   damage=False)
        M, K = system.M.toarray(), system.K.toarray()
        energy = (0.5 * np.einsum("it,ij,jt->t", res["v"], M, res["v"])
                  + 0.5 * np.einsum("it,ij,jt->t", res["u"], K, res["u"]))
        ring = energy[times >= t_b]
        assert np.ptp(ring) / ring.mean() < 1e-3  # measured ~1e-11

    def test_elastic_steps_need_one_correction(self):
        system = cube_system()
        times = np.linspace(0.0, 0.01, 41)
        res = newmark_quasi_newton(system, PARAMS,
                                   LoadCase(np.array([1e-7]), np.array([100.0])),
                                   times, damage=False)
        assert res["info"]["iterations"].max() == 1
        assert res["info"]["factorizations"] == 1

    def test_initial_fields_match_initial_support_position(self):
        system = cube_system()
        times = np.linspace(0.0, 0.01, 11)
        res = newmark_quasi_newton(system, PARAMS,
                                   LoadCase(np.array([1e-6]), np.array([50.0])),
                                   times, damage=False)
        # sine starts at zero support displacement and the body at rest
        assert np.all(res["u"][:, 0] == 0.0)
        assert np.all(res["eps"][:, 0] == 0.0)
        assert np.all(res["sig"][:, 0] == 0.0)


class TestDamageCommitment:
    def test_sub_threshold_run_is_bitwise_elastic(self):
        # strains stay below the damage threshold for the whole realized
        # trajectory, so the damage machinery must not alter a single bit --
        # in particular no equilibrium iterate may bootstrap a spurious
        # damaged solution branch (amplitude chosen just under the onset)
        system = desk_system()
        times = np.linspace(0.0, 2.0, 201)
        load = LoadCase(np.array([0.0070]), np.array([3.0]))
        on = newmark_quasi_newton(system, PARAMS, load, times, damage=True)
        off = newmark_quasi_newton(system, PARAMS, load, times, damage=False)
        assert on["d"].max() == 0.0
        assert np.array_equal(on["u"], off["u"])
        assert np.array_equal(on["eps"], off["eps"])
        assert np.array_equal(on["sig"], off["sig"])

    def test_sub_threshold_bit_identity_on_cube(self):
        system = cube_system()
        times = np.linspace(0.0, 0.01, 41)
        load = LoadCase(np.array([1e-7]), np.array([100.0]))
        on = newmark_quasi_newton(system, PARAMS, load, times, damage=True)
        off = newmark_quasi_newton(system, PARAMS, load, times, damage=False)
        assert on["d"].max() == 0.0
        for field in ("u", "v", "a", "eps", "sig"):
            assert np.array_equal(on[field], off[field])

    def test_calibrated_run_lands_in_damage_band(self):
        # 3 Hz support sine at the swept amplitude: the largest damage on
        # the desk mesh must sit in the 0.40-0.45 band
        system = desk_system()
        times = np.linspace(0.0, 2.0, 801)
        load = LoadCase(np.array([0.00965]), np.array([3.0]))
        res = newmark_quasi_newton(system, PARAMS, load, times)
        d = res["d"]
        assert d.max() == pytest.approx(0.420865, abs=1e-4)
        assert 0.40 <= d.max() <= 0.45
        assert res["info"]["factorizations"] == 1
        # damage is a non-decreasing, bounded history at every point
        assert np.all(np.diff(d, axis=1) >= 0.0)
        assert d.min() >= 0.0 and d.max() <= 1.0

    def test_nonconvergence_reports_step(self):
        system = desk_system()
        times = np.linspace(0.0, 2.0, 201)
        load = LoadCase(np.array([0.02]), np.array([3.0]))
        with pytest.raises(RuntimeError, match="step 4"):
            newmark_quasi_newton(system, PARAMS, load, times, max_iter=4)


class TestValidation:
    def test_rejects_nonzero_start(self):
        system = cube_system()
        with pytest.raises(ValueError):
            newmark_quasi_newton(system, PARAMS,
                                 LoadCase(np.array([1e-6]), np.array([1.0])),
                                 np.linspace(0.5, 1.0, 11))

    def test_rejects_nonuniform_times(self):
        system = cube_system()
        times = np.array([0.0, 0.1, 0.25, 0.3])
        with pytest.raises(ValueError):
            newmark_quasi_newton(system, PARAMS,
                                 LoadCase(np.array([1e-6]), np.array([1.0])),
                                 times)

    def test_rejects_single_node(self):
        system = cube_system()
        with pytest.raises(ValueError):
            newmark_quasi_newton(system, PARAMS,
                                 LoadCase(np.array([1e-6]), np.array([1.0])),
                                 np.array([0.0]))


class TestResample:
    def test_shapes_and_constant_fields(self):
        system = cube_system()
        grid = TimeGrid(0.02, 5)
        times = np.linspace(0.0, 0.02, 11)
        res = newmark_quasi_newton(system, PARAMS,
                                   LoadCase(np.array([1e-7]), np.array([10.0])),
                                   times, damage=False)
        eps_g, sig_g = resample_fields_to_gauss(grid, res)
        assert eps_g.shape == (system.mesh.n_gauss, grid.n_gauss, 6)
        assert sig_g.shape == eps_g.shape
        # a time-constant history resamples exactly (cubic fit of a constant)
        res_const = dict(res)
        res_const["eps"] = np.repeat(res["eps"][:, :1], times.size, axis=1)
        res_const["sig"] = np.repeat(res["sig"][:, :1], times.size, axis=1)
        eps_c, _ = resample_fields_to_gauss(grid, res_const)
        assert np.allclose(eps_c, res["eps"][:, :1], atol=1e-14)

    def test_rejects_mismatched_grid(self):
        system = cube_system()
        times = np.linspace(0.0, 0.02, 11)
        res = newmark_quasi_newton(system, PARAMS,
                                   LoadCase(np.array([1e-7]), np.array([10.0])),
                                   times, damage=False)
        with pytest.raises(ValueError):
            resample_fields_to_gauss(TimeGrid(0.02, 4), res)
        with pytest.raises(ValueError):
            resample_fields_to_gauss(TimeGrid(0.04, 5), res)


class TestCompareError:
    def test_identical_fields_give_zero(self):
        rng = np.random.default_rng(3)
        e = rng.normal(size=(10, 7, 6))
        s = rng.normal(size=(10, 7, 6))
        assert compare_error(e, s, e, s) == 0.0

    def test_uniform_one_percent_scale(self):
        # fields at 1.01x the reference: 100 * sqrt(2) * 0.01 / 1.01
        rng = np.random.default_rng(4)
        e = rng.normal(size=(40, 16, 6))
        s = rng.normal(size=(40, 16, 6))
        err = compare_error(1.01 * e, 1.01 * s, e, s)
        assert err == pytest.approx(1.400211447894155, rel=1e-12)
        assert err == pytest.approx(100.0 * np.sqrt(2) * 0.01 / 1.01, rel=1e-3)

    def test_scale_invariance(self):
        rng = np.random.default_rng(5)
        e_ref = rng.normal(size=(8, 5, 6))
        s_ref = rng.normal(size=(8, 5, 6))
        e = e_ref + 0.01 * rng.normal(size=e_ref.shape)
        s = s_ref + 0.01 * rng.normal(size=s_ref.shape)
        base = compare_error(e_ref, s_ref, e, s)
        for c in (1e-6, 3.7, 1e6):
            scaled = compare_error(c * e_ref, c * s_ref, c * e, c * s)
            assert scaled == pytest.approx(base, rel=1e-12)

    def test_rejects_shape_mismatch(self):
        a = np.zeros((4, 3, 6))
        b = np.zeros((4, 2, 6))
        with pytest.raises(ValueError):
            compare_error(a, a, b, np.zeros((4, 2, 6)))

    def test_rejects_vanishing_reference(self):
        z = np.zeros((4, 3, 6))
        with pytest.raises(ValueError):
            compare_error(z, z, z, z)
