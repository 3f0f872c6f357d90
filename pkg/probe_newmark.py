import time

import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs, strain_at_gauss, internal_force)
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import (LoadCase, compare_error, newmark_quasi_newton,
                              resample_fields_to_gauss)
from latinpgd.timegrid import TimeGrid

PAR = reference_concrete()
HOOKE = PAR.hooke()


def build(mesh, damping=False):
    M = assemble_mass(mesh, PAR.rho)
    K = assemble_stiffness(mesh, HOOKE)
    C = None
    if damping:
        al, be = rayleigh_coeffs(PAR.xi, 8.99, 45.8)
        C = al * M + be * K
    return SpatialSystem(mesh, M, K, C)


class SmoothStep:
    """g = A/2 (1 - cos(pi t / t_b)) up to t_b, then A (C^1 support motion)."""

    def __init__(self, amp, t_b):
        self.amp, self.t_b = amp, t_b

    def prescribed_motion(self, mesh, times):
        t = np.asarray(times, dtype=float)
        w = np.pi / self.t_b
        ramp = t < self.t_b
        g = np.where(ramp, 0.5 * self.amp * (1 - np.cos(w * t)), self.amp)
        gd = np.where(ramp, 0.5 * self.amp * w * np.sin(w * t), 0.0)
        gdd = np.where(ramp, 0.5 * self.amp * w * w * np.cos(w * t), 0.0)
        out = []
        vertical = mesh.prescribed_dofs % 3 == 2
        for s in (g, gd, gdd):
            f = np.zeros((mesh.prescribed_dofs.size, t.size))
            f[vertical] = s
            out.append(f)
        return tuple(out)


print("=== 1. compare_error example: ref scaled 1.01 over plain fields ===")
rng = np.random.default_rng(0)
e = rng.normal(size=(40, 16, 6))
s = rng.normal(size=(40, 16, 6))
print("err =", compare_error(1.01 * e, 1.01 * s, e, s), " (expect 1.40021)")

print("=== 2. elastic bit-identity: damage on, sub-threshold, undamped cube ===")
cube = generate_box_mesh(1.0, 1.0, 1.0, 2, 2, 2, support="line")
sys_c = build(cube)
times = np.linspace(0.0, 0.01, 41)
load = LoadCase([1e-7], [100.0])
r_el = newmark_quasi_newton(sys_c, PAR, load, times, damage=False)
r_dm = newmark_quasi_newton(sys_c, PAR, load, times, damage=True)
for f in ("u", "eps", "sig"):
    print(f, "identical:", np.array_equal(r_el[f], r_dm[f]))
print("d max:", r_dm["d"].max(), " facts:", r_el["info"]["factorizations"],
      r_dm["info"]["factorizations"], " iters max:", r_el["info"]["iterations"].max())

print("=== 3. energy drift, ringdown after smooth step (cube, undamped) ===")
f1 = np.sqrt(sys_c.modal(1)[0][0]) / (2 * np.pi)
print("cube f1 =", f1, "Hz")
t_b = 2.0 / f1
T = t_b + 10.0 / f1
n = int(round(T * f1 * 40))  # 40 steps per period
times_e = np.linspace(0.0, T, n + 1)
r = newmark_quasi_newton(sys_c, PAR, SmoothStep(1e-4, t_b), times_e, damage=False)
M, K = sys_c.M.toarray(), sys_c.K.toarray()
en = 0.5 * np.einsum("it,ij,jt->t", r["v"], M, r["v"]) \
    + 0.5 * np.einsum("it,ij,jt->t", r["u"], K, r["u"])
after = times_e >= t_b
e_ring = en[after]
print("energy rel drift:", np.ptp(e_ring) / e_ring.mean(),
      " iters max:", r["info"]["iterations"].max())

print("=== 4. quasi-static limit (slow sine, undamped cube) ===")
slow = LoadCase([1e-5], [0.05])  # ~14000x below f1
times_s = np.linspace(0.0, 10.0, 201)
r = newmark_quasi_newton(sys_c, PAR, slow, times_s, damage=False)
# static elastic solve at the final support position
g_T = slow.signal(times_s[-1:])[0][0]
up = np.zeros(cube.prescribed_dofs.size)
up[cube.prescribed_dofs % 3 == 2] = g_T
u_stat = np.zeros(cube.n_dofs)
u_stat[cube.prescribed_dofs] = up
u_stat[cube.free_dofs] = sys_c.solve_free(0.0, 0.0, 1.0, -sys_c.Kfp @ up)
gap = np.abs(r["u"][:, -1] - u_stat).max() / np.abs(u_stat).max()
print("relative gap to static solve at t=T:", gap)

print("=== 5. desk beam, damped, damaging mono-sine (calibration sweep) ===")
beam = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2, support="line")
sys_b = build(beam, damping=True)
grid = TimeGrid(2.0, 100)
times_b = np.linspace(0.0, 2.0, 201)
for A in (0.02, 0.03, 0.04):
    t0 = time.perf_counter()
    res = newmark_quasi_newton(sys_b, PAR, LoadCase([A], [3.0]), times_b)
    wall = time.perf_counter() - t0
    it = res["info"]["iterations"]
    print("A=%.3f  d_max=%.4f  wall=%.2fs  facts=%d  iters(max/mean)=%d/%.2f"
          % (A, res["d"].max(), wall, res["info"]["factorizations"],
             it.max(), it.mean()))

print("=== 6. resample wiring ===")
ge, gs = resample_fields_to_gauss(grid, res)
print("shapes:", ge.shape, gs.shape, " (expect (%d, %d, 6))" % (beam.n_gauss, grid.n_gauss))
err_self = compare_error(ge, gs, ge, gs)
print("self compare:", err_self)
