"""Probe: freeze expected values for the marching-solver test module."""
import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase, newmark_quasi_newton

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


# --- quasi-static limit: slow sine on the cube, evaluate at the signal peak
cube = generate_box_mesh(2.0, 2.0, 2.0, 2, 2, 2)
sys_c = build(cube)
f_slow = 0.05                       # period 20 s >> cube f1 ~ 1/700 s
T = 5.0                             # quarter period: g(T) = A
times = np.linspace(0.0, T, 2001)
amp = 1e-4
res = newmark_quasi_newton(sys_c, PAR, LoadCase(np.array([amp]), np.array([f_slow])),
                           times, damage=False)
u_p = np.zeros(cube.prescribed_dofs.size)
u_p[cube.prescribed_dofs % 3 == 2] = amp * np.sin(2 * np.pi * f_slow * T)
u_stat = sys_c.solve_free(0.0, 0.0, 1.0, -sys_c.Kfp @ u_p)
gap = (np.linalg.norm(res["u"][cube.free_dofs, -1] - u_stat)
       / np.linalg.norm(u_stat))
print(f"quasi-static gap at signal peak: {gap:.3e}")

# --- sub-threshold purity on the desk beam (bootstrap regression)
beam = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
sys_b = build(beam, damping=True)
times_b = np.linspace(0.0, 2.0, 201)
load = LoadCase(np.array([0.0070]), np.array([3.0]))
on = newmark_quasi_newton(sys_b, PAR, load, times_b, damage=True)
off = newmark_quasi_newton(sys_b, PAR, load, times_b, damage=False)
print("desk beam A=0.0070: d_max =", on["d"].max(),
      " u identical:", np.array_equal(on["u"], off["u"]),
      " sig identical:", np.array_equal(on["sig"], off["sig"]))

# --- calibrated run values (preset-to-be)
times_f = np.linspace(0.0, 2.0, 801)
cal = newmark_quasi_newton(sys_b, PAR, LoadCase(np.array([0.00965]), np.array([3.0])),
                           times_f)
d = cal["d"]
gp = int(np.unravel_index(d.argmax(), d.shape)[0])
mono = np.all(np.diff(d, axis=1) >= -1e-15)
print(f"calibrated A=0.00965: d_max={d.max():.6f} (gp {gp}), monotone={mono}, "
      f"bounds ok={bool((d >= 0).all() and (d <= 1).all())}, "
      f"facts={cal['info']['factorizations']}")

# --- fast non-convergence case for the error-path test
try:
    newmark_quasi_newton(sys_b, PAR, LoadCase(np.array([0.02]), np.array([3.0])),
                         np.linspace(0.0, 2.0, 201), max_iter=4)
    print("no failure?!")
except RuntimeError as exc:
    print("non-convergence message:", exc)
