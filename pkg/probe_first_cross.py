"""Probe: locate the first damage onset at A=0.0070 and compare with elastic Y."""
import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.material import reference_concrete, released_energy
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase, newmark_quasi_newton

PAR = reference_concrete()
HOOKE = PAR.hooke()
mesh = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(mesh, PAR.rho)
K = assemble_stiffness(mesh, HOOKE)
al, be = rayleigh_coeffs(PAR.xi, 8.99, 45.8)
system = SpatialSystem(mesh, M, K, al * M + be * K)
times = np.linspace(0.0, 2.0, 201)
load = LoadCase(np.array([0.0070]), np.array([3.0]))

el = newmark_quasi_newton(system, PAR, load, times, damage=False)
Yel = released_energy(el["eps"].reshape(-1, 6), HOOKE).reshape(el["eps"].shape[:2])
print(f"elastic:  Y_max={Yel.max():.2f} at (gp,step)={np.unravel_index(Yel.argmax(), Yel.shape)}")
print("elastic Y_max per step (first 40):")
print(np.array2string(Yel.max(axis=0)[:40], precision=1, max_line_width=100))

dm = newmark_quasi_newton(system, PAR, load, times)
Ydm = released_energy(dm["eps"].reshape(-1, 6), HOOKE).reshape(dm["eps"].shape[:2])
d = dm["d"]
onset = np.argmax(d.max(axis=0) > 0.0)
print(f"\ndamage:   first step with d>0: {onset} (t={times[onset]:.3f}), "
      f"d_end={d[:, -1].max():.4f}")
print("damage-run Y_max per step (first 40):")
print(np.array2string(Ydm.max(axis=0)[:40], precision=1, max_line_width=100))
print("d_max per step (first 40):")
print(np.array2string(d.max(axis=0)[:40], precision=4, max_line_width=100))
