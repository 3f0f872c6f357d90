"""Probe: startup-shock released energy vs time-step size (elastic runs)."""
import time

import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs, strain_at_gauss)
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
load = LoadCase(np.array([0.01]), np.array([3.0]))
T = 2.0

for n_t in (100, 200, 400):
    times = np.linspace(0.0, T, 2 * n_t + 1)
    t0 = time.perf_counter()
    res = newmark_quasi_newton(system, PAR, load, times, damage=False)
    wall = time.perf_counter() - t0
    eps = res["eps"]  # (n_gauss, n_steps, 6)
    Y = released_energy(eps.reshape(-1, 6), HOOKE).reshape(eps.shape[:2])
    shock = res["times"] < 0.3
    Y_shock = Y[:, shock].max()
    Y_steady = Y[:, ~shock].max()
    gp = int(np.unravel_index(Y[:, shock].argmax(), Y[:, shock].shape)[0])
    print(f"N_T={n_t:4d} dt={T/(2*n_t):.5f}  Y_shock={Y_shock:9.2f} (gp {gp:4d})  "
          f"Y_steady={Y_steady:8.2f}  ratio={Y_shock/Y_steady:6.2f}  "
          f"iters={res['info']['iterations'].mean():.2f}  wall={wall:.1f}s")
