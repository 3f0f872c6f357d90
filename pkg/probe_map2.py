"""Damage map at N_T=400 under instantaneous-dbar semantics."""
import sys
import time

import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase, newmark_quasi_newton

PARAMS = reference_concrete()
HOOKE = PARAMS.hooke()

mesh = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(mesh, PARAMS.rho)
K = assemble_stiffness(mesh, HOOKE)
alpha, beta = rayleigh_coeffs(PARAMS.xi, 8.99, 45.8)
system = SpatialSystem(mesh, M, K, alpha * M + beta * K)

N_T = int(sys.argv[1]) if len(sys.argv) > 1 else 400
amps = [float(a) for a in sys.argv[2:]] or [0.010, 0.012, 0.014, 0.016, 0.018, 0.020]
times = np.linspace(0.0, 2.0, 2 * N_T + 1)

for A in amps:
    load = LoadCase(np.array([A]), np.array([3.0]))
    t0 = time.perf_counter()
    try:
        res = newmark_quasi_newton(system, PARAMS, load, times, damage=True)
    except RuntimeError as e:
        print("A=%.5f  FAIL: %s" % (A, e))
        continue
    wall = time.perf_counter() - t0
    d_end = res["d"][:, -1]
    gp = int(d_end.argmax())
    # spatial location of the hot gauss point: element = gp // 8
    el = gp // 8
    cx = mesh.nodes[mesh.conn[el]].mean(axis=0)
    print("A=%.5f  d_max=%.6f  gp=%d  el_center=(%.2f, %.2f, %.2f)  "
          "iters_mean=%.1f  wall=%.0fs"
          % (A, d_end[gp], gp, cx[0], cx[1], cx[2],
             res["info"]["iterations"].mean(), wall))
