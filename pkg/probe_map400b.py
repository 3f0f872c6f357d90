"""Probe: upper reach of the stable branch at N_T=400."""
import time

import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase, newmark_quasi_newton

PAR = reference_concrete()
mesh = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(mesh, PAR.rho)
K = assemble_stiffness(mesh, PAR.hooke())
al, be = rayleigh_coeffs(PAR.xi, 8.99, 45.8)
system = SpatialSystem(mesh, M, K, al * M + be * K)
times = np.linspace(0.0, 2.0, 801)

for amp in (0.0098, 0.0100, 0.0104, 0.0110, 0.0120):
    load = LoadCase(np.array([amp]), np.array([3.0]))
    t0 = time.perf_counter()
    try:
        res = newmark_quasi_newton(system, PAR, load, times)
    except RuntimeError as exc:
        print(f"A={amp:.4f}  FAILED: {exc}", flush=True)
        continue
    wall = time.perf_counter() - t0
    d = res["d"]
    gp = int(np.unravel_index(d.argmax(), d.shape)[0])
    print(f"A={amp:.4f}  d_max={d.max():.4f} (gp {gp:4d})  "
          f"iters_mean={res['info']['iterations'].mean():6.2f}  wall={wall:.1f}s",
          flush=True)
