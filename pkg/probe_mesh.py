"""Fundamental frequency and LATIN iteration cost of candidate meshes."""
import sys
import time

import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               modal_analysis, rayleigh_coeffs)
from latinpgd.latin import run_latin
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase
from latinpgd.timegrid import TimeGrid

PARAMS = reference_concrete()
HOOKE = PARAMS.hooke()

for nx, ny, nz in ((16, 2, 2), (24, 2, 2), (24, 3, 4), (32, 3, 4), (24, 4, 4),
                   (32, 4, 4)):
    mesh = generate_box_mesh(8.0, 0.3, 0.3, nx, ny, nz)
    M = assemble_mass(mesh, PARAMS.rho)
    K = assemble_stiffness(mesh, HOOKE)
    system = SpatialSystem(mesh, M, K, None)
    freqs, _ = modal_analysis(system.Mff, system.Kff, 3)
    f1 = freqs[0]
    print("%dx%dx%d: ndof_free=%d n_gauss=%d f1=%.3f Hz (ratio to 3 Hz: %.2f)"
          % (nx, ny, nz, system.n_free, 8 * mesh.conn.shape[0],
             f1, f1 / 3.0), flush=True)

if len(sys.argv) > 1 and sys.argv[1] == "time":
    for nx, ny, nz, n_el in ((24, 3, 3, 400), (32, 4, 4, 200), (32, 4, 4, 300)):
        mesh = generate_box_mesh(8.0, 0.3, 0.3, nx, ny, nz)
        M = assemble_mass(mesh, PARAMS.rho)
        K = assemble_stiffness(mesh, HOOKE)
        alpha, beta = rayleigh_coeffs(PARAMS.xi, 8.99, 45.8)
        system = SpatialSystem(mesh, M, K, alpha * M + beta * K)
        load = LoadCase(np.array([0.0138]), np.array([3.0]))
        grid = TimeGrid(2.0, n_el)
        t0 = time.perf_counter()
        state = run_latin(system, PARAMS, load, grid, zeta_stop=5e-4,
                          max_modes=3, enrich_zeta=1e-3, enrich_max_iter=10)
        wall = time.perf_counter() - t0
        print("%dx%dx%d N_T=%d: 3 iterations in %.1f s (%.2f s/it incl. init)"
              % (nx, ny, nz, n_el, wall, wall / 3), flush=True)
