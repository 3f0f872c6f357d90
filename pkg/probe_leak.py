"""Track live RSS and tracemalloc growth across LATIN iterations."""
import gc
import tracemalloc

import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.latin import run_latin
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase
from latinpgd.timegrid import TimeGrid

PARAMS = reference_concrete()


def live_rss():
    with open("/proc/self/status") as f:
        for line in f:
            if line.startswith("VmRSS"):
                return int(line.split()[1]) / 1e6  # GB


mesh = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(mesh, PARAMS.rho)
K = assemble_stiffness(mesh, PARAMS.hooke())
alpha, beta = rayleigh_coeffs(PARAMS.xi, 8.99, 45.8)
system = SpatialSystem(mesh, M, K, alpha * M + beta * K)

load = LoadCase(np.array([0.0138]), np.array([3.0]))
grid = TimeGrid(2.0, 400)

tracemalloc.start()
snap = [None]


def cb(state):
    it = state.iteration
    if it % 5 == 0:
        gc.collect()
        cur = tracemalloc.take_snapshot()
        print("it=%2d live_rss=%.2fGB" % (it, live_rss()), flush=True)
        if snap[0] is not None:
            for stat in cur.compare_to(snap[0], "lineno")[:6]:
                if abs(stat.size_diff) > 2e6:
                    print("   %+8.1fMB  %s" % (stat.size_diff / 1e6,
                                               stat.traceback[0]), flush=True)
        snap[0] = cur


state = run_latin(system, PARAMS, load, grid, zeta_stop=5e-4, max_modes=150,
                  callback=cb)
print("end: modes=%d xi=%.3e" % (state.n_modes, state.xi))
