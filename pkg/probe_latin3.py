"""Instrumented LATIN run: xi and RSS per iteration."""
import resource
import sys

import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.latin import run_latin
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase
from latinpgd.timegrid import TimeGrid

PARAMS = reference_concrete()
HOOKE = PARAMS.hooke()

mesh = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(mesh, PARAMS.rho)
K = assemble_stiffness(mesh, HOOKE)
alpha, beta = rayleigh_coeffs(PARAMS.xi, 8.99, 45.8)
system = SpatialSystem(mesh, M, K, alpha * M + beta * K)

A = float(sys.argv[1]) if len(sys.argv) > 1 else 0.0138
n_el = int(sys.argv[2]) if len(sys.argv) > 2 else 400
load = LoadCase(np.array([A]), np.array([3.0]))
grid = TimeGrid(2.0, n_el)


def cb(state):
    row = state.log[-1]
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1e6
    print("it=%2d modes=%2d xi=%.4e cre=%.3e sec=%.1f rss=%.2fGB"
          % (row["iteration"], row["modes"], row["xi"], row["cre"],
             row["seconds"], rss), flush=True)


state = run_latin(system, PARAMS, load, grid, zeta_stop=5e-4, callback=cb)
print("converged=%s modes=%d xi=%.3e" % (state.converged, state.n_modes, state.xi))
print("d_max=%.6f at gp %d" % (state.damage.max(), state.monitored_point()))
