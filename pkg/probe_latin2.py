"""LATIN vs NNR at the recalibrated amplitude, N_T=400."""
import sys
import time

import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.latin import run_latin
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import (LoadCase, compare_error, newmark_quasi_newton,
                              resample_fields_to_gauss)
from latinpgd.timegrid import TimeGrid, quad_resample_to_gauss

PARAMS = reference_concrete()
HOOKE = PARAMS.hooke()

mesh = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(mesh, PARAMS.rho)
K = assemble_stiffness(mesh, HOOKE)
alpha, beta = rayleigh_coeffs(PARAMS.xi, 8.99, 45.8)
system = SpatialSystem(mesh, M, K, alpha * M + beta * K)

A = float(sys.argv[1]) if len(sys.argv) > 1 else 0.0138
n_el = int(sys.argv[2]) if len(sys.argv) > 2 else 400
zeta = float(sys.argv[3]) if len(sys.argv) > 3 else 5e-4
load = LoadCase(np.array([A]), np.array([3.0]))
grid = TimeGrid(2.0, n_el)

t0 = time.perf_counter()
state = run_latin(system, PARAMS, load, grid, zeta_stop=zeta)
wall = time.perf_counter() - t0
print("LATIN: converged=%s modes=%d xi=%.3e wall=%.0fs"
      % (state.converged, state.n_modes, state.xi, wall))
d_lat = state.damage
gp_lat = state.monitored_point()
print("LATIN d_max=%.6f at gp %d (el x=%.2f)"
      % (d_lat.max(), gp_lat, mesh.nodes[mesh.conn[gp_lat // 8]].mean(axis=0)[0]))

times = np.linspace(0.0, 2.0, 2 * n_el + 1)
res = newmark_quasi_newton(system, PARAMS, load, times, damage=True)
ref_eps = resample_fields_to_gauss(grid, res["eps"])
ref_sig = resample_fields_to_gauss(grid, res["sig"])
ref_d = resample_fields_to_gauss(grid, res["d"])
gp_ref = int(ref_d.max(axis=1).argmax())
print("NNR   d_max=%.6f at gp %d (nodal %.6f); resampled at gp_lat=%.6f"
      % (ref_d.max(), gp_ref, res["d"][:, -1].max(), ref_d[gp_lat].max()))

sol = state.solution.fields()
eps = compare_error(sol["sig"], sol["eps"], ref_sig, ref_eps)
print("compare eps = %.3f %%" % eps)
rel = abs(d_lat.max() - ref_d.max()) / ref_d.max()
print("damage gap (max vs max): %.3f %%" % (100 * rel))
rel_nodal = abs(d_lat.max() - res["d"][:, -1].max()) / res["d"][:, -1].max()
print("damage gap (vs nodal NNR): %.3f %%" % (100 * rel_nodal))
