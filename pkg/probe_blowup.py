"""Watch where the LATIN iterate destabilizes: per-iteration hat extremes."""
import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.latin import run_latin
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase
from latinpgd.timegrid import TimeGrid

PARAMS = reference_concrete()

mesh = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(mesh, PARAMS.rho)
K = assemble_stiffness(mesh, PARAMS.hooke())
alpha, beta = rayleigh_coeffs(PARAMS.xi, 8.99, 45.8)
system = SpatialSystem(mesh, M, K, alpha * M + beta * K)

load = LoadCase(np.array([0.0138]), np.array([3.0]))
grid = TimeGrid(2.0, 400)

# support elements: x-extent touching 0 or 8 -> elements ix=0 and ix=15
el_x = mesh.nodes[mesh.conn].mean(axis=1)[:, 0]
support = np.repeat((el_x < 0.5) | (el_x > 7.5), 8)


def cb(state):
    h = state.hat
    dbar, Y, d = h["dbar"], h["Y"], h["d"]
    gp_dbar = np.unravel_index(dbar.argmax(), dbar.shape)
    print("it=%2d xi=%.3e | dbar_max=%.4f at gp%d t#%d | Y_max=%.3e | "
          "d_max=%.4f | d_max_sup=%.4f d_max_mid=%.4f"
          % (state.iteration, state.xi, dbar.max(), gp_dbar[0], gp_dbar[1],
             Y.max(), d.max(), d[support].max(), d[~support].max()),
          flush=True)


state = run_latin(system, PARAMS, load, grid, zeta_stop=5e-4, max_modes=150,
                  enrich_zeta=1e-3, enrich_max_iter=10,
                  callback=cb)
