"""compare_error vs NNR tracked along the LATIN iterations."""
import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.latin import run_latin
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import (LoadCase, compare_error, newmark_quasi_newton,
                              resample_fields_to_gauss)
from latinpgd.timegrid import TimeGrid

PARAMS = reference_concrete()
HOOKE = PARAMS.hooke()

mesh = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(mesh, PARAMS.rho)
K = assemble_stiffness(mesh, HOOKE)
alpha, beta = rayleigh_coeffs(PARAMS.xi, 8.99, 45.8)
system = SpatialSystem(mesh, M, K, alpha * M + beta * K)

A, n_el = 0.0138, 400
load = LoadCase(np.array([A]), np.array([3.0]))
grid = TimeGrid(2.0, n_el)
times = np.linspace(0.0, 2.0, 2 * n_el + 1)

res = newmark_quasi_newton(system, PARAMS, load, times, damage=True)
ref_eps, ref_sig = resample_fields_to_gauss(grid, res)
d_ref = res["d"][:, -1].max()
print("NNR d_max=%.6f" % d_ref)


def watch(state):
    it = state.iteration
    if it % 5 and it != 1:
        return
    _, eps, sig = state.solution.fields()
    eps_c = compare_error(ref_eps, ref_sig, eps, sig)
    print("it=%3d modes=%3d xi=%.3e eps=%7.3f%% d_hat=%.4f"
          % (it, state.n_modes, state.xi, eps_c,
             state.hat["d"][:, -1].max()), flush=True)


state = run_latin(system, PARAMS, load, grid, zeta_stop=1e-4, max_modes=150,
                  enrich_zeta=1e-3, enrich_max_iter=10, callback=watch)
_, eps, sig = state.solution.fields()
print("final: modes=%d xi=%.3e eps=%.3f%% d=%.6f (NNR %.6f)"
      % (state.n_modes, state.xi, compare_error(ref_eps, ref_sig, eps, sig),
         state.hat["d"][:, -1].max(), d_ref))
