"""How far is the undamaged elastic response from the damaged NNR response?"""
import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
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
el = newmark_quasi_newton(system, PARAMS, load, times, damage=False)
el_eps, el_sig = resample_fields_to_gauss(grid, el)

print("eps(elastic vs NNR) all t: %.3f %%"
      % compare_error(ref_eps, ref_sig, el_eps, el_sig))

tg = grid.all_gauss_times
for t0 in (0.3, 0.5):
    late = tg > t0
    print("eps(elastic vs NNR) t>%.1f: %.3f %%"
          % (t0, compare_error(ref_eps[:, late], ref_sig[:, late],
                               el_eps[:, late], el_sig[:, late])))
    early = ~late
    print("eps(elastic vs NNR) t<=%.1f: %.3f %%"
          % (t0, compare_error(ref_eps[:, early], ref_sig[:, early],
                               el_eps[:, early], el_sig[:, early])))

# where does the NNR field's own norm live in time?  (energy distribution)
den = (ref_sig ** 2).sum(axis=(0, 2))
print("NNR |sig|^2 share at t<0.3: %.1f %% ; t<0.5: %.1f %%"
      % (100 * den[tg <= 0.3].sum() / den.sum(),
         100 * den[tg <= 0.5].sum() / den.sum()))
