"""Anatomy of the converged LATIN state: where Delta and the d-gap live."""
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

state = run_latin(system, PARAMS, load, grid, zeta_stop=5e-4, max_modes=150,
                  enrich_zeta=1e-3, enrich_max_iter=10)
print("LATIN: converged=%s modes=%d xi=%.3e wall=%.0fs"
      % (state.converged, state.n_modes, state.xi, state.wall))

delta = state.delta  # (n_gauss, n_tg, 6)
el_x = mesh.nodes[mesh.conn].mean(axis=1)[:, 0]
d2 = (delta ** 2).sum(axis=2)                      # (n_gauss, n_tg)
d2_el = d2.reshape(64, 8, -1).sum(axis=1)          # (n_el, n_tg)
tg = grid.all_gauss_times
early = tg < 0.3
print("\nDelta^2 by element x-center (rows: total | early t<0.3 | late):")
for lo in (0.0, 2.0, 3.5, 4.5, 6.0):
    hi = lo + (2.0 if lo in (0.0, 6.0) else 1.5 if lo == 2.0 else 1.0)
    sel = (el_x >= lo) & (el_x < hi)
    tot = d2_el[sel].sum()
    er = d2_el[sel][:, early].sum()
    print("  x in [%.1f,%.1f): total=%.3e early=%.3e late=%.3e"
          % (lo, hi, tot, er, tot - er))
print("Delta^2 grand total: %.3e ; support els share: %.1f%% ; early-t share: %.1f%%"
      % (d2_el.sum(),
         100 * d2_el[(el_x < 0.5) | (el_x > 7.5)].sum() / d2_el.sum(),
         100 * d2_el[:, early].sum() / d2_el.sum()))

times = np.linspace(0.0, 2.0, 2 * n_el + 1)
res = newmark_quasi_newton(system, PARAMS, load, times, damage=True)
ref_eps, ref_sig = resample_fields_to_gauss(grid, res)
_, eps, sig = state.solution.fields()
print("\ncompare_error vs NNR: %.3f %%" % compare_error(ref_eps, ref_sig, eps, sig))

d_lat = state.damage[:, -1]
d_nnr = res["d"][:, -1]
gp = int(d_nnr.argmax())
print("NNR d_max=%.6f at gp %d | LATIN there=%.6f | LATIN max=%.6f at gp %d"
      % (d_nnr.max(), gp, d_lat[gp], d_lat.max(), int(d_lat.argmax())))
print("rel gap (max vs max): %.2f %%"
      % (100 * abs(d_lat.max() - d_nnr.max()) / d_nnr.max()))

# strain amplitude at the hot gauss point, late window: LATIN vs NNR
hot = gp
e_lat = np.abs(eps[hot, :, 0])
e_nnr = np.abs(ref_eps[hot, :, 0])
late = tg > 0.5
print("hot-gp |eps_xx| late-window max: LATIN=%.4e NNR=%.4e (ratio %.4f)"
      % (e_lat[late].max(), e_nnr[late].max(),
         e_lat[late].max() / e_nnr[late].max()))

np.save("/tmp/probe_tail_delta_el.npy", d2_el)
