"""Probe: driver smoke runs (elastic exactness, calibrated damaging run)."""
import time

import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.latin import run_latin
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase, newmark_quasi_newton
from latinpgd.timegrid import TimeGrid

PAR = reference_concrete()
beam = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(beam, PAR.rho)
K = assemble_stiffness(beam, PAR.hooke())
al, be = rayleigh_coeffs(PAR.xi, 8.99, 45.8)
system = SpatialSystem(beam, M, K, al * M + be * K)

print("=== elastic exactness (sub-threshold amplitude) ===")
grid_c = TimeGrid(2.0, 100)
st = run_latin(system, PAR, LoadCase(np.array([0.005]), np.array([3.0])), grid_c)
print(f"iterations={st.iteration} modes={st.n_modes} xi={st.xi:.3e} "
      f"converged={st.converged} wall={st.wall:.1f}s d_max={st.damage.max()}")

print("=== calibrated damaging run, 3 Hz, xi_stop=0.05% ===")
grid = TimeGrid(2.0, 400)
load = LoadCase(np.array([0.00965]), np.array([3.0]))


def report(s):
    row = s.log[-1]
    if row["iteration"] % 5 == 0 or row["iteration"] < 4:
        print(f"  it={row['iteration']:3d} modes={row['modes']:3d} "
              f"xi={row['xi']:.5f} cre={row['cre']:.3e} "
              f"t={row['seconds']:6.1f}s", flush=True)


st2 = run_latin(system, PAR, load, grid, callback=report)
print(f"done: iterations={st2.iteration} modes={st2.n_modes} xi={st2.xi:.6f} "
      f"converged={st2.converged} wall={st2.wall:.1f}s")
gp = st2.monitored_point()
d_latin = st2.damage.max()
print(f"LATIN d_max={d_latin:.6f} at gauss point {gp}")

t0 = time.perf_counter()
nnr = newmark_quasi_newton(system, PAR, load, np.linspace(0.0, 2.0, 801))
print(f"NNR wall={time.perf_counter()-t0:.1f}s d_max={nnr['d'].max():.6f} "
      f"at gp {int(np.unravel_index(nnr['d'].argmax(), nnr['d'].shape)[0])}")
d_nnr_same = nnr["d"][gp].max()
print(f"NNR d at LATIN monitored point {gp}: {d_nnr_same:.6f}  "
      f"rel gap: {abs(d_latin - d_nnr_same) / d_nnr_same * 100:.3f}%")
